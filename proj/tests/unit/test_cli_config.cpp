#include <doctest.h>

#include "hptr/error.hpp"
#include "run_config.hpp"

using namespace hptr;
using hptr::cli::RunConfig;

TEST_SUITE("config") {
  TEST_CASE("file text parsing") {
    const auto kv = cli::parse_config_text("# comment\n\nbeam-size = 4\n  seed=7   # trailing\nfusion = full\n");
    REQUIRE(kv.size() == 3);
    CHECK(kv[0] == std::pair<std::string, std::string>{"beam-size", "4"});
    CHECK(kv[1] == std::pair<std::string, std::string>{"seed", "7"});
    CHECK(kv[2].second == "full");
  }

  TEST_CASE("unknown keys and bad lines name the line") {
    try {
      cli::parse_config_text("seed = 1\nbogus-key = 3\n");
      FAIL("expected UsageError");
    } catch (const UsageError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("bogus-key") != std::string::npos);
    }
    CHECK_THROWS_AS(cli::parse_config_text("no equals sign\n"), UsageError);
    CHECK_THROWS_AS(cli::read_config_file("/nonexistent/hptr.cfg"), DataError);
  }

  TEST_CASE("values and derived settings") {
    RunConfig c;
    c.set("transition-system", "oi");
    c.set("beta1-beta2", "0.8");
    c.set("projective", "true");
    c.set("word-pos-char-embedding-dimension", "32");
    c.finalize();
    CHECK(c.model.system == SystemKind::kOI);
    CHECK(c.model.fusion == default_fusion(SystemKind::kOI));
    CHECK(c.train.beta1 == 0.8);
    CHECK(c.train.beta2 == 0.8);
    CHECK(c.decode.legality.projective_only);
    CHECK(c.train.legality.projective_only);
    CHECK(c.model.word_dim == 32);
    CHECK(c.model.pos_dim == 32);
    CHECK(c.model.char_dim == 32);
    CHECK(c.echo.at("beta1-beta2") == "0.8");
  }

  TEST_CASE("defaults match the reference hyper-parameters") {
    RunConfig c;
    c.finalize();
    CHECK(c.model.char_window == 3);
    CHECK(c.model.char_filters == 50);
    CHECK(c.model.encoder_layers == 3);
    CHECK(c.model.encoder_size == 512);
    CHECK(c.model.decoder_size == 512);
    CHECK(c.model.lstm_dropout == 0.33);
    CHECK(c.model.embedding_dropout == 0.33);
    CHECK(c.model.arc_mlp_size == 512);
    CHECK(c.model.label_mlp_size == 128);
    CHECK(c.model.unk_replacement == 0.5);
    CHECK(c.train.learning_rate == 0.001);
    CHECK(c.train.beta1 == 0.9);
    CHECK(c.train.batch_size == 32);
    CHECK(c.train.decay_rate == 0.75);
    CHECK(c.train.clip_norm == 5.0);
    CHECK(c.train.epsilon == 1e-8);
  }

  TEST_CASE("rejections") {
    RunConfig c;
    CHECK_THROWS_AS(c.set("nope", "1"), UsageError);
    CHECK_THROWS_AS(c.set("beam-size", "x"), UsageError);
    CHECK_THROWS_AS(c.set("mlp-activation-function", "relu"), UsageError);
    CHECK_THROWS_AS(c.set("transition-system", "ltr"), UsageError);
    RunConfig bad;
    bad.set("transition-system", "l2r");
    bad.set("fusion", "r-simple");
    CHECK_THROWS_AS(bad.finalize(), UsageError);
    RunConfig zero;
    zero.set("beam-size", "0");
    CHECK_THROWS_AS(zero.finalize(), UsageError);
    for (const auto& k : cli::known_keys()) CHECK_FALSE(k.empty());
  }
}
