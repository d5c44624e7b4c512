#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "hptr/checkpoint.hpp"
#include "hptr/embeddings.hpp"
#include "hptr/error.hpp"
#include "hptr/gradcheck.hpp"
#include "hptr/model.hpp"
#include "hptr/treebank.hpp"

using namespace hptr;
using Mat = ad::Matrix<double>;

namespace {
struct Fixture {
  Treebank tb = parse_conllu(fixtures::kFigure1);
  Vocab vocab = Vocab::build(tb);
  EncodedSentence sent = encode_sentence(vocab, tb[0]);

  Model<double> model(SystemKind system = SystemKind::kOI, FusionKind fusion = FusionKind::kFull,
                      GateKind gate = GateKind::kGate1, std::uint64_t seed = 3) const {
    Model<double> m(gradcheck_config(system, fusion, gate), vocab, seed);
    // Move zero-initialised tensors to generic values.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (std::size_t p = 0; p < m.params().size(); ++p)
      for (ad::Index i = 0; i < m.params().at(p).value.size(); ++i) m.params().at(p).value.data()[i] += u(rng);
    return m;
  }
};

Mat& param(Model<double>& m, const std::string& name) { return m.params()[*m.params().find(name)].value; }

Mat random_col(ad::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Mat v(n, 1);
  for (ad::Index i = 0; i < n; ++i) v(i, 0) = u(rng);
  return v;
}
}  // namespace

TEST_SUITE("model") {
  TEST_CASE("encoder output shape and determinism") {
    Fixture f;
    const auto m = f.model();
    ad::Graph<double> g(m.params());
    RunContext ctx;
    const auto e1 = m.encode(g, f.sent, nullptr, ctx);
    const auto e2 = m.encode(g, f.sent, nullptr, ctx);
    CHECK(g.cols(e1.states) == 7);
    CHECK(g.rows(e1.states) == 2 * m.config().encoder_size);
    CHECK(g.value(e1.states) == g.value(e2.states));

    auto swapped = f.sent;
    std::swap(swapped.words[0], swapped.words[4]);
    std::swap(swapped.chars[0], swapped.chars[4]);
    std::swap(swapped.pos[0], swapped.pos[4]);
    const auto e3 = m.encode(g, swapped, nullptr, ctx);
    CHECK(g.value(e3.states).col(1) != g.value(e1.states).col(1));
    CHECK(g.value(e3.states).col(5) != g.value(e1.states).col(5));
    CHECK(g.value(e3.states) != g.value(e1.states));
  }

  TEST_CASE("full-size encoder states are 1024 wide") {
    Fixture f;
    ModelConfig c;  // defaults
    c.system = SystemKind::kL2R;
    c.fusion = FusionKind::kLSimple;
    c.encoder_layers = 1;  // keep the test quick; width is what matters
    const Model<float> m(c, f.vocab, 1);
    ad::Graph<float> g(m.params());
    RunContext ctx;
    const auto e = m.encode(g, f.sent, nullptr, ctx);
    CHECK(g.rows(e.states) == 1024);
    auto carry = m.initial_carry(g, e);
    ParserState st(SystemKind::kL2R, 6);
    const auto step = m.decoder_step(g, e, st, carry);
    CHECK(g.rows(step.state) == 512);
    CHECK(g.rows(step.scores) == 7);
  }

  TEST_CASE("fusion reduces to the previous state when dependents are null") {
    Fixture f;
    auto m = f.model(SystemKind::kOI, FusionKind::kFull, GateKind::kGate1);
    param(m, "fusion.null").setZero();
    param(m, "gate.b_g").setZero();
    std::mt19937_64 rng(1);
    const Mat s = random_col(m.config().decoder_size, rng);
    ad::Graph<double> g(m.params());
    const Mat out = g.value(m.fuse(g, g.constant(s), {}));
    const Mat gate = (1.0 / (1.0 + (-(param(m, "gate.W_gp") * s).array()).exp())).matrix();
    const Mat h = (param(m, "fusion.W_p") * s).array().tanh().matrix();
    CHECK((out - gate.cwiseProduct(h)).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("gate2 with a zero previous state and bias is one half") {
    Fixture f;
    auto m = f.model(SystemKind::kOI, FusionKind::kSimple, GateKind::kGate2);
    param(m, "gate.b_g").setZero();
    std::mt19937_64 rng(2);
    const int d = m.config().decoder_size;
    const Mat lm = random_col(d, rng), rm = random_col(d, rng);
    ad::Graph<double> g(m.params());
    Model<double>::DependentStates deps;
    deps.lm = g.constant(lm);
    deps.rm = g.constant(rm);
    const Mat out = g.value(m.fuse(g, g.constant(Mat::Zero(d, 1)), deps));
    const Mat h = (param(m, "fusion.W_lm") * lm + param(m, "fusion.W_rm") * rm).array().tanh().matrix();
    CHECK((out - 0.5 * h).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("inactive dependent weights are not allocated") {
    Fixture f;
    const auto l = f.model(SystemKind::kL2R, FusionKind::kLSimple, GateKind::kGate2);
    CHECK(l.params().find("fusion.W_lm"));
    CHECK_FALSE(l.params().find("fusion.W_rm"));
    CHECK_FALSE(l.params().find("fusion.W_la"));
    CHECK_FALSE(l.params().find("gate.W_gp"));
    const auto seq = f.model(SystemKind::kL2R, FusionKind::kSequential, GateKind::kGate1);
    CHECK_FALSE(seq.params().find("fusion.null"));
    CHECK(seq.params().find("gate.W_gp"));
  }

  TEST_CASE("decoder cell is pure and sensitive to the focus state") {
    Fixture f;
    const auto m = f.model();
    std::mt19937_64 rng(3);
    const int d = m.config().decoder_size, e = 2 * m.config().encoder_size;
    const Mat fused = random_col(d, rng), hi = random_col(e, rng), hp = random_col(d, rng), cp = random_col(d, rng);
    ad::Graph<double> g(m.params());
    auto [s1, c1] = m.decoder_cell(g, g.constant(fused), g.constant(hi), g.constant(hp), g.constant(cp));
    auto [s2, c2] = m.decoder_cell(g, g.constant(fused), g.constant(hi), g.constant(hp), g.constant(cp));
    CHECK(g.rows(s1) == d);
    CHECK(g.value(s1) == g.value(s2));
    CHECK(g.value(c1) == g.value(c2));
    auto [s3, c3] = m.decoder_cell(g, g.constant(fused), g.constant(random_col(e, rng)), g.constant(hp), g.constant(cp));
    CHECK(g.value(s3) != g.value(s1));
  }

  TEST_CASE("pointer scores") {
    Fixture f;
    auto m = f.model();
    ad::Graph<double> g(m.params());
    RunContext ctx;
    const auto enc = m.encode(g, f.sent, nullptr, ctx);
    std::mt19937_64 rng(4);
    const Mat s = random_col(m.config().decoder_size, rng);
    const Mat v = g.value(m.point_scores(g, enc, g.constant(s)));
    std::vector<std::uint8_t> one(7, 0);
    one[3] = 1;
    const Mat a = ad::Graph<double>::masked_softmax_values(v, one);
    CHECK(a(3, 0) == 1.0);
    CHECK(a.sum() == 1.0);

    param(m, "pointer.W").setZero();
    param(m, "pointer.U").setZero();
    param(m, "pointer.b").setZero();
    ad::Graph<double> h(m.params());
    const auto enc2 = m.encode(h, f.sent, nullptr, ctx);
    const Mat v1 = h.value(m.point_scores(h, enc2, h.constant(s)));
    const Mat v2 = h.value(m.point_scores(h, enc2, h.constant(random_col(m.config().decoder_size, rng))));
    CHECK((v1 - v2).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("label distribution") {
    Fixture f;
    const auto m = f.model();
    ad::Graph<double> g(m.params());
    RunContext ctx;
    const auto enc = m.encode(g, f.sent, nullptr, ctx);
    const Mat p = ad::Graph<double>::softmax_values(g.value(m.label_scores(g, enc, 4, 1)));
    CHECK(std::abs(p.sum() - 1.0) < 1e-6);
    CHECK(p.rows() == f.vocab.labels.size());
    const Mat q = ad::Graph<double>::softmax_values(g.value(m.label_scores(g, enc, 1, 4)));
    CHECK((p - q).cwiseAbs().maxCoeff() > 1e-6);
  }

  TEST_CASE("uniform scorers give a loss of sum log k_t plus n log K") {
    Fixture f;
    for (auto sys : {SystemKind::kL2R, SystemKind::kR2L, SystemKind::kOI}) {
      auto m = f.model(sys, default_fusion(sys));
      for (const char* name : {"pointer.W", "pointer.U", "pointer.V", "pointer.b", "label.W", "label.lin", "label.b"})
        param(m, name).setZero();
      double expected = 0.0;
      ParserState st(sys, 6);
      const std::vector<int> gold{4, 3, 1, 0, 4, 4};
      while (!st.done()) {
        expected += std::log(static_cast<double>(st.legal_parents().size()));
        st.apply_attach(gold[static_cast<std::size_t>(st.focus() - 1)]);
      }
      expected += 6 * std::log(static_cast<double>(f.vocab.labels.size()));
      ad::Graph<double> g(m.params());
      RunContext ctx;
      CHECK(g.scalar(m.sentence_loss(g, f.sent, nullptr, ctx)) == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("sentence loss gradients for a few configurations") {
    for (auto [sys, fus, gate] : {std::tuple{SystemKind::kL2R, FusionKind::kLAdapted, GateKind::kGate1},
                                  std::tuple{SystemKind::kR2L, FusionKind::kRSimple, GateKind::kGate2},
                                  std::tuple{SystemKind::kOI, FusionKind::kFull, GateKind::kGate2}}) {
      const auto r = check_sentence_loss_gradients(gradcheck_config(sys, fus, gate), 3, 11, 120);
      CAPTURE(r.worst);
      CHECK(r.max_rel_error < 1e-4);
    }
  }

  TEST_CASE("incompatible fusion is rejected") {
    Fixture f;
    CHECK_THROWS_AS(Model<double>(gradcheck_config(SystemKind::kL2R, FusionKind::kRSimple, GateKind::kGate1), f.vocab, 1),
                    UsageError);
    CHECK_THROWS_AS(Model<double>(gradcheck_config(SystemKind::kOI, FusionKind::kLAdapted, GateKind::kGate1), f.vocab, 1),
                    UsageError);
    CHECK(compatible(FusionKind::kSequential, SystemKind::kR2L));
  }

  TEST_CASE("external embeddings are concatenated and checked") {
    Fixture f;
    auto c = gradcheck_config(SystemKind::kL2R, FusionKind::kLSimple, GateKind::kGate1);
    c.ext_dim = 3;
    const Model<double> m(c, f.vocab, 2);
    ad::Graph<double> g(m.params());
    RunContext ctx;
    CHECK_THROWS_AS(m.encode(g, f.sent, nullptr, ctx), DataError);
    const Mat wrong = Mat::Zero(3, 5);
    CHECK_THROWS_AS(m.encode(g, f.sent, &wrong, ctx), DataError);
    const Mat a = Mat::Zero(3, 6), b = Mat::Ones(3, 6);
    const auto ea = m.encode(g, f.sent, &a, ctx), eb = m.encode(g, f.sent, &b, ctx);
    CHECK(g.value(ea.states) != g.value(eb.states));
  }

  TEST_CASE("checkpoints reload byte-exactly") {
    Fixture f;
    const Model<float> m(gradcheck_config(SystemKind::kOI, FusionKind::kSimple, GateKind::kGate2), f.vocab, 9);
    const nlohmann::json meta{{"note", "x"}};
    const auto bytes = serialize_checkpoint(m, meta);
    nlohmann::json back_meta;
    const auto back = deserialize_checkpoint(bytes, &back_meta);
    CHECK(back_meta == meta);
    CHECK(back.config() == m.config());
    REQUIRE(back.params().size() == m.params().size());
    for (std::size_t i = 0; i < m.params().size(); ++i) {
      CHECK(back.params().at(i).name == m.params().at(i).name);
      CHECK(back.params().at(i).value == m.params().at(i).value);
    }
    CHECK(serialize_checkpoint(back, meta) == bytes);
    CHECK_THROWS_AS(deserialize_checkpoint(bytes.substr(0, bytes.size() - 3)), DataError);
    CHECK_THROWS_AS(deserialize_checkpoint("not a checkpoint"), DataError);

    save_checkpoint("model_roundtrip.ckpt", m, meta);
    CHECK(serialize_checkpoint(load_checkpoint("model_roundtrip.ckpt"), meta) == bytes);
  }

  TEST_CASE("precision cast keeps structure") {
    Fixture f;
    const Model<float> m(gradcheck_config(SystemKind::kR2L, FusionKind::kRAdapted, GateKind::kGate1), f.vocab, 4);
    const auto d = m.cast<double>();
    const auto back = d.cast<float>();
    for (std::size_t i = 0; i < m.params().size(); ++i) CHECK(back.params().at(i).value == m.params().at(i).value);
  }

  TEST_CASE("model over a foreign parameter set is rejected") {
    Fixture f;
    const Model<double> a(gradcheck_config(SystemKind::kL2R, FusionKind::kLSimple, GateKind::kGate1), f.vocab, 1);
    CHECK_THROWS_AS(
        Model<double>(gradcheck_config(SystemKind::kL2R, FusionKind::kLAdapted, GateKind::kGate1), f.vocab, a.params()),
        DataError);
  }
}

TEST_SUITE("embeddings") {
  TEST_CASE("file format round trip and alignment") {
    const std::string text = "# fig1 2 3\n0.5 1\n-2 3.25\n0 0\n";
    const auto e = parse_external_embeddings(text);
    REQUIRE(e.size() == 1);
    CHECK(e[0].sent_id == "fig1");
    CHECK(e[0].vectors.rows() == 2);
    CHECK(e[0].vectors.cols() == 3);
    CHECK(e[0].vectors(1, 1) == 3.25f);
    CHECK(parse_external_embeddings(write_external_embeddings(e))[0].vectors == e[0].vectors);

    const auto tb = parse_conllu(fixtures::kFigure1);
    CHECK_THROWS_AS(check_alignment(e, tb), DataError);  // 3 vectors for 6 tokens
    const auto six = parse_external_embeddings("# fig1 1 6\n1\n2\n3\n4\n5\n6\n");
    CHECK(check_alignment(six, tb) == 1);
    const auto wrong_id = parse_external_embeddings("# other 1 6\n1\n2\n3\n4\n5\n6\n");
    CHECK_THROWS_AS(check_alignment(wrong_id, tb), DataError);
    CHECK_THROWS_AS(parse_external_embeddings("# s 2 1\n1\n"), ParseError);
    CHECK_THROWS_AS(parse_external_embeddings("1 2\n"), ParseError);
  }
}
