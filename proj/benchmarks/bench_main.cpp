#include <benchmark/benchmark.h>

#include <random>

#include "hptr/infer.hpp"
#include "hptr/synthetic.hpp"
#include "hptr/train.hpp"

using namespace hptr;

namespace {

struct Bench {
  Treebank tb;
  Vocab vocab;
  Model<float> model;

  explicit Bench(int length, SystemKind sys = SystemKind::kOI)
      : tb(toy_treebank(16, length, 50, 1)), vocab(Vocab::build(tb)), model(config(sys), vocab, 1) {}

  static ModelConfig config(SystemKind sys) {
    auto c = ModelConfig::tiny();
    c.system = sys;
    c.fusion = default_fusion(sys);
    return c;
  }

  EncodedSentence longest() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < tb.size(); ++i)
      if (tb[i].size() > tb[best].size()) best = i;
    return encode_sentence(vocab, tb[best]);
  }
};

void BM_Legality(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const auto heads = random_projective_tree(n, rng);
  const LegalityOptions opts{state.range(1) != 0, false};
  for (auto _ : state) {
    ParserState st(SystemKind::kOI, n);
    const auto actions = oracle_sequence(SystemKind::kOI, heads);
    for (int a : actions) {
      benchmark::DoNotOptimize(st.legal_parents(opts));
      st.apply_attach(a, opts);
    }
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Legality)->ArgsProduct({{10, 30, 60}, {0, 1}});

void BM_SentenceLoss(benchmark::State& state) {
  Bench b(static_cast<int>(state.range(0)));
  const auto s = b.longest();
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    ad::Graph<float> g(b.model.params());
    RunContext ctx{true, &rng, {}};
    const auto loss = b.model.sentence_loss(g, s, nullptr, ctx);
    ad::Gradients<float> grads(b.model.params());
    g.backward(loss, grads);
    benchmark::DoNotOptimize(grads.squared_norm());
  }
  state.SetItemsProcessed(state.iterations() * s.size());
}
BENCHMARK(BM_SentenceLoss)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_GreedyParse(benchmark::State& state) {
  Bench b(static_cast<int>(state.range(0)));
  const auto s = b.longest();
  for (auto _ : state) benchmark::DoNotOptimize(greedy_parse(b.model, s, nullptr));
  state.SetItemsProcessed(state.iterations() * s.size());
}
BENCHMARK(BM_GreedyParse)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_BeamParse(benchmark::State& state) {
  Bench b(20);
  const auto s = b.longest();
  const int beam = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(beam_parse(b.model, s, nullptr, beam));
  state.SetItemsProcessed(state.iterations() * s.size());
}
BENCHMARK(BM_BeamParse)->Arg(1)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_TrainEpoch(benchmark::State& state) {
  Bench b(12);
  TrainConfig cfg;
  cfg.batch_size = 8;
  cfg.threads = static_cast<int>(state.range(0));
  Trainer t(b.model, cfg, b.tb);
  int epoch = 0;
  for (auto _ : state) benchmark::DoNotOptimize(t.run_epoch(++epoch));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(b.tb.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
