#include "hptr/gradcheck.hpp"

#include <random>

#include "hptr/synthetic.hpp"

namespace hptr {

ModelConfig gradcheck_config(SystemKind system, FusionKind fusion, GateKind gate) {
  ModelConfig c;
  c.char_filters = 4;
  c.char_dim = 3;
  c.word_dim = c.pos_dim = 4;
  c.encoder_layers = 2;
  c.encoder_size = 5;
  c.decoder_size = 6;
  c.arc_mlp_size = 5;
  c.label_mlp_size = 4;
  c.system = system;
  c.fusion = fusion;
  c.gate = gate;
  return c;
}

ad::GradCheckResult check_sentence_loss_gradients(const ModelConfig& config, int length, std::uint64_t seed,
                                                  std::size_t samples, double eps) {
  std::mt19937_64 rng(seed);
  const auto heads = random_tree(length, rng);
  std::vector<int> words(static_cast<std::size_t>(length));
  std::uniform_int_distribution<int> w(0, 5);
  for (auto& x : words) x = w(rng);
  Treebank tb{synthetic_sentence(heads, words)};
  const Vocab vocab = Vocab::build(tb);
  Model<double> model(config, vocab, seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (std::size_t p = 0; p < model.params().size(); ++p) {
    auto& v = model.params().at(p).value;
    for (ad::Index i = 0; i < v.size(); ++i) v.data()[i] += jitter(rng);
  }
  const auto enc = encode_sentence(vocab, tb[0], config.max_word_chars);
  ad::Matrix<double> ext;
  if (config.ext_dim > 0) {
    ext.resize(config.ext_dim, length);
    for (ad::Index i = 0; i < ext.size(); ++i) ext.data()[i] = jitter(rng);
  }
  auto loss = [&](ad::Graph<double>& g) {
    RunContext ctx;
    return model.sentence_loss(g, enc, config.ext_dim > 0 ? &ext : nullptr, ctx);
  };
  return ad::grad_check(loss, model.params(), eps, samples, seed);
}

}  // namespace hptr
