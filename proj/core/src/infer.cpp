#include "hptr/infer.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>

#include "hptr/error.hpp"

namespace hptr {

namespace {

template <class T>
struct Session {
  using M = Model<T>;
  const M& model;
  ad::Graph<T> graph;
  typename M::Encoding enc;

  Session(const M& m, const EncodedSentence& s, const ad::Matrix<T>* ext) : model(m), graph(m.params()) {
    RunContext ctx;
    enc = m.encode(graph, s, ext, ctx);
  }

  // Step log-probabilities over 0..n; illegal entries are -inf.
  std::vector<double> step(const ParserState& state, const typename M::Carry& carry,
                           const LegalityOptions& legality, typename M::Step* out) {
    *out = model.decoder_step(graph, enc, state, carry);
    const auto mask = M::legal_mask(state, legality);
    const auto lp = ad::Graph<T>::masked_log_softmax_values(graph.value(out->scores), mask);
    std::vector<double> r(mask.size());
    for (std::size_t j = 0; j < mask.size(); ++j)
      r[j] = mask[j] ? static_cast<double>(lp(static_cast<ad::Index>(j), 0)) : -std::numeric_limits<double>::infinity();
    return r;
  }
};

template <class T>
std::vector<std::string> labels_for(Session<T>& sess, std::span<const int> heads) {
  const auto& labels = sess.model.vocab().labels;
  std::vector<std::string> out;
  out.reserve(heads.size());
  for (std::size_t d = 1; d <= heads.size(); ++d) {
    auto scores = sess.model.label_scores(sess.graph, sess.enc, heads[d - 1], static_cast<int>(d));
    const auto& v = sess.graph.value(scores);
    int best = kUnkId;
    for (int k = kUnkId + 1; k < labels.size(); ++k)
      if (best == kUnkId || v(k, 0) > v(best, 0)) best = k;
    out.push_back(labels.symbol(best));
  }
  return out;
}

template <class T>
ParseResult finish(Session<T>& sess, const ParserState& state, std::vector<int> actions, std::vector<double> lps) {
  ParseResult r;
  r.tree.heads.assign(state.heads().begin(), state.heads().end());
  r.tree.labels = labels_for(sess, r.tree.heads);
  r.actions = std::move(actions);
  r.step_log_probs = std::move(lps);
  for (double x : r.step_log_probs) r.log_prob += x;
  return r;
}

}  // namespace

template <class T>
ParseResult greedy_parse(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext,
                         const LegalityOptions& legality) {
  Session<T> sess(model, s, ext);
  auto carry = model.initial_carry(sess.graph, sess.enc);
  ParserState state(model.config().system, s.size());
  std::vector<int> actions;
  std::vector<double> lps;
  while (!state.done()) {
    typename Model<T>::Step step;
    const auto lp = sess.step(state, carry, legality, &step);
    int best = -1;
    for (std::size_t j = 0; j < lp.size(); ++j)
      if (lp[j] != -std::numeric_limits<double>::infinity() && (best < 0 || lp[j] > lp[static_cast<std::size_t>(best)]))
        best = static_cast<int>(j);
    if (best < 0) throw std::logic_error("no legal parent");
    state.apply_attach(best, legality);
    Model<T>::advance(carry, step);
    actions.push_back(best);
    lps.push_back(lp[static_cast<std::size_t>(best)]);
  }
  return finish(sess, state, std::move(actions), std::move(lps));
}

template <class T>
ParseResult beam_parse(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext, int beam,
                       const LegalityOptions& legality) {
  if (beam < 1) throw UsageError("beam size must be >= 1");
  Session<T> sess(model, s, ext);
  struct Item {
    ParserState state;
    typename Model<T>::Carry carry;
    std::vector<int> actions;
    std::vector<double> lps;
    double score = 0.0;
  };
  auto better = [](const Item& a, const Item& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.actions < b.actions;
  };

  std::vector<Item> items;
  items.push_back({ParserState(model.config().system, s.size()), model.initial_carry(sess.graph, sess.enc), {}, {}, 0.0});
  for (int t = 0; t < s.size(); ++t) {
    std::vector<Item> next;
    for (const auto& item : items) {
      typename Model<T>::Step step;
      const auto lp = sess.step(item.state, item.carry, legality, &step);
      std::vector<int> cand;
      for (std::size_t j = 0; j < lp.size(); ++j)
        if (lp[j] != -std::numeric_limits<double>::infinity()) cand.push_back(static_cast<int>(j));
      // stable: equal log-probs keep ascending position order
      std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
        return lp[static_cast<std::size_t>(a)] > lp[static_cast<std::size_t>(b)];
      });
      if (static_cast<int>(cand.size()) > beam) cand.resize(static_cast<std::size_t>(beam));
      for (int p : cand) {
        Item child{item.state, item.carry, item.actions, item.lps, item.score};
        child.state.apply_attach(p, legality);
        Model<T>::advance(child.carry, step);
        child.actions.push_back(p);
        child.lps.push_back(lp[static_cast<std::size_t>(p)]);
        child.score += lp[static_cast<std::size_t>(p)];
        next.push_back(std::move(child));
      }
    }
    std::sort(next.begin(), next.end(), better);
    if (static_cast<int>(next.size()) > beam) next.erase(next.begin() + beam, next.end());
    items = std::move(next);
  }
  auto& top = items.front();
  return finish(sess, top.state, std::move(top.actions), std::move(top.lps));
}

template <class T>
double sequence_log_prob(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext,
                         std::span<const int> actions, const LegalityOptions& legality) {
  if (static_cast<int>(actions.size()) != s.size()) throw UsageError("action sequence length differs from sentence length");
  Session<T> sess(model, s, ext);
  auto carry = model.initial_carry(sess.graph, sess.enc);
  ParserState state(model.config().system, s.size());
  double total = 0.0;
  for (int p : actions) {
    typename Model<T>::Step step;
    const auto lp = sess.step(state, carry, legality, &step);
    state.apply_attach(p, legality);
    Model<T>::advance(carry, step);
    total += lp[static_cast<std::size_t>(p)];
  }
  return total;
}

template <class T>
std::vector<std::string> predict_labels(const Model<T>& model, const EncodedSentence& s, ExtPtr<T> ext,
                                        std::span<const int> heads) {
  Session<T> sess(model, s, ext);
  return labels_for(sess, heads);
}

template <class T>
Treebank parse_treebank(const Model<T>& model, std::span<const Sentence> tb,
                        std::type_identity_t<std::span<const ad::Matrix<T>>> ext,
                        const DecodeOptions& opts, int threads) {
  if (!ext.empty() && ext.size() != tb.size())
    throw DataError("external embeddings do not cover every sentence");
  Treebank out(tb.begin(), tb.end());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), tb.size()));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < tb.size(); i += workers) {
        const auto enc = encode_sentence(model.vocab(), tb[i], model.config().max_word_chars);
        const auto r = parse(model, enc, ext.empty() ? nullptr : &ext[i], opts);
        out[i] = with_tree(tb[i], r.tree);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

#define HPTR_INSTANTIATE(T)                                                                                          \
  template ParseResult greedy_parse<T>(const Model<T>&, const EncodedSentence&, const ad::Matrix<T>*,              \
                                       const LegalityOptions&);                                                     \
  template ParseResult beam_parse<T>(const Model<T>&, const EncodedSentence&, const ad::Matrix<T>*, int,           \
                                     const LegalityOptions&);                                                       \
  template double sequence_log_prob<T>(const Model<T>&, const EncodedSentence&, const ad::Matrix<T>*,              \
                                       std::span<const int>, const LegalityOptions&);                               \
  template std::vector<std::string> predict_labels<T>(const Model<T>&, const EncodedSentence&,                     \
                                                      const ad::Matrix<T>*, std::span<const int>);                  \
  template Treebank parse_treebank<T>(const Model<T>&, std::span<const Sentence>, std::span<const ad::Matrix<T>>,  \
                                      const DecodeOptions&, int);

HPTR_INSTANTIATE(float)
HPTR_INSTANTIATE(double)

}  // namespace hptr
