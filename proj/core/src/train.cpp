#include "hptr/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "hptr/error.hpp"

namespace hptr {

void TrainConfig::validate() const {
  if (batch_size < 1) throw UsageError("batch size must be >= 1");
  if (patience < 1) throw UsageError("patience must be >= 1");
  if (max_epochs < 0) throw UsageError("max epochs must be >= 0");
  if (learning_rate <= 0) throw UsageError("learning rate must be positive");
  if (decay_rate <= 0 || decay_rate > 1) throw UsageError("decay rate must lie in (0, 1]");
  if (beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1) throw UsageError("Adam betas must lie in [0, 1)");
  if (threads < 1) throw UsageError("threads must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string epoch_log_tsv(std::span<const EpochLog> log) {
  std::ostringstream os;
  os << "epoch\ttrain_loss\tdev_uas\tdev_las\tlr\tseconds\n";
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream s;
    s << std::fixed << std::setprecision(6) << *v;
    return s.str();
  };
  for (const auto& e : log) {
    os << e.epoch << '\t' << std::setprecision(9) << e.train_loss << '\t' << opt(e.dev_uas) << '\t' << opt(e.dev_las)
       << '\t' << e.learning_rate << '\t' << std::fixed << std::setprecision(3) << e.seconds << '\n'
       << std::defaultfloat;
  }
  return os.str();
}

Trainer::Trainer(Model<float>& model, TrainConfig config, std::span<const Sentence> train,
                 std::span<const ad::Matrix<float>> train_ext)
    : model_(model), config_(config), ext_(train_ext), adam_(model.params(), config.adam()) {
  config_.validate();
  if (train.empty()) throw DataError("training set is empty");
  if (!ext_.empty() && ext_.size() != train.size())
    throw DataError("external embeddings do not cover every training sentence");
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto v = validate_tree(train[i]);
    const std::string name = train[i].id ? *train[i].id : "#" + std::to_string(i + 1);
    if (!v.ok()) throw DataError("training sentence " + name + ": " + v.message());
    encoded_.push_back(encode_sentence(model.vocab(), train[i], model.config().max_word_chars));
    names_.push_back(name);
  }
}

std::vector<std::vector<std::size_t>> Trainer::batches(int epoch) const {
  std::mt19937_64 rng(splitmix64(config_.seed ^ splitmix64(static_cast<std::uint64_t>(epoch))));
  std::vector<std::size_t> order(encoded_.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  // Sort shuffled pools of several batches by length, then cut into batches.
  const std::size_t bs = static_cast<std::size_t>(config_.batch_size);
  const std::size_t pool = bs * 8;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < order.size(); start += pool) {
    const auto end = std::min(order.size(), start + pool);
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return encoded_[a].size() < encoded_[b].size(); });
    for (std::size_t b = start; b < end; b += bs)
      out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(b),
                       order.begin() + static_cast<std::ptrdiff_t>(std::min(end, b + bs)));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

double Trainer::train_batch(std::span<const std::size_t> batch, int epoch) {
  const auto& params = model_.params();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config_.threads), batch.size());
  std::vector<ad::Gradients<float>> grads(workers, ad::Gradients<float>(params));
  std::vector<double> losses(workers, 0.0);
  std::vector<std::exception_ptr> errors(workers);

  // Worker w handles a contiguous chunk; chunks are reduced in index order so
  // the result depends only on the batch and the thread count.
  auto work = [&](std::size_t w) {
    const std::size_t lo = batch.size() * w / workers, hi = batch.size() * (w + 1) / workers;
    try {
      for (std::size_t k = lo; k < hi; ++k) {
        const std::size_t i = batch[k];
        std::mt19937_64 rng(splitmix64(config_.seed ^ splitmix64((static_cast<std::uint64_t>(epoch) << 32) + i)));
        RunContext ctx{true, &rng, config_.legality};
        ad::Graph<float> g(params);
        try {
          const auto loss = model_.sentence_loss(g, encoded_[i], ext_.empty() ? nullptr : &ext_[i], ctx);
          losses[w] += static_cast<double>(g.scalar(loss));
          g.backward(loss, grads[w]);
        } catch (const NumericError& e) {
          throw NumericError("epoch " + std::to_string(epoch) + ", sentence " + names_[i] + ": " + e.what());
        }
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

  for (std::size_t w = 1; w < workers; ++w) grads[0].add(grads[w]);
  grads[0].scale(1.0f / static_cast<float>(batch.size()));
  const double total = std::accumulate(losses.begin(), losses.end(), 0.0);
  if (!std::isfinite(total)) throw NumericError("non-finite loss in epoch " + std::to_string(epoch));
  adam_.step(model_.params(), grads[0]);
  return total;
}

double Trainer::run_epoch(int epoch) {
  double total = 0.0;
  for (const auto& b : batches(epoch)) total += train_batch(b, epoch);
  return total / static_cast<double>(encoded_.size());
}

bool PlateauSchedule::observe(double score, ad::Adam<float>& opt) {
  if (!best_ || score > *best_) {
    best_ = score;
    stale_ = 0;
    return true;
  }
  if (++stale_ >= patience_) {
    opt.set_learning_rate(opt.learning_rate() * decay_);
    ++decays_;
    stale_ = 0;
  }
  return false;
}

TrainResult train(Model<float> model, const TrainConfig& config, std::span<const Sentence> train_set,
                  std::span<const Sentence> dev_set, std::span<const ad::Matrix<float>> train_ext,
                  std::span<const ad::Matrix<float>> dev_ext, const std::function<void(const EpochLog&)>& on_epoch) {
  Trainer trainer(model, config, train_set, train_ext);
  PlateauSchedule schedule(config.decay_rate, config.patience);
  TrainResult result{model, {}, 0, std::nullopt};
  const DecodeOptions decode{1, config.legality};
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    EpochLog row;
    row.epoch = epoch;
    row.learning_rate = trainer.optimizer().learning_rate();
    row.train_loss = trainer.run_epoch(epoch);
    bool improved = dev_set.empty();
    if (!dev_set.empty()) {
      const auto pred = parse_treebank(model, dev_set, dev_ext, decode, config.threads);
      const auto report = evaluate(dev_set, pred, config.dev_punct);
      row.dev_uas = report.uas;
      row.dev_las = report.las;
      improved = schedule.observe(report.las, trainer.optimizer());
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (improved) {
      result.best = model;
      result.best_epoch = epoch;
      result.best_dev_las = row.dev_las;
    }
    result.log.push_back(row);
    if (on_epoch) on_epoch(row);
    if (trainer.optimizer().learning_rate() < config.min_learning_rate) break;
  }
  return result;
}

RunAggregate aggregate_runs(std::span<const double> scores, bool sample_stddev) {
  if (scores.size() < 2) throw DataError("standard deviation needs at least 2 runs");
  RunAggregate a;
  a.runs = scores.size();
  a.mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
  double ss = 0.0;
  for (double s : scores) ss += (s - a.mean) * (s - a.mean);
  a.stddev = std::sqrt(ss / static_cast<double>(sample_stddev ? scores.size() - 1 : scores.size()));
  return a;
}

std::string format_stddev(double sd, int decimals) {
  std::ostringstream os;
  os << "±" << std::fixed << std::setprecision(decimals) << sd;
  return os.str();
}

}  // namespace hptr
