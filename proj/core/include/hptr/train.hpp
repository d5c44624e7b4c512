#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hptr/eval.hpp"
#include "hptr/infer.hpp"
#include "hptr/model.hpp"
#include "hptr/optimizer.hpp"

namespace hptr {

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 0.001;
  double decay_rate = 0.75;
  double clip_norm = 5.0;
  double beta1 = 0.9;
  double beta2 = 0.9;
  double epsilon = 1e-8;
  int max_epochs = 400;
  int patience = 5;  // epochs without dev-LAS improvement before decaying lr
  double min_learning_rate = 1e-6;
  std::uint64_t seed = 1;
  bool deterministic = true;
  int threads = 1;
  PunctPolicy dev_punct = PunctPolicy::kNone;
  LegalityOptions legality;  // applied to teacher forcing and dev decoding

  void validate() const;
  ad::AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon, clip_norm}; }
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;  // mean per-sentence loss
  std::optional<double> dev_uas, dev_las;
  double learning_rate = 0.0;
  double seconds = 0.0;
};

std::string epoch_log_tsv(std::span<const EpochLog> log);

// 64-bit mix used to derive independent per-sentence random streams.
std::uint64_t splitmix64(std::uint64_t x);

// Training state over one model. Sentences with invalid gold trees are rejected up front.
class Trainer {
 public:
  Trainer(Model<float>& model, TrainConfig config, std::span<const Sentence> train,
          std::span<const ad::Matrix<float>> train_ext = {});

  // Seeded, length-grouped batches for `epoch` (indices into the training set).
  std::vector<std::vector<std::size_t>> batches(int epoch) const;
  // Forward/backward over one batch and an optimizer step. Returns summed loss.
  double train_batch(std::span<const std::size_t> batch, int epoch);
  // One pass over the training data. Returns the mean per-sentence loss.
  double run_epoch(int epoch);

  ad::Adam<float>& optimizer() { return adam_; }
  const TrainConfig& config() const { return config_; }
  std::size_t size() const { return encoded_.size(); }

 private:
  Model<float>& model_;
  TrainConfig config_;
  std::vector<EncodedSentence> encoded_;
  std::vector<std::string> names_;
  std::span<const ad::Matrix<float>> ext_;
  ad::Adam<float> adam_;
};

// Learning-rate schedule: multiply by `decay_rate` after `patience` epochs
// without a new best dev score.
class PlateauSchedule {
 public:
  PlateauSchedule(double decay_rate, int patience) : decay_(decay_rate), patience_(patience) {}
  // Returns true when `score` is a new best.
  bool observe(double score, ad::Adam<float>& opt);
  int decays() const { return decays_; }

 private:
  double decay_;
  int patience_;
  std::optional<double> best_;
  int stale_ = 0;
  int decays_ = 0;
};

struct TrainResult {
  Model<float> best;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  std::optional<double> best_dev_las;
};

// Full loop: epochs until max_epochs or lr < min_learning_rate, dev-LAS model
// selection (the last epoch is kept when `dev` is empty). `on_epoch` sees each
// log row as it is produced.
TrainResult train(Model<float> model, const TrainConfig& config, std::span<const Sentence> train_set,
                  std::span<const Sentence> dev_set, std::span<const ad::Matrix<float>> train_ext = {},
                  std::span<const ad::Matrix<float>> dev_ext = {},
                  const std::function<void(const EpochLog&)>& on_epoch = {});

struct RunAggregate {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t runs = 0;
};

// Mean and standard deviation over runs (population by default). Needs >= 2 runs.
RunAggregate aggregate_runs(std::span<const double> scores, bool sample_stddev = false);
// "±0.03"
std::string format_stddev(double sd, int decimals = 2);

}  // namespace hptr
