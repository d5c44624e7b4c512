#pragma once

// Hierarchical pointer network: char-CNN/word/POS encoder with a BiLSTM, a
// gated fusion of the decoder states of the focus word's attached dependents,
// an LSTM decoder, a biaffine pointer over parent positions and a biaffine
// labeler.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hptr/autodiff.hpp"
#include "hptr/transition.hpp"
#include "hptr/vocab.hpp"

namespace hptr {

// Which dependent decoder states feed the fusion function. `kSequential` uses
// none and is the plain pointer-network decoder.
enum class FusionKind { kSequential, kFull, kSimple, kLAdapted, kLSimple, kRAdapted, kRSimple };
enum class GateKind { kGate1, kGate2 };
enum class DecoderInit { kZeros, kEncoderFinal };

std::string_view to_string(FusionKind kind);
std::string_view to_string(GateKind kind);
FusionKind parse_fusion_kind(std::string_view s);
GateKind parse_gate_kind(std::string_view s);

struct DependentSlots {
  bool lm = false, rm = false, la = false, ra = false;
};
DependentSlots active_slots(FusionKind kind);
bool compatible(FusionKind fusion, SystemKind system);
// The fusion kind a transition system uses by default (its "simple" variant).
FusionKind default_fusion(SystemKind system);

struct ModelConfig {
  int char_window = 3;
  int char_filters = 50;
  int encoder_layers = 3;
  int encoder_size = 512;  // per direction
  int decoder_layers = 1;
  int decoder_size = 512;
  int word_dim = 100;
  int pos_dim = 100;
  int char_dim = 100;
  int ext_dim = 0;  // external per-token embeddings; 0 = unused
  int mlp_layers = 1;
  int arc_mlp_size = 512;
  int label_mlp_size = 128;
  double lstm_dropout = 0.33;
  double embedding_dropout = 0.33;
  double unk_replacement = 0.5;
  bool plain_unk = false;  // flat rate for singletons instead of rate/(rate+freq)
  int max_word_chars = 64;
  SystemKind system = SystemKind::kL2R;
  FusionKind fusion = FusionKind::kLSimple;
  GateKind gate = GateKind::kGate1;
  DecoderInit decoder_init = DecoderInit::kZeros;

  // All sizes above 64 scaled down to 64.
  static ModelConfig tiny();
  int input_dim() const { return char_filters + word_dim + pos_dim + ext_dim; }
  int encoder_output_dim() const { return 2 * encoder_size; }
  // Throws UsageError on incompatible fusion/transition or unsupported sizes.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

// Per-call switches: dropout and UNK replacement are active only in training.
struct RunContext {
  bool training = false;
  std::mt19937_64* rng = nullptr;  // required when training
  LegalityOptions legality;
};

template <class T>
class Model {
 public:
  using Graph = ad::Graph<T>;
  using Var = ad::Var;
  using Mat = ad::Matrix<T>;

  // Fresh model with seeded initialization.
  Model(ModelConfig config, Vocab vocab, std::uint64_t seed);
  // Model over existing parameters (checkpoint load, precision cast). Throws
  // DataError when a parameter is missing or misshapen.
  Model(ModelConfig config, Vocab vocab, ad::ParameterSet<T> params);

  Model(const Model&) = default;
  Model(Model&&) noexcept = default;
  Model& operator=(const Model&) = default;
  Model& operator=(Model&&) noexcept = default;

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  ad::ParameterSet<T>& params() { return params_; }
  const ad::ParameterSet<T>& params() const { return params_; }

  template <class U>
  Model<U> cast() const {
    return Model<U>(config_, vocab_, params_.template cast<U>());
  }

  struct Encoding {
    int n = 0;
    Var states;       // encoder states h_0..h_n as columns (2*encoder_size x n+1)
    Var arc_dep_t;    // f2(h_j) as rows ((n+1) x arc_mlp)
    Var arc_dep_lin;  // V^T f2(h_j) ((n+1) x 1)
    Var pointer_wt;   // W^T
    Var pointer_ut;   // U^T
    Var label_head;   // label MLP of heads (label_mlp x n+1)
    Var label_dep;    // label MLP of dependents (label_mlp x n+1)
  };

  // Decoder recurrence carried between steps; step_states[t] = s_t.
  struct Carry {
    Var hidden;
    Var cell;
    std::vector<Var> step_states;
  };

  struct DependentStates {
    std::optional<Var> lm, rm, la, ra;
  };

  struct Step {
    Var state;
    Var cell;
    Var scores;  // v_t over positions 0..n
  };

  // `ext` (ext_dim x n) is required iff config().ext_dim > 0.
  Encoding encode(Graph& g, const EncodedSentence& s, const Mat* ext, RunContext& ctx) const;
  Carry initial_carry(Graph& g, const Encoding& enc) const;

  // h''_t: gated fusion of s_{t-1} and the active dependent states. Absent
  // active dependents are replaced by the learned null vector; inactive ones
  // are ignored.
  Var fuse(Graph& g, Var s_prev, const DependentStates& deps) const;
  // One LSTM cell step on concat(h''_t, h_i).
  std::pair<Var, Var> decoder_cell(Graph& g, Var fused, Var focus_state, Var prev_hidden, Var prev_cell) const;
  // Biaffine pointer scores v_t for all positions.
  Var point_scores(Graph& g, const Encoding& enc, Var decoder_state) const;
  // Label logits for arc head -> dep.
  Var label_scores(Graph& g, const Encoding& enc, int head, int dep) const;

  // Full step for the focus of `state`: fusion, decoder cell and pointer scores.
  Step decoder_step(Graph& g, const Encoding& enc, const ParserState& state, const Carry& carry) const;
  static void advance(Carry& carry, const Step& step);

  // Teacher-forced pointer cross-entropy over legal parents plus label
  // cross-entropy, summed over the sentence.
  Var sentence_loss(Graph& g, const EncodedSentence& s, const Mat* ext, RunContext& ctx) const;

  // Mask over 0..n with 1 for legal parents of the focus.
  static std::vector<std::uint8_t> legal_mask(const ParserState& state, const LegalityOptions& opts);

 private:
  struct Lstm {
    ad::ParamId wx, wh, b;
    int hidden = 0;
  };

  void declare_all(std::mt19937_64* rng);
  ad::ParamId declare(const std::string& name, int rows, int cols, std::mt19937_64* rng, double init_scale);
  Lstm declare_lstm(const std::string& prefix, int input, int hidden, std::mt19937_64* rng);

  Var char_representation(Graph& g, const std::vector<int>& chars) const;
  Var run_lstm(Graph& g, const Lstm& lstm, Var inputs, bool reverse) const;
  std::pair<Var, Var> lstm_cell(Graph& g, const Lstm& lstm, Var input_proj, std::optional<Var> h_prev,
                                std::optional<Var> c_prev) const;
  Var maybe_dropout(Graph& g, Var x, double rate, RunContext& ctx) const;

  ModelConfig config_;
  Vocab vocab_;
  ad::ParameterSet<T> params_;
  bool building_ = false;
  int declared_count_ = 0;

  ad::ParamId word_emb_, pos_emb_, char_emb_, cnn_w_, cnn_b_, root_input_;
  std::vector<Lstm> enc_fwd_, enc_bwd_;
  Lstm dec_;
  std::optional<ad::ParamId> dec_init_;
  std::optional<ad::ParamId> gate_p_, gate_lm_, gate_rm_, gate_la_, gate_ra_;
  ad::ParamId gate_b_;
  ad::ParamId fuse_p_;
  std::optional<ad::ParamId> fuse_lm_, fuse_rm_, fuse_la_, fuse_ra_, null_dep_;
  ad::ParamId f1_w_, f1_b_, f2_w_, f2_b_, ptr_w_, ptr_u_, ptr_v_, ptr_b_;
  ad::ParamId lh_w_, lh_b_, ld_w_, ld_b_, lab_w_, lab_lin_, lab_b_;
};

extern template class Model<float>;
extern template class Model<double>;

}  // namespace hptr
