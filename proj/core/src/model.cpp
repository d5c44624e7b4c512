#include "hptr/model.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hptr/error.hpp"

namespace hptr {

std::string_view to_string(FusionKind kind) {
  switch (kind) {
    case FusionKind::kSequential: return "sequential";
    case FusionKind::kFull: return "full";
    case FusionKind::kSimple: return "simple";
    case FusionKind::kLAdapted: return "l-adapted";
    case FusionKind::kLSimple: return "l-simple";
    case FusionKind::kRAdapted: return "r-adapted";
    case FusionKind::kRSimple: return "r-simple";
  }
  return "?";
}

std::string_view to_string(GateKind kind) { return kind == GateKind::kGate1 ? "gate1" : "gate2"; }

FusionKind parse_fusion_kind(std::string_view s) {
  for (auto k : {FusionKind::kSequential, FusionKind::kFull, FusionKind::kSimple, FusionKind::kLAdapted,
                 FusionKind::kLSimple, FusionKind::kRAdapted, FusionKind::kRSimple})
    if (s == to_string(k)) return k;
  throw UsageError("unknown fusion kind '" + std::string(s) + "'");
}

GateKind parse_gate_kind(std::string_view s) {
  if (s == "gate1" || s == "Gate1" || s == "1") return GateKind::kGate1;
  if (s == "gate2" || s == "Gate2" || s == "2") return GateKind::kGate2;
  throw UsageError("unknown gate kind '" + std::string(s) + "'");
}

DependentSlots active_slots(FusionKind kind) {
  switch (kind) {
    case FusionKind::kSequential: return {};
    case FusionKind::kFull: return {true, true, true, true};
    case FusionKind::kSimple: return {true, true, false, false};
    case FusionKind::kLAdapted: return {true, false, true, false};
    case FusionKind::kLSimple: return {true, false, false, false};
    case FusionKind::kRAdapted: return {false, true, false, true};
    case FusionKind::kRSimple: return {false, true, false, false};
  }
  return {};
}

bool compatible(FusionKind fusion, SystemKind system) {
  switch (fusion) {
    case FusionKind::kSequential: return true;
    case FusionKind::kLAdapted:
    case FusionKind::kLSimple: return system == SystemKind::kL2R;
    case FusionKind::kRAdapted:
    case FusionKind::kRSimple: return system == SystemKind::kR2L;
    case FusionKind::kFull:
    case FusionKind::kSimple: return system == SystemKind::kOI;
  }
  return false;
}

FusionKind default_fusion(SystemKind system) {
  switch (system) {
    case SystemKind::kL2R: return FusionKind::kLSimple;
    case SystemKind::kR2L: return FusionKind::kRSimple;
    case SystemKind::kOI: return FusionKind::kSimple;
  }
  return FusionKind::kSequential;
}

ModelConfig ModelConfig::tiny() {
  ModelConfig c;
  c.encoder_size = c.decoder_size = 64;
  c.word_dim = c.pos_dim = c.char_dim = 64;
  c.arc_mlp_size = c.label_mlp_size = 64;
  return c;
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw UsageError(std::string(name) + " must be >= 1");
  };
  positive(char_window, "cnn-window-size");
  positive(char_filters, "cnn-number-of-filters");
  positive(encoder_layers, "bilstm-encoder-layers");
  positive(encoder_size, "bilstm-encoder-size");
  positive(decoder_size, "lstm-decoder-size");
  positive(word_dim, "word embedding dimension");
  positive(pos_dim, "pos embedding dimension");
  positive(char_dim, "char embedding dimension");
  positive(arc_mlp_size, "arc-mlp-size");
  positive(label_mlp_size, "label-mlp-size");
  positive(max_word_chars, "max word characters");
  if (ext_dim < 0) throw UsageError("external embedding dimension must be >= 0");
  if (decoder_layers != 1) throw UsageError("only a single decoder LSTM layer is supported");
  if (mlp_layers != 1) throw UsageError("only single-layer MLPs are supported");
  for (double r : {lstm_dropout, embedding_dropout})
    if (r < 0.0 || r >= 1.0) throw UsageError("dropout rates must lie in [0, 1)");
  if (unk_replacement < 0.0 || unk_replacement > 1.0) throw UsageError("unk-replacement-probability must lie in [0, 1]");
  if (!compatible(fusion, system))
    throw UsageError("fusion '" + std::string(to_string(fusion)) + "' is incompatible with transition system '" +
                     std::string(to_string(system)) + "'");
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"char_window", c.char_window},
                     {"char_filters", c.char_filters},
                     {"encoder_layers", c.encoder_layers},
                     {"encoder_size", c.encoder_size},
                     {"decoder_layers", c.decoder_layers},
                     {"decoder_size", c.decoder_size},
                     {"word_dim", c.word_dim},
                     {"pos_dim", c.pos_dim},
                     {"char_dim", c.char_dim},
                     {"ext_dim", c.ext_dim},
                     {"mlp_layers", c.mlp_layers},
                     {"arc_mlp_size", c.arc_mlp_size},
                     {"label_mlp_size", c.label_mlp_size},
                     {"lstm_dropout", c.lstm_dropout},
                     {"embedding_dropout", c.embedding_dropout},
                     {"unk_replacement", c.unk_replacement},
                     {"plain_unk", c.plain_unk},
                     {"max_word_chars", c.max_word_chars},
                     {"system", std::string(to_string(c.system))},
                     {"fusion", std::string(to_string(c.fusion))},
                     {"gate", std::string(to_string(c.gate))},
                     {"decoder_init", c.decoder_init == DecoderInit::kZeros ? "zeros" : "encoder-final"}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.char_window = j.at("char_window").get<int>();
  c.char_filters = j.at("char_filters").get<int>();
  c.encoder_layers = j.at("encoder_layers").get<int>();
  c.encoder_size = j.at("encoder_size").get<int>();
  c.decoder_layers = j.at("decoder_layers").get<int>();
  c.decoder_size = j.at("decoder_size").get<int>();
  c.word_dim = j.at("word_dim").get<int>();
  c.pos_dim = j.at("pos_dim").get<int>();
  c.char_dim = j.at("char_dim").get<int>();
  c.ext_dim = j.at("ext_dim").get<int>();
  c.mlp_layers = j.at("mlp_layers").get<int>();
  c.arc_mlp_size = j.at("arc_mlp_size").get<int>();
  c.label_mlp_size = j.at("label_mlp_size").get<int>();
  c.lstm_dropout = j.at("lstm_dropout").get<double>();
  c.embedding_dropout = j.at("embedding_dropout").get<double>();
  c.unk_replacement = j.at("unk_replacement").get<double>();
  c.plain_unk = j.at("plain_unk").get<bool>();
  c.max_word_chars = j.at("max_word_chars").get<int>();
  c.system = parse_system_kind(j.at("system").get<std::string>());
  c.fusion = parse_fusion_kind(j.at("fusion").get<std::string>());
  c.gate = parse_gate_kind(j.at("gate").get<std::string>());
  c.decoder_init = j.at("decoder_init").get<std::string>() == "zeros" ? DecoderInit::kZeros : DecoderInit::kEncoderFinal;
}

namespace {
// init_scale > 0: uniform(-s, s); 0: zeros.
constexpr double kGlorot = -1.0;
}  // namespace

template <class T>
Model<T>::Model(ModelConfig config, Vocab vocab, std::uint64_t seed) : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  std::mt19937_64 rng(seed);
  building_ = true;
  declare_all(&rng);
  building_ = false;
}

template <class T>
Model<T>::Model(ModelConfig config, Vocab vocab, ad::ParameterSet<T> params)
    : config_(config), vocab_(std::move(vocab)), params_(std::move(params)) {
  config_.validate();
  declare_all(nullptr);
  if (params_.size() != static_cast<std::size_t>(declared_count_))
    throw DataError("parameter set has " + std::to_string(params_.size()) + " tensors, model expects " +
                    std::to_string(declared_count_));
}

template <class T>
ad::ParamId Model<T>::declare(const std::string& name, int rows, int cols, std::mt19937_64* rng, double init_scale) {
  ++declared_count_;
  if (!building_) {
    auto id = params_.find(name);
    if (!id) throw DataError("missing parameter '" + name + "'");
    const auto& v = params_[*id].value;
    if (v.rows() != rows || v.cols() != cols)
      throw DataError("parameter '" + name + "' has shape " + std::to_string(v.rows()) + "x" +
                      std::to_string(v.cols()) + ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    return *id;
  }
  Mat m = Mat::Zero(rows, cols);
  double scale = init_scale;
  if (scale == kGlorot) scale = std::sqrt(6.0 / static_cast<double>(rows + cols));
  if (scale > 0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    for (ad::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(u(*rng));
  }
  return params_.add(name, std::move(m));
}

template <class T>
typename Model<T>::Lstm Model<T>::declare_lstm(const std::string& prefix, int input, int hidden, std::mt19937_64* rng) {
  Lstm l;
  l.hidden = hidden;
  l.wx = declare(prefix + ".Wx", 4 * hidden, input, rng, kGlorot);
  l.wh = declare(prefix + ".Wh", 4 * hidden, hidden, rng, kGlorot);
  l.b = declare(prefix + ".b", 4 * hidden, 1, rng, 0.0);
  // forget-gate bias starts at 1
  if (building_) params_[l.b].value.middleRows(hidden, hidden).setOnes();
  return l;
}

template <class T>
void Model<T>::declare_all(std::mt19937_64* rng) {
  declared_count_ = 0;
  const auto& c = config_;
  const int enc_out = c.encoder_output_dim();
  const int dec = c.decoder_size;
  auto emb_scale = [](int dim) { return std::sqrt(3.0 / dim); };

  word_emb_ = declare("embed.word", c.word_dim, vocab_.words.size(), rng, emb_scale(c.word_dim));
  pos_emb_ = declare("embed.pos", c.pos_dim, vocab_.pos.size(), rng, emb_scale(c.pos_dim));
  char_emb_ = declare("embed.char", c.char_dim, vocab_.chars.size(), rng, emb_scale(c.char_dim));
  cnn_w_ = declare("char_cnn.W", c.char_filters, c.char_window * c.char_dim, rng, kGlorot);
  cnn_b_ = declare("char_cnn.b", c.char_filters, 1, rng, 0.0);
  root_input_ = declare("encoder.root", c.input_dim(), 1, rng, emb_scale(c.input_dim()));

  enc_fwd_.clear();
  enc_bwd_.clear();
  for (int layer = 0; layer < c.encoder_layers; ++layer) {
    const int in = layer == 0 ? c.input_dim() : enc_out;
    const std::string p = "encoder.l" + std::to_string(layer);
    enc_fwd_.push_back(declare_lstm(p + ".fwd", in, c.encoder_size, rng));
    enc_bwd_.push_back(declare_lstm(p + ".bwd", in, c.encoder_size, rng));
  }
  dec_ = declare_lstm("decoder", dec + enc_out, dec, rng);
  if (c.decoder_init == DecoderInit::kEncoderFinal) dec_init_ = declare("decoder.init", dec, enc_out, rng, kGlorot);

  const auto slots = active_slots(c.fusion);
  const bool any = slots.lm || slots.rm || slots.la || slots.ra;
  if (c.gate == GateKind::kGate1) gate_p_ = declare("gate.W_gp", dec, dec, rng, kGlorot);
  auto opt = [&](bool on, const std::string& name) -> std::optional<ad::ParamId> {
    if (!on) return std::nullopt;
    return declare(name, dec, dec, rng, kGlorot);
  };
  gate_lm_ = opt(slots.lm, "gate.W_glm");
  gate_rm_ = opt(slots.rm, "gate.W_grm");
  gate_la_ = opt(slots.la, "gate.W_gla");
  gate_ra_ = opt(slots.ra, "gate.W_gra");
  gate_b_ = declare("gate.b_g", dec, 1, rng, 0.0);
  fuse_p_ = declare("fusion.W_p", dec, dec, rng, kGlorot);
  fuse_lm_ = opt(slots.lm, "fusion.W_lm");
  fuse_rm_ = opt(slots.rm, "fusion.W_rm");
  fuse_la_ = opt(slots.la, "fusion.W_la");
  fuse_ra_ = opt(slots.ra, "fusion.W_ra");
  if (any) null_dep_ = declare("fusion.null", dec, 1, rng, 0.0);

  const int arc = c.arc_mlp_size;
  f1_w_ = declare("pointer.f1.W", arc, dec, rng, kGlorot);
  f1_b_ = declare("pointer.f1.b", arc, 1, rng, 0.0);
  f2_w_ = declare("pointer.f2.W", arc, enc_out, rng, kGlorot);
  f2_b_ = declare("pointer.f2.b", arc, 1, rng, 0.0);
  ptr_w_ = declare("pointer.W", arc, arc, rng, kGlorot);
  ptr_u_ = declare("pointer.U", arc, 1, rng, kGlorot);
  ptr_v_ = declare("pointer.V", arc, 1, rng, kGlorot);
  ptr_b_ = declare("pointer.b", 1, 1, rng, 0.0);

  const int lab = c.label_mlp_size;
  const int k = vocab_.labels.size();
  lh_w_ = declare("label.head.W", lab, enc_out, rng, kGlorot);
  lh_b_ = declare("label.head.b", lab, 1, rng, 0.0);
  ld_w_ = declare("label.dep.W", lab, enc_out, rng, kGlorot);
  ld_b_ = declare("label.dep.b", lab, 1, rng, 0.0);
  lab_w_ = declare("label.W", k * lab, lab, rng, kGlorot);
  lab_lin_ = declare("label.lin", k, 2 * lab, rng, kGlorot);
  lab_b_ = declare("label.b", k, 1, rng, 0.0);
}

template <class T>
ad::Var Model<T>::maybe_dropout(Graph& g, Var x, double rate, RunContext& ctx) const {
  if (!ctx.training || rate <= 0.0) return x;
  if (!ctx.rng) throw UsageError("training run without a random generator");
  return g.dropout_mask_apply(x, ad::dropout_mask<T>(g.rows(x), g.cols(x), rate, *ctx.rng));
}

template <class T>
ad::Var Model<T>::char_representation(Graph& g, const std::vector<int>& chars) const {
  const int window = config_.char_window;
  const int pad = window / 2;
  std::vector<int> ids(static_cast<std::size_t>(pad), kPadId);
  ids.insert(ids.end(), chars.begin(), chars.end());
  ids.insert(ids.end(), static_cast<std::size_t>(pad), kPadId);
  while (static_cast<int>(ids.size()) < window) ids.push_back(kPadId);
  Var emb = g.gather_cols(g.param(char_emb_), ids);
  Var conv = g.add_bias(g.matmul(g.param(cnn_w_), g.unfold_cols(emb, window)), g.param(cnn_b_));
  return g.tanh(g.max_over_cols(conv));
}

template <class T>
std::pair<ad::Var, ad::Var> Model<T>::lstm_cell(Graph& g, const Lstm& lstm, Var input_proj, std::optional<Var> h_prev,
                                                std::optional<Var> c_prev) const {
  const int h = lstm.hidden;
  Var gates = h_prev ? g.add(input_proj, g.matmul(g.param(lstm.wh), *h_prev)) : input_proj;
  Var in = g.sigmoid(g.slice_rows(gates, 0, h));
  Var cand = g.tanh(g.slice_rows(gates, 2 * h, h));
  Var out = g.sigmoid(g.slice_rows(gates, 3 * h, h));
  Var cell = g.mul(in, cand);
  if (c_prev) {
    Var forget = g.sigmoid(g.slice_rows(gates, h, h));
    cell = g.add(g.mul(forget, *c_prev), cell);
  }
  Var hidden = g.mul(out, g.tanh(cell));
  return {hidden, cell};
}

template <class T>
ad::Var Model<T>::run_lstm(Graph& g, const Lstm& lstm, Var inputs, bool reverse) const {
  Var proj = g.add_bias(g.matmul(g.param(lstm.wx), inputs), g.param(lstm.b));
  const auto len = g.cols(inputs);
  std::vector<Var> outputs(static_cast<std::size_t>(len));
  std::optional<Var> h, c;
  for (ad::Index k = 0; k < len; ++k) {
    const ad::Index t = reverse ? len - 1 - k : k;
    auto [nh, nc] = lstm_cell(g, lstm, g.col(proj, t), h, c);
    h = nh;
    c = nc;
    outputs[static_cast<std::size_t>(t)] = nh;
  }
  return g.concat_cols(outputs);
}

template <class T>
typename Model<T>::Encoding Model<T>::encode(Graph& g, const EncodedSentence& s, const Mat* ext,
                                             RunContext& ctx) const {
  const int n = s.size();
  if (n < 1) throw DataError("cannot encode an empty sentence");
  if (config_.ext_dim > 0) {
    if (!ext) throw DataError("model expects external embeddings of dimension " + std::to_string(config_.ext_dim));
    if (ext->rows() != config_.ext_dim || ext->cols() != n)
      throw DataError("external embeddings are " + std::to_string(ext->rows()) + "x" + std::to_string(ext->cols()) +
                      ", expected " + std::to_string(config_.ext_dim) + "x" + std::to_string(n));
  }

  std::vector<int> words = s.words;
  if (ctx.training && config_.unk_replacement > 0.0) {
    if (!ctx.rng) throw UsageError("training run without a random generator");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& w : words) {
      if (w == kUnkId || w == kPadId) continue;
      const double freq = vocab_.frequency(w);
      const double p = config_.plain_unk ? (freq <= 1.0 ? config_.unk_replacement : 0.0)
                                         : config_.unk_replacement / (config_.unk_replacement + freq);
      if (u(*ctx.rng) < p) w = kUnkId;
    }
  }

  std::vector<Var> char_cols;
  char_cols.reserve(static_cast<std::size_t>(n));
  for (const auto& chars : s.chars) char_cols.push_back(char_representation(g, chars));
  std::vector<Var> parts{g.concat_cols(char_cols), g.gather_cols(g.param(word_emb_), words),
                         g.gather_cols(g.param(pos_emb_), s.pos)};
  if (config_.ext_dim > 0) parts.push_back(g.constant(*ext));
  Var x = g.concat_rows(parts);
  x = g.concat_cols(std::vector<Var>{g.param(root_input_), x});
  x = maybe_dropout(g, x, config_.embedding_dropout, ctx);

  for (int layer = 0; layer < config_.encoder_layers; ++layer) {
    if (layer > 0) x = maybe_dropout(g, x, config_.lstm_dropout, ctx);
    Var fwd = run_lstm(g, enc_fwd_[static_cast<std::size_t>(layer)], x, false);
    Var bwd = run_lstm(g, enc_bwd_[static_cast<std::size_t>(layer)], x, true);
    x = g.concat_rows({fwd, bwd});
  }
  x = maybe_dropout(g, x, config_.lstm_dropout, ctx);

  Encoding enc;
  enc.n = n;
  enc.states = x;
  Var f2 = g.elu(g.add_bias(g.matmul(g.param(f2_w_), x), g.param(f2_b_)));
  enc.arc_dep_t = g.transpose(f2);
  enc.arc_dep_lin = g.matmul(enc.arc_dep_t, g.param(ptr_v_));
  enc.pointer_wt = g.transpose(g.param(ptr_w_));
  enc.pointer_ut = g.transpose(g.param(ptr_u_));
  enc.label_head = g.elu(g.add_bias(g.matmul(g.param(lh_w_), x), g.param(lh_b_)));
  enc.label_dep = g.elu(g.add_bias(g.matmul(g.param(ld_w_), x), g.param(ld_b_)));
  return enc;
}

template <class T>
typename Model<T>::Carry Model<T>::initial_carry(Graph& g, const Encoding& enc) const {
  Carry c;
  const int d = config_.decoder_size;
  c.cell = g.constant(Mat::Zero(d, 1));
  if (dec_init_)
    c.hidden = g.tanh(g.matmul(g.param(*dec_init_), g.col(enc.states, enc.n)));
  else
    c.hidden = g.constant(Mat::Zero(d, 1));
  return c;
}

template <class T>
ad::Var Model<T>::fuse(Graph& g, Var s_prev, const DependentStates& deps) const {
  const auto slots = active_slots(config_.fusion);
  struct Term {
    std::optional<ad::ParamId> gate, fusion;
    Var state;
  };
  std::vector<Term> terms;
  auto take = [&](bool active, const std::optional<Var>& dep, std::optional<ad::ParamId> gw,
                  std::optional<ad::ParamId> fw) {
    if (!active) return;
    terms.push_back({gw, fw, dep ? *dep : g.param(*null_dep_)});
  };
  take(slots.lm, deps.lm, gate_lm_, fuse_lm_);
  take(slots.rm, deps.rm, gate_rm_, fuse_rm_);
  take(slots.la, deps.la, gate_la_, fuse_la_);
  take(slots.ra, deps.ra, gate_ra_, fuse_ra_);

  Var pre = g.param(gate_b_);
  if (config_.gate == GateKind::kGate1) {
    pre = g.add(pre, g.matmul(g.param(*gate_p_), s_prev));
    for (const auto& t : terms) pre = g.add(pre, g.matmul(g.param(*t.gate), t.state));
  } else {
    for (const auto& t : terms) pre = g.add(pre, g.matmul(g.param(*t.gate), g.mul(s_prev, t.state)));
  }
  Var gate = g.sigmoid(pre);

  Var lin = g.matmul(g.param(fuse_p_), s_prev);
  for (const auto& t : terms) lin = g.add(lin, g.matmul(g.param(*t.fusion), t.state));
  return g.mul(gate, g.tanh(lin));
}

template <class T>
std::pair<ad::Var, ad::Var> Model<T>::decoder_cell(Graph& g, Var fused, Var focus_state, Var prev_hidden,
                                                   Var prev_cell) const {
  Var input = g.concat_rows({fused, focus_state});
  Var proj = g.add(g.matmul(g.param(dec_.wx), input), g.param(dec_.b));
  return lstm_cell(g, dec_, proj, prev_hidden, prev_cell);
}

template <class T>
ad::Var Model<T>::point_scores(Graph& g, const Encoding& enc, Var decoder_state) const {
  Var f1 = g.elu(g.add(g.matmul(g.param(f1_w_), decoder_state), g.param(f1_b_)));
  Var bilinear = g.matmul(enc.arc_dep_t, g.matmul(enc.pointer_wt, f1));
  Var shift = g.add(g.matmul(enc.pointer_ut, f1), g.param(ptr_b_));
  return g.add_scalar(g.add(bilinear, enc.arc_dep_lin), shift);
}

template <class T>
ad::Var Model<T>::label_scores(Graph& g, const Encoding& enc, int head, int dep) const {
  const int lab = config_.label_mlp_size;
  const int k = vocab_.labels.size();
  Var gh = g.col(enc.label_head, head);
  Var gd = g.col(enc.label_dep, dep);
  Var per_label = g.transpose(g.reshape(g.matmul(g.param(lab_w_), gh), lab, k));
  Var bilinear = g.matmul(per_label, gd);
  Var linear = g.matmul(g.param(lab_lin_), g.concat_rows({gh, gd}));
  return g.add(g.add(bilinear, linear), g.param(lab_b_));
}

template <class T>
typename Model<T>::Step Model<T>::decoder_step(Graph& g, const Encoding& enc, const ParserState& state,
                                               const Carry& carry) const {
  const int focus = state.focus();
  const DependentRecord snap = state.dependent_snapshot();
  if (state.kind() == SystemKind::kL2R && (snap.rm || snap.ra))
    throw std::logic_error("right dependents exposed under left-to-right decoding");
  if (state.kind() == SystemKind::kR2L && (snap.lm || snap.la))
    throw std::logic_error("left dependents exposed under right-to-left decoding");
  const auto slots = active_slots(config_.fusion);
  auto lookup = [&](bool active, const std::optional<AttachedDependent>& d) -> std::optional<Var> {
    if (!active || !d) return std::nullopt;
    return carry.step_states.at(static_cast<std::size_t>(d->step));
  };
  DependentStates deps{lookup(slots.lm, snap.lm), lookup(slots.rm, snap.rm), lookup(slots.la, snap.la),
                       lookup(slots.ra, snap.ra)};
  Var fused = fuse(g, carry.hidden, deps);
  auto [s, c] = decoder_cell(g, fused, g.col(enc.states, focus), carry.hidden, carry.cell);
  return {s, c, point_scores(g, enc, s)};
}

template <class T>
void Model<T>::advance(Carry& carry, const Step& step) {
  carry.hidden = step.state;
  carry.cell = step.cell;
  carry.step_states.push_back(step.state);
}

template <class T>
std::vector<std::uint8_t> Model<T>::legal_mask(const ParserState& state, const LegalityOptions& opts) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(state.size()) + 1, 0);
  for (int p : state.legal_parents(opts)) mask[static_cast<std::size_t>(p)] = 1;
  return mask;
}

template <class T>
ad::Var Model<T>::sentence_loss(Graph& g, const EncodedSentence& s, const Mat* ext, RunContext& ctx) const {
  const Encoding enc = encode(g, s, ext, ctx);
  Carry carry = initial_carry(g, enc);
  ParserState state(config_.system, s.size());
  std::vector<Var> losses;
  losses.reserve(2 * static_cast<std::size_t>(s.size()));
  while (!state.done()) {
    const int focus = state.focus();
    const int gold = s.heads[static_cast<std::size_t>(focus - 1)];
    Step step = decoder_step(g, enc, state, carry);
    const auto mask = legal_mask(state, ctx.legality);
    if (gold < 0 || gold > s.size() || !mask[static_cast<std::size_t>(gold)])
      throw DataError("gold parent " + std::to_string(gold) + " of word " + std::to_string(focus) +
                      " is not a legal action");
    losses.push_back(g.masked_nll(step.scores, mask, gold));
    state.apply_attach(gold, ctx.legality);
    advance(carry, step);
  }
  const std::vector<std::uint8_t> all_labels(static_cast<std::size_t>(vocab_.labels.size()), 1);
  for (int d = 1; d <= s.size(); ++d) {
    Var scores = label_scores(g, enc, s.heads[static_cast<std::size_t>(d - 1)], d);
    losses.push_back(g.masked_nll(scores, all_labels, s.labels[static_cast<std::size_t>(d - 1)]));
  }
  return g.sum(g.concat_rows(losses));
}

template class Model<float>;
template class Model<double>;

}  // namespace hptr
