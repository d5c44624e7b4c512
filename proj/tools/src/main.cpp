#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "hptr/checkpoint.hpp"
#include "hptr/embeddings.hpp"
#include "hptr/error.hpp"
#include "hptr/eval.hpp"
#include "hptr/gradcheck.hpp"
#include "hptr/infer.hpp"
#include "hptr/train.hpp"
#include "hptr/transition.hpp"
#include "hptr/treebank.hpp"
#include "run_config.hpp"

#ifndef HPTR_VERSION
#define HPTR_VERSION "unknown"
#endif

namespace {

using namespace hptr;
using nlohmann::json;

// ---- shared plumbing -------------------------------------------------------

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path, std::ios::binary);
    if (!file) throw DataError("cannot write " + path);
    os = &file;
  }
  std::ostream& operator*() { return *os; }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// Manifest echoed next to every written output: command line, resolved
// settings, seed and library versions. No timestamps, so reruns are identical.
void write_manifest(const std::string& path, const std::string& command, const std::vector<std::string>& args,
                    const json& settings) {
  json m{{"tool", "hptr"},
         {"version", HPTR_VERSION},
         {"command", command},
         {"arguments", args},
         {"settings", settings},
         {"libraries",
          {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                         std::to_string(EIGEN_MINOR_VERSION)},
           {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                 std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
           {"cli11", CLI11_VERSION},
           {"compiler", __VERSION__}}}};
  write_text(path, m.dump(2) + "\n");
}

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

std::vector<ad::Matrix<float>> load_ext(const std::string& path, const Treebank& tb) {
  if (path.empty()) return {};
  const auto emb = read_external_embeddings(path);
  check_alignment(emb, tb);
  std::vector<ad::Matrix<float>> out;
  out.reserve(emb.size());
  for (const auto& e : emb) out.push_back(e.vectors);
  return out;
}

// Options that feed a RunConfig; flags override the config file.
struct ConfigOptions {
  std::string config_file;
  bool tiny = false;
  std::vector<std::string> sets;
  std::string system, fusion, gate;
  std::string seed, threads, beam, max_epochs, batch_size, learning_rate, patience;
  bool projective = false, single_root = false, plain_unk = false, deterministic = false;

  void add_model(CLI::App* app) {
    app->add_flag("--tiny", tiny, "Scale all sizes of 64 or more down to 64");
    app->add_option("--system", system, "Transition system: l2r, r2l, oi");
    app->add_option("--fusion", fusion, "Fusion: sequential, full, simple, l-adapted, l-simple, r-adapted, r-simple");
    app->add_option("--gate", gate, "Gate: gate1, gate2");
    app->add_option("--max-epochs", max_epochs, "Epoch budget");
    app->add_option("--batch-size", batch_size, "Sentences per batch");
    app->add_option("--learning-rate", learning_rate, "Initial learning rate");
    app->add_option("--patience", patience, "Epochs without dev improvement before decay");
    app->add_flag("--plain-unk", plain_unk, "Replace singleton words by UNK with a flat probability");
  }
  void add_common(CLI::App* app) {
    app->add_option("--config", config_file, "Flat key = value configuration file");
    app->add_option("--set", sets, "Override a configuration key (key=value); repeatable");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--threads", threads, "Worker threads");
    app->add_flag("--deterministic", deterministic, "Fixed-order gradient reduction (always on; recorded)");
  }
  void add_decode(CLI::App* app) {
    app->add_option("--beam", beam, "Beam size (1 = greedy)");
    app->add_flag("--projective", projective, "Restrict decoding to projective trees");
    app->add_flag("--single-root", single_root, "Allow only one dependent of the root");
  }

  cli::RunConfig resolve() const {
    cli::RunConfig rc;
    if (tiny) {
      rc.model = ModelConfig::tiny();
      rc.echo["tiny"] = "true";
    }
    if (!config_file.empty())
      for (const auto& [k, v] : cli::read_config_file(config_file)) rc.set(k, v);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      rc.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    auto opt = [&](const std::string& v, const char* key) {
      if (!v.empty()) rc.set(key, v);
    };
    opt(system, "transition-system");
    opt(fusion, "fusion");
    opt(gate, "gate");
    opt(seed, "seed");
    opt(threads, "threads");
    opt(beam, "beam-size");
    opt(max_epochs, "max-epochs");
    opt(batch_size, "batch-size");
    opt(learning_rate, "initial-learning-rate");
    opt(patience, "patience");
    if (projective) rc.set("projective", "true");
    if (single_root) rc.set("single-root", "true");
    if (plain_unk) rc.set("plain-unk", "true");
    if (deterministic) rc.set("deterministic", "true");
    rc.finalize();
    return rc;
  }
};

json settings_json(const cli::RunConfig& rc) {
  json j;
  j["model"] = rc.model;
  j["train"] = {{"batch_size", rc.train.batch_size},
                {"learning_rate", rc.train.learning_rate},
                {"decay_rate", rc.train.decay_rate},
                {"clip_norm", rc.train.clip_norm},
                {"beta1", rc.train.beta1},
                {"beta2", rc.train.beta2},
                {"epsilon", rc.train.epsilon},
                {"max_epochs", rc.train.max_epochs},
                {"patience", rc.train.patience},
                {"min_learning_rate", rc.train.min_learning_rate},
                {"seed", rc.train.seed},
                {"deterministic", rc.train.deterministic},
                {"threads", rc.train.threads}};
  j["decode"] = {{"beam", rc.decode.beam},
                 {"projective", rc.decode.legality.projective_only},
                 {"single_root", rc.decode.legality.single_root}};
  j["explicit"] = rc.echo;
  return j;
}

std::vector<SystemKind> systems_from(const std::string& s) {
  if (s.empty() || s == "all") return {SystemKind::kL2R, SystemKind::kR2L, SystemKind::kOI};
  return {parse_system_kind(s)};
}

// ---- subcommands -----------------------------------------------------------

int cmd_stats(const std::vector<std::string>& files, bool exclude_root, const std::string& output) {
  Output out(output);
  *out << "treebank\tsentences\ttokens\tarcs\tlong_arcs\tpct_long\tpct_left_of_long\n";
  for (const auto& f : files) {
    const auto tb = read_conllu_file(f);
    const auto st = arc_stats(tb, !exclude_root);
    *out << f << '\t' << st.sentence_count << '\t' << st.token_count << '\t' << st.arc_count << '\t'
         << st.long_arc_count << '\t' << fixed(st.pct_long_arcs) << '\t'
         << (st.pct_left_of_long ? fixed(*st.pct_left_of_long) : "") << '\n';
  }
  return 0;
}

int cmd_availability(const std::string& file, const std::string& system, bool both_sides, const std::string& output) {
  const auto tb = read_conllu_file(file);
  Output out(output);
  *out << "system\tsentences\tall_per_sentence\tlong_per_sentence\n";
  for (auto k : systems_from(system)) {
    const auto st = availability_stats(k, tb, both_sides);
    *out << to_string(k) << '\t' << tb.size() << '\t' << fixed(st.all_per_sentence, 4) << '\t'
         << fixed(st.long_per_sentence, 4) << '\n';
  }
  return 0;
}

int cmd_oracle(const std::string& file, const std::string& system, const std::string& output) {
  const auto tb = read_conllu_file(file);
  const auto kind = parse_system_kind(system);
  Output out(output);
  *out << "sentence\tactions\n";
  for (std::size_t i = 0; i < tb.size(); ++i) {
    const auto seq = oracle_sequence(kind, tree_of(tb[i]).heads);
    *out << (tb[i].id ? *tb[i].id : std::to_string(i + 1)) << '\t';
    for (std::size_t t = 0; t < seq.size(); ++t) *out << (t ? " " : "") << seq[t];
    *out << '\n';
  }
  return 0;
}

struct TrainArgs {
  std::string train, dev, out_dir, train_ext, dev_ext;
};

int cmd_train(const TrainArgs& a, const ConfigOptions& co, const std::vector<std::string>& argv) {
  auto rc = co.resolve();
  const auto train_tb = read_conllu_file(a.train);
  const Treebank dev_tb = a.dev.empty() ? Treebank{} : read_conllu_file(a.dev);
  const auto train_ext = load_ext(a.train_ext, train_tb);
  const auto dev_ext = load_ext(a.dev_ext, dev_tb);
  if (!train_ext.empty()) {
    const int dim = static_cast<int>(train_ext.front().rows());
    if (rc.echo.count("external-embedding-dimension") && rc.model.ext_dim != dim)
      throw DataError("external embeddings have dimension " + std::to_string(dim) + ", configuration says " +
                      std::to_string(rc.model.ext_dim));
    rc.model.ext_dim = dim;
  }
  if (rc.model.ext_dim > 0 && train_ext.empty()) throw UsageError("external-embedding-dimension set but no --train-ext");
  if (rc.model.ext_dim > 0 && !dev_tb.empty() && dev_ext.empty()) throw UsageError("--dev-ext is required with external embeddings");

  std::filesystem::create_directories(a.out_dir);
  const auto vocab = Vocab::build(train_tb);
  Model<float> model(rc.model, vocab, rc.train.seed);

  std::cout << "epoch\ttrain_loss\tdev_uas\tdev_las\tlr\tseconds\n";
  auto progress = [](const EpochLog& e) {
    const auto row = epoch_log_tsv(std::span<const EpochLog>(&e, 1));
    std::cout << row.substr(row.find('\n') + 1) << std::flush;
  };
  auto result = train(std::move(model), rc.train, train_tb, dev_tb, train_ext, dev_ext, progress);

  const std::string ckpt = (std::filesystem::path(a.out_dir) / "model.ckpt").string();
  json meta{{"best_epoch", result.best_epoch}, {"seed", rc.train.seed}};
  if (result.best_dev_las) meta["dev_las"] = *result.best_dev_las;
  save_checkpoint(ckpt, result.best, meta);
  write_text((std::filesystem::path(a.out_dir) / "train_log.tsv").string(), epoch_log_tsv(result.log));
  auto settings = settings_json(rc);
  settings["inputs"] = {{"train", a.train}, {"dev", a.dev}, {"train_ext", a.train_ext}, {"dev_ext", a.dev_ext}};
  settings["result"] = meta;
  write_manifest((std::filesystem::path(a.out_dir) / "manifest.json").string(), "train", argv, settings);
  return 0;
}

struct ParseArgs {
  std::string model, input, output, ext;
};

int cmd_parse(const ParseArgs& a, const ConfigOptions& co, const std::vector<std::string>& argv) {
  const auto rc = co.resolve();
  json meta;
  const auto model = load_checkpoint(a.model, &meta);
  const auto tb = read_conllu_file(a.input);
  const auto ext = load_ext(a.ext, tb);
  if (model.config().ext_dim > 0 && ext.empty()) throw UsageError("this model needs --ext embeddings");
  const auto parsed = parse_treebank(model, tb, ext, rc.decode, rc.train.threads);
  const auto text = write_conllu(parsed);
  if (a.output.empty() || a.output == "-") {
    std::cout << text;
  } else {
    write_text(a.output, text);
    auto settings = settings_json(rc);
    settings.erase("train");
    settings["model"] = model.config();
    settings["inputs"] = {{"model", a.model}, {"input", a.input}, {"ext", a.ext}};
    write_manifest(manifest_path_for(a.output), "parse", argv, settings);
  }
  return 0;
}

struct EvalArgs {
  std::string gold, output, json_out, plot_out, punct = "none", bins;
};

int cmd_eval(const EvalArgs& a, const std::string& pred_file, const std::vector<std::string>& argv) {
  const auto gold = read_conllu_file(a.gold);
  const auto pred = read_conllu_file(pred_file);
  const BinSpec bins = a.bins.empty() ? BinSpec{} : BinSpec::parse(a.bins);
  const auto report = evaluate(gold, pred, parse_punct_policy(a.punct), bins);
  Output out(a.output);
  *out << report_tsv(report);
  if (!a.json_out.empty()) write_text(a.json_out, json(report).dump(2) + "\n");
  if (!a.plot_out.empty()) write_text(a.plot_out, plot_data_tsv(report));
  const json settings{{"gold", a.gold}, {"pred", pred_file}, {"punct", a.punct}, {"bins", a.bins}};
  for (const auto& f : {a.output, a.json_out, a.plot_out})
    if (!f.empty() && f != "-") write_manifest(manifest_path_for(f), "eval", argv, settings);
  return 0;
}

struct AnalyzeArgs {
  EvalArgs eval;
  std::vector<std::string> preds;
  long budget = 0;
  std::uint64_t seed = 1;
  bool sample_stddev = false;
};

int cmd_analyze(const AnalyzeArgs& a, const std::vector<std::string>& argv) {
  const auto gold_all = read_conllu_file(a.eval.gold);
  std::vector<std::size_t> picked;
  if (a.budget > 0) {
    picked = sample_sentence_indices(gold_all, a.budget, a.seed);
  } else {
    picked.resize(gold_all.size());
    for (std::size_t i = 0; i < picked.size(); ++i) picked[i] = i;
  }
  auto subset = [&](const Treebank& tb) {
    if (tb.size() != gold_all.size())
      throw DataError("prediction has " + std::to_string(tb.size()) + " sentences, gold has " +
                      std::to_string(gold_all.size()));
    Treebank out;
    for (std::size_t i : picked) out.push_back(tb[i]);
    return out;
  };
  const auto gold = subset(gold_all);
  const BinSpec bins = a.eval.bins.empty() ? BinSpec{} : BinSpec::parse(a.eval.bins);
  const auto policy = parse_punct_policy(a.eval.punct);

  Output out(a.eval.output);
  std::ostringstream plot;
  plot << "run\t";
  std::vector<double> uas, las;
  *out << "run\tsentences\ttokens\tuas\tlas\n";
  for (std::size_t r = 0; r < a.preds.size(); ++r) {
    const auto report = evaluate(gold, subset(read_conllu_file(a.preds[r])), policy, bins);
    uas.push_back(100.0 * report.uas);
    las.push_back(100.0 * report.las);
    *out << a.preds[r] << '\t' << report.sentences << '\t' << report.scored_tokens << '\t' << fixed(uas.back(), 2)
         << '\t' << fixed(las.back(), 2) << '\n';
    auto rows = plot_data_tsv(report);
    std::istringstream lines(rows);
    std::string line;
    bool header = true;
    while (std::getline(lines, line)) {
      if (header) {
        if (r == 0) plot << line << '\n';
        header = false;
        continue;
      }
      plot << (r + 1) << '\t' << line << '\n';
    }
  }
  if (a.preds.size() >= 2) {
    const auto u = aggregate_runs(uas, a.sample_stddev);
    const auto l = aggregate_runs(las, a.sample_stddev);
    *out << "mean\t\t\t" << fixed(u.mean, 2) << '\t' << fixed(l.mean, 2) << '\n';
    *out << "stddev\t\t\t" << format_stddev(u.stddev) << '\t' << format_stddev(l.stddev) << '\n';
  }
  if (!a.eval.plot_out.empty()) write_text(a.eval.plot_out, plot.str());
  const json settings{{"gold", a.eval.gold}, {"preds", a.preds},   {"punct", a.eval.punct},
                      {"bins", a.eval.bins}, {"budget", a.budget}, {"seed", a.seed},
                      {"sample_stddev", a.sample_stddev}};
  for (const auto& f : {a.eval.output, a.eval.plot_out})
    if (!f.empty() && f != "-") write_manifest(manifest_path_for(f), "analyze", argv, settings);
  return 0;
}

struct GradArgs {
  std::string system = "l2r", fusion, gate = "gate1";
  bool all = false;
  int length = 4;
  std::size_t samples = 200;
  std::uint64_t seed = 7;
  double tolerance = 1e-4;
};

int cmd_gradcheck(const GradArgs& a) {
  struct Combo {
    SystemKind s;
    FusionKind f;
    GateKind g;
  };
  std::vector<Combo> combos;
  if (a.all) {
    for (auto s : {SystemKind::kL2R, SystemKind::kR2L, SystemKind::kOI})
      for (auto f : {FusionKind::kSequential, FusionKind::kFull, FusionKind::kSimple, FusionKind::kLAdapted,
                     FusionKind::kLSimple, FusionKind::kRAdapted, FusionKind::kRSimple})
        for (auto g : {GateKind::kGate1, GateKind::kGate2})
          if (compatible(f, s)) combos.push_back({s, f, g});
  } else {
    const auto s = parse_system_kind(a.system);
    combos.push_back({s, a.fusion.empty() ? default_fusion(s) : parse_fusion_kind(a.fusion), parse_gate_kind(a.gate)});
  }
  bool ok = true;
  std::cout << "system\tfusion\tgate\tlength\tcoordinates\tmax_rel_error\tworst\tstatus\n";
  for (const auto& c : combos) {
    const auto cfg = gradcheck_config(c.s, c.f, c.g);
    cfg.validate();
    const auto r = check_sentence_loss_gradients(cfg, a.length, a.seed, a.samples);
    const bool pass = r.max_rel_error < a.tolerance;
    ok = ok && pass;
    std::cout << to_string(c.s) << '\t' << to_string(c.f) << '\t' << to_string(c.g) << '\t' << a.length << '\t'
              << r.coordinates << '\t' << std::scientific << std::setprecision(3) << r.max_rel_error
              << std::defaultfloat << '\t' << r.worst << '\t' << (pass ? "ok" : "FAIL") << '\n';
  }
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hptr: hierarchical pointer network dependency parser"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("hptr ") + HPTR_VERSION);
  const std::vector<std::string> args(argv + 1, argv + argc);

  std::string output;
  bool exclude_root = false, both_sides = false;

  std::vector<std::string> stats_files;
  auto* stats = app.add_subcommand("stats", "Arc statistics: share of long arcs and of leftward long arcs");
  stats->add_option("files", stats_files, "CoNLL-U files")->required();
  stats->add_flag("--exclude-root-arcs", exclude_root, "Leave arcs from the root out of the counts");
  stats->add_option("--output,-o", output, "Output TSV (default stdout)");

  std::string file, system;
  auto* avail = app.add_subcommand("availability", "Dependents available to the decoder per sentence");
  avail->add_option("file", file, "CoNLL-U file")->required();
  avail->add_option("--system", system, "l2r, r2l, oi or all (default)");
  avail->add_flag("--count-both-sides", both_sides, "Count dependents on both sides for every system");
  avail->add_option("--output,-o", output, "Output TSV (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "Print the oracle action sequence of every sentence");
  oracle->add_option("file", file, "CoNLL-U file")->required();
  oracle->add_option("--system", system, "l2r, r2l or oi")->required();
  oracle->add_option("--output,-o", output, "Output TSV (default stdout)");

  TrainArgs train_args;
  ConfigOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "Train a parser and keep the best checkpoint on dev LAS");
  train_cmd->add_option("--train", train_args.train, "Training CoNLL-U")->required();
  train_cmd->add_option("--dev", train_args.dev, "Development CoNLL-U");
  train_cmd->add_option("--out", train_args.out_dir, "Output directory")->required();
  train_cmd->add_option("--train-ext", train_args.train_ext, "External embeddings for the training set");
  train_cmd->add_option("--dev-ext", train_args.dev_ext, "External embeddings for the development set");
  train_opts.add_common(train_cmd);
  train_opts.add_model(train_cmd);
  train_opts.add_decode(train_cmd);

  ParseArgs parse_args;
  ConfigOptions parse_opts;
  auto* parse_cmd = app.add_subcommand("parse", "Parse a CoNLL-U file with a trained checkpoint");
  parse_cmd->add_option("--model", parse_args.model, "Checkpoint")->required();
  parse_cmd->add_option("--input", parse_args.input, "CoNLL-U input")->required();
  parse_cmd->add_option("--output,-o", parse_args.output, "CoNLL-U output (default stdout)");
  parse_cmd->add_option("--ext", parse_args.ext, "External embeddings for the input");
  parse_opts.add_common(parse_cmd);
  parse_opts.add_decode(parse_cmd);

  EvalArgs eval_args;
  std::string pred_file;
  auto* eval_cmd = app.add_subcommand("eval", "UAS/LAS of a prediction against gold");
  eval_cmd->add_option("--gold", eval_args.gold, "Gold CoNLL-U")->required();
  eval_cmd->add_option("--pred", pred_file, "Predicted CoNLL-U")->required();
  eval_cmd->add_option("--punct", eval_args.punct, "none, upos-punct or ptb-style");
  eval_cmd->add_option("--bins", eval_args.bins, "Upper bin edges, e.g. 10,20,30,40,50");
  eval_cmd->add_option("--json", eval_args.json_out, "Write the full report as JSON");
  eval_cmd->add_option("--emit-plot-data", eval_args.plot_out, "Write per-bin series as TSV");
  eval_cmd->add_option("--output,-o", eval_args.output, "Output TSV (default stdout)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Accuracy by sentence length and word position over runs");
  analyze->add_option("--gold", an.eval.gold, "Gold CoNLL-U")->required();
  analyze->add_option("--pred", an.preds, "Predicted CoNLL-U, one per run; repeatable")->required();
  analyze->add_option("--punct", an.eval.punct, "none, upos-punct or ptb-style");
  analyze->add_option("--bins", an.eval.bins, "Upper bin edges, e.g. 10,20,30,40,50");
  analyze->add_option("--budget", an.budget, "Sample whole sentences up to this many tokens (0 = all)");
  analyze->add_option("--seed", an.seed, "Sampling seed");
  analyze->add_flag("--sample-stddev", an.sample_stddev, "Sample instead of population standard deviation");
  analyze->add_option("--emit-plot-data", an.eval.plot_out, "Write per-bin series as TSV");
  analyze->add_option("--output,-o", an.eval.output, "Output TSV (default stdout)");

  GradArgs ga;
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the sentence loss");
  grad->add_option("--system", ga.system, "l2r, r2l or oi");
  grad->add_option("--fusion", ga.fusion, "Fusion kind (default: the system's simple variant)");
  grad->add_option("--gate", ga.gate, "gate1 or gate2");
  grad->add_flag("--all", ga.all, "Every compatible system/fusion/gate combination");
  grad->add_option("--length", ga.length, "Sentence length");
  grad->add_option("--samples", ga.samples, "Coordinates to check");
  grad->add_option("--seed", ga.seed, "Seed");
  grad->add_option("--tolerance", ga.tolerance, "Maximum relative error");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    // Table commands: manifest only when the table goes to a file.
    auto table = [&](const char* name, int rc, json settings) {
      if (rc == 0 && !output.empty() && output != "-")
        write_manifest(manifest_path_for(output), name, args, settings);
      return rc;
    };
    if (*stats)
      return table("stats", cmd_stats(stats_files, exclude_root, output), {{"exclude_root_arcs", exclude_root}});
    if (*avail)
      return table("availability", cmd_availability(file, system, both_sides, output),
                   {{"system", system.empty() ? "all" : system}, {"count_both_sides", both_sides}});
    if (*oracle) return table("oracle", cmd_oracle(file, system, output), {{"system", system}});
    if (*train_cmd) return cmd_train(train_args, train_opts, args);
    if (*parse_cmd) return cmd_parse(parse_args, parse_opts, args);
    if (*eval_cmd) return cmd_eval(eval_args, pred_file, args);
    if (*analyze) return cmd_analyze(an, args);
    if (*grad) return cmd_gradcheck(ga);
  } catch (const UsageError& e) {
    std::cerr << "hptr: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "hptr: numeric error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "hptr: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "hptr: malformed data: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "hptr: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hptr: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
