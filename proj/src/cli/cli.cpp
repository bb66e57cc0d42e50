#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "claws/error.hpp"
#include "claws/labeling.hpp"
#include "claws/manifest.hpp"
#include "claws/metrics.hpp"
#include "claws/model_io.hpp"
#include "claws/parallel.hpp"
#include "claws/scores.hpp"
#include "claws/synth.hpp"
#include "claws/trace.hpp"
#include "features_csv.hpp"

namespace claws::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = spdlog::stderr_color_mt("claws");
    l->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::info;
    if (const char* env = std::getenv("CLAWS_LOG")) {
      const std::string v = env;
      if (v == "error") level = spdlog::level::err;
      else if (v == "debug") level = spdlog::level::debug;
      else if (v == "info") level = spdlog::level::info;
    }
    l->set_level(level);
    return l;
  }();
  return log;
}

std::vector<MethodId> parse_methods(const std::string& text) {
  if (text == "all") return {kAllMethods.begin(), kAllMethods.end()};
  std::vector<MethodId> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto m = parse_method(item);
    if (!m) throw UsageError("unknown method \"" + item + "\"");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw UsageError("no methods selected");
  std::sort(out.begin(), out.end());
  return out;
}

MethodId parse_one_method(const std::string& text) {
  auto m = parse_method(text);
  if (!m) throw UsageError("unknown method \"" + text + "\"");
  return *m;
}

Task parse_task_or_throw(const std::string& text) {
  auto t = parse_task(text);
  if (!t) throw UsageError("--task must be 3class or 2class");
  return *t;
}

int class_index(Label label, Task task) {
  return task == Task::ThreeClass ? static_cast<int>(label) : static_cast<int>(to_binary(label));
}

/// Creates the directories an output file will live in.
void prepare_output(const fs::path& path) {
  const fs::path parent = path.parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + parent.string());
}

void write_text(const fs::path& path, const std::string& text) {
  prepare_output(path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
}

void add_score_config(CLI::App* cmd, ScoreConfig& cfg) {
  cmd->add_option("--entropy-k", cfg.entropy_k, "Top-k candidates used by LE/WE")
      ->capture_default_str();
  cmd->add_option("--window-w", cfg.window_w, "Window size for WE")->capture_default_str();
  cmd->add_option("--eigen-eps", cfg.eigen_eps, "Eigenvalue clamp for HS")->capture_default_str();
  cmd->add_option("--attn-eps", cfg.attn_eps, "Log clamp for AS")->capture_default_str();
}

// ---------------------------------------------------------------------------

struct SimulateOpts {
  fs::path out;
  int per_class = 10;
  std::vector<int> counts;
  SynthSpec spec;
  unsigned threads = default_workers();
};

int cmd_simulate(SimulateOpts& o) {
  if (!o.counts.empty()) {
    if (o.counts.size() != 3) throw UsageError("--counts takes three values (H C T)");
    std::copy(o.counts.begin(), o.counts.end(), o.spec.per_class.begin());
  } else {
    o.spec.per_class.fill(o.per_class);
  }
  const DatasetManifest m = generate_dataset(o.spec, o.out, o.threads);
  std::map<std::pair<Label, Split>, int> tally;
  for (const auto& r : m.records) ++tally[{r.label, r.split}];
  std::cout << fmt::format("wrote {} traces to {}\n", m.records.size(), o.out.string());
  for (Label l : kAllLabels)
    std::cout << fmt::format("  {:<13} reference {:>5}  test {:>5}\n", to_string(l),
                             tally[{l, Split::Reference}], tally[{l, Split::Test}]);
  return kOk;
}

// ---------------------------------------------------------------------------

struct ScoreOpts {
  fs::path manifest, out;
  std::string methods = "all";
  std::string split;
  ScoreConfig cfg;
  unsigned threads = default_workers();
};

std::vector<ManifestRecord> selected_records(const DatasetManifest& m, const std::string& split) {
  if (split.empty() || split == "all") return m.records;
  auto s = parse_split(split);
  if (!s) throw UsageError("--split must be reference, test, extended or all");
  return m.select(*s);
}

int cmd_score(const ScoreOpts& o) {
  const std::vector<MethodId> methods = parse_methods(o.methods);
  const DatasetManifest manifest = load_manifest(o.manifest);
  const std::vector<ManifestRecord> records = selected_records(manifest, o.split);

  std::vector<std::vector<ScoreOutcome>> results(records.size());
  std::vector<std::string> failures(records.size());
  parallel_for(records.size(), o.threads, [&](std::size_t i) {
    try {
      results[i] = score_all(load_trace(manifest.resolve(records[i])), o.cfg, methods);
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  const bool any_vector =
      std::find(methods.begin(), methods.end(), MethodId::CLAWS) != methods.end();
  prepare_output(o.out);
  std::ofstream out(o.out, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + o.out.string() + " for writing");
  out << features_header(any_vector) << '\n';
  int failed = 0, rows = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!failures[i].empty()) {
      logger()->error("{}: {}", records[i].trace_path, failures[i]);
      ++failed;
      continue;
    }
    for (const ScoreOutcome& r : results[i]) {
      if (!r.ok()) {
        logger()->error("{} [{}]: {}", records[i].trace_path, to_string(r.method), r.error->what());
        ++failed;
        continue;
      }
      out << features_row({records[i].trace_path, *r.features}, any_vector) << '\n';
      ++rows;
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + o.out.string());

  nlohmann::json sidecar = {
      {"manifest", o.manifest.string()},
      {"methods", [&] {
         std::vector<std::string> names;
         for (MethodId m : methods) names.emplace_back(to_string(m));
         return names;
       }()},
      {"entropy_k", o.cfg.entropy_k},
      {"window_w", o.cfg.window_w},
      {"eigen_eps", o.cfg.eigen_eps},
      {"attn_eps", o.cfg.attn_eps},
      {"traces", records.size()},
      {"rows", rows},
      {"failures", failed},
  };
  write_text(fs::path(o.out.string() + ".config.json"), sidecar.dump(2) + "\n");
  logger()->info("scored {} traces, {} rows, {} failures", records.size(), rows, failed);
  return failed > 0 ? kRuntimeError : kOk;
}

// ---------------------------------------------------------------------------

struct CalibrateOpts {
  fs::path features, manifest, out;
  std::string method = "CLAWS";
  std::string strategy = "prototype";
  std::string task = "3class";
  std::uint64_t seed = 0;
  int seeds = 1;
  bool encoder = false;
  int epochs = -1;
  double lr = -1.0;
  std::vector<int> hidden{8, 8};
  int intervals = kDefaultThresholdIntervals;
};

struct Design {
  std::vector<std::string> paths;
  Eigen::MatrixXd x;
  std::vector<int> y;
};

Design gather(const FeatureTable& table, const std::vector<ManifestRecord>& records,
              MethodId method, Task task) {
  Design d;
  d.x.resize(static_cast<Eigen::Index>(records.size()), feature_dim(method));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Eigen::VectorXd* v = table.find(records[i].trace_path, method);
    if (!v)
      throw Error(ErrorCode::MissingTrace,
                  fmt::format("no {} features for {}", to_string(method), records[i].trace_path));
    d.x.row(static_cast<Eigen::Index>(i)) = v->transpose();
    d.y.push_back(class_index(records[i].label, task));
    d.paths.push_back(records[i].trace_path);
  }
  return d;
}

int cmd_calibrate(const CalibrateOpts& o) {
  const MethodId method = parse_one_method(o.method);
  const Task task = parse_task_or_throw(o.task);
  const auto strategy = parse_strategy(o.strategy);
  if (!strategy) throw UsageError("--strategy must be threshold, prototype or mlp");
  if (*strategy == Strategy::Threshold && method == MethodId::CLAWS)
    throw UsageError("the threshold strategy needs a scalar method");
  if (o.seeds < 1) throw UsageError("--seeds must be >= 1");

  const FeatureTable table = FeatureTable::load(o.features);
  const DatasetManifest manifest = load_manifest(o.manifest);
  const Design d = gather(table, manifest.select(Split::Reference), method, task);
  const int C = num_classes(task);

  Detector det{task, method, ThresholdModel{}};
  switch (*strategy) {
    case Strategy::Threshold: {
      ThresholdModel m = fit_threshold(d.x.col(0), d.y, C, o.intervals);
      m.method = method;
      det.model = std::move(m);
      break;
    }
    case Strategy::Prototype: {
      PrototypeConfig cfg;
      cfg.use_encoder = o.encoder;
      for (int s = 0; s < o.seeds; ++s) cfg.seeds.push_back(o.seed + s);
      if (o.epochs > 0) cfg.epochs = o.epochs;
      if (o.lr > 0) cfg.lr = o.lr;
      det.model = fit_prototype(d.x, d.y, C, cfg);
      break;
    }
    case Strategy::Mlp: {
      std::optional<MlpModel> best;
      for (int s = 0; s < o.seeds; ++s) {
        MlpConfig cfg;
        cfg.hidden = {o.hidden[0], o.hidden[1]};
        cfg.seed = o.seed + s;
        if (o.epochs > 0) cfg.epochs = o.epochs;
        if (o.lr > 0) cfg.lr = o.lr;
        MlpModel m = fit_mlp(d.x, d.y, C, cfg);
        if (!best || m.train_macro_f1 > best->train_macro_f1) best = std::move(m);
      }
      det.model = std::move(*best);
      break;
    }
  }
  prepare_output(o.out);
  save_detector(o.out, det);
  const double f1 = std::visit([](const auto& m) { return m.train_macro_f1; }, det.model);
  std::cout << fmt::format("calibrated {} on {} ({}) with {} reference samples; train macro F1 {:.4f}\n",
                           to_string(*strategy), to_string(method), to_string(task), d.y.size(), f1);
  return kOk;
}

// ---------------------------------------------------------------------------

struct ClassifyOpts {
  fs::path model, features, manifest, out;
  std::string split = "test";
};

int cmd_classify(const ClassifyOpts& o) {
  const Detector det = load_detector(o.model);
  const FeatureTable table = FeatureTable::load(o.features);
  const DatasetManifest manifest = load_manifest(o.manifest);
  const std::vector<ManifestRecord> records = selected_records(manifest, o.split);

  std::vector<PredictionRow> rows;
  for (const ManifestRecord& r : records) {
    const Eigen::VectorXd* v = table.find(r.trace_path, det.method);
    if (!v)
      throw Error(ErrorCode::MissingTrace,
                  fmt::format("no {} features for {}", to_string(det.method), r.trace_path));
    const Prediction p = predict(det, *v);
    rows.push_back({r.trace_path, p.label, p.surrogate, p.class_scores});
  }
  prepare_output(o.out);
  save_predictions(o.out, det.task, rows);
  std::cout << fmt::format("classified {} samples with {} / {}\n", rows.size(),
                           to_string(det.strategy()), to_string(det.method));
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateOpts {
  fs::path predictions, manifest, out;
  std::string task;
};

int cmd_evaluate(const EvaluateOpts& o) {
  auto [pred_task, rows] = load_predictions(o.predictions);
  const DatasetManifest manifest = load_manifest(o.manifest);
  const Task task = o.task.empty() ? pred_task : parse_task_or_throw(o.task);
  if (task == Task::ThreeClass && pred_task == Task::TwoClass)
    throw UsageError("cannot evaluate 2-class predictions as 3-class");

  std::map<std::string, Label> truth;
  for (const ManifestRecord& r : manifest.records) truth[r.trace_path] = r.label;

  std::vector<int> preds, labels;
  Eigen::MatrixXd scores(static_cast<Eigen::Index>(rows.size()), num_classes(task));
  bool surrogate = false;
  std::size_t matched = 0;
  for (const PredictionRow& r : rows) {
    auto it = truth.find(r.trace_path);
    if (it == truth.end()) continue;
    const auto i = static_cast<Eigen::Index>(matched++);
    labels.push_back(class_index(it->second, task));
    if (task == pred_task) {
      preds.push_back(r.label);
      scores.row(i) = r.class_scores.transpose();
    } else {
      // 3-class predictions projected onto hallucinated vs. not.
      preds.push_back(r.label == 0 ? 0 : 1);
      scores(i, 0) = r.class_scores(0);
      scores(i, 1) = std::max(r.class_scores(1), r.class_scores(2));
    }
    surrogate = surrogate || r.surrogate;
  }
  if (matched != rows.size())
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} predictions but only {} have labels in the manifest", rows.size(),
                            matched));
  const EvaluationReport report = evaluate(preds, labels, task, scores, surrogate);
  std::cout << render_table(report);
  if (!o.out.empty()) write_text(o.out, report_to_json(report) + "\n");
  return kOk;
}

// ---------------------------------------------------------------------------

struct BalanceOpts {
  fs::path manifest, out;
  std::uint64_t seed = 0;
  std::string split;
};

int cmd_balance(const BalanceOpts& o) {
  const DatasetManifest manifest = load_manifest(o.manifest);
  std::optional<Split> split;
  if (!o.split.empty()) {
    split = parse_split(o.split);
    if (!split) throw UsageError("--split must be reference, test or extended");
  }
  DatasetManifest balanced = balance_dataset(manifest, o.seed, split);

  std::error_code ec;
  const fs::path out_dir = fs::absolute(o.out).parent_path();
  if (!fs::equivalent(out_dir, fs::absolute(manifest.base_dir.empty() ? "." : manifest.base_dir), ec))
    for (ManifestRecord& r : balanced.records) r.trace_path = fs::absolute(manifest.resolve(r)).string();
  prepare_output(o.out);
  save_manifest(o.out, balanced);

  std::map<Label, int> tally;
  for (const auto& r : balanced.records) ++tally[r.label];
  std::cout << fmt::format("balanced {} -> {} records (hallucinated {}, creative {}, typical {})\n",
                           manifest.records.size(), balanced.records.size(),
                           tally[Label::Hallucinated], tally[Label::Creative], tally[Label::Typical]);
  return kOk;
}

// ---------------------------------------------------------------------------

struct BenchOpts {
  fs::path manifest, out;
  std::string methods = "all";
  ScoreConfig cfg;
  int warmup = 3;
  int repeats = 11;
};

int cmd_bench(const BenchOpts& o) {
  if (o.repeats < 1 || o.warmup < 0) throw UsageError("--repeats must be >= 1, --warmup >= 0");
  const std::vector<MethodId> methods = parse_methods(o.methods);
  const DatasetManifest manifest = load_manifest(o.manifest);
  if (manifest.records.empty()) throw Error(ErrorCode::Empty, "manifest has no records");
  std::vector<GenerationTrace> traces;
  for (const auto& r : manifest.records) traces.push_back(load_trace(manifest.resolve(r)));

  volatile double sink = 0.0;
  std::string table = fmt::format("{:<6} {:>7} {:>20} {:>18}\n", "method", "traces",
                                  "median_ns_per_trace", "median_ns_total");
  std::string csv = "method,traces,median_ns_per_trace,median_ns_total\n";
  for (MethodId m : methods) {
    auto pass = [&] {
      double acc = 0.0;
      for (const GenerationTrace& t : traces) acc += score(t, m, o.cfg).values(0);
      sink = sink + acc;
    };
    for (int i = 0; i < o.warmup; ++i) pass();
    std::vector<double> ns;
    for (int i = 0; i < o.repeats; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      pass();
      const auto t1 = std::chrono::steady_clock::now();
      ns.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
    std::nth_element(ns.begin(), ns.begin() + ns.size() / 2, ns.end());
    const double median = ns[ns.size() / 2];
    const double per_trace = median / static_cast<double>(traces.size());
    table += fmt::format("{:<6} {:>7} {:>20.0f} {:>18.0f}\n", to_string(m), traces.size(),
                         per_trace, median);
    csv += fmt::format("{},{},{:.0f},{:.0f}\n", to_string(m), traces.size(), per_trace, median);
  }
  std::cout << table;
  if (!o.out.empty()) write_text(o.out, csv);
  return kOk;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::vector<fs::path>& paths) {
  int bad = 0;
  for (const fs::path& p : paths) {
    try {
      const GenerationTrace t = load_trace(p);
      std::cout << fmt::format("ok   {}  k={} T={} H={} d={} K={} layer={}\n", p.string(),
                               t.prompt_len, t.response_len, t.heads, t.hidden_dim, t.topk,
                               t.layer_index);
    } catch (const Error& e) {
      std::cout << fmt::format("FAIL {}  {}\n", p.string(), e.what());
      ++bad;
    }
  }
  return bad > 0 ? kRuntimeError : kOk;
}

// ---------------------------------------------------------------------------

struct LabelOpts {
  fs::path verdicts, out;
};

int cmd_label(const LabelOpts& o) {
  const std::vector<VerdictRecord> verdicts = load_verdicts(o.verdicts);
  prepare_output(o.out);
  std::ofstream out(o.out, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + o.out.string() + " for writing");
  std::map<Label, int> tally;
  std::vector<int> a, b;
  for (const VerdictRecord& v : verdicts) {
    const Label l = combine_evaluations(v.verdict);
    ++tally[l];
    a.push_back(static_cast<int>(single_evaluator_label(v.verdict.correct_a, v.verdict.creative_a)));
    b.push_back(static_cast<int>(single_evaluator_label(v.verdict.correct_b, v.verdict.creative_b)));
    out << nlohmann::json{{"trace_path", v.trace_path}, {"label", std::string(to_string(l))}}.dump()
        << '\n';
  }
  std::cout << fmt::format("labeled {} generations (hallucinated {}, creative {}, typical {})\n",
                           verdicts.size(), tally[Label::Hallucinated], tally[Label::Creative],
                           tally[Label::Typical]);
  if (!verdicts.empty()) {
    try {
      std::cout << fmt::format("evaluator agreement (Cohen's kappa): {:.4f}\n", cohens_kappa(a, b));
    } catch (const Error& e) {
      std::cout << "evaluator agreement (Cohen's kappa): n/a (" << e.detail() << ")\n";
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"White-box hallucination / creativity detection toolkit", "claws"};
  app.require_subcommand(1);

  SimulateOpts sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic labeled trace dataset");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--per-class", sim.per_class, "Traces per class")->capture_default_str();
  simulate->add_option("--counts", sim.counts, "Per-class counts H C T (overrides --per-class)")
      ->expected(3);
  simulate->add_option("--seed", sim.spec.seed)->capture_default_str();
  simulate->add_option("--separation", sim.spec.separation, "Class separation in [0, 1]")
      ->capture_default_str();
  simulate->add_option("--prompt-len", sim.spec.prompt_len)->capture_default_str();
  simulate->add_option("--response-len", sim.spec.response_len)->capture_default_str();
  simulate->add_option("--heads", sim.spec.heads)->capture_default_str();
  simulate->add_option("--hidden-dim", sim.spec.hidden_dim)->capture_default_str();
  simulate->add_option("--topk", sim.spec.topk)->capture_default_str();
  simulate->add_option("--reference-fraction", sim.spec.reference_fraction)->capture_default_str();
  simulate->add_option("--threads", sim.threads);

  ScoreOpts sc;
  auto* score_cmd = app.add_subcommand("score", "Compute features for every trace of a manifest");
  score_cmd->add_option("--manifest", sc.manifest)->required();
  score_cmd->add_option("--out", sc.out, "Feature CSV")->required();
  score_cmd->add_option("--methods", sc.methods, "all or comma list of PPL,LE,WE,HS,AS,CLAWS")
      ->capture_default_str();
  score_cmd->add_option("--split", sc.split, "Only score this split");
  score_cmd->add_option("--threads", sc.threads);
  add_score_config(score_cmd, sc.cfg);

  CalibrateOpts cal;
  auto* calibrate = app.add_subcommand("calibrate", "Fit a detector on the reference split");
  calibrate->add_option("--features", cal.features)->required();
  calibrate->add_option("--manifest", cal.manifest)->required();
  calibrate->add_option("--out", cal.out, "Model JSON")->required();
  calibrate->add_option("--method", cal.method)->capture_default_str();
  calibrate->add_option("--methods", cal.method, "Alias of --method");
  calibrate->add_option("--strategy", cal.strategy, "threshold | prototype | mlp")
      ->capture_default_str();
  calibrate->add_option("--task", cal.task, "3class | 2class")->capture_default_str();
  calibrate->add_option("--seed", cal.seed)->capture_default_str();
  calibrate->add_option("--seeds", cal.seeds, "Number of consecutive seeds to try")
      ->capture_default_str();
  calibrate->add_flag("--encoder", cal.encoder, "Prototype: train the affine encoder");
  calibrate->add_option("--epochs", cal.epochs);
  calibrate->add_option("--lr", cal.lr);
  calibrate->add_option("--hidden", cal.hidden, "MLP hidden layer widths")
      ->expected(2)
      ->capture_default_str();
  calibrate->add_option("--intervals", cal.intervals, "Threshold grid size")->capture_default_str();

  ClassifyOpts cls;
  auto* classify = app.add_subcommand("classify", "Apply a detector to features");
  classify->add_option("--model", cls.model)->required();
  classify->add_option("--features", cls.features)->required();
  classify->add_option("--manifest", cls.manifest)->required();
  classify->add_option("--out", cls.out, "Predictions CSV")->required();
  classify->add_option("--split", cls.split, "reference | test | extended | all")
      ->capture_default_str();

  EvaluateOpts ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against manifest labels");
  evaluate_cmd->add_option("--predictions", ev.predictions)->required();
  evaluate_cmd->add_option("--manifest", ev.manifest)->required();
  evaluate_cmd->add_option("--task", ev.task, "Defaults to the predictions' task");
  evaluate_cmd->add_option("--out", ev.out, "Report JSON");

  BalanceOpts bal;
  auto* balance = app.add_subcommand("balance", "Downsample a manifest to equal class counts");
  balance->add_option("--manifest", bal.manifest)->required();
  balance->add_option("--out", bal.out)->required();
  balance->add_option("--seed", bal.seed)->capture_default_str();
  balance->add_option("--split", bal.split);

  BenchOpts bn;
  auto* bench = app.add_subcommand("bench", "Time each scoring method over a manifest");
  bench->add_option("--manifest", bn.manifest)->required();
  bench->add_option("--methods", bn.methods)->capture_default_str();
  bench->add_option("--warmup", bn.warmup)->capture_default_str();
  bench->add_option("--repeats", bn.repeats)->capture_default_str();
  bench->add_option("--out", bn.out, "Timing CSV");
  add_score_config(bench, bn.cfg);

  std::vector<fs::path> to_validate;
  auto* validate = app.add_subcommand("validate", "Check trace files against the format");
  validate->add_option("traces", to_validate)->required();

  LabelOpts lab;
  auto* label = app.add_subcommand("label", "Combine evaluator verdicts into labels");
  label->add_option("--verdicts", lab.verdicts)->required();
  label->add_option("--out", lab.out)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (score_cmd->parsed()) return cmd_score(sc);
    if (calibrate->parsed()) return cmd_calibrate(cal);
    if (classify->parsed()) return cmd_classify(cls);
    if (evaluate_cmd->parsed()) return cmd_evaluate(ev);
    if (balance->parsed()) return cmd_balance(bal);
    if (bench->parsed()) return cmd_bench(bn);
    if (validate->parsed()) return cmd_validate(to_validate);
    if (label->parsed()) return cmd_label(lab);
  } catch (const UsageError& e) {
    logger()->error("{}", e.what());
    std::cerr << app.help();
    return kUsageError;
  } catch (const Error& e) {
    logger()->error("{}", e.what());
    if (e.code() == ErrorCode::IoError) return kIoError;
    if (e.code() == ErrorCode::InvalidSpec) return kUsageError;
    return kRuntimeError;
  } catch (const std::exception& e) {
    logger()->error("{}", e.what());
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace claws::cli
