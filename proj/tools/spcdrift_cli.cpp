// spcdrift: OOD scoring, SPC monitoring and drift simulation from the command line.
//
// Exit codes: 0 success, 1 usage error, 2 data error. Diagnostics go to
// stderr; data goes to files (or stdout where an --out is optional).

#include "spcdrift/baseline_io.hpp"
#include "spcdrift/drift_sim.hpp"
#include "spcdrift/error.hpp"
#include "spcdrift/eval.hpp"
#include "spcdrift/io_util.hpp"
#include "spcdrift/metrics.hpp"
#include "spcdrift/spc.hpp"
#include "spcdrift/stat_features.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace spcdrift;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Thrown for option combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RateRange parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("rate range must look like a:b, got '" + text + "'");
  const auto lo = parse_real(std::string_view(text).substr(0, colon));
  const auto hi = parse_real(std::string_view(text).substr(colon + 1));
  if (!lo || !hi) throw UsageError("rate range must look like a:b, got '" + text + "'");
  return {*lo, *hi};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& field : split_csv_line(text)) {
    const auto v = parse_real(field);
    if (!v) throw UsageError("bad number '" + field + "' in list");
    out.push_back(*v);
  }
  return out;
}

// Writes to `path`, or stdout when the path is empty.
void emit(const std::string& path, const std::string& contents) {
  if (path.empty()) {
    std::cout << contents;
  } else {
    write_file(path, contents);
  }
}

struct ChartOptions {
  std::string chart = "cusum";
  std::optional<double> k_rel;
  std::optional<double> k_abs;
  std::optional<double> h_rel;
  std::optional<double> h_abs;
  double multiplier = 3.0;
  bool reset_on_flag = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--chart", chart, "Chart type: threesigma | cusum")
        ->check(CLI::IsMember({"threesigma", "3sigma", "cusum"}))
        ->capture_default_str();
    auto* kr = cmd->add_option("--k-rel", k_rel, "CUSUM allowance k in units of the baseline sigma (default 0.5)");
    auto* ka = cmd->add_option("--k-abs", k_abs, "CUSUM allowance k in metric units");
    auto* hr = cmd->add_option("--h-rel", h_rel, "CUSUM threshold h in units of the baseline sigma (default 4)");
    auto* ha = cmd->add_option("--h-abs", h_abs, "CUSUM threshold h in metric units");
    kr->excludes(ka);
    hr->excludes(ha);
    cmd->add_option("--multiplier", multiplier, "Control-limit multiplier for the 3-sigma chart")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--reset-on-flag", reset_on_flag, "Reset both CUSUM sums after a flag");
  }

  ChartSpec spec() const {
    ChartSpec s;
    s.kind = chart_from_string(chart);
    s.k_rel = k_rel;
    s.k_abs = k_abs;
    s.h_rel = h_rel;
    s.h_abs = h_abs;
    s.multiplier = multiplier;
    s.reset_on_flag = reset_on_flag;
    return s;
  }
};

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string train;
  std::string metric = "cosine";
  double lambda_rel = kDefaultLambdaRel;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  const auto train = load_dataset(a.train);
  const auto baseline = fit_baseline(train, metric_from_string(a.metric), a.lambda_rel);
  save_baseline(a.out, baseline);
  std::cerr << "fitted " << to_string(baseline.metric()) << " baseline on " << baseline.n_samples()
            << " vectors (d=" << baseline.dim() << "): mu=" << format_real(baseline.stats().mu)
            << " sigma=" << format_real(baseline.stats().sigma) << '\n';
  return 0;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string baseline;
  std::string input;
  std::string out;
  std::string flags_out;
  std::string truth_out;
  double multiplier = 3.0;
};

int cmd_score(const ScoreArgs& a) {
  const auto baseline = load_baseline(a.baseline);
  const auto items = load_dataset(a.input);
  const auto values = score_batch(items, baseline, baseline.metric());

  std::ostringstream scores;
  write_scores_csv(scores, items, values);
  emit(a.out, scores.str());

  std::vector<double> raw;
  raw.reserve(values.size());
  for (const auto& v : values) raw.push_back(v.value);
  const ControlLimits limits{baseline.stats().mu, baseline.stats().sigma, a.multiplier};
  const auto flags = three_sigma_flags(raw, limits);

  if (!a.flags_out.empty()) {
    std::vector<std::optional<Side>> side(items.size());
    for (const auto& f : flags) side[f.index] = f.side;
    std::ostringstream out;
    out << "id,value,flag,side\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
      out << items[i].id << ',' << format_real(raw[i]) << ',' << (side[i] ? 1 : 0) << ','
          << (side[i] ? to_string(*side[i]) : "") << '\n';
    }
    write_file(a.flags_out, out.str());
  }
  if (!a.truth_out.empty()) {
    std::ostringstream out;
    out << "id,label\n";
    std::size_t missing = 0;
    for (const auto& v : items) {
      if (v.label) {
        out << v.id << ',' << *v.label << '\n';
      } else {
        ++missing;
      }
    }
    if (missing > 0) std::cerr << "warning: " << missing << " items have no label\n";
    write_file(a.truth_out, out.str());
  }
  std::cerr << "scored " << items.size() << " items, flagged " << flags.size() << " outside ["
            << format_real(limits.lower()) << ", " << format_real(limits.upper()) << "]\n";
  return 0;
}

// ---------------------------------------------------------------- monitor

struct MonitorArgs {
  std::string baseline;
  std::optional<double> mu;
  std::optional<double> sigma;
  std::string input;
  std::string daily;
  std::string out;
  std::string svg;
  bool run_rules = false;
  std::string run_rules_out;
  ChartOptions chart;
};

int cmd_monitor(const MonitorArgs& a) {
  std::optional<BaselineProfile> baseline;
  if (!a.baseline.empty()) baseline = load_baseline(a.baseline);
  MetricStats stats;
  if (baseline) stats = baseline->stats();
  if (a.mu) stats.mu = *a.mu;
  if (a.sigma) stats.sigma = *a.sigma;
  if (!baseline && (!a.mu || !a.sigma)) throw UsageError("give --baseline or both --mu and --sigma");

  std::vector<DayValue> daily;
  if (!a.input.empty()) {
    if (!baseline) throw UsageError("--input needs --baseline to score the vectors");
    const auto items = load_dataset(a.input);
    const auto values = score_batch(items, *baseline, baseline->metric());
    std::vector<DayValue> per_item;
    per_item.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!items[i].day) throw Error(ErrorCode::MalformedRow, "item '" + items[i].id + "' has no day");
      per_item.push_back({*items[i].day, values[i].value});
    }
    daily = daily_average(per_item);
  } else {
    std::ifstream in(a.daily);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + a.daily + "' for reading");
    daily = read_daily_csv(in);
  }

  const auto spec = a.chart.spec();
  const auto trace = trace_chart(daily, stats, spec.kind, spec.resolve(stats));
  std::ostringstream csv;
  write_chart_csv(csv, trace);
  emit(a.out, csv.str());
  if (!a.svg.empty()) write_file(a.svg, render_chart_svg(trace, to_string(trace.kind)));

  if (a.run_rules) {
    const auto extra = run_rule_flags(daily, stats);
    std::ostringstream out;
    out << "day,value,side\n";
    for (const auto& f : extra) out << f.index << ',' << format_real(f.value) << ',' << to_string(f.side) << '\n';
    if (a.run_rules_out.empty()) {
      std::cerr << out.str();
    } else {
      write_file(a.run_rules_out, out.str());
    }
  }
  std::cerr << "monitored " << daily.size() << " days, " << trace.flags.size() << " flags\n";
  return 0;
}

// ---------------------------------------------------------------- simulate / sweep

struct SimulateArgs {
  std::uint32_t days = 60;
  std::uint32_t per_day = 100;
  std::optional<std::uint32_t> shift_day;
  std::string pre = "0:0.01";
  std::string post = "0.03:0.05";
  std::uint64_t seed = 0;
  std::string metric = "cosine";
  ChartOptions chart;
  std::string pools = "synthetic";
  std::size_t dim = 16;
  double separation = 8.0;
  std::optional<double> offset;
  double scale = 1.0;
  std::size_t n_train = 10000;
  std::size_t n_pool = 1000;
  double lambda_rel = kDefaultLambdaRel;
  std::string baseline;
  std::string train;
  std::string in_pool;
  std::string ood_pool;
  std::string out;
  std::string chart_csv;
  std::string baseline_out;
  std::string svg;
  std::string ks = "0.10,0.25,0.50,0.75";

  void add_to(CLI::App* cmd, bool sweep) {
    cmd->add_option("--days", days, "Number of simulated days")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--per-day", per_day, "Items per day")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--shift-day", shift_day, "First day (0-based) of the post-shift OOD rate; default days/2");
    cmd->add_option("--pre", pre, "Pre-shift daily OOD rate range a:b")->capture_default_str();
    cmd->add_option("--post", post, "Post-shift daily OOD rate range a:b")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed for every random draw")->capture_default_str();
    cmd->add_option("--metric", metric, "cosine | mahalanobis")
        ->check(CLI::IsMember({"cosine", "mahalanobis"}))
        ->capture_default_str();
    chart.add_to(cmd);
    cmd->add_option("--pools", pools, "synthetic | files")
        ->check(CLI::IsMember({"synthetic", "files"}))
        ->capture_default_str();
    cmd->add_option("--dim", dim, "Synthetic: feature dimension")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--separation", separation, "Synthetic: |ood_mean - in_mean| / sqrt(scale)")->capture_default_str();
    cmd->add_option("--offset", offset, "Synthetic: |in_mean| (default: equal to --separation)");
    cmd->add_option("--scale", scale, "Synthetic: isotropic variance")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--n-train", n_train, "Synthetic: training vectors for the baseline")->capture_default_str();
    cmd->add_option("--n-pool", n_pool, "Synthetic: vectors in each streaming pool")->capture_default_str();
    cmd->add_option("--lambda-rel", lambda_rel, "Covariance shrinkage relative to trace/d")->capture_default_str();
    cmd->add_option("--baseline", baseline, "Files: fitted baseline.json");
    cmd->add_option("--train", train, "Files: training embeddings to fit the baseline from");
    cmd->add_option("--in-pool", in_pool, "Files: in-distribution streaming pool");
    cmd->add_option("--ood-pool", ood_pool, "Files: OOD streaming pool");
    cmd->add_option("--baseline-out", baseline_out, "Write the baseline used by the run");
    if (sweep) {
      cmd->add_option("--ks", ks, "Comma-separated k values relative to sigma")->capture_default_str();
      cmd->add_option("--out", out, "Sweep CSV (default stdout)");
    } else {
      cmd->add_option("--out", out, "Report JSON (default stdout)");
      cmd->add_option("--chart-csv", chart_csv, "Chart CSV of the daily series");
      cmd->add_option("--svg", svg, "SVG rendering of the chart");
    }
  }

  SimulationConfig config() const {
    SimulationConfig cfg;
    cfg.n_days = days;
    cfg.per_day = per_day;
    cfg.shift_day = shift_day;
    cfg.pre_rate = parse_range(pre);
    cfg.post_rate = parse_range(post);
    cfg.seed = seed;
    cfg.metric = metric_from_string(metric);
    cfg.chart = chart.spec();
    return cfg;
  }

  SyntheticSetup setup() const {
    const auto metric_kind = metric_from_string(metric);
    if (pools == "synthetic") {
      const auto source = SyntheticSourceConfig::along_diagonal(dim, separation, offset.value_or(separation), scale);
      return synthetic_setup(source, n_train, n_pool, seed, metric_kind, lambda_rel);
    }
    if (in_pool.empty() || ood_pool.empty()) throw UsageError("--pools files needs --in-pool and --ood-pool");
    if (baseline.empty() == train.empty()) throw UsageError("--pools files needs exactly one of --baseline, --train");
    auto fitted = baseline.empty() ? fit_baseline(load_dataset(train), metric_kind, lambda_rel)
                                   : load_baseline(baseline);
    return {std::move(fitted), Pools{load_dataset(in_pool), load_dataset(ood_pool)}};
  }
};

int cmd_simulate(const SimulateArgs& a) {
  const auto cfg = a.config();
  cfg.validate();
  const auto setup = a.setup();
  if (!a.baseline_out.empty()) save_baseline(a.baseline_out, setup.baseline);
  const auto report = run_simulation(cfg, setup.baseline, setup.pools);
  emit(a.out, report_to_json(report).dump(2) + "\n");
  if (!a.chart_csv.empty()) {
    std::ostringstream csv;
    write_chart_csv(csv, report.chart);
    write_file(a.chart_csv, csv.str());
  }
  if (!a.svg.empty()) write_file(a.svg, render_chart_svg(report.chart, to_string(report.chart.kind)));
  std::cerr << "simulated " << cfg.n_days << " days: " << report.flags().size() << " flags, delay "
            << (report.summary.delay_from_shift ? std::to_string(*report.summary.delay_from_shift) : "none")
            << ", false positives " << report.summary.false_positives << '\n';
  return 0;
}

int cmd_sweep(const SimulateArgs& a) {
  const auto cfg = a.config();
  cfg.validate();
  const auto setup = a.setup();
  if (!a.baseline_out.empty()) save_baseline(a.baseline_out, setup.baseline);
  const auto ks = parse_list(a.ks);
  const auto rows = k_sweep(cfg, setup.baseline, setup.pools, ks);
  std::ostringstream out;
  out << "k_rel,delay_from_shift,delay_after_first_post_day,false_positives\n";
  for (const auto& r : rows) {
    out << format_real(r.k_rel) << ',' << (r.delay_from_shift ? std::to_string(*r.delay_from_shift) : "")
        << ',' << (r.delay_after_first_post_day ? std::to_string(*r.delay_after_first_post_day) : "") << ','
        << r.false_positives << '\n';
  }
  emit(a.out, out.str());
  return 0;
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
  std::vector<std::string> pgm;
  std::vector<std::string> raw;
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned bit_depth = 8;
  std::string kind = "all";
  std::size_t levels = kDefaultGlcmLevels;
  std::optional<std::uint32_t> day;
  std::optional<int> label;
  std::string out;
};

int cmd_features(const FeaturesArgs& a) {
  if (a.pgm.empty() && a.raw.empty()) throw UsageError("give at least one --pgm or --raw image");
  if (!a.raw.empty() && (a.width == 0 || a.height == 0)) throw UsageError("--raw needs --width and --height");

  std::vector<std::pair<std::string, GrayImage>> images;
  for (const auto& path : a.pgm) images.emplace_back(path, read_pgm(path));
  for (const auto& path : a.raw) images.emplace_back(path, read_raw(path, a.width, a.height, a.bit_depth));

  std::vector<FeatureVector> rows;
  rows.reserve(images.size());
  for (const auto& [path, img] : images) {
    FeatureVector v;
    v.id = path;
    v.day = a.day;
    v.label = a.label;
    if (a.kind == "zero-order" || a.kind == "all") {
      const auto z = zero_order_stats(img).values();
      v.values.insert(v.values.end(), z.begin(), z.end());
    }
    if (a.kind == "glcm" || a.kind == "all") {
      const auto g = glcm_features(glcm(img, a.levels)).values();
      v.values.insert(v.values.end(), g.begin(), g.end());
    }
    rows.push_back(std::move(v));
  }
  std::ostringstream out;
  write_dataset(out, rows, a.out.empty() ? DatasetFormat::Csv : format_for_path(a.out));
  emit(a.out, out.str());
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string flags;
  std::string truth;
  std::string stat = "all";
  std::size_t n_boot = 100;
  std::size_t subset = 500;
  std::uint64_t seed = 0;
  std::string out;
};

// Reads `id` plus an optional 0/1 column named `column`; rows without the
// column count as 1.
std::map<std::string, int> read_id_table(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> id_col;
  std::optional<std::size_t> value_col;
  std::map<std::string, int> table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (!id_col) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == "id") id_col = i;
        if (fields[i] == column) value_col = i;
      }
      if (!id_col) throw Error(ErrorCode::MalformedRow, path + ": header needs an 'id' column");
      continue;
    }
    const auto where = path + ": line " + std::to_string(line_no) + ": ";
    if (fields.size() <= std::max(*id_col, value_col.value_or(0))) {
      throw Error(ErrorCode::MalformedRow, where + "too few fields");
    }
    int value = 1;
    if (value_col) {
      const auto v = parse_integer(fields[*value_col]);
      if (!v || (*v != 0 && *v != 1)) throw Error(ErrorCode::MalformedRow, where + column + " must be 0 or 1");
      value = static_cast<int>(*v);
    }
    if (!table.emplace(fields[*id_col], value).second) {
      throw Error(ErrorCode::DuplicateId, where + "id '" + fields[*id_col] + "'");
    }
  }
  return table;
}

int cmd_evaluate(const EvaluateArgs& a) {
  const auto flag_table = read_id_table(a.flags, "flag");
  const auto truth = read_id_table(a.truth, "label");
  std::set<std::string> flagged;
  for (const auto& [id, f] : flag_table) {
    if (f == 1) flagged.insert(id);
  }
  const auto counts = confusion(flagged, truth);

  std::vector<ScoredItem> scored;
  scored.reserve(truth.size());
  for (const auto& [id, label] : truth) scored.push_back({id, flagged.contains(id), label});

  std::vector<Statistic> stats;
  if (a.stat == "all") {
    stats = {Statistic::Accuracy, Statistic::Sensitivity, Statistic::Specificity};
  } else if (a.stat == "accuracy") {
    stats = {Statistic::Accuracy};
  } else if (a.stat == "sensitivity") {
    stats = {Statistic::Sensitivity};
  } else {
    stats = {Statistic::Specificity};
  }

  nlohmann::ordered_json doc;
  doc["format_version"] = 1;
  doc["confusion"] = {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
  doc["n_boot"] = a.n_boot;
  doc["subset_size"] = a.subset;
  doc["seed"] = a.seed;
  nlohmann::ordered_json results;
  for (auto stat : stats) {
    const auto name = std::string(to_string(stat));
    try {
      const auto ci = bootstrap_ci(scored, stat, a.n_boot, a.subset, a.seed);
      results[name] = {{"point", ci.point},
                       {"lower", ci.lower},
                       {"upper", ci.upper},
                       {"skipped_resamples", ci.skipped_resamples},
                       {"point_in_interval", ci.point_in_interval()}};
    } catch (const Error& e) {
      if (stats.size() == 1) throw;
      std::cerr << "warning: " << name << ": " << e.what() << '\n';
      results[name] = nullptr;
    }
  }
  doc["statistics"] = std::move(results);
  emit(a.out, doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spcdrift: out-of-distribution scoring, SPC charts (3-sigma, CUSUM) and drift simulation"};
  app.require_subcommand(1);
  app.footer(std::string(dataset_schema_help()));

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a baseline profile from in-distribution embeddings");
  fit_cmd->add_option("--train", fit.train, "Training embeddings (.ndjson or .csv)")->required();
  fit_cmd->add_option("--metric", fit.metric, "cosine | mahalanobis")
      ->check(CLI::IsMember({"cosine", "mahalanobis"}))
      ->capture_default_str();
  fit_cmd->add_option("--lambda-rel", fit.lambda_rel, "Covariance shrinkage relative to trace/d")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  fit_cmd->add_option("--out", fit.out, "Output baseline.json")->required();

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "Score items and flag them against the 3-sigma limits");
  score_cmd->add_option("--baseline", score_args.baseline, "baseline.json")->required();
  score_cmd->add_option("--input", score_args.input, "Embeddings to score")->required();
  score_cmd->add_option("--out", score_args.out, "Scores CSV id,metric,value (default stdout)");
  score_cmd->add_option("--flags", score_args.flags_out, "Per-item flags CSV id,value,flag,side");
  score_cmd->add_option("--truth-out", score_args.truth_out, "Ground-truth CSV id,label from the input labels");
  score_cmd->add_option("--multiplier", score_args.multiplier, "Control-limit multiplier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  MonitorArgs monitor;
  auto* monitor_cmd = app.add_subcommand("monitor", "Run a daily 3-sigma or CUSUM chart");
  monitor_cmd->add_option("--baseline", monitor.baseline, "baseline.json (supplies mu and sigma)");
  monitor_cmd->add_option("--mu", monitor.mu, "Override the in-distribution mean of the metric");
  monitor_cmd->add_option("--sigma", monitor.sigma, "Override the in-distribution sigma of the metric");
  auto* input_opt = monitor_cmd->add_option("--input", monitor.input, "Embeddings with a day field");
  auto* daily_opt = monitor_cmd->add_option("--daily", monitor.daily, "CSV with day,value columns");
  input_opt->excludes(daily_opt);
  monitor_cmd->add_option("--out", monitor.out, "Chart CSV (default stdout)");
  monitor_cmd->add_option("--svg", monitor.svg, "SVG rendering of the chart");
  monitor_cmd->add_flag("--experimental-run-rules", monitor.run_rules,
                        "Also apply 2-of-3 beyond 2 sigma and 7-in-a-row rules");
  monitor_cmd->add_option("--run-rules-out", monitor.run_rules_out, "CSV for run-rule flags (default stderr)");
  monitor.chart.add_to(monitor_cmd);

  SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a daily stream with a step drift and monitor it");
  simulate.add_to(simulate_cmd, false);

  SimulateArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Detection delay and false positives across CUSUM k values");
  sweep.add_to(sweep_cmd, true);

  FeaturesArgs features;
  auto* features_cmd = app.add_subcommand("features", "Zero-order and GLCM texture features from grayscale images");
  features_cmd->add_option("--pgm", features.pgm, "Binary PGM (P5) images");
  features_cmd->add_option("--raw", features.raw, "Headerless raw images");
  features_cmd->add_option("--width", features.width, "Raw image width");
  features_cmd->add_option("--height", features.height, "Raw image height");
  features_cmd->add_option("--bit-depth", features.bit_depth, "Raw sample bit depth (1-16)")
      ->check(CLI::Range(1u, 16u))
      ->capture_default_str();
  features_cmd->add_option("--kind", features.kind, "zero-order | glcm | all")
      ->check(CLI::IsMember({"zero-order", "glcm", "all"}))
      ->capture_default_str();
  features_cmd->add_option("--levels", features.levels, "GLCM grey levels")
      ->check(CLI::Range(std::size_t{2}, std::size_t{65536}))
      ->capture_default_str();
  features_cmd->add_option("--day", features.day, "Day index to attach to every row");
  features_cmd->add_option("--label", features.label, "Label to attach to every row (0 or 1)")->check(CLI::Range(0, 1));
  features_cmd->add_option("--out", features.out, "Output .csv or .ndjson (default CSV on stdout)");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Accuracy, sensitivity, specificity with bootstrap CIs");
  evaluate_cmd->add_option("--flags", evaluate.flags, "CSV with id[,flag]")->required();
  evaluate_cmd->add_option("--truth", evaluate.truth, "CSV with id,label (1 = OOD)")->required();
  evaluate_cmd->add_option("--stat", evaluate.stat, "all | accuracy | sensitivity | specificity")
      ->check(CLI::IsMember({"all", "accuracy", "sensitivity", "specificity"}))
      ->capture_default_str();
  evaluate_cmd->add_option("--n-boot", evaluate.n_boot, "Bootstrap resamples")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
      ->capture_default_str();
  evaluate_cmd->add_option("--subset", evaluate.subset, "Items per resample")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate_cmd->add_option("--seed", evaluate.seed, "Bootstrap seed")->capture_default_str();
  evaluate_cmd->add_option("--out", evaluate.out, "metrics.json (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit);
    if (*score_cmd) return cmd_score(score_args);
    if (*monitor_cmd) {
      if (monitor.input.empty() && monitor.daily.empty()) throw UsageError("give --input or --daily");
      return cmd_monitor(monitor);
    }
    if (*simulate_cmd) return cmd_simulate(simulate);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*features_cmd) return cmd_features(features);
    if (*evaluate_cmd) return cmd_evaluate(evaluate);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
