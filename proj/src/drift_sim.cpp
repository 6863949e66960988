#include "spcdrift/drift_sim.hpp"

#include "spcdrift/error.hpp"
#include "spcdrift/metrics.hpp"
#include "spcdrift/rng.hpp"

#include <algorithm>
#include <cmath>

namespace spcdrift {

namespace {

void check_range(const RateRange& r, const char* name) {
  if (!(0.0 <= r.lo && r.lo <= r.hi && r.hi <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, std::string(name) + " rate must satisfy 0 <= a <= b <= 1");
  }
}

}  // namespace

void SimulationConfig::validate() const {
  if (n_days == 0 || per_day == 0) {
    throw Error(ErrorCode::InvalidConfig, "n_days and per_day must be positive");
  }
  const auto shift = effective_shift_day();
  if (shift == 0 || shift >= n_days) {
    throw Error(ErrorCode::InvalidConfig, "shift_day must satisfy 0 < shift_day < n_days");
  }
  check_range(pre_rate, "pre-shift");
  check_range(post_rate, "post-shift");
  if (chart.kind == ChartKind::RunRule) {
    throw Error(ErrorCode::InvalidConfig, "simulation chart must be threesigma or cusum");
  }
}

SyntheticSourceConfig SyntheticSourceConfig::along_diagonal(std::size_t dim, double separation,
                                                            double offset, double scale) {
  SyntheticSourceConfig cfg;
  cfg.dim = dim;
  cfg.scale = scale;
  const double u = dim == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(dim));
  const double ood_offset = offset - separation * std::sqrt(scale);
  cfg.in_mean.assign(dim, offset * u);
  cfg.ood_mean.assign(dim, ood_offset * u);
  return cfg;
}

void SyntheticSourceConfig::validate() const {
  if (dim == 0) throw Error(ErrorCode::InvalidConfig, "dim must be positive");
  if (in_mean.size() != dim || ood_mean.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "source means must have length dim");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::InvalidConfig, "covariance scale must be positive");
  }
}

Pools synth_pools(const SyntheticSourceConfig& cfg, std::size_t n_in, std::size_t n_ood,
                  std::uint64_t seed) {
  cfg.validate();
  if (n_in == 0 || n_ood == 0) throw Error(ErrorCode::InvalidConfig, "pool sizes must be positive");
  const double sd = std::sqrt(cfg.scale);
  auto draw = [&](const std::vector<double>& mean, std::size_t n, std::uint64_t stream,
                  const char* prefix, int label) {
    Xoshiro256 rng(derive_seed(seed, stream));
    std::vector<FeatureVector> pool(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& v = pool[i];
      v.id = prefix + std::to_string(i);
      v.label = label;
      v.values.resize(cfg.dim);
      for (std::size_t j = 0; j < cfg.dim; ++j) v.values[j] = mean[j] + sd * standard_normal(rng);
    }
    return pool;
  };
  return {draw(cfg.in_mean, n_in, 0, "in-", 0), draw(cfg.ood_mean, n_ood, 1, "ood-", 1)};
}

SyntheticSetup synthetic_setup(const SyntheticSourceConfig& source, std::size_t n_train,
                               std::size_t n_pool, std::uint64_t seed, MetricKind metric,
                               double lambda_rel) {
  auto train = synth_pools(source, n_train, 1, derive_seed(seed, 0x7261696eULL)).in;
  for (auto& v : train) v.id = "train-" + v.id.substr(3);
  auto baseline = fit_baseline(train, metric, lambda_rel);
  return {std::move(baseline), synth_pools(source, n_pool, n_pool, derive_seed(seed, 0x706f6f6cULL))};
}

std::vector<FeatureVector> sample_day(std::uint32_t day, const SimulationConfig& cfg,
                                      const Pools& pools) {
  if (pools.in.empty() || pools.ood.empty()) {
    throw Error(ErrorCode::EmptyPool, "both the in-distribution and the OOD pool need items");
  }
  Xoshiro256 rng(derive_seed(cfg.seed, day));
  const auto& range = day < cfg.effective_shift_day() ? cfg.pre_rate : cfg.post_rate;
  const double p = uniform(rng, range.lo, range.hi);
  const auto n_ood = static_cast<std::size_t>(binomial(rng, cfg.per_day, p));

  std::vector<const FeatureVector*> picks;
  picks.reserve(cfg.per_day);
  for (std::size_t i = 0; i < n_ood; ++i) picks.push_back(&pools.ood[bounded(rng, pools.ood.size())]);
  for (std::size_t i = n_ood; i < cfg.per_day; ++i) {
    picks.push_back(&pools.in[bounded(rng, pools.in.size())]);
  }
  std::vector<int> labels(picks.size(), 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_ood), 1);

  std::vector<std::size_t> order(picks.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);

  std::vector<FeatureVector> batch;
  batch.reserve(picks.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& src = *picks[order[pos]];
    FeatureVector v;
    v.id = "d" + std::to_string(day) + "-" + std::to_string(pos) + ":" + src.id;
    v.day = day;
    v.label = labels[order[pos]];
    v.values = src.values;
    batch.push_back(std::move(v));
  }
  return batch;
}

FlagSummary summarize_flags(std::span<const FlagEvent> flags, std::uint32_t shift_day) {
  FlagSummary summary;
  for (const auto& f : flags) {
    if (f.index < shift_day) {
      ++summary.false_positives;
    } else {
      const std::size_t delay = f.index - shift_day;
      if (!summary.delay_from_shift || delay < *summary.delay_from_shift) {
        summary.delay_from_shift = delay;
      }
    }
  }
  return summary;
}

SimulationReport run_simulation(const SimulationConfig& cfg, const BaselineProfile& baseline,
                                const Pools& pools) {
  cfg.validate();
  if (cfg.metric != baseline.metric()) {
    throw Error(ErrorCode::InvalidConfig, "simulation metric differs from the baseline's metric");
  }
  SimulationReport report;
  report.config = cfg;
  report.daily_series.reserve(cfg.n_days);
  std::vector<DayValue> daily;
  daily.reserve(cfg.n_days);
  for (std::uint32_t day = 0; day < cfg.n_days; ++day) {
    const auto batch = sample_day(day, cfg, pools);
    const auto scores = score_batch(batch, baseline, cfg.metric);
    double sum = 0.0;
    for (const auto& s : scores) sum += s.value;
    const double mean = sum / static_cast<double>(scores.size());
    const auto ood = static_cast<std::size_t>(
        std::count_if(batch.begin(), batch.end(), [](const auto& v) { return v.label == 1; }));
    report.daily_series.push_back({day, mean, ood});
    daily.push_back({day, mean});
  }
  report.chart = trace_chart(daily, baseline.stats(), cfg.chart.kind, cfg.chart.resolve(baseline.stats()));
  report.summary = summarize_flags(report.chart.flags, cfg.effective_shift_day());
  return report;
}

nlohmann::ordered_json report_to_json(const SimulationReport& report) {
  using nlohmann::ordered_json;
  const auto& cfg = report.config;
  ordered_json chart;
  chart["kind"] = to_string(cfg.chart.kind);
  if (cfg.chart.kind == ChartKind::Cusum) {
    chart["k"] = report.chart.k;
    chart["h"] = report.chart.h;
    if (cfg.chart.k_rel) chart["k_rel"] = *cfg.chart.k_rel;
    if (cfg.chart.k_abs) chart["k_abs"] = *cfg.chart.k_abs;
    if (cfg.chart.h_rel) chart["h_rel"] = *cfg.chart.h_rel;
    if (cfg.chart.h_abs) chart["h_abs"] = *cfg.chart.h_abs;
    chart["reset_on_flag"] = cfg.chart.reset_on_flag;
  } else {
    chart["multiplier"] = cfg.chart.multiplier;
  }

  ordered_json config;
  config["n_days"] = cfg.n_days;
  config["per_day"] = cfg.per_day;
  config["shift_day"] = cfg.effective_shift_day();
  config["pre_rate"] = {cfg.pre_rate.lo, cfg.pre_rate.hi};
  config["post_rate"] = {cfg.post_rate.lo, cfg.post_rate.hi};
  config["seed"] = cfg.seed;
  config["metric"] = to_string(cfg.metric);
  config["chart"] = std::move(chart);

  ordered_json series = ordered_json::array();
  for (const auto& d : report.daily_series) {
    series.push_back({{"day", d.day}, {"value", d.value}, {"ood_count", d.ood_count}});
  }
  ordered_json flags = ordered_json::array();
  for (const auto& f : report.chart.flags) {
    flags.push_back({{"day", f.index}, {"value", f.value}, {"chart", to_string(f.chart)},
                     {"side", to_string(f.side)}});
  }
  auto optional_count = [](const std::optional<std::size_t>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
  };

  ordered_json doc;
  doc["format_version"] = 1;
  doc["config"] = std::move(config);
  doc["baseline_stats"] = {{"mu", report.chart.stats.mu}, {"sigma", report.chart.stats.sigma}};
  doc["daily_series"] = std::move(series);
  doc["flags"] = std::move(flags);
  doc["detection_delay"] = optional_count(report.summary.delay_from_shift);
  doc["delay_from_shift"] = optional_count(report.summary.delay_from_shift);
  doc["delay_after_first_post_day"] = optional_count(report.summary.delay_after_first_post_day());
  doc["false_positives"] = report.summary.false_positives;
  return doc;
}

}  // namespace spcdrift
