#include "spcdrift/eval.hpp"

#include "spcdrift/error.hpp"
#include "spcdrift/rng.hpp"

#include <algorithm>
#include <cmath>

namespace spcdrift {

ConfusionCounts confusion(const std::set<std::string>& flagged,
                          const std::map<std::string, int>& truth) {
  for (const auto& id : flagged) {
    if (!truth.contains(id)) throw Error(ErrorCode::UnknownId, "flagged id '" + id + "' has no ground truth");
  }
  ConfusionCounts c;
  for (const auto& [id, label] : truth) {
    const bool flag = flagged.contains(id);
    if (label == 1) {
      flag ? ++c.tp : ++c.fn;
    } else {
      flag ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

ConfusionCounts confusion(std::span<const ScoredItem> items) {
  ConfusionCounts c;
  for (const auto& item : items) {
    if (item.truth == 1) {
      item.flagged ? ++c.tp : ++c.fn;
    } else {
      item.flagged ? ++c.fp : ++c.tn;
    }
  }
  return c;
}

std::string_view to_string(Statistic stat) {
  switch (stat) {
    case Statistic::Accuracy: return "accuracy";
    case Statistic::Sensitivity: return "sensitivity";
    case Statistic::Specificity: return "specificity";
  }
  return "unknown";
}

std::optional<double> statistic_value(const ConfusionCounts& c, Statistic stat) {
  auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  switch (stat) {
    case Statistic::Accuracy: return ratio(c.tp + c.tn, c.total());
    case Statistic::Sensitivity: return ratio(c.tp, c.tp + c.fn);
    case Statistic::Specificity: return ratio(c.tn, c.tn + c.fp);
  }
  return std::nullopt;
}

Rates rates(const ConfusionCounts& c) {
  const auto acc = statistic_value(c, Statistic::Accuracy);
  const auto sens = statistic_value(c, Statistic::Sensitivity);
  const auto spec = statistic_value(c, Statistic::Specificity);
  if (!acc) throw Error(ErrorCode::UndefinedRate, "no items evaluated");
  if (!sens) throw Error(ErrorCode::UndefinedRate, "sensitivity undefined: no OOD items");
  if (!spec) throw Error(ErrorCode::UndefinedRate, "specificity undefined: no in-distribution items");
  return {*acc, *sens, *spec};
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::InvalidConfig, "quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapCI bootstrap_ci(std::span<const ScoredItem> scored, Statistic stat, std::size_t n_boot,
                         std::size_t subset_size, std::uint64_t seed) {
  if (scored.empty()) throw Error(ErrorCode::InvalidConfig, "bootstrap needs scored items");
  if (n_boot < 2) throw Error(ErrorCode::InvalidConfig, "n_boot must be at least 2");
  if (subset_size == 0) throw Error(ErrorCode::InvalidConfig, "subset_size must be positive");

  BootstrapCI ci;
  ci.n_boot = n_boot;
  ci.subset_size = subset_size;
  const auto point = statistic_value(confusion(scored), stat);
  if (!point) {
    throw Error(ErrorCode::UndefinedRate,
                std::string(to_string(stat)) + " is undefined on the full set");
  }
  ci.point = *point;

  std::vector<double> samples;
  samples.reserve(n_boot);
  for (std::size_t b = 0; b < n_boot; ++b) {
    Xoshiro256 rng(derive_seed(seed, b));
    ConfusionCounts c;
    for (std::size_t i = 0; i < subset_size; ++i) {
      const auto& item = scored[bounded(rng, scored.size())];
      if (item.truth == 1) {
        item.flagged ? ++c.tp : ++c.fn;
      } else {
        item.flagged ? ++c.fp : ++c.tn;
      }
    }
    if (const auto v = statistic_value(c, stat)) {
      samples.push_back(*v);
    } else {
      ++ci.skipped_resamples;
    }
  }
  if (samples.empty()) {
    throw Error(ErrorCode::AllResamplesUndefined,
                std::string(to_string(stat)) + " undefined in every resample");
  }
  std::sort(samples.begin(), samples.end());
  ci.lower = sorted_quantile(samples, 0.025);
  ci.upper = sorted_quantile(samples, 0.975);
  return ci;
}

std::vector<SweepRow> k_sweep(const SimulationConfig& cfg, const BaselineProfile& baseline,
                              const Pools& pools, std::span<const double> ks_rel) {
  if (ks_rel.empty()) throw Error(ErrorCode::InvalidConfig, "k sweep needs at least one k");
  std::vector<SweepRow> rows;
  rows.reserve(ks_rel.size());
  for (double k : ks_rel) {
    if (!(k >= 0.0)) throw Error(ErrorCode::InvalidConfig, "k values must be non-negative");
    SimulationConfig run = cfg;
    run.chart.kind = ChartKind::Cusum;
    run.chart.k_rel = k;
    run.chart.k_abs.reset();
    const auto report = run_simulation(run, baseline, pools);
    rows.push_back({k, report.summary.delay_from_shift, report.summary.delay_after_first_post_day(),
                    report.summary.false_positives});
  }
  return rows;
}

}  // namespace spcdrift
