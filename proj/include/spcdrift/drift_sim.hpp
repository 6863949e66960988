#pragma once

#include "spcdrift/feature_model.hpp"
#include "spcdrift/spc.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace spcdrift {

struct RateRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct SimulationConfig {
  std::uint32_t n_days = 60;
  std::uint32_t per_day = 100;
  std::optional<std::uint32_t> shift_day;  // defaults to n_days / 2
  RateRange pre_rate{0.0, 0.01};
  RateRange post_rate{0.03, 0.05};
  std::uint64_t seed = 0;
  MetricKind metric = MetricKind::CosineSimilarity;
  ChartSpec chart;

  std::uint32_t effective_shift_day() const noexcept { return shift_day.value_or(n_days / 2); }

  /// Throws InvalidConfig when an invariant is violated.
  void validate() const;
};

struct Pools {
  std::vector<FeatureVector> in;
  std::vector<FeatureVector> ood;
};

/// Gaussian sources N(in_mean, scale I) and N(ood_mean, scale I).
struct SyntheticSourceConfig {
  std::size_t dim = 16;
  std::vector<double> in_mean;
  std::vector<double> ood_mean;
  double scale = 1.0;

  /// Both means on the diagonal direction u = (1, ..., 1) / sqrt(dim):
  /// in_mean = offset * u, ood_mean = in_mean - separation * sqrt(scale) * u,
  /// so |ood_mean - in_mean| / sqrt(scale) = separation.
  static SyntheticSourceConfig along_diagonal(std::size_t dim, double separation, double offset,
                                              double scale = 1.0);

  void validate() const;
};

/// Deterministic in `seed`. Ids are "in-<i>" / "ood-<i>" with labels 0 / 1.
Pools synth_pools(const SyntheticSourceConfig& cfg, std::size_t n_in, std::size_t n_ood,
                  std::uint64_t seed);

/// Baseline fitted on a fresh in-distribution training draw plus streaming
/// pools, all derived from one seed. Training and pools come from disjoint
/// generator streams.
struct SyntheticSetup {
  BaselineProfile baseline;
  Pools pools;
};

SyntheticSetup synthetic_setup(const SyntheticSourceConfig& source, std::size_t n_train,
                               std::size_t n_pool, std::uint64_t seed, MetricKind metric,
                               double lambda_rel = kDefaultLambdaRel);

/// One day's shuffled batch, drawn with replacement from the pools. The
/// generator is derived from (cfg.seed, day), so day k does not depend on
/// n_days.
std::vector<FeatureVector> sample_day(std::uint32_t day, const SimulationConfig& cfg,
                                      const Pools& pools);

struct DailyPoint {
  std::uint32_t day = 0;
  double value = 0.0;
  std::size_t ood_count = 0;
};

struct FlagSummary {
  std::optional<std::size_t> delay_from_shift;
  std::size_t false_positives = 0;

  /// The "days after the shift day" convention, where a flag on the first
  /// post-shift day counts as 1.
  std::optional<std::size_t> delay_after_first_post_day() const {
    if (!delay_from_shift) return std::nullopt;
    return *delay_from_shift + 1;
  }
};

FlagSummary summarize_flags(std::span<const FlagEvent> flags, std::uint32_t shift_day);

struct SimulationReport {
  SimulationConfig config;
  std::vector<DailyPoint> daily_series;
  ChartTrace chart;
  FlagSummary summary;

  const std::vector<FlagEvent>& flags() const noexcept { return chart.flags; }
};

SimulationReport run_simulation(const SimulationConfig& cfg, const BaselineProfile& baseline,
                                const Pools& pools);

nlohmann::ordered_json report_to_json(const SimulationReport& report);

}  // namespace spcdrift
