#pragma once

#include "spcdrift/drift_sim.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spcdrift {

/// Positive class is OOD.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const std::set<std::string>& flagged,
                          const std::map<std::string, int>& truth);

struct Rates {
  double accuracy;
  double sensitivity;
  double specificity;
};

/// Throws UndefinedRate when the total or either class is empty.
Rates rates(const ConfusionCounts& c);

enum class Statistic { Accuracy, Sensitivity, Specificity };

std::string_view to_string(Statistic stat);

/// nullopt when the statistic's denominator is zero.
std::optional<double> statistic_value(const ConfusionCounts& c, Statistic stat);

struct ScoredItem {
  std::string id;
  bool flagged = false;
  int truth = 0;
};

ConfusionCounts confusion(std::span<const ScoredItem> items);

struct BootstrapCI {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t n_boot = 0;
  std::size_t subset_size = 0;
  std::size_t skipped_resamples = 0;

  bool point_in_interval() const noexcept { return lower <= point && point <= upper; }
};

/// Percentile (2.5 %, 97.5 %) interval over `n_boot` resamples of
/// `subset_size` items drawn with replacement. Resamples where the statistic
/// is undefined are skipped and counted. Resample b uses the generator
/// derived from (seed, b).
BootstrapCI bootstrap_ci(std::span<const ScoredItem> scored, Statistic stat, std::size_t n_boot,
                         std::size_t subset_size, std::uint64_t seed);

/// Linear-interpolation quantile of an ascending-sorted sample.
double sorted_quantile(std::span<const double> sorted, double q);

struct SweepRow {
  double k_rel = 0.0;
  std::optional<std::size_t> delay_from_shift;
  std::optional<std::size_t> delay_after_first_post_day;
  std::size_t false_positives = 0;
};

/// One simulation per k (relative to the baseline sigma), everything else
/// held fixed including the seed. The chart is forced to CUSUM.
std::vector<SweepRow> k_sweep(const SimulationConfig& cfg, const BaselineProfile& baseline,
                              const Pools& pools, std::span<const double> ks_rel);

}  // namespace spcdrift
