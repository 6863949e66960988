#pragma once

#include "spcdrift/feature_model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spcdrift {

/// [mu - multiplier * sigma, mu + multiplier * sigma]; values on a limit are in control.
struct ControlLimits {
  double mu = 0.0;
  double sigma = 0.0;
  double multiplier = 3.0;

  double half_width() const noexcept { return sigma == 0.0 ? 0.0 : multiplier * sigma; }
  double lower() const noexcept { return mu - half_width(); }
  double upper() const noexcept { return mu + half_width(); }
};

enum class ChartKind { ThreeSigma, Cusum, RunRule };
enum class Side { High, Low };

std::string_view to_string(ChartKind kind);
std::string_view to_string(Side side);
ChartKind chart_from_string(std::string_view name);

/// `index` is the item position for per-item charts and the calendar day for
/// daily charts.
struct FlagEvent {
  std::size_t index = 0;
  double value = 0.0;
  ChartKind chart = ChartKind::ThreeSigma;
  Side side = Side::High;

  friend bool operator==(const FlagEvent&, const FlagEvent&) = default;
};

std::vector<FlagEvent> three_sigma_flags(std::span<const double> values, const ControlLimits& limits);

struct DayValue {
  std::uint32_t day = 0;
  double value = 0.0;

  friend bool operator==(const DayValue&, const DayValue&) = default;
};

/// Mean per distinct day, ascending. Days without items do not appear.
std::vector<DayValue> daily_average(std::span<const DayValue> items);

struct CusumState {
  double s_plus = 0.0;
  double s_minus = 0.0;
  double mu0 = 0.0;
  double k = 0.0;
  double h = 0.0;
};

struct CusumStep {
  CusumState state;
  std::optional<FlagEvent> flag;
};

/// One update of the two one-sided sums
///   S+ = max(0, S+ + (x - mu0 - k)),  S- = max(0, S- - (x - mu0 + k)).
/// A sum strictly above h raises a flag; if both do, the larger exceedance
/// decides the side. Sums are carried on, not reset.
CusumStep cusum_step(const CusumState& state, double x, std::size_t index = 0);

struct CusumParams {
  double k;
  double h;
};

/// k = sigma / 2, h = 4 sigma. Throws ZeroSigma for sigma == 0.
CusumParams cusum_defaults(double sigma);

/// Chart parameters in metric units, already resolved.
struct ChartParams {
  std::optional<double> k;
  std::optional<double> h;
  double multiplier = 3.0;
  bool reset_on_flag = false;
};

/// Chart selection as a user states it: k and h either absolute or relative
/// to the baseline sigma (at most one form each).
struct ChartSpec {
  ChartKind kind = ChartKind::Cusum;
  std::optional<double> k_rel;
  std::optional<double> k_abs;
  std::optional<double> h_rel;
  std::optional<double> h_abs;
  double multiplier = 3.0;
  bool reset_on_flag = false;

  ChartParams resolve(const MetricStats& stats) const;
};

struct ChartRow {
  std::uint32_t day = 0;
  double value = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> s_plus;
  std::optional<double> s_minus;
  std::optional<Side> side;

  bool flagged() const noexcept { return side.has_value(); }
};

struct ChartTrace {
  ChartKind kind = ChartKind::Cusum;
  MetricStats stats;
  double k = 0.0;  // CUSUM only
  double h = 0.0;  // CUSUM only
  std::vector<ChartRow> rows;
  std::vector<FlagEvent> flags;
};

/// Runs the chart over a day-sorted daily series. ThreeSigma uses the
/// baseline limits, Cusum folds cusum_step from (0, 0) with mu0 = stats.mu.
ChartTrace trace_chart(std::span<const DayValue> daily, const MetricStats& stats, ChartKind kind,
                       const ChartParams& params = {});

std::vector<FlagEvent> monitor_stream(std::span<const DayValue> daily, const MetricStats& stats,
                                      ChartKind kind, const ChartParams& params = {});

/// Experimental supplementary rules on a daily series: two of three
/// consecutive points beyond 2 sigma on one side, or seven consecutive points
/// on one side of mu.
std::vector<FlagEvent> run_rule_flags(std::span<const DayValue> daily, const MetricStats& stats);

/// `day,value,lower,upper,s_plus,s_minus,flag,side`
void write_chart_csv(std::ostream& out, const ChartTrace& trace);

/// Reads a daily series from any CSV with `day` and `value` columns
/// (including the chart CSV above).
std::vector<DayValue> read_daily_csv(std::istream& in);

std::string render_chart_svg(const ChartTrace& trace, std::string_view title = {});

}  // namespace spcdrift
