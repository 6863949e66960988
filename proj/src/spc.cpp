#include "spcdrift/spc.hpp"

#include "spcdrift/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace spcdrift {

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::ThreeSigma: return "threesigma";
    case ChartKind::Cusum: return "cusum";
    case ChartKind::RunRule: return "runrule";
  }
  return "unknown";
}

std::string_view to_string(Side side) { return side == Side::High ? "High" : "Low"; }

ChartKind chart_from_string(std::string_view name) {
  if (name == "threesigma" || name == "3sigma") return ChartKind::ThreeSigma;
  if (name == "cusum") return ChartKind::Cusum;
  throw Error(ErrorCode::InvalidConfig, "unknown chart '" + std::string(name) + "'");
}

std::vector<FlagEvent> three_sigma_flags(std::span<const double> values, const ControlLimits& limits) {
  if (!(limits.sigma >= 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be non-negative");
  const double lo = limits.lower();
  const double hi = limits.upper();
  std::vector<FlagEvent> flags;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < lo) {
      flags.push_back({i, values[i], ChartKind::ThreeSigma, Side::Low});
    } else if (values[i] > hi) {
      flags.push_back({i, values[i], ChartKind::ThreeSigma, Side::High});
    }
  }
  return flags;
}

std::vector<DayValue> daily_average(std::span<const DayValue> items) {
  std::map<std::uint32_t, std::pair<double, std::size_t>> by_day;
  for (const auto& item : items) {
    auto& [sum, count] = by_day[item.day];
    sum += item.value;
    ++count;
  }
  std::vector<DayValue> out;
  out.reserve(by_day.size());
  for (const auto& [day, acc] : by_day) {
    out.push_back({day, acc.first / static_cast<double>(acc.second)});
  }
  return out;
}

CusumStep cusum_step(const CusumState& state, double x, std::size_t index) {
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "CUSUM input is not finite");
  CusumStep step{state, std::nullopt};
  auto& s = step.state;
  s.s_plus = std::max(0.0, state.s_plus + (x - state.mu0 - state.k));
  s.s_minus = std::max(0.0, state.s_minus - (x - state.mu0 + state.k));
  const double over_high = s.s_plus - s.h;
  const double over_low = s.s_minus - s.h;
  if (over_high > 0.0 || over_low > 0.0) {
    step.flag = FlagEvent{index, x, ChartKind::Cusum, over_high >= over_low ? Side::High : Side::Low};
  }
  return step;
}

CusumParams cusum_defaults(double sigma) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidConfig, "sigma must be finite and non-negative");
  }
  if (sigma == 0.0) {
    throw Error(ErrorCode::ZeroSigma, "sigma is 0, the CUSUM threshold would be 0 (degenerate baseline)");
  }
  return {sigma / 2.0, 4.0 * sigma};
}

ChartParams ChartSpec::resolve(const MetricStats& stats) const {
  if (k_rel && k_abs) throw Error(ErrorCode::InvalidConfig, "give either a relative or an absolute k");
  if (h_rel && h_abs) throw Error(ErrorCode::InvalidConfig, "give either a relative or an absolute h");
  if (!(multiplier > 0.0)) throw Error(ErrorCode::InvalidConfig, "multiplier must be positive");
  ChartParams params;
  params.multiplier = multiplier;
  params.reset_on_flag = reset_on_flag;
  if (kind != ChartKind::Cusum) return params;

  const bool need_sigma = !k_abs || !h_abs;
  const auto defaults = need_sigma ? cusum_defaults(stats.sigma) : CusumParams{0.0, 0.0};
  params.k = k_abs ? *k_abs : k_rel ? *k_rel * stats.sigma : defaults.k;
  params.h = h_abs ? *h_abs : h_rel ? *h_rel * stats.sigma : defaults.h;
  if (!(*params.k >= 0.0)) throw Error(ErrorCode::InvalidConfig, "k must be non-negative");
  if (!(*params.h > 0.0)) throw Error(ErrorCode::InvalidConfig, "h must be positive");
  return params;
}

namespace {

void check_sorted(std::span<const DayValue> daily) {
  for (std::size_t i = 1; i < daily.size(); ++i) {
    if (daily[i].day <= daily[i - 1].day) {
      throw Error(ErrorCode::InvalidConfig, "daily series must be strictly ascending by day");
    }
  }
}

}  // namespace

ChartTrace trace_chart(std::span<const DayValue> daily, const MetricStats& stats, ChartKind kind,
                       const ChartParams& params) {
  check_sorted(daily);
  ChartTrace trace;
  trace.kind = kind;
  trace.stats = stats;
  trace.rows.reserve(daily.size());

  if (kind == ChartKind::ThreeSigma) {
    const ControlLimits limits{stats.mu, stats.sigma, params.multiplier};
    std::vector<double> values;
    values.reserve(daily.size());
    for (const auto& d : daily) {
      values.push_back(d.value);
      trace.rows.push_back({d.day, d.value, limits.lower(), limits.upper(), {}, {}, {}});
    }
    for (auto flag : three_sigma_flags(values, limits)) {
      trace.rows[flag.index].side = flag.side;
      flag.index = daily[flag.index].day;
      trace.flags.push_back(flag);
    }
    return trace;
  }
  if (kind != ChartKind::Cusum) throw Error(ErrorCode::InvalidConfig, "unsupported chart kind");

  const bool need_defaults = !params.k || !params.h;
  const auto defaults = need_defaults ? cusum_defaults(stats.sigma) : CusumParams{0.0, 0.0};
  trace.k = params.k.value_or(defaults.k);
  trace.h = params.h.value_or(defaults.h);
  if (!(trace.k >= 0.0) || !(trace.h > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "CUSUM needs k >= 0 and h > 0");
  }
  CusumState state{0.0, 0.0, stats.mu, trace.k, trace.h};
  for (const auto& d : daily) {
    auto step = cusum_step(state, d.value, d.day);
    ChartRow row{d.day, d.value, {}, {}, step.state.s_plus, step.state.s_minus, {}};
    if (step.flag) {
      row.side = step.flag->side;
      trace.flags.push_back(*step.flag);
      if (params.reset_on_flag) step.state.s_plus = step.state.s_minus = 0.0;
    }
    trace.rows.push_back(row);
    state = step.state;
  }
  return trace;
}

std::vector<FlagEvent> monitor_stream(std::span<const DayValue> daily, const MetricStats& stats,
                                      ChartKind kind, const ChartParams& params) {
  return trace_chart(daily, stats, kind, params).flags;
}

std::vector<FlagEvent> run_rule_flags(std::span<const DayValue> daily, const MetricStats& stats) {
  check_sorted(daily);
  std::vector<FlagEvent> flags;
  const double two_sigma = 2.0 * stats.sigma;
  int run_side = 0;
  std::size_t run_length = 0;
  for (std::size_t i = 0; i < daily.size(); ++i) {
    const double dev = daily[i].value - stats.mu;
    const int side = dev > 0.0 ? 1 : dev < 0.0 ? -1 : 0;
    if (side != 0 && side == run_side) {
      ++run_length;
    } else {
      run_side = side;
      run_length = side == 0 ? 0 : 1;
    }

    bool fired = run_length >= 7;
    if (!fired && i >= 2 && side != 0 && std::abs(dev) > two_sigma) {
      int beyond = 0;
      for (std::size_t j = i - 2; j <= i; ++j) {
        const double dj = daily[j].value - stats.mu;
        if (dj * side > two_sigma) ++beyond;
      }
      fired = beyond >= 2;
    }
    if (fired) {
      flags.push_back({daily[i].day, daily[i].value, ChartKind::RunRule, side > 0 ? Side::High : Side::Low});
    }
  }
  return flags;
}

}  // namespace spcdrift
