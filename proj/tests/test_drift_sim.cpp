#include "spcdrift/drift_sim.hpp"
#include "spcdrift/error.hpp"
#include "spcdrift/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace spcdrift;

namespace {

const SyntheticSetup& small_setup() {
  static const SyntheticSetup setup = synthetic_setup(SyntheticSourceConfig::along_diagonal(16, 8.0, 8.0), 2000,
                                                      500, 7, MetricKind::CosineSimilarity);
  return setup;
}

SimulationConfig config(std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.seed = seed;
  return cfg;
}

std::size_t ood_in(const std::vector<FeatureVector>& batch) {
  std::size_t n = 0;
  for (const auto& v : batch) n += v.label == 1 ? 1 : 0;
  return n;
}

}  // namespace

TEST(SimulationConfig, Validation) {
  EXPECT_NO_THROW(config(0).validate());
  auto bad_shift = config(0);
  bad_shift.shift_day = 60;
  EXPECT_THROW(bad_shift.validate(), Error);
  auto bad_range = config(0);
  bad_range.post_rate = {0.5, 0.4};
  EXPECT_THROW(bad_range.validate(), Error);
  auto above_one = config(0);
  above_one.pre_rate = {0.5, 1.2};
  EXPECT_THROW(above_one.validate(), Error);
  EXPECT_EQ(config(0).effective_shift_day(), 30u);
}

TEST(SynthPools, GeometryAndLabels) {
  const auto src = SyntheticSourceConfig::along_diagonal(4, 8.0, 2.0, 4.0);
  double sep = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(src.in_mean[i], 1.0);
    sep += (src.ood_mean[i] - src.in_mean[i]) * (src.ood_mean[i] - src.in_mean[i]);
  }
  EXPECT_NEAR(std::sqrt(sep / src.scale), 8.0, 1e-12);

  const auto pools = synth_pools(src, 5000, 3000, 1);
  ASSERT_EQ(pools.in.size(), 5000u);
  ASSERT_EQ(pools.ood.size(), 3000u);
  EXPECT_EQ(pools.in[0].label, 0);
  EXPECT_EQ(pools.ood[0].label, 1);
  double m0 = 0.0, v0 = 0.0;
  for (const auto& v : pools.in) m0 += v.values[0];
  m0 /= 5000;
  for (const auto& v : pools.in) v0 += (v.values[0] - m0) * (v.values[0] - m0);
  v0 /= 4999;
  EXPECT_NEAR(m0, 1.0, 5 * std::sqrt(4.0 / 5000));
  EXPECT_NEAR(v0, 4.0, 0.25);
}

TEST(SynthPools, DeterministicInSeed) {
  const auto src = SyntheticSourceConfig::along_diagonal(3, 8.0, 8.0);
  const auto a = synth_pools(src, 10, 10, 5);
  const auto b = synth_pools(src, 10, 10, 5);
  const auto c = synth_pools(src, 10, 10, 6);
  EXPECT_EQ(a.in, b.in);
  EXPECT_EQ(a.ood, b.ood);
  EXPECT_NE(a.in, c.in);
}

TEST(SampleDay, ZeroAndFullRates) {
  auto cfg = config(3);
  cfg.pre_rate = {0.0, 0.0};
  cfg.post_rate = {1.0, 1.0};
  const auto& pools = small_setup().pools;
  for (std::uint32_t day = 0; day < 60; ++day) {
    const auto batch = sample_day(day, cfg, pools);
    ASSERT_EQ(batch.size(), 100u);
    EXPECT_EQ(ood_in(batch), day < 30 ? 0u : 100u);
    for (const auto& v : batch) EXPECT_EQ(v.day, day);
  }
}

TEST(SampleDay, BinomialMean) {
  auto cfg = config(4);
  cfg.n_days = 10001;
  cfg.shift_day = 10000;
  cfg.pre_rate = {0.04, 0.04};
  SyntheticSetup tiny = small_setup();
  tiny.pools.in.resize(3);
  tiny.pools.ood.resize(3);
  double sum = 0.0;
  for (std::uint32_t day = 0; day < 10000; ++day) sum += static_cast<double>(ood_in(sample_day(day, cfg, tiny.pools)));
  EXPECT_NEAR(sum / 10000, 4.0, 0.1);
}

TEST(SampleDay, EmptyPool) {
  Pools empty;
  empty.in = small_setup().pools.in;
  try {
    sample_day(0, config(0), empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPool);
  }
}

TEST(SampleDay, UniqueIdsWithinDay) {
  const auto batch = sample_day(31, config(9), small_setup().pools);
  std::set<std::string> ids;
  for (const auto& v : batch) ids.insert(v.id);
  EXPECT_EQ(ids.size(), batch.size());
}

TEST(SummarizeFlags, Conventions) {
  const std::vector<FlagEvent> flags{{3, 0, ChartKind::Cusum, Side::Low},
                                     {30, 0, ChartKind::Cusum, Side::Low},
                                     {31, 0, ChartKind::Cusum, Side::Low}};
  const auto s = summarize_flags(flags, 30);
  EXPECT_EQ(s.false_positives, 1u);
  EXPECT_EQ(s.delay_from_shift, 0u);
  EXPECT_EQ(s.delay_after_first_post_day(), 1u);
  const auto none = summarize_flags({}, 30);
  EXPECT_FALSE(none.delay_from_shift.has_value());
  EXPECT_FALSE(none.delay_after_first_post_day().has_value());
}

TEST(RunSimulation, NoDriftNoDetection) {
  auto cfg = config(1);
  cfg.pre_rate = {0.0, 0.0};
  cfg.post_rate = {0.0, 0.0};
  const auto report = run_simulation(cfg, small_setup().baseline, small_setup().pools);
  EXPECT_FALSE(report.summary.delay_from_shift.has_value());
  EXPECT_EQ(report.daily_series.size(), 60u);
}

TEST(RunSimulation, FalseAlarmControl) {
  int clean = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto cfg = config(seed);
    cfg.pre_rate = {0.0, 0.0};
    cfg.post_rate = {0.0, 0.0};
    clean += run_simulation(cfg, small_setup().baseline, small_setup().pools).flags().empty() ? 1 : 0;
  }
  EXPECT_GE(clean, 48);
}

TEST(RunSimulation, DailyValueIsMeanOfScores) {
  const auto cfg = config(2);
  const auto& s = small_setup();
  const auto report = run_simulation(cfg, s.baseline, s.pools);
  for (std::uint32_t day : {0u, 29u, 30u, 59u}) {
    const auto batch = sample_day(day, cfg, s.pools);
    double sum = 0.0;
    for (const auto& v : batch) sum += cosine_similarity(v, s.baseline).value;
    EXPECT_NEAR(report.daily_series[day].value, sum / batch.size(), 1e-12);
    EXPECT_EQ(report.daily_series[day].ood_count, ood_in(batch));
  }
}

TEST(RunSimulation, MetricMismatch) {
  auto cfg = config(0);
  cfg.metric = MetricKind::Mahalanobis;
  EXPECT_THROW(run_simulation(cfg, small_setup().baseline, small_setup().pools), Error);
}

// Properties

TEST(DriftSimProperty, Deterministic) {
  const auto& s = small_setup();
  const auto a = report_to_json(run_simulation(config(5), s.baseline, s.pools)).dump();
  const auto b = report_to_json(run_simulation(config(5), s.baseline, s.pools)).dump();
  const auto c = report_to_json(run_simulation(config(6), s.baseline, s.pools)).dump();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  const auto again = synthetic_setup(SyntheticSourceConfig::along_diagonal(16, 8.0, 8.0), 2000, 500, 7,
                                     MetricKind::CosineSimilarity);
  EXPECT_EQ(again.baseline, s.baseline);
  EXPECT_EQ(again.pools.in, s.pools.in);
}

TEST(DriftSimProperty, EarlierDaysIndependentOfHorizon) {
  auto short_cfg = config(8);
  short_cfg.shift_day = 20;
  auto long_cfg = short_cfg;
  long_cfg.n_days = 90;
  short_cfg.n_days = 40;
  for (std::uint32_t day = 0; day < 40; ++day) {
    EXPECT_EQ(sample_day(day, short_cfg, small_setup().pools), sample_day(day, long_cfg, small_setup().pools));
  }
}

TEST(DriftSimProperty, SummaryMatchesIndependentFold) {
  const auto& s = small_setup();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = config(seed);
    cfg.chart.k_rel = 0.1;
    const auto report = run_simulation(cfg, s.baseline, s.pools);
    std::size_t fp = 0;
    std::optional<std::size_t> delay;
    for (const auto& row : report.chart.rows) {
      if (!row.flagged()) continue;
      if (row.day < 30) {
        ++fp;
      } else if (!delay) {
        delay = row.day - 30;
      }
    }
    EXPECT_EQ(report.summary.false_positives, fp);
    EXPECT_EQ(report.summary.delay_from_shift, delay);
    const auto doc = report_to_json(report);
    EXPECT_EQ(doc["false_positives"].get<std::size_t>(), fp);
    EXPECT_EQ(doc["detection_delay"].is_null(), !delay.has_value());
  }
}
