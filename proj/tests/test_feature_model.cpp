#include "oracles.hpp"
#include "spcdrift/baseline_io.hpp"
#include "spcdrift/error.hpp"
#include "spcdrift/feature_model.hpp"
#include "spcdrift/rng.hpp"

#include <gtest/gtest.h>

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

using namespace spcdrift;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

FeatureVector fv(std::string id, std::vector<double> values) {
  FeatureVector v;
  v.id = std::move(id);
  v.values = std::move(values);
  return v;
}

}  // namespace

TEST(ParseDataset, SingleNdjsonLine) {
  const auto rows = parse_dataset(R"({"id":"a","vec":[1.0,2.0]})", DatasetFormat::Ndjson);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].id, "a");
  EXPECT_EQ(rows[0].values, (std::vector<double>{1.0, 2.0}));
  EXPECT_FALSE(rows[0].day.has_value());
  EXPECT_FALSE(rows[0].label.has_value());
}

TEST(ParseDataset, NdjsonOptionalFields) {
  const auto rows = parse_dataset("{\"id\":\"a\",\"day\":3,\"label\":1,\"vec\":[0.5]}\n\n", DatasetFormat::Ndjson);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].day, 3u);
  EXPECT_EQ(rows[0].label, 1);
}

TEST(ParseDataset, DimensionMismatchReportsRow) {
  try {
    parse_dataset("{\"id\":\"a\",\"vec\":[1,2]}\n{\"id\":\"b\",\"vec\":[1,2,3]}\n", DatasetFormat::Ndjson);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(ParseDataset, CsvWithLabel) {
  const auto rows = parse_dataset("id,label,v0,v1\na,0,0.5,-0.5\n", DatasetFormat::Csv);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].label, 0);
  EXPECT_EQ(rows[0].values, (std::vector<double>{0.5, -0.5}));
}

TEST(ParseDataset, CsvWithDayAndLabel) {
  const auto rows = parse_dataset("id,day,label,v0\na,4,1,2\n", DatasetFormat::Csv);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].day, 4u);
  EXPECT_EQ(rows[0].label, 1);
}

TEST(ParseDataset, Errors) {
  EXPECT_EQ(code_of([] { parse_dataset("{\"id\":\"a\",\"vec\":[1]}\n{\"id\":\"a\",\"vec\":[2]}", DatasetFormat::Ndjson); }),
            ErrorCode::DuplicateId);
  EXPECT_EQ(code_of([] { parse_dataset("{\"id\":\"a\",\"vec\":[1e999]}", DatasetFormat::Ndjson); }),
            ErrorCode::NonFiniteValue);
  EXPECT_EQ(code_of([] { parse_dataset("{not json", DatasetFormat::Ndjson); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_dataset("{\"vec\":[1]}", DatasetFormat::Ndjson); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_dataset("id,v0\na,x\n", DatasetFormat::Csv); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_dataset("id,v0,v1\na,1\n", DatasetFormat::Csv); }), ErrorCode::DimensionMismatch);
  EXPECT_EQ(code_of([] { parse_dataset("name,v0\na,1\n", DatasetFormat::Csv); }), ErrorCode::MalformedRow);
}

TEST(WriteDataset, RoundTripsBothFormats) {
  std::vector<FeatureVector> rows{fv("a", {0.1, -2.5}), fv("b", {1e-300, 3.0})};
  rows[0].day = 1;
  rows[0].label = 0;
  rows[1].day = 2;
  rows[1].label = 1;
  for (auto fmt : {DatasetFormat::Ndjson, DatasetFormat::Csv}) {
    std::ostringstream out;
    write_dataset(out, rows, fmt);
    EXPECT_EQ(parse_dataset(out.str(), fmt), rows);
  }
}

TEST(FitBaseline, SquareCornersExample) {
  const std::vector<FeatureVector> train{fv("a", {0, 0}), fv("b", {2, 0}), fv("c", {0, 2}), fv("d", {2, 2})};
  const auto b = fit_baseline(train, MetricKind::Mahalanobis, 0.0);
  EXPECT_DOUBLE_EQ(b.mean()(0), 1.0);
  EXPECT_DOUBLE_EQ(b.mean()(1), 1.0);
  ASSERT_TRUE(b.covariance().has_value());
  const auto& s = *b.covariance();
  EXPECT_NEAR(s(0, 0), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(s(1, 1), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-15);
  EXPECT_EQ(b.n_samples(), 4u);
}

TEST(FitBaseline, LambdaIsRelativeToMeanVariance) {
  const std::vector<FeatureVector> train{fv("a", {0, 0}), fv("b", {2, 0}), fv("c", {0, 2}), fv("d", {2, 2})};
  const auto b = fit_baseline(train, MetricKind::Mahalanobis, 0.5);
  EXPECT_NEAR(b.lambda(), 0.5 * 4.0 / 3.0, 1e-15);
  EXPECT_NEAR((*b.covariance())(0, 0), 4.0 / 3.0 + b.lambda(), 1e-15);
}

TEST(FitBaseline, MatchesBruteForceCovariance) {
  const auto train = oracle::gaussian_rows(300, 5, 17);
  const auto b = fit_baseline(train, MetricKind::Mahalanobis, 0.0);
  const auto rows = oracle::values_of(train);
  const auto mu = oracle::mean(rows);
  const auto s = oracle::covariance(rows);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(b.mean()(i), mu[i], 1e-14);
    for (int j = 0; j < 5; ++j) EXPECT_NEAR((*b.covariance())(i, j), s[i][j], 1e-13);
  }
}

TEST(FitBaseline, IdenticalVectorsGiveZeroSigma) {
  const std::vector<FeatureVector> train{fv("a", {1, 2}), fv("b", {1, 2}), fv("c", {1, 2})};
  const auto b = fit_baseline(train, MetricKind::CosineSimilarity, kDefaultLambdaRel);
  EXPECT_EQ(b.stats().sigma, 0.0);
  EXPECT_DOUBLE_EQ(b.stats().mu, 1.0);
}

TEST(FitBaseline, Preconditions) {
  EXPECT_EQ(code_of([] { fit_baseline({}, MetricKind::CosineSimilarity, 0.0); }), ErrorCode::EmptyTrainingSet);
  const std::vector<FeatureVector> one{fv("a", {1, 2})};
  EXPECT_EQ(code_of([&] { fit_baseline(one, MetricKind::Mahalanobis, 1e-6); }), ErrorCode::InsufficientSamples);
  const std::vector<FeatureVector> collinear{fv("a", {1, 1}), fv("b", {2, 2}), fv("c", {3, 3})};
  EXPECT_EQ(code_of([&] { fit_baseline(collinear, MetricKind::Mahalanobis, 0.0); }), ErrorCode::SingularCovariance);
  const std::vector<FeatureVector> ragged{fv("a", {1, 1}), fv("b", {2})};
  EXPECT_EQ(code_of([&] { fit_baseline(ragged, MetricKind::CosineSimilarity, 0.0); }), ErrorCode::DimensionMismatch);
}

TEST(FitBaseline, MetricStatsAreSampleMoments) {
  const auto train = oracle::gaussian_rows(200, 4, 23, 1.0);
  const auto b = fit_baseline(train, MetricKind::CosineSimilarity, 0.0);
  std::vector<double> m(4);
  for (int j = 0; j < 4; ++j) m[j] = b.mean()(j);
  double mm = 0;
  for (double v : m) mm += v * v;
  std::vector<double> scores;
  for (const auto& v : train) {
    double dot = 0, xx = 0;
    for (int j = 0; j < 4; ++j) {
      dot += v.values[j] * m[j];
      xx += v.values[j] * v.values[j];
    }
    scores.push_back(dot / std::sqrt(xx * mm));
  }
  double mu = 0;
  for (double s : scores) mu += s;
  mu /= scores.size();
  double ss = 0;
  for (double s : scores) ss += (s - mu) * (s - mu);
  EXPECT_NEAR(b.stats().mu, mu, 1e-12);
  EXPECT_NEAR(b.stats().sigma, std::sqrt(ss / (scores.size() - 1)), 1e-12);
}

// Properties

TEST(FitBaselineProperty, PermutationInvariantUnderCanonicalOrder) {
  auto train = oracle::gaussian_rows(500, 6, 31);
  const auto a = fit_baseline(train, MetricKind::Mahalanobis, 1e-6);
  Xoshiro256 rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    shuffle(train, rng);
    const auto b = fit_baseline(train, MetricKind::Mahalanobis, 1e-6);
    EXPECT_EQ(a, b);
  }
}

TEST(FitBaselineProperty, ConvergesToStandardNormal) {
  const std::size_t n = 10000;
  const auto train = oracle::gaussian_rows(n, 8, 2024);
  const auto b = fit_baseline(train, MetricKind::Mahalanobis, 0.0);
  EXPECT_LT(b.mean().cwiseAbs().maxCoeff(), 5.0 / std::sqrt(static_cast<double>(n)));
  const Eigen::MatrixXd err = *b.covariance() - Eigen::MatrixXd::Identity(8, 8);
  EXPECT_LT(err.cwiseAbs().maxCoeff(), 10.0 / std::sqrt(static_cast<double>(n)));
}

TEST(FitBaselineProperty, RegularizedCovarianceIsPositiveDefinite) {
  Xoshiro256 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    // Rank-deficient data: fewer samples than dimensions.
    const std::size_t d = 3 + bounded(rng, 6);
    const std::size_t n = 2 + bounded(rng, d - 1);
    const auto train = oracle::gaussian_rows(n, d, 1000 + trial);
    const auto b = fit_baseline(train, MetricKind::Mahalanobis, 1e-3);
    Eigen::LLT<Eigen::MatrixXd> llt(*b.covariance());
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(BaselineIo, RoundTripIsExact) {
  for (auto metric : {MetricKind::Mahalanobis, MetricKind::CosineSimilarity}) {
    const auto train = oracle::gaussian_rows(100, 7, 5, 0.3);
    const auto b = fit_baseline(train, metric, 1e-6);
    const auto text = baseline_to_json(b).dump(2);
    const auto back = baseline_from_json(nlohmann::ordered_json::parse(text));
    EXPECT_EQ(b, back);
    EXPECT_EQ(baseline_to_json(back).dump(2), text);
  }
}

TEST(BaselineIo, RejectsBadDocuments) {
  const auto train = oracle::gaussian_rows(10, 3, 5);
  auto doc = baseline_to_json(fit_baseline(train, MetricKind::Mahalanobis, 1e-6));
  auto wrong_version = doc;
  wrong_version["format_version"] = 99;
  EXPECT_THROW(baseline_from_json(wrong_version), Error);
  auto short_mean = doc;
  short_mean["mean"].erase(0);
  EXPECT_THROW(baseline_from_json(short_mean), Error);
  auto no_cov = doc;
  no_cov.erase("covariance");
  EXPECT_THROW(baseline_from_json(no_cov), Error);
}

TEST(MetricKindNames, RoundTrip) {
  for (auto m : {MetricKind::Mahalanobis, MetricKind::CosineSimilarity}) {
    EXPECT_EQ(metric_from_string(to_string(m)), m);
  }
  EXPECT_THROW(metric_from_string("euclid"), Error);
}
