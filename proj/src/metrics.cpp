#include "spcdrift/metrics.hpp"

#include "spcdrift/error.hpp"
#include "spcdrift/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace spcdrift {

namespace {

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> x) {
  return {x.data(), static_cast<Eigen::Index>(x.size())};
}

void check_dim(std::span<const double> x, const BaselineProfile& baseline) {
  if (x.size() != baseline.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "vector has dimension " + std::to_string(x.size()) +
                                                  ", baseline has " + std::to_string(baseline.dim()));
  }
}

}  // namespace

MetricValue mahalanobis(std::span<const double> x, const BaselineProfile& baseline) {
  check_dim(x, baseline);
  const auto* llt = baseline.cholesky();
  if (llt == nullptr) throw Error(ErrorCode::MissingCovariance, "baseline has no covariance");
  // With S = L L^T the quadratic form is |L^-1 (x - mean)|^2, a sum of
  // squares, so it cannot go negative through rounding.
  const Eigen::VectorXd diff = as_vector(x) - baseline.mean();
  const Eigen::VectorXd z = llt->matrixL().solve(diff);
  return {MetricKind::Mahalanobis, std::sqrt(z.squaredNorm())};
}

MetricValue mahalanobis(const FeatureVector& x, const BaselineProfile& baseline) {
  return mahalanobis(std::span<const double>(x.values), baseline);
}

MetricValue cosine_similarity(std::span<const double> x, const BaselineProfile& baseline) {
  check_dim(x, baseline);
  const auto v = as_vector(x);
  const double xx = v.squaredNorm();
  const double mm = baseline.mean().squaredNorm();
  if (xx == 0.0) throw Error(ErrorCode::ZeroVector, "test vector has zero norm");
  if (mm == 0.0) throw Error(ErrorCode::ZeroVector, "baseline mean has zero norm");
  // sqrt(xx * mm) is exact when x and the mean coincide; fall back to the
  // product of norms when the product leaves the normal range.
  const double prod = xx * mm;
  const double denom = std::isnormal(prod) ? std::sqrt(prod) : std::sqrt(xx) * std::sqrt(mm);
  const double cs = v.dot(baseline.mean()) / denom;
  return {MetricKind::CosineSimilarity, std::clamp(cs, -1.0, 1.0)};
}

MetricValue cosine_similarity(const FeatureVector& x, const BaselineProfile& baseline) {
  return cosine_similarity(std::span<const double>(x.values), baseline);
}

MetricValue score(const FeatureVector& x, const BaselineProfile& baseline, MetricKind metric) {
  return metric == MetricKind::Mahalanobis ? mahalanobis(x, baseline)
                                           : cosine_similarity(x, baseline);
}

std::vector<MetricValue> score_batch(std::span<const FeatureVector> items,
                                     const BaselineProfile& baseline, MetricKind metric) {
  std::vector<MetricValue> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    try {
      out.push_back(score(item, baseline, metric));
    } catch (const Error& e) {
      throw Error(e.code(), "item '" + item.id + "': " + e.detail());
    }
  }
  return out;
}

void write_scores_csv(std::ostream& out, std::span<const FeatureVector> items,
                      std::span<const MetricValue> values) {
  out << "id,metric,value\n";
  for (std::size_t i = 0; i < items.size() && i < values.size(); ++i) {
    out << items[i].id << ',' << to_string(values[i].kind) << ',' << format_real(values[i].value)
        << '\n';
  }
}

}  // namespace spcdrift
