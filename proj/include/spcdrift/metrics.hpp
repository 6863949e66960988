#pragma once

#include "spcdrift/feature_model.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace spcdrift {

/// Cosine values lie in [-1, 1], Mahalanobis values are >= 0.
struct MetricValue {
  MetricKind kind;
  double value;
};

/// sqrt((x - mean)^T S^-1 (x - mean)), evaluated through the Cholesky factor.
MetricValue mahalanobis(std::span<const double> x, const BaselineProfile& baseline);
MetricValue mahalanobis(const FeatureVector& x, const BaselineProfile& baseline);

/// Cosine of the angle between x and the baseline mean, clamped to [-1, 1].
MetricValue cosine_similarity(std::span<const double> x, const BaselineProfile& baseline);
MetricValue cosine_similarity(const FeatureVector& x, const BaselineProfile& baseline);

MetricValue score(const FeatureVector& x, const BaselineProfile& baseline, MetricKind metric);

/// Element i is score(items[i]); errors are rethrown with the item id attached.
std::vector<MetricValue> score_batch(std::span<const FeatureVector> items,
                                     const BaselineProfile& baseline, MetricKind metric);

/// `id,metric,value` with 17 significant digits.
void write_scores_csv(std::ostream& out, std::span<const FeatureVector> items,
                      std::span<const MetricValue> values);

}  // namespace spcdrift
