#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spcdrift {

/// One item's feature representation. `label` is ground truth where known
/// (1 = out-of-distribution, 0 = in-distribution).
struct FeatureVector {
  std::string id;
  std::optional<std::uint32_t> day;
  std::optional<int> label;
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

enum class MetricKind { CosineSimilarity, Mahalanobis };

/// "cosine" / "mahalanobis", as used in every file format.
std::string_view to_string(MetricKind kind);
MetricKind metric_from_string(std::string_view name);

/// Control statistics of the chosen metric over the training set.
struct MetricStats {
  double mu = 0.0;
  double sigma = 0.0;

  friend bool operator==(const MetricStats&, const MetricStats&) = default;
};

/// Fitted in-distribution reference. Immutable once built, so one profile can
/// be shared by any number of concurrent scorers.
class BaselineProfile {
 public:
  /// Validates the parts and factorizes the covariance (when present).
  /// Throws SingularCovariance if the covariance is not positive definite.
  static BaselineProfile assemble(MetricKind metric, Eigen::VectorXd mean,
                                  std::optional<Eigen::MatrixXd> covariance, double lambda,
                                  std::size_t n_samples, MetricStats stats);

  BaselineProfile with_stats(MetricStats stats) const;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }
  MetricKind metric() const noexcept { return metric_; }
  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const std::optional<Eigen::MatrixXd>& covariance() const noexcept { return covariance_; }
  /// Derived output for inspection; scoring goes through the factorization.
  const std::optional<Eigen::MatrixXd>& covariance_inverse() const noexcept {
    return covariance_inverse_;
  }
  const Eigen::LLT<Eigen::MatrixXd>* cholesky() const noexcept {
    return cholesky_ ? &*cholesky_ : nullptr;
  }
  double lambda() const noexcept { return lambda_; }
  std::size_t n_samples() const noexcept { return n_samples_; }
  const MetricStats& stats() const noexcept { return stats_; }

  /// Field-by-field exact comparison of the persisted fields.
  friend bool operator==(const BaselineProfile& a, const BaselineProfile& b);

 private:
  BaselineProfile() = default;

  MetricKind metric_ = MetricKind::CosineSimilarity;
  Eigen::VectorXd mean_;
  std::optional<Eigen::MatrixXd> covariance_;
  std::optional<Eigen::MatrixXd> covariance_inverse_;
  std::optional<Eigen::LLT<Eigen::MatrixXd>> cholesky_;
  double lambda_ = 0.0;
  std::size_t n_samples_ = 0;
  MetricStats stats_;
};

inline constexpr double kDefaultLambdaRel = 1e-6;

/// Fits mean, regularized covariance (Mahalanobis only) and the metric's
/// control statistics. Summation runs in id order, so the result does not
/// depend on the order of `train`.
BaselineProfile fit_baseline(std::span<const FeatureVector> train, MetricKind metric,
                             double lambda_rel = kDefaultLambdaRel);

enum class DatasetFormat { Ndjson, Csv };

/// Picks the format from the file extension (.csv, otherwise NDJSON).
DatasetFormat format_for_path(std::string_view path);

std::vector<FeatureVector> parse_dataset(std::istream& in, DatasetFormat format);
std::vector<FeatureVector> parse_dataset(std::string_view text, DatasetFormat format);
std::vector<FeatureVector> load_dataset(const std::string& path);

/// CSV output includes the `day` / `label` columns only if every vector has one.
void write_dataset(std::ostream& out, std::span<const FeatureVector> items, DatasetFormat format);

/// Human-readable description of the two embedding formats (used by --help).
std::string_view dataset_schema_help();

}  // namespace spcdrift
