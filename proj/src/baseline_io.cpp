#include "spcdrift/baseline_io.hpp"

#include "spcdrift/error.hpp"
#include "spcdrift/io_util.hpp"

namespace spcdrift {

nlohmann::ordered_json baseline_to_json(const BaselineProfile& baseline) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["dim"] = baseline.dim();
  doc["metric"] = to_string(baseline.metric());
  doc["mean"] = std::vector<double>(baseline.mean().data(),
                                    baseline.mean().data() + baseline.mean().size());
  if (const auto& cov = baseline.covariance()) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(cov->size()));
    for (Eigen::Index r = 0; r < cov->rows(); ++r) {
      for (Eigen::Index c = 0; c < cov->cols(); ++c) flat.push_back((*cov)(r, c));
    }
    doc["covariance"] = std::move(flat);
  }
  doc["lambda"] = baseline.lambda();
  doc["n_samples"] = baseline.n_samples();
  doc["metric_stats"] = {{"mu", baseline.stats().mu}, {"sigma", baseline.stats().sigma}};
  return doc;
}

namespace {

template <typename T>
T required(const nlohmann::ordered_json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorCode::MalformedRow, std::string("baseline: missing '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, std::string("baseline: bad '") + key + "': " + e.what());
  }
}

}  // namespace

BaselineProfile baseline_from_json(const nlohmann::ordered_json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::MalformedRow, "baseline: expected a JSON object");
  const int version = required<int>(doc, "format_version");
  if (version != kFormatVersion) {
    throw Error(ErrorCode::MalformedRow, "baseline: unsupported format_version " + std::to_string(version));
  }
  const auto dim = required<std::size_t>(doc, "dim");
  const auto metric = metric_from_string(required<std::string>(doc, "metric"));
  const auto mean_values = required<std::vector<double>>(doc, "mean");
  if (mean_values.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "baseline: mean length differs from dim");
  }
  Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_values.data(),
                                                           static_cast<Eigen::Index>(dim));
  std::optional<Eigen::MatrixXd> covariance;
  if (doc.contains("covariance")) {
    const auto flat = required<std::vector<double>>(doc, "covariance");
    if (flat.size() != dim * dim) {
      throw Error(ErrorCode::DimensionMismatch, "baseline: covariance must have dim*dim entries");
    }
    const auto di = static_cast<Eigen::Index>(dim);
    covariance = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        flat.data(), di, di);
  }
  const auto& stats_doc = doc.at("metric_stats");
  MetricStats stats{required<double>(stats_doc, "mu"), required<double>(stats_doc, "sigma")};
  return BaselineProfile::assemble(metric, std::move(mean), std::move(covariance),
                                   required<double>(doc, "lambda"),
                                   required<std::size_t>(doc, "n_samples"), stats);
}

void save_baseline(const std::string& path, const BaselineProfile& baseline) {
  write_file(path, baseline_to_json(baseline).dump(2) + "\n");
}

BaselineProfile load_baseline(const std::string& path) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, "baseline '" + path + "': " + e.what());
  }
  return baseline_from_json(doc);
}

}  // namespace spcdrift
