#include "spcdrift/feature_model.hpp"

#include "spcdrift/error.hpp"
#include "spcdrift/io_util.hpp"
#include "spcdrift/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace spcdrift {

std::string_view to_string(MetricKind kind) {
  return kind == MetricKind::Mahalanobis ? "mahalanobis" : "cosine";
}

MetricKind metric_from_string(std::string_view name) {
  if (name == "cosine") return MetricKind::CosineSimilarity;
  if (name == "mahalanobis") return MetricKind::Mahalanobis;
  throw Error(ErrorCode::InvalidConfig, "unknown metric '" + std::string(name) + "'");
}

BaselineProfile BaselineProfile::assemble(MetricKind metric, Eigen::VectorXd mean,
                                          std::optional<Eigen::MatrixXd> covariance,
                                          double lambda, std::size_t n_samples,
                                          MetricStats stats) {
  const auto d = mean.size();
  if (d == 0) throw Error(ErrorCode::InvalidConfig, "baseline dimension must be positive");
  if (n_samples == 0) throw Error(ErrorCode::InvalidConfig, "n_samples must be positive");
  if (!mean.allFinite()) throw Error(ErrorCode::NonFiniteValue, "baseline mean is not finite");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda must be non-negative");
  if (!(stats.sigma >= 0.0) || !std::isfinite(stats.mu) || !std::isfinite(stats.sigma)) {
    throw Error(ErrorCode::InvalidConfig, "metric_stats must be finite with sigma >= 0");
  }
  if (metric == MetricKind::Mahalanobis && !covariance) {
    throw Error(ErrorCode::MissingCovariance, "Mahalanobis baseline requires a covariance");
  }

  BaselineProfile p;
  p.metric_ = metric;
  p.mean_ = std::move(mean);
  p.lambda_ = lambda;
  p.n_samples_ = n_samples;
  p.stats_ = stats;
  if (covariance) {
    if (covariance->rows() != d || covariance->cols() != d) {
      throw Error(ErrorCode::DimensionMismatch, "covariance must be " + std::to_string(d) + "x" +
                                                    std::to_string(d));
    }
    if (!covariance->allFinite()) {
      throw Error(ErrorCode::NonFiniteValue, "covariance is not finite");
    }
    const double scale = std::max(covariance->cwiseAbs().maxCoeff(), 1e-300);
    if ((*covariance - covariance->transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw Error(ErrorCode::InvalidConfig, "covariance is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(*covariance);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularCovariance,
                  "covariance is not positive definite (degenerate or collinear features; "
                  "increase lambda_rel)");
    }
    p.covariance_inverse_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
    p.cholesky_ = std::move(llt);
    p.covariance_ = std::move(covariance);
  }
  return p;
}

BaselineProfile BaselineProfile::with_stats(MetricStats stats) const {
  BaselineProfile copy = *this;
  if (!(stats.sigma >= 0.0)) throw Error(ErrorCode::InvalidConfig, "sigma must be non-negative");
  copy.stats_ = stats;
  return copy;
}

bool operator==(const BaselineProfile& a, const BaselineProfile& b) {
  if (a.metric_ != b.metric_ || a.lambda_ != b.lambda_ || a.n_samples_ != b.n_samples_ ||
      !(a.stats_ == b.stats_) || a.mean_.size() != b.mean_.size() || a.mean_ != b.mean_) {
    return false;
  }
  if (a.covariance_.has_value() != b.covariance_.has_value()) return false;
  return !a.covariance_ || *a.covariance_ == *b.covariance_;
}

namespace {

void check_finite(const FeatureVector& v) {
  for (double x : v.values) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "vector '" + v.id + "'");
  }
}

}  // namespace

BaselineProfile fit_baseline(std::span<const FeatureVector> train, MetricKind metric,
                             double lambda_rel) {
  if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training vectors");
  if (!(lambda_rel >= 0.0) || !std::isfinite(lambda_rel)) {
    throw Error(ErrorCode::InvalidConfig, "lambda_rel must be finite and non-negative");
  }
  const std::size_t n = train.size();
  const std::size_t d = train.front().dim();
  if (d == 0) throw Error(ErrorCode::DimensionMismatch, "vectors must have at least one component");
  for (const auto& v : train) {
    if (v.dim() != d) {
      throw Error(ErrorCode::DimensionMismatch, "vector '" + v.id + "' has dimension " +
                                                    std::to_string(v.dim()) + ", expected " +
                                                    std::to_string(d));
    }
    check_finite(v);
  }
  if (metric == MetricKind::Mahalanobis && n < 2) {
    throw Error(ErrorCode::InsufficientSamples, "Mahalanobis baseline needs at least 2 samples");
  }

  // Canonical order: by id, ties kept in input order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return train[a].id < train[b].id; });

  const auto di = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), di);
  for (std::size_t r = 0; r < n; ++r) {
    x.row(static_cast<Eigen::Index>(r)) =
        Eigen::Map<const Eigen::RowVectorXd>(train[order[r]].values.data(), di);
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(di);
  for (Eigen::Index r = 0; r < x.rows(); ++r) mean += x.row(r).transpose();
  mean /= static_cast<double>(n);

  std::optional<Eigen::MatrixXd> covariance;
  double lambda = 0.0;
  if (metric == MetricKind::Mahalanobis) {
    const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    Eigen::MatrixXd s = (centered.transpose() * centered) / static_cast<double>(n - 1);
    s = 0.5 * (s + s.transpose()).eval();
    lambda = lambda_rel * s.trace() / static_cast<double>(d);
    s.diagonal().array() += lambda;
    covariance = std::move(s);
  }

  const auto geometry =
      BaselineProfile::assemble(metric, std::move(mean), std::move(covariance), lambda, n, {});

  std::vector<double> scores(n);
  for (std::size_t r = 0; r < n; ++r) scores[r] = score(train[order[r]], geometry, metric).value;
  MetricStats stats;
  stats.mu = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double s : scores) ss += (s - stats.mu) * (s - stats.mu);
    stats.sigma = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return geometry.with_stats(stats);
}

DatasetFormat format_for_path(std::string_view path) {
  const auto dot = path.rfind('.');
  if (dot != std::string_view::npos) {
    std::string ext(path.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == "csv") return DatasetFormat::Csv;
  }
  return DatasetFormat::Ndjson;
}

namespace {

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

// Tracks the dataset-wide invariants while rows stream in.
class DatasetBuilder {
 public:
  void add(FeatureVector v, std::size_t line_no) {
    if (!dim_) dim_ = v.dim();
    if (v.dim() != *dim_) {
      throw Error(ErrorCode::DimensionMismatch, at_line(line_no) + "row " +
                                                    std::to_string(items_.size() + 1) + " has " +
                                                    std::to_string(v.dim()) + " values, expected " +
                                                    std::to_string(*dim_));
    }
    for (double x : v.values) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::NonFiniteValue, at_line(line_no) + "id '" + v.id + "'");
      }
    }
    if (!ids_.insert(v.id).second) {
      throw Error(ErrorCode::DuplicateId, at_line(line_no) + "id '" + v.id + "' already seen");
    }
    items_.push_back(std::move(v));
  }

  std::vector<FeatureVector> take() { return std::move(items_); }

 private:
  std::optional<std::size_t> dim_;
  std::unordered_set<std::string> ids_;
  std::vector<FeatureVector> items_;
};

FeatureVector parse_ndjson_row(std::string_view line, std::size_t line_no) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::out_of_range& e) {
    // Raised for numbers beyond the double range, e.g. 1e999.
    throw Error(ErrorCode::NonFiniteValue, at_line(line_no) + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedRow, at_line(line_no) + e.what());
  }
  auto malformed = [&](const std::string& what) {
    return Error(ErrorCode::MalformedRow, at_line(line_no) + what);
  };
  if (!obj.is_object()) throw malformed("expected a JSON object");

  FeatureVector v;
  const auto id = obj.find("id");
  if (id == obj.end() || !id->is_string()) throw malformed("missing string field 'id'");
  v.id = id->get<std::string>();

  if (const auto day = obj.find("day"); day != obj.end() && !day->is_null()) {
    if (!day->is_number_integer() || day->get<long long>() < 0 ||
        day->get<long long>() > std::numeric_limits<std::uint32_t>::max()) {
      throw malformed("'day' must be a non-negative integer");
    }
    v.day = static_cast<std::uint32_t>(day->get<long long>());
  }
  if (const auto label = obj.find("label"); label != obj.end() && !label->is_null()) {
    if (!label->is_number_integer() || (label->get<long long>() != 0 && label->get<long long>() != 1)) {
      throw malformed("'label' must be 0 or 1");
    }
    v.label = static_cast<int>(label->get<long long>());
  }
  const auto vec = obj.find("vec");
  if (vec == obj.end() || !vec->is_array() || vec->empty()) {
    throw malformed("missing non-empty array field 'vec'");
  }
  v.values.reserve(vec->size());
  for (const auto& x : *vec) {
    if (!x.is_number()) throw malformed("'vec' entries must be numbers");
    v.values.push_back(x.get<double>());
  }
  return v;
}

struct CsvLayout {
  bool has_day = false;
  bool has_label = false;
  std::size_t first_value = 1;
  std::size_t columns = 0;
};

CsvLayout parse_csv_header(std::string_view line, std::size_t line_no) {
  const auto cols = split_csv_line(line);
  CsvLayout layout;
  if (cols.empty() || cols[0] != "id") {
    throw Error(ErrorCode::MalformedRow, at_line(line_no) + "header must start with 'id'");
  }
  std::size_t c = 1;
  if (c < cols.size() && cols[c] == "day") {
    layout.has_day = true;
    ++c;
  }
  if (c < cols.size() && cols[c] == "label") {
    layout.has_label = true;
    ++c;
  }
  layout.first_value = c;
  if (c == cols.size()) {
    throw Error(ErrorCode::MalformedRow, at_line(line_no) + "header has no value columns");
  }
  for (std::size_t i = c; i < cols.size(); ++i) {
    if (cols[i] != "v" + std::to_string(i - c)) {
      throw Error(ErrorCode::MalformedRow, at_line(line_no) + "expected column 'v" +
                                               std::to_string(i - c) + "', got '" + cols[i] + "'");
    }
  }
  layout.columns = cols.size();
  return layout;
}

FeatureVector parse_csv_row(std::string_view line, std::size_t line_no, const CsvLayout& layout,
                            std::size_t row_no) {
  const auto fields = split_csv_line(line);
  if (fields.size() != layout.columns) {
    throw Error(ErrorCode::DimensionMismatch,
                at_line(line_no) + "row " + std::to_string(row_no) + " has " +
                    std::to_string(fields.size()) + " fields, header has " +
                    std::to_string(layout.columns));
  }
  FeatureVector v;
  v.id = fields[0];
  if (v.id.empty()) throw Error(ErrorCode::MalformedRow, at_line(line_no) + "empty id");
  std::size_t c = 1;
  if (layout.has_day) {
    const auto day = parse_integer(fields[c]);
    if (!day || *day < 0 || *day > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::MalformedRow, at_line(line_no) + "bad day '" + fields[c] + "'");
    }
    v.day = static_cast<std::uint32_t>(*day);
    ++c;
  }
  if (layout.has_label) {
    const auto label = parse_integer(fields[c]);
    if (!label || (*label != 0 && *label != 1)) {
      throw Error(ErrorCode::MalformedRow, at_line(line_no) + "bad label '" + fields[c] + "'");
    }
    v.label = static_cast<int>(*label);
    ++c;
  }
  v.values.reserve(fields.size() - c);
  for (; c < fields.size(); ++c) {
    const auto x = parse_real(fields[c]);
    if (!x) throw Error(ErrorCode::MalformedRow, at_line(line_no) + "bad number '" + fields[c] + "'");
    v.values.push_back(*x);
  }
  return v;
}

}  // namespace

std::vector<FeatureVector> parse_dataset(std::istream& in, DatasetFormat format) {
  DatasetBuilder builder;
  std::optional<CsvLayout> layout;
  std::string line;
  std::size_t line_no = 0;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    if (format == DatasetFormat::Ndjson) {
      builder.add(parse_ndjson_row(line, line_no), line_no);
    } else if (!layout) {
      layout = parse_csv_header(line, line_no);
    } else {
      builder.add(parse_csv_row(line, line_no, *layout, ++rows), line_no);
    }
  }
  return builder.take();
}

std::vector<FeatureVector> parse_dataset(std::string_view text, DatasetFormat format) {
  std::istringstream in{std::string(text)};
  return parse_dataset(in, format);
}

std::vector<FeatureVector> load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return parse_dataset(in, format_for_path(path));
}

void write_dataset(std::ostream& out, std::span<const FeatureVector> items, DatasetFormat format) {
  if (format == DatasetFormat::Ndjson) {
    for (const auto& v : items) {
      nlohmann::ordered_json row;
      row["id"] = v.id;
      if (v.day) row["day"] = *v.day;
      if (v.label) row["label"] = *v.label;
      row["vec"] = v.values;
      out << row.dump() << '\n';
    }
    return;
  }
  if (items.empty()) return;
  const bool with_day =
      std::all_of(items.begin(), items.end(), [](const auto& v) { return v.day.has_value(); });
  const bool with_label =
      std::all_of(items.begin(), items.end(), [](const auto& v) { return v.label.has_value(); });
  out << "id";
  if (with_day) out << ",day";
  if (with_label) out << ",label";
  for (std::size_t i = 0; i < items.front().dim(); ++i) out << ",v" << i;
  out << '\n';
  for (const auto& v : items) {
    out << v.id;
    if (with_day) out << ',' << *v.day;
    if (with_label) out << ',' << *v.label;
    for (double x : v.values) out << ',' << format_real(x);
    out << '\n';
  }
}

std::string_view dataset_schema_help() {
  return R"(Embedding file formats:
  NDJSON (.ndjson/.jsonl): one object per line, fields `id` (string, required),
    `day` (integer >= 0, optional), `label` (0 or 1, optional), `vec` (array of
    JSON numbers, required).
  CSV (.csv): header row `id[,day][,label],v0,v1,...,v{d-1}`; numbers in decimal
    or scientific notation.
  All vectors in one file share the same dimension d; ids are unique; values are
  finite. label 1 marks an out-of-distribution item.)";
}

}  // namespace spcdrift
