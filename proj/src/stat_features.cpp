#include "spcdrift/stat_features.hpp"

#include "spcdrift/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace spcdrift {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0 || pixels_.empty()) {
    throw Error(ErrorCode::EmptyImage, "image has no pixels");
  }
  if (width_ * height_ != pixels_.size()) {
    throw Error(ErrorCode::InvalidConfig, "width x height differs from the pixel count");
  }
  for (double p : pixels_) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw Error(ErrorCode::NonFiniteValue, "pixel outside [0, 1]");
    }
  }
}

GrayImage GrayImage::from_samples(std::size_t width, std::size_t height,
                                  std::span<const std::uint16_t> samples, unsigned bit_depth) {
  if (bit_depth == 0 || bit_depth > 16) {
    throw Error(ErrorCode::InvalidConfig, "bit depth must be in 1..16");
  }
  const double max_value = static_cast<double>((1u << bit_depth) - 1u);
  std::vector<double> pixels;
  pixels.reserve(samples.size());
  for (auto s : samples) {
    if (s > max_value) throw Error(ErrorCode::NonFiniteValue, "sample exceeds the declared bit depth");
    pixels.push_back(static_cast<double>(s) / max_value);
  }
  return GrayImage(width, height, std::move(pixels));
}

ZeroOrderStats zero_order_stats(const GrayImage& img) {
  const auto px = img.pixels();
  if (px.size() < 2) throw Error(ErrorCode::EmptyImage, "need at least 2 pixels");
  const double n = static_cast<double>(px.size());
  double sum = 0.0;
  for (double p : px) sum += p;
  const double mean = sum / n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double p : px) {
    const double d = p - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  ZeroOrderStats out{mean, std::sqrt(m2), 0.0, 0.0};
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.kurtosis = m4 / (m2 * m2);
  }
  return out;
}

GlcmMatrix glcm(const GrayImage& img, std::size_t levels) {
  if (levels < 2) throw Error(ErrorCode::InvalidConfig, "GLCM needs at least 2 levels");
  if (img.width() < 2 || img.height() < 2) {
    throw Error(ErrorCode::ImageTooSmall, "GLCM needs an image of at least 2x2 pixels");
  }
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  std::vector<std::size_t> q(w * h);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto bin = static_cast<std::size_t>(std::floor(img.pixels()[i] * static_cast<double>(levels)));
    q[i] = std::min(bin, levels - 1);
  }

  // Summing the raw counts of all eight offsets is the average of the
  // directional matrices up to the final normalization.
  GlcmMatrix m{levels, std::vector<double>(levels * levels, 0.0), true};
  double total = 0.0;
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const std::size_t y0 = dy < 0 ? 1 : 0;
      const std::size_t y1 = dy > 0 ? h - 1 : h;
      const std::size_t x0 = dx < 0 ? 1 : 0;
      const std::size_t x1 = dx > 0 ? w - 1 : w;
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) {
          const std::size_t a = q[y * w + x];
          const auto ny = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(y) + dy);
          const auto nx = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + dx);
          const std::size_t b = q[ny * w + nx];
          m.cells[a * levels + b] += 1.0;
          total += 1.0;
        }
      }
    }
  }
  for (double& c : m.cells) c /= total;
  return m;
}

GlcmFeatures glcm_features(const GlcmMatrix& m) {
  if (m.levels == 0 || m.cells.size() != m.levels * m.levels) {
    throw Error(ErrorCode::InvalidConfig, "GLCM cell count differs from levels^2");
  }
  double sum = 0.0;
  for (double c : m.cells) sum += c;
  if (!m.normalized || std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::NotNormalized, "GLCM entries must sum to 1");
  }
  const std::size_t L = m.levels;
  double mu_i = 0.0;
  double mu_j = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      mu_i += static_cast<double>(i) * m.at(i, j);
      mu_j += static_cast<double>(j) * m.at(i, j);
    }
  }
  GlcmFeatures f{0.0, 0.0, 0.0, 0.0, 0.0};
  double var_i = 0.0;
  double var_j = 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      const double p = m.at(i, j);
      if (p == 0.0) continue;
      const double di = static_cast<double>(i) - mu_i;
      const double dj = static_cast<double>(j) - mu_j;
      const double diff = static_cast<double>(i) - static_cast<double>(j);
      f.contrast += p * diff * diff;
      f.homogeneity += p / (1.0 + diff * diff);
      f.energy += p * p;
      f.entropy -= p * std::log2(p);
      var_i += p * di * di;
      var_j += p * dj * dj;
      cov += p * di * dj;
    }
  }
  if (var_i > 0.0 && var_j > 0.0) f.correlation = cov / std::sqrt(var_i * var_j);
  return f;
}

}  // namespace spcdrift
