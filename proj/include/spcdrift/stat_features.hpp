#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spcdrift {

/// Grayscale image with row-major intensities in [0, 1].
class GrayImage {
 public:
  /// Throws EmptyImage for zero pixels, InvalidConfig on a size mismatch and
  /// NonFiniteValue for pixels outside [0, 1].
  GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels);

  /// Integer samples of the given bit depth, normalized by (2^depth - 1).
  static GrayImage from_samples(std::size_t width, std::size_t height,
                                std::span<const std::uint16_t> samples, unsigned bit_depth);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::span<const double> pixels() const noexcept { return pixels_; }
  double at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> pixels_;
};

/// Binary PGM (P5), 8- or 16-bit.
GrayImage parse_pgm(std::span<const unsigned char> bytes);
GrayImage read_pgm(const std::string& path);

/// Headerless samples (1 byte per pixel for depth <= 8, else 2 bytes
/// little-endian), dimensions supplied by the caller.
GrayImage read_raw(const std::string& path, std::size_t width, std::size_t height,
                   unsigned bit_depth);

struct ZeroOrderStats {
  double mean;
  double std_dev;   // population (divide by N)
  double skewness;  // m3 / m2^1.5, 0 when m2 == 0
  double kurtosis;  // m4 / m2^2, non-excess, 0 when m2 == 0

  std::vector<double> values() const { return {mean, std_dev, skewness, kurtosis}; }
};

ZeroOrderStats zero_order_stats(const GrayImage& img);

struct GlcmMatrix {
  std::size_t levels = 0;
  std::vector<double> cells;  // levels x levels, row-major
  bool normalized = false;

  double at(std::size_t i, std::size_t j) const noexcept { return cells[i * levels + j]; }
};

inline constexpr std::size_t kDefaultGlcmLevels = 256;

/// Co-occurrence matrix averaged over the 8 unit-offset neighbour directions
/// and normalized to sum 1. Pixels quantize to min(floor(p * levels), levels - 1).
GlcmMatrix glcm(const GrayImage& img, std::size_t levels = kDefaultGlcmLevels);

struct GlcmFeatures {
  double contrast;
  double homogeneity;
  double energy;
  double correlation;
  double entropy;  // bits

  std::vector<double> values() const { return {contrast, homogeneity, energy, correlation, entropy}; }
};

GlcmFeatures glcm_features(const GlcmMatrix& m);

}  // namespace spcdrift
