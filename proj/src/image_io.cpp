#include "spcdrift/error.hpp"
#include "spcdrift/io_util.hpp"
#include "spcdrift/stat_features.hpp"

#include <cctype>

namespace spcdrift {

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::size_t header_number() {
    skip_space_and_comments();
    std::size_t value = 0;
    bool any = false;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      any = true;
      ++pos_;
    }
    if (!any) throw Error(ErrorCode::MalformedRow, "PGM: expected a number in the header");
    return value;
  }

  void expect_magic() {
    if (bytes_.size() < 2 || bytes_[0] != 'P' || bytes_[1] != '5') {
      throw Error(ErrorCode::MalformedRow, "PGM: only binary P5 files are supported");
    }
    pos_ = 2;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::span<const unsigned char> raster() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::MalformedRow, "PGM: missing whitespace before raster");
    }
    return bytes_.subspan(pos_ + 1);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(std::span<const unsigned char> bytes) {
  PgmReader reader(bytes);
  reader.expect_magic();
  const auto width = reader.header_number();
  const auto height = reader.header_number();
  const auto maxval = reader.header_number();
  if (maxval == 0 || maxval > 65535) throw Error(ErrorCode::MalformedRow, "PGM: maxval out of range");
  const auto raster = reader.raster();
  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  const std::size_t count = width * height;
  if (raster.size() < count * bytes_per_sample) {
    throw Error(ErrorCode::MalformedRow, "PGM: raster is truncated");
  }
  std::vector<double> pixels(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t sample = bytes_per_sample == 1
                                   ? raster[i]
                                   : (static_cast<std::size_t>(raster[2 * i]) << 8) | raster[2 * i + 1];
    if (sample > maxval) throw Error(ErrorCode::MalformedRow, "PGM: sample exceeds maxval");
    pixels[i] = static_cast<double>(sample) / static_cast<double>(maxval);
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage read_pgm(const std::string& path) {
  const std::string data = read_file(path);
  try {
    return parse_pgm({reinterpret_cast<const unsigned char*>(data.data()), data.size()});
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.detail());
  }
}

GrayImage read_raw(const std::string& path, std::size_t width, std::size_t height,
                   unsigned bit_depth) {
  const std::string data = read_file(path);
  const std::size_t bytes_per_sample = bit_depth <= 8 ? 1 : 2;
  const std::size_t count = width * height;
  if (data.size() != count * bytes_per_sample) {
    throw Error(ErrorCode::MalformedRow, path + ": expected " + std::to_string(count * bytes_per_sample) +
                                             " bytes, found " + std::to_string(data.size()));
  }
  std::vector<std::uint16_t> samples(count);
  const auto* raw = reinterpret_cast<const unsigned char*>(data.data());
  for (std::size_t i = 0; i < count; ++i) {
    samples[i] = bytes_per_sample == 1
                     ? raw[i]
                     : static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
  }
  return GrayImage::from_samples(width, height, samples, bit_depth);
}

}  // namespace spcdrift
