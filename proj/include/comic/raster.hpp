#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace comic {

/// M x N x C image cube, row-major, band-interleaved by pixel. Values are
/// finite 32-bit floats; the constructor rejects anything else.
class Raster {
 public:
  Raster(std::size_t height, std::size_t width, std::size_t channels);
  Raster(std::size_t height, std::size_t width, std::size_t channels, std::vector<float> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t channels() const { return channels_; }
  std::size_t pixels() const { return height_ * width_; }

  float at(std::size_t m, std::size_t n, std::size_t c) const {
    return data_[(m * width_ + n) * channels_ + c];
  }
  /// Band vector of the pixel with flat index `p = m * width + n`.
  std::span<const float> pixel(std::size_t p) const {
    return {data_.data() + p * channels_, channels_};
  }
  std::span<const float> data() const { return data_; }
  std::vector<float> channel(std::size_t c) const;

  bool same_grid(const Raster& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t channels_;
  std::vector<float> data_;
};

/// Per-pixel {0,1} map; 1 marks a changed pixel.
struct BinaryMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> values;

  BinaryMap() = default;
  BinaryMap(std::size_t h, std::size_t w, std::uint8_t fill = 0) : height(h), width(w), values(h * w, fill) {}

  std::size_t count_ones() const;
  friend bool operator==(const BinaryMap&, const BinaryMap&) = default;
};

// ---------------------------------------------------------------------------
// Container format: `<base>.hdr.json` holds
//   {"m":int,"n":int,"c":int,"dtype":"f32le"|"u32le"|"u8","layout":...}
// and `<base>.<f32|u32|u8>` holds the little-endian payload.
// ---------------------------------------------------------------------------

struct ContainerHeader {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t c = 0;
  std::string dtype;
  std::string layout;
};

/// Strips a trailing ".hdr.json", ".f32", ".u32" or ".u8" so either the base
/// name or one of the two member files can be passed.
std::filesystem::path container_base(const std::filesystem::path& path);
std::filesystem::path header_path(const std::filesystem::path& base);
std::filesystem::path payload_path(const std::filesystem::path& base, const std::string& dtype);

void write_container(const std::filesystem::path& path, const ContainerHeader& header,
                     std::span<const std::uint8_t> payload);
/// Reads header and payload; the payload size is checked against the header.
std::vector<std::uint8_t> read_container(const std::filesystem::path& path, ContainerHeader& header);

Raster load_raster(const std::filesystem::path& path);
void save_raster(const Raster& raster, const std::filesystem::path& path);

BinaryMap load_binary_map(const std::filesystem::path& path);
void save_binary_map(const BinaryMap& map, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Principal components of the per-pixel band vectors.
// ---------------------------------------------------------------------------

struct PcaBasis {
  std::vector<double> mean;                // C
  std::vector<double> loadings;            // C x k, column j = component j
  std::vector<double> explained_variance;  // k, non-increasing
  double total_variance = 0.0;             // trace of the C x C covariance
  std::size_t input_channels = 0;
  std::size_t components = 0;

  double loading(std::size_t band, std::size_t component) const {
    return loadings[band * components + component];
  }
};

/// Covariance eigendecomposition of the mean-centred pixels. Components are
/// sorted by descending variance and signed so the largest-magnitude loading
/// is positive.
PcaBasis fit_pca(const Raster& raster, std::size_t k);
Raster apply_pca(const Raster& raster, const PcaBasis& basis);
Raster pca_reduce(const Raster& raster, std::size_t k);

/// Binary PGM (P5, maxval 255). Values are min-max scaled with
/// round-half-away-from-zero; a constant map is written as all zeros.
void export_graymap(std::span<const double> values, std::size_t height, std::size_t width,
                    const std::filesystem::path& path);
std::vector<std::uint8_t> scale_to_gray(std::span<const double> values);

}  // namespace comic
