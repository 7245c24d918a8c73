#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "comic/copula.hpp"
#include "comic/raster.hpp"

namespace comic {

enum class ChangeShape { Rectangle, Blobs };

std::string_view to_string(ChangeShape shape);
ChangeShape parse_change_shape(std::string_view s);

struct SynthConfig {
  std::size_t m = 128;
  std::size_t n = 128;
  std::size_t cx = 1;
  std::size_t cy = 1;
  CopulaMixtureModel model;
  double change_fraction = 0.1;
  ChangeShape change_shape = ChangeShape::Rectangle;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthPair {
  Raster x;
  Raster y;
  BinaryMap gt;
};

/// Pixel pairs (u, v) are drawn from the model, v is redrawn uniformly inside
/// the change mask, both fields are averaged over a 5x5 box (clipped at the
/// border) and mapped to intensities:
///   X_c = 255 * u^(1 + c/2),  Y_c = 255 * L_c(v),
/// where L_c is logistic((1 + c/2) t) rescaled to map [0,1] onto [0,1].
/// Optional N(0, (255 sigma)^2) noise is added per pixel and channel.
SynthPair generate_pair(const SynthConfig& cfg);

/// Change mask alone; rectangle area is floor(fraction * m * n) up to rounding.
BinaryMap change_mask(const SynthConfig& cfg);

}  // namespace comic
