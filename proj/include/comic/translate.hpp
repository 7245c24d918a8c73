#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "comic/raster.hpp"

namespace comic {

enum class TranslationMethod { HistogramMatch, LinearRegress };

std::string_view to_string(TranslationMethod method);
TranslationMethod parse_translation_method(std::string_view s);

struct TranslationSpec {
  TranslationMethod method = TranslationMethod::HistogramMatch;
  /// Source channel of each output channel; empty means cyclic (c mod C_X).
  std::vector<std::size_t> channel_map;
};

/// Maps x onto y's channel count and per-channel marginals.
///
/// histogram_match: the k-th smallest source value takes the k-th smallest
/// target value; a run of tied source values shares the target quantile at
/// the run's middle rank (linear interpolation for half ranks), so a constant
/// channel maps to the target median.
///
/// linear_regress: least-squares affine map of sorted source onto sorted
/// target, applied pixelwise; a constant source maps to the target median.
Raster translate_baseline(const Raster& x, const Raster& y, const TranslationSpec& spec = {});

/// Single-channel histogram matching of `source` onto the distribution of `target`.
std::vector<double> histogram_match(const std::vector<double>& source, const std::vector<double>& target);

}  // namespace comic
