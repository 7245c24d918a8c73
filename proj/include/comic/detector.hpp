#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "comic/model_set.hpp"
#include "comic/raster.hpp"
#include "comic/segmentation.hpp"

namespace comic {

/// T[i][c1][c2] = -log copula density of superpixel i under pair (c1, c2).
struct StatTensor {
  std::size_t superpixels = 0;
  std::size_t channels_x = 0;
  std::size_t channels_y = 0;
  std::vector<double> values;  // [i][c1][c2] row-major

  double operator()(std::size_t i, std::size_t c1, std::size_t c2) const {
    return values[(i * channels_x + c1) * channels_y + c2];
  }
};

struct DifferenceMap {
  std::vector<double> di;        // max over channel pairs
  std::vector<double> centered;  // di - mean(di)
};

/// Rows are r_i = [h_X(i, .), h_Y(i, .), alpha * centered_DI_i].
struct RepVectors {
  std::size_t rows = 0;
  std::size_t dims = 0;
  std::vector<double> values;
};

struct KMeansResult {
  std::vector<std::size_t> assignment;
  std::vector<double> centroids;  // k x dims
  std::size_t iterations = 0;
};

/// Test statistics on test-time features using the training marginals and
/// the fitted models; parallel over superpixels.
StatTensor test_statistics(const FeatureMatrix& feat_x, const FeatureMatrix& feat_y, const ChannelPairModelSet& models);

DifferenceMap fuse_difference(const StatTensor& t);

RepVectors representative_vectors(const FeatureMatrix& feat_x, const FeatureMatrix& feat_y, const DifferenceMap& dm,
                                  double alpha);

/// Lloyd's algorithm with k-means++ seeding from `seed`; stops after 300
/// iterations or when no centroid moves by more than 1e-6. An emptied
/// cluster is re-seeded with the point farthest from its current centroid.
KMeansResult kmeans(const std::vector<double>& points, std::size_t dims, std::size_t k, std::uint64_t seed);

/// Two-stage clustering: k=3 picks the cluster with the largest mean DI, then
/// k=2 (seed + 1) picks the cluster overlapping it most (ties: larger mean DI).
/// Returns the changed superpixel flags (index = label - 1).
std::vector<std::uint8_t> two_stage_changed(const RepVectors& rep, const DifferenceMap& dm, std::uint64_t seed);

/// Pixel map of two_stage_changed pulled back through the test segmentation.
BinaryMap two_stage_bcm(const RepVectors& rep, const DifferenceMap& dm, const SegmentationMap& seg_test,
                        std::uint64_t seed);

/// Per-pixel DI image (each pixel carries its superpixel's value).
std::vector<double> paint(const SegmentationMap& seg, const std::vector<double>& per_superpixel);

}  // namespace comic
