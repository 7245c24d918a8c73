#include "comic/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "comic/error.hpp"
#include "comic/parallel.hpp"

namespace comic {

namespace {

constexpr std::size_t kMaxKMeansIterations = 300;
constexpr double kCentroidTolerance = 1e-6;

double squared_distance(const double* a, const double* b, std::size_t dims) {
  double s = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t nearest(const double* point, const std::vector<double>& centroids, std::size_t k, std::size_t dims,
                    double* dist = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double d = squared_distance(point, centroids.data() + c * dims, dims);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

std::vector<double> cluster_means(const std::vector<std::size_t>& assignment, const std::vector<double>& di,
                                  std::size_t k) {
  std::vector<double> sum(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    sum[assignment[i]] += di[i];
    ++count[assignment[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    sum[c] = count[c] > 0 ? sum[c] / static_cast<double>(count[c]) : -std::numeric_limits<double>::infinity();
  }
  return sum;
}

}  // namespace

StatTensor test_statistics(const FeatureMatrix& feat_x, const FeatureMatrix& feat_y, const ChannelPairModelSet& models) {
  require(feat_x.rows == feat_y.rows, "test_statistics: feature row counts differ");
  require(feat_x.cols == models.channels_x() && feat_y.cols == models.channels_y(),
          "test_statistics: feature channels do not match the model set");
  StatTensor t;
  t.superpixels = feat_x.rows;
  t.channels_x = feat_x.cols;
  t.channels_y = feat_y.cols;
  t.values.assign(t.superpixels * t.channels_x * t.channels_y, 0.0);
  parallel_for(t.superpixels, [&](std::size_t i) {
    for (std::size_t c1 = 0; c1 < t.channels_x; ++c1) {
      for (std::size_t c2 = 0; c2 < t.channels_y; ++c2) {
        const auto& pair = models.at(c1, c2);
        const double value = -joint_logpdf_superpixel(feat_x(i, c1), feat_y(i, c2), models.marginal_x(c1),
                                                      models.marginal_y(c2), pair.model);
        if (!std::isfinite(value)) throw NumericalError("non-finite test statistic");
        t.values[(i * t.channels_x + c1) * t.channels_y + c2] = value;
      }
    }
  });
  return t;
}

DifferenceMap fuse_difference(const StatTensor& t) {
  require(t.superpixels > 0 && t.channels_x > 0 && t.channels_y > 0, "fuse_difference: empty tensor");
  const std::size_t per = t.channels_x * t.channels_y;
  DifferenceMap dm;
  dm.di.resize(t.superpixels);
  double sum = 0.0;
  for (std::size_t i = 0; i < t.superpixels; ++i) {
    const auto first = t.values.begin() + static_cast<std::ptrdiff_t>(i * per);
    dm.di[i] = *std::max_element(first, first + static_cast<std::ptrdiff_t>(per));
    sum += dm.di[i];
  }
  const double mean = sum / static_cast<double>(t.superpixels);
  dm.centered.resize(t.superpixels);
  for (std::size_t i = 0; i < t.superpixels; ++i) dm.centered[i] = dm.di[i] - mean;
  return dm;
}

RepVectors representative_vectors(const FeatureMatrix& feat_x, const FeatureMatrix& feat_y, const DifferenceMap& dm,
                                  double alpha) {
  require(feat_x.rows == feat_y.rows && feat_x.rows == dm.di.size(), "representative vectors: row counts differ");
  require(alpha >= 0.0, "alpha must be non-negative");
  RepVectors rep;
  rep.rows = feat_x.rows;
  rep.dims = feat_x.cols + feat_y.cols + 1;
  rep.values.reserve(rep.rows * rep.dims);
  for (std::size_t i = 0; i < rep.rows; ++i) {
    for (std::size_t c = 0; c < feat_x.cols; ++c) rep.values.push_back(feat_x(i, c));
    for (std::size_t c = 0; c < feat_y.cols; ++c) rep.values.push_back(feat_y(i, c));
    rep.values.push_back(alpha * dm.centered[i]);
  }
  return rep;
}

KMeansResult kmeans(const std::vector<double>& points, std::size_t dims, std::size_t k, std::uint64_t seed) {
  require(dims >= 1 && points.size() % dims == 0, "kmeans: point buffer is not a multiple of dims");
  const std::size_t n = points.size() / dims;
  require(k >= 1, "kmeans: k must be >= 1");
  require(n >= k, "kmeans: fewer points than clusters");
  auto point = [&](std::size_t i) { return points.data() + i * dims; };

  // k-means++ seeding.
  std::mt19937_64 rng(seed);
  std::vector<double> centroids;
  centroids.reserve(k * dims);
  std::vector<bool> chosen(n, false);
  std::size_t first = std::min(n - 1, static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(n)));
  centroids.insert(centroids.end(), point(first), point(first) + dims);
  chosen[first] = true;
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(point(i), point(first), dims);
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = unit_draw(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    chosen[pick] = true;
    centroids.insert(centroids.end(), point(pick), point(pick) + dims);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(point(i), point(pick), dims));
  }

  KMeansResult result;
  result.assignment.assign(n, 0);
  std::vector<double> dist(n);
  for (std::size_t iter = 0; iter < kMaxKMeansIterations; ++iter) {
    result.iterations = iter + 1;
    for (std::size_t i = 0; i < n; ++i) result.assignment[i] = nearest(point(i), centroids, k, dims, &dist[i]);

    std::vector<double> next(k * dims, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = result.assignment[i];
      for (std::size_t d = 0; d < dims; ++d) next[c * dims + d] += point(i)[d];
      ++count[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) {
        std::size_t far = n;
        for (std::size_t i = 0; i < n; ++i) {
          if (count[result.assignment[i]] > 1 && (far == n || dist[i] > dist[far])) far = i;
        }
        if (far == n) continue;
        --count[result.assignment[far]];
        for (std::size_t d = 0; d < dims; ++d) next[result.assignment[far] * dims + d] -= point(far)[d];
        result.assignment[far] = c;
        dist[far] = 0.0;
        std::copy(point(far), point(far) + dims, next.begin() + static_cast<std::ptrdiff_t>(c * dims));
        count[c] = 1;
      }
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t d = 0; d < dims; ++d) next[c * dims + d] /= static_cast<double>(count[c]);
      shift = std::max(shift, std::sqrt(squared_distance(next.data() + c * dims, centroids.data() + c * dims, dims)));
    }
    centroids = std::move(next);
    if (shift < kCentroidTolerance) break;
  }
  result.centroids = std::move(centroids);
  return result;
}

std::vector<std::uint8_t> two_stage_changed(const RepVectors& rep, const DifferenceMap& dm, std::uint64_t seed) {
  require(rep.rows == dm.di.size(), "two_stage: representative vectors and DI differ in length");
  require(rep.values.size() == rep.rows * rep.dims, "two_stage: malformed representative vectors");
  std::vector<std::uint8_t> changed(rep.rows, 0);
  if (rep.rows == 0) return changed;

  bool identical = true;
  for (std::size_t i = 1; i < rep.rows && identical; ++i) {
    identical = std::equal(rep.values.begin(), rep.values.begin() + static_cast<std::ptrdiff_t>(rep.dims),
                           rep.values.begin() + static_cast<std::ptrdiff_t>(i * rep.dims));
  }
  if (identical) return changed;
  require(rep.rows >= 3, "two_stage: need at least three superpixels");

  const auto stage1 = kmeans(rep.values, rep.dims, 3, seed);
  const auto means1 = cluster_means(stage1.assignment, dm.di, 3);
  const std::size_t a2 = static_cast<std::size_t>(std::max_element(means1.begin(), means1.end()) - means1.begin());

  const auto stage2 = kmeans(rep.values, rep.dims, 2, seed + 1);
  const auto means2 = cluster_means(stage2.assignment, dm.di, 2);
  std::size_t overlap[2] = {0, 0};
  for (std::size_t i = 0; i < rep.rows; ++i) {
    if (stage1.assignment[i] == a2) ++overlap[stage2.assignment[i]];
  }
  std::size_t b2 = 0;
  if (overlap[1] > overlap[0] || (overlap[1] == overlap[0] && means2[1] > means2[0])) b2 = 1;

  for (std::size_t i = 0; i < rep.rows; ++i) changed[i] = stage2.assignment[i] == b2 ? 1 : 0;
  return changed;
}

BinaryMap two_stage_bcm(const RepVectors& rep, const DifferenceMap& dm, const SegmentationMap& seg_test,
                        std::uint64_t seed) {
  require(rep.rows == seg_test.count, "two_stage_bcm: superpixel count does not match the test segmentation");
  const auto changed = two_stage_changed(rep, dm, seed);
  BinaryMap bcm(seg_test.height, seg_test.width);
  for (std::size_t p = 0; p < seg_test.labels.size(); ++p) bcm.values[p] = changed[seg_test.labels[p] - 1];
  return bcm;
}

std::vector<double> paint(const SegmentationMap& seg, const std::vector<double>& per_superpixel) {
  require(per_superpixel.size() == seg.count, "paint: value count does not match the segmentation");
  std::vector<double> out(seg.labels.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = per_superpixel[seg.labels[p] - 1];
  return out;
}

}  // namespace comic
