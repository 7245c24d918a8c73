#include "comic/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "comic/error.hpp"

namespace comic {

namespace {

constexpr int kSlicIterations = 10;

/// Adjacency graph over regions with shared-boundary lengths. Merged regions
/// keep a parent pointer; adjacency only ever refers to live regions.
class RegionGraph {
 public:
  RegionGraph(const SegmentationMap& seg) : size_(seg.count, 0), adj_(seg.count), parent_(seg.count) {
    for (std::size_t r = 0; r < seg.count; ++r) parent_[r] = static_cast<std::uint32_t>(r);
    for (std::size_t m = 0; m < seg.height; ++m) {
      for (std::size_t n = 0; n < seg.width; ++n) {
        const std::uint32_t a = seg.at(m, n) - 1;
        ++size_[a];
        if (n + 1 < seg.width) link(a, seg.at(m, n + 1) - 1);
        if (m + 1 < seg.height) link(a, seg.at(m + 1, n) - 1);
      }
    }
  }

  std::size_t size(std::uint32_t r) const { return size_[r]; }
  const std::map<std::uint32_t, std::size_t>& neighbours(std::uint32_t r) const { return adj_[r]; }

  void merge(std::uint32_t from, std::uint32_t into) {
    size_[into] += size_[from];
    size_[from] = 0;
    for (const auto& [nb, len] : adj_[from]) {
      adj_[nb].erase(from);
      if (nb == into) continue;
      adj_[into][nb] += len;
      adj_[nb][into] += len;
    }
    adj_[into].erase(from);
    adj_[from].clear();
    parent_[from] = into;
  }

  std::uint32_t find(std::uint32_t r) {
    while (parent_[r] != r) {
      parent_[r] = parent_[parent_[r]];
      r = parent_[r];
    }
    return r;
  }

  /// Rewrites `seg` so every region carries its root's id, then renumbers.
  SegmentationMap collapse(const SegmentationMap& seg) {
    std::vector<std::uint64_t> ids(seg.labels.size());
    for (std::size_t p = 0; p < ids.size(); ++p) ids[p] = find(seg.labels[p] - 1);
    return label_components(seg.height, seg.width, ids);
  }

 private:
  void link(std::uint32_t a, std::uint32_t b) {
    if (a == b) return;
    ++adj_[a][b];
    ++adj_[b][a];
  }

  std::vector<std::size_t> size_;
  std::vector<std::map<std::uint32_t, std::size_t>> adj_;
  std::vector<std::uint32_t> parent_;
};

struct Centre {
  double y = 0.0;
  double x = 0.0;
  std::vector<double> color;
};

}  // namespace

std::vector<std::size_t> SegmentationMap::region_sizes() const {
  std::vector<std::size_t> sizes(count, 0);
  for (auto l : labels) ++sizes[l - 1];
  return sizes;
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  require(c < cols, "feature column out of range");
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = values[i * cols + c];
  return out;
}

SegmentationMap label_components(std::size_t height, std::size_t width, const std::vector<std::uint64_t>& ids) {
  require(ids.size() == height * width, "id map size does not match dimensions");
  SegmentationMap seg;
  seg.height = height;
  seg.width = width;
  seg.labels.assign(ids.size(), 0);
  std::uint32_t next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < ids.size(); ++start) {
    if (seg.labels[start] != 0) continue;
    ++next;
    seg.labels[start] = next;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      const std::size_t m = p / width;
      const std::size_t n = p % width;
      auto visit = [&](std::size_t q) {
        if (seg.labels[q] == 0 && ids[q] == ids[p]) {
          seg.labels[q] = next;
          queue.push_back(q);
        }
      };
      if (m > 0) visit(p - width);
      if (m + 1 < height) visit(p + width);
      if (n > 0) visit(p - 1);
      if (n + 1 < width) visit(p + 1);
    }
  }
  seg.count = next;
  return seg;
}

void validate(const SegmentationMap& seg) {
  require(seg.labels.size() == seg.height * seg.width, "segmentation size mismatch");
  std::vector<bool> seen(seg.count, false);
  for (auto l : seg.labels) {
    require(l >= 1 && l <= seg.count, "segmentation label out of range");
    seen[l - 1] = true;
  }
  require(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }), "segmentation has unused labels");
  std::vector<std::uint64_t> ids(seg.labels.begin(), seg.labels.end());
  require(label_components(seg.height, seg.width, ids).count == seg.count, "segmentation region is not 4-connected");
}

SegmentationMap slic(const Raster& raster, std::size_t target_count, double compactness, std::uint64_t /*seed*/) {
  const std::size_t height = raster.height();
  const std::size_t width = raster.width();
  const std::size_t channels = raster.channels();
  require(target_count >= 1 && target_count <= raster.pixels(), "SLIC target count must be in [1, M*N]");
  require(compactness > 0.0, "SLIC compactness must be positive");

  const double step = std::sqrt(static_cast<double>(raster.pixels()) / static_cast<double>(target_count));
  const double target = static_cast<double>(target_count);
  std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(target * width / height) - 1e-9));
  cols = std::clamp<std::size_t>(cols, 1, width);
  std::size_t rows = static_cast<std::size_t>(std::llround(target / static_cast<double>(cols)));
  rows = std::clamp<std::size_t>(rows, 1, height);

  std::vector<Centre> centres;
  centres.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      Centre ctr;
      ctr.y = (static_cast<double>(r) + 0.5) * height / rows;
      ctr.x = (static_cast<double>(c) + 0.5) * width / cols;
      const auto px = raster.pixel(static_cast<std::size_t>(ctr.y) * width + static_cast<std::size_t>(ctr.x));
      ctr.color.assign(px.begin(), px.end());
      centres.push_back(std::move(ctr));
    }
  }

  const double spatial_weight = compactness / step;
  auto distance = [&](const Centre& ctr, std::size_t m, std::size_t n) {
    const auto px = raster.pixel(m * width + n);
    double dc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const double d = px[c] - ctr.color[c];
      dc += d * d;
    }
    const double dy = static_cast<double>(m) + 0.5 - ctr.y;
    const double dx = static_cast<double>(n) + 0.5 - ctr.x;
    return std::sqrt(dc) + spatial_weight * std::sqrt(dy * dy + dx * dx);
  };

  std::vector<std::uint32_t> assign(raster.pixels());
  std::vector<double> best(raster.pixels());
  for (int iter = 0; iter < kSlicIterations; ++iter) {
    std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < centres.size(); ++k) {
      const Centre& ctr = centres[k];
      const auto m0 = static_cast<std::size_t>(std::max(0.0, std::floor(ctr.y - step)));
      const auto m1 = static_cast<std::size_t>(std::min<double>(height, std::ceil(ctr.y + step)));
      const auto n0 = static_cast<std::size_t>(std::max(0.0, std::floor(ctr.x - step)));
      const auto n1 = static_cast<std::size_t>(std::min<double>(width, std::ceil(ctr.x + step)));
      for (std::size_t m = m0; m < m1; ++m) {
        for (std::size_t n = n0; n < n1; ++n) {
          const double d = distance(ctr, m, n);
          if (d < best[m * width + n]) {
            best[m * width + n] = d;
            assign[m * width + n] = static_cast<std::uint32_t>(k);
          }
        }
      }
    }
    // Pixels outside every search window fall back to a global search.
    for (std::size_t p = 0; p < best.size(); ++p) {
      if (std::isfinite(best[p])) continue;
      for (std::size_t k = 0; k < centres.size(); ++k) {
        const double d = distance(centres[k], p / width, p % width);
        if (d < best[p]) {
          best[p] = d;
          assign[p] = static_cast<std::uint32_t>(k);
        }
      }
    }

    std::vector<Centre> sums(centres.size(), Centre{0.0, 0.0, std::vector<double>(channels, 0.0)});
    std::vector<std::size_t> counts(centres.size(), 0);
    for (std::size_t p = 0; p < assign.size(); ++p) {
      Centre& s = sums[assign[p]];
      s.y += static_cast<double>(p / width) + 0.5;
      s.x += static_cast<double>(p % width) + 0.5;
      const auto px = raster.pixel(p);
      for (std::size_t c = 0; c < channels; ++c) s.color[c] += px[c];
      ++counts[assign[p]];
    }
    for (std::size_t k = 0; k < centres.size(); ++k) {
      if (counts[k] == 0) continue;
      const double inv = 1.0 / static_cast<double>(counts[k]);
      centres[k].y = sums[k].y * inv;
      centres[k].x = sums[k].x * inv;
      for (std::size_t c = 0; c < channels; ++c) centres[k].color[c] = sums[k].color[c] * inv;
    }
  }

  // Connectivity enforcement.
  std::vector<std::uint64_t> ids(assign.begin(), assign.end());
  SegmentationMap parts = label_components(height, width, ids);
  const std::size_t min_size = std::max<std::size_t>(1, static_cast<std::size_t>(step * step / 4.0));

  RegionGraph graph(parts);
  std::vector<std::uint32_t> owner(parts.count);
  std::vector<std::uint32_t> largest(centres.size(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t p = 0; p < parts.labels.size(); ++p) owner[parts.labels[p] - 1] = assign[p];
  for (std::uint32_t r = 0; r < parts.count; ++r) {
    auto& l = largest[owner[r]];
    if (l == std::numeric_limits<std::uint32_t>::max() || graph.size(r) > graph.size(l)) l = r;
  }

  std::vector<std::uint32_t> orphans;
  for (std::uint32_t r = 0; r < parts.count; ++r) {
    if (largest[owner[r]] != r || graph.size(r) < min_size) orphans.push_back(r);
  }
  std::stable_sort(orphans.begin(), orphans.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return graph.size(a) < graph.size(b); });
  for (std::uint32_t r : orphans) {
    if (graph.find(r) != r) continue;
    const auto& nbs = graph.neighbours(r);
    if (nbs.empty()) continue;
    std::uint32_t target = nbs.begin()->first;
    for (const auto& [nb, len] : nbs) {
      if (graph.size(nb) > graph.size(target)) target = nb;
    }
    graph.merge(r, target);
  }
  return graph.collapse(parts);
}

SegmentationMap cosegment(const SegmentationMap& a, const SegmentationMap& b, std::size_t min_region) {
  require(a.height == b.height && a.width == b.width, "cosegment: segmentation dimensions differ");
  require(a.labels.size() == a.height * a.width && b.labels.size() == b.height * b.width,
          "cosegment: malformed segmentation");
  std::vector<std::uint64_t> ids(a.labels.size());
  for (std::size_t p = 0; p < ids.size(); ++p) {
    ids[p] = (static_cast<std::uint64_t>(a.labels[p]) << 32) | b.labels[p];
  }
  SegmentationMap parts = label_components(a.height, a.width, ids);
  if (min_region <= 1) return parts;

  RegionGraph graph(parts);
  std::set<std::pair<std::size_t, std::uint32_t>> small;
  for (std::uint32_t r = 0; r < parts.count; ++r) {
    if (graph.size(r) < min_region) small.emplace(graph.size(r), r);
  }
  while (!small.empty()) {
    const auto [sz, r] = *small.begin();
    small.erase(small.begin());
    const auto& nbs = graph.neighbours(r);
    if (nbs.empty()) continue;
    std::uint32_t target = nbs.begin()->first;
    std::size_t longest = nbs.begin()->second;
    for (const auto& [nb, len] : nbs) {
      if (len > longest) {
        longest = len;
        target = nb;
      }
    }
    const std::size_t before = graph.size(target);
    graph.merge(r, target);
    if (before < min_region) {
      small.erase({before, target});
      if (graph.size(target) < min_region) small.emplace(graph.size(target), target);
    }
  }
  return graph.collapse(parts);
}

FeatureMatrix extract_features(const Raster& raster, const SegmentationMap& seg) {
  require(raster.height() == seg.height && raster.width() == seg.width,
          "extract_features: raster and segmentation dimensions differ");
  require(seg.labels.size() == raster.pixels(), "extract_features: malformed segmentation");
  FeatureMatrix feat;
  feat.rows = seg.count;
  feat.cols = raster.channels();
  feat.values.assign(feat.rows * feat.cols, 0.0);
  std::vector<std::size_t> counts(seg.count, 0);
  for (std::size_t p = 0; p < raster.pixels(); ++p) {
    const std::uint32_t l = seg.labels[p];
    require(l >= 1 && l <= seg.count, "extract_features: label out of range");
    const auto px = raster.pixel(p);
    double* row = feat.values.data() + (l - 1) * feat.cols;
    for (std::size_t c = 0; c < feat.cols; ++c) row[c] += px[c];
    ++counts[l - 1];
  }
  for (std::size_t i = 0; i < feat.rows; ++i) {
    require(counts[i] > 0, "extract_features: empty superpixel");
    for (std::size_t c = 0; c < feat.cols; ++c) feat.values[i * feat.cols + c] /= static_cast<double>(counts[i]);
  }
  return feat;
}

void save_segmentation(const SegmentationMap& seg, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(seg.labels.size() * 4);
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    const std::uint32_t v = seg.labels[i];
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<std::uint8_t>((v >> (8 * b)) & 0xFFu);
  }
  write_container(path, {seg.height, seg.width, 1, "u32le", "row-major"}, bytes);
}

SegmentationMap load_segmentation(const std::filesystem::path& path) {
  ContainerHeader header;
  const auto bytes = read_container(path, header);
  require(header.dtype == "u32le" && header.c == 1, "segmentation must be a single-channel u32le container");
  SegmentationMap seg;
  seg.height = header.m;
  seg.width = header.n;
  seg.labels.resize(header.m * header.n);
  std::uint32_t max_label = 0;
  for (std::size_t i = 0; i < seg.labels.size(); ++i) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    seg.labels[i] = v;
    max_label = std::max(max_label, v);
  }
  seg.count = max_label;
  validate(seg);
  return seg;
}

}  // namespace comic
