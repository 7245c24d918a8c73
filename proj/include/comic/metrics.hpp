#pragma once

#include <cstddef>
#include <json.hpp>
#include <string>

#include "comic/raster.hpp"

namespace comic {

/// Confusion counts (positive = changed) and the derived scores.
struct MetricsReport {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double kc = 0.0;
  double fm = 0.0;
  double acc = 0.0;
  bool degenerate = false;  // some denominator was zero and its score set to 0
};

/// KC = 2(TP*TN - FN*FP) / ((TP+FP)(FP+TN) + (TP+FN)(FN+TN)),
/// Fm = 2TP / (2TP + FP + FN), ACC = (TP+TN) / total.
MetricsReport report_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);

MetricsReport score(const BinaryMap& bcm, const BinaryMap& gt);

nlohmann::ordered_json to_json(const MetricsReport& report);
std::string csv_header();
std::string to_csv_row(const MetricsReport& report);

}  // namespace comic
