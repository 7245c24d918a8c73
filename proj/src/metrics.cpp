#include "comic/metrics.hpp"

#include <sstream>

#include "comic/error.hpp"

namespace comic {

MetricsReport report_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
  MetricsReport r{tp, tn, fp, fn};
  const double TP = static_cast<double>(tp), TN = static_cast<double>(tn);
  const double FP = static_cast<double>(fp), FN = static_cast<double>(fn);

  const double kc_den = (TP + FP) * (FP + TN) + (TP + FN) * (FN + TN);
  if (kc_den > 0.0) {
    r.kc = 2.0 * (TP * TN - FN * FP) / kc_den;
  } else {
    r.degenerate = true;
  }
  const double fm_den = 2.0 * TP + FP + FN;
  if (fm_den > 0.0) {
    r.fm = 2.0 * TP / fm_den;
  } else {
    r.degenerate = true;
  }
  const double total = TP + TN + FP + FN;
  if (total > 0.0) {
    r.acc = (TP + TN) / total;
  } else {
    r.degenerate = true;
  }
  return r;
}

MetricsReport score(const BinaryMap& bcm, const BinaryMap& gt) {
  require(bcm.height == gt.height && bcm.width == gt.width, "score: map dimensions differ");
  require(bcm.values.size() == gt.values.size(), "score: map sizes differ");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t p = 0; p < gt.values.size(); ++p) {
    const auto g = gt.values[p];
    const auto b = bcm.values[p];
    require(g <= 1, "score: ground truth is not binary");
    require(b <= 1, "score: change map is not binary");
    if (b && g) ++tp;
    else if (!b && !g) ++tn;
    else if (b) ++fp;
    else ++fn;
  }
  return report_from_counts(tp, tn, fp, fn);
}

nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["tp"] = r.tp;
  j["tn"] = r.tn;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["kc"] = r.kc;
  j["fm"] = r.fm;
  j["acc"] = r.acc;
  j["degenerate"] = r.degenerate;
  return j;
}

std::string csv_header() { return "tp,tn,fp,fn,kc,fm,acc"; }

std::string to_csv_row(const MetricsReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << r.tp << ',' << r.tn << ',' << r.fp << ',' << r.fn << ',' << r.kc << ',' << r.fm << ',' << r.acc;
  return out.str();
}

}  // namespace comic
