#include "comic/model_set.hpp"

#include <fstream>

#include "comic/error.hpp"

namespace comic {

ChannelPairModelSet::ChannelPairModelSet(std::vector<EmpiricalCdf> marginals_x, std::vector<EmpiricalCdf> marginals_y,
                                         std::vector<ChannelPairModel> pairs)
    : marginals_x_(std::move(marginals_x)), marginals_y_(std::move(marginals_y)), pairs_(std::move(pairs)) {
  require(!marginals_x_.empty() && !marginals_y_.empty(), "model set needs at least one channel per image");
  require(pairs_.size() == marginals_x_.size() * marginals_y_.size(), "model set grid is incomplete");
  const std::size_t n = marginals_x_.front().size();
  for (const auto& m : marginals_x_) require(m.size() == n, "training marginals differ in length");
  for (const auto& m : marginals_y_) require(m.size() == n, "training marginals differ in length");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    require(pairs_[i].c1 == i / marginals_y_.size() && pairs_[i].c2 == i % marginals_y_.size(),
            "model set pairs are not in (c1, c2) row-major order");
    validate(pairs_[i].model);
  }
}

nlohmann::ordered_json to_json(const ChannelPairModelSet& set) {
  nlohmann::ordered_json j;
  j["cx"] = set.channels_x();
  j["cy"] = set.channels_y();
  j["n_train"] = set.n_train();
  auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : set.pairs()) {
    nlohmann::ordered_json r;
    r["c1"] = p.c1;
    r["c2"] = p.c2;
    r["rho"] = p.model.rho;
    r["theta"] = p.model.theta;
    r["w"] = p.model.w;
    r["tail_mode"] = std::string(to_string(p.model.tail_mode));
    r["orientation"] = std::string(to_string(p.model.orientation));
    r["n_train"] = p.n_train;
    r["tau"] = p.profile.tau;
    r["eta_lower"] = p.profile.eta_lower;
    r["eta_upper"] = p.profile.eta_upper;
    r["status"] = p.status;
    r["iterations"] = p.iterations;
    pairs.push_back(std::move(r));
  }
  auto& marg = j["marginals"];
  marg["x"] = nlohmann::ordered_json::array();
  marg["y"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < set.channels_x(); ++c) marg["x"].push_back(set.marginal_x(c).sorted_samples());
  for (std::size_t c = 0; c < set.channels_y(); ++c) marg["y"].push_back(set.marginal_y(c).sorted_samples());
  return j;
}

ChannelPairModelSet model_set_from_json(const nlohmann::json& j) {
  try {
    std::vector<EmpiricalCdf> mx, my;
    for (const auto& col : j.at("marginals").at("x")) mx.emplace_back(col.get<std::vector<double>>());
    for (const auto& col : j.at("marginals").at("y")) my.emplace_back(col.get<std::vector<double>>());
    std::vector<ChannelPairModel> pairs;
    for (const auto& r : j.at("pairs")) {
      ChannelPairModel p;
      p.c1 = r.at("c1").get<std::size_t>();
      p.c2 = r.at("c2").get<std::size_t>();
      p.model.rho = r.at("rho").get<double>();
      p.model.theta = r.at("theta").get<double>();
      p.model.w = r.at("w").get<double>();
      p.model.tail_mode = parse_tail_mode(r.at("tail_mode").get<std::string>());
      p.model.orientation = parse_orientation(r.at("orientation").get<std::string>());
      p.n_train = r.at("n_train").get<std::size_t>();
      p.profile.tau = r.value("tau", 0.0);
      p.profile.eta_lower = r.value("eta_lower", 0.0);
      p.profile.eta_upper = r.value("eta_upper", 0.0);
      p.status = r.value("status", std::string{});
      p.iterations = r.value("iterations", std::size_t{0});
      pairs.push_back(std::move(p));
    }
    return ChannelPairModelSet(std::move(mx), std::move(my), std::move(pairs));
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed model set: ") + e.what());
  }
}

void save_model_set(const ChannelPairModelSet& set, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(set).dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

ChannelPairModelSet load_model_set(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ContractError("malformed model file " + path.string() + ": " + e.what());
  }
  return model_set_from_json(j);
}

}  // namespace comic
