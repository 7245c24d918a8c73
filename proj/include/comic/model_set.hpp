#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "comic/copula.hpp"
#include "comic/dependence.hpp"

namespace comic {

struct ChannelPairModel {
  std::size_t c1 = 0;
  std::size_t c2 = 0;
  CopulaMixtureModel model;
  DependenceProfile profile;
  std::size_t n_train = 0;
  std::string status;  // "converged" | "max_iters"
  std::size_t iterations = 0;
};

/// Complete C_X x C_Y grid of fitted models plus the training marginals each
/// pair's pseudo-observations are computed with.
class ChannelPairModelSet {
 public:
  ChannelPairModelSet(std::vector<EmpiricalCdf> marginals_x, std::vector<EmpiricalCdf> marginals_y,
                      std::vector<ChannelPairModel> pairs);

  std::size_t channels_x() const { return marginals_x_.size(); }
  std::size_t channels_y() const { return marginals_y_.size(); }
  std::size_t n_train() const { return marginals_x_.front().size(); }

  const EmpiricalCdf& marginal_x(std::size_t c1) const { return marginals_x_.at(c1); }
  const EmpiricalCdf& marginal_y(std::size_t c2) const { return marginals_y_.at(c2); }
  const ChannelPairModel& at(std::size_t c1, std::size_t c2) const { return pairs_.at(c1 * channels_y() + c2); }
  const std::vector<ChannelPairModel>& pairs() const { return pairs_; }

 private:
  std::vector<EmpiricalCdf> marginals_x_;
  std::vector<EmpiricalCdf> marginals_y_;
  std::vector<ChannelPairModel> pairs_;
};

/// {"cx","cy","n_train","pairs":[{c1,c2,rho,theta,w,tail_mode,orientation,n_train,
///   tau,eta_lower,eta_upper,status,iterations}...],"marginals":{"x":[[...]],"y":[[...]]}}
nlohmann::ordered_json to_json(const ChannelPairModelSet& set);
ChannelPairModelSet model_set_from_json(const nlohmann::json& j);

void save_model_set(const ChannelPairModelSet& set, const std::filesystem::path& path);
ChannelPairModelSet load_model_set(const std::filesystem::path& path);

}  // namespace comic
