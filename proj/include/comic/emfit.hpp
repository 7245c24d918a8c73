#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "comic/copula.hpp"
#include "comic/model_set.hpp"
#include "comic/segmentation.hpp"

namespace comic {

using PseudoObs = std::pair<double, double>;

struct EmConfig {
  double rho0 = 0.5;
  double theta0 = 0.5;
  double w0 = 0.5;
  double eps = 0.01;
  double theta_max = 20.0;
  std::size_t grid_rho = 99;     // rho_j = j / (grid_rho + 1)
  std::size_t grid_theta = 200;  // theta_j = j * theta_max / grid_theta
  std::size_t max_iters = 200;

  void validate() const;
  std::vector<double> rho_grid() const;
  std::vector<double> theta_grid() const;
};

struct EmIterate {
  std::size_t iteration = 0;
  double log_likelihood = 0.0;
  double rho = 0.0;
  double theta = 0.0;
  double w = 0.0;
};

enum class EmStatus { Converged, MaxIters };

struct EmTrace {
  std::vector<EmIterate> iterations;  // entry 0 is the initialization
  EmStatus status = EmStatus::MaxIters;

  /// True if the log-likelihood never drops by more than `slack`.
  bool monotone(double slack = 1e-9) const;
};

struct EmFit {
  CopulaMixtureModel model;
  EmTrace trace;
};

struct EmParams {
  double rho = 0.0;
  double theta = 0.0;
  double w = 0.0;
};

/// Mean log mixture density over the data.
double log_likelihood(std::span<const PseudoObs> data, const CopulaMixtureModel& model);

/// Posterior probability of the Gaussian component for every point.
std::vector<double> e_step(std::span<const PseudoObs> data, const CopulaMixtureModel& model);

/// w' = mean gamma; rho' and theta' maximize the gamma-weighted component
/// log-likelihoods over the configured grids (ties to the smaller value). If
/// `incumbent` is given it stays selected unless a grid point does strictly
/// better, which keeps EM monotone for off-grid starting values.
EmParams m_step(std::span<const PseudoObs> data, std::span<const double> gamma, TailMode tail_mode,
                const EmConfig& config, const EmParams* incumbent = nullptr);

/// EM until |l(q+1) - l(q)| < eps or max_iters.
EmFit fit(std::span<const PseudoObs> data, TailMode tail_mode, const EmConfig& config = {});

/// CSV rows "iteration,l,rho,theta,w" (no header).
void write_trace_rows(std::ostream& out, const EmTrace& trace, const std::string& prefix = {});

/// Pseudo-observations (F_X(hx), oriented F_Y(hy)) clamped into [delta, 1 - delta].
std::vector<PseudoObs> oriented_pseudo_obs(std::span<const double> hx, std::span<const double> hy,
                                           const EmpiricalCdf& cdf_x, const EmpiricalCdf& cdf_y,
                                           Orientation orientation);

/// Fits every (c1, c2) channel pair of the training features.
struct ModelSetFit {
  ChannelPairModelSet models;
  std::vector<EmTrace> traces;  // row-major (c1, c2)
};
ModelSetFit fit_channel_pairs(const FeatureMatrix& feat_x, const FeatureMatrix& feat_y, const EmConfig& config);

}  // namespace comic
