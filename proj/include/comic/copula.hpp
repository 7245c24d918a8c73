#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "comic/dependence.hpp"

namespace comic {

/// Two-component copula mixture fitted on oriented pseudo-observations:
/// w * Gaussian(rho) + (1 - w) * {Clayton | Clayton survival}(theta).
struct CopulaMixtureModel {
  double rho = 0.5;
  double theta = 0.5;
  double w = 0.5;
  TailMode tail_mode = TailMode::Clayton;
  Orientation orientation = Orientation::Identity;
};

/// Rejects parameters outside rho in (-1,1), theta > 0, w in [0,1].
void validate(const CopulaMixtureModel& model);

// Densities. Arguments must lie strictly inside (0,1); ContractError otherwise.
double gaussian_density(double u1, double u2, double rho);
double clayton_density(double u1, double u2, double theta);
double sclayton_density(double u1, double u2, double theta);

double gaussian_log_density(double u1, double u2, double rho);
double clayton_log_density(double u1, double u2, double theta);
double sclayton_log_density(double u1, double u2, double theta);

/// Log-density in normal scores z_i = Phi^-1(u_i); used by the EM grid search.
double gaussian_log_density_scores(double z1, double z2, double rho);
/// Clayton log-density given log u1, log u2 (no range checks).
double clayton_log_density_logs(double log_u1, double log_u2, double theta);

// CDFs on the closed square [0,1]^2.
double gaussian_cdf(double u1, double u2, double rho);
double clayton_cdf(double u1, double u2, double theta);
double sclayton_cdf(double u1, double u2, double theta);

/// Density of the tail component selected by `mode`.
double tail_log_density(double u1, double u2, double theta, TailMode mode);

double mixture_density(double u1, double u2, const CopulaMixtureModel& model);
/// log of mixture_density, computed by log-sum-exp of the two components.
double mixture_log_density(double u1, double u2, const CopulaMixtureModel& model);
double mixture_cdf(double u1, double u2, const CopulaMixtureModel& model);

/// Pseudo-observation clamp delta = 1 / (2 N).
inline double pseudo_obs_clamp(std::size_t n_train) { return 0.5 / static_cast<double>(n_train); }

/// Copula log-density of one superpixel's features:
/// log f( clamp(F_X(hx)), clamp(orient(F_Y(hy))) ).
double joint_logpdf_superpixel(double hx, double hy, const EmpiricalCdf& cdf_x, const EmpiricalCdf& cdf_y,
                               const CopulaMixtureModel& model);

/// n i.i.d. draws in (0,1)^2: Gaussian pair with probability w, else a
/// Clayton pair by conditional inversion (reflected for ClaytonSurvival).
std::vector<std::pair<double, double>> sample_mixture(const CopulaMixtureModel& model, std::size_t n,
                                                      std::uint64_t seed);

}  // namespace comic
