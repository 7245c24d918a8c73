#include "comic/emfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "comic/error.hpp"
#include "comic/normal.hpp"
#include "comic/parallel.hpp"

namespace comic {

namespace {

constexpr double kLogDensityFloor = -690.7755278982137;  // log(1e-300)

/// Per-point quantities that do not depend on the parameters.
struct Prepared {
  std::vector<double> z1, z2;          // normal scores
  std::vector<double> log_a, log_b;    // log u or log(1-u), per tail mode

  Prepared(std::span<const PseudoObs> data, TailMode mode)
      : z1(data.size()), z2(data.size()), log_a(data.size()), log_b(data.size()) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto [u, v] = data[i];
      if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
        throw ContractError("EM data must lie strictly inside (0,1)^2");
      }
      z1[i] = normal_quantile(u);
      z2[i] = normal_quantile(v);
      if (mode == TailMode::Clayton) {
        log_a[i] = std::log(u);
        log_b[i] = std::log(v);
      } else {
        log_a[i] = std::log1p(-u);
        log_b[i] = std::log1p(-v);
      }
    }
  }

  std::size_t size() const { return z1.size(); }

  double gauss(std::size_t i, double rho) const { return gaussian_log_density_scores(z1[i], z2[i], rho); }
  double tail(std::size_t i, double theta) const { return clayton_log_density_logs(log_a[i], log_b[i], theta); }

  /// log(w fG), log((1-w) fC) for point i.
  std::pair<double, double> weighted(std::size_t i, const EmParams& p) const {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    const double g = p.w > 0.0 ? std::log(p.w) + gauss(i, p.rho) : ninf;
    const double c = p.w < 1.0 ? std::log1p(-p.w) + tail(i, p.theta) : ninf;
    return {g, c};
  }
};

double log_sum_exp(double a, double b) {
  const double top = std::max(a, b);
  if (top == -std::numeric_limits<double>::infinity()) return top;
  return top + std::log(std::exp(a - top) + std::exp(b - top));
}

double mean_log_likelihood(const Prepared& prep, const EmParams& p) {
  double sum = 0.0;
  for (std::size_t i = 0; i < prep.size(); ++i) {
    const auto [g, c] = prep.weighted(i, p);
    sum += std::max(log_sum_exp(g, c), kLogDensityFloor);
  }
  return sum / static_cast<double>(prep.size());
}

std::vector<double> responsibilities(const Prepared& prep, const EmParams& p) {
  std::vector<double> gamma(prep.size());
  for (std::size_t i = 0; i < prep.size(); ++i) {
    const auto [g, c] = prep.weighted(i, p);
    const double denom = std::max(log_sum_exp(g, c), kLogDensityFloor);
    gamma[i] = std::clamp(std::exp(g - denom), 0.0, 1.0);
  }
  return gamma;
}

/// Grid argmax with ties to the lowest index; evaluated per grid point in parallel.
template <typename Objective>
std::pair<double, double> grid_argmax(const std::vector<double>& grid, Objective objective) {
  std::vector<double> scores(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) { scores[j] = objective(grid[j]); });
  std::size_t best = 0;
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (scores[j] > scores[best]) best = j;
  }
  return {grid[best], scores[best]};
}

EmParams m_step_prepared(const Prepared& prep, std::span<const double> gamma, const EmConfig& config,
                         const EmParams* incumbent) {
  require(gamma.size() == prep.size(), "m_step: responsibilities do not match data");
  const double n = static_cast<double>(prep.size());
  EmParams next;
  double gamma_sum = 0.0;
  for (double g : gamma) gamma_sum += g;
  next.w = std::clamp(gamma_sum / n, 0.0, 1.0);

  auto rho_objective = [&](double rho) {
    double s = 0.0;
    for (std::size_t i = 0; i < prep.size(); ++i) {
      if (gamma[i] > 0.0) s += gamma[i] * prep.gauss(i, rho);
    }
    return s / n;
  };
  auto theta_objective = [&](double theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < prep.size(); ++i) {
      const double g2 = 1.0 - gamma[i];
      if (g2 > 0.0) s += g2 * prep.tail(i, theta);
    }
    return s / n;
  };

  auto [rho, rho_score] = grid_argmax(config.rho_grid(), rho_objective);
  auto [theta, theta_score] = grid_argmax(config.theta_grid(), theta_objective);
  if (incumbent != nullptr) {
    const double inc_rho = rho_objective(incumbent->rho);
    if (inc_rho > rho_score || (inc_rho == rho_score && incumbent->rho < rho)) rho = incumbent->rho;
    const double inc_theta = theta_objective(incumbent->theta);
    if (inc_theta > theta_score || (inc_theta == theta_score && incumbent->theta < theta)) theta = incumbent->theta;
  }
  next.rho = rho;
  next.theta = theta;
  return next;
}

}  // namespace

void EmConfig::validate() const {
  require(eps > 0.0, "EM eps must be positive");
  require(theta_max > 0.0, "EM theta_max must be positive");
  require(grid_rho >= 2 && grid_theta >= 2, "EM grids need at least two points");
  require(max_iters >= 1, "EM max_iters must be >= 1");
  require(rho0 > 0.0 && rho0 < 1.0, "EM rho0 must lie in (0,1)");
  require(theta0 > 0.0 && theta0 <= theta_max, "EM theta0 must lie in (0, theta_max]");
  require(w0 >= 0.0 && w0 <= 1.0, "EM w0 must lie in [0,1]");
}

std::vector<double> EmConfig::rho_grid() const {
  std::vector<double> g(grid_rho);
  for (std::size_t j = 0; j < grid_rho; ++j) g[j] = static_cast<double>(j + 1) / static_cast<double>(grid_rho + 1);
  return g;
}

std::vector<double> EmConfig::theta_grid() const {
  std::vector<double> g(grid_theta);
  for (std::size_t j = 0; j < grid_theta; ++j) {
    g[j] = static_cast<double>(j + 1) * theta_max / static_cast<double>(grid_theta);
  }
  return g;
}

bool EmTrace::monotone(double slack) const {
  for (std::size_t q = 1; q < iterations.size(); ++q) {
    if (iterations[q].log_likelihood < iterations[q - 1].log_likelihood - slack) return false;
  }
  return true;
}

double log_likelihood(std::span<const PseudoObs> data, const CopulaMixtureModel& model) {
  require(!data.empty(), "log_likelihood: empty data");
  validate(model);
  return mean_log_likelihood(Prepared(data, model.tail_mode), {model.rho, model.theta, model.w});
}

std::vector<double> e_step(std::span<const PseudoObs> data, const CopulaMixtureModel& model) {
  validate(model);
  return responsibilities(Prepared(data, model.tail_mode), {model.rho, model.theta, model.w});
}

EmParams m_step(std::span<const PseudoObs> data, std::span<const double> gamma, TailMode tail_mode,
                const EmConfig& config, const EmParams* incumbent) {
  config.validate();
  return m_step_prepared(Prepared(data, tail_mode), gamma, config, incumbent);
}

EmFit fit(std::span<const PseudoObs> data, TailMode tail_mode, const EmConfig& config) {
  config.validate();
  require(data.size() >= 10, "EM fit needs at least 10 samples");
  const Prepared prep(data, tail_mode);

  EmParams params{config.rho0, config.theta0, config.w0};
  EmTrace trace;
  double previous = mean_log_likelihood(prep, params);
  if (!std::isfinite(previous)) throw NumericalError("EM initial log-likelihood is not finite");
  trace.iterations.push_back({0, previous, params.rho, params.theta, params.w});
  trace.status = EmStatus::MaxIters;

  for (std::size_t q = 1; q <= config.max_iters; ++q) {
    const auto gamma = responsibilities(prep, params);
    params = m_step_prepared(prep, gamma, config, &params);
    const double current = mean_log_likelihood(prep, params);
    if (!std::isfinite(current)) throw NumericalError("EM log-likelihood became non-finite");
    trace.iterations.push_back({q, current, params.rho, params.theta, params.w});
    if (std::abs(current - previous) < config.eps) {
      trace.status = EmStatus::Converged;
      break;
    }
    previous = current;
  }

  CopulaMixtureModel model;
  model.rho = params.rho;
  model.theta = params.theta;
  model.w = params.w;
  model.tail_mode = tail_mode;
  return {model, std::move(trace)};
}

void write_trace_rows(std::ostream& out, const EmTrace& trace, const std::string& prefix) {
  std::ostringstream row;
  row.precision(17);
  for (const auto& it : trace.iterations) {
    row.str({});
    row << prefix << it.iteration << ',' << it.log_likelihood << ',' << it.rho << ',' << it.theta << ',' << it.w
        << '\n';
    out << row.str();
  }
}

std::vector<PseudoObs> oriented_pseudo_obs(std::span<const double> hx, std::span<const double> hy,
                                           const EmpiricalCdf& cdf_x, const EmpiricalCdf& cdf_y,
                                           Orientation orientation) {
  require(hx.size() == hy.size(), "pseudo-observations: feature lengths differ");
  const double delta = pseudo_obs_clamp(cdf_x.size());
  std::vector<PseudoObs> out(hx.size());
  for (std::size_t i = 0; i < hx.size(); ++i) {
    double v = cdf_y(hy[i]);
    if (orientation == Orientation::Negated) v = 1.0 - v;
    out[i] = {std::clamp(cdf_x(hx[i]), delta, 1.0 - delta), std::clamp(v, delta, 1.0 - delta)};
  }
  return out;
}

ModelSetFit fit_channel_pairs(const FeatureMatrix& feat_x, const FeatureMatrix& feat_y, const EmConfig& config) {
  require(feat_x.rows == feat_y.rows, "training feature row counts differ");
  require(feat_x.cols >= 1 && feat_y.cols >= 1, "training features need at least one channel");
  std::vector<std::vector<double>> cols_x, cols_y;
  std::vector<EmpiricalCdf> marg_x, marg_y;
  for (std::size_t c = 0; c < feat_x.cols; ++c) {
    cols_x.push_back(feat_x.column(c));
    marg_x.emplace_back(cols_x.back());
  }
  for (std::size_t c = 0; c < feat_y.cols; ++c) {
    cols_y.push_back(feat_y.column(c));
    marg_y.emplace_back(cols_y.back());
  }

  const std::size_t cy = feat_y.cols;
  const std::size_t total = feat_x.cols * cy;
  std::vector<ChannelPairModel> pairs(total);
  std::vector<EmTrace> traces(total);
  parallel_for(total, [&](std::size_t idx) {
    const std::size_t c1 = idx / cy;
    const std::size_t c2 = idx % cy;
    ChannelPairModel& pair = pairs[idx];
    pair.c1 = c1;
    pair.c2 = c2;
    pair.profile = dependence_profile(cols_x[c1], cols_y[c2]);
    const auto data = oriented_pseudo_obs(cols_x[c1], cols_y[c2], marg_x[c1], marg_y[c2], pair.profile.orientation());
    auto result = fit(data, pair.profile.tail_mode(), config);
    pair.model = result.model;
    pair.model.orientation = pair.profile.orientation();
    pair.n_train = data.size();
    pair.status = result.trace.status == EmStatus::Converged ? "converged" : "max_iters";
    pair.iterations = result.trace.iterations.size() - 1;
    traces[idx] = std::move(result.trace);
  });
  return {ChannelPairModelSet(std::move(marg_x), std::move(marg_y), std::move(pairs)), std::move(traces)};
}

}  // namespace comic
