#pragma once

namespace comic {

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse standard normal CDF: Acklam's rational approximation followed by
/// one Halley refinement step (absolute error well below 1e-9 on (0,1)).
/// Returns -inf / +inf at 0 / 1.
double normal_quantile(double p);

/// P[Z1 <= h, Z2 <= k] for a standard bivariate normal with correlation rho,
/// via Plackett's identity d/dr Phi2 = phi2 integrated adaptively over [0, rho].
double bivariate_normal_cdf(double h, double k, double rho);

}  // namespace comic
