#pragma once

#include <optional>
#include <utility>

#include "cbe/estimates.hpp"
#include "cbe/quadrature.hpp"
#include "cbe/tilt.hpp"

namespace cbe::asymptotics {

/// Leading coefficients of the large-deviation expansion of the scaled tilt
/// lambda_N / N around theta^{-1}(alpha0).
struct LargeDevExpansion {
    double l0 = 0.0;                        // theta^{-1}(alpha0)
    double l1_star = 0.0;                   // 1/N correction (0 at beta = 2)
    std::optional<double> l2_star;          // 1/N^2 correction, beta = 2 only
    double rate = 0.0;                      // beta' * I(l0)
    std::optional<double> o1_residual;      // beta = 2: Lambda* - N^2 I - (log N)/12
};

/// theta(x) = (1+2x)log(1+2x) - (1+x)log(1+x) - x log(4x), a continuous
/// increasing bijection from [0, inf) onto [0, log 2).
double theta(double x);
double theta_prime(double x);
/// Inverse of theta on [0, log 2), safeguarded Newton to residual 1e-12.
double theta_inv(double y);

/// Finite-N modification theta_{N,beta}; equals theta at beta = 2.
double theta_n_beta(double x, long n, double beta);
double theta_n_beta_inv(double y, long n, double beta);

/// log Psi(z) with Psi(z) = G(1+z/2)^2 / G(1+z), for z > -1.
double psi_haar(double z);

/// log Psi_beta(z) for z > 0, reducing to psi_haar at beta = 2.
double log_psi_beta(double z, double beta, const specfun::QuadratureSpec& spec);

/// The constants A_beta (double-integral display), B_beta and C_beta.
/// A_2 = 0 by convention (eta_2 = 0). Memoized per beta for the given spec's
/// default tolerances.
double a_beta_const(double beta, const specfun::QuadratureSpec& spec);
double b_beta_const(double beta, const specfun::QuadratureSpec& spec);
double c_beta_const(double beta, const specfun::QuadratureSpec& spec);

/// Large-deviation rate function I(x), x > 0 (continuous limit 0 at 0).
double rate_i(double x);
/// The speed-N^2 scaling limit Lambda(s) of Lambda_{N,2}(sN)/N^2; +inf for s < 0.
double hko_lambda(double s);
/// Legendre-Fenchel dual sup_s (x s - Lambda(s)) by golden-section maximization.
double hko_rate(double x);

/// Tail estimators. Each is callable in any regime; `quality` reports whether
/// the inputs sit inside the estimator's intended range.
DeviationEstimate estimate_clt_tail(long n, double beta, double x);
DeviationEstimate estimate_small_moderate(long n, double beta, double x,
                                          const specfun::QuadratureSpec& spec);
DeviationEstimate estimate_true_moderate(long n, double beta, double x,
                                         const specfun::QuadratureSpec& spec);
DeviationEstimate estimate_simplified(long n, double beta, double x,
                                      const specfun::QuadratureSpec& spec);

/// Large-deviation expansion at a = alpha0 * N plus the tilted upper bound.
/// alpha0 must lie inside the guard band [0.02, 0.66].
std::pair<LargeDevExpansion, DeviationEstimate> large_dev(long n, double beta, double alpha0);

/// Berry-Esseen bound C M / (delta v^{3/2}) on the Kolmogorov distance of the
/// standardized X_N under CJ(beta, delta), delta >= 1. C = 14; M is the
/// computed supremum over the control zone |xi| <= delta of the Fourier
/// remainder display divided by |xi|^3.
double kolmogorov_bound(long n, double beta, double delta);

} // namespace cbe::asymptotics
