#pragma once

#include <functional>
#include <utility>

namespace cbe::specfun {

/// Tolerances and limits for the adaptive semi-infinite integrator.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
    /// The integration domain [0, T] stops growing once the sampled bound on
    /// |f| over the last segment falls below this.
    double truncation_decay_threshold = 1e-16;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double err_estimate = 0.0;
};

/// Integrates f over a finite interval [a, b] with adaptive Gauss-Kronrod
/// (G7/K15) bisection. Throws NumericalError when the subdivision budget is
/// exhausted with the error estimate above tolerance.
QuadratureResult integrate_finite(const std::function<double(double)>& f,
                                  double a, double b, const QuadratureSpec& spec);

/// Integrates f over (0, inf). f must be continuous on (0, inf) with at worst
/// a removable singularity at 0 and eventual exponential decay; endpoints are
/// never evaluated. The domain is extended geometrically until the integrand
/// bound drops below spec.truncation_decay_threshold.
QuadratureResult integrate_semi_infinite(const std::function<double(double)>& f,
                                         const QuadratureSpec& spec);

} // namespace cbe::specfun
