#pragma once

#include <complex>

#include "cbe/quadrature.hpp"

namespace cbe::specfun {

/// Constants used in the Stirling-type expansions. Each one is validated by an
/// independent oracle in the test suite (the Barnes fit recovers
/// zeta_prime_minus_one, the digamma series recovers euler_gamma).
struct SpecialConstants {
    double euler_gamma = 0.57721566490153286060651209008240243;
    double zeta_prime_minus_one = -0.16542114370045092921391966024278064;
    double log_two_pi = 1.83787706640934548356065947281123528;
};

const SpecialConstants& constants();

/// Principal-branch log Gamma on the half-plane Re(z) > 0.
/// Stirling expansion after an argument-shift recurrence.
std::complex<double> log_gamma(std::complex<double> z);
double log_gamma(double x);

/// Polygamma psi_m for m in {0,1,2} on Re(z) > 0.
std::complex<double> polygamma(int m, std::complex<double> z);
double polygamma(int m, double x);

/// log(Gamma(w + a) / Gamma(w)) for w > 0, w + a > 0. For large w this avoids
/// the eps * |log Gamma| cancellation of forming the difference directly.
double log_gamma_ratio(double w, double a);

/// log of the Barnes G-function for z > 0: upward recursion
/// G(z+1) = Gamma(z) G(z) below the threshold, Stirling expansion above.
double log_barnes_g(double z);

namespace detail {
/// Same with an explicit recursion threshold; exposed so tests can check the
/// result is threshold-independent.
double log_barnes_g(double z, double threshold);
} // namespace detail

/// Upper tail of the standard Gaussian: (2*pi)^{-1/2} Int_m^inf e^{-u^2/2} du.
double gaussian_upper_tail(double m);

} // namespace cbe::specfun
