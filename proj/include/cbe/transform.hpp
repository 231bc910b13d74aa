#pragma once

#include <complex>

#include "cbe/ensemble.hpp"
#include "cbe/quadrature.hpp"

namespace cbe::exact {

/// Value of the log-Laplace transform of X_N (or one of its z-derivatives).
struct TransformValue {
    int order = 0;                 // 0..3
    std::complex<double> at{};     // argument z
    std::complex<double> value{};
};

/// Log-Laplace transform Lambda_{N,beta,delta}(z) = log E[e^{z X_N}] and its
/// first three z-derivatives, as finite sums of log-Gamma / polygamma terms.
/// Requires 2*delta + Re(z) > -1. Cost is O(N).
TransformValue log_laplace(const EnsembleParams& p, std::complex<double> z, int order);

/// Convenience for real arguments.
double log_laplace(const EnsembleParams& p, double z, int order);

/// The smooth positive functions from the Binet representation.
/// varphi(s) = (1/s)(1/2 - 1/s + 1/(e^s - 1)), continued by its series at 0.
double varphi(double s);
double varphi_prime(double s);
/// phi_beta(s) = varphi(s) - beta'^2 varphi(s beta').
double phi_beta(double s, double beta);
/// eta_beta(s) = s beta' phi_beta(s) / ((e^{s beta'} - 1) phi_beta(0)),
/// normalised so eta_beta(0) = 1. Identically 0 at beta = 2 (rejected here;
/// callers special-case beta = 2).
double eta_beta(double s, double beta);
/// Closed-form derivative of eta_beta.
double eta_beta_prime(double s, double beta);

/// Binet decomposition Lambda_{N,beta}(z) = m(z) + g_{N,beta}(z) + k_{N,beta}(z)
/// at delta = 0, Re(z) > 0 (real z for the quadrature part).
double m_func(double z);
std::complex<double> m_func(std::complex<double> z);
double k_n_beta(const EnsembleParams& p, double z);
double g_n_beta(const EnsembleParams& p, double z, const specfun::QuadratureSpec& spec);

/// Right-hand side of the identity relating Lambda_{N,beta} to the beta = 2
/// transform; equals log_laplace(p, z, 0) exactly (numerically checked).
double comparison_rhs(const EnsembleParams& p, double z, const specfun::QuadratureSpec& spec);

/// G_{N,beta}(z) and its first three derivatives (beta != 2), as integrals of
/// eta_beta against the tilted-difference kernels.
double g_big_n_beta(const EnsembleParams& p, double z, int order,
                    const specfun::QuadratureSpec& spec);

/// F_beta(z) = Int (1-e^{-sz/2})^2 eta_beta(s)/s ds and its derivative
/// H_beta(z) = Int eta_beta(s) (e^{-sz/2} - e^{-sz}) ds.
double f_beta(double z, double beta, const specfun::QuadratureSpec& spec);
double h_beta(double z, double beta, const specfun::QuadratureSpec& spec);

} // namespace cbe::exact
