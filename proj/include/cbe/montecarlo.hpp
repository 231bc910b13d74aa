#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cbe/ensemble.hpp"

namespace cbe::mc {

struct McConfig {
    long n_samples = 10000;      // kept samples, split across chains
    long n_burn = 1000;          // burn-in sweeps per chain
    double proposal_scale = 0.0; // 0 => pi/sqrt(N), auto-tuned during burn-in
    long thinning = 2;           // sweeps between kept samples
    std::uint64_t seed = 1;
    int n_chains = 4;

    void validate() const;
};

/// Seeded MCMC output. Samples are ordered by (chain, index); the result is a
/// pure function of (params, config), independent of thread count.
struct SampleBatch {
    std::vector<double> values;                    // X_N samples
    std::optional<std::vector<double>> log_weights; // importance log-weights
    std::vector<std::uint32_t> chain;              // chain id per sample
    std::uint64_t seed = 0;
    long n_burn = 0;
    long thinning = 1;
    double acceptance_rate = 0.0;
    bool ill_tuned = false; // acceptance outside (0.05, 0.95)
};

struct TailEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    double n_effective = 0.0;
};

/// Unnormalised log density of the circular Jacobi (beta, delta) ensemble at
/// the given angle configuration; -inf on angle collision (or theta = 0 with
/// delta > 0).
double log_density_unnormalized(const EnsembleParams& p, const std::vector<double>& angles);

/// X_N = sum_i log|1 - e^{i theta_i}| = sum_i log(2 |sin(theta_i/2)|).
double compute_xn(const std::vector<double>& angles);

/// Metropolis sampler on the N-torus: one random coordinate per step, wrapped
/// uniform proposal. Chains run concurrently with per-chain RNG streams
/// derived from (seed, chain index).
SampleBatch mcmc_sample(const EnsembleParams& p, const McConfig& cfg);

/// Empirical frequency of values >= a with an autocorrelation-aware standard
/// error (effective sample size via the integrated autocorrelation time of
/// the indicator series).
TailEstimate tail_estimate_direct(const SampleBatch& batch, double a);

/// Importance-sampled tail probability: samples under the tilted ensemble
/// CJ(beta, delta = h/2) with h solving Lambda'(h) = a, and reweights by
/// exp(Lambda(h) - h X). Unbiased (the normalising constant is exact).
TailEstimate tail_estimate_tilted(long n, double beta, double a, const McConfig& cfg);

/// Self-normalised variant, provided for variance comparison.
TailEstimate tail_estimate_tilted_self_normalized(long n, double beta, double a,
                                                  const McConfig& cfg);

/// Tensor-product midpoint quadrature of the normalised density over
/// [0, 2pi)^N restricted to {X_N >= a}; N in {1, 2, 3}. Self-normalising.
double brute_force_tail(long n, double beta, double delta, double a, long grid_points);

/// Same grid, E[e^{z X_N}].
double brute_force_mgf(long n, double beta, double delta, double z, long grid_points);

/// One-sample Kolmogorov statistic of the standardized batch against N(0,1).
double empirical_kolmogorov(const SampleBatch& batch, double mean, double std);

/// CSV serialization (header: chain,index,x_value,log_weight), round-trip
/// precision. Throws std::runtime_error on I/O failure.
void write_csv(const SampleBatch& batch, const std::string& path);

namespace detail {

/// Serial reference implementations (single-threaded, same arithmetic order);
/// kept for testing and for the benchmark target.
SampleBatch mcmc_sample_serial(const EnsembleParams& p, const McConfig& cfg);
double brute_force_tail_serial(long n, double beta, double delta, double a, long grid_points);
double brute_force_mgf_serial(long n, double beta, double delta, double z, long grid_points);

/// Weighted tail estimator core: probability = mean(exp(log_norm - h x) 1{x >= a}).
TailEstimate weighted_tail(const SampleBatch& batch, double h, double log_norm, double a);

/// Integrated autocorrelation time of a series with the given mean.
double integrated_autocorr(const std::vector<double>& series, double mean);

} // namespace detail

} // namespace cbe::mc
