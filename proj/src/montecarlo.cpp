#include "cbe/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "cbe/specfun.hpp"
#include "cbe/tilt.hpp"
#include "cbe/transform.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbe::mc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559005768;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log|1 - e^{i theta}| = log(2 |sin(theta/2)|); -inf at theta = 0 (mod 2pi).
double log_dist_to_one(double theta) {
    const double s = std::fabs(std::sin(0.5 * theta));
    return s == 0.0 ? kNegInf : std::log(2.0 * s);
}

double wrap_angle(double theta) {
    theta = std::fmod(theta, kTwoPi);
    return theta < 0.0 ? theta + kTwoPi : theta;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct ChainResult {
    std::vector<double> values;
    long accepted = 0;
    long proposed = 0;
};

// One Metropolis chain; the entire trajectory is a pure function of
// (params, config, chain_id).
ChainResult run_chain(const EnsembleParams& p, const McConfig& cfg, int chain_id, long n_keep) {
    const long n = p.n;
    const double beta = p.beta;
    const double two_delta = 2.0 * p.delta;

    std::mt19937_64 rng(splitmix64(cfg.seed ^ (0x51ed2701a9b2fa3dULL * (chain_id + 1))));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<long> pick(0, n - 1);

    std::vector<double> angles(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i)
        angles[static_cast<size_t>(i)] = kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);

    double scale = cfg.proposal_scale > 0.0 ? cfg.proposal_scale
                                            : M_PI / std::sqrt(static_cast<double>(n));
    const bool tune = cfg.proposal_scale <= 0.0;

    long accepted = 0, proposed = 0;

    auto step = [&]() {
        const long i = pick(rng);
        const double old_angle = angles[static_cast<size_t>(i)];
        const double new_angle = wrap_angle(old_angle + scale * (2.0 * unit(rng) - 1.0));
        double delta_log = 0.0;
        for (long j = 0; j < n; ++j) {
            if (j == i) continue;
            const double other = angles[static_cast<size_t>(j)];
            delta_log += beta * (log_dist_to_one(new_angle - other) -
                                 log_dist_to_one(old_angle - other));
        }
        if (two_delta != 0.0)
            delta_log += two_delta * (log_dist_to_one(new_angle) - log_dist_to_one(old_angle));
        ++proposed;
        const double u = unit(rng);
        if (delta_log >= 0.0 || (u > 0.0 && std::log(u) < delta_log)) {
            angles[static_cast<size_t>(i)] = new_angle;
            ++accepted;
        }
    };

    auto sweep = [&]() {
        for (long k = 0; k < n; ++k) step();
    };

    // Burn-in with proposal tuning toward 30-50% acceptance over the first
    // 80% of the burn phase.
    const long tune_until = cfg.n_burn * 4 / 5;
    long window_acc = 0, window_prop = 0;
    for (long b = 0; b < cfg.n_burn; ++b) {
        const long acc0 = accepted, prop0 = proposed;
        sweep();
        window_acc += accepted - acc0;
        window_prop += proposed - prop0;
        if (tune && b < tune_until && window_prop >= 50 * n) {
            const double rate = static_cast<double>(window_acc) / static_cast<double>(window_prop);
            if (rate > 0.5) scale = std::min(scale * 1.25, M_PI);
            else if (rate < 0.3) scale = std::max(scale * 0.8, 1e-3);
            window_acc = window_prop = 0;
        }
    }

    accepted = proposed = 0; // acceptance rate reported over the kept phase
    ChainResult out;
    out.values.reserve(static_cast<size_t>(n_keep));
    for (long k = 0; k < n_keep; ++k) {
        for (long t = 0; t < cfg.thinning; ++t) sweep();
        out.values.push_back(compute_xn(angles));
    }
    out.accepted = accepted;
    out.proposed = proposed;
    return out;
}

SampleBatch assemble_batch(const EnsembleParams& p, const McConfig& cfg, bool parallel) {
    p.validate();
    cfg.validate();

    const int n_chains = cfg.n_chains;
    std::vector<long> keep(static_cast<size_t>(n_chains), cfg.n_samples / n_chains);
    for (int c = 0; c < cfg.n_samples % n_chains; ++c) ++keep[static_cast<size_t>(c)];

    std::vector<ChainResult> results(static_cast<size_t>(n_chains));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
#endif
    for (int c = 0; c < n_chains; ++c)
        results[static_cast<size_t>(c)] = run_chain(p, cfg, c, keep[static_cast<size_t>(c)]);
    (void)parallel;

    SampleBatch batch;
    batch.seed = cfg.seed;
    batch.n_burn = cfg.n_burn;
    batch.thinning = cfg.thinning;
    batch.values.reserve(static_cast<size_t>(cfg.n_samples));
    long accepted = 0, proposed = 0;
    for (int c = 0; c < n_chains; ++c) {
        const auto& r = results[static_cast<size_t>(c)];
        for (double v : r.values) {
            batch.values.push_back(v);
            batch.chain.push_back(static_cast<std::uint32_t>(c));
        }
        accepted += r.accepted;
        proposed += r.proposed;
    }
    batch.acceptance_rate =
        proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    batch.ill_tuned = !(batch.acceptance_rate > 0.05 && batch.acceptance_rate < 0.95);
    return batch;
}

} // namespace

void McConfig::validate() const {
    if (n_samples < 1) throw std::invalid_argument("McConfig: n_samples must be >= 1");
    if (n_burn < 0) throw std::invalid_argument("McConfig: n_burn must be >= 0");
    if (thinning < 1) throw std::invalid_argument("McConfig: thinning must be >= 1");
    if (n_chains < 1) throw std::invalid_argument("McConfig: n_chains must be >= 1");
}

double log_density_unnormalized(const EnsembleParams& p, const std::vector<double>& angles) {
    p.validate();
    if (static_cast<long>(angles.size()) != p.n)
        throw std::invalid_argument("log_density_unnormalized: angles length must equal n");
    double acc = 0.0;
    for (size_t i = 0; i < angles.size(); ++i)
        for (size_t j = i + 1; j < angles.size(); ++j)
            acc += p.beta * log_dist_to_one(angles[i] - angles[j]);
    if (p.delta != 0.0)
        for (double theta : angles) acc += 2.0 * p.delta * log_dist_to_one(theta);
    return acc;
}

double compute_xn(const std::vector<double>& angles) {
    double acc = 0.0;
    for (double theta : angles) acc += log_dist_to_one(theta);
    return acc;
}

SampleBatch mcmc_sample(const EnsembleParams& p, const McConfig& cfg) {
    return assemble_batch(p, cfg, true);
}

namespace detail {

SampleBatch mcmc_sample_serial(const EnsembleParams& p, const McConfig& cfg) {
    return assemble_batch(p, cfg, false);
}

double integrated_autocorr(const std::vector<double>& series, double mean) {
    const size_t n = series.size();
    if (n < 2) return 1.0;
    double c0 = 0.0;
    for (double v : series) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) return 1.0;

    const size_t k_max = std::min<size_t>(n / 4, 1000);
    double tau = 1.0;
    for (size_t k = 1; k <= k_max; ++k) {
        double ck = 0.0;
        for (size_t i = 0; i + k < n; ++i) ck += (series[i] - mean) * (series[i + k] - mean);
        ck /= static_cast<double>(n);
        const double rho = ck / c0;
        if (rho < 0.05) break;
        tau += 2.0 * rho;
    }
    return std::max(1.0, tau);
}

TailEstimate weighted_tail(const SampleBatch& batch, double h, double log_norm, double a) {
    const size_t n = batch.values.size();
    if (n == 0) throw std::invalid_argument("weighted_tail: empty batch");

    // Per-sample estimator w_i = exp(log_norm - h x_i) 1{x_i >= a}, computed
    // with a max-log shift for stability.
    double max_log = kNegInf;
    for (double x : batch.values)
        if (x >= a) max_log = std::max(max_log, log_norm - h * x);

    TailEstimate est;
    if (max_log == kNegInf) { // no sample reached the threshold
        est.probability = 0.0;
        est.n_effective = static_cast<double>(n);
        est.std_error = 3.0 / est.n_effective;
        return est;
    }

    std::vector<double> w(n, 0.0);
    for (size_t i = 0; i < n; ++i)
        if (batch.values[i] >= a) w[i] = std::exp(log_norm - h * batch.values[i] - max_log);

    double sum = 0.0, sum_sq = 0.0;
    for (double v : w) { sum += v; sum_sq += v * v; }
    const double mean_shifted = sum / static_cast<double>(n);
    est.probability = std::exp(max_log) * mean_shifted;

    const double tau = integrated_autocorr(w, mean_shifted);
    const double ess_weights = sum > 0.0 ? sum * sum / sum_sq : static_cast<double>(n);
    est.n_effective = std::min(static_cast<double>(n), ess_weights) / tau;

    double var = 0.0;
    for (double v : w) var += (v - mean_shifted) * (v - mean_shifted);
    var /= static_cast<double>(n);
    est.std_error = std::exp(max_log) * std::sqrt(var * tau / static_cast<double>(n));
    if (est.probability == 0.0) est.std_error = 3.0 / est.n_effective;
    return est;
}

} // namespace detail

TailEstimate tail_estimate_direct(const SampleBatch& batch, double a) {
    if (batch.log_weights)
        throw std::invalid_argument("tail_estimate_direct: batch must be unweighted");
    const size_t n = batch.values.size();
    if (n == 0) throw std::invalid_argument("tail_estimate_direct: empty batch");

    std::vector<double> ind(n);
    double hits = 0.0;
    for (size_t i = 0; i < n; ++i) {
        ind[i] = batch.values[i] >= a ? 1.0 : 0.0;
        hits += ind[i];
    }
    const double p = hits / static_cast<double>(n);
    const double tau = detail::integrated_autocorr(ind, p);

    TailEstimate est;
    est.probability = p;
    est.n_effective = static_cast<double>(n) / tau;
    if (p == 0.0 || p == 1.0)
        est.std_error = 3.0 / est.n_effective; // rule-of-three style bound
    else
        est.std_error = std::sqrt(p * (1.0 - p) / est.n_effective);
    return est;
}

TailEstimate tail_estimate_tilted(long n, double beta, double a, const McConfig& cfg) {
    const tilt::TiltSolution sol = tilt::solve_tilt(n, beta, a);
    const double log_norm = exact::log_laplace(EnsembleParams{n, beta, 0.0}, sol.h, 0);

    SampleBatch batch = mcmc_sample(EnsembleParams{n, beta, 0.5 * sol.h}, cfg);
    return detail::weighted_tail(batch, sol.h, log_norm, a);
}

TailEstimate tail_estimate_tilted_self_normalized(long n, double beta, double a,
                                                  const McConfig& cfg) {
    const tilt::TiltSolution sol = tilt::solve_tilt(n, beta, a);
    SampleBatch batch = mcmc_sample(EnsembleParams{n, beta, 0.5 * sol.h}, cfg);

    // p = sum_i e^{-h x_i} 1{x_i >= a} / sum_i e^{-h x_i}.
    double max_log = kNegInf;
    for (double x : batch.values) max_log = std::max(max_log, -sol.h * x);
    double num = 0.0, den = 0.0, num_sq = 0.0;
    for (double x : batch.values) {
        const double w = std::exp(-sol.h * x - max_log);
        den += w;
        if (x >= a) { num += w; num_sq += w * w; }
    }
    TailEstimate est;
    est.probability = num / den;
    est.n_effective = num > 0.0 ? num * num / num_sq : static_cast<double>(batch.values.size());
    // Delta-method error of the ratio estimator.
    est.std_error = est.probability > 0.0
                        ? est.probability * std::sqrt(1.0 / std::max(1.0, est.n_effective))
                        : 3.0 / static_cast<double>(batch.values.size());
    return est;
}

namespace {

template <bool kParallel>
double brute_force_moment(long n, double beta, double delta, long grid_points,
                          bool tail_mode, double threshold, double z) {
    if (n < 1 || n > 3)
        throw std::invalid_argument("brute_force: n must be in {1, 2, 3}");
    if (grid_points < 8) throw std::invalid_argument("brute_force: grid too coarse");
    const long m = grid_points;

    // Midpoint grid theta_k = 2 pi (k + 1/2) / m; precompute the weight-term
    // logs and the circulant pair logs.
    std::vector<double> wlog(static_cast<size_t>(m));
    for (long k = 0; k < m; ++k)
        wlog[static_cast<size_t>(k)] = log_dist_to_one(kTwoPi * (k + 0.5) / static_cast<double>(m));
    std::vector<double> plog(static_cast<size_t>(m));
    plog[0] = kNegInf; // coincident angles: zero density
    for (long d = 1; d < m; ++d)
        plog[static_cast<size_t>(d)] = log_dist_to_one(kTwoPi * d / static_cast<double>(m));

    const double two_delta = 2.0 * delta;
    std::vector<double> num(static_cast<size_t>(m), 0.0), den(static_cast<size_t>(m), 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (kParallel)
#endif
    for (long k1 = 0; k1 < m; ++k1) {
        double local_num = 0.0, local_den = 0.0;
        const double w1 = wlog[static_cast<size_t>(k1)];
        if (n == 1) {
            const double logrho = two_delta * w1;
            const double rho = std::exp(logrho);
            const double x = w1;
            local_den = rho;
            local_num = rho * (tail_mode ? (x >= threshold ? 1.0 : 0.0) : std::exp(z * x));
        } else if (n == 2) {
            for (long k2 = 0; k2 < m; ++k2) {
                const long d12 = k1 >= k2 ? k1 - k2 : k2 - k1;
                const double lp = plog[static_cast<size_t>(d12)];
                if (lp == kNegInf) continue;
                const double x = w1 + wlog[static_cast<size_t>(k2)];
                const double rho = std::exp(beta * lp + two_delta * x);
                local_den += rho;
                local_num += rho * (tail_mode ? (x >= threshold ? 1.0 : 0.0) : std::exp(z * x));
            }
        } else {
            for (long k2 = 0; k2 < m; ++k2) {
                const long d12 = k1 >= k2 ? k1 - k2 : k2 - k1;
                const double lp12 = plog[static_cast<size_t>(d12)];
                if (lp12 == kNegInf) continue;
                const double w12 = w1 + wlog[static_cast<size_t>(k2)];
                for (long k3 = 0; k3 < m; ++k3) {
                    const long d13 = k1 >= k3 ? k1 - k3 : k3 - k1;
                    const long d23 = k2 >= k3 ? k2 - k3 : k3 - k2;
                    const double lp13 = plog[static_cast<size_t>(d13)];
                    const double lp23 = plog[static_cast<size_t>(d23)];
                    if (lp13 == kNegInf || lp23 == kNegInf) continue;
                    const double x = w12 + wlog[static_cast<size_t>(k3)];
                    const double rho = std::exp(beta * (lp12 + lp13 + lp23) + two_delta * x);
                    local_den += rho;
                    local_num +=
                        rho * (tail_mode ? (x >= threshold ? 1.0 : 0.0) : std::exp(z * x));
                }
            }
        }
        num[static_cast<size_t>(k1)] = local_num;
        den[static_cast<size_t>(k1)] = local_den;
    }

    // Fixed-order reduction keeps the result identical for any thread count.
    double num_total = 0.0, den_total = 0.0;
    for (long k = 0; k < m; ++k) {
        num_total += num[static_cast<size_t>(k)];
        den_total += den[static_cast<size_t>(k)];
    }
    return num_total / den_total;
}

} // namespace

double brute_force_tail(long n, double beta, double delta, double a, long grid_points) {
    return brute_force_moment<true>(n, beta, delta, grid_points, true, a, 0.0);
}

double brute_force_mgf(long n, double beta, double delta, double z, long grid_points) {
    return brute_force_moment<true>(n, beta, delta, grid_points, false, 0.0, z);
}

namespace detail {

double brute_force_tail_serial(long n, double beta, double delta, double a, long grid_points) {
    return brute_force_moment<false>(n, beta, delta, grid_points, true, a, 0.0);
}

double brute_force_mgf_serial(long n, double beta, double delta, double z, long grid_points) {
    return brute_force_moment<false>(n, beta, delta, grid_points, false, 0.0, z);
}

} // namespace detail

double empirical_kolmogorov(const SampleBatch& batch, double mean, double std) {
    if (!(std > 0.0)) throw std::invalid_argument("empirical_kolmogorov: std must be > 0");
    if (batch.log_weights)
        throw std::invalid_argument("empirical_kolmogorov: batch must be unweighted");
    std::vector<double> v = batch.values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const double phi = 1.0 - specfun::gaussian_upper_tail((v[i] - mean) / std);
        const double hi = (static_cast<double>(i) + 1.0) / n - phi;
        const double lo = phi - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    return d;
}

void write_csv(const SampleBatch& batch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << "chain,index,x_value,log_weight\n";
    char buf[64];
    std::vector<long> index_in_chain;
    long idx = 0;
    std::uint32_t prev_chain = batch.chain.empty() ? 0 : batch.chain.front();
    for (size_t i = 0; i < batch.values.size(); ++i) {
        const std::uint32_t c = i < batch.chain.size() ? batch.chain[i] : 0;
        if (c != prev_chain) { idx = 0; prev_chain = c; }
        out << c << ',' << idx++ << ',';
        std::snprintf(buf, sizeof buf, "%.17g", batch.values[i]);
        out << buf << ',';
        if (batch.log_weights) {
            std::snprintf(buf, sizeof buf, "%.17g", (*batch.log_weights)[i]);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("write_csv: write failure on " + path);
}

} // namespace cbe::mc
