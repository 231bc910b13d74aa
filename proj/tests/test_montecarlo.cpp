#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "cbe/asymptotics.hpp"
#include "cbe/montecarlo.hpp"
#include "cbe/tilt.hpp"
#include "cbe/transform.hpp"

using namespace cbe;
using namespace cbe::mc;

namespace {

constexpr double kLog2 = 0.693147180559945309417232121458176568;

double lam(long n, double beta, double z, int order) {
    return exact::log_laplace(EnsembleParams{n, beta, 0.0}, z, order);
}

McConfig quick_config(long samples, std::uint64_t seed) {
    McConfig cfg;
    cfg.n_samples = samples;
    cfg.n_burn = 400;
    cfg.thinning = 2;
    cfg.seed = seed;
    return cfg;
}

// Empirical mean of f(X) with an autocorrelation-aware standard error.
struct MeanWithError {
    double mean;
    double se;
};
template <typename F>
MeanWithError batch_mean(const SampleBatch& batch, const F& f) {
    std::vector<double> y(batch.values.size());
    double m = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        y[i] = f(batch.values[i]);
        m += y[i];
    }
    m /= static_cast<double>(y.size());
    double var = 0.0;
    for (double v : y) var += (v - m) * (v - m);
    var /= static_cast<double>(y.size());
    const double tau = detail::integrated_autocorr(y, m);
    return {m, std::sqrt(var * tau / static_cast<double>(y.size()))};
}

} // namespace

TEST_CASE("log density closed forms") {
    CHECK(log_density_unnormalized(EnsembleParams{1, 3.0, 0.0}, {0.3}) == 0.0);
    CHECK(log_density_unnormalized(EnsembleParams{1, 0.5, 0.0}, {5.1}) == 0.0);
    CHECK(std::fabs(log_density_unnormalized(EnsembleParams{2, 2.0, 0.0}, {0.0, M_PI}) -
                    2.0 * kLog2) < 1e-14);
    CHECK_THROWS_AS(log_density_unnormalized(EnsembleParams{3, 2.0, 0.0}, {0.1, 0.2}),
                    std::invalid_argument);
    // Collisions and theta = 0 with delta > 0 have zero density.
    CHECK(log_density_unnormalized(EnsembleParams{2, 2.0, 0.0}, {1.0, 1.0}) ==
          -std::numeric_limits<double>::infinity());
    CHECK(log_density_unnormalized(EnsembleParams{1, 2.0, 1.0}, {0.0}) ==
          -std::numeric_limits<double>::infinity());
}

TEST_CASE("log density is rotation invariant at delta = 0") {
    const EnsembleParams p{4, 1.7, 0.0};
    const std::vector<double> angles{0.4, 1.9, 3.3, 5.6};
    std::vector<double> shifted(angles);
    for (double& a : shifted) a = std::fmod(a + 0.7, 2.0 * M_PI);
    CHECK(std::fabs(log_density_unnormalized(p, angles) -
                    log_density_unnormalized(p, shifted)) < 1e-12);
}

TEST_CASE("compute_xn closed forms") {
    CHECK(std::fabs(compute_xn({M_PI}) - kLog2) < 1e-15);
    const std::vector<double> all_pi(6, M_PI);
    CHECK(std::fabs(compute_xn(all_pi) - 6.0 * kLog2) < 1e-14);
    CHECK(std::fabs(compute_xn({M_PI / 2.0, 3.0 * M_PI / 2.0}) - kLog2) < 1e-14);
    CHECK(compute_xn({0.0, 1.0}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("mcmc determinism and serial equivalence") {
    const EnsembleParams p{4, 2.0, 0.5};
    const auto cfg = quick_config(2000, 99);
    const auto b1 = mcmc_sample(p, cfg);
    const auto b2 = mcmc_sample(p, cfg);
    REQUIRE(b1.values.size() == b2.values.size());
    for (size_t i = 0; i < b1.values.size(); ++i) CHECK(b1.values[i] == b2.values[i]);

    const auto bs = detail::mcmc_sample_serial(p, cfg);
    REQUIRE(bs.values.size() == b1.values.size());
    for (size_t i = 0; i < b1.values.size(); ++i) CHECK(bs.values[i] == b1.values[i]);
    CHECK(bs.acceptance_rate == b1.acceptance_rate);

    CHECK(b1.acceptance_rate > 0.05);
    CHECK(b1.acceptance_rate < 0.95);
    CHECK(!b1.ill_tuned);
}

TEST_CASE("mcmc flags ill-tuned chains") {
    // A fixed oversized proposal on a strongly repelling gas collapses the
    // acceptance rate; no tuning happens when the scale is explicit.
    McConfig cfg = quick_config(500, 77);
    cfg.proposal_scale = M_PI;
    const auto batch = mcmc_sample(EnsembleParams{64, 8.0, 0.0}, cfg);
    CHECK(batch.acceptance_rate < 0.05);
    CHECK(batch.ill_tuned);
}

TEST_CASE("mcmc arc-length tail at N = 1") {
    const auto batch = mcmc_sample(EnsembleParams{1, 1.3, 0.0}, quick_config(100000, 5));
    const auto tail = tail_estimate_direct(batch, 0.0);
    // X_1 >= 0 iff theta in [pi/3, 5pi/3]: probability 2/3 for any beta.
    CHECK(std::fabs(tail.probability - 2.0 / 3.0) <= 3.0 * tail.std_error);
    CHECK(tail.std_error < 0.01);
    CHECK(tail.n_effective <= static_cast<double>(batch.values.size()));
}

TEST_CASE("mcmc matches exact moments") {
    { // N = 1: E[e^{2X}] = 2.
        const auto batch = mcmc_sample(EnsembleParams{1, 2.0, 0.0}, quick_config(100000, 11));
        const auto m = batch_mean(batch, [](double x) { return std::exp(2.0 * x); });
        CHECK(std::fabs(m.mean - 2.0) <= 3.0 * m.se);
    }
    { // N = 2: E[e^{2X}] = 3 (telescoping).
        const auto batch = mcmc_sample(EnsembleParams{2, 2.0, 0.0}, quick_config(100000, 12));
        const auto m = batch_mean(batch, [](double x) { return std::exp(2.0 * x); });
        CHECK(std::fabs(m.mean - 3.0) <= 3.0 * m.se);
    }
}

TEST_CASE("mgf matching across the parameter grid") {
    // The decisive check that the sampler targets the stated ensemble: the
    // empirical Laplace transform matches exp(Lambda) within 4 SE.
    for (long n : {1L, 2L, 4L})
        for (double beta : {1.0, 2.0, 4.0})
            for (double delta : {0.0, 1.0}) {
                const EnsembleParams p{n, beta, delta};
                const auto batch =
                    mcmc_sample(p, quick_config(20000, 1000 + n + 10 * std::lround(beta)));
                for (double z : {0.5, 1.0}) {
                    const auto m = batch_mean(batch, [&](double x) { return std::exp(z * x); });
                    const double want = std::exp(exact::log_laplace(p, z, 0));
                    INFO("n=", n, " beta=", beta, " delta=", delta, " z=", z);
                    CHECK(std::fabs(m.mean - want) <= 4.0 * m.se);
                }
            }
}

TEST_CASE("tilting consistency: tilted mean matches Lambda'") {
    const long n = 4;
    const double beta = 2.0;
    const double h = 3.0;
    const auto batch =
        mcmc_sample(EnsembleParams{n, beta, 0.5 * h}, quick_config(60000, 31));
    const auto m = batch_mean(batch, [](double x) { return x; });
    CHECK(std::fabs(m.mean - lam(n, beta, h, 1)) <= 4.0 * m.se);
}

TEST_CASE("direct tail estimator edges") {
    SampleBatch batch;
    batch.values = {0.1, 0.5, 0.2, 0.9};
    batch.chain = {0, 0, 0, 0};
    CHECK(tail_estimate_direct(batch, 0.0).probability == 1.0);
    const auto none = tail_estimate_direct(batch, 2.0);
    CHECK(none.probability == 0.0);
    CHECK(none.std_error == doctest::Approx(3.0 / none.n_effective));
    batch.log_weights = std::vector<double>{0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(tail_estimate_direct(batch, 0.5), std::invalid_argument);
}

TEST_CASE("direct tail matches quadrature at N = 2") {
    const auto batch = mcmc_sample(EnsembleParams{2, 2.0, 0.0}, quick_config(100000, 17));
    const auto tail = tail_estimate_direct(batch, 0.8);
    const double exact_tail = brute_force_tail(2, 2.0, 0.0, 0.8, 4096);
    CHECK(std::fabs(tail.probability - exact_tail) <= 3.0 * tail.std_error);
}

TEST_CASE("weighted estimator reduces to the direct one at h = 0") {
    const auto batch = mcmc_sample(EnsembleParams{3, 1.0, 0.0}, quick_config(5000, 23));
    const auto direct = tail_estimate_direct(batch, 0.4);
    const auto weighted = detail::weighted_tail(batch, 0.0, 0.0, 0.4);
    CHECK(weighted.probability == direct.probability);
}

TEST_CASE("tilted tail estimator against quadrature and the direct path") {
    { // Rare-ish event at N = 2.
        const auto est = tail_estimate_tilted(2, 2.0, 1.2, quick_config(100000, 41));
        const double exact_tail = brute_force_tail(2, 2.0, 0.0, 1.2, 4096);
        CHECK(std::fabs(est.probability - exact_tail) <= 3.0 * std::max(est.std_error, 1e-12));
        CHECK(est.n_effective > 100.0);
    }
    { // CLT-regime agreement between the two estimators at N = 8.
        const auto tilted = tail_estimate_tilted(8, 2.0, 1.0, quick_config(60000, 43));
        const auto batch = mcmc_sample(EnsembleParams{8, 2.0, 0.0}, quick_config(60000, 44));
        const auto direct = tail_estimate_direct(batch, 1.0);
        const double se = std::hypot(tilted.std_error, direct.std_error);
        CHECK(std::fabs(tilted.probability - direct.probability) <= 3.0 * se);
    }
    { // Self-normalised variant lands in the same place.
        const auto sn = tail_estimate_tilted_self_normalized(2, 2.0, 1.2, quick_config(100000, 47));
        const double exact_tail = brute_force_tail(2, 2.0, 0.0, 1.2, 4096);
        CHECK(std::fabs(sn.probability - exact_tail) <= 4.0 * std::max(sn.std_error, 1e-6));
    }
}

TEST_CASE("brute force grid quadrature") {
    CHECK(std::fabs(brute_force_tail(1, 2.0, 0.0, 0.0, 4000000) - 2.0 / 3.0) < 1e-6);
    // Boundary of the support: the only contribution can be the single grid
    // point sitting exactly on theta = pi (odd grids), worth 1/M.
    CHECK(brute_force_tail(1, 1.0, 0.0, kLog2, 100000) == 0.0);
    CHECK(brute_force_tail(1, 1.0, 0.0, kLog2, 100001) <= 1.0 / 100001 + 1e-12);
    CHECK(std::fabs(brute_force_mgf(2, 2.0, 0.0, 2.0, 2048) - 3.0) < 1e-6);
    CHECK_THROWS_AS(brute_force_tail(4, 2.0, 0.0, 0.1, 64), std::invalid_argument);

    // Grid refinement stability at acceptance settings.
    const double c1 = brute_force_tail(2, 2.0, 0.0, 0.8, 2048);
    const double c2 = brute_force_tail(2, 2.0, 0.0, 0.8, 4096);
    CHECK(std::fabs(c1 - c2) < 1e-4);

    // Serial reference is bit-identical to the parallel kernel.
    CHECK(detail::brute_force_tail_serial(2, 1.5, 0.3, 0.5, 512) ==
          brute_force_tail(2, 1.5, 0.3, 0.5, 512));
    CHECK(detail::brute_force_mgf_serial(3, 2.0, 0.0, 1.0, 128) ==
          brute_force_mgf(3, 2.0, 0.0, 1.0, 128));

    // N = 3 sanity: telescoping E[e^{2X}] = N + 1 at beta = 2.
    CHECK(std::fabs(brute_force_mgf(3, 2.0, 0.0, 2.0, 256) - 4.0) < 1e-4);
}

TEST_CASE("empirical kolmogorov statistic") {
    SampleBatch gauss;
    std::mt19937_64 rng(2718);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < 10000; ++i) gauss.values.push_back(nd(rng));
    gauss.chain.assign(10000, 0);
    CHECK(empirical_kolmogorov(gauss, 0.0, 1.0) < 0.05);

    SampleBatch constant;
    constant.values.assign(100, 1.0);
    constant.chain.assign(100, 0);
    CHECK(empirical_kolmogorov(constant, 0.0, 1.0) >= 0.5);
    CHECK_THROWS_AS(empirical_kolmogorov(gauss, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("tilted chain is near-gaussian and below the kolmogorov bound") {
    const long n = 16;
    const double delta = 8.0;
    const auto batch =
        mcmc_sample(EnsembleParams{n, 2.0, delta}, quick_config(50000, 53));
    const double mean = lam(n, 2.0, 2.0 * delta, 1);
    const double sd = std::sqrt(lam(n, 2.0, 2.0 * delta, 2));
    const double d = empirical_kolmogorov(batch, mean, sd);
    CHECK(d < asymptotics::kolmogorov_bound(n, 2.0, delta));
    CHECK(d < 0.2); // the distance itself is small, not merely bounded
}

TEST_CASE("csv serialization round trip") {
    const auto batch = mcmc_sample(EnsembleParams{2, 2.0, 0.0}, quick_config(500, 61));
    const std::string path = "test_batch.csv";
    write_csv(batch, path);
    write_csv(batch, "test_batch_again.csv");

    std::ifstream f1(path), f2("test_batch_again.csv");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str()); // byte-identical for identical batches

    std::istringstream in(s1.str());
    std::string header;
    std::getline(in, header);
    CHECK(header == "chain,index,x_value,log_weight");
    size_t rows = 0;
    std::string line;
    double recovered_first = 0.0;
    while (std::getline(in, line)) {
        if (rows == 0) {
            const auto p1 = line.find(',');
            const auto p2 = line.find(',', p1 + 1);
            const auto p3 = line.find(',', p2 + 1);
            recovered_first = std::stod(line.substr(p2 + 1, p3 - p2 - 1));
        }
        ++rows;
    }
    CHECK(rows == batch.values.size());
    CHECK(recovered_first == batch.values.front()); // full round-trip precision
    std::remove(path.c_str());
    std::remove("test_batch_again.csv");
}

TEST_CASE("write_csv reports unwritable paths") {
    SampleBatch batch;
    batch.values = {1.0};
    batch.chain = {0};
    CHECK_THROWS_AS(write_csv(batch, "/nonexistent-dir/batch.csv"), std::runtime_error);
}
