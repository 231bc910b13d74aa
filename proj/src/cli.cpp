#include "cbe/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbe/asymptotics.hpp"
#include "cbe/errors.hpp"
#include "cbe/montecarlo.hpp"
#include "cbe/specfun.hpp"
#include "cbe/tilt.hpp"
#include "cbe/transform.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cbe::cli {

namespace {

using nlohmann::json;

constexpr double kLog2 = 0.693147180559945309417232121458176568;

constexpr int kExitOk = 0;
constexpr int kExitValidateFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Options {
    long n = 10;
    double beta = 2.0;
    double delta = 0.0;
    std::optional<double> x;
    std::string x_grid;
    long samples = 100000;
    long burn = 500;
    long thin = 2;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";
    bool quick = false;
    bool fault_sign_flip = false; // test hook for the validation suite
};

/// A row-oriented table with a fixed header, rendered as CSV or JSON.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void render(std::ostream& os, const std::string& format) const {
        if (format == "json") {
            json arr = json::array();
            for (const auto& row : rows) {
                json obj;
                for (size_t c = 0; c < header.size(); ++c) {
                    // Numeric fields stay numeric in JSON when they parse.
                    try {
                        size_t pos = 0;
                        double v = std::stod(row[c], &pos);
                        if (pos == row[c].size()) { obj[header[c]] = v; continue; }
                    } catch (...) {}
                    obj[header[c]] = row[c];
                }
                arr.push_back(obj);
            }
            os << arr.dump(2) << '\n';
            return;
        }
        for (size_t c = 0; c < header.size(); ++c)
            os << header[c] << (c + 1 < header.size() ? "," : "\n");
        for (const auto& row : rows)
            for (size_t c = 0; c < row.size(); ++c)
                os << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
};

int emit(const Table& table, const Options& opt, std::ostream& out, std::ostream& err) {
    if (opt.out_path.empty()) {
        table.render(out, opt.format);
        return kExitOk;
    }
    std::ofstream f(opt.out_path);
    if (!f) {
        err << "error: cannot open output path " << opt.out_path << "\n";
        return kExitIo;
    }
    table.render(f, opt.format);
    return f ? kExitOk : kExitIo;
}

std::vector<double> requested_grid(const Options& opt, const char* param) {
    if (!opt.x_grid.empty()) return parse_grid(opt.x_grid);
    if (opt.x) return {*opt.x};
    throw std::invalid_argument(std::string("missing parameter: ") + param +
                                " (use --x or --x-grid)");
}

void apply_thread_cap() {
#ifdef _OPENMP
    if (const char* env = std::getenv("CBE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
    }
#endif
}

// ---------------------------------------------------------------- commands

int cmd_exact(const Options& opt, std::ostream& out, std::ostream& err) {
    EnsembleParams p{opt.n, opt.beta, opt.delta};
    const auto grid = requested_grid(opt, "z");
    for (double z : grid)
        if (!(2.0 * opt.delta + z > -1.0))
            throw std::invalid_argument("parameter x: requires 2*delta + z > -1");

    Table table;
    table.header = {"z", "lambda", "dlambda", "d2lambda", "d3lambda"};
    table.rows.resize(grid.size());
    std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < grid.size(); ++i) {
        try {
            const double z = grid[i];
            table.rows[i] = {fmt(z), fmt(exact::log_laplace(p, z, 0)),
                             fmt(exact::log_laplace(p, z, 1)), fmt(exact::log_laplace(p, z, 2)),
                             fmt(exact::log_laplace(p, z, 3))};
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            failure = e.what();
        }
    }
    if (!failure.empty()) throw NumericalError(failure);
    return emit(table, opt, out, err);
}

int cmd_estimate(const Options& opt, std::ostream& out, std::ostream& err) {
    const auto grid = requested_grid(opt, "x");
    const specfun::QuadratureSpec spec;

    Table table;
    table.header = {"x", "regime", "method", "probability", "prefactor", "exponent", "quality"};
    std::vector<std::vector<std::vector<std::string>>> per_x(grid.size());
    std::string failure;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < grid.size(); ++i) {
        try {
            const double x = grid[i];
            auto& rows = per_x[i];
            const auto regime = tilt::classify_regime(opt.n, opt.beta, x);
            const std::string rtag = tilt::to_string(regime.tag);
            if (regime.tag == tilt::RegimeTag::OutOfRange) {
                rows.push_back(
                    {fmt(x), rtag, "OutOfRange", fmt(0.0), fmt(0.0), fmt(0.0), "Equivalent"});
                continue;
            }
            auto push = [&](const DeviationEstimate& e) {
                rows.push_back({fmt(x), rtag, to_string(e.method), fmt(e.probability),
                                fmt(e.prefactor), fmt(e.exponent), to_string(e.quality)});
            };
            push(asymptotics::estimate_clt_tail(opt.n, opt.beta, x));
            // Estimators whose domain excludes this x are skipped, not fatal.
            try {
                push(asymptotics::estimate_small_moderate(opt.n, opt.beta, x, spec));
            } catch (const std::exception&) {}
            try {
                push(asymptotics::estimate_true_moderate(opt.n, opt.beta, x, spec));
            } catch (const std::exception&) {}
            try {
                push(asymptotics::estimate_simplified(opt.n, opt.beta, x, spec));
            } catch (const std::exception&) {}
            push(tilt::scheme_estimate(opt.n, opt.beta, x));
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            failure = e.what();
        }
    }
    if (!failure.empty()) throw NumericalError(failure);
    for (auto& rows : per_x)
        for (auto& r : rows) table.rows.push_back(std::move(r));
    return emit(table, opt, out, err);
}

int cmd_rate_curve(const Options& opt, std::ostream& out, std::ostream& err) {
    std::vector<double> grid;
    if (!opt.x_grid.empty() || opt.x)
        grid = requested_grid(opt, "x");
    else
        grid = parse_grid("0.02:0.68:0.02");
    for (double x : grid)
        if (!(x > 0.0 && x < kLog2))
            throw std::invalid_argument("parameter x: rate curve requires x in (0, log 2)");

    const double bp = 0.5 * opt.beta;
    Table table;
    table.header = {"x", "theta_inv", "rate", "hko_rate"};
    table.rows.resize(grid.size());
    std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < grid.size(); ++i) {
        try {
            const double x = grid[i];
            const double t = asymptotics::theta_inv(x);
            table.rows[i] = {fmt(x), fmt(t), fmt(bp * asymptotics::rate_i(t)),
                             fmt(asymptotics::hko_rate(x))};
        } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
            failure = e.what();
        }
    }
    if (!failure.empty()) throw NumericalError(failure);
    return emit(table, opt, out, err);
}

int cmd_sample(const Options& opt, std::ostream& out, std::ostream& err) {
    EnsembleParams p{opt.n, opt.beta, opt.delta};
    mc::McConfig cfg;
    cfg.n_samples = opt.samples;
    cfg.n_burn = opt.burn;
    cfg.thinning = opt.thin;
    cfg.seed = opt.seed;

    mc::SampleBatch batch = mc::mcmc_sample(p, cfg);

    double mean = 0.0;
    for (double v : batch.values) mean += v;
    mean /= static_cast<double>(batch.values.size());
    double var = 0.0;
    for (double v : batch.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(batch.values.size());

    json summary;
    summary["n"] = opt.n;
    summary["beta"] = opt.beta;
    summary["delta"] = opt.delta;
    summary["seed"] = opt.seed;
    summary["samples"] = batch.values.size();
    summary["mean"] = mean;
    summary["variance"] = var;
    summary["acceptance_rate"] = batch.acceptance_rate;
    summary["ill_tuned"] = batch.ill_tuned;
    {
        // Effective size of the plain mean via the autocorrelation time.
        const double tau = mc::detail::integrated_autocorr(batch.values, mean);
        summary["effective_size"] = static_cast<double>(batch.values.size()) / tau;
    }
    if (opt.delta > 0.0) {
        // Kolmogorov distance against the tilted-Gaussian prediction
        // (mean Lambda'(2 delta), variance Lambda''(2 delta)).
        EnsembleParams untilted{opt.n, opt.beta, 0.0};
        const double pred_mean = exact::log_laplace(untilted, 2.0 * opt.delta, 1);
        const double pred_var = exact::log_laplace(untilted, 2.0 * opt.delta, 2);
        summary["predicted_mean"] = pred_mean;
        summary["predicted_variance"] = pred_var;
        summary["kolmogorov"] = mc::empirical_kolmogorov(batch, pred_mean, std::sqrt(pred_var));
    } else {
        summary["kolmogorov"] =
            var > 0.0 ? mc::empirical_kolmogorov(batch, 0.0, std::sqrt(var)) : 1.0;
    }

    if (opt.delta > 0.0) {
        // Untilting weights back to the delta = 0 ensemble: log w = Lambda(h) - h x.
        EnsembleParams untilted{opt.n, opt.beta, 0.0};
        const double h = 2.0 * opt.delta;
        const double log_norm = exact::log_laplace(untilted, h, 0);
        std::vector<double> lw(batch.values.size());
        for (size_t i = 0; i < lw.size(); ++i) lw[i] = log_norm - h * batch.values[i];
        batch.log_weights = std::move(lw);
    }

    const std::string csv_path = opt.out_path.empty() ? "samples.csv" : opt.out_path;
    try {
        mc::write_csv(batch, csv_path);
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }

    const std::string summary_path = csv_path + ".summary.json";
    std::ofstream sf(summary_path);
    if (!sf) {
        err << "error: cannot open output path " << summary_path << "\n";
        return kExitIo;
    }
    sf << summary.dump(2) << '\n';
    out << summary.dump(2) << '\n';
    return sf ? kExitOk : kExitIo;
}

// One validation check: prints a pass/fail line with the measured residual.
struct Battery {
    std::ostream& out;
    bool all_pass = true;

    void check(const std::string& name, double residual, double tol) {
        const bool ok = residual <= tol;
        all_pass = all_pass && ok;
        out << (ok ? "[PASS] " : "[FAIL] ") << name << ": residual=" << fmt(residual)
            << " tol=" << fmt(tol) << "\n";
    }
    void check_bool(const std::string& name, bool ok, const std::string& detail) {
        all_pass = all_pass && ok;
        out << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    }
};

int cmd_validate(const Options& opt, std::ostream& out) {
    const specfun::QuadratureSpec spec;
    Battery bat{out};

    { // Exact moments: exp(Lambda_{N,2}(2)) = N + 1.
        double worst = 0.0;
        for (long n = 1; n <= 200; ++n) {
            const double lhs = std::exp(exact::log_laplace(EnsembleParams{n, 2.0, 0.0}, 2.0, 0));
            worst = std::max(worst, std::fabs(lhs - (n + 1.0)) / (n + 1.0));
        }
        bat.check("telescoping moments (N<=200)", worst, 1e-12);
    }

    { // Comparison identity across the ensemble grid.
        const double sign = opt.fault_sign_flip ? -1.0 : 1.0;
        double worst = 0.0;
        for (long n : {2L, 5L, 10L, 30L})
            for (double beta : {0.5, 1.0, 4.0})
                for (double z : {0.5, 2.0, 10.0}) {
                    EnsembleParams p{n, beta, 0.0};
                    const double rhs = exact::comparison_rhs(p, z, spec);
                    const double lhs = sign * exact::log_laplace(p, z, 0);
                    worst = std::max(worst, std::fabs(rhs - lhs));
                }
        bat.check("comparison identity", worst, 1e-8);
    }

    { // Rotation invariance: Lambda'(0) = 0.
        double worst = 0.0;
        for (long n : {3L, 17L})
            for (double beta : {1.0, 2.0})
                worst = std::max(worst,
                                 std::fabs(exact::log_laplace(EnsembleParams{n, beta, 0.0}, 0.0, 1)));
        bat.check("rotation invariance E[X_N] = 0", worst, 1e-12);
    }

    { // Rate-function equivalence.
        double worst = 0.0;
        for (int i = 1; i <= 25; ++i) {
            const double x = 0.02 + (0.66 - 0.02) * (i - 1) / 24.0;
            worst = std::max(worst, std::fabs(asymptotics::rate_i(asymptotics::theta_inv(x)) -
                                              asymptotics::hko_rate(x)));
        }
        bat.check("rate equivalence I o theta^{-1} = HKO dual", worst, 1e-8);
    }

    { // Constants.
        const auto& c = specfun::constants();
        const double c2_closed =
            std::pow(2.0, -11.0 / 12.0) / std::sqrt(M_PI) * std::exp(c.zeta_prime_minus_one);
        bat.check("C_2 closed form",
                  std::fabs(asymptotics::c_beta_const(2.0, spec) - c2_closed), 1e-10);
        bat.check("A_2 = 0", std::fabs(asymptotics::a_beta_const(2.0, spec)), 1e-14);
        double worst = 0.0;
        for (double z : {0.1, 1.0, 5.0, 20.0})
            worst = std::max(worst, std::fabs(asymptotics::log_psi_beta(z, 2.0, spec) -
                                              asymptotics::psi_haar(z)));
        bat.check("Psi_beta reduction at beta=2", worst, 1e-10);
    }

    { // Stirling fit recovers zeta'(-1) from log-Gamma data alone.
        auto log_g_oracle = [](long z) {
            double acc = 0.0;
            for (long k = 1; k <= z - 2; ++k) acc += specfun::log_gamma(static_cast<double>(k + 1));
            return acc;
        };
        double zs[3] = {30.0, 40.0, 60.0};
        double rhs[3], a[3][3];
        const auto& c = specfun::constants();
        for (int i = 0; i < 3; ++i) {
            const double w = zs[i] - 1.0;
            const double lead = w * w * (0.5 * std::log(w) - 0.75) + 0.5 * w * c.log_two_pi -
                                std::log(w) / 12.0;
            rhs[i] = log_g_oracle(static_cast<long>(zs[i])) - lead;
            a[i][0] = 1.0; a[i][1] = 1.0 / (w * w); a[i][2] = 1.0 / (w * w * w * w);
        }
        // Solve the 3x3 system by elimination; the constant term estimates zeta'(-1).
        for (int col = 0; col < 2; ++col)
            for (int row = col + 1; row < 3; ++row) {
                const double f = a[row][col] / a[col][col];
                for (int k = col; k < 3; ++k) a[row][k] -= f * a[col][k];
                rhs[row] -= f * rhs[col];
            }
        const double c2 = rhs[2] / a[2][2];
        const double c1 = (rhs[1] - a[1][2] * c2) / a[1][1];
        const double c0 = rhs[0] - a[0][1] * c1 - a[0][2] * c2;
        bat.check("Barnes fit recovers zeta'(-1)", std::fabs(c0 - c.zeta_prime_minus_one), 1e-8);
    }

    if (!opt.quick) {
        { // Quadrature tail oracles.
            const double p1 = mc::brute_force_tail(1, 2.0, 0.0, 0.0, 4000000);
            bat.check("brute force P[X_1 >= 0] = 2/3", std::fabs(p1 - 2.0 / 3.0), 1e-6);
            const double m2 = mc::brute_force_mgf(2, 2.0, 0.0, 2.0, 2048);
            bat.check("brute force E[e^{2X_2}] = 3", std::fabs(m2 - 3.0), 1e-6);
        }
        { // MC vs analytic and vs quadrature.
            mc::McConfig cfg;
            cfg.n_samples = 100000;
            cfg.n_burn = 400;
            cfg.thinning = 2;
            cfg.seed = opt.seed;
            const auto tilted = mc::tail_estimate_tilted(2, 2.0, 1.2, cfg);
            const double exact_tail = mc::brute_force_tail(2, 2.0, 0.0, 1.2, 4096);
            bat.check_bool("tilted MC vs brute force (N=2)",
                           std::fabs(tilted.probability - exact_tail) <=
                               3.0 * std::max(tilted.std_error, 1e-12),
                           "diff=" + fmt(std::fabs(tilted.probability - exact_tail)) +
                               " 3se=" + fmt(3.0 * tilted.std_error));

            const auto tilted16 = mc::tail_estimate_tilted(16, 2.0, 5.0, cfg);
            const auto scheme = tilt::scheme_estimate(16, 2.0, 5.0);
            const double diff = std::fabs(tilted16.probability - scheme.probability);
            const double allowed =
                std::max(3.0 * tilted16.std_error, 0.30 * scheme.probability);
            bat.check_bool("tilted MC vs scheme estimate (N=16, a=5)", diff <= allowed,
                           "diff=" + fmt(diff) + " allowed=" + fmt(allowed));
        }
        { // Berry-Esseen domination.
            mc::McConfig cfg;
            cfg.n_samples = 100000;
            cfg.n_burn = 400;
            cfg.thinning = 2;
            cfg.seed = opt.seed;
            EnsembleParams p{16, 2.0, 8.0};
            const auto batch = mc::mcmc_sample(p, cfg);
            EnsembleParams untilted{16, 2.0, 0.0};
            const double m = exact::log_laplace(untilted, 16.0, 1);
            const double v = exact::log_laplace(untilted, 16.0, 2);
            const double d = mc::empirical_kolmogorov(batch, m, std::sqrt(v));
            const double bound = asymptotics::kolmogorov_bound(16, 2.0, 8.0);
            bat.check_bool("Berry-Esseen bound dominates empirical d_Kol", d < bound,
                           "empirical=" + fmt(d) + " bound=" + fmt(bound));
        }
    }

    out << (bat.all_pass ? "validation suite: all checks passed\n"
                         : "validation suite: FAILURES detected\n");
    return bat.all_pass ? kExitOk : kExitValidateFailed;
}

void load_config_defaults(const std::string& path, CLI::App& app, Options& opt) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    json cfg = json::parse(f);

    auto take = [&](const char* flag, auto& target) {
        using T = std::decay_t<decltype(target)>;
        const char* key = flag + 2; // strip "--"
        if (!cfg.contains(key)) return;
        const CLI::Option* o = app.get_option_no_throw(flag);
        if (o != nullptr && o->count() > 0) return; // flags win over the config file
        target = cfg.at(key).get<T>();
    };
    take("--N", opt.n);
    take("--beta", opt.beta);
    take("--delta", opt.delta);
    take("--samples", opt.samples);
    take("--burn", opt.burn);
    take("--thin", opt.thin);
    take("--seed", opt.seed);
    take("--out", opt.out_path);
    take("--format", opt.format);
    if (cfg.contains("x") && app.get_option_no_throw("--x")->count() == 0)
        opt.x = cfg.at("x").get<double>();
    if (cfg.contains("x_grid") && app.get_option_no_throw("--x-grid")->count() == 0)
        opt.x_grid = cfg.at("x_grid").get<std::string>();
}

void validate_options(const Options& opt, const std::string& cmd) {
    if (opt.n < 1) throw std::invalid_argument("parameter N: must be >= 1");
    if (!(opt.beta > 0.0)) throw std::invalid_argument("parameter beta: must be > 0");
    if (!(opt.delta >= 0.0)) throw std::invalid_argument("parameter delta: must be >= 0");
    if (opt.format != "csv" && opt.format != "json")
        throw std::invalid_argument("parameter format: must be csv or json");
    if (cmd == "sample") {
        if (opt.samples < 1) throw std::invalid_argument("parameter samples: must be >= 1");
        if (opt.burn < 0) throw std::invalid_argument("parameter burn: must be >= 0");
        if (opt.thin < 1) throw std::invalid_argument("parameter thin: must be >= 1");
    }
    if (cmd == "estimate" && opt.n < 2)
        throw std::invalid_argument("parameter N: estimate requires N >= 2");
}

} // namespace

std::vector<double> parse_grid(const std::string& text) {
    const auto p1 = text.find(':');
    const auto p2 = text.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos)
        throw std::invalid_argument("parameter x-grid: expected A:B:STEP");
    double a, b, step;
    try {
        a = std::stod(text.substr(0, p1));
        b = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
        step = std::stod(text.substr(p2 + 1));
    } catch (...) {
        throw std::invalid_argument("parameter x-grid: malformed number in A:B:STEP");
    }
    if (!(step > 0.0) || b < a) throw std::invalid_argument("parameter x-grid: requires step > 0, B >= A");
    if ((b - a) / step > 1e6) throw std::invalid_argument("parameter x-grid: too many points");
    std::vector<double> grid;
    for (double v = a; v <= b + 1e-12 * std::max(1.0, std::fabs(b)); v += step) grid.push_back(v);
    return grid;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    apply_thread_cap();

    CLI::App app{"circular beta ensemble deviation toolkit"};
    app.require_subcommand(1);
    Options opt;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags win");
        sub->add_option("--N", opt.n, "matrix size N");
        sub->add_option("--beta", opt.beta, "Dyson index beta > 0");
        sub->add_option("--delta", opt.delta, "circular Jacobi weight parameter delta >= 0");
        sub->add_option("--x", opt.x, "single threshold / argument");
        sub->add_option("--x-grid", opt.x_grid, "grid A:B:STEP");
        sub->add_option("--samples", opt.samples, "MC kept samples");
        sub->add_option("--burn", opt.burn, "MC burn-in sweeps");
        sub->add_option("--thin", opt.thin, "MC sweeps between samples");
        sub->add_option("--seed", opt.seed, "RNG seed");
        sub->add_option("--out", opt.out_path, "output path (default stdout)");
        sub->add_option("--format", opt.format, "csv|json");
        sub->add_flag("--quick", opt.quick, "skip Monte Carlo checks");
        sub->add_flag("--fault-inject-sign-flip", opt.fault_sign_flip, "test hook")
            ->group(""); // hidden
    };

    CLI::App* c_exact = app.add_subcommand("exact", "tabulate Lambda and derivatives on a z-grid");
    CLI::App* c_estimate = app.add_subcommand("estimate", "tail estimates, all estimators side by side");
    CLI::App* c_rate = app.add_subcommand("rate-curve", "large-deviation rate function table");
    CLI::App* c_sample = app.add_subcommand("sample", "MCMC sampling, CSV + JSON summary");
    CLI::App* c_validate = app.add_subcommand("validate", "run the invariant battery");
    for (CLI::App* sub : {c_exact, c_estimate, c_rate, c_sample, c_validate}) add_common(sub);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err); // prints help, returns 0
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    CLI::App* active = c_exact->parsed() ? c_exact
                       : c_estimate->parsed() ? c_estimate
                       : c_rate->parsed() ? c_rate
                       : c_sample->parsed() ? c_sample
                                            : c_validate;
    const std::string cmd = active->get_name();

    try {
        if (!config_path.empty()) {
            try {
                load_config_defaults(config_path, *active, opt);
            } catch (const json::exception& e) {
                err << "error: config file: " << e.what() << "\n";
                return kExitBadInput;
            } catch (const std::runtime_error& e) {
                err << "error: " << e.what() << "\n";
                return kExitIo;
            }
        }
        validate_options(opt, cmd);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    try {
        if (cmd == "exact") return cmd_exact(opt, out, err);
        if (cmd == "estimate") return cmd_estimate(opt, out, err);
        if (cmd == "rate-curve") return cmd_rate_curve(opt, out, err);
        if (cmd == "sample") return cmd_sample(opt, out, err);
        return cmd_validate(opt, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const NumericalError& e) {
        err << "error: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        err << "error: numerical domain failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace cbe::cli
