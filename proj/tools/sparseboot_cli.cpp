// Command-line front end. Machine-readable results go to stdout, prose to
// stderr. Exit codes: 0 success, 1 parameter/domain error, 2 I/O error.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sparseboot/analysis.hpp"
#include "sparseboot/errors.hpp"
#include "sparseboot/estimators.hpp"
#include "sparseboot/experiments.hpp"
#include "sparseboot/matrix_io.hpp"
#include "sparseboot/sampling.hpp"

namespace fs = std::filesystem;
using namespace sparseboot;

namespace {

double parse_snr(const std::string& text) {
    if (text == "inf" || text == "+inf") return INFINITY;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::logic_error&) {
    }
    throw ParameterError("--snr-db expects a number or 'inf', got '" + text + "'");
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
    cmd->add_option("--rho", cfg.rho, "ADMM penalty (dimensionless, > 0)")->capture_default_str();
    cmd->add_option("--max-iter", cfg.max_iter, "ADMM iteration cap (count)")
        ->capture_default_str();
    cmd->add_option("--eps-abs", cfg.eps_abs, "absolute residual tolerance")
        ->capture_default_str();
    cmd->add_option("--eps-rel", cfg.eps_rel, "relative residual tolerance")
        ->capture_default_str();
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
    InstanceSpec spec;
    std::string snr = "0";
    fs::path out;
};

int run_generate(GenerateArgs& args) {
    args.spec.snr_db = parse_snr(args.snr);
    const Instance inst = generate_instance(args.spec);
    std::error_code ec;
    fs::create_directories(args.out, ec);
    if (ec) throw IoError("cannot create output directory " + args.out.string());
    write_matrix(args.out / "A.txt", inst.A);
    write_vector(args.out / "x_star.txt", inst.x_star);
    write_vector(args.out / "y.txt", inst.y);
    write_vector(args.out / "z.txt", inst.z);
    std::cerr << "wrote A.txt, x_star.txt, y.txt, z.txt to " << args.out << '\n';
    return 0;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
    std::string method;
    fs::path a_path;
    fs::path y_path;
    std::optional<fs::path> x_star_path;
    std::optional<fs::path> out;
    SolverConfig cfg;
    std::optional<std::size_t> K;
    std::optional<std::size_t> L;
    std::optional<double> ratio;
    std::string scheme = "bootstrap";
    std::optional<std::uint64_t> seed;
    double support_tol = kDefaultSupportTol;
    std::size_t threads = 1;
};

int run_solve(const SolveArgs& args) {
    const Method method = parse_method(args.method);
    SensingProblem prob{read_matrix(args.a_path), read_vector(args.y_path)};
    prob.validate();
    const auto m = static_cast<std::size_t>(prob.A.rows());

    EnsembleOptions opts;
    opts.threads = args.threads;
    opts.support_tol = args.support_tol;
    RecoveryResult res;
    if (method == Method::l1) {
        res = l1_min(prob, args.cfg, opts);
    } else {
        if (!args.K) throw ParameterError("--K is required for method " + args.method);
        if (!args.seed) throw ParameterError("--seed is required for method " + args.method);
        if (args.L && args.ratio) throw ParameterError("give --L or --ratio, not both");
        if (!args.L && !args.ratio) throw ParameterError("--L or --ratio is required");
        if (args.ratio && !(*args.ratio > 0.0 && *args.ratio <= 1.0)) {
            throw ParameterError("--ratio must lie in (0, 1]");
        }
        SamplingPlan plan;
        plan.m = m;
        plan.K = *args.K;
        plan.L = args.L ? *args.L : subset_size(*args.ratio, m);
        plan.scheme = parse_scheme(args.scheme);
        plan.master_seed = *args.seed;
        res = recover(method, prob, generate_subsets(plan), args.cfg, opts);
    }

    std::optional<double> rsnr;
    if (args.x_star_path) {
        const Vector x_star = read_vector(*args.x_star_path);
        if (x_star.size() != res.x_hat.size()) {
            throw ParameterError("x* length does not match the number of columns of A");
        }
        rsnr = recovery_snr(res.x_hat, x_star);
    }
    if (args.out) write_vector(*args.out, res.x_hat);

    std::cout << "method,rsnr_db,support_size,iterations,converged\n"
              << to_string(method) << ',' << (rsnr ? format_real(*rsnr) : std::string("nan"))
              << ',' << res.support.size() << ',' << res.total_iterations() << ','
              << (res.all_converged() ? 1 : 0) << '\n';
    std::cerr << "support:";
    for (auto i : res.support) std::cerr << ' ' << i;
    std::cerr << '\n';
    return 0;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
    std::optional<fs::path> config;
    fs::path out;
    std::size_t threads = 1;
    std::vector<std::size_t> m;
    std::optional<std::size_t> n;
    std::optional<std::size_t> s;
    std::optional<std::string> snr;
    std::vector<std::string> methods;
    std::vector<std::size_t> K;
    std::vector<double> ratios;
    std::vector<double> lambda_grid;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    std::optional<std::size_t> lambda_count;
    std::optional<std::size_t> trials;
    std::optional<std::string> scheme;
    std::optional<std::uint64_t> seed;
    bool literal_noise = false;
    bool no_warm_start = false;
    bool timing = false;
    std::optional<double> rho;
    std::optional<int> max_iter;
    std::optional<double> eps_abs;
    std::optional<double> eps_rel;
};

int run_sweep_cmd(const SweepArgs& args) {
    SweepSpec spec = args.config ? load_sweep_spec(*args.config) : SweepSpec{};
    if (!args.m.empty()) spec.m_list = args.m;
    if (args.n) spec.n = *args.n;
    if (args.s) spec.s = *args.s;
    if (args.snr) spec.snr_db = parse_snr(*args.snr);
    if (!args.methods.empty()) {
        spec.methods.clear();
        for (const auto& name : args.methods) spec.methods.push_back(parse_method(name));
    }
    if (!args.K.empty()) spec.K_list = args.K;
    if (!args.ratios.empty()) spec.ratio_list = args.ratios;
    if (!args.lambda_grid.empty()) spec.lambda_grid = args.lambda_grid;
    if (args.lambda_min || args.lambda_max || args.lambda_count) {
        if (!args.lambda_grid.empty()) {
            throw ParameterError("give --lambda-grid or --lambda-min/max/count, not both");
        }
        spec.lambda_grid = log_grid(args.lambda_min.value_or(0.01),
                                    args.lambda_max.value_or(200.0),
                                    args.lambda_count.value_or(30));
    }
    if (args.trials) spec.trials = *args.trials;
    if (args.scheme) spec.scheme = parse_scheme(*args.scheme);
    if (args.seed) spec.master_seed = *args.seed;
    if (args.literal_noise) spec.literal_noise = true;
    if (args.no_warm_start) spec.warm_start = false;
    if (args.timing) spec.record_timing = true;
    if (args.rho) spec.solver.rho = *args.rho;
    if (args.max_iter) spec.solver.max_iter = *args.max_iter;
    if (args.eps_abs) spec.solver.eps_abs = *args.eps_abs;
    if (args.eps_rel) spec.solver.eps_rel = *args.eps_rel;

    const auto records = run_sweep(spec, args.out, args.threads,
                                   [](const Cell& cell, const LambdaSearchResult& res) {
                                       std::cerr << to_string(cell.method) << " m=" << cell.m
                                                 << " K=" << cell.K << " L=" << cell.L
                                                 << " best_lambda=" << res.best_lambda
                                                 << " mean_rsnr_db=" << res.mean_rsnr << '\n';
                                   });
    std::cerr << records.size() << " records in " << args.out << '\n';
    return 0;
}

// --- rip -------------------------------------------------------------------

struct RipArgs {
    fs::path a_path;
    std::size_t s = 1;
    std::uint64_t cap = kDefaultEnumerationCap;
    std::optional<std::size_t> K;
    std::optional<std::size_t> L;
    std::string scheme = "bootstrap";
    std::optional<std::uint64_t> seed;
};

int run_rip(const RipArgs& args) {
    const Matrix A = read_matrix(args.a_path);
    double delta = 0.0;
    if (args.K) {
        if (!args.L || !args.seed) throw ParameterError("block RIP needs --K, --L and --seed");
        SamplingPlan plan{static_cast<std::size_t>(A.rows()), *args.L, *args.K,
                          parse_scheme(args.scheme), *args.seed};
        delta = brip_jobs(A, generate_subsets(plan), args.s, args.cap);
    } else {
        delta = rip_constant_exhaustive(normalize_columns(A).matrix, args.s, args.cap);
    }
    std::cout << format_real(delta) << '\n';
    return 0;
}

// --- bounds ----------------------------------------------------------------

struct BoundsArgs {
    std::string theorem;
    BoundInputs in;
};

int run_bounds(const BoundsArgs& args) {
    BoundOutput out;
    if (args.theorem == "jobs-exact") out = jobs_error_bound(args.in, true);
    else if (args.theorem == "jobs-general") out = jobs_error_bound(args.in, false);
    else if (args.theorem == "bagging-exact") out = bagging_error_bound(args.in, true);
    else if (args.theorem == "bagging-general") out = bagging_error_bound(args.in, false);
    else throw ParameterError("unknown --theorem '" + args.theorem + "'");
    if (out.clamped) std::cerr << "note: probability bound was vacuous and has been clamped\n";
    std::cout << "bound,probability\n"
              << format_real(out.error_bound) << ',' << format_real(out.probability_lower_bound)
              << '\n';
    return 0;
}

// --- complexity ------------------------------------------------------------

struct ComplexityArgs {
    std::size_t n = 0;
    std::size_t s = 0;
    std::size_t K = 1;
    double alpha = 0.0;
    double mu = 0.0;
    double beta = 1.0;
    double delta = kRipCeiling - 1e-9;
};

int run_complexity(const ComplexityArgs& a) {
    std::cout << sample_complexity_jobs(a.n, a.s, a.K, a.alpha, a.mu, a.beta, a.delta) << '\n';
    return 0;
}

// --- birthday --------------------------------------------------------------

struct BirthdayArgs {
    std::size_t m = 1;
    std::size_t L = 1;
    std::optional<std::size_t> tail;
    std::optional<double> alpha;
};

int run_birthday(const BirthdayArgs& a) {
    if (a.tail) {
        std::cout << format_real(distinct_tail(a.m, a.L, *a.tail)) << '\n';
        return 0;
    }
    if (a.alpha) {
        std::cout << distinct_lower_bound(a.m, a.L, *a.alpha) << '\n';
        return 0;
    }
    const auto pmf = distinct_count_pmf(a.m, a.L);
    std::cout << "v,p\n";
    for (std::size_t v = 1; v <= pmf.size(); ++v) {
        std::cout << v << ',' << format_real(pmf[v - 1]) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparseboot: JOBS, Bagging, Bolasso and l1 sparse recovery toolkit"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cmd_gen = app.add_subcommand("generate", "write a random Gaussian instance");
    cmd_gen->add_option("--m", gen.spec.m, "measurements (rows of A)")->required();
    cmd_gen->add_option("--n", gen.spec.n, "signal dimension (columns of A)")->required();
    cmd_gen->add_option("--s", gen.spec.s, "nonzeros in x*")->required();
    cmd_gen->add_option("--snr-db", gen.snr, "measurement SNR in dB, or 'inf'")->required();
    cmd_gen->add_option("--seed", gen.spec.seed, "64-bit seed")->required();
    cmd_gen->add_option("--out", gen.out, "output directory")->required();
    cmd_gen->add_flag("--literal-noise", gen.spec.literal_noise,
                      "noise variance 10^(-snr/10)||Ax*||^2 without the 1/m factor");

    SolveArgs solve;
    auto* cmd_solve = app.add_subcommand("solve", "run one estimator on an instance");
    cmd_solve->add_option("--method", solve.method, "jobs | bagging | bolasso | l1")->required();
    cmd_solve->add_option("--A", solve.a_path, "sensing matrix file (m x n)")->required();
    cmd_solve->add_option("--y", solve.y_path, "measurement vector file (m)")->required();
    cmd_solve->add_option("--x-star", solve.x_star_path, "true signal file, enables RSNR (dB)");
    cmd_solve->add_option("--lambda", solve.cfg.lambda, "penalty weight (>= 0)")->required();
    cmd_solve->add_option("--K", solve.K, "number of subsets (count)");
    cmd_solve->add_option("--L", solve.L, "subset size (count)");
    cmd_solve->add_option("--ratio", solve.ratio, "subset size as a fraction of m, in (0, 1]");
    cmd_solve->add_option("--scheme", solve.scheme, "bootstrap | subsample")->capture_default_str();
    cmd_solve->add_option("--seed", solve.seed, "64-bit sampling seed");
    cmd_solve->add_option("--support-tol", solve.support_tol,
                          "relative row-norm threshold for supports")
        ->capture_default_str();
    cmd_solve->add_option("--threads", solve.threads, "worker threads, 0 = auto")
        ->capture_default_str();
    cmd_solve->add_option("--out", solve.out, "write x_hat to this file");
    add_solver_flags(cmd_solve, solve.cfg);

    SweepArgs sweep;
    auto* cmd_sweep = app.add_subcommand("sweep", "run a (method x m x K x L/m) sweep to CSV");
    cmd_sweep->add_option("--config", sweep.config, "JSON sweep configuration file");
    cmd_sweep->add_option("--out", sweep.out, "output CSV path (resumed if present)")->required();
    cmd_sweep->add_option("--threads", sweep.threads, "worker threads, 0 = auto")
        ->capture_default_str();
    cmd_sweep->add_option("--m", sweep.m, "measurement counts (list)");
    cmd_sweep->add_option("--n", sweep.n, "signal dimension");
    cmd_sweep->add_option("--s", sweep.s, "sparsity");
    cmd_sweep->add_option("--snr-db", sweep.snr, "SNR in dB, or 'inf'");
    cmd_sweep->add_option("--methods", sweep.methods, "jobs bagging bolasso l1 (list)");
    cmd_sweep->add_option("--K", sweep.K, "subset counts (list)");
    cmd_sweep->add_option("--ratios", sweep.ratios, "L/m ratios in (0, 1] (list)");
    cmd_sweep->add_option("--lambda-grid", sweep.lambda_grid, "explicit ascending lambda list");
    cmd_sweep->add_option("--lambda-min", sweep.lambda_min, "log grid lower end");
    cmd_sweep->add_option("--lambda-max", sweep.lambda_max, "log grid upper end");
    cmd_sweep->add_option("--lambda-count", sweep.lambda_count, "log grid size (count)");
    cmd_sweep->add_option("--trials", sweep.trials, "trials per cell (count)");
    cmd_sweep->add_option("--scheme", sweep.scheme, "bootstrap | subsample");
    cmd_sweep->add_option("--seed", sweep.seed, "64-bit master seed");
    cmd_sweep->add_flag("--literal-noise", sweep.literal_noise, "omit 1/m in the noise variance");
    cmd_sweep->add_flag("--no-warm-start", sweep.no_warm_start, "cold-start every lambda");
    cmd_sweep->add_flag("--timing", sweep.timing,
                        "record wall_ms (milliseconds); output is then not reproducible");
    cmd_sweep->add_option("--rho", sweep.rho, "ADMM penalty (dimensionless, > 0)");
    cmd_sweep->add_option("--max-iter", sweep.max_iter, "ADMM iteration cap (count)");
    cmd_sweep->add_option("--eps-abs", sweep.eps_abs, "absolute residual tolerance");
    cmd_sweep->add_option("--eps-rel", sweep.eps_rel, "relative residual tolerance");

    RipArgs rip;
    auto* cmd_rip = app.add_subcommand(
        "rip", "exhaustive RIP constant of the column-normalized A, or block RIP with --K");
    cmd_rip->add_option("--A", rip.a_path, "matrix file")->required();
    cmd_rip->add_option("--s", rip.s, "sparsity order (count)")->required();
    cmd_rip->add_option("--cap", rip.cap, "maximum number of enumerated subsets")
        ->capture_default_str();
    cmd_rip->add_option("--K", rip.K, "bootstrap subsets for the block RIP (count)");
    cmd_rip->add_option("--L", rip.L, "subset size (count)");
    cmd_rip->add_option("--scheme", rip.scheme, "bootstrap | subsample")->capture_default_str();
    cmd_rip->add_option("--seed", rip.seed, "64-bit sampling seed");

    BoundsArgs bounds;
    auto* cmd_bounds = app.add_subcommand("bounds", "evaluate JOBS/Bagging error bounds");
    cmd_bounds->add_option("--theorem", bounds.theorem,
                           "jobs-exact | jobs-general | bagging-exact | bagging-general")
        ->required();
    cmd_bounds->add_option("--delta", bounds.in.delta, "RIP constant in [0, sqrt(2)-1)")
        ->required();
    cmd_bounds->add_option("--L", bounds.in.L, "subset size (count)")->required();
    cmd_bounds->add_option("--m", bounds.in.m, "measurements (count)")->required();
    cmd_bounds->add_option("--K", bounds.in.K, "subsets (count)")->required();
    cmd_bounds->add_option("--tau", bounds.in.tau, "deviation tau (> 0)")->required();
    cmd_bounds->add_option("--z-l2", bounds.in.z_l2,
                           "||z||_2; for jobs-general pass ||Ae + z||_2")
        ->capture_default_str();
    cmd_bounds->add_option("--z-linf", bounds.in.z_linf, "||z||_inf")->capture_default_str();
    cmd_bounds->add_option("--s", bounds.in.s, "sparsity (count)")->capture_default_str();
    cmd_bounds->add_option("--e-l1", bounds.in.e_l1, "||e||_1 of the s-term error")
        ->capture_default_str();
    cmd_bounds->add_option("--e-l2", bounds.in.e_l2, "||e||_2")->capture_default_str();
    cmd_bounds->add_option("--e-linf", bounds.in.e_linf, "||e||_inf")->capture_default_str();
    cmd_bounds->add_option("--a-inf1", bounds.in.a_inf1, "largest row l1 norm of A")
        ->capture_default_str();

    ComplexityArgs cx;
    auto* cmd_cx = app.add_subcommand("complexity", "JOBS distinct-sample complexity d");
    cmd_cx->add_option("--n", cx.n, "signal dimension")->required();
    cmd_cx->add_option("--s", cx.s, "sparsity")->required();
    cmd_cx->add_option("--K", cx.K, "subsets (count)")->required();
    cmd_cx->add_option("--alpha", cx.alpha, "distinct-count failure probability")->required();
    cmd_cx->add_option("--mu", cx.mu, "overall failure probability, >= alpha")->required();
    cmd_cx->add_option("--beta", cx.beta, "universal constant (> 0)")->capture_default_str();
    cmd_cx->add_option("--delta", cx.delta, "target RIP constant in (0, sqrt(2)-1)")
        ->capture_default_str();

    BirthdayArgs bd;
    auto* cmd_bd = app.add_subcommand("birthday", "distinct-count pmf of L draws from m");
    cmd_bd->add_option("--m", bd.m, "population size (count)")->required();
    cmd_bd->add_option("--L", bd.L, "draws (count)")->required();
    cmd_bd->add_option("--tail", bd.tail, "print P(V >= d) for this d instead");
    cmd_bd->add_option("--alpha", bd.alpha, "print the 1-alpha lower bound on V instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*cmd_gen) return run_generate(gen);
        if (*cmd_solve) return run_solve(solve);
        if (*cmd_sweep) return run_sweep_cmd(sweep);
        if (*cmd_rip) return run_rip(rip);
        if (*cmd_bounds) return run_bounds(bounds);
        if (*cmd_cx) return run_complexity(cx);
        if (*cmd_bd) return run_birthday(bd);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
