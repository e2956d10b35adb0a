#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "sparseboot/errors.hpp"
#include "sparseboot/experiments.hpp"

using namespace sparseboot;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sparseboot_test_experiments";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    fs::remove(p);
    return p;
}

SweepSpec toy_spec() {
    SweepSpec spec;
    spec.m_list = {12, 16};
    spec.n = 20;
    spec.s = 3;
    spec.snr_db = 10.0;
    spec.methods = {Method::jobs, Method::bagging, Method::bolasso, Method::l1};
    spec.K_list = {3};
    spec.ratio_list = {0.5, 1.0};
    spec.lambda_grid = {0.1, 1.0};
    spec.trials = 2;
    spec.master_seed = 42;
    spec.solver.max_iter = 300;
    return spec;
}

}  // namespace

TEST(GenerateInstance, Structure) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Instance inst = generate_instance({10, 30, 7, 5.0, seed});
        EXPECT_EQ((inst.x_star.array() != 0.0).count(), 7);
        EXPECT_EQ(inst.A.rows(), 10);
        EXPECT_EQ(inst.A.cols(), 30);
        EXPECT_LT((inst.y - inst.A * inst.x_star - inst.z).norm(), 1e-12);
    }
}

TEST(GenerateInstance, Deterministic) {
    const Instance a = generate_instance({10, 30, 7, 5.0, 9});
    const Instance b = generate_instance({10, 30, 7, 5.0, 9});
    const Instance c = generate_instance({10, 30, 7, 5.0, 10});
    EXPECT_EQ(a.A, b.A);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.A, c.A);
}

TEST(GenerateInstance, Noiseless) {
    const Instance inst =
        generate_instance({10, 30, 4, std::numeric_limits<double>::infinity(), 3});
    EXPECT_TRUE(inst.z.isZero(0.0));
    EXPECT_EQ(inst.y, inst.A * inst.x_star);
}

TEST(GenerateInstance, SnrCalibration) {
    for (double snr : {0.0, 2.0, 10.0}) {
        double sum = 0.0;
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const Instance inst = generate_instance({100, 200, 50, snr, seed});
            sum += 10.0 * std::log10((inst.A * inst.x_star).squaredNorm() / inst.z.squaredNorm());
        }
        EXPECT_NEAR(sum / 1000.0, snr, 0.3);
    }
}

TEST(GenerateInstance, LiteralNoiseScalesWithM) {
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Instance inst = generate_instance({100, 50, 5, 0.0, seed, true});
        sum += 10.0 * std::log10((inst.A * inst.x_star).squaredNorm() / inst.z.squaredNorm());
    }
    EXPECT_NEAR(sum / 200.0, -20.0, 0.5);
}

TEST(GenerateInstance, Rejects) {
    EXPECT_THROW(generate_instance({10, 5, 6, 0.0, 0}), ParameterError);
    EXPECT_THROW(generate_instance({0, 5, 1, 0.0, 0}), ParameterError);
}

TEST(RecoverySnr, Examples) {
    Vector x(3);
    x << 1, -2, 2;
    EXPECT_EQ(recovery_snr(Vector::Zero(3), x), 0.0);
    EXPECT_EQ(recovery_snr(x, x), kRsnrCap);
    Vector err = x;
    err *= 1.0 + std::sqrt(0.1);
    EXPECT_NEAR(recovery_snr(err, x), 10.0, 1e-12);
    EXPECT_NEAR(recovery_snr_literal(err, x), -10.0, 1e-12);
    EXPECT_THROW(recovery_snr(x, Vector::Zero(3)), DomainError);
    EXPECT_THROW(recovery_snr(Vector::Zero(2), x), ParameterError);
}

TEST(LogGrid, Shape) {
    const auto g = log_grid(0.01, 200, 30);
    ASSERT_EQ(g.size(), 30u);
    EXPECT_DOUBLE_EQ(g.front(), 0.01);
    EXPECT_DOUBLE_EQ(g.back(), 200.0);
    for (std::size_t k = 1; k < g.size(); ++k) {
        EXPECT_NEAR(std::log(g[k] / g[k - 1]), std::log(20000.0) / 29.0, 1e-12);
    }
    EXPECT_EQ(default_lambda_grid(), g);
    EXPECT_EQ(log_grid(3.0, 3.0, 1), (std::vector<double>{3.0}));
}

TEST(SubsetSize, Rounding) {
    EXPECT_EQ(subset_size(0.5, 100), 50u);
    EXPECT_EQ(subset_size(0.01, 10), 1u);
    EXPECT_EQ(subset_size(0.25, 10), 3u);  // round half away from zero
}

TEST(TrialSeeds, PairedAcrossMethods) {
    Cell jobs_cell{Method::jobs, 20, 30, 3, 0.0, 5, 10, 0.5};
    Cell bag_cell = jobs_cell;
    bag_cell.method = Method::bagging;
    Cell l1_cell = jobs_cell;
    l1_cell.method = Method::l1;
    l1_cell.K = 1;
    l1_cell.L = 20;
    const auto a = trial_seeds(7, jobs_cell, 4);
    const auto b = trial_seeds(7, bag_cell, 4);
    const auto c = trial_seeds(7, l1_cell, 4);
    for (std::size_t t = 0; t < 4; ++t) {
        EXPECT_EQ(a[t].instance, b[t].instance);
        EXPECT_EQ(a[t].sampling, b[t].sampling);
        EXPECT_EQ(a[t].instance, c[t].instance);
        if (t > 0) EXPECT_NE(a[t].instance, a[t - 1].instance);
    }
}

TEST(LambdaSearch, SingleAndDuplicateGrid) {
    Cell cell{Method::jobs, 8, 20, 2, 10.0, 3, 4, 0.5};
    const auto seeds = trial_seeds(1, cell, 3);
    const std::vector<double> one{0.7};
    EXPECT_EQ(lambda_search(cell, one, seeds).best_lambda, 0.7);

    SearchOptions cold;
    cold.warm_start = false;
    const std::vector<double> dup{0.5, 0.5};
    const auto r = lambda_search(cell, dup, seeds, cold);
    EXPECT_EQ(r.mean_by_lambda[0], r.mean_by_lambda[1]);
    EXPECT_EQ(r.best_lambda, 0.5);

    EXPECT_THROW(lambda_search(cell, std::vector<double>{}, seeds), ParameterError);
}

TEST(LambdaSearch, MatchesExhaustiveReevaluation) {
    for (Method method : {Method::jobs, Method::bagging, Method::bolasso, Method::l1}) {
        Cell cell{method, 8, 20, 2, 10.0, 3, 4, 0.5};
        if (method == Method::l1) {
            cell.K = 1;
            cell.L = 8;
        }
        const auto seeds = trial_seeds(3, cell, 4);
        const std::vector<double> grid{0.05, 0.3, 2.0};
        SearchOptions opts;
        opts.warm_start = false;
        const auto r = lambda_search(cell, grid, seeds, opts);

        std::vector<double> means;
        for (double lambda : grid) {
            double sum = 0.0;
            for (const auto& s : seeds) {
                const Instance inst = generate_instance({8, 20, 2, 10.0, s.instance});
                std::vector<IndexMultiset> subsets;
                if (method != Method::l1) {
                    subsets = generate_subsets({8, 4, 3, Scheme::bootstrap, s.sampling});
                }
                SolverConfig cfg = opts.solver;
                cfg.lambda = lambda;
                sum += recovery_snr(recover(method, inst.problem(), subsets, cfg).x_hat,
                                    inst.x_star);
            }
            means.push_back(sum / double(seeds.size()));
        }
        std::size_t best = 0;
        for (std::size_t g = 1; g < grid.size(); ++g) {
            if (means[g] >= means[best]) best = g;
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
            EXPECT_EQ(r.mean_by_lambda[g], means[g]) << to_string(method);
        }
        EXPECT_EQ(r.best_lambda, grid[best]);
        EXPECT_EQ(r.mean_rsnr, means[best]);
    }
}

TEST(LambdaSearch, ThreadCountDoesNotChangeResults) {
    Cell cell{Method::bagging, 10, 20, 2, 5.0, 4, 5, 0.5};
    const auto seeds = trial_seeds(5, cell, 6);
    const std::vector<double> grid{0.1, 0.4, 1.6};
    SearchOptions one, many;
    many.threads = 4;
    const auto a = lambda_search(cell, grid, seeds, one);
    const auto b = lambda_search(cell, grid, seeds, many);
    EXPECT_EQ(a.mean_by_lambda, b.mean_by_lambda);
    EXPECT_EQ(a.best_lambda, b.best_lambda);
}

TEST(EnumerateCells, OrderAndL1) {
    const SweepSpec spec = toy_spec();
    const auto cells = enumerate_cells(spec);
    // Per m: 3 ensemble methods x 2 ratios + 1 l1 cell.
    ASSERT_EQ(cells.size(), 14u);
    EXPECT_EQ(cells[0].method, Method::jobs);
    EXPECT_EQ(cells[0].m, 12u);
    EXPECT_EQ(cells[0].L, 6u);
    EXPECT_EQ(cells[1].L, 12u);
    EXPECT_EQ(cells[6].method, Method::l1);
    EXPECT_EQ(cells[6].K, 1u);
    EXPECT_EQ(cells[6].L, 12u);
    EXPECT_EQ(cells[7].m, 16u);
}

TEST(SweepRecord, FormatParseRoundTrip) {
    SweepRecord r{"jobs", 100, 200, 50, 0.0, 30, 40, 0.4, 0.123456789, 7, 1.25, -1.25, 812, true, 0.0};
    const std::string line = format_record(r);
    const SweepRecord back = parse_record(line);
    EXPECT_EQ(format_record(back), line);
    EXPECT_EQ(back.lambda, r.lambda);
    EXPECT_EQ(back.method, "jobs");
    EXPECT_THROW(parse_record("jobs,1,2"), ParameterError);
}

TEST(RunSweep, SingleCellSingleTrial) {
    SweepSpec spec = toy_spec();
    spec.m_list = {12};
    spec.methods = {Method::jobs};
    spec.ratio_list = {0.5};
    spec.trials = 1;
    const auto out = scratch("single.csv");
    const auto records = run_sweep(spec, out);
    ASSERT_EQ(records.size(), 1u);
    const std::string text = slurp(out);
    EXPECT_EQ(text, std::string(kSweepCsvHeader) + "\n" + format_record(records[0]) + "\n");
    EXPECT_EQ(records[0].wall_ms, 0.0);
}

TEST(RunSweep, RowCountAndResume) {
    const SweepSpec spec = toy_spec();
    const auto out = scratch("resume.csv");
    std::size_t callbacks = 0;
    const auto records = run_sweep(spec, out, 1, [&](const Cell&, const LambdaSearchResult&) {
        ++callbacks;
    });
    EXPECT_EQ(records.size(), 14u * spec.trials);
    EXPECT_EQ(callbacks, 14u);
    const std::string full = slurp(out);

    // Rerun: nothing recomputed, file unchanged.
    callbacks = 0;
    run_sweep(spec, out, 1, [&](const Cell&, const LambdaSearchResult&) { ++callbacks; });
    EXPECT_EQ(callbacks, 0u);
    EXPECT_EQ(slurp(out), full);

    // Truncate mid-row and mid-cell: only the damaged cells rerun.
    {
        std::ofstream trunc(out, std::ios::trunc);
        trunc << full.substr(0, full.size() - 37);
    }
    callbacks = 0;
    run_sweep(spec, out, 1, [&](const Cell&, const LambdaSearchResult&) { ++callbacks; });
    EXPECT_EQ(callbacks, 1u);
    EXPECT_EQ(slurp(out), full);
}

TEST(RunSweep, ThreadCountDoesNotChangeCsv) {
    const SweepSpec spec = toy_spec();
    const auto a = scratch("t1.csv");
    const auto b = scratch("t4.csv");
    run_sweep(spec, a, 1);
    run_sweep(spec, b, 4);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST(RunSweep, SubsampleFullRatioMatchesL1) {
    SweepSpec spec = toy_spec();
    spec.m_list = {12};
    spec.methods = {Method::bagging, Method::l1};
    spec.K_list = {4};
    spec.ratio_list = {1.0};
    spec.scheme = Scheme::subsample;
    spec.lambda_grid = {0.2};
    spec.trials = 3;
    spec.solver.eps_abs = 1e-10;
    spec.solver.eps_rel = 1e-10;
    spec.solver.max_iter = 20000;
    const auto records = run_sweep(spec, scratch("sub.csv"));
    ASSERT_EQ(records.size(), 6u);
    for (std::size_t t = 0; t < 3; ++t) {
        EXPECT_NEAR(records[t].rsnr_db, records[3 + t].rsnr_db, 0.01);
    }
}

TEST(RunSweep, Errors) {
    SweepSpec spec = toy_spec();
    EXPECT_THROW(run_sweep(spec, "/nonexistent-dir/x/out.csv"), IoError);
    const auto bad = scratch("bad.csv");
    {
        std::ofstream f(bad);
        f << "not,a,sweep\n";
    }
    EXPECT_THROW(run_sweep(spec, bad), ParameterError);
    spec.ratio_list = {1.5};
    EXPECT_THROW(run_sweep(spec, scratch("x.csv")), ParameterError);
}

TEST(LoadSweepSpec, ReadsKeys) {
    const auto p = scratch("spec.json");
    {
        std::ofstream f(p);
        f << R"({"m": [40, 60], "n": 80, "s": 5, "snr_db": 2, "methods": ["jobs", "l1"],
                 "K": [10], "ratios": [0.2, 0.4], "lambda_min": 0.1, "lambda_max": 10,
                 "lambda_count": 3, "trials": 4, "scheme": "subsample", "master_seed": 9,
                 "literal_noise": true, "rho": 5, "max_iter": 100})";
    }
    const SweepSpec spec = load_sweep_spec(p);
    EXPECT_EQ(spec.m_list, (std::vector<std::size_t>{40, 60}));
    EXPECT_EQ(spec.n, 80u);
    EXPECT_EQ(spec.s, 5u);
    EXPECT_EQ(spec.snr_db, 2.0);
    EXPECT_EQ(spec.methods, (std::vector<Method>{Method::jobs, Method::l1}));
    EXPECT_EQ(spec.K_list, (std::vector<std::size_t>{10}));
    ASSERT_EQ(spec.lambda_grid.size(), 3u);
    EXPECT_NEAR(spec.lambda_grid[1], 1.0, 1e-12);
    EXPECT_EQ(spec.trials, 4u);
    EXPECT_EQ(spec.scheme, Scheme::subsample);
    EXPECT_EQ(spec.master_seed, 9u);
    EXPECT_TRUE(spec.literal_noise);
    EXPECT_EQ(spec.solver.rho, 5.0);
    EXPECT_EQ(spec.solver.max_iter, 100);
}

TEST(LoadSweepSpec, Rejects) {
    const auto p = scratch("bad.json");
    {
        std::ofstream f(p);
        f << R"({"m": [40], "colour": 1})";
    }
    EXPECT_THROW(load_sweep_spec(p), ParameterError);
    {
        std::ofstream f(p);
        f << "{ not json";
    }
    EXPECT_THROW(load_sweep_spec(p), ParameterError);
    EXPECT_THROW(load_sweep_spec("/nonexistent/spec.json"), IoError);
}
