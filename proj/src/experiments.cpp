#include "sparseboot/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sparseboot/errors.hpp"
#include "sparseboot/matrix_io.hpp"
#include "sparseboot/parallel.hpp"
#include "sparseboot/rng.hpp"

namespace sparseboot {

void InstanceSpec::validate() const {
    if (m < 1 || n < 1) throw ParameterError("instance: m and n must be >= 1");
    if (s > n) throw ParameterError("instance: s must not exceed n");
    if (std::isnan(snr_db) || snr_db == -INFINITY) {
        throw ParameterError("instance: snr_db must be a real number or +inf");
    }
}

Instance generate_instance(const InstanceSpec& spec) {
    spec.validate();
    const auto m = static_cast<Eigen::Index>(spec.m);
    const auto n = static_cast<Eigen::Index>(spec.n);
    Rng rng(derive_seed(spec.seed, {}));
    std::normal_distribution<double> normal(0.0, 1.0);

    Instance inst;
    inst.A.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) inst.A(i, j) = normal(rng);
    }

    std::vector<std::size_t> pool(spec.n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    inst.x_star = Vector::Zero(n);
    for (std::size_t k = 0; k < spec.s; ++k) {
        std::swap(pool[k], pool[k + uniform_below(rng, spec.n - k)]);
    }
    for (std::size_t k = 0; k < spec.s; ++k) {
        double v = normal(rng);
        while (v == 0.0) v = normal(rng);
        inst.x_star[static_cast<Eigen::Index>(pool[k])] = v;
    }

    const Vector clean = inst.A * inst.x_star;
    inst.z = Vector::Zero(m);
    if (std::isfinite(spec.snr_db)) {
        double variance = std::pow(10.0, -spec.snr_db / 10.0) * clean.squaredNorm();
        if (!spec.literal_noise) variance /= static_cast<double>(spec.m);
        const double sigma = std::sqrt(variance);
        for (Eigen::Index i = 0; i < m; ++i) inst.z[i] = sigma * normal(rng);
    }
    inst.y = clean + inst.z;
    return inst;
}

double recovery_snr(const Vector& x_hat, const Vector& x_star) {
    if (x_hat.size() != x_star.size()) throw ParameterError("recovery_snr: length mismatch");
    const double signal = x_star.squaredNorm();
    if (!(signal > 0.0)) throw DomainError("recovery_snr: x* is zero");
    const double error = (x_hat - x_star).squaredNorm();
    if (error == 0.0) return kRsnrCap;
    return std::min(kRsnrCap, 10.0 * std::log10(signal / error));
}

double recovery_snr_literal(const Vector& x_hat, const Vector& x_star) {
    return -recovery_snr(x_hat, x_star);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
        throw ParameterError("log_grid: need 0 < lo <= hi and count >= 1");
    }
    if (count == 1) return {lo};
    std::vector<double> grid(count);
    const double step = std::log(hi / lo) / static_cast<double>(count - 1);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = lo * std::exp(step * static_cast<double>(k));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

std::vector<double> default_lambda_grid() { return log_grid(0.01, 200.0, 30); }

std::vector<TrialSeeds> trial_seeds(std::uint64_t master_seed, const Cell& cell,
                                    std::size_t trials) {
    std::vector<TrialSeeds> seeds(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        seeds[t].instance =
            derive_seed(master_seed, {1, cell.m, cell.n, cell.s,
                                      std::bit_cast<std::uint64_t>(cell.snr_db),
                                      cell.literal_noise ? 1u : 0u, t});
        seeds[t].sampling = derive_seed(master_seed, {2, cell.m, cell.K, cell.L,
                                                      static_cast<std::uint64_t>(cell.scheme), t});
    }
    return seeds;
}

std::vector<std::vector<TrialOutcome>> evaluate_cell(const Cell& cell,
                                                     std::span<const double> grid,
                                                     const std::vector<TrialSeeds>& seeds,
                                                     const SearchOptions& opts) {
    std::vector<std::vector<TrialOutcome>> out(grid.size(),
                                               std::vector<TrialOutcome>(seeds.size()));
    // Each trial walks the grid from the largest lambda down, warm-starting
    // from the previous solution.
    std::vector<std::size_t> order(grid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

    parallel_for(seeds.size(), opts.threads, [&](std::size_t t) {
        const Instance inst = generate_instance(
            {cell.m, cell.n, cell.s, cell.snr_db, seeds[t].instance, cell.literal_noise});
        const SensingProblem prob = inst.problem();
        std::vector<IndexMultiset> subsets;
        if (cell.method != Method::l1) {
            subsets = generate_subsets({cell.m, cell.L, cell.K, cell.scheme, seeds[t].sampling});
        }
        EnsembleOptions ens;
        for (std::size_t g : order) {
            SolverConfig cfg = opts.solver;
            cfg.lambda = grid[g];
            TrialOutcome& outcome = out[g][t];
            const auto start = std::chrono::steady_clock::now();
            try {
                const RecoveryResult res = recover(cell.method, prob, subsets, cfg, ens);
                outcome.rsnr_db = recovery_snr(res.x_hat, inst.x_star);
                outcome.rsnr_literal_db = -outcome.rsnr_db;
                outcome.iterations = res.total_iterations();
                outcome.converged = res.all_converged();
                outcome.zero_estimate = res.x_hat.isZero(0.0);
                ens.warm.clear();
                if (opts.warm_start) {
                    for (const auto& r : res.solver_reports) ens.warm.push_back(r.warm_start());
                }
            } catch (const NumericalDivergence& e) {
                outcome.failed = true;
                outcome.rsnr_db = NAN;
                outcome.rsnr_literal_db = NAN;
                outcome.iterations = e.iteration();
                ens.warm.clear();
            }
            outcome.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
        }
    });
    return out;
}

LambdaSearchResult lambda_search(const Cell& cell, std::span<const double> grid,
                                 const std::vector<TrialSeeds>& seeds,
                                 const SearchOptions& opts) {
    if (grid.empty()) throw ParameterError("lambda_search: empty grid");
    if (seeds.empty()) throw ParameterError("lambda_search: need at least one trial");
    auto outcomes = evaluate_cell(cell, grid, seeds, opts);

    LambdaSearchResult result;
    result.mean_by_lambda.resize(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double sum = 0.0;
        bool failed = false;
        for (const auto& o : outcomes[g]) {
            failed = failed || o.failed;
            sum += o.rsnr_db;
        }
        result.mean_by_lambda[g] =
            failed ? -INFINITY : sum / static_cast<double>(outcomes[g].size());
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g) {
        const double cur = result.mean_by_lambda[g];
        const double top = result.mean_by_lambda[best];
        if (cur > top || (cur == top && grid[g] >= grid[best])) best = g;
    }
    result.best_lambda = grid[best];
    result.mean_rsnr = result.mean_by_lambda[best];
    result.trials_at_best = std::move(outcomes[best]);
    return result;
}

// --- sweep -----------------------------------------------------------------

std::size_t subset_size(double ratio, std::size_t m) {
    const auto L = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(m)));
    return std::max<std::size_t>(1, L);
}

void SweepSpec::validate() const {
    if (m_list.empty()) throw ParameterError("sweep: m list is empty");
    for (auto m : m_list) {
        if (m < 1) throw ParameterError("sweep: every m must be >= 1");
    }
    if (n < 1 || s > n) throw ParameterError("sweep: need n >= 1 and s <= n");
    if (std::isnan(snr_db) || snr_db == -INFINITY) throw ParameterError("sweep: bad snr_db");
    if (methods.empty()) throw ParameterError("sweep: no methods");
    if (K_list.empty()) throw ParameterError("sweep: K list is empty");
    for (auto K : K_list) {
        if (K < 1) throw ParameterError("sweep: every K must be >= 1");
    }
    if (ratio_list.empty()) throw ParameterError("sweep: ratio list is empty");
    for (double r : ratio_list) {
        if (!(r > 0.0 && r <= 1.0)) throw ParameterError("sweep: ratios must lie in (0, 1]");
    }
    if (lambda_grid.empty()) throw ParameterError("sweep: lambda grid is empty");
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
        if (!(lambda_grid[k] > 0.0) || !std::isfinite(lambda_grid[k])) {
            throw ParameterError("sweep: lambda values must be positive");
        }
        if (k > 0 && lambda_grid[k] < lambda_grid[k - 1]) {
            throw ParameterError("sweep: lambda grid must be ascending");
        }
    }
    if (trials < 1) throw ParameterError("sweep: trials must be >= 1");
    solver.validate();
}

std::vector<Cell> enumerate_cells(const SweepSpec& spec) {
    std::vector<Cell> cells;
    for (std::size_t m : spec.m_list) {
        for (Method method : spec.methods) {
            Cell base;
            base.method = method;
            base.m = m;
            base.n = spec.n;
            base.s = spec.s;
            base.snr_db = spec.snr_db;
            base.scheme = spec.scheme;
            base.literal_noise = spec.literal_noise;
            if (method == Method::l1) {
                base.K = 1;
                base.L = m;
                base.ratio = 1.0;
                cells.push_back(base);
                continue;
            }
            for (std::size_t K : spec.K_list) {
                for (double ratio : spec.ratio_list) {
                    Cell cell = base;
                    cell.K = K;
                    cell.ratio = ratio;
                    cell.L = subset_size(ratio, m);
                    cells.push_back(cell);
                }
            }
        }
    }
    return cells;
}

std::string format_record(const SweepRecord& r) {
    std::ostringstream out;
    out << r.method << ',' << r.m << ',' << r.n << ',' << r.s << ',' << format_real(r.snr_db)
        << ',' << r.K << ',' << r.L << ',' << format_real(r.ratio) << ','
        << format_real(r.lambda) << ',' << r.trial << ',' << format_real(r.rsnr_db) << ','
        << format_real(r.rsnr_literal_db) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << format_real(r.wall_ms);
    return out.str();
}

namespace {

double parse_field_real(const std::string& s) {
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
}

std::size_t parse_field_count(const std::string& s) {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
}

std::string cell_key(const std::string& method, std::size_t m, std::size_t n, std::size_t s,
                     double snr, std::size_t K, std::size_t L) {
    std::ostringstream key;
    key << method << '|' << m << '|' << n << '|' << s << '|' << format_real(snr) << '|' << K
        << '|' << L;
    return key.str();
}

std::string cell_key(const Cell& c) {
    return cell_key(to_string(c.method), c.m, c.n, c.s, c.snr_db, c.K, c.L);
}

std::vector<SweepRecord> cell_records(const Cell& cell, const LambdaSearchResult& res,
                                      bool record_timing) {
    std::vector<SweepRecord> out;
    out.reserve(res.trials_at_best.size());
    for (std::size_t t = 0; t < res.trials_at_best.size(); ++t) {
        const auto& o = res.trials_at_best[t];
        SweepRecord r;
        r.method = to_string(cell.method);
        r.m = cell.m;
        r.n = cell.n;
        r.s = cell.s;
        r.snr_db = cell.snr_db;
        r.K = cell.K;
        r.L = cell.L;
        r.ratio = cell.ratio;
        r.lambda = res.best_lambda;
        r.trial = t;
        r.rsnr_db = o.rsnr_db;
        r.rsnr_literal_db = o.rsnr_literal_db;
        r.iterations = o.iterations;
        r.converged = o.converged && !o.failed;
        r.wall_ms = record_timing ? o.wall_ms : 0.0;
        out.push_back(r);
    }
    return out;
}

}  // namespace

SweepRecord parse_record(const std::string& line) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 15) throw ParameterError("sweep CSV row has " + std::to_string(f.size()) +
                                             " fields, expected 15: " + line);
    try {
        SweepRecord r;
        r.method = f[0];
        r.m = parse_field_count(f[1]);
        r.n = parse_field_count(f[2]);
        r.s = parse_field_count(f[3]);
        r.snr_db = parse_field_real(f[4]);
        r.K = parse_field_count(f[5]);
        r.L = parse_field_count(f[6]);
        r.ratio = parse_field_real(f[7]);
        r.lambda = parse_field_real(f[8]);
        r.trial = parse_field_count(f[9]);
        r.rsnr_db = parse_field_real(f[10]);
        r.rsnr_literal_db = parse_field_real(f[11]);
        r.iterations = static_cast<int>(parse_field_count(f[12]));
        r.converged = f[13] == "1";
        r.wall_ms = parse_field_real(f[14]);
        return r;
    } catch (const std::logic_error&) {
        throw ParameterError("malformed sweep CSV row: " + line);
    }
}

std::vector<SweepRecord> run_sweep(const SweepSpec& spec, const std::filesystem::path& out_path,
                                   std::size_t threads, const CellCallback& on_cell) {
    spec.validate();
    const auto cells = enumerate_cells(spec);
    std::map<std::string, std::size_t> cell_index;
    for (std::size_t c = 0; c < cells.size(); ++c) cell_index.emplace(cell_key(cells[c]), c);

    // Resume: keep the rows of cells that already have every trial.
    std::vector<std::vector<std::string>> kept_lines(cells.size());
    std::vector<std::vector<SweepRecord>> table(cells.size());
    std::vector<bool> done(cells.size(), false);
    std::error_code ec;
    if (std::filesystem::exists(out_path, ec) && std::filesystem::file_size(out_path, ec) > 0) {
        std::ifstream in(out_path);
        if (!in) throw IoError("cannot read " + out_path.string());
        std::string line;
        std::getline(in, line);
        if (line != kSweepCsvHeader) {
            throw ParameterError(out_path.string() + " does not start with the sweep CSV header");
        }
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            SweepRecord r;
            try {
                r = parse_record(line);
            } catch (const ParameterError&) {
                continue;  // torn final line from an interrupted run
            }
            auto it = cell_index.find(cell_key(r.method, r.m, r.n, r.s, r.snr_db, r.K, r.L));
            if (it == cell_index.end()) continue;
            kept_lines[it->second].push_back(line);
            table[it->second].push_back(r);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            std::vector<bool> seen(spec.trials, false);
            std::size_t distinct = 0;
            for (const auto& r : table[c]) {
                if (r.trial < spec.trials && !seen[r.trial]) {
                    seen[r.trial] = true;
                    ++distinct;
                }
            }
            done[c] = distinct == spec.trials && table[c].size() == spec.trials;
            if (!done[c]) {
                kept_lines[c].clear();
                table[c].clear();
            }
        }
    }

    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + out_path.string() + " for writing");
    out << kSweepCsvHeader << '\n';
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (const auto& line : kept_lines[c]) out << line << '\n';
    }
    out.flush();
    if (!out) throw IoError("failed writing " + out_path.string());

    std::vector<std::size_t> pending;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!done[c]) pending.push_back(c);
    }

    SearchOptions search;
    search.solver = spec.solver;
    search.warm_start = spec.warm_start;
    search.threads = 1;

    // Finished cells are flushed strictly in pending order, so the file
    // contents never depend on which worker finishes first.
    std::vector<std::optional<std::pair<LambdaSearchResult, std::vector<SweepRecord>>>> slots(
        pending.size());
    std::size_t next_flush = 0;
    std::mutex flush_mutex;
    parallel_for(pending.size(), threads, [&](std::size_t p) {
        const Cell& cell = cells[pending[p]];
        auto res = lambda_search(cell, spec.lambda_grid,
                                 trial_seeds(spec.master_seed, cell, spec.trials), search);
        auto records = cell_records(cell, res, spec.record_timing);
        std::lock_guard lock(flush_mutex);
        slots[p].emplace(std::move(res), std::move(records));
        while (next_flush < slots.size() && slots[next_flush]) {
            const std::size_t c = pending[next_flush];
            for (const auto& r : slots[next_flush]->second) out << format_record(r) << '\n';
            out.flush();
            if (!out) throw IoError("failed writing " + out_path.string());
            if (on_cell) on_cell(cells[c], slots[next_flush]->first);
            table[c] = std::move(slots[next_flush]->second);
            slots[next_flush].reset();
            ++next_flush;
        }
    });

    std::vector<SweepRecord> all;
    for (auto& rows : table) {
        for (auto& r : rows) all.push_back(std::move(r));
    }
    return all;
}

// --- configuration ---------------------------------------------------------

namespace {

double json_real(const nlohmann::json& v, const std::string& key) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return INFINITY;
        throw ParameterError("config key '" + key + "': expected a number or \"inf\"");
    }
    if (!v.is_number()) throw ParameterError("config key '" + key + "': expected a number");
    return v.get<double>();
}

template <class T>
std::vector<T> json_list(const nlohmann::json& v, const std::string& key) {
    std::vector<T> out;
    auto one = [&](const nlohmann::json& e) {
        if constexpr (std::is_same_v<T, double>) {
            out.push_back(json_real(e, key));
        } else {
            if (!e.is_number_unsigned()) {
                throw ParameterError("config key '" + key + "': expected nonnegative integers");
            }
            out.push_back(e.get<T>());
        }
    };
    if (v.is_array()) {
        for (const auto& e : v) one(e);
    } else {
        one(v);
    }
    return out;
}

std::size_t json_count(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_unsigned()) {
        throw ParameterError("config key '" + key + "': expected a nonnegative integer");
    }
    return v.get<std::size_t>();
}

bool json_flag(const nlohmann::json& v, const std::string& key) {
    if (!v.is_boolean()) throw ParameterError("config key '" + key + "': expected true/false");
    return v.get<bool>();
}

}  // namespace

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep config " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParameterError("sweep config " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ParameterError("sweep config must be a JSON object");

    SweepSpec spec;
    std::optional<double> lambda_min;
    std::optional<double> lambda_max;
    std::optional<std::size_t> lambda_count;
    try {
        for (const auto& [key, v] : doc.items()) {
            if (key == "m") spec.m_list = json_list<std::size_t>(v, key);
            else if (key == "n") spec.n = json_count(v, key);
            else if (key == "s") spec.s = json_count(v, key);
            else if (key == "snr_db") spec.snr_db = json_real(v, key);
            else if (key == "methods") {
                spec.methods.clear();
                for (const auto& e : v) spec.methods.push_back(parse_method(e.get<std::string>()));
            } else if (key == "K") spec.K_list = json_list<std::size_t>(v, key);
            else if (key == "ratios") spec.ratio_list = json_list<double>(v, key);
            else if (key == "lambda_grid") spec.lambda_grid = json_list<double>(v, key);
            else if (key == "lambda_min") lambda_min = json_real(v, key);
            else if (key == "lambda_max") lambda_max = json_real(v, key);
            else if (key == "lambda_count") lambda_count = json_count(v, key);
            else if (key == "trials") spec.trials = json_count(v, key);
            else if (key == "scheme") spec.scheme = parse_scheme(v.get<std::string>());
            else if (key == "master_seed") spec.master_seed = v.get<std::uint64_t>();
            else if (key == "literal_noise") spec.literal_noise = json_flag(v, key);
            else if (key == "warm_start") spec.warm_start = json_flag(v, key);
            else if (key == "record_timing") spec.record_timing = json_flag(v, key);
            else if (key == "rho") spec.solver.rho = json_real(v, key);
            else if (key == "eps_abs") spec.solver.eps_abs = json_real(v, key);
            else if (key == "eps_rel") spec.solver.eps_rel = json_real(v, key);
            else if (key == "max_iter") spec.solver.max_iter = static_cast<int>(json_count(v, key));
            else throw ParameterError("sweep config: unknown key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError("sweep config " + path.string() + ": " + e.what());
    }
    if (lambda_min || lambda_max || lambda_count) {
        if (doc.contains("lambda_grid")) {
            throw ParameterError("sweep config: give lambda_grid or lambda_min/max/count, not both");
        }
        spec.lambda_grid = log_grid(lambda_min.value_or(0.01), lambda_max.value_or(200.0),
                                    lambda_count.value_or(30));
    }
    spec.validate();
    return spec;
}

}  // namespace sparseboot
