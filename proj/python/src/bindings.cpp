#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sparseboot/analysis.hpp"
#include "sparseboot/errors.hpp"
#include "sparseboot/estimators.hpp"
#include "sparseboot/experiments.hpp"
#include "sparseboot/linalg.hpp"
#include "sparseboot/sampling.hpp"
#include "sparseboot/solver.hpp"

namespace py = pybind11;
using namespace sparseboot;

namespace {

SolverConfig make_config(double lambda, double rho, int max_iter, double eps_abs,
                         double eps_rel) {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.rho = rho;
    cfg.max_iter = max_iter;
    cfg.eps_abs = eps_abs;
    cfg.eps_rel = eps_rel;
    return cfg;
}

py::dict report_dict(const SolveReport& r) {
    py::dict d;
    d["X"] = r.X;
    d["iterations"] = r.iterations;
    d["primal_residual"] = r.primal_residual;
    d["dual_residual"] = r.dual_residual;
    d["objective"] = r.objective;
    d["converged"] = r.converged;
    return d;
}

std::vector<std::vector<std::size_t>> to_lists(const std::vector<IndexMultiset>& subsets) {
    std::vector<std::vector<std::size_t>> out;
    for (const auto& s : subsets) out.push_back(s.indices);
    return out;
}

std::vector<IndexMultiset> from_lists(const std::vector<std::vector<std::size_t>>& lists,
                                      Scheme scheme) {
    std::vector<IndexMultiset> out;
    for (const auto& l : lists) out.push_back({l, scheme});
    return out;
}

BoundInputs bound_inputs(const py::dict& d) {
    BoundInputs in;
    for (auto item : d) {
        const auto key = item.first.cast<std::string>();
        const auto& v = item.second;
        if (key == "delta") in.delta = v.cast<double>();
        else if (key == "L") in.L = v.cast<std::size_t>();
        else if (key == "m") in.m = v.cast<std::size_t>();
        else if (key == "K") in.K = v.cast<std::size_t>();
        else if (key == "tau") in.tau = v.cast<double>();
        else if (key == "z_l2") in.z_l2 = v.cast<double>();
        else if (key == "z_linf") in.z_linf = v.cast<double>();
        else if (key == "s") in.s = v.cast<std::size_t>();
        else if (key == "e_l1") in.e_l1 = v.cast<double>();
        else if (key == "e_l2") in.e_l2 = v.cast<double>();
        else if (key == "e_linf") in.e_linf = v.cast<double>();
        else if (key == "a_inf1") in.a_inf1 = v.cast<double>();
        else throw ParameterError("unknown bound input '" + key + "'");
    }
    return in;
}

py::tuple bound_tuple(const BoundOutput& o) {
    return py::make_tuple(o.error_bound, o.probability_lower_bound, o.clamped);
}

}  // namespace

PYBIND11_MODULE(_sparseboot, mod) {
    mod.doc() = "Sparse recovery from bootstrap samples";
    mod.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(mod, "ParameterError", base.ptr());
    py::register_exception<IndexError>(mod, "IndexError", base.ptr());
    py::register_exception<DegenerateColumnError>(mod, "DegenerateColumnError", base.ptr());
    py::register_exception<DegenerateSubsetError>(mod, "DegenerateSubsetError", base.ptr());
    py::register_exception<DomainError>(mod, "DomainError", base.ptr());
    py::register_exception<InfeasibleError>(mod, "InfeasibleError", base.ptr());
    py::register_exception<ResourceError>(mod, "ResourceError", base.ptr());
    py::register_exception<NumericalDivergence>(mod, "NumericalDivergence", base.ptr());
    py::register_exception<IoError>(mod, "IoError", base.ptr());

    // linalg
    mod.def("mixed_norm", &mixed_norm, py::arg("x"), py::arg("p"), py::arg("q"));
    mod.def("row_support", py::overload_cast<const Matrix&, double>(&row_support), py::arg("x"),
            py::arg("rel_tol") = kDefaultSupportTol);

    // sampling
    mod.def(
        "generate_subsets",
        [](std::size_t m, std::size_t L, std::size_t K, const std::string& scheme,
           std::uint64_t seed) {
            return to_lists(generate_subsets({m, L, K, parse_scheme(scheme), seed}));
        },
        py::arg("m"), py::arg("L"), py::arg("K"), py::arg("scheme"), py::arg("seed"));
    mod.def("distinct_count_pmf", &distinct_count_pmf, py::arg("m"), py::arg("L"));
    mod.def("distinct_tail", &distinct_tail, py::arg("m"), py::arg("L"), py::arg("d"));
    mod.def("distinct_lower_bound", &distinct_lower_bound, py::arg("m"), py::arg("L"),
            py::arg("alpha"));

    // solver
    mod.def(
        "admm_group_lasso",
        [](const std::vector<Matrix>& A, const std::vector<Vector>& y, double lambda, double rho,
           int max_iter, double eps_abs, double eps_rel) {
            return report_dict(
                admm_group_lasso({A, y}, make_config(lambda, rho, max_iter, eps_abs, eps_rel)));
        },
        py::arg("A"), py::arg("y"), py::arg("lam"), py::arg("rho") = 1.0,
        py::arg("max_iter") = 2000, py::arg("eps_abs") = 1e-6, py::arg("eps_rel") = 1e-4);
    mod.def(
        "admm_lasso",
        [](const Matrix& A, const Vector& y, double lambda, double rho, int max_iter,
           double eps_abs, double eps_rel) {
            return report_dict(
                admm_lasso(A, y, make_config(lambda, rho, max_iter, eps_abs, eps_rel)));
        },
        py::arg("A"), py::arg("y"), py::arg("lam"), py::arg("rho") = 1.0,
        py::arg("max_iter") = 2000, py::arg("eps_abs") = 1e-6, py::arg("eps_rel") = 1e-4);
    mod.def("least_squares_on_support", &least_squares_on_support, py::arg("A"), py::arg("y"),
            py::arg("support"));

    // estimators
    mod.def(
        "recover",
        [](const std::string& method, const Matrix& A, const Vector& y, double lambda,
           std::vector<std::vector<std::size_t>> subsets, const std::string& scheme, double rho,
           int max_iter, double eps_abs, double eps_rel, std::size_t threads) {
            EnsembleOptions opts;
            opts.threads = threads;
            const auto r = recover(parse_method(method), {A, y},
                                   from_lists(subsets, parse_scheme(scheme)),
                                   make_config(lambda, rho, max_iter, eps_abs, eps_rel), opts);
            py::dict d;
            d["x_hat"] = r.x_hat;
            d["support"] = r.support;
            d["per_estimate"] = r.per_estimate ? py::cast(*r.per_estimate) : py::none();
            d["iterations"] = r.total_iterations();
            d["converged"] = r.all_converged();
            return d;
        },
        py::arg("method"), py::arg("A"), py::arg("y"), py::arg("lam"),
        py::arg("subsets") = std::vector<std::vector<std::size_t>>{},
        py::arg("scheme") = "bootstrap", py::arg("rho") = 1.0, py::arg("max_iter") = 2000,
        py::arg("eps_abs") = 1e-6, py::arg("eps_rel") = 1e-4, py::arg("threads") = 1);

    // analysis
    mod.def(
        "c_constants",
        [](double delta) {
            const auto c = c_constants(delta);
            return py::make_tuple(c.C0, c.C1);
        },
        py::arg("delta"));
    mod.def("rip_constant", &rip_constant_exhaustive, py::arg("A"), py::arg("s"),
            py::arg("cap") = kDefaultEnumerationCap);
    mod.def(
        "brip_jobs",
        [](const Matrix& A, const std::vector<std::vector<std::size_t>>& subsets, std::size_t s,
           std::uint64_t cap) {
            return brip_jobs(A, from_lists(subsets, Scheme::bootstrap), s, cap);
        },
        py::arg("A"), py::arg("subsets"), py::arg("s"), py::arg("cap") = kDefaultEnumerationCap);
    mod.def("expected_noise_power", &expected_noise_power, py::arg("K"), py::arg("L"),
            py::arg("m"), py::arg("z_l2"));
    mod.def(
        "jobs_error_bound",
        [](const py::dict& in, bool exact) { return bound_tuple(jobs_error_bound(bound_inputs(in), exact)); },
        py::arg("inputs"), py::arg("exact_sparse") = true);
    mod.def(
        "bagging_error_bound",
        [](const py::dict& in, bool exact) {
            return bound_tuple(bagging_error_bound(bound_inputs(in), exact));
        },
        py::arg("inputs"), py::arg("exact_sparse") = true);
    mod.def("sample_complexity_jobs", &sample_complexity_jobs, py::arg("n"), py::arg("s"),
            py::arg("K"), py::arg("alpha"), py::arg("mu"), py::arg("beta") = 1.0,
            py::arg("delta"));
    mod.def("hoeffding_tail", &hoeffding_tail, py::arg("n"), py::arg("eps"), py::arg("a"),
            py::arg("b"), py::arg("mean"));

    // experiments
    mod.def(
        "generate_instance",
        [](std::size_t m, std::size_t n, std::size_t s, double snr_db, std::uint64_t seed,
           bool literal_noise) {
            const Instance inst = generate_instance({m, n, s, snr_db, seed, literal_noise});
            py::dict d;
            d["A"] = inst.A;
            d["x_star"] = inst.x_star;
            d["z"] = inst.z;
            d["y"] = inst.y;
            return d;
        },
        py::arg("m"), py::arg("n"), py::arg("s"), py::arg("snr_db"), py::arg("seed"),
        py::arg("literal_noise") = false);
    mod.def("recovery_snr", &recovery_snr, py::arg("x_hat"), py::arg("x_star"));
    mod.def("log_grid", &log_grid, py::arg("lo"), py::arg("hi"), py::arg("count"));
    mod.def(
        "run_sweep",
        [](const std::filesystem::path& config, const std::filesystem::path& out,
           std::size_t threads) {
            py::gil_scoped_release release;
            return run_sweep(load_sweep_spec(config), out, threads).size();
        },
        py::arg("config"), py::arg("out"), py::arg("threads") = 1,
        "Run the sweep described by a JSON config; returns the record count.");
}
