#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sysnr/error.hpp"
#include "sysnr/mc.hpp"
#include "sysnr/murthy.hpp"
#include "sysnr/rng.hpp"
#include "sysnr/synthetic.hpp"

namespace py = pybind11;
using namespace sysnr;

namespace {

std::vector<Unit> to_units(const std::vector<double>& y, const std::vector<double>& x) {
    if (y.size() != x.size()) throw DomainError("y and x must have the same length");
    std::vector<Unit> units(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) units[i] = {y[i], x[i]};
    return units;
}

py::dict report_to_dict(const McReport& rep) {
    py::list rows;
    for (const auto& r : rep.rows) {
        py::dict d;
        d["estimator"] = std::string(to_string(r.estimator));
        d["constants"] = r.constants;
        d["empirical_bias"] = r.empirical_bias;
        d["empirical_mse"] = r.empirical_mse;
        d["mse_standard_error"] = r.mse_standard_error;
        d["theory_bias"] = r.theory_bias;
        d["theory_mse"] = r.theory_mse;
        d["z_score"] = r.z_score;
        d["tolerance"] = r.tolerance;
        d["within_band"] = r.within_band;
        rows.append(d);
    }
    py::dict out;
    out["replications"] = rep.replications;
    out["k_rate"] = rep.nonresponse.k_rate;
    out["l_factor"] = rep.nonresponse.l_factor;
    out["s2_y2"] = rep.nonresponse.s2_y2;
    out["mean_realized_l"] = rep.mean_realized_l;
    out["l_mismatch"] = rep.l_mismatch;
    out["theory_summary"] = rep.theory_summary;
    out["rows"] = rows;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Estimators of a population mean under systematic sampling with non-response";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base);
    py::register_exception<SchemaError>(m, "SchemaError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<IoError>(m, "IoError", base);
    py::register_exception<DegenerateError>(m, "DegenerateError", base);
    py::register_exception<SpecError>(m, "SpecError", base);
    py::register_exception<EvaluationError>(m, "EvaluationError", base);

    py::class_<Population>(m, "Population")
        .def(py::init([](const std::vector<double>& y, const std::vector<double>& x) {
                 return Population(to_units(y, x));
             }),
             py::arg("y"), py::arg("x"))
        .def("__len__", &Population::size)
        .def_property_readonly("y", &Population::ys)
        .def_property_readonly("x", &Population::xs);

    m.def("load_population", [](const std::filesystem::path& p) { return load_population_file(p); }, py::arg("path"));

    py::class_<DesignParams>(m, "Design")
        .def(py::init(&DesignParams::for_sample_size), py::arg("N"), py::arg("n"))
        .def_readonly("N", &DesignParams::N)
        .def_readonly("n", &DesignParams::n)
        .def_readonly("k", &DesignParams::k)
        .def_property_readonly("theta", &DesignParams::theta);

    py::class_<PopulationSummary>(m, "Summary")
        .def_readonly("N", &PopulationSummary::N)
        .def_readonly("n", &PopulationSummary::n)
        .def_readwrite("ybar", &PopulationSummary::ybar)
        .def_readwrite("xbar", &PopulationSummary::xbar)
        .def_readwrite("s2_y", &PopulationSummary::s2_y)
        .def_readwrite("s2_x", &PopulationSummary::s2_x)
        .def_readwrite("rho", &PopulationSummary::rho)
        .def_readwrite("rho_y", &PopulationSummary::rho_y)
        .def_readwrite("rho_x", &PopulationSummary::rho_x)
        .def_readwrite("theta", &PopulationSummary::theta)
        .def_readwrite("c_y", &PopulationSummary::c_y)
        .def_readwrite("c_x", &PopulationSummary::c_x)
        .def("__repr__", [](const PopulationSummary& s) {
            return "Summary(N=" + std::to_string(s.N) + ", n=" + std::to_string(s.n) +
                   ", rho=" + std::to_string(s.rho) + ", rho_y=" + std::to_string(s.rho_y) + ")";
        });

    m.def("summarize", &summarize, py::arg("population"), py::arg("design"));
    m.def("intraclass_correlation",
          [](const std::vector<double>& v, const DesignParams& d) { return intraclass_correlation(v, d); },
          py::arg("values"), py::arg("design"));

    py::class_<NonResponseSpec>(m, "NonResponse")
        .def(py::init([](double k, double l, double s2) {
                 NonResponseSpec nr{k, l, s2};
                 nr.validate();
                 return nr;
             }),
             py::arg("k_rate"), py::arg("l_factor"), py::arg("s2_y2"))
        .def_readonly("k_rate", &NonResponseSpec::k_rate)
        .def_readonly("l_factor", &NonResponseSpec::l_factor)
        .def_readonly("s2_y2", &NonResponseSpec::s2_y2);

    py::class_<TheoryResult>(m, "TheoryResult")
        .def_property_readonly("estimator", [](const TheoryResult& r) { return std::string(to_string(r.estimator)); })
        .def_readonly("bias", &TheoryResult::bias)
        .def_readonly("mse", &TheoryResult::mse)
        .def_readonly("pre", &TheoryResult::pre_vs_hh)
        .def_readonly("constants", &TheoryResult::constants);

    m.def("var_hh", &var_hh, py::arg("summary"), py::arg("nonresponse"));
    m.def("theory_hh", &theory_hh, py::arg("summary"), py::arg("nonresponse"));
    m.def("theory_lr", &mse_lr, py::arg("summary"), py::arg("nonresponse"));
    m.def(
        "theory_t1",
        [](const PopulationSummary& s, const NonResponseSpec& nr, std::optional<std::pair<double, double>> w) {
            std::optional<T1Weights> weights;
            if (w) weights = T1Weights{w->first, w->second};
            return theory_t1(s, nr, weights);
        },
        py::arg("summary"), py::arg("nonresponse"), py::arg("weights") = py::none());
    m.def(
        "theory_t2",
        [](const PopulationSummary& s, const NonResponseSpec& nr, double alpha, double delta,
           std::optional<std::pair<double, double>> w) {
            std::optional<T2Weights> weights;
            if (w) weights = T2Weights{w->first, w->second};
            return theory_t2(s, nr, T2Shape{alpha, delta}, weights);
        },
        py::arg("summary"), py::arg("nonresponse"), py::arg("alpha") = 0.0, py::arg("delta") = 1.0,
        py::arg("weights") = py::none());
    m.def("theory_t3", &theory_t3, py::arg("summary"), py::arg("nonresponse"), py::arg("b") = py::none(),
          py::arg("gamma") = py::none());

    m.def(
        "theory_table",
        [](const PopulationSummary& s, const std::vector<NonResponseSpec>& grid, const std::string& weights,
           double alpha, double delta, bool flag_published) {
            TableOptions opts;
            opts.shape = {alpha, delta};
            if (weights == "reference")
                opts.mode = WeightMode::reference_cell;
            else if (weights != "per-cell")
                throw SpecError("weights must be 'per-cell' or 'reference'");
            opts.flag_published_suspects = flag_published;
            py::list out;
            for (const auto& row : table31(s, grid, opts)) {
                const TheoryResult* cols[] = {&row.lr, &row.t1, &row.t2, &row.t3};
                for (int c = 0; c < 4; ++c) {
                    py::dict d;
                    d["k_rate"] = row.cell.k_rate;
                    d["l_factor"] = row.cell.l_factor;
                    d["estimator"] = std::string(to_string(cols[c]->estimator));
                    d["bias"] = cols[c]->bias;
                    d["mse"] = cols[c]->mse;
                    d["pre"] = cols[c]->pre_vs_hh;
                    d["suspect"] = row.suspect[c];
                    out.append(d);
                }
            }
            return out;
        },
        py::arg("summary"), py::arg("grid"), py::arg("weights") = "per-cell", py::arg("alpha") = 0.0,
        py::arg("delta") = 1.0, py::arg("flag_published") = false);

    m.def("murthy_summary", &murthy::summary);
    m.def("murthy_grid", &murthy::grid);
    m.def("murthy_published", [] {
        py::list out;
        for (const auto& c : murthy::published_table()) {
            py::dict d;
            d["k_rate"] = c.k_rate;
            d["l_factor"] = c.l_factor;
            d["pre"] = std::vector<double>(c.pre.begin(), c.pre.end());
            d["suspect"] = std::vector<bool>(c.suspect.begin(), c.suspect.end());
            out.append(d);
        }
        return out;
    });

    m.def(
        "generate_population",
        [](std::size_t N, std::size_t n, double rho, double rho_y, double ratio, double k0, double ybar, double xbar,
           double cv_y, double cv_x, std::uint64_t seed) {
            return generate_population(SyntheticSpec{N, n, rho, rho_y, ratio, k0, ybar, xbar, cv_y, cv_x, seed});
        },
        py::arg("N") = 288, py::arg("n") = 16, py::arg("rho") = 0.87, py::arg("rho_y") = 0.3,
        py::arg("ratio") = 2.0, py::arg("k0") = 0.25, py::arg("ybar") = 100.0, py::arg("xbar") = 50.0,
        py::arg("cv_y") = 0.2, py::arg("cv_x") = 0.15, py::arg("seed") = 1);

    m.def(
        "simulate",
        [](const Population& pop, const DesignParams& design, double k_rate, double l_factor, std::size_t reps,
           std::uint64_t seed, const std::string& labeling, double alpha, double delta, const std::string& intraclass,
           std::size_t threads) {
            const auto mode = labeling_mode_from_string(labeling);
            McConfig cfg;
            cfg.replications = reps;
            cfg.seed = seed;
            cfg.l_factor = l_factor;
            cfg.labeling_mode = mode;
            cfg.threads = threads;
            if (intraclass == "pairwise")
                cfg.intraclass = IntraclassSource::pairwise;
            else if (intraclass != "variance-matched")
                throw SpecError("intraclass must be 'variance-matched' or 'pairwise'");
            const auto labels = label_nonresponse(pop, k_rate, mode, labeling_seed(seed));
            const auto inputs = theory_inputs(pop, design, labels, l_factor, cfg.intraclass);
            cfg.estimators = optimum_specs(inputs.summary, inputs.nonresponse, {alpha, delta});
            McReport rep;
            {
                py::gil_scoped_release release;
                rep = run_mc(pop, design, labels, cfg);
            }
            return report_to_dict(rep);
        },
        py::arg("population"), py::arg("design"), py::arg("k_rate"), py::arg("l_factor") = 2.0,
        py::arg("reps") = 1000, py::arg("seed") = 0, py::arg("labeling") = "stratum_tail", py::arg("alpha") = 0.0,
        py::arg("delta") = 1.0, py::arg("intraclass") = "variance-matched", py::arg("threads") = 1);
}
