#include "sysnr/cli.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include "sysnr/error.hpp"
#include "sysnr/mc.hpp"
#include "sysnr/murthy.hpp"
#include "sysnr/rng.hpp"
#include "sysnr/synthetic.hpp"

namespace sysnr::cli {

namespace {

struct RunConfig {
    std::string command;
    std::string pop_path;
    std::string builtin;
    std::string synthetic;
    std::size_t n = 0;
    std::vector<double> k_grid{0.1, 0.2, 0.3, 0.4};
    std::vector<double> l_grid{2.0, 2.5, 3.0, 3.5};
    double alpha = 0.0;
    double delta = 1.0;
    std::string weights = "per-cell";
    std::string format = "text";
    std::string out_path;
    std::size_t reps = 1000;
    std::uint64_t seed = 0;
    double l_value = 2.0;
    std::optional<double> k_value;
    std::string labeling = "stratum_tail";
    std::size_t threads = 1;
    std::string intraclass = "variance-matched";
};

class UsageError : public Error {
public:
    using Error::Error;
};

struct DataSource {
    std::optional<Population> pop;
    std::optional<SyntheticSpec> synthetic;
    DesignParams design;
    PopulationSummary summary;
    bool builtin = false;
};

DataSource resolve_data(const RunConfig& cfg, bool allow_builtin) {
    const int given = !cfg.pop_path.empty() + !cfg.builtin.empty() + !cfg.synthetic.empty();
    if (given != 1) throw UsageError("exactly one of --pop, --builtin, --synthetic is required for " + cfg.command);
    DataSource d;
    if (!cfg.builtin.empty()) {
        if (cfg.builtin != murthy::kName)
            throw UsageError("unknown built-in parameter set '" + cfg.builtin + "' (available: " +
                             std::string(murthy::kName) + ")");
        if (!allow_builtin)
            throw UsageError(cfg.command + " needs unit-level data; the built-in set only carries summary statistics");
        d.builtin = true;
        d.design = DesignParams::for_sample_size(murthy::kN, murthy::kSampleSize);
        d.summary = murthy::summary();
        return d;
    }
    if (!cfg.synthetic.empty()) {
        d.synthetic = parse_synthetic_spec(cfg.synthetic);
        d.pop = generate_population(*d.synthetic);
        d.design = d.synthetic->design();
    } else {
        d.pop = load_population_file(cfg.pop_path);
        if (cfg.n == 0) throw UsageError("--n (systematic sample size) is required with --pop");
        d.design = DesignParams::for_sample_size(d.pop->size(), cfg.n);
    }
    d.summary = summarize(*d.pop, d.design);
    return d;
}

std::string full(double v) { return fmt::format("{:.17g}", v); }

int cmd_summarize(const RunConfig& cfg, std::ostream& out) {
    const auto d = resolve_data(cfg, true);
    const auto& s = d.summary;
    if (cfg.format == "csv") {
        fmt::print(out, "field,value\n");
        fmt::print(out, "N,{}\nn,{}\nk,{}\n", s.N, s.n, d.design.k);
        for (const auto& [name, v] : {std::pair{"theta", s.theta}, {"ybar", s.ybar}, {"xbar", s.xbar},
                                      {"s2_y", s.s2_y}, {"s2_x", s.s2_x}, {"rho", s.rho}, {"rho_y", s.rho_y},
                                      {"rho_x", s.rho_x}, {"c_y", s.c_y}, {"c_x", s.c_x}})
            fmt::print(out, "{},{}\n", name, full(v));
        return kOk;
    }
    fmt::print(out, "N={} n={} theta={:.6f}\n", s.N, s.n, s.theta);
    fmt::print(out, "k={}\n", d.design.k);
    fmt::print(out, "ybar={:.6f}\nxbar={:.6f}\n", s.ybar, s.xbar);
    fmt::print(out, "s2_y={:.6f}\ns2_x={:.6f}\n", s.s2_y, s.s2_x);
    fmt::print(out, "rho={:.6f}\nrho_y={:.6f}\nrho_x={:.6f}\n", s.rho, s.rho_y, s.rho_x);
    fmt::print(out, "c_y={:.6f}\nc_x={:.6f}\n", s.c_y, s.c_x);
    return kOk;
}

std::vector<NonResponseSpec> build_grid(const RunConfig& cfg, const DataSource& d) {
    if (cfg.k_grid.empty() || cfg.l_grid.empty()) throw UsageError("--k-grid and --l-grid must be non-empty");
    const auto mode = labeling_mode_from_string(cfg.labeling);
    std::vector<NonResponseSpec> grid;
    for (double k : cfg.k_grid) {
        double s2 = murthy::kS2y2;
        if (!d.builtin) s2 = nonresponse_mean_square(*d.pop, label_nonresponse(*d.pop, k, mode, labeling_seed(cfg.seed)));
        for (double l : cfg.l_grid) {
            NonResponseSpec cell{k, l, s2};
            cell.validate();
            grid.push_back(cell);
        }
    }
    return grid;
}

WeightMode weight_mode(const std::string& name) {
    if (name == "per-cell") return WeightMode::per_cell;
    if (name == "reference") return WeightMode::reference_cell;
    throw UsageError("unknown weight mode '" + name + "' (expected per-cell or reference)");
}

int cmd_theory_table(const RunConfig& cfg, std::ostream& out) {
    const auto d = resolve_data(cfg, true);
    const auto grid = build_grid(cfg, d);
    TableOptions opts;
    opts.shape = {cfg.alpha, cfg.delta};
    opts.mode = weight_mode(cfg.weights);
    opts.flag_published_suspects = d.builtin;
    const auto rows = table31(d.summary, grid, opts);

    if (cfg.format == "csv") {
        fmt::print(out, "k_rate,l_factor,estimator,bias,mse,pre_vs_hh,suspect\n");
        for (const auto& row : rows) {
            const TheoryResult* cols[] = {&row.lr, &row.t1, &row.t2, &row.t3};
            for (std::size_t c = 0; c < 4; ++c)
                fmt::print(out, "{},{},{},{},{},{},{}\n", full(row.cell.k_rate), full(row.cell.l_factor),
                           to_string(cols[c]->estimator), full(cols[c]->bias), full(cols[c]->mse),
                           full(cols[c]->pre_vs_hh), row.suspect[c] ? 1 : 0);
        }
        return kOk;
    }
    fmt::print(out, "{:>6} {:>6} {:>11} {:>11} {:>11} {:>11}\n", "K", "L", "PRE(lr)", "PRE(t1)", "PRE(t2)", "PRE(t3)");
    bool any_suspect = false;
    for (const auto& row : rows) {
        fmt::print(out, "{:>6.3f} {:>6.3f}", row.cell.k_rate, row.cell.l_factor);
        const TheoryResult* cols[] = {&row.lr, &row.t1, &row.t2, &row.t3};
        for (std::size_t c = 0; c < 4; ++c) {
            fmt::print(out, " {:>10.4f}{}", cols[c]->pre_vs_hh, row.suspect[c] ? '*' : ' ');
            any_suspect = any_suspect || row.suspect[c];
        }
        fmt::print(out, "\n");
    }
    fmt::print(out, "t2: alpha={} delta={}; weights: {}\n", cfg.alpha, cfg.delta, cfg.weights);
    if (any_suspect) fmt::print(out, "* published value for this cell is a suspected transcription error\n");
    return kOk;
}

int cmd_audit_table31(const RunConfig& cfg, std::ostream& out) {
    constexpr double kTolerance = 5e-4;  // 0.05 % relative
    const auto s = murthy::summary();
    const auto grid = murthy::grid();
    TableOptions opts;
    opts.shape = {0.0, 1.0};
    opts.mode = WeightMode::reference_cell;
    opts.flag_published_suspects = true;
    const auto rows = table31(s, grid, opts);

    const bool csv = cfg.format == "csv";
    if (csv)
        fmt::print(out, "k_rate,l_factor,estimator,published,computed,rel_dev,flag\n");
    else
        fmt::print(out, "{:>5} {:>5} {:>4} {:>10} {:>10} {:>10}  {}\n", "K", "L", "est", "published", "computed", "rel_dev",
                   "flag");
    std::size_t checked = 0, passed = 0, flagged = 0;
    for (const auto& row : rows) {
        const auto* pub = murthy::find_published(row.cell.k_rate, row.cell.l_factor);
        const TheoryResult* cols[] = {&row.lr, &row.t1, &row.t2, &row.t3};
        for (std::size_t c = 0; c < 4; ++c) {
            const double published = pub->pre[c];
            const double computed = cols[c]->pre_vs_hh;
            const double dev = (computed - published) / published;
            std::string flag;
            if (pub->suspect[c]) {
                flag = "suspect-transcription";
                ++flagged;
            } else {
                ++checked;
                const bool ok = std::abs(dev) <= kTolerance;
                passed += ok;
                flag = ok ? "ok" : "MISMATCH";
            }
            if (csv)
                fmt::print(out, "{},{},{},{},{},{},{}\n", full(row.cell.k_rate), full(row.cell.l_factor),
                           to_string(cols[c]->estimator), full(published), full(computed), full(dev), flag);
            else
                fmt::print(out, "{:>5.1f} {:>5.1f} {:>4} {:>10.4f} {:>10.4f} {:>+9.4f}%  {}\n", row.cell.k_rate,
                           row.cell.l_factor, to_string(cols[c]->estimator), published, computed, 100.0 * dev, flag);
        }
    }
    if (!csv) {
        fmt::print(out, "rho_y = rho_x = {:.6f} (back-solved at K={}, L={})\n", s.rho_y, murthy::kAnchorK,
                   murthy::kAnchorL);
        fmt::print(out, "{}/{} checked cells within 0.05%; {} flagged\n", passed, checked, flagged);
    }
    return passed == checked ? kOk : kAuditFailed;
}

IntraclassSource intraclass_source(const std::string& name) {
    if (name == "variance-matched") return IntraclassSource::variance_matched;
    if (name == "pairwise") return IntraclassSource::pairwise;
    throw UsageError("unknown intraclass source '" + name + "' (expected variance-matched or pairwise)");
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto d = resolve_data(cfg, false);
    const double k_rate = cfg.k_value.value_or(d.synthetic ? d.synthetic->tail_fraction : 0.0);
    const auto mode = labeling_mode_from_string(cfg.labeling);
    const auto labeling = label_nonresponse(*d.pop, k_rate, mode, labeling_seed(cfg.seed));

    McConfig mc;
    mc.replications = cfg.reps;
    mc.seed = cfg.seed;
    mc.l_factor = cfg.l_value;
    mc.labeling_mode = mode;
    mc.intraclass = intraclass_source(cfg.intraclass);
    mc.threads = cfg.threads;
    const auto inputs = theory_inputs(*d.pop, d.design, labeling, cfg.l_value, mc.intraclass);
    mc.estimators = optimum_specs(inputs.summary, inputs.nonresponse, {cfg.alpha, cfg.delta});
    const auto report = run_mc(*d.pop, d.design, labeling, mc);

    if (report.l_mismatch)
        fmt::print(err, "warning: mean realized L' = {:.4f} differs from L = {} by more than 10%\n",
                   report.mean_realized_l, cfg.l_value);

    if (cfg.format == "csv") {
        fmt::print(out,
                   "estimator,empirical_bias,empirical_mse,mse_se,theory_bias,theory_mse,z_score,tolerance,within_band,"
                   "mean_realized_l\n");
        for (const auto& r : report.rows)
            fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", to_string(r.estimator), full(r.empirical_bias),
                       full(r.empirical_mse), full(r.mse_standard_error), full(r.theory_bias), full(r.theory_mse),
                       full(r.z_score), full(r.tolerance), r.within_band ? 1 : 0, full(report.mean_realized_l));
        return kOk;
    }
    const auto& nr = report.nonresponse;
    fmt::print(out, "N={} n={} k={} K={:.4f} L={} S_y2^2={:.6f} reps={} seed={}\n", d.design.N, d.design.n,
               d.design.k, nr.k_rate, nr.l_factor, nr.s2_y2, report.replications, cfg.seed);
    fmt::print(out, "theory intraclass ({}): rho_y={:.6f} rho_x={:.6f}; mean realized L'={:.4f}\n", cfg.intraclass,
               report.theory_summary.rho_y, report.theory_summary.rho_x, report.mean_realized_l);
    fmt::print(out, "{:>4} {:>12} {:>14} {:>12} {:>12} {:>14} {:>8}  {}\n", "est", "emp_bias", "emp_mse", "mse_se",
               "th_bias", "th_mse", "z", "verdict");
    for (const auto& r : report.rows)
        fmt::print(out, "{:>4} {:>12.6f} {:>14.6f} {:>12.6f} {:>12.6f} {:>14.6f} {:>8.3f}  {}\n", to_string(r.estimator),
                   r.empirical_bias, r.empirical_mse, r.mse_standard_error, r.theory_bias, r.theory_mse, r.z_score,
                   r.within_band ? "holds at first order" : "outside band");
    return kOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.format != "text" && cfg.format != "csv") throw UsageError("--format must be text or csv");
    if (cfg.command == "summarize") return cmd_summarize(cfg, out);
    if (cfg.command == "theory-table") return cmd_theory_table(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out, err);
    return cmd_audit_table31(cfg, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Regression-type estimators under systematic sampling with non-response", "sysnr"};
    app.set_config("--config", "", "key=value file; command-line flags override its values");
    app.add_option("command", cfg.command, "summarize | theory-table | simulate | audit-table31")
        ->required()
        ->check(CLI::IsMember({"summarize", "theory-table", "simulate", "audit-table31"}));
    app.add_option("--pop", cfg.pop_path, "CSV population file with columns y,x");
    app.add_option("--builtin", cfg.builtin, "built-in parameter set (murthy1967-summary)");
    app.add_option("--synthetic", cfg.synthetic, "synthetic frame, e.g. N=288,n=16,rho=0.87,rho_y=0.3,ratio=2,k0=0.25");
    app.add_option("--n", cfg.n, "systematic sample size (with --pop)");
    app.add_option("--k-grid", cfg.k_grid, "non-response rates K")->delimiter(',');
    app.add_option("--l-grid", cfg.l_grid, "sub-sampling factors L")->delimiter(',');
    app.add_option("--alpha", cfg.alpha, "t2 alpha");
    app.add_option("--delta", cfg.delta, "t2 delta");
    app.add_option("--weights", cfg.weights, "per-cell | reference");
    app.add_option("--format", cfg.format, "text | csv");
    app.add_option("--out", cfg.out_path, "write results to this file instead of stdout");
    app.add_option("--reps", cfg.reps, "Monte Carlo replications");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--L", cfg.l_value, "sub-sampling factor for simulate");
    app.add_option("--K", cfg.k_value, "non-response rate for simulate");
    app.add_option("--labeling", cfg.labeling, "stratum_tail | bernoulli");
    app.add_option("--threads", cfg.threads, "simulation threads (0 = all cores)");
    app.add_option("--intraclass", cfg.intraclass, "variance-matched | pairwise (simulate theory columns)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (!cfg.out_path.empty()) {
            std::ofstream file(cfg.out_path, std::ios::binary);
            if (!file) throw IoError("cannot open output file '" + cfg.out_path + "'");
            const int code = dispatch(cfg, file, err);
            file.flush();
            if (!file) throw IoError("failed writing '" + cfg.out_path + "'");
            return code;
        }
        return dispatch(cfg, out, err);
    } catch (const UsageError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    } catch (const SpecError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    } catch (const DegenerateError& e) {
        fmt::print(err, "numeric error: {}\n", e.what());
        return kNumeric;
    } catch (const EvaluationError& e) {
        fmt::print(err, "numeric error: {}\n", e.what());
        return kNumeric;
    } catch (const Error& e) {
        fmt::print(err, "data error: {}\n", e.what());
        return kData;
    }
}

}  // namespace sysnr::cli
