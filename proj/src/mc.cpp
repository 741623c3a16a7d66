#include "sysnr/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sysnr/error.hpp"
#include "sysnr/rng.hpp"

namespace sysnr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Neumaier-compensated sum in extended precision. Summation is always in
// index order, so the result does not depend on how the slots were filled.
template <class F>
long double compensated_sum(std::size_t count, F&& term) {
    long double sum = 0, comp = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const long double v = term(i);
        const long double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

TheoryInputs theory_inputs(const Population& pop, const DesignParams& design, const NonResponseLabeling& labeling,
                           double l_factor, IntraclassSource source) {
    TheoryInputs in;
    in.summary = summarize(pop, design);
    if (source == IntraclassSource::variance_matched)
        in.summary = with_variance_matched_intraclass(in.summary, pop, design);
    in.nonresponse = {labeling.realized_rate, l_factor, nonresponse_mean_square(pop, labeling)};
    in.nonresponse.validate();
    return in;
}

std::vector<EstimatorSpec> optimum_specs(const PopulationSummary& s, const NonResponseSpec& nr, T2Shape shape) {
    const double slope = population_slope(s);
    const auto t1 = theory_t1(s, nr).constants;
    const auto t2 = theory_t2(s, nr, shape).constants;
    const auto t3 = theory_t3(s, nr, slope).constants;
    return {
        EstimatorSpec{HhForm{}, s.xbar},
        EstimatorSpec{LrForm{slope}, s.xbar},
        EstimatorSpec{T1Form{t1.at("w11"), t1.at("w12")}, s.xbar},
        EstimatorSpec{T2Form{t2.at("w21"), t2.at("w22"), shape.alpha, shape.delta}, s.xbar},
        EstimatorSpec{T3Form{t3.at("gamma"), slope}, s.xbar},
    };
}

TheoryResult theory_for(const EstimatorSpec& spec, const PopulationSummary& s, const NonResponseSpec& nr) {
    if (const auto* v = std::get_if<LrForm>(&spec.form)) {
        auto r = theory_t3(s, nr, v->b, 1.0);
        r.estimator = Estimator::lr;
        r.constants = spec.constants();
        return r;
    }
    if (const auto* v = std::get_if<T1Form>(&spec.form)) return theory_t1(s, nr, T1Weights{v->w11, v->w12});
    if (const auto* v = std::get_if<T2Form>(&spec.form))
        return theory_t2(s, nr, T2Shape{v->alpha, v->delta}, T2Weights{v->w21, v->w22});
    if (const auto* v = std::get_if<T3Form>(&spec.form)) return theory_t3(s, nr, v->b, v->gamma);
    return theory_hh(s, nr);
}

McReport run_mc(const Population& pop, const DesignParams& design, const NonResponseLabeling& labeling,
                const McConfig& cfg) {
    if (cfg.replications < 1) throw DomainError("replications must be >= 1");
    if (cfg.estimators.empty()) throw SpecError("no estimators configured");
    if (!(cfg.first_order_slack >= 0)) throw DomainError("first-order slack must be >= 0");

    const auto inputs = theory_inputs(pop, design, labeling, cfg.l_factor, cfg.intraclass);
    McReport report;
    report.summary = summarize(pop, design);
    report.theory_summary = inputs.summary;
    report.nonresponse = inputs.nonresponse;
    report.replications = cfg.replications;

    const std::size_t R = cfg.replications;
    const std::size_t E = cfg.estimators.size();
    const double ybar = report.summary.ybar;
    std::vector<double> errors(R * E);
    std::vector<double> realized_l(R, kNaN);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const auto draw = draw_realization(pop, design, labeling, cfg.l_factor, derive_seed(cfg.seed, r));
            if (auto l = draw.realized_l()) realized_l[r] = *l;
            for (std::size_t e = 0; e < E; ++e) errors[e * R + r] = point_estimate(cfg.estimators[e], draw) - ybar;
        }
    };

    std::size_t threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    threads = std::min(threads, R);
    if (threads <= 1) {
        work(0, R);
    } else {
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        const std::size_t chunk = (R + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(R, begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                try {
                    work(begin, end);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    std::size_t with_nr = 0;
    const long double l_sum = compensated_sum(R, [&](std::size_t r) {
        if (std::isnan(realized_l[r])) return 0.0L;
        ++with_nr;
        return static_cast<long double>(realized_l[r]);
    });
    report.mean_realized_l = with_nr ? static_cast<double>(l_sum / with_nr) : kNaN;
    report.l_mismatch = with_nr && std::abs(report.mean_realized_l - cfg.l_factor) / cfg.l_factor > 0.1;

    const long double Rl = static_cast<long double>(R);
    for (std::size_t e = 0; e < E; ++e) {
        const double* err = errors.data() + e * R;
        const auto& spec = cfg.estimators[e];
        McRow row;
        row.estimator = spec.variant();
        row.constants = spec.constants();
        row.empirical_bias = static_cast<double>(compensated_sum(R, [&](std::size_t r) { return static_cast<long double>(err[r]); }) / Rl);
        const long double mse = compensated_sum(R, [&](std::size_t r) {
                                    const long double v = err[r];
                                    return v * v;
                                }) /
                                Rl;
        row.empirical_mse = static_cast<double>(mse);
        if (R > 1) {
            const long double ss = compensated_sum(R, [&](std::size_t r) {
                const long double d = static_cast<long double>(err[r]) * err[r] - mse;
                return d * d;
            });
            row.mse_standard_error = static_cast<double>(std::sqrt(ss / (Rl - 1)) / std::sqrt(Rl));
        } else {
            row.mse_standard_error = kNaN;
        }

        const auto th = theory_for(spec, inputs.summary, inputs.nonresponse);
        row.theory_bias = th.bias;
        row.theory_mse = th.mse;
        const double diff = row.empirical_mse - row.theory_mse;
        if (row.mse_standard_error > 0)
            row.z_score = diff / row.mse_standard_error;
        else
            row.z_score = diff == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        const double slack = row.estimator == Estimator::hh ? 0.0 : cfg.first_order_slack;
        const double se = std::isnan(row.mse_standard_error) ? 0.0 : row.mse_standard_error;
        row.tolerance = std::max(3.0 * se, slack * std::abs(row.theory_mse));
        row.within_band = std::abs(diff) <= row.tolerance;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::vector<Verdict> classify_across_seeds(const std::vector<McReport>& reports) {
    if (reports.empty()) return {};
    const std::size_t E = reports.front().rows.size();
    std::vector<Verdict> out(E, Verdict::holds_first_order);
    for (std::size_t e = 0; e < E; ++e) {
        std::size_t misses = 0;
        for (const auto& rep : reports) {
            if (rep.rows.size() != E || rep.rows[e].estimator != reports.front().rows[e].estimator)
                throw DomainError("reports list different estimators");
            if (!rep.rows[e].within_band) ++misses;
        }
        if (misses >= 2) out[e] = Verdict::violated;
    }
    return out;
}

}  // namespace sysnr
