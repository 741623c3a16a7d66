#include "sysnr/theory.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sysnr/error.hpp"
#include "sysnr/murthy.hpp"

namespace sysnr {

namespace {

double square(double v) { return v * v; }

TheoryResult make_result(Estimator e, double bias, double mse, const PopulationSummary& s,
                         const NonResponseSpec& nr) {
    TheoryResult r;
    r.estimator = e;
    r.bias = bias;
    r.mse = mse;
    const double base = var_hh(s, nr);
    if (mse > 0)
        r.pre_vs_hh = 100.0 * base / mse;
    else
        r.pre_vs_hh = base > 0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    return r;
}

void require_auxiliary(const PopulationSummary& s) {
    if (!(s.c_x > 0) || !(s.inflation_x() > 0))
        throw DegenerateError("auxiliary variable has zero effective variance (C1 = 0)");
}

struct Solution2 {
    double first;
    double second;
};

// Minimizer of c + w'Mw - 2 r'w for symmetric M = [[m11, m12], [m12, m22]].
std::optional<Solution2> solve_normal_equations(double m11, double m12, double m22, double r1, double r2) {
    const double det = m11 * m22 - m12 * m12;
    const double scale = std::abs(m11 * m22) + m12 * m12;
    if (!(det > 1e-14 * scale) || !(m11 > 0)) return std::nullopt;
    return Solution2{(r1 * m22 - r2 * m12) / det, (m11 * r2 - m12 * r1) / det};
}

}  // namespace

void NonResponseSpec::validate() const {
    if (!(k_rate >= 0.0 && k_rate <= 1.0))
        throw DomainError("non-response rate K must lie in [0, 1], got " + std::to_string(k_rate));
    if (!(l_factor >= 1.0) || !std::isfinite(l_factor))
        throw DomainError("sub-sampling factor L must be finite and >= 1, got " + std::to_string(l_factor));
    if (!(s2_y2 >= 0.0) || !std::isfinite(s2_y2))
        throw DomainError("non-response stratum mean square must be finite and >= 0");
}

double NonResponseSpec::inflation(std::size_t n) const {
    if (k_rate == 0.0 || l_factor == 1.0) return 0.0;
    return (l_factor - 1.0) / static_cast<double>(n) * k_rate * s2_y2;
}

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::hh: return "hh";
        case Estimator::lr: return "lr";
        case Estimator::t1: return "t1";
        case Estimator::t2: return "t2";
        case Estimator::t3: return "t3";
    }
    return "?";
}

Estimator estimator_from_string(std::string_view name) {
    for (auto e : {Estimator::hh, Estimator::lr, Estimator::t1, Estimator::t2, Estimator::t3})
        if (to_string(e) == name) return e;
    throw SpecError("unknown estimator '" + std::string(name) + "' (expected hh, lr, t1, t2 or t3)");
}

EffectiveMoments effective_moments(const PopulationSummary& s, const NonResponseSpec& nr) {
    nr.validate();
    if (s.c_x == 0) throw DegenerateError("C_x = 0: auxiliary variable is constant");
    EffectiveMoments m;
    m.theta = s.theta;
    m.rho = s.rho;
    m.c0 = s.c_y * std::sqrt(s.inflation_y());
    m.c1 = s.c_x * std::sqrt(s.inflation_x());
    m.nr = nr.inflation(s.n);
    m.v0 = s.theta * m.c0 * m.c0 + m.nr / square(s.ybar);
    m.v1 = s.theta * m.c1 * m.c1;
    m.c01 = s.theta * s.rho * m.c0 * m.c1;
    m.rho_star = std::sqrt(s.inflation_y()) / std::sqrt(s.inflation_x());
    m.k1 = s.rho * s.c_y / s.c_x;
    return m;
}

double var_hh(const PopulationSummary& s, const NonResponseSpec& nr) {
    nr.validate();
    return s.theta * s.inflation_y() * s.s2_y + nr.inflation(s.n);
}

double var_xstar(const PopulationSummary& s) { return s.theta * s.inflation_x() * s.s2_x; }

double pre(double candidate_mse, const PopulationSummary& s, const NonResponseSpec& nr) {
    if (!(candidate_mse > 0) || !std::isfinite(candidate_mse))
        throw DomainError("PRE needs a positive finite candidate MSE, got " + std::to_string(candidate_mse));
    return 100.0 * var_hh(s, nr) / candidate_mse;
}

double population_slope(const PopulationSummary& s) {
    require_auxiliary(s);
    const double c0 = s.c_y * std::sqrt(s.inflation_y());
    const double c1 = s.c_x * std::sqrt(s.inflation_x());
    return s.rho * s.ybar * c0 / (s.xbar * c1);
}

TheoryResult theory_hh(const PopulationSummary& s, const NonResponseSpec& nr) {
    return make_result(Estimator::hh, 0.0, var_hh(s, nr), s, nr);
}

TheoryResult mse_lr(const PopulationSummary& s, const NonResponseSpec& nr) {
    require_auxiliary(s);
    const auto m = effective_moments(s, nr);
    const double mse = s.theta * square(s.ybar) * square(m.c0) * (1.0 - square(s.rho)) + m.nr;
    auto r = make_result(Estimator::lr, 0.0, mse, s, nr);
    r.constants["b"] = population_slope(s);
    return r;
}

TheoryResult theory_t1(const PopulationSummary& s, const NonResponseSpec& nr, std::optional<T1Weights> weights) {
    const auto m = effective_moments(s, nr);
    const double Y = s.ybar;
    const double X = s.xbar;
    const double q11 = Y * Y * (1.0 + m.theta * square(m.c0)) + m.nr;
    const double q22 = X * X * m.v1;
    const double q12 = -X * Y * m.c01;

    std::map<std::string, double> constants;
    if (!weights) {
        const auto w = solve_normal_equations(q11, q12, q22, Y * Y, 0.0);
        if (!w) throw DegenerateError("t1 normal equations are singular (V(xbar*) = 0)");
        weights = T1Weights{w->first, w->second};
        const double q = (1.0 - square(s.rho)) * m.theta * square(m.c0);
        constants["w11_printed"] = 1.0 / (1.0 + q + m.nr / (Y * Y));
        constants["w12_printed"] = s.rho * m.c0 * Y / (X * m.c1 * (1.0 + q) + m.nr / (Y * Y));
    }
    const auto [w11, w12] = *weights;
    const double mse = Y * Y + w11 * w11 * q11 + w12 * w12 * q22 + 2.0 * w11 * w12 * q12 - 2.0 * w11 * Y * Y;
    auto r = make_result(Estimator::t1, (w11 - 1.0) * Y, mse, s, nr);
    constants["w11"] = w11;
    constants["w12"] = w12;
    r.constants = std::move(constants);
    return r;
}

ACoefficients a_coeffs(const EffectiveMoments& m, double delta_eff, double nr_abs) {
    const double d = delta_eff;
    const double c0c1 = m.c0 * m.c1;
    const double c1sq = m.c1 * m.c1;
    ACoefficients a;
    a.a1 = 1.0 + m.theta * (m.c0 * m.c0 + (2.0 * d * d + d) * c1sq - 4.0 * d * m.rho * c0c1);
    a.a2 = m.theta * c1sq;
    a.a3 = m.theta * (2.0 * d * c1sq - m.rho * c0c1);
    a.a4 = 1.0 - m.theta * (d * m.rho * c0c1 - d * (d + 1.0) / 2.0 * c1sq);
    a.a5 = d * m.theta * c1sq;
    a.a6 = nr_abs;
    return a;
}

TheoryResult theory_t2(const PopulationSummary& s, const NonResponseSpec& nr, T2Shape shape,
                       std::optional<T2Weights> weights) {
    if (!(shape.alpha >= 0.0 && shape.alpha <= 1.0))
        throw SpecError("t2 alpha must lie in [0, 1], got " + std::to_string(shape.alpha));
    if (!std::isfinite(shape.delta)) throw SpecError("t2 delta must be finite");
    const auto m = effective_moments(s, nr);
    const double de = shape.delta_eff();
    const auto a = a_coeffs(m, de, m.nr);
    const double Y = s.ybar;
    const double X = s.xbar;

    std::map<std::string, double> constants;
    if (!weights) {
        const double denom = a.a1 * a.a2 - a.a3 * a.a3 + a.a2 * a.a6 / (Y * Y);
        const auto w = solve_normal_equations(Y * Y * a.a1 + a.a6, X * Y * a.a3, X * X * a.a2, Y * Y * a.a4,
                                              X * Y * a.a5);
        if (!w)
            throw DegenerateError("t2 optimum undefined: A1*A2 - A3^2 + A2*A6/Ybar^2 = " + std::to_string(denom) +
                                  " is not positive");
        weights = T2Weights{w->first, w->second};
        constants["w21_printed"] = (a.a2 * a.a4 - a.a3 * a.a5) / denom;
        constants["w22_printed"] = Y / X * (a.a1 * a.a5 - a.a3 * a.a4 + a.a5 * a.a6 / (Y * Y)) / denom;
    }
    const auto [w21, w22] = *weights;
    const double mse = Y * Y + w21 * w21 * Y * Y * a.a1 + w22 * w22 * X * X * a.a2 + 2.0 * w21 * w22 * X * Y * a.a3 -
                       2.0 * w21 * Y * Y * a.a4 - 2.0 * w22 * X * Y * a.a5 + w21 * w21 * a.a6;
    const double bias = Y * (w21 * a.a4 - 1.0) + w22 * X * a.a5;
    auto r = make_result(Estimator::t2, bias, mse, s, nr);
    constants["w21"] = w21;
    constants["w22"] = w22;
    constants["alpha"] = shape.alpha;
    constants["delta"] = shape.delta;
    constants["delta_eff"] = de;
    r.constants = std::move(constants);
    return r;
}

TheoryResult theory_t3(const PopulationSummary& s, const NonResponseSpec& nr, std::optional<double> b,
                       std::optional<double> gamma) {
    const auto m = effective_moments(s, nr);
    const double Y = s.ybar;
    const double X = s.xbar;
    const double slope = b ? *b : population_slope(s);
    const double tc0 = m.theta * square(m.c0);
    const double tail = slope * slope * X * X * m.v1 - 2.0 * X * Y * slope * m.c01;
    const double bracket = Y * Y * (1.0 + tc0) + tail;

    std::map<std::string, double> constants;
    if (!gamma) {
        const double denom = bracket + m.nr;
        if (!(denom > 0)) throw DegenerateError("t3 optimum undefined: gamma* denominator is not positive");
        gamma = Y * Y / denom;
        constants["gamma_printed"] = Y * Y / (Y * Y * (1.0 - tc0) + tail + m.nr);
    }
    const double g = *gamma;
    const double mse = g * g * bracket + Y * Y * (1.0 - 2.0 * g) + m.nr * g * g;
    auto r = make_result(Estimator::t3, (g - 1.0) * Y, mse, s, nr);
    constants["gamma"] = g;
    constants["b"] = slope;
    r.constants = std::move(constants);
    return r;
}

double backsolve_intraclass(const PopulationSummary& base, const NonResponseSpec& nr, double target_pre) {
    nr.validate();
    const double p = target_pre / 100.0;
    const double nr_abs = nr.inflation(base.n);
    const double a = base.theta * base.s2_y;
    const double one_minus_rho2 = 1.0 - square(base.rho);
    // 100 (a f + nr) / (a f (1 - rho^2) + nr) = target  =>  f = nr (p - 1) / (a (1 - p (1 - rho^2)))
    const double denom = a * (1.0 - p * one_minus_rho2);
    if (nr_abs == 0 || !(denom > 0) || !(p > 1))
        throw DomainError("lr PRE of " + std::to_string(target_pre) + " is not attainable by any intraclass correlation");
    const double f = nr_abs * (p - 1.0) / denom;
    const double r = (f - 1.0) / (static_cast<double>(base.n) - 1.0);
    if (r < -1.0 / (static_cast<double>(base.n) - 1.0) || r > 1.0)
        throw DomainError("back-solved intraclass correlation " + std::to_string(r) + " is outside its range");
    return r;
}

std::vector<TableRow> table31(const PopulationSummary& s, std::span<const NonResponseSpec> grid,
                              const TableOptions& options) {
    if (grid.empty()) throw DomainError("table grid is empty");

    std::optional<T1Weights> t1w;
    std::optional<T2Weights> t2w;
    std::optional<double> gamma;
    const double slope = population_slope(s);
    if (options.mode == WeightMode::reference_cell) {
        const NonResponseSpec ref = options.reference.value_or(grid.front());
        const auto r1 = theory_t1(s, ref);
        const auto r2 = theory_t2(s, ref, options.shape);
        const auto r3 = theory_t3(s, ref, slope);
        t1w = T1Weights{r1.constants.at("w11"), r1.constants.at("w12")};
        t2w = T2Weights{r2.constants.at("w21"), r2.constants.at("w22")};
        gamma = r3.constants.at("gamma");
    }

    std::vector<TableRow> rows;
    rows.reserve(grid.size());
    for (const auto& cell : grid) {
        TableRow row;
        row.cell = cell;
        row.lr = mse_lr(s, cell);
        row.t1 = theory_t1(s, cell, t1w);
        row.t2 = theory_t2(s, cell, options.shape, t2w);
        row.t3 = theory_t3(s, cell, slope, gamma);
        if (options.flag_published_suspects)
            if (const auto* pub = murthy::find_published(cell.k_rate, cell.l_factor)) row.suspect = pub->suspect;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sysnr
