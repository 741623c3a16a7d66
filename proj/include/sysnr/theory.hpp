#pragma once

// First-order bias/MSE engine for the Hansen-Hurwitz mean, the regression
// estimator and the classes t1, t2, t3 under systematic sampling with
// non-response on the study variable.
//
// Effective coefficients of variation carry the intraclass factor:
//   C0 = C_y sqrt(1 + (n-1) rho_y),  C1 = C_x sqrt(1 + (n-1) rho_x),
// so theta*C0^2, theta*C1^2 and theta*rho*C0*C1 are the relative
// variances/covariance of ybar** (response part) and xbar*.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sysnr/population.hpp"

namespace sysnr {

struct NonResponseSpec {
    double k_rate = 0;    // K, population non-response rate (also written W2)
    double l_factor = 1;  // L = n2 / h2
    double s2_y2 = 0;     // mean square of y in the non-response stratum

    /// Throws DomainError for K outside [0, 1], L < 1 or negative s2_y2.
    void validate() const;

    /// (L - 1)/n * K * S_y2^2, in units of Var(ybar). Exactly 0 when K = 0 or L = 1.
    double inflation(std::size_t n) const;
};

struct EffectiveMoments {
    double theta = 0;
    double rho = 0;
    double c0 = 0;
    double c1 = 0;
    double v0 = 0;   // E(e0^2) = theta c0^2 + nr / Ybar^2
    double v1 = 0;   // E(e1^2) = theta c1^2
    double c01 = 0;  // E(e0 e1) = theta rho c0 c1
    double nr = 0;   // absolute non-response inflation
    double rho_star = 0;
    double k1 = 0;   // rho C_y / C_x
};

enum class Estimator { hh, lr, t1, t2, t3 };

std::string_view to_string(Estimator e);
/// Throws SpecError on an unknown name.
Estimator estimator_from_string(std::string_view name);

struct TheoryResult {
    Estimator estimator = Estimator::hh;
    double bias = 0;
    double mse = 0;
    double pre_vs_hh = 0;  // 100 * V(ybar**) / mse
    std::map<std::string, double> constants;
};

struct T1Weights {
    double w11 = 1;
    double w12 = 0;
};

struct T2Weights {
    double w21 = 1;
    double w22 = 0;
};

/// Shape constants of t2: [X / (alpha X + (1 - alpha) xbar*)]^delta.
struct T2Shape {
    double alpha = 0;
    double delta = 1;

    /// Exponent carried by e1 after first-order expansion.
    double delta_eff() const { return delta * (1.0 - alpha); }
};

struct ACoefficients {
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0, a6 = 0;
};

EffectiveMoments effective_moments(const PopulationSummary& s, const NonResponseSpec& nr);

/// V(ybar**) = theta (1 + (n-1) rho_y) S_y^2 + (L-1)/n K S_y2^2.
double var_hh(const PopulationSummary& s, const NonResponseSpec& nr);
/// V(xbar*) = theta (1 + (n-1) rho_x) S_x^2.
double var_xstar(const PopulationSummary& s);

/// 100 * var_hh / candidate_mse. Throws DomainError for candidate_mse <= 0.
double pre(double candidate_mse, const PopulationSummary& s, const NonResponseSpec& nr);

TheoryResult theory_hh(const PopulationSummary& s, const NonResponseSpec& nr);

/// MSE(y_lr**) = theta Ybar^2 (1 + (n-1) rho_y) C_y^2 (1 - rho^2) + (L-1)/n K S_y2^2.
/// constants: b (the population slope in effective-CV terms).
TheoryResult mse_lr(const PopulationSummary& s, const NonResponseSpec& nr);

/// t1 = w11 ybar** + w12 (X - xbar*). Without weights the minimizing pair is
/// solved from the 2x2 normal equations; constants also carry the closed
/// forms as printed (w11_printed, w12_printed).
TheoryResult theory_t1(const PopulationSummary& s, const NonResponseSpec& nr,
                       std::optional<T1Weights> weights = std::nullopt);

ACoefficients a_coeffs(const EffectiveMoments& m, double delta_eff, double nr_abs);

/// t2 = [w21 ybar** + w22 (X - xbar*)] [X / (alpha X + (1-alpha) xbar*)]^delta.
/// The A-coefficients are evaluated at delta_eff = delta (1 - alpha).
/// Throws DegenerateError when A1 A2 - A3^2 + A2 A6 / Ybar^2 <= 0 (no minimum).
TheoryResult theory_t2(const PopulationSummary& s, const NonResponseSpec& nr, T2Shape shape,
                       std::optional<T2Weights> weights = std::nullopt);

/// t3 = gamma [ybar** + b (X - xbar*)]. b defaults to the population slope
/// rho Ybar C0 / (X C1); gamma defaults to the stationary point of the MSE.
/// constants: gamma, b, gamma_printed (closed form with the printed sign).
TheoryResult theory_t3(const PopulationSummary& s, const NonResponseSpec& nr,
                       std::optional<double> b = std::nullopt, std::optional<double> gamma = std::nullopt);

/// Population regression slope rho Ybar C0 / (X C1).
double population_slope(const PopulationSummary& s);

/// rho_y = rho_x value at which the lr PRE equals `target_pre` at `nr`
/// (closed-form inversion of the monotone PRE(rho) relation). Throws
/// DomainError when no admissible intraclass correlation attains the target.
double backsolve_intraclass(const PopulationSummary& base, const NonResponseSpec& nr, double target_pre);

enum class WeightMode {
    per_cell,        // optimum constants re-solved at every (K, L)
    reference_cell,  // optimum constants solved once at a reference (K, L) and reused
};

struct TableOptions {
    T2Shape shape{};
    WeightMode mode = WeightMode::per_cell;
    /// Reference cell for WeightMode::reference_cell; defaults to the first grid entry.
    std::optional<NonResponseSpec> reference;
    /// Mark cells listed as suspect in the published forest table.
    bool flag_published_suspects = false;
};

struct TableRow {
    NonResponseSpec cell;
    TheoryResult lr, t1, t2, t3;
    std::array<bool, 4> suspect{};  // lr, t1, t2, t3
};

/// One row per grid entry with PRE columns for lr, t1, t2 and t3.
std::vector<TableRow> table31(const PopulationSummary& s, std::span<const NonResponseSpec> grid,
                              const TableOptions& options = {});

}  // namespace sysnr
