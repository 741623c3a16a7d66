#pragma once

// Finite population frame, systematic design and population-level parameters.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace sysnr {

struct Unit {
    double y;  // study variable
    double x;  // auxiliary variable
};

/// Ordered sampling frame. Frame order is significant and never altered.
class Population {
public:
    /// Throws DomainError when fewer than two units or a non-finite value is given.
    explicit Population(std::vector<Unit> units);

    std::size_t size() const noexcept { return units_.size(); }
    std::span<const Unit> units() const noexcept { return units_; }
    const Unit& operator[](std::size_t i) const { return units_[i]; }

    std::vector<double> ys() const;
    std::vector<double> xs() const;

private:
    std::vector<Unit> units_;
};

/// Systematic design N = n * k. Sample `i` (1-based start) holds frame
/// positions i, i + k, ..., i + (n - 1) k.
struct DesignParams {
    std::size_t N = 0;
    std::size_t n = 0;
    std::size_t k = 0;

    /// Throws DomainError unless n >= 2, k >= 2 and n divides N.
    static DesignParams for_sample_size(std::size_t N, std::size_t n);

    void validate() const;
    double theta() const { return 1.0 / static_cast<double>(n) - 1.0 / static_cast<double>(N); }
};

struct PopulationSummary {
    std::size_t N = 0;
    std::size_t n = 0;
    double ybar = 0;
    double xbar = 0;
    double s2_y = 0;   // mean square, divisor N - 1
    double s2_x = 0;
    double rho = 0;    // unit-level correlation of (y, x)
    double rho_y = 0;  // intraclass correlation within systematic samples
    double rho_x = 0;
    double theta = 0;  // 1/n - 1/N
    double c_y = 0;    // sqrt(s2_y) / |ybar|
    double c_x = 0;

    /// 1 + (n - 1) rho_y
    double inflation_y() const { return 1.0 + (static_cast<double>(n) - 1.0) * rho_y; }
    double inflation_x() const { return 1.0 + (static_cast<double>(n) - 1.0) * rho_x; }
};

/// Reads a comma-separated table whose header names columns `y` and `x`
/// (any order, extra columns ignored). Blank lines are skipped.
Population load_population(std::istream& in);
Population load_population_file(const std::filesystem::path& path);

/// All population parameters consumed by the theory. Throws DegenerateError
/// when a mean is zero or the auxiliary variable is constant.
PopulationSummary summarize(const Population& pop, const DesignParams& design);

/// Within-sample intraclass correlation by enumeration of every ordered pair
/// of distinct units inside each of the k systematic samples:
///   sum_i sum_{j != j'} (v_ij - V)(v_ij' - V) / ((n - 1) sum (v - V)^2).
/// Returns 0 for a constant variable.
double intraclass_correlation(std::span<const double> values, const DesignParams& design);

/// Exact design variance of the systematic sample mean, (1/k) sum_i (vbar_i - V)^2.
double systematic_mean_variance(std::span<const double> values, const DesignParams& design);

/// Exact design covariance of two systematic sample means.
double systematic_mean_covariance(std::span<const double> a, std::span<const double> b,
                                  const DesignParams& design);

/// The rho for which theta * (1 + (n - 1) rho) * S^2 equals
/// systematic_mean_variance exactly. Differs from intraclass_correlation by
/// the factor (N - 1)/(N - n) on 1 + (n - 1) rho. Returns 0 for a constant variable.
double variance_matched_intraclass(std::span<const double> values, const DesignParams& design);

/// `summary` with rho_y, rho_x replaced by their variance-matched values.
PopulationSummary with_variance_matched_intraclass(PopulationSummary summary, const Population& pop,
                                                   const DesignParams& design);

}  // namespace sysnr
