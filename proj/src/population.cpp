#include "sysnr/population.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

#include "sysnr/error.hpp"

namespace sysnr {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        fields.push_back(trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return fields;
}

std::optional<double> parse_real(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || s.empty() || !std::isfinite(v)) return std::nullopt;
    return v;
}

double mean_of(std::span<const double> v) {
    double sum = 0;
    for (double a : v) sum += a;
    return sum / static_cast<double>(v.size());
}

double sum_sq_dev(std::span<const double> v, double mean) {
    double ss = 0;
    for (double a : v) ss += (a - mean) * (a - mean);
    return ss;
}

void check_design(std::size_t values, const DesignParams& design) {
    design.validate();
    if (values != design.N)
        throw DomainError("design N = " + std::to_string(design.N) + " but population has " +
                          std::to_string(values) + " units");
}

}  // namespace

Population::Population(std::vector<Unit> units) : units_(std::move(units)) {
    if (units_.size() < 2)
        throw DomainError("population needs at least 2 units, got " + std::to_string(units_.size()));
    for (std::size_t i = 0; i < units_.size(); ++i)
        if (!std::isfinite(units_[i].y) || !std::isfinite(units_[i].x))
            throw DomainError("unit " + std::to_string(i + 1) + " has a non-finite value");
}

std::vector<double> Population::ys() const {
    std::vector<double> out(units_.size());
    std::transform(units_.begin(), units_.end(), out.begin(), [](const Unit& u) { return u.y; });
    return out;
}

std::vector<double> Population::xs() const {
    std::vector<double> out(units_.size());
    std::transform(units_.begin(), units_.end(), out.begin(), [](const Unit& u) { return u.x; });
    return out;
}

DesignParams DesignParams::for_sample_size(std::size_t N, std::size_t n) {
    if (n == 0) throw DomainError("sample size n must be positive");
    DesignParams d{N, n, N / n};
    d.validate();
    return d;
}

void DesignParams::validate() const {
    if (n < 2) throw DomainError("sample size n must be at least 2, got " + std::to_string(n));
    if (k < 2) throw DomainError("need at least 2 systematic samples (k >= 2), got k = " + std::to_string(k));
    if (n * k != N)
        throw DomainError("N = " + std::to_string(N) + " is not n*k for n = " + std::to_string(n) +
                          ", k = " + std::to_string(k));
}

Population load_population(std::istream& in) {
    std::string line;
    std::optional<std::size_t> y_col, x_col;
    std::size_t width = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        width = fields.size();
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i] != "y" && fields[i] != "x") continue;
            auto& slot = fields[i] == "y" ? y_col : x_col;
            if (slot) throw SchemaError("duplicate column '" + std::string(fields[i]) + "'");
            slot = i;
        }
        have_header = true;
        break;
    }
    if (!have_header) throw SchemaError("empty input: expected a header row naming columns y and x");
    if (!y_col) throw SchemaError("missing column 'y'");
    if (!x_col) throw SchemaError("missing column 'x'");

    std::vector<Unit> units;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split_fields(line);
        if (fields.size() != width)
            throw ParseError(row, "expected " + std::to_string(width) + " fields, got " +
                                      std::to_string(fields.size()));
        const auto y = parse_real(fields[*y_col]);
        if (!y) throw ParseError(row, "y value '" + std::string(fields[*y_col]) + "' is not a finite real");
        const auto x = parse_real(fields[*x_col]);
        if (!x) throw ParseError(row, "x value '" + std::string(fields[*x_col]) + "' is not a finite real");
        units.push_back({*y, *x});
    }
    return Population(std::move(units));
}

Population load_population_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open population file '" + path.string() + "'");
    try {
        return load_population(in);
    } catch (const ParseError& e) {
        throw ParseError(e.row(), e.detail(), path.string());
    } catch (const SchemaError& e) {
        throw SchemaError(path.string() + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
}

double intraclass_correlation(std::span<const double> values, const DesignParams& design) {
    check_design(values.size(), design);
    const double mean = mean_of(values);
    const double ss = sum_sq_dev(values, mean);
    if (ss == 0) return 0.0;
    double cross = 0;
    for (std::size_t i = 0; i < design.k; ++i) {
        for (std::size_t j = 0; j < design.n; ++j) {
            const double dj = values[i + j * design.k] - mean;
            for (std::size_t jj = 0; jj < design.n; ++jj) {
                if (jj == j) continue;
                cross += dj * (values[i + jj * design.k] - mean);
            }
        }
    }
    return cross / ((static_cast<double>(design.n) - 1.0) * ss);
}

double systematic_mean_covariance(std::span<const double> a, std::span<const double> b,
                                  const DesignParams& design) {
    check_design(a.size(), design);
    check_design(b.size(), design);
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double acc = 0;
    for (std::size_t i = 0; i < design.k; ++i) {
        double sa = 0, sb = 0;
        for (std::size_t j = 0; j < design.n; ++j) {
            sa += a[i + j * design.k];
            sb += b[i + j * design.k];
        }
        acc += (sa / static_cast<double>(design.n) - ma) * (sb / static_cast<double>(design.n) - mb);
    }
    return acc / static_cast<double>(design.k);
}

double systematic_mean_variance(std::span<const double> values, const DesignParams& design) {
    return systematic_mean_covariance(values, values, design);
}

double variance_matched_intraclass(std::span<const double> values, const DesignParams& design) {
    check_design(values.size(), design);
    const double mean = mean_of(values);
    const double s2 = sum_sq_dev(values, mean) / (static_cast<double>(design.N) - 1.0);
    if (s2 == 0) return 0.0;
    const double ratio = systematic_mean_variance(values, design) / (design.theta() * s2);
    return (ratio - 1.0) / (static_cast<double>(design.n) - 1.0);
}

PopulationSummary with_variance_matched_intraclass(PopulationSummary summary, const Population& pop,
                                                   const DesignParams& design) {
    summary.rho_y = variance_matched_intraclass(pop.ys(), design);
    summary.rho_x = variance_matched_intraclass(pop.xs(), design);
    return summary;
}

PopulationSummary summarize(const Population& pop, const DesignParams& design) {
    check_design(pop.size(), design);
    const auto ys = pop.ys();
    const auto xs = pop.xs();
    const double dof = static_cast<double>(design.N) - 1.0;

    PopulationSummary s;
    s.N = design.N;
    s.n = design.n;
    s.ybar = mean_of(ys);
    s.xbar = mean_of(xs);
    if (s.ybar == 0) throw DegenerateError("population mean of y is zero; coefficients of variation undefined");
    if (s.xbar == 0) throw DegenerateError("population mean of x is zero; coefficients of variation undefined");

    const double ss_y = sum_sq_dev(ys, s.ybar);
    const double ss_x = sum_sq_dev(xs, s.xbar);
    if (ss_x == 0) throw DegenerateError("auxiliary variable x is constant (S_x^2 = 0)");
    double sp = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) sp += (ys[i] - s.ybar) * (xs[i] - s.xbar);

    s.s2_y = ss_y / dof;
    s.s2_x = ss_x / dof;
    s.rho = ss_y == 0 ? 0.0 : std::clamp(sp / std::sqrt(ss_y * ss_x), -1.0, 1.0);
    s.rho_y = intraclass_correlation(ys, design);
    s.rho_x = intraclass_correlation(xs, design);
    s.theta = design.theta();
    s.c_y = std::sqrt(s.s2_y) / std::abs(s.ybar);
    s.c_x = std::sqrt(s.s2_x) / std::abs(s.xbar);

    // Rounding can push an exact bound a few ulps out.
    const double lower = -1.0 / (static_cast<double>(design.n) - 1.0);
    s.rho_y = std::clamp(s.rho_y, lower, 1.0);
    s.rho_x = std::clamp(s.rho_x, lower, 1.0);
    return s;
}

}  // namespace sysnr
