#include "sysnr/synthetic.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sysnr/error.hpp"
#include "sysnr/rng.hpp"

namespace sysnr {

namespace {

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) { return std::inner_product(a.begin(), a.end(), b.begin(), 0.0); }

void scale_to_norm(Vec& v, double norm) {
    const double cur = std::sqrt(dot(v, v));
    for (double& a : v) a *= norm / cur;
}

void remove_component(Vec& v, const Vec& unit) {
    const double p = dot(v, unit);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * unit[i];
}

// rows x k block, row-major (row j, column i at j*k + i), each column summing to zero.
Vec centered_block(std::size_t rows, std::size_t k, Rng& rng) {
    Vec v(rows * k);
    for (double& a : v) a = rng.normal();
    for (std::size_t i = 0; i < k; ++i) {
        double m = 0;
        for (std::size_t j = 0; j < rows; ++j) m += v[j * k + i];
        m /= static_cast<double>(rows);
        for (std::size_t j = 0; j < rows; ++j) v[j * k + i] -= m;
    }
    return v;
}

// Orthonormal, mean-zero k-vectors.
std::vector<Vec> column_basis(std::size_t count, std::size_t k, Rng& rng) {
    std::vector<Vec> basis;
    const Vec ones(k, 1.0 / std::sqrt(static_cast<double>(k)));
    while (basis.size() < count) {
        Vec v(k);
        for (double& a : v) a = rng.normal();
        remove_component(v, ones);
        for (const auto& b : basis) remove_component(v, b);
        scale_to_norm(v, 1.0);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Pair (first, second) of equal squared norm `ss` with dot(first, second) = rho * ss.
std::pair<Vec, Vec> correlated_blocks(std::size_t rows, std::size_t k, double ss, double rho, Rng& rng) {
    if (ss <= 0 || rows < 2) return {Vec(rows * k, 0.0), Vec(rows * k, 0.0)};
    Vec a = centered_block(rows, k, rng);
    Vec b = centered_block(rows, k, rng);
    scale_to_norm(a, 1.0);
    remove_component(b, a);
    scale_to_norm(b, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double r = std::sqrt(ss);
    Vec first(a.size()), second(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        first[i] = r * a[i];
        second[i] = r * (rho * a[i] + s * b[i]);
    }
    return {std::move(first), std::move(second)};
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw DomainError("synthetic spec: bad value '" + std::string(text) + "' for " + std::string(key));
    return v;
}

}  // namespace

std::size_t SyntheticSpec::tail_rows() const {
    return static_cast<std::size_t>(std::lround(tail_fraction * static_cast<double>(n)));
}

Population generate_population(const SyntheticSpec& spec) {
    const auto design = spec.design();
    const std::size_t k = design.k;
    const std::size_t n = design.n;
    const double Nd = static_cast<double>(design.N);
    const double nd = static_cast<double>(n);
    if (k < 5) throw DomainError("synthetic frame needs k = N/n >= 5 systematic samples");
    if (!(spec.rho >= -1.0 && spec.rho <= 1.0)) throw DomainError("synthetic rho must lie in [-1, 1]");
    if (!(spec.rho_intraclass > -1.0 / (nd - 1.0) && spec.rho_intraclass <= 1.0))
        throw DomainError("synthetic intraclass correlation must lie in (-1/(n-1), 1]");
    if (!(spec.tail_fraction >= 0.0 && spec.tail_fraction < 1.0))
        throw DomainError("synthetic tail fraction must lie in [0, 1)");
    if (!(spec.cv_y > 0) || !(spec.cv_x > 0)) throw DomainError("synthetic coefficients of variation must be positive");
    if (spec.ybar == 0 || spec.xbar == 0) throw DomainError("synthetic means must be non-zero");

    const std::size_t n2 = spec.tail_rows();
    const std::size_t nh = n - n2;
    const double n2d = static_cast<double>(n2);
    const double kd = static_cast<double>(k);
    const double f = 1.0 + (nd - 1.0) * spec.rho_intraclass;

    // Squared norms of the components with the between-sample effect
    // normalized to 1: head within (e2), tail extra between (u), tail within (g2).
    double u = 0, g2 = 0, ss = nd * nd / f;
    if (n2 > 0) {
        if (!(spec.stratum_ratio > 0)) throw DomainError("synthetic stratum ratio must be positive");
        const double c = kd * n2d * (n2d - 1.0) / (kd - 1.0);
        const double P = (n2d + c) * (Nd - 1.0) * f;
        const double Q = spec.stratum_ratio * (kd * n2d - 1.0);
        const double den = P - Q * n2d * n2d;
        u = den == 0 ? -1.0 : (Q * nd * nd - P) / den;
        if (!(u >= 0) || !std::isfinite(u))
            throw DomainError("synthetic targets infeasible: stratum ratio " + std::to_string(spec.stratum_ratio) +
                              " cannot be reached at intraclass correlation " + std::to_string(spec.rho_intraclass));
        ss = (nd * nd + n2d * n2d * u) / f;
        g2 = c * (1.0 + u);
    }
    double e2 = ss - nd - n2d * u - g2;
    if (e2 < -1e-9 * ss)
        throw DomainError("synthetic targets infeasible: intraclass correlation " +
                          std::to_string(spec.rho_intraclass) + " too low for the requested stratum ratio");
    e2 = std::max(0.0, e2);
    if (e2 > 1e-12 * ss && nh < 2) throw DomainError("synthetic targets infeasible: fewer than 2 respondent rows");

    Rng rng(spec.seed);
    const auto basis = column_basis(n2 > 0 ? 4 : 2, k, rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho));
    const double su = std::sqrt(u);
    Vec A(k), B(k), T(k, 0.0), U(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        A[i] = basis[0][i];
        B[i] = spec.rho * basis[0][i] + s * basis[1][i];
        if (n2 > 0) {
            T[i] = su * basis[2][i];
            U[i] = su * (spec.rho * basis[2][i] + s * basis[3][i]);
        }
    }
    const auto [E, F] = correlated_blocks(nh, k, e2, spec.rho, rng);
    const auto [G, H] = correlated_blocks(n2, k, g2, spec.rho, rng);

    Vec ry(design.N), rx(design.N);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t p = i + j * k;
            if (j < nh) {
                ry[p] = A[i] + E[j * k + i];
                rx[p] = B[i] + F[j * k + i];
            } else {
                const std::size_t t = (j - nh) * k + i;
                ry[p] = A[i] + T[i] + G[t];
                rx[p] = B[i] + U[i] + H[t];
            }
        }

    const double sd_y = std::sqrt(dot(ry, ry) / (Nd - 1.0));
    const double sd_x = std::sqrt(dot(rx, rx) / (Nd - 1.0));
    const double scale_y = spec.cv_y * std::abs(spec.ybar) / sd_y;
    const double scale_x = spec.cv_x * std::abs(spec.xbar) / sd_x;
    std::vector<Unit> units(design.N);
    for (std::size_t p = 0; p < design.N; ++p) units[p] = {spec.ybar + scale_y * ry[p], spec.xbar + scale_x * rx[p]};
    return Population(std::move(units));
}

SyntheticSpec parse_synthetic_spec(std::string_view text) {
    SyntheticSpec spec;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw DomainError("synthetic spec: expected key=value, got '" + std::string(item) + "'");
        const auto key = item.substr(0, eq);
        const auto val = item.substr(eq + 1);
        if (key == "N") spec.N = parse_number<std::size_t>(key, val);
        else if (key == "n") spec.n = parse_number<std::size_t>(key, val);
        else if (key == "rho") spec.rho = parse_number<double>(key, val);
        else if (key == "rho_y") spec.rho_intraclass = parse_number<double>(key, val);
        else if (key == "ratio") spec.stratum_ratio = parse_number<double>(key, val);
        else if (key == "k0") spec.tail_fraction = parse_number<double>(key, val);
        else if (key == "ybar") spec.ybar = parse_number<double>(key, val);
        else if (key == "xbar") spec.xbar = parse_number<double>(key, val);
        else if (key == "cv_y") spec.cv_y = parse_number<double>(key, val);
        else if (key == "cv_x") spec.cv_x = parse_number<double>(key, val);
        else if (key == "seed") spec.seed = parse_number<std::uint64_t>(key, val);
        else throw DomainError("synthetic spec: unknown key '" + std::string(key) + "'");
    }
    return spec;
}

}  // namespace sysnr
