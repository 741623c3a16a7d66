#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "sysnr/error.hpp"
#include "sysnr/population.hpp"

using namespace sysnr;
using Catch::Approx;

namespace {

Population twelve() { return load_population_file(std::string(SYSNR_TEST_DATA) + "/twelve.csv"); }

// Sample means of the k systematic samples computed straight from positions.
std::vector<double> sample_means(const std::vector<double>& v, std::size_t k) {
    std::vector<double> means(k, 0.0);
    const std::size_t n = v.size() / k;
    for (std::size_t p = 0; p < v.size(); ++p) means[p % k] += v[p] / static_cast<double>(n);
    return means;
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double a : v) s += a;
    return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("loader reads columns by name and skips blank lines") {
    const auto pop = twelve();
    REQUIRE(pop.size() == 12);
    CHECK(pop[0].y == 11.2);
    CHECK(pop[0].x == 4.0);
    CHECK(pop[11].y == 18.4);
    CHECK(pop[4].x == 4.8);  // the row after the blank line
}

TEST_CASE("loader errors carry the row number") {
    const std::string dir = SYSNR_TEST_DATA;
    try {
        load_population_file(dir + "/bad_number.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
        CHECK(std::string(e.what()).find("bad_number.csv") != std::string::npos);
        CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }
    try {
        load_population_file(dir + "/short_row.csv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
    }
    CHECK_THROWS_AS(load_population_file(dir + "/missing_column.csv"), SchemaError);
    CHECK_THROWS_AS(load_population_file(dir + "/duplicate_column.csv"), SchemaError);
    CHECK_THROWS_AS(load_population_file(dir + "/no_such_file.csv"), IoError);

    std::istringstream empty("");
    CHECK_THROWS_AS(load_population(empty), SchemaError);
    std::istringstream one("y,x\n1,2\n");
    CHECK_THROWS_AS(load_population(one), DomainError);
    std::istringstream inf("y,x\n1,2\ninf,3\n");
    CHECK_THROWS_AS(load_population(inf), ParseError);
}

TEST_CASE("design parameters") {
    const auto d = DesignParams::for_sample_size(176, 16);
    CHECK(d.k == 11);
    CHECK(d.theta() == Approx(1.0 / 16 - 1.0 / 176));
    CHECK_THROWS_AS(DesignParams::for_sample_size(10, 3), DomainError);
    CHECK_THROWS_AS(DesignParams::for_sample_size(10, 1), DomainError);
    CHECK_THROWS_AS(DesignParams::for_sample_size(10, 10), DomainError);
    CHECK_THROWS_AS(DesignParams::for_sample_size(10, 0), DomainError);
}

TEST_CASE("summary statistics against direct computation") {
    const auto pop = twelve();
    const auto d = DesignParams::for_sample_size(12, 3);
    const auto s = summarize(pop, d);
    const auto y = pop.ys();
    const auto x = pop.xs();
    const double my = mean(y), mx = mean(x);
    double syy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < 12; ++i) {
        syy += (y[i] - my) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (y[i] - my) * (x[i] - mx);
    }
    CHECK(s.N == 12);
    CHECK(s.n == 3);
    CHECK(s.ybar == Approx(my).epsilon(1e-14));
    CHECK(s.xbar == Approx(mx).epsilon(1e-14));
    CHECK(s.s2_y == Approx(syy / 11).epsilon(1e-13));
    CHECK(s.s2_x == Approx(sxx / 11).epsilon(1e-13));
    CHECK(s.rho == Approx(sxy / std::sqrt(syy * sxx)).epsilon(1e-13));
    CHECK(s.c_y == Approx(std::sqrt(syy / 11) / my).epsilon(1e-13));
    CHECK(s.theta == Approx(1.0 / 3 - 1.0 / 12));
}

TEST_CASE("pairwise intraclass correlation satisfies the systematic variance identity") {
    // V(sample mean) = (N-1)/N * S^2/n * (1 + (n-1) rho), with V taken over the k samples.
    const auto pop = twelve();
    for (std::size_t n : {2u, 3u, 4u, 6u}) {
        const auto d = DesignParams::for_sample_size(12, n);
        for (const auto& v : {pop.ys(), pop.xs()}) {
            const auto means = sample_means(v, d.k);
            const double m = mean(v);
            double var = 0;
            for (double a : means) var += (a - m) * (a - m) / static_cast<double>(d.k);
            double ss = 0;
            for (double a : v) ss += (a - m) * (a - m);
            const double S2 = ss / 11.0;
            const double rho = ((var * 12.0 / 11.0) * static_cast<double>(n) / S2 - 1.0) / static_cast<double>(n - 1);
            CHECK(intraclass_correlation(v, d) == Approx(rho).epsilon(1e-12).margin(1e-13));
            CHECK(systematic_mean_variance(v, d) == Approx(var).epsilon(1e-12));

            const double rho_vm = variance_matched_intraclass(v, d);
            CHECK(d.theta() * (1.0 + static_cast<double>(n - 1) * rho_vm) * S2 == Approx(var).epsilon(1e-12));
        }
    }
}

TEST_CASE("systematic covariance of sample means") {
    const auto pop = twelve();
    const auto d = DesignParams::for_sample_size(12, 4);
    const auto y = pop.ys(), x = pop.xs();
    const auto my = sample_means(y, d.k), mx = sample_means(x, d.k);
    double cov = 0;
    for (std::size_t i = 0; i < d.k; ++i) cov += (my[i] - mean(y)) * (mx[i] - mean(x)) / static_cast<double>(d.k);
    CHECK(systematic_mean_covariance(y, x, d) == Approx(cov).epsilon(1e-12));
    CHECK(systematic_mean_covariance(y, y, d) == Approx(systematic_mean_variance(y, d)).epsilon(1e-14));
}

TEST_CASE("perfectly sorted and constant-within-sample frames") {
    // Every sample identical up to a shift: all variation is between samples.
    std::vector<double> v;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 4; ++i) v.push_back(static_cast<double>(i));
    const auto d = DesignParams::for_sample_size(12, 3);
    CHECK(intraclass_correlation(v, d) == Approx(1.0));
    const std::vector<double> flat(12, 2.5);
    CHECK(intraclass_correlation(flat, d) == 0.0);
    CHECK(variance_matched_intraclass(flat, d) == 0.0);
}

TEST_CASE("degenerate populations are rejected by summarize") {
    std::vector<Unit> u;
    for (int i = 0; i < 6; ++i) u.push_back({static_cast<double>(i), 3.0});
    const auto d = DesignParams::for_sample_size(6, 2);
    CHECK_THROWS_AS(summarize(Population(u), d), DegenerateError);
    std::vector<Unit> w;
    for (int i = 0; i < 6; ++i) w.push_back({i % 2 ? 1.0 : -1.0, static_cast<double>(i)});
    CHECK_THROWS_AS(summarize(Population(w), d), DegenerateError);
    CHECK_THROWS_AS(summarize(twelve(), DesignParams::for_sample_size(6, 2)), DomainError);
}
