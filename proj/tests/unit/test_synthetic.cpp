#include <catch_amalgamated.hpp>

#include <cmath>

#include "sysnr/error.hpp"
#include "sysnr/sampling.hpp"
#include "sysnr/synthetic.hpp"

using namespace sysnr;
using Catch::Approx;

namespace {

// Average over the k samples of the within-sample mean square of y among the
// labeled units (divisor m - 1).
double mean_within_nonresponse_ms(const Population& pop, const DesignParams& d, const NonResponseLabeling& l) {
    double total = 0;
    for (const auto& sample : enumerate_samples(d)) {
        std::vector<double> v;
        for (auto p : sample)
            if (l.labels[p - 1]) v.push_back(pop[p - 1].y);
        double m = 0;
        for (double a : v) m += a / static_cast<double>(v.size());
        double ss = 0;
        for (double a : v) ss += (a - m) * (a - m);
        total += ss / static_cast<double>(v.size() - 1);
    }
    return total / static_cast<double>(d.k);
}

}  // namespace

TEST_CASE("generated frame hits its targets") {
    const SyntheticSpec spec;
    const auto pop = generate_population(spec);
    const auto d = spec.design();
    const auto s = summarize(pop, d);
    CHECK(s.ybar == Approx(spec.ybar).epsilon(1e-12));
    CHECK(s.xbar == Approx(spec.xbar).epsilon(1e-12));
    CHECK(s.c_y == Approx(spec.cv_y).epsilon(1e-12));
    CHECK(s.c_x == Approx(spec.cv_x).epsilon(1e-12));
    CHECK(s.rho == Approx(spec.rho).epsilon(1e-10));
    CHECK(s.rho_y == Approx(spec.rho_intraclass).epsilon(1e-10));
    CHECK(s.rho_x == Approx(spec.rho_intraclass).epsilon(1e-10));

    const auto l = label_nonresponse(pop, spec.tail_fraction, LabelingMode::stratum_tail);
    CHECK(l.count() == spec.tail_rows() * d.k);
    const double s2y2 = nonresponse_mean_square(pop, l);
    CHECK(s2y2 / s.s2_y == Approx(spec.stratum_ratio).epsilon(1e-10));
    CHECK(mean_within_nonresponse_ms(pop, d, l) == Approx(s2y2).epsilon(1e-10));

    // the k sample means of x and y correlate at rho as well
    std::vector<double> my(d.k, 0), mx(d.k, 0);
    for (std::size_t p = 0; p < d.N; ++p) {
        my[p % d.k] += pop[p].y;
        mx[p % d.k] += pop[p].x;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < d.k; ++i) {
        const double a = my[i] / d.n - s.ybar, b = mx[i] / d.n - s.xbar;
        sxy += a * b;
        sxx += b * b;
        syy += a * a;
    }
    CHECK(sxy / std::sqrt(sxx * syy) == Approx(spec.rho).epsilon(1e-10));
}

TEST_CASE("generator is deterministic in its seed") {
    SyntheticSpec a;
    const auto p1 = generate_population(a);
    const auto p2 = generate_population(a);
    a.seed = 2;
    const auto p3 = generate_population(a);
    CHECK(p1.ys() == p2.ys());
    CHECK(p1.ys() != p3.ys());
}

TEST_CASE("frames without a tail stratum") {
    SyntheticSpec spec;
    spec.tail_fraction = 0.0;
    spec.rho_intraclass = 0.6;
    const auto pop = generate_population(spec);
    const auto s = summarize(pop, spec.design());
    CHECK(s.rho_y == Approx(0.6).epsilon(1e-10));
}

TEST_CASE("infeasible targets are reported") {
    SyntheticSpec spec;
    spec.rho_intraclass = 0.9;
    CHECK_THROWS_AS(generate_population(spec), DomainError);
    spec = {};
    spec.N = 40;
    spec.n = 10;  // k = 4
    CHECK_THROWS_AS(generate_population(spec), DomainError);
    spec = {};
    spec.rho = 1.5;
    CHECK_THROWS_AS(generate_population(spec), DomainError);
    spec = {};
    spec.tail_fraction = 1.0;
    CHECK_THROWS_AS(generate_population(spec), DomainError);
}

TEST_CASE("spec strings") {
    const auto spec = parse_synthetic_spec("N=240,n=12,rho=0.8,rho_y=0.25,ratio=1.5,k0=0.25,seed=9");
    CHECK(spec.N == 240);
    CHECK(spec.n == 12);
    CHECK(spec.rho == 0.8);
    CHECK(spec.rho_intraclass == 0.25);
    CHECK(spec.stratum_ratio == 1.5);
    CHECK(spec.seed == 9);
    CHECK(spec.ybar == SyntheticSpec{}.ybar);
    CHECK_THROWS_AS(parse_synthetic_spec("N=240,bogus=1"), DomainError);
    CHECK_THROWS_AS(parse_synthetic_spec("N=abc"), DomainError);
    CHECK_THROWS_AS(parse_synthetic_spec("N"), DomainError);
}
