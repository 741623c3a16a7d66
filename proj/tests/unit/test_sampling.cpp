#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "sysnr/error.hpp"
#include "sysnr/estimators.hpp"
#include "sysnr/rng.hpp"
#include "sysnr/sampling.hpp"

using namespace sysnr;
using Catch::Approx;

namespace {

Population twelve() { return load_population_file(std::string(SYSNR_TEST_DATA) + "/twelve.csv"); }

NonResponseLabeling labels_at(std::size_t N, std::initializer_list<std::size_t> positions) {
    NonResponseLabeling l;
    l.labels.assign(N, false);
    for (auto p : positions) l.labels[p - 1] = true;
    l.realized_rate = static_cast<double>(positions.size()) / static_cast<double>(N);
    return l;
}

// All size-h subsets of `pool`.
void subsets(const std::vector<std::size_t>& pool, std::size_t h, std::size_t from, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == h) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = from; i < pool.size(); ++i) {
        cur.push_back(pool[i]);
        subsets(pool, h, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

TEST_CASE("systematic samples partition the frame") {
    const auto d = DesignParams::for_sample_size(12, 3);
    CHECK(sample_positions(d, 2) == std::vector<std::size_t>{2, 6, 10});
    const auto all = enumerate_samples(d);
    REQUIRE(all.size() == 4);
    std::vector<std::size_t> seen;
    for (const auto& s : all) seen.insert(seen.end(), s.begin(), s.end());
    std::sort(seen.begin(), seen.end());
    std::vector<std::size_t> frame(12);
    std::iota(frame.begin(), frame.end(), 1);
    CHECK(seen == frame);
    CHECK_THROWS_AS(sample_positions(d, 0), DomainError);
    CHECK_THROWS_AS(sample_positions(d, 5), DomainError);
}

TEST_CASE("stratum-tail labeling takes the last floor(K N) positions") {
    const auto pop = twelve();
    const auto l = label_nonresponse(pop, 0.25, LabelingMode::stratum_tail);
    CHECK(l.count() == 3);
    CHECK(l.realized_rate == Approx(0.25));
    CHECK(l.is_nonrespondent(10));
    CHECK(l.is_nonrespondent(12));
    CHECK_FALSE(l.is_nonrespondent(9));
    CHECK(label_nonresponse(pop, 0.0, LabelingMode::stratum_tail).count() == 0);
    CHECK(label_nonresponse(pop, 0.3, LabelingMode::stratum_tail).count() == 3);
    CHECK_THROWS_AS(label_nonresponse(pop, 1.5, LabelingMode::stratum_tail), DomainError);
}

TEST_CASE("Bernoulli labeling is reproducible from its seed") {
    std::vector<Unit> u(400, Unit{1.0, 2.0});
    u[0].y = 3.0;
    const Population pop(u);
    const auto a = label_nonresponse(pop, 0.3, LabelingMode::bernoulli, 99);
    const auto b = label_nonresponse(pop, 0.3, LabelingMode::bernoulli, 99);
    const auto c = label_nonresponse(pop, 0.3, LabelingMode::bernoulli, 100);
    CHECK(a.labels == b.labels);
    CHECK(a.labels != c.labels);
    CHECK(a.realized_rate > 0.2);
    CHECK(a.realized_rate < 0.4);
    CHECK(labeling_mode_from_string("bernoulli") == LabelingMode::bernoulli);
    CHECK(to_string(LabelingMode::stratum_tail) == "stratum_tail");
    CHECK_THROWS_AS(labeling_mode_from_string("tail"), DomainError);
}

TEST_CASE("non-response mean square") {
    const auto pop = twelve();
    const auto l = labels_at(12, {10, 11, 12});
    const double m = (16.2 + 10.1 + 18.4) / 3;
    const double expected = ((16.2 - m) * (16.2 - m) + (10.1 - m) * (10.1 - m) + (18.4 - m) * (18.4 - m)) / 2;
    CHECK(nonresponse_mean_square(pop, l) == Approx(expected).epsilon(1e-14));
    CHECK(nonresponse_mean_square(pop, labels_at(12, {4})) == 0.0);
}

TEST_CASE("sub-sample size") {
    CHECK(subsample_size(0, 2.0) == 0);
    CHECK(subsample_size(1, 3.0) == 1);
    CHECK(subsample_size(4, 2.0) == 2);
    CHECK(subsample_size(5, 2.0) == 3);  // round half away from zero
    CHECK(subsample_size(7, 3.5) == 2);
    CHECK(subsample_size(6, 1.0) == 6);
}

TEST_CASE("realization fields") {
    const auto pop = twelve();
    const auto d = DesignParams::for_sample_size(12, 3);
    const auto l = labels_at(12, {2, 6, 10});
    const auto r = make_realization(pop, d, l, 2, {10});
    CHECK(r.unit_indices == std::vector<std::size_t>{2, 6, 10});
    CHECK(r.n1() == 0);
    CHECK(r.n2() == 3);
    CHECK(r.h2() == 1);
    CHECK_FALSE(r.y_resp_mean);
    CHECK(*r.y_sub_mean == 16.2);
    CHECK(r.x_mean == Approx((5.5 + 5.9 + 6.4) / 3));
    CHECK(*r.realized_l() == Approx(3.0));
    CHECK(hh_mean(r) == Approx(16.2));

    const auto full = make_realization(pop, d, l, 1, {});
    CHECK(full.n2() == 0);
    CHECK_FALSE(full.realized_l());
    CHECK(*full.y_resp_mean == Approx((11.2 + 12.1 + 12.5) / 3));

    CHECK_THROWS_AS(make_realization(pop, d, l, 2, {3}), DomainError);
    CHECK_THROWS_AS(make_realization(pop, d, l, 2, {6, 6}), DomainError);
    CHECK_THROWS_AS(make_realization(pop, d, l, 7, {}), DomainError);

    const auto empty = make_realization(pop, d, l, 2, {});
    CHECK_THROWS_AS(hh_mean(empty), EvaluationError);
}

TEST_CASE("draws follow the documented procedure") {
    const auto pop = twelve();
    const auto d = DesignParams::for_sample_size(12, 3);
    const auto l = labels_at(12, {2, 5, 6, 9, 10, 12});
    for (std::uint64_t seed : {1ull, 2ull, 77ull, 123456789ull}) {
        const auto r = draw_realization(pop, d, l, 2.0, seed);
        Rng rng(seed);
        const std::size_t start = 1 + rng.uniform_index(d.k);
        std::vector<std::size_t> pool;
        for (auto p : sample_positions(d, start))
            if (l.labels[p - 1]) pool.push_back(p);
        const std::size_t h2 = subsample_size(pool.size(), 2.0);
        for (std::size_t i = 0; i < h2; ++i) std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
        pool.resize(h2);
        std::sort(pool.begin(), pool.end());
        CHECK(r.start == start);
        CHECK(r.subsample == pool);
    }
}

TEST_CASE("starts and sub-samples are drawn uniformly") {
    const auto pop = twelve();
    const auto d = DesignParams::for_sample_size(12, 3);
    const auto l = labels_at(12, {1, 5, 9});  // sample 1 is entirely non-respondent
    std::map<std::size_t, int> starts;
    std::map<std::size_t, int> picked;
    const int draws = 40000;
    for (int i = 0; i < draws; ++i) {
        const auto r = draw_realization(pop, d, l, 3.0, derive_seed(5, i));
        ++starts[r.start];
        if (r.start == 1) {
            REQUIRE(r.h2() == 1);
            ++picked[r.subsample[0]];
        }
    }
    for (std::size_t s = 1; s <= 4; ++s) CHECK(std::abs(starts[s] - draws / 4) < 400);  // about 4.6 sd
    for (std::size_t p : {1u, 5u, 9u}) CHECK(std::abs(picked[p] - starts[1] / 3) < 300);
}

TEST_CASE("Hansen-Hurwitz and x means are unbiased over all starts and sub-samples") {
    const auto pop = twelve();
    for (std::size_t n : {3u, 4u, 6u}) {
        const auto d = DesignParams::for_sample_size(12, n);
        const auto l = labels_at(12, {2, 3, 7, 8, 11, 12});
        for (double L : {1.0, 2.0, 3.0}) {
            long double ey = 0, ex = 0;
            for (std::size_t start = 1; start <= d.k; ++start) {
                std::vector<std::size_t> pool;
                for (auto p : sample_positions(d, start))
                    if (l.labels[p - 1]) pool.push_back(p);
                std::vector<std::vector<std::size_t>> subs;
                std::vector<std::size_t> cur;
                subsets(pool, subsample_size(pool.size(), L), 0, cur, subs);
                for (const auto& s : subs) {
                    const auto r = make_realization(pop, d, l, start, s);
                    const long double w = 1.0L / (static_cast<long double>(d.k) * subs.size());
                    ey += w * hh_mean(r);
                    ex += w * r.x_mean;
                }
            }
            double Y = 0, X = 0;
            for (const auto& u : pop.units()) {
                Y += u.y / 12;
                X += u.x / 12;
            }
            CHECK(std::abs(static_cast<double>(ey) - Y) < 1e-12 * Y);
            CHECK(std::abs(static_cast<double>(ex) - X) < 1e-12 * X);
        }
    }
}
