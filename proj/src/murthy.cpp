#include "sysnr/murthy.hpp"

#include <cmath>

namespace sysnr::murthy {

namespace {

constexpr bool o = false;
constexpr bool X = true;

// Published PRE values (percent) relative to ybar**. Suspect t3 cells repeat
// values printed elsewhere in the t1/t3 columns.
constexpr PublishedCell kTable[] = {
    {0.1, 2.0, {407.4884, 434.0181, 438.9431, 434.0199}, {o, o, o, o}},
    {0.1, 2.5, {404.1824, 430.7801, 435.7177, 430.7819}, {o, o, o, o}},
    {0.1, 3.0, {400.9468, 427.6068, 432.5561, 427.6086}, {o, o, o, o}},
    {0.1, 3.5, {397.7794, 424.4964, 429.4564, 424.4982}, {o, o, o, o}},
    {0.2, 2.0, {400.9468, 427.6068, 432.5561, 427.6086}, {o, o, o, o}},
    {0.2, 2.5, {394.6779, 421.4470, 426.4168, 421.4487}, {o, o, o, o}},
    {0.2, 3.0, {388.6647, 415.5240, 420.5112, 415.5257}, {o, o, o, o}},
    {0.2, 3.5, {382.8921, 409.8246, 414.8261, 409.8262}, {o, o, o, o}},
    {0.3, 2.0, {394.6779, 421.4470, 426.4168, 421.4487}, {o, o, o, o}},
    {0.3, 2.5, {385.7493, 412.6472, 417.6419, 412.6488}, {o, o, o, o}},
    {0.3, 3.0, {377.3458, 404.3362, 409.3494, 415.5257}, {o, o, o, X}},
    {0.3, 3.5, {369.4225, 396.4225, 401.5007, 409.8262}, {o, o, o, X}},
    {0.4, 2.0, {388.6647, 415.5240, 420.5112, 421.4487}, {o, o, o, X}},
    {0.4, 2.5, {377.3458, 404.3362, 409.3494, 412.6488}, {o, o, o, X}},
    {0.4, 3.0, {366.8810, 393.9475, 398.9770, 404.3379}, {o, o, o, X}},
    {0.4, 3.5, {357.1773, 384.2753, 389.3132, 369.4760}, {o, o, o, X}},
};

}  // namespace

NonResponseSpec cell(double k_rate, double l_factor) { return {k_rate, l_factor, kS2y2}; }

PopulationSummary summary() {
    PopulationSummary s;
    s.N = kN;
    s.n = kSampleSize;
    s.ybar = kYbar;
    s.xbar = kXbar;
    s.s2_y = kS2y;
    s.s2_x = kS2x;
    s.rho = kRho;
    s.theta = 1.0 / static_cast<double>(kSampleSize) - 1.0 / static_cast<double>(kN);
    s.c_y = std::sqrt(kS2y) / kYbar;
    s.c_x = std::sqrt(kS2x) / kXbar;
    const double r = backsolve_intraclass(s, cell(kAnchorK, kAnchorL), kAnchorPre);
    s.rho_y = r;
    s.rho_x = r;
    return s;
}

std::vector<NonResponseSpec> grid() {
    std::vector<NonResponseSpec> g;
    for (double k : {0.1, 0.2, 0.3, 0.4})
        for (double l : {2.0, 2.5, 3.0, 3.5}) g.push_back(cell(k, l));
    return g;
}

std::span<const PublishedCell> published_table() { return kTable; }

const PublishedCell* find_published(double k_rate, double l_factor) {
    for (const auto& c : kTable)
        if (std::abs(c.k_rate - k_rate) < 1e-9 && std::abs(c.l_factor - l_factor) < 1e-9) return &c;
    return nullptr;
}

}  // namespace sysnr::murthy
