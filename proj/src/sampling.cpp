#include "sysnr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sysnr/error.hpp"
#include "sysnr/rng.hpp"

namespace sysnr {

std::string_view to_string(LabelingMode m) {
    return m == LabelingMode::stratum_tail ? "stratum_tail" : "bernoulli";
}

LabelingMode labeling_mode_from_string(std::string_view name) {
    if (name == "stratum_tail") return LabelingMode::stratum_tail;
    if (name == "bernoulli") return LabelingMode::bernoulli;
    throw DomainError("unknown labeling mode '" + std::string(name) + "' (expected stratum_tail or bernoulli)");
}

std::size_t NonResponseLabeling::count() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
}

std::optional<double> SampleRealization::realized_l() const {
    if (nonresponders.empty() || subsample.empty()) return std::nullopt;
    return static_cast<double>(n2()) / static_cast<double>(h2());
}

std::vector<std::size_t> sample_positions(const DesignParams& design, std::size_t start) {
    design.validate();
    if (start < 1 || start > design.k)
        throw DomainError("start " + std::to_string(start) + " outside [1, " + std::to_string(design.k) + "]");
    std::vector<std::size_t> out(design.n);
    for (std::size_t j = 0; j < design.n; ++j) out[j] = start + j * design.k;
    return out;
}

std::vector<std::vector<std::size_t>> enumerate_samples(const DesignParams& design) {
    std::vector<std::vector<std::size_t>> out;
    out.reserve(design.k);
    for (std::size_t start = 1; start <= design.k; ++start) out.push_back(sample_positions(design, start));
    return out;
}

NonResponseLabeling label_nonresponse(const Population& pop, double k_rate, LabelingMode mode,
                                      std::uint64_t seed) {
    if (!(k_rate >= 0.0 && k_rate <= 1.0))
        throw DomainError("non-response rate K must lie in [0, 1], got " + std::to_string(k_rate));
    const std::size_t N = pop.size();
    NonResponseLabeling out;
    out.labels.assign(N, false);
    if (mode == LabelingMode::stratum_tail) {
        // The small offset keeps products like 0.29 * 100 from flooring to 28.
        const auto m = std::min(N, static_cast<std::size_t>(std::floor(k_rate * static_cast<double>(N) + 1e-9)));
        std::fill(out.labels.end() - static_cast<std::ptrdiff_t>(m), out.labels.end(), true);
    } else {
        Rng rng(seed);
        for (std::size_t i = 0; i < N; ++i) out.labels[i] = rng.uniform01() < k_rate;
    }
    out.realized_rate = static_cast<double>(out.count()) / static_cast<double>(N);
    return out;
}

double nonresponse_mean_square(const Population& pop, const NonResponseLabeling& labeling) {
    if (labeling.labels.size() != pop.size()) throw DomainError("labeling size does not match population");
    double sum = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (labeling.labels[i]) {
            sum += pop[i].y;
            ++m;
        }
    if (m < 2) return 0.0;
    const double mean = sum / static_cast<double>(m);
    double ss = 0;
    for (std::size_t i = 0; i < pop.size(); ++i)
        if (labeling.labels[i]) ss += (pop[i].y - mean) * (pop[i].y - mean);
    return ss / static_cast<double>(m - 1);
}

std::size_t subsample_size(std::size_t n2, double l_factor) {
    if (!(l_factor >= 1.0)) throw DomainError("sub-sampling factor L must be >= 1, got " + std::to_string(l_factor));
    if (n2 == 0) return 0;
    const auto h2 = static_cast<std::size_t>(std::lround(static_cast<double>(n2) / l_factor));
    return std::clamp<std::size_t>(h2, 1, n2);
}

SampleRealization make_realization(const Population& pop, const DesignParams& design,
                                   const NonResponseLabeling& labeling, std::size_t start,
                                   std::vector<std::size_t> subsample) {
    if (pop.size() != design.N) throw DomainError("design N does not match population size");
    if (labeling.labels.size() != pop.size()) throw DomainError("labeling size does not match population");

    SampleRealization r;
    r.start = start;
    r.unit_indices = sample_positions(design, start);
    double x_sum = 0;
    double resp_sum = 0;
    for (std::size_t pos : r.unit_indices) {
        x_sum += pop[pos - 1].x;
        if (labeling.is_nonrespondent(pos)) {
            r.nonresponders.push_back(pos);
        } else {
            r.responders.push_back(pos);
            resp_sum += pop[pos - 1].y;
        }
    }
    r.x_mean = x_sum / static_cast<double>(r.n());
    if (!r.responders.empty()) r.y_resp_mean = resp_sum / static_cast<double>(r.n1());

    std::sort(subsample.begin(), subsample.end());
    if (std::adjacent_find(subsample.begin(), subsample.end()) != subsample.end())
        throw DomainError("sub-sample contains a repeated position");
    double sub_sum = 0;
    for (std::size_t pos : subsample) {
        if (!std::binary_search(r.nonresponders.begin(), r.nonresponders.end(), pos))
            throw DomainError("sub-sample position " + std::to_string(pos) + " is not a non-respondent of sample " +
                              std::to_string(start));
        sub_sum += pop[pos - 1].y;
    }
    r.subsample = std::move(subsample);
    if (!r.subsample.empty()) r.y_sub_mean = sub_sum / static_cast<double>(r.h2());
    return r;
}

SampleRealization draw_realization(const Population& pop, const DesignParams& design,
                                   const NonResponseLabeling& labeling, double l_factor, std::uint64_t seed) {
    design.validate();
    Rng rng(seed);
    const std::size_t start = 1 + rng.uniform_index(design.k);

    std::vector<std::size_t> pool;
    for (std::size_t pos : sample_positions(design, start))
        if (labeling.labels.at(pos - 1)) pool.push_back(pos);
    const std::size_t h2 = subsample_size(pool.size(), l_factor);
    // Partial Fisher-Yates: the first h2 slots are a uniform draw without replacement.
    for (std::size_t i = 0; i < h2; ++i) std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
    pool.resize(h2);
    return make_realization(pop, design, labeling, start, std::move(pool));
}

}  // namespace sysnr
