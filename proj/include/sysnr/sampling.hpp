#pragma once

// Systematic draws, non-response labeling and Hansen-Hurwitz sub-sampling.
// Frame positions are 1-based throughout this header.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sysnr/population.hpp"

namespace sysnr {

enum class LabelingMode {
    stratum_tail,  // last floor(K N) frame positions form the non-response stratum
    bernoulli,     // each unit independently with probability K
};

std::string_view to_string(LabelingMode m);
/// Throws DomainError on an unknown name.
LabelingMode labeling_mode_from_string(std::string_view name);

struct NonResponseLabeling {
    std::vector<bool> labels;  // true = non-respondent
    double realized_rate = 0;  // count(true) / N

    std::size_t count() const;
    bool is_nonrespondent(std::size_t position) const { return labels.at(position - 1); }
};

struct SampleRealization {
    std::size_t start = 0;                   // in [1, k]
    std::vector<std::size_t> unit_indices;   // start, start + k, ...
    std::vector<std::size_t> responders;
    std::vector<std::size_t> nonresponders;
    std::vector<std::size_t> subsample;      // subset of nonresponders, ascending
    std::optional<double> y_resp_mean;       // defined when n1 > 0
    std::optional<double> y_sub_mean;        // defined when the subsample is non-empty
    double x_mean = 0;                       // over all n units

    std::size_t n() const { return unit_indices.size(); }
    std::size_t n1() const { return responders.size(); }
    std::size_t n2() const { return nonresponders.size(); }
    std::size_t h2() const { return subsample.size(); }
    /// n2 / h2 actually used; nullopt when n2 = 0.
    std::optional<double> realized_l() const;
};

/// Frame positions of the sample with the given 1-based start.
std::vector<std::size_t> sample_positions(const DesignParams& design, std::size_t start);

/// All k systematic samples, in start order. They partition {1, ..., N}.
std::vector<std::vector<std::size_t>> enumerate_samples(const DesignParams& design);

NonResponseLabeling label_nonresponse(const Population& pop, double k_rate, LabelingMode mode,
                                      std::uint64_t seed = 0);

/// Mean square (divisor m - 1) of y over the m labeled units; 0 when m < 2.
double nonresponse_mean_square(const Population& pop, const NonResponseLabeling& labeling);

/// h2 = max(1, round(n2 / L)) for n2 > 0, else 0.
std::size_t subsample_size(std::size_t n2, double l_factor);

/// Realization for a given start and sub-sample. Throws DomainError if the
/// start is out of range or the sub-sample is not a subset of the sample's
/// non-respondents. An empty sub-sample with n2 > 0 is representable; the
/// estimators reject it.
SampleRealization make_realization(const Population& pop, const DesignParams& design,
                                   const NonResponseLabeling& labeling, std::size_t start,
                                   std::vector<std::size_t> subsample);

/// Uniform start on [1, k]; sub-sample of size subsample_size(n2, L) drawn
/// uniformly without replacement from the sample's non-respondents.
SampleRealization draw_realization(const Population& pop, const DesignParams& design,
                                   const NonResponseLabeling& labeling, double l_factor, std::uint64_t seed);

}  // namespace sysnr
