#pragma once

// Monte Carlo check of the closed-form bias/MSE against repeated systematic
// draws with Hansen-Hurwitz sub-sampling.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sysnr/estimators.hpp"
#include "sysnr/population.hpp"
#include "sysnr/sampling.hpp"
#include "sysnr/theory.hpp"

namespace sysnr {

/// Which intraclass correlations feed the theory columns.
enum class IntraclassSource {
    pairwise,          // summarize(): pairwise within-sample definition
    variance_matched,  // theta-form reproduces the exact design variance
};

struct McConfig {
    std::size_t replications = 1000;
    std::uint64_t seed = 0;
    double l_factor = 2.0;
    LabelingMode labeling_mode = LabelingMode::stratum_tail;  // informational; the labeling is passed in
    std::vector<EstimatorSpec> estimators;
    IntraclassSource intraclass = IntraclassSource::variance_matched;
    /// Relative slack allowed for every estimator except hh; the first-order
    /// expansions carry O(1/n^2) error.
    double first_order_slack = 0.05;
    /// 0 = one thread per hardware core. Results do not depend on this.
    std::size_t threads = 1;
};

struct McRow {
    Estimator estimator = Estimator::hh;
    std::map<std::string, double> constants;
    double empirical_bias = 0;
    double empirical_mse = 0;
    double mse_standard_error = 0;
    double theory_bias = 0;
    double theory_mse = 0;
    double z_score = 0;       // (empirical_mse - theory_mse) / mse_standard_error
    double tolerance = 0;     // max(3 SE, slack * theory_mse)
    bool within_band = false; // |empirical_mse - theory_mse| <= tolerance
};

struct McReport {
    PopulationSummary summary;         // as computed by summarize()
    PopulationSummary theory_summary;  // what the theory columns used
    NonResponseSpec nonresponse;       // K, S_y2^2 from the labeling; configured L
    std::size_t replications = 0;
    double mean_realized_l = 0;        // mean n2/h2 over draws with n2 > 0 (NaN if none)
    bool l_mismatch = false;           // |L' - L| / L > 0.1
    std::vector<McRow> rows;
};

/// Theory inputs derived from a labeled population: summary (per `source`)
/// and K, S_y2^2 taken from the labeling with the configured L.
struct TheoryInputs {
    PopulationSummary summary;
    NonResponseSpec nonresponse;
};
TheoryInputs theory_inputs(const Population& pop, const DesignParams& design, const NonResponseLabeling& labeling,
                           double l_factor, IntraclassSource source);

/// hh, lr (b = population slope), t1, t2, t3 at their optimum constants.
std::vector<EstimatorSpec> optimum_specs(const PopulationSummary& s, const NonResponseSpec& nr, T2Shape shape);

/// Closed-form bias and MSE of `spec` at its own constants.
TheoryResult theory_for(const EstimatorSpec& spec, const PopulationSummary& s, const NonResponseSpec& nr);

McReport run_mc(const Population& pop, const DesignParams& design, const NonResponseLabeling& labeling,
                const McConfig& cfg);

enum class Verdict { holds_first_order, violated };

/// Per estimator row: violated when outside the band for at least two of the
/// reports (reports must list the same estimators in the same order).
std::vector<Verdict> classify_across_seeds(const std::vector<McReport>& reports);

}  // namespace sysnr
