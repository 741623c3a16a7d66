#pragma once

// Built-in parameter set "murthy1967-summary": summary statistics of the
// 176 forest strips (length x, timber volume y), n = 16, and the published
// PRE table used to audit the theory engine.

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "sysnr/population.hpp"
#include "sysnr/theory.hpp"

namespace sysnr::murthy {

inline constexpr std::string_view kName = "murthy1967-summary";

inline constexpr std::size_t kN = 176;
inline constexpr std::size_t kSampleSize = 16;
inline constexpr double kYbar = 282.6136;
inline constexpr double kXbar = 6.9943;
inline constexpr double kS2y = 24114.6700;
inline constexpr double kS2x = 8.7600;
inline constexpr double kRho = 0.8710;
inline constexpr double kS2y2 = 0.75 * kS2y;  // 18086.0025

/// Cell used to back-solve the (unpublished) common intraclass correlation.
inline constexpr double kAnchorK = 0.1;
inline constexpr double kAnchorL = 2.0;
inline constexpr double kAnchorPre = 407.4884;

/// Summary with rho_y = rho_x back-solved from the anchor cell.
PopulationSummary summary();

NonResponseSpec cell(double k_rate, double l_factor);

/// K in {0.1, ..., 0.4} x L in {2.0, ..., 3.5}, row-major in K.
std::vector<NonResponseSpec> grid();

struct PublishedCell {
    double k_rate;
    double l_factor;
    std::array<double, 4> pre;       // lr, t1, t2 (delta = 1, alpha = 0), t3
    std::array<bool, 4> suspect;     // likely transcription errors
};

std::span<const PublishedCell> published_table();

/// Published cell at (K, L), or nullptr.
const PublishedCell* find_published(double k_rate, double l_factor);

}  // namespace sysnr::murthy
