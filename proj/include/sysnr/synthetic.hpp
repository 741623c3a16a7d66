#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "sysnr/population.hpp"

namespace sysnr {

/// Targets for a generated frame. The frame is built on the n x k array of
/// systematic samples (row j of sample i sits at position i + j k) from
/// mutually orthogonal components, so that, up to rounding,
///   - the unit-level correlation of (y, x) equals `rho`,
///   - the correlation of the k sample means equals `rho`,
///   - the pairwise intraclass correlations of y and x equal `rho_intraclass`,
///   - the last round(tail_fraction * n) rows (the stratum_tail non-response
///     stratum for K = tail_fraction) have mean square `stratum_ratio * S_y^2`,
///     and their average within-sample mean square equals the stratum mean
///     square, which is what makes the Hansen-Hurwitz variance term exact.
struct SyntheticSpec {
    std::size_t N = 288;
    std::size_t n = 16;
    double rho = 0.87;
    double rho_intraclass = 0.3;
    double stratum_ratio = 2.0;
    double tail_fraction = 0.25;
    double ybar = 100.0;
    double xbar = 50.0;
    double cv_y = 0.2;
    double cv_x = 0.15;
    std::uint64_t seed = 1;

    DesignParams design() const { return DesignParams::for_sample_size(N, n); }
    /// Number of tail rows, round(tail_fraction * n).
    std::size_t tail_rows() const;
};

/// Throws DomainError when the targets are jointly infeasible (the message
/// names the violated constraint) or k < 5.
Population generate_population(const SyntheticSpec& spec);

/// Parses "N=288,n=16,rho=0.87,rho_y=0.3,ratio=2,k0=0.25,ybar=100,xbar=50,cv_y=0.2,cv_x=0.15,seed=1".
/// Omitted keys keep their defaults. Throws DomainError on unknown keys or bad values.
SyntheticSpec parse_synthetic_spec(std::string_view text);

}  // namespace sysnr
