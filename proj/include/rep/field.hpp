#pragma once

#include <span>
#include <vector>

#include "rep/model.hpp"

namespace rep {

struct FieldProfile {
    std::vector<double> phi_r;             ///< radial field at cell centres
    std::vector<double> cumulative_moment; ///< M(r_i) = int_0^{r_i} D s^2 ds
};

/**
 * Cumulative charge moment at cell centres.
 *
 * D is reconstructed as D_i + slope_i (s - sbar_i) in each cell, sbar_i the r^2-weighted
 * centroid, so whole cells contribute exactly D_i V_i and M beyond the support equals the total
 * charge. The half cell [r_{i-1/2}, r_i] is integrated exactly against s^2. Interior slopes are
 * minmod of the one-sided differences; the first cell takes the outward difference, capped so
 * the profile stays non-negative at r = 0.
 */
std::vector<double> cumulative_moment(std::span<const double> D, const RadialGrid& grid);

/// phi_r(r_i) = 4 pi M(r_i) / r_i^2. As r -> 0 this behaves like 4 pi D(0) r / 3.
FieldProfile electric_field(std::span<const double> D, const RadialGrid& grid);

} // namespace rep
