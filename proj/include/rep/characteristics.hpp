#pragma once

#include <vector>

#include "rep/solver.hpp"

namespace rep {

/// Samples of r(t; r0) with dr/dt = v(t, r).
struct CharacteristicPath {
    double r0 = 0.0;
    std::vector<double> times;
    std::vector<double> positions;
    bool left_grid = false; ///< truncated where the path crossed r_max
};

/// Linear interpolation in r between cell centres (v odd through r = 0, constant beyond the last centre).
double interpolate_cells(std::span<const double> values, const RadialGrid& grid, double r, bool odd);

/**
 * Heun (RK2) integration of dr/dt = v through the series, with v linear in r between centres
 * and linear in t between snapshots. Each snapshot interval is split into `substeps` steps.
 */
CharacteristicPath trace(double r0, const SimulationSeries& series, int substeps = 4);

struct PathDensityRecord {
    double t;
    double D_interp;    ///< D interpolated from the series at (t, r(t))
    double D_predicted; ///< D(0, r0) exp(-int_0^t (v_r + 2 v / r) ds)
};

/// Transport of D along a traced path, comparing the series with the integrating-factor solution.
std::vector<PathDensityRecord> density_along_path(const CharacteristicPath& path, const SimulationSeries& series);

inline constexpr double kDefaultMassFraction = 1e-6;

/// Per snapshot, the smallest radius holding (1 - mass_fraction) of the r^2-weighted charge.
std::vector<double> support_radius(const SimulationSeries& series, double mass_fraction = kDefaultMassFraction);
double support_radius(std::span<const double> D, const RadialGrid& grid, double mass_fraction = kDefaultMassFraction);

} // namespace rep
