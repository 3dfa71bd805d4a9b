#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rep/field.hpp"
#include "rep/model.hpp"

namespace rep {

inline constexpr double kDefaultCfl = 0.4;
/// Lower bound on the signal speed, as a fraction of c, so that an all-vacuum state has a finite dt.
inline constexpr double kMinSignalFraction = 1e-12;

/// Regularity budget of a snapshot: |(v^2)_r| <= c^2 and |(p')_r| <= c^2.
struct RegularityIndicator {
    double max_dv2_dr = 0.0;
    double max_dpprime_dr = 0.0;
    std::size_t worst_cell = 0;
    bool regular = true;
};

enum class BreakdownCause { RecoveryFailure, Superluminal, RegularityViolation, DtCollapse };

std::string_view to_string(BreakdownCause cause);

struct BreakdownEvent {
    double t;
    BreakdownCause cause;
    std::size_t cell;
    std::string detail;
};

struct BreakdownReport {
    std::optional<BreakdownEvent> event;

    bool occurred() const { return event.has_value(); }
};

struct Snapshot {
    double t = 0.0;
    std::size_t step = 0;
    PrimitiveState prim;
    ConservedState cons;
    FieldProfile field;
    RegularityIndicator regularity;
};

/// Per accepted step bookkeeping, kept for every step (snapshots are only kept at the cadence).
struct StepRecord {
    double t;
    double dt;
    double total_charge;
    double min_D;
    double max_abs_v;
};

struct SimulationSeries {
    RadialGrid grid;
    PhysicalParams params;
    std::vector<double> times;
    std::vector<Snapshot> snapshots;
    std::vector<double> dt_history;
    std::vector<StepRecord> steps;

    SimulationSeries(RadialGrid grid, PhysicalParams params) : grid(grid), params(params) {}
    std::size_t size() const { return snapshots.size(); }
    void push(Snapshot snap);
};

struct SolverOptions {
    double t_final = 1.0;
    double cfl = kDefaultCfl;
    std::size_t output_every = 1;       ///< snapshot cadence in accepted steps
    double dt_min_factor = 1e-12;       ///< dt-collapse when dt < dt_min_factor * t_final
    double velocity_guard = 1e-9;       ///< superluminal when |v| >= c (1 - velocity_guard)
    bool stop_at_breakdown = true;      ///< otherwise only recovery failure and dt collapse stop the run
    std::size_t max_steps = 10'000'000;
};

struct RunResult {
    SimulationSeries series;
    BreakdownReport breakdown;
};

/// lambda = (|v| + c_s) / (1 + |v| c_s / c^2), c_s = sqrt(p'(rho)).
std::vector<double> signal_speed(const PrimitiveState& prim, const PhysicalParams& params);

double cfl_timestep(const PrimitiveState& prim, const RadialGrid& grid, const PhysicalParams& params,
                    double cfl = kDefaultCfl);

/// r^2-weighted total charge sum_i D_i V_i, V_i the exact integral of s^2 over the cell.
double total_charge(std::span<const double> D, const RadialGrid& grid);

/**
 * One forward-Euler stage with local Lax-Friedrichs fluxes.
 *
 *   D: (1/r^2) d_r(r^2 D v), integrated over the cell so sum D_i V_i telescopes
 *   S: d_r(S v + p) + 2 S v / r = 4 pi D phi_r
 *
 * Reflective ghost (even rho, odd v) at r = 0, zero-gradient ghost at r_max. Cells with
 * |D| below the vacuum floor are reset to exact vacuum afterwards.
 */
ConservedState step(const ConservedState& cons, const RadialGrid& grid, const PhysicalParams& params, double dt);

/// SSP-RK2: average of the state and two Euler stages.
ConservedState time_integrate(const ConservedState& cons, const RadialGrid& grid, const PhysicalParams& params,
                              double dt);

RegularityIndicator regularity_indicator(const PrimitiveState& prim, const RadialGrid& grid,
                                         const PhysicalParams& params);

inline constexpr double kResidualDensityFraction = 1e-6;

/// Residual of the non-conservative velocity equation between consecutive snapshots, max over
/// cells whose density, and both neighbours', exceeds rho_fraction times the snapshot peak.
/// One value per snapshot pair.
std::vector<double> velocity_equation_residual(const SimulationSeries& series, const PhysicalParams& params,
                                               double rho_fraction = kResidualDensityFraction);

Snapshot make_snapshot(double t, std::size_t step, ConservedState cons, PrimitiveState prim,
                       const RadialGrid& grid, const PhysicalParams& params);

RunResult run(const PrimitiveState& prim0, const RadialGrid& grid, const PhysicalParams& params,
              const SolverOptions& options);

} // namespace rep
