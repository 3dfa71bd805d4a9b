#include "rep/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rep {

std::string_view to_string(BreakdownCause cause)
{
    switch (cause) {
    case BreakdownCause::RecoveryFailure:
        return "recovery-failure";
    case BreakdownCause::Superluminal:
        return "superluminal";
    case BreakdownCause::RegularityViolation:
        return "regularity-violation";
    case BreakdownCause::DtCollapse:
        return "dt-collapse";
    }
    return "unknown";
}

void SimulationSeries::push(Snapshot snap)
{
    if (!times.empty() && !(snap.t > times.back()))
        throw std::logic_error("snapshot times must be strictly increasing");
    times.push_back(snap.t);
    snapshots.push_back(std::move(snap));
}

std::vector<double> signal_speed(const PrimitiveState& prim, const PhysicalParams& params)
{
    std::vector<double> lambda(prim.size(), 0.0);
    for (std::size_t i = 0; i < prim.size(); ++i) {
        if (prim.rho[i] == 0.0)
            continue;
        const double cs = std::sqrt(pressure_derivative(prim.rho[i], params));
        const double v = std::abs(prim.v[i]);
        lambda[i] = (v + cs) / (1.0 + v * cs / params.c2());
    }
    return lambda;
}

double cfl_timestep(const PrimitiveState& prim, const RadialGrid& grid, const PhysicalParams& params, double cfl)
{
    if (!(cfl > 0.0 && cfl < 1.0))
        throw DomainError("cfl must lie in (0, 1)");
    const auto lambda = signal_speed(prim, params);
    double lmax = kMinSignalFraction * params.c();
    for (double l : lambda)
        lmax = std::max(lmax, l);
    return cfl * grid.dr() / lmax;
}

double total_charge(std::span<const double> D, const RadialGrid& grid)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < D.size(); ++i)
        sum += D[i] * grid.volume(i);
    return sum;
}

namespace {

struct Rates {
    std::vector<double> dD, dS;
};

Rates rates(const ConservedState& cons, const PrimitiveState& prim, const RadialGrid& grid,
            const PhysicalParams& params)
{
    const std::size_t n = grid.size();
    const double dr = grid.dr();
    const auto lambda = signal_speed(prim, params);
    const auto field = electric_field(cons.D, grid);

    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i)
        p[i] = pressure(prim.rho[i], params);

    // Face j is the left face of cell j; j = 0 is the origin, j = n is r_max.
    std::vector<double> flux_D(n + 1, 0.0), flux_S(n + 1, 0.0);
    auto rusanov = [&](double DL, double SL, double vL, double pL, double lL, double DR, double SR, double vR,
                       double pR, double lR, double& fD, double& fS) {
        const double lam = std::max(lL, lR);
        fD = 0.5 * (DL * vL + DR * vR) - 0.5 * lam * (DR - DL);
        fS = 0.5 * (SL * vL + pL + SR * vR + pR) - 0.5 * lam * (SR - SL);
    };

    rusanov(cons.D[0], -cons.S[0], -prim.v[0], p[0], lambda[0], cons.D[0], cons.S[0], prim.v[0], p[0], lambda[0],
            flux_D[0], flux_S[0]);
    for (std::size_t j = 1; j < n; ++j)
        rusanov(cons.D[j - 1], cons.S[j - 1], prim.v[j - 1], p[j - 1], lambda[j - 1], cons.D[j], cons.S[j],
                prim.v[j], p[j], lambda[j], flux_D[j], flux_S[j]);
    flux_D[n] = cons.D[n - 1] * prim.v[n - 1];
    flux_S[n] = cons.S[n - 1] * prim.v[n - 1] + p[n - 1];

    Rates out{std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        const double rl = grid.face(i), rr = grid.face(i + 1), r = grid.center(i);
        out.dD[i] = -(rr * rr * flux_D[i + 1] - rl * rl * flux_D[i]) / grid.volume(i);
        out.dS[i] = -(flux_S[i + 1] - flux_S[i]) / dr - 2.0 * cons.S[i] * prim.v[i] / r +
                    4.0 * std::numbers::pi * cons.D[i] * field.phi_r[i];
    }
    return out;
}

void apply_vacuum_floor(ConservedState& cons)
{
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (std::abs(cons.D[i]) < kVacuumFloor) {
            cons.D[i] = 0.0;
            cons.S[i] = 0.0;
        }
    }
}

} // namespace

ConservedState step(const ConservedState& cons, const RadialGrid& grid, const PhysicalParams& params, double dt)
{
    const auto prim = cons_to_prim(cons, params);
    const auto k = rates(cons, prim, grid, params);
    ConservedState out = cons;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.D[i] += dt * k.dD[i];
        out.S[i] += dt * k.dS[i];
    }
    apply_vacuum_floor(out);
    return out;
}

ConservedState time_integrate(const ConservedState& cons, const RadialGrid& grid, const PhysicalParams& params,
                              double dt)
{
    const auto stage1 = step(cons, grid, params, dt);
    const auto stage2 = step(stage1, grid, params, dt);
    ConservedState out = cons;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.D[i] = 0.5 * (cons.D[i] + stage2.D[i]);
        out.S[i] = 0.5 * (cons.S[i] + stage2.S[i]);
    }
    apply_vacuum_floor(out);
    return out;
}

namespace {

// Second-order differences: central inside, one-sided at both ends.
std::vector<double> derivative(std::span<const double> f, double dr)
{
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 2)
        return d;
    if (n == 2) {
        d[0] = d[1] = (f[1] - f[0]) / dr;
        return d;
    }
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dr);
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dr);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dr);
    return d;
}

} // namespace

RegularityIndicator regularity_indicator(const PrimitiveState& prim, const RadialGrid& grid,
                                         const PhysicalParams& params)
{
    const std::size_t n = prim.size();
    std::vector<double> v2(n), pp(n);
    for (std::size_t i = 0; i < n; ++i) {
        v2[i] = prim.v[i] * prim.v[i];
        pp[i] = pressure_derivative(prim.rho[i], params);
    }
    const auto dv2 = derivative(v2, grid.dr());
    const auto dpp = derivative(pp, grid.dr());

    RegularityIndicator out;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(dv2[i]), b = std::abs(dpp[i]);
        out.max_dv2_dr = std::max(out.max_dv2_dr, a);
        out.max_dpprime_dr = std::max(out.max_dpprime_dr, b);
        if (std::max(a, b) > worst) {
            worst = std::max(a, b);
            out.worst_cell = i;
        }
    }
    out.regular = out.max_dv2_dr <= params.c2() && out.max_dpprime_dr <= params.c2();
    return out;
}

namespace {

// Spatial part of the velocity equation, so that v_t + spatial_terms = 0.
std::vector<double> velocity_spatial_terms(const Snapshot& snap, const RadialGrid& grid, const PhysicalParams& params)
{
    const std::size_t n = grid.size();
    const double c2 = params.c2();
    const double dr = grid.dr();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rho = snap.prim.rho[i];
        if (rho == 0.0)
            continue;
        const double v = snap.prim.v[i];
        const double r = grid.center(i);
        const double pp = pressure_derivative(rho, params);
        const double q = inertia(rho, params);
        const double nc = charge_density(rho, params);
        const double b2 = 1.0 - v * v / c2;
        const double den = 1.0 - pp * v * v / (c2 * c2);
        const double v_r = (snap.prim.v[i + 1] - snap.prim.v[i - 1]) / (2.0 * dr);
        const double rho_r = (snap.prim.rho[i + 1] - snap.prim.rho[i - 1]) / (2.0 * dr);
        out[i] = (1.0 - pp / c2) / den * v * v_r + b2 * b2 * pp / (q * den) * rho_r -
                 4.0 * std::numbers::pi * nc * b2 * std::sqrt(b2) / (q * den) * snap.field.phi_r[i] -
                 2.0 * b2 * v * v * pp / (c2 * r * den);
    }
    return out;
}

bool evaluable(const Snapshot& snap, std::size_t i, double rho_min)
{
    return snap.prim.rho[i - 1] > rho_min && snap.prim.rho[i] > rho_min && snap.prim.rho[i + 1] > rho_min;
}

double peak(const std::vector<double>& x)
{
    return x.empty() ? 0.0 : *std::max_element(x.begin(), x.end());
}

} // namespace

std::vector<double> velocity_equation_residual(const SimulationSeries& series, const PhysicalParams& params,
                                               double rho_fraction)
{
    if (series.size() < 2)
        throw std::invalid_argument("velocity equation residual needs at least two snapshots");
    const auto& grid = series.grid;
    const std::size_t n = grid.size();
    std::vector<double> out;
    out.reserve(series.size() - 1);
    auto spatial_prev = velocity_spatial_terms(series.snapshots[0], grid, params);
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const auto& a = series.snapshots[k];
        const auto& b = series.snapshots[k + 1];
        auto spatial_next = velocity_spatial_terms(b, grid, params);
        const double dt = b.t - a.t;
        const double rho_a = rho_fraction * peak(a.prim.rho);
        const double rho_b = rho_fraction * peak(b.prim.rho);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!evaluable(a, i, rho_a) || !evaluable(b, i, rho_b))
                continue;
            const double v_t = (b.prim.v[i] - a.prim.v[i]) / dt;
            worst = std::max(worst, std::abs(v_t + 0.5 * (spatial_prev[i] + spatial_next[i])));
        }
        out.push_back(worst);
        spatial_prev = std::move(spatial_next);
    }
    return out;
}

Snapshot make_snapshot(double t, std::size_t step, ConservedState cons, PrimitiveState prim, const RadialGrid& grid,
                       const PhysicalParams& params)
{
    Snapshot snap;
    snap.t = t;
    snap.step = step;
    snap.field = electric_field(cons.D, grid);
    snap.regularity = regularity_indicator(prim, grid, params);
    snap.cons = std::move(cons);
    snap.prim = std::move(prim);
    return snap;
}

namespace {

StepRecord record(double t, double dt, const ConservedState& cons, const PrimitiveState& prim,
                  const RadialGrid& grid)
{
    StepRecord rec{t, dt, total_charge(cons.D, grid), 0.0, 0.0};
    if (!cons.D.empty())
        rec.min_D = *std::min_element(cons.D.begin(), cons.D.end());
    for (double v : prim.v)
        rec.max_abs_v = std::max(rec.max_abs_v, std::abs(v));
    return rec;
}

// Superluminal guard, then the regularity budget.
std::optional<BreakdownEvent> check_state(double t, const PrimitiveState& prim, const RegularityIndicator& reg,
                                          const PhysicalParams& params, const SolverOptions& options)
{
    const double vmax = params.c() * (1.0 - options.velocity_guard);
    for (std::size_t i = 0; i < prim.size(); ++i) {
        if (std::abs(prim.v[i]) >= vmax)
            return BreakdownEvent{t, BreakdownCause::Superluminal, i, "|v| = " + std::to_string(std::abs(prim.v[i]))};
    }
    if (!reg.regular) {
        return BreakdownEvent{t, BreakdownCause::RegularityViolation, reg.worst_cell,
                              "max |(v^2)_r| = " + std::to_string(reg.max_dv2_dr) +
                                  ", max |(p')_r| = " + std::to_string(reg.max_dpprime_dr)};
    }
    return std::nullopt;
}

} // namespace

RunResult run(const PrimitiveState& prim0, const RadialGrid& grid, const PhysicalParams& params,
              const SolverOptions& options)
{
    if (prim0.size() != grid.size())
        throw std::invalid_argument("initial data size does not match the grid");
    if (!(options.t_final > 0.0))
        throw DomainError("t_final must be positive");
    if (options.output_every == 0)
        throw DomainError("output cadence must be at least one step");

    RunResult result{SimulationSeries(grid, params), {}};
    auto& series = result.series;

    ConservedState cons = prim_to_cons(prim0, params);
    for (std::size_t i = 0; i < cons.size(); ++i) {
        if (std::abs(cons.D[i]) < kVacuumFloor)
            cons.D[i] = cons.S[i] = 0.0;
    }
    PrimitiveState prim = cons_to_prim(cons, params);

    double t = 0.0;
    std::size_t nstep = 0;
    series.steps.push_back(record(t, 0.0, cons, prim, grid));
    series.push(make_snapshot(t, nstep, cons, prim, grid, params));

    auto flag = [&](BreakdownEvent ev) {
        if (!result.breakdown.occurred())
            result.breakdown.event = std::move(ev);
    };

    if (auto ev = check_state(t, prim, series.snapshots.back().regularity, params, options)) {
        flag(*ev);
        if (options.stop_at_breakdown)
            return result;
    }

    const double dt_min = options.dt_min_factor * options.t_final;
    while (t < options.t_final && nstep < options.max_steps) {
        const double remaining = options.t_final - t;
        if (remaining <= dt_min)
            break;
        double dt = cfl_timestep(prim, grid, params, options.cfl);
        if (dt < dt_min) {
            flag({t, BreakdownCause::DtCollapse, 0, "dt = " + std::to_string(dt)});
            break;
        }
        dt = std::min(dt, remaining);

        ConservedState next_cons;
        PrimitiveState next_prim;
        try {
            next_cons = time_integrate(cons, grid, params, dt);
            next_prim = cons_to_prim(next_cons, params);
        } catch (const RecoveryFailure& e) {
            flag({t + dt, BreakdownCause::RecoveryFailure, e.cell, e.what()});
            break;
        }

        cons = std::move(next_cons);
        prim = std::move(next_prim);
        t = (dt == remaining) ? options.t_final : t + dt;
        ++nstep;
        series.dt_history.push_back(dt);
        series.steps.push_back(record(t, dt, cons, prim, grid));

        auto snap = make_snapshot(t, nstep, cons, prim, grid, params);
        const auto ev = check_state(t, prim, snap.regularity, params, options);
        const bool last = !(t < options.t_final);
        const bool first_event = ev && !result.breakdown.occurred();
        if (first_event || last || nstep % options.output_every == 0)
            series.push(std::move(snap));
        if (ev) {
            flag(*ev);
            if (options.stop_at_breakdown)
                break;
        }
    }
    if (series.snapshots.back().step != nstep)
        series.push(make_snapshot(t, nstep, cons, prim, grid, params));
    return result;
}

} // namespace rep
