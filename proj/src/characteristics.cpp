#include "rep/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rep {

double interpolate_cells(std::span<const double> values, const RadialGrid& grid, double r, bool odd)
{
    const std::size_t n = grid.size();
    const double r0 = grid.center(0);
    if (r <= r0)
        return odd ? values[0] * r / r0 : values[0];
    if (r >= grid.center(n - 1))
        return values[n - 1];
    const double x = r / grid.dr() - 0.5;
    const auto j = std::min(static_cast<std::size_t>(x), n - 2);
    const double w = x - static_cast<double>(j);
    return (1.0 - w) * values[j] + w * values[j + 1];
}

namespace {

// Locate the snapshot interval containing t; returns (k, theta) with t = (1-theta) t_k + theta t_{k+1}.
std::pair<std::size_t, double> bracket_time(const SimulationSeries& series, double t)
{
    const auto& ts = series.times;
    if (ts.size() == 1 || t <= ts.front())
        return {0, 0.0};
    if (t >= ts.back())
        return {ts.size() - 2, 1.0};
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const auto k = static_cast<std::size_t>(it - ts.begin()) - 1;
    return {k, (t - ts[k]) / (ts[k + 1] - ts[k])};
}

template <class Field>
double sample(const SimulationSeries& series, double t, double r, bool odd, Field field)
{
    const auto [k, theta] = bracket_time(series, t);
    const double a = interpolate_cells(field(series.snapshots[k]), series.grid, r, odd);
    if (series.size() == 1 || theta == 0.0)
        return a;
    const double b = interpolate_cells(field(series.snapshots[k + 1]), series.grid, r, odd);
    return (1.0 - theta) * a + theta * b;
}

double velocity_at(const SimulationSeries& series, double t, double r)
{
    return sample(series, t, r, true, [](const Snapshot& s) -> std::span<const double> { return s.prim.v; });
}

std::vector<double> central_derivative(std::span<const double> f, double dr)
{
    const std::size_t n = f.size();
    std::vector<double> d(n, 0.0);
    if (n < 3)
        return d;
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dr);
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dr);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dr);
    return d;
}

} // namespace

CharacteristicPath trace(double r0, const SimulationSeries& series, int substeps)
{
    if (series.size() == 0)
        throw std::invalid_argument("trace needs a non-empty series");
    const double r_max = series.grid.r_max();
    if (!(r0 > 0.0 && r0 < r_max))
        throw DomainError("characteristic start must lie in (0, r_max)");
    substeps = std::max(substeps, 1);

    CharacteristicPath path;
    path.r0 = r0;
    path.times.push_back(series.times.front());
    path.positions.push_back(r0);
    double r = r0;
    for (std::size_t k = 0; k + 1 < series.size(); ++k) {
        const double t0 = series.times[k];
        const double h = (series.times[k + 1] - t0) / substeps;
        for (int s = 0; s < substeps; ++s) {
            const double t = t0 + s * h;
            const double k1 = velocity_at(series, t, r);
            const double r_pred = std::max(r + h * k1, 0.0);
            const double k2 = velocity_at(series, t + h, r_pred);
            r = std::max(r + 0.5 * h * (k1 + k2), 0.0);
            const double t_next = (s + 1 == substeps) ? series.times[k + 1] : t + h;
            if (r >= r_max) {
                path.left_grid = true;
                return path;
            }
            path.times.push_back(t_next);
            path.positions.push_back(r);
        }
    }
    return path;
}

std::vector<PathDensityRecord> density_along_path(const CharacteristicPath& path, const SimulationSeries& series)
{
    const auto& grid = series.grid;
    // divergence v_r + 2 v / r per snapshot on cell centres
    std::vector<std::vector<double>> v_r;
    v_r.reserve(series.size());
    for (const auto& snap : series.snapshots)
        v_r.push_back(central_derivative(snap.prim.v, grid.dr()));

    auto divergence = [&](double t, double r) {
        const auto [k, theta] = bracket_time(series, t);
        auto at = [&](std::size_t j) {
            const double dv = interpolate_cells(v_r[j], grid, r, false);
            const double v = interpolate_cells(series.snapshots[j].prim.v, grid, r, true);
            return dv + (r > 0.0 ? 2.0 * v / r : 2.0 * dv);
        };
        const double a = at(k);
        if (series.size() == 1 || theta == 0.0)
            return a;
        return (1.0 - theta) * a + theta * at(k + 1);
    };
    auto density = [&](double t, double r) {
        return sample(series, t, r, false, [](const Snapshot& s) -> std::span<const double> { return s.cons.D; });
    };

    std::vector<PathDensityRecord> out;
    if (path.times.empty())
        return out;
    const double D0 = density(path.times[0], path.positions[0]);
    double integral = 0.0;
    double prev_div = divergence(path.times[0], path.positions[0]);
    out.push_back({path.times[0], D0, D0});
    for (std::size_t j = 1; j < path.times.size(); ++j) {
        const double div = divergence(path.times[j], path.positions[j]);
        integral += 0.5 * (path.times[j] - path.times[j - 1]) * (prev_div + div);
        prev_div = div;
        out.push_back({path.times[j], density(path.times[j], path.positions[j]), D0 * std::exp(-integral)});
    }
    return out;
}

double support_radius(std::span<const double> D, const RadialGrid& grid, double mass_fraction)
{
    if (!(mass_fraction > 0.0 && mass_fraction < 1.0))
        throw DomainError("mass fraction must lie in (0, 1)");
    const double total = total_charge(D, grid);
    if (!(total > 0.0))
        return 0.0;
    const double target = (1.0 - mass_fraction) * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double cell = D[i] * grid.volume(i);
        if (cell > 0.0 && cum + cell >= target)
            return grid.face(i) + grid.dr() * std::clamp((target - cum) / cell, 0.0, 1.0);
        cum += cell;
    }
    return grid.r_max();
}

std::vector<double> support_radius(const SimulationSeries& series, double mass_fraction)
{
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& snap : series.snapshots)
        out.push_back(support_radius(snap.cons.D, series.grid, mass_fraction));
    return out;
}

} // namespace rep
