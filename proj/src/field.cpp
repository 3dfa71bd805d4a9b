#include "rep/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rep {

namespace {

double minmod(double a, double b)
{
    if (a * b <= 0.0)
        return 0.0;
    return std::abs(a) < std::abs(b) ? a : b;
}

// int_a^b s^2 ds and int_a^b (s - c) s^2 ds
double moment2(double a, double b) { return (b * b * b - a * a * a) / 3.0; }
double moment3(double a, double b, double c)
{
    return (b * b * b * b - a * a * a * a) / 4.0 - c * moment2(a, b);
}

// r^2-weighted centroid of [a, b]
double centroid(double a, double b)
{
    return (b * b * b * b - a * a * a * a) / (4.0 * moment2(a, b));
}

std::vector<double> limited_slopes(std::span<const double> D, const RadialGrid& grid)
{
    const std::size_t n = D.size();
    std::vector<double> slope(n, 0.0);
    if (n < 2)
        return slope;
    std::vector<double> sbar(n);
    for (std::size_t i = 0; i < n; ++i)
        sbar[i] = centroid(grid.face(i), grid.face(i + 1));
    auto diff = [&](std::size_t i) { return (D[i + 1] - D[i]) / (sbar[i + 1] - sbar[i]); };

    slope[0] = diff(0);
    if (D[0] - sbar[0] * slope[0] < 0.0)
        slope[0] = D[0] / sbar[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        slope[i] = minmod(diff(i - 1), diff(i));
    // outflow ghost copies the last cell, so the last slope vanishes
    return slope;
}

} // namespace

std::vector<double> cumulative_moment(std::span<const double> D, const RadialGrid& grid)
{
    const std::size_t n = grid.size();
    const auto slope = limited_slopes(D, grid);

    // D_i + slope_i (s - centroid_i) integrates to D_i V_i over cell i.
    std::vector<double> M(n, 0.0);
    double below = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = grid.face(i);
        const double r = grid.center(i);
        const double sbar = centroid(left, grid.face(i + 1));
        M[i] = below + D[i] * moment2(left, r) + slope[i] * moment3(left, r, sbar);
        below += D[i] * grid.volume(i);
    }
    return M;
}

FieldProfile electric_field(std::span<const double> D, const RadialGrid& grid)
{
    FieldProfile out;
    out.cumulative_moment = cumulative_moment(D, grid);
    out.phi_r.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.center(i);
        out.phi_r[i] = 4.0 * std::numbers::pi * out.cumulative_moment[i] / (r * r);
    }
    return out;
}

} // namespace rep
