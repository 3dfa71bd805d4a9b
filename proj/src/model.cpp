#include "rep/model.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

namespace rep {

PhysicalParams::PhysicalParams(double c, double gamma, double a, double e0)
    : c_(c), gamma_(gamma), a_(a), e0_(e0)
{
    if (!(c > 0.0) || !std::isfinite(c))
        throw DomainError("speed of light c must be positive, got " + std::to_string(c));
    if (!(gamma > 1.0) || !std::isfinite(gamma))
        throw DomainError("adiabatic index gamma must exceed 1, got " + std::to_string(gamma));
    if (!(a > 0.0 && a < 1.0))
        throw DomainError("sound-speed fraction a must lie in (0, 1), got " + std::to_string(a));
    if (!(e0 >= 0.0) || !std::isfinite(e0))
        throw DomainError("vacuum internal energy e0 must be >= 0, got " + std::to_string(e0));
}

RadialGrid::RadialGrid(std::size_t n_cells, double r_max, double R)
    : n_(n_cells), r_max_(r_max), R_(R), dr_(0.0)
{
    if (n_cells == 0)
        throw DomainError("grid needs at least one cell");
    if (!(R > 0.0) || !(r_max >= R) || !std::isfinite(r_max))
        throw DomainError("grid requires r_max >= R > 0");
    dr_ = r_max / static_cast<double>(n_cells);
}

double RadialGrid::volume(std::size_t i) const
{
    const double r = center(i);
    return r * r * dr_ + dr_ * dr_ * dr_ / 12.0;
}

std::vector<double> RadialGrid::centers() const
{
    std::vector<double> r(n_);
    for (std::size_t i = 0; i < n_; ++i)
        r[i] = center(i);
    return r;
}

PrimitiveState vacuum_primitive(std::size_t n)
{
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

ConservedState vacuum_conserved(std::size_t n)
{
    return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

namespace {

void require_density(double rho)
{
    if (!(rho >= 0.0))
        throw DomainError("density must be non-negative, got " + std::to_string(rho));
}

} // namespace

double pressure(double rho, const PhysicalParams& params)
{
    require_density(rho);
    return std::pow(rho, params.gamma());
}

double pressure_derivative(double rho, const PhysicalParams& params)
{
    require_density(rho);
    if (rho == 0.0)
        return 0.0;
    return params.gamma() * std::pow(rho, params.gamma() - 1.0);
}

bool subcritical(double rho, const PhysicalParams& params)
{
    return pressure_derivative(rho, params) < params.a() * params.c2();
}

double inertia(double rho, const PhysicalParams& params)
{
    return pressure(rho, params) / params.c2() + rho;
}

double charge_density(double rho, const PhysicalParams& params)
{
    require_density(rho);
    if (rho == 0.0)
        return 0.0;
    const double gm1 = params.gamma() - 1.0;
    const double u = std::pow(rho, gm1) / params.c2();
    return rho / (1.0 + params.e0() / params.c2()) * std::exp(-std::log1p(u) / gm1);
}

double charge_supremum(const PhysicalParams& params)
{
    return std::pow(params.c2(), 1.0 / (params.gamma() - 1.0)) / (1.0 + params.e0() / params.c2());
}

double critical_density(const PhysicalParams& params)
{
    return std::pow(params.c2() / params.gamma(), 1.0 / (params.gamma() - 1.0));
}

namespace {

// Newton for x = log rho in phi(x) = log n(e^x), increasing and concave with phi'(x) = 1/(1+u).
// After a step of size h the error is at most (gamma-1)/2 h^2.
double invert_log_charge(double log_n, double x, const PhysicalParams& params)
{
    const double gm1 = params.gamma() - 1.0;
    const double log_norm = std::log1p(params.e0() / params.c2());
    const double tiny = 4.0 * std::numeric_limits<double>::epsilon();
    for (int it = 0; it < 200; ++it) {
        const double u = std::exp(gm1 * x) / params.c2();
        const double phi = x - log_norm - std::log1p(u) / gm1;
        const double step = (log_n - phi) * (1.0 + u);
        x += step;
        if (!(std::abs(step) > 1e-8 / std::max(1.0, gm1)) || !(std::abs(step) > tiny * std::max(1.0, std::abs(x))))
            break;
    }
    return x;
}

void require_charge(double n, const PhysicalParams& params)
{
    if (!(n >= 0.0))
        throw DomainError("charge density must be non-negative, got " + std::to_string(n));
    if (!(n < charge_supremum(params)))
        throw DomainError("charge density " + std::to_string(n) + " exceeds the supremum of n(rho)");
}

} // namespace

double density_from_charge(double n, const PhysicalParams& params)
{
    require_charge(n, params);
    if (n == 0.0)
        return 0.0;
    const double log_n = std::log(n);
    return std::exp(invert_log_charge(log_n, log_n + std::log1p(params.e0() / params.c2()), params));
}

double lorentz_factor(double v, const PhysicalParams& params)
{
    const double beta2 = v * v / params.c2();
    if (!(beta2 < 1.0))
        throw SuperluminalError("|v| >= c (v = " + std::to_string(v) + ")");
    return 1.0 / std::sqrt(1.0 - beta2);
}

ConservedState prim_to_cons(const PrimitiveState& prim, const PhysicalParams& params)
{
    const std::size_t n = prim.size();
    ConservedState cons = vacuum_conserved(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double rho = prim.rho[i];
        const double v = prim.v[i];
        const double W = lorentz_factor(v, params);
        if (rho == 0.0)
            continue;
        cons.D[i] = charge_density(rho, params) * W;
        cons.S[i] = inertia(rho, params) * W * W * v;
    }
    return cons;
}

PrimitiveCell recover_cell(double D, double S, const PhysicalParams& params, double tol, std::size_t cell)
{
    if (!std::isfinite(D) || !std::isfinite(S))
        throw RecoveryFailure(cell, "non-finite conserved state");
    if (std::abs(D) < kVacuumFloor)
        return {0.0, 0.0};
    if (D < 0.0)
        throw RecoveryFailure(cell, "negative charge density D = " + std::to_string(D));
    if (S == 0.0) {
        if (!(D < charge_supremum(params)))
            throw RecoveryFailure(cell, "charge density exceeds the supremum of n(rho)");
        const double rho = density_from_charge(D, params);
        if (!(pressure_derivative(rho, params) < params.c2()))
            throw RecoveryFailure(cell, "no root with p'(rho) < c^2");
        return {rho, 0.0};
    }

    const double c = params.c();
    const double c2 = params.c2();
    const double s = std::abs(S);
    const double k = 1.0 + params.e0() / c2;

    // Unknown w = W v. With h = q / n >= k the residual g(w) = s - D h(rho(w)) w is positive at
    // w = 0 and non-positive at w = s / (D k); dg/dw = -D h (1 - p' v^2 / c^4).
    double lo = 0.0;
    double hi = s / (D * k);
    if (!std::isfinite(hi))
        throw RecoveryFailure(cell, "momentum too large for charge, no subluminal root");

    // Monotone only where p'(rho) < c^2; rho falls as w grows, so that branch is w > lo with
    // D / W(lo) = n(rho_crit).
    const double n_crit = charge_density(critical_density(params), params);
    const bool clipped = !(D < n_crit);
    if (clipped) {
        const double W = D / n_crit;
        lo = c * std::sqrt((W - 1.0) * (W + 1.0));
        if (!(lo < hi))
            throw RecoveryFailure(cell, "no root with p'(rho) < c^2");
    }

    struct Eval {
        double g, dg, rho, v;
    };
    const double gm1 = params.gamma() - 1.0;
    const double log_D = std::log(D);
    double x_hint = log_D + std::log1p(params.e0() / c2);
    auto eval = [&](double w) {
        const double W = std::sqrt(1.0 + w * w / c2);
        const double x = invert_log_charge(log_D - std::log(W), x_hint, params);
        x_hint = x;
        const double rho = std::exp(x);
        const double rg = std::exp(gm1 * x);
        const double q = rho * rg / c2 + rho;
        const double pp = params.gamma() * rg;
        const double h = q * W / D;
        const double v = w / W;
        return Eval{s - D * h * w, -D * h * (1.0 - pp * v * v / (c2 * c2)), rho, v};
    };

    if (clipped && !(eval(lo).g > 0.0))
        throw RecoveryFailure(cell, "no root with p'(rho) < c^2");

    // h is largest at w = 0, so this guess undershoots the root.
    const double mid = 0.5 * (lo + hi);
    double w = clipped ? mid : s / (D * inertia(density_from_charge(D, params), params) / D);
    if (!(w > lo && w < hi))
        w = mid;
    Eval e = eval(w);
    const double eps = std::numeric_limits<double>::epsilon();
    bool converged = false;
    for (int it = 0; it < kRecoveryMaxIter; ++it) {
        if (std::abs(e.g) <= 4.0 * eps * s) {
            converged = true;
            break;
        }
        if (e.g > 0.0)
            lo = w;
        else
            hi = w;

        double next = (e.dg < 0.0) ? w - e.g / e.dg : 0.5 * (lo + hi);
        bool newton = true;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
            newton = false;
        }
        const double step = next - w;
        w = next;
        e = eval(w);
        if ((newton && std::abs(step) <= 1e-9 * w) || std::abs(step) <= 2.0 * eps * w || hi - lo <= 4.0 * eps * hi) {
            converged = true;
            break;
        }
    }
    if (!converged && !(std::abs(e.g) <= tol * (1.0 + s)))
        throw RecoveryFailure(cell, "no convergence within " + std::to_string(kRecoveryMaxIter) + " iterations");
    if (!(e.v < c))
        throw RecoveryFailure(cell, "recovered velocity is not subluminal");

    return {e.rho, S < 0.0 ? -e.v : e.v};
}

PrimitiveState cons_to_prim(const ConservedState& cons, const PhysicalParams& params, double tol)
{
    if (!(tol > 0.0))
        throw DomainError("recovery tolerance must be positive");
    const std::size_t n = cons.size();
    PrimitiveState prim = vacuum_primitive(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
    std::ptrdiff_t first_failure = count;
    std::exception_ptr failure;
#pragma omp parallel for if (count >= 4096)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            const auto cell = recover_cell(cons.D[i], cons.S[i], params, tol, i);
            prim.rho[i] = cell.rho;
            prim.v[i] = cell.v;
        } catch (...) {
#pragma omp critical(rep_recovery_failure)
            if (k < first_failure) {
                first_failure = k;
                failure = std::current_exception();
            }
        }
    }
    if (failure)
        std::rethrow_exception(failure);
    return prim;
}

} // namespace rep
