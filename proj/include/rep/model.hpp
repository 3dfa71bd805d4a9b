#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rep/error.hpp"

namespace rep {

/// D below this magnitude is snapped to exact vacuum.
inline constexpr double kVacuumFloor = 1e-14;
inline constexpr double kRecoveryTol = 1e-12;
inline constexpr int kRecoveryMaxIter = 100;

/**
 * Constants of the gamma-law electro-fluid.
 *
 * c     speed of light
 * gamma adiabatic index, p = rho^gamma
 * a     sound-speed fraction bounding p'(rho) < a c^2
 * e0    specific internal energy at vacuum; fixes n/rho -> 1/(1 + e0/c^2)
 */
class PhysicalParams {
public:
    PhysicalParams(double c, double gamma, double a, double e0 = 0.0);

    double c() const { return c_; }
    double c2() const { return c_ * c_; }
    double gamma() const { return gamma_; }
    double a() const { return a_; }
    double e0() const { return e0_; }

private:
    double c_, gamma_, a_, e0_;
};

/// Uniform radial grid with cell centres r_i = (i + 1/2) dr; R is the initial support radius.
class RadialGrid {
public:
    RadialGrid(std::size_t n_cells, double r_max, double R);

    std::size_t size() const { return n_; }
    double r_max() const { return r_max_; }
    double R() const { return R_; }
    double dr() const { return dr_; }
    double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dr_; }
    /// Left face of cell i; face(size()) == r_max.
    double face(std::size_t i) const { return static_cast<double>(i) * dr_; }
    /// Integral of s^2 over cell i (the r^2-weighted cell measure).
    double volume(std::size_t i) const;
    std::vector<double> centers() const;

private:
    std::size_t n_;
    double r_max_, R_, dr_;
};

struct PrimitiveState {
    std::vector<double> rho;
    std::vector<double> v;

    std::size_t size() const { return rho.size(); }
};

struct ConservedState {
    std::vector<double> D;
    std::vector<double> S;

    std::size_t size() const { return D.size(); }
};

PrimitiveState vacuum_primitive(std::size_t n);
ConservedState vacuum_conserved(std::size_t n);

double pressure(double rho, const PhysicalParams& params);

/// p'(rho) = gamma rho^(gamma-1), the squared sound speed.
double pressure_derivative(double rho, const PhysicalParams& params);

/// Strict p'(rho) < a c^2.
bool subcritical(double rho, const PhysicalParams& params);

/// q = p/c^2 + rho.
double inertia(double rho, const PhysicalParams& params);

/**
 * Charge density n(rho), the solution of dn/n = drho/q normalised so that
 * n/rho -> 1/(1 + e0/c^2) at vacuum:
 *
 *   n = rho (1 + e0/c^2)^-1 (1 + rho^(gamma-1)/c^2)^(-1/(gamma-1))
 */
double charge_density(double rho, const PhysicalParams& params);

/// sup over rho of n(rho) = c^(2/(gamma-1)) / (1 + e0/c^2).
double charge_supremum(const PhysicalParams& params);
/// Density where p'(rho) = c^2.
double critical_density(const PhysicalParams& params);

/// Inverse of charge_density; throws DomainError for n >= charge_supremum. Newton in log rho; the map is concave in log space so the
/// iteration started from the lower bound rho >= n (1 + e0/c^2) converges monotonically.
double density_from_charge(double n, const PhysicalParams& params);

double lorentz_factor(double v, const PhysicalParams& params);

/// D = n W, S = q W^2 v. Throws SuperluminalError if any |v| >= c.
ConservedState prim_to_cons(const PrimitiveState& prim, const PhysicalParams& params);

struct PrimitiveCell {
    double rho;
    double v;
};

/// Single-cell recovery of the unique root with p'(rho) < c^2; `cell` only labels a RecoveryFailure.
PrimitiveCell recover_cell(double D, double S, const PhysicalParams& params,
                           double tol = kRecoveryTol, std::size_t cell = 0);

PrimitiveState cons_to_prim(const ConservedState& cons, const PhysicalParams& params,
                            double tol = kRecoveryTol);

} // namespace rep
