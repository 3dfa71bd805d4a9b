#include <cmath>
#include <random>

#include "doctest.h"
#include "rep/model.hpp"

using namespace rep;

namespace {

// n(rho) from dn/drho = n / q, integrated with RK4 in log rho from a tiny density where n ~ rho / (1 + e0/c^2).
double charge_by_ode(double rho, const PhysicalParams& p)
{
    const double x0 = std::log(1e-30), x1 = std::log(rho);
    const int steps = 20000;
    const double h = (x1 - x0) / steps;
    auto rhs = [&](double x, double n) {
        const double r = std::exp(x);
        return r * n / (std::pow(r, p.gamma()) / p.c2() + r);
    };
    double x = x0;
    double n = 1e-30 / (1.0 + p.e0() / p.c2());
    for (int k = 0; k < steps; ++k) {
        const double k1 = rhs(x, n);
        const double k2 = rhs(x + 0.5 * h, n + 0.5 * h * k1);
        const double k3 = rhs(x + 0.5 * h, n + 0.5 * h * k2);
        const double k4 = rhs(x + h, n + h * k3);
        n += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        x += h;
    }
    return n;
}

} // namespace

TEST_SUITE("model")
{
    TEST_CASE("parameter validation")
    {
        CHECK_THROWS_AS(PhysicalParams(0.0, 2.0, 0.5), DomainError);
        CHECK_THROWS_AS(PhysicalParams(1.0, 1.0, 0.5), DomainError);
        CHECK_THROWS_AS(PhysicalParams(1.0, 2.0, 1.0), DomainError);
        CHECK_THROWS_AS(PhysicalParams(1.0, 2.0, 0.0), DomainError);
        CHECK_THROWS_AS(PhysicalParams(1.0, 2.0, 0.5, -1.0), DomainError);
        CHECK_NOTHROW(PhysicalParams(3.0, 1.4, 0.9, 0.2));
    }

    TEST_CASE("grid volumes are exact shell integrals")
    {
        const RadialGrid g(37, 2.5, 1.0);
        double total = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double a = g.face(i), b = g.face(i + 1);
            CHECK(g.volume(i) == doctest::Approx((b * b * b - a * a * a) / 3.0).epsilon(1e-13));
            total += g.volume(i);
        }
        CHECK(total == doctest::Approx(2.5 * 2.5 * 2.5 / 3.0).epsilon(1e-13));
        CHECK(g.face(g.size()) == doctest::Approx(2.5));
        CHECK_THROWS_AS(RadialGrid(10, 0.5, 1.0), DomainError);
        CHECK_THROWS_AS(RadialGrid(0, 2.0, 1.0), DomainError);
    }

    TEST_CASE("equation of state")
    {
        const PhysicalParams p(2.0, 2.0, 0.5);
        CHECK(pressure(0.3, p) == doctest::Approx(0.09));
        CHECK(pressure_derivative(0.3, p) == doctest::Approx(0.6));
        CHECK(inertia(0.3, p) == doctest::Approx(0.09 / 4.0 + 0.3));
        CHECK(subcritical(0.9, p));   // p' = 1.8 < 2
        CHECK_FALSE(subcritical(1.0, p));
        CHECK_THROWS_AS(pressure(-1.0, p), DomainError);
        CHECK(critical_density(p) == doctest::Approx(2.0)); // 2 rho = c^2
    }

    TEST_CASE("charge density matches the ODE dn/drho = n/q")
    {
        for (const auto& p : {PhysicalParams(1.0, 2.0, 0.5), PhysicalParams(1.0, 5.0 / 3.0, 0.5, 0.3),
                              PhysicalParams(3.0, 1.3, 0.5, 0.0), PhysicalParams(0.5, 2.5, 0.5, 1.0)}) {
            for (double rho : {1e-6, 1e-3, 0.1, 0.7}) {
                CAPTURE(p.gamma());
                CAPTURE(rho);
                CHECK(charge_density(rho, p) == doctest::Approx(charge_by_ode(rho, p)).epsilon(1e-9));
            }
        }
    }

    TEST_CASE("charge density inversion")
    {
        const PhysicalParams p(1.0, 2.0, 0.5, 0.25);
        for (double rho : {1e-12, 1e-6, 0.01, 0.4, 3.0, 50.0})
            CHECK(density_from_charge(charge_density(rho, p), p) == doctest::Approx(rho).epsilon(1e-13));
        CHECK(density_from_charge(0.0, p) == 0.0);
        // n(rho) = rho / (1 + rho) / 1.25 is bounded by 1 / 1.25
        CHECK(charge_supremum(p) == doctest::Approx(0.8));
        CHECK_THROWS_AS(density_from_charge(0.8, p), DomainError);
        CHECK_THROWS_AS(density_from_charge(-1e-3, p), DomainError);
    }

    TEST_CASE("lorentz factor and conversion guards")
    {
        const PhysicalParams p(2.0, 2.0, 0.5);
        CHECK(lorentz_factor(1.2, p) == doctest::Approx(1.25));
        CHECK_THROWS_AS(lorentz_factor(2.0, p), SuperluminalError);
        CHECK_THROWS_AS(prim_to_cons(PrimitiveState{{0.1}, {-2.5}}, p), SuperluminalError);
    }

    TEST_CASE("conserved variables")
    {
        const PhysicalParams p(1.0, 2.0, 0.5);
        const auto cons = prim_to_cons(PrimitiveState{{0.2, 0.0}, {0.6, 0.0}}, p);
        const double W = 1.25;
        CHECK(cons.D[0] == doctest::Approx(charge_density(0.2, p) * W));
        CHECK(cons.S[0] == doctest::Approx((0.04 + 0.2) * W * W * 0.6));
        CHECK(cons.D[1] == 0.0);
        CHECK(cons.S[1] == 0.0);
    }

    TEST_CASE("recovery round trip over random subcritical states")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const PhysicalParams p(10.0, 5.0 / 3.0, 0.5);
        for (int k = 0; k < 2000; ++k) {
            const double rho = std::pow(10.0, -8.0 + 9.0 * unit(rng));
            const double v = p.c() * 0.995 * (2.0 * unit(rng) - 1.0);
            const auto back = cons_to_prim(prim_to_cons(PrimitiveState{{rho}, {v}}, p), p);
            CHECK(back.rho[0] == doctest::Approx(rho).epsilon(1e-11));
            CHECK(back.v[0] == doctest::Approx(v).epsilon(1e-11));
        }
    }

    TEST_CASE("recovery edge cases")
    {
        const PhysicalParams p(1.0, 2.0, 0.5);
        auto vac = recover_cell(0.5 * kVacuumFloor, 1e-20, p);
        CHECK(vac.rho == 0.0);
        CHECK(vac.v == 0.0);
        CHECK_THROWS_AS(recover_cell(-1e-3, 0.0, p), RecoveryFailure);
        CHECK_THROWS_AS(recover_cell(std::nan(""), 0.0, p), RecoveryFailure);

        auto rest = recover_cell(charge_density(0.3, p), 0.0, p);
        CHECK(rest.rho == doctest::Approx(0.3));
        CHECK(rest.v == 0.0);

        // rho = 1 has p' = 2 > c^2; the same (D, S) also has a fast subcritical root, which is returned
        const auto hot = prim_to_cons(PrimitiveState{{1.0}, {0.9}}, p);
        const auto fast = recover_cell(hot.D[0], hot.S[0], p);
        CHECK(fast.rho < critical_density(p));
        const auto again = prim_to_cons(PrimitiveState{{fast.rho}, {fast.v}}, p);
        CHECK(again.D[0] == doctest::Approx(hot.D[0]).epsilon(1e-12));
        CHECK(again.S[0] == doctest::Approx(hot.S[0]).epsilon(1e-12));
        // slow supercritical states have no subcritical partner
        for (double v : {0.0, 0.1}) {
            const auto slow = prim_to_cons(PrimitiveState{{1.0}, {v}}, p);
            CHECK_THROWS_AS(recover_cell(slow.D[0], slow.S[0], p), RecoveryFailure);
        }
        // charge above sup n at rest
        CHECK_THROWS_AS(recover_cell(1.5, 0.0, p), RecoveryFailure);
    }

    TEST_CASE("vector recovery reports the failing cell")
    {
        const PhysicalParams p(1.0, 2.0, 0.5);
        ConservedState cons = prim_to_cons(PrimitiveState{{0.1, 0.1, 0.1, 0.1, 0.1}, {0.0, 0.1, 0.2, 0.3, 0.4}}, p);
        cons.D[3] = -1.0;
        try {
            cons_to_prim(cons, p);
            FAIL("expected a recovery failure");
        } catch (const RecoveryFailure& e) {
            CHECK(e.cell == 3);
        }
        CHECK_THROWS_AS(cons_to_prim(cons, p, 0.0), DomainError);
    }
}
