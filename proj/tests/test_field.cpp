#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rep/field.hpp"
#include "rep/solver.hpp"

using namespace rep;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> ball_averages(const RadialGrid& g, double Dbar, double R)
{
    std::vector<double> D(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = g.face(i), b = std::min(g.face(i + 1), R);
        D[i] = b > a ? Dbar * (b * b * b - a * a * a) / 3.0 / g.volume(i) : 0.0;
    }
    return D;
}

} // namespace

TEST_SUITE("field")
{
    TEST_CASE("vacuum has no field")
    {
        const RadialGrid g(50, 1.0, 0.5);
        const auto f = electric_field(std::vector<double>(50, 0.0), g);
        for (double x : f.phi_r)
            CHECK(x == 0.0);
    }

    TEST_CASE("uniform ball with R on a face is exact")
    {
        const RadialGrid g(400, 2.0, 1.0);
        const auto D = ball_averages(g, 0.7, 1.0);
        const auto f = electric_field(D, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = g.center(i);
            const double exact = r < 1.0 ? 4.0 * pi * 0.7 * r / 3.0 : 0.7 * 4.0 * pi / 3.0 / (r * r);
            CHECK(f.phi_r[i] == doctest::Approx(exact).epsilon(1e-12));
        }
    }

    TEST_CASE("off-face ball: exact away from the cut cell, outer moment equals total charge")
    {
        const double R = 0.7345;
        const RadialGrid g(300, 2.0, R);
        const auto D = ball_averages(g, 1.3, R);
        const auto f = electric_field(D, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = g.center(i);
            if (std::abs(r - R) < 1.5 * g.dr())
                continue;
            const double exact = r < R ? 4.0 * pi * 1.3 * r / 3.0 : 1.3 * 4.0 * pi / 3.0 * R * R * R / (r * r);
            CHECK(f.phi_r[i] == doctest::Approx(exact).epsilon(1e-12));
        }
        CHECK(f.cumulative_moment.back() == total_charge(D, g));
    }

    TEST_CASE("second-order convergence for a smooth profile")
    {
        auto M = [](double r) { return 2.0 - std::exp(-r) * (r * r + 2.0 * r + 2.0); };
        double prev = 0.0;
        for (std::size_t n : {200, 400, 800}) {
            const RadialGrid g(n, 4.0, 4.0);
            std::vector<double> D(n);
            for (std::size_t i = 0; i < n; ++i)
                D[i] = (M(g.face(i + 1)) - M(g.face(i))) / g.volume(i);
            const auto m = cumulative_moment(D, g);
            double err = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                err = std::max(err, std::abs(m[i] - M(g.center(i))) / M(g.center(i)));
            if (prev > 0.0)
                CHECK(std::log2(prev / err) > 1.8);
            prev = err;
        }
    }

    TEST_CASE("first cell stays non-negative near the origin")
    {
        // a steep rise away from the centre would extrapolate negative at r = 0
        const RadialGrid g(10, 1.0, 1.0);
        std::vector<double> D(10, 1.0);
        D[0] = 0.01;
        const auto m = cumulative_moment(D, g);
        CHECK(m[0] >= 0.0);
        for (std::size_t i = 1; i < m.size(); ++i)
            CHECK(m[i] > m[i - 1]);
    }
}
