#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rep/certificate.hpp"

using namespace rep;

namespace {

const PhysicalParams kParams(1.0, 2.0, 0.5);

struct Setup {
    RadialGrid grid{800, 0.02, 0.01};
    PrimitiveState prim0;

    explicit Setup(double rho = 0.1)
    {
        prim0 = vacuum_primitive(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid.center(i) < grid.R()) {
                prim0.rho[i] = rho;
                prim0.v[i] = 0.9 * grid.center(i) / grid.R();
            }
        }
    }
};

BlowupCertificate linear_certificate(double slope, const TestingFunction& f = TestingFunction::power(1))
{
    Setup s;
    return certify(f, [&](double r) { return slope * r / s.grid.R(); }, s.prim0, s.grid, kParams);
}

} // namespace

TEST_SUITE("certificate")
{
    TEST_CASE("Simpson is exact for cubics")
    {
        auto g = [](double x) { return 4.0 * x * x * x - x + 2.0; };
        CHECK(simpson(g, -1.0, 2.0, 2) == doctest::Approx(15.0 - 1.5 + 6.0));
        CHECK(simpson(g, -1.0, 2.0, 7) == doctest::Approx(19.5)); // odd n rounded up
        CHECK_THROWS_AS(simpson(g, 0.0, 1.0, 1), DomainError);
    }

    TEST_CASE("constant C")
    {
        CHECK(constant_C(kParams) == doctest::Approx(21.0).epsilon(1e-15));
        const PhysicalParams p(3.0, 5.0 / 3.0, 0.2);
        const double expect = 9.0 / 1.6 + 45.0 / ((2.0 / 3.0) * 0.64);
        CHECK(constant_C_closed_form(p) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(constant_C_decomposed(p) == doctest::Approx(expect).epsilon(1e-14));
    }

    TEST_CASE("B1 and B2 against antiderivatives")
    {
        const double R = 0.7;
        // f = r^2: f^2/f' = r^3 / 2
        CHECK(b1(TestingFunction::power(2), R) == doctest::Approx(std::pow(R, 4) / 8.0).epsilon(1e-12));
        CHECK(b2(TestingFunction::power(2), R, 3.0) == doctest::Approx(R * R * R).epsilon(1e-12));
        // f = r^3: f^2/f' = r^4 / 3
        CHECK(b1(TestingFunction::power(3), R) == doctest::Approx(std::pow(R, 5) / 15.0).epsilon(1e-12));
        // f = sin(w r): int f = (1 - cos(w R)) / w
        const double rc = 2.0, w = std::numbers::pi / (2.0 * rc);
        CHECK(b2(TestingFunction::sine(rc), R, 1.0) == doctest::Approx((1.0 - std::cos(w * R)) / w).epsilon(1e-12));
    }

    TEST_CASE("testing function validation")
    {
        CHECK_THROWS_AS(TestingFunction::sine(1.0).validate(1.0), InvalidTestingFunction);
        CHECK_NOTHROW(TestingFunction::sine(1.5).validate(1.0));
        CHECK_THROWS_AS(TestingFunction([](double r) { return r + 1.0; }, [](double) { return 1.0; }, "shifted"),
                        InvalidTestingFunction);
        const TestingFunction bump([](double r) { return r * (1.0 - r); }, [](double r) { return 1.0 - 2.0 * r; },
                                   "bump");
        CHECK_THROWS_AS(bump.validate(1.0), InvalidTestingFunction);
        CHECK_THROWS_AS(TestingFunction::power(0), InvalidTestingFunction);
    }

    TEST_CASE("worked example")
    {
        const auto cert = linear_certificate(0.9);
        CHECK(cert.C == doctest::Approx(21.0));
        CHECK(cert.B1 == doctest::Approx(1e-6 / 3.0).epsilon(1e-10));
        CHECK(cert.B2 == doctest::Approx(1.05e-3).epsilon(1e-10));
        CHECK(cert.H0 == doctest::Approx(3e-5).epsilon(1e-10));
        CHECK(cert.threshold == doctest::Approx(std::sqrt(7e-10)).epsilon(1e-10));
        REQUIRE(cert.criterion);
        CHECK(*cert.T_pred == doctest::Approx(0.1).epsilon(1e-9));
        CHECK(cert.max_pprime0 == doctest::Approx(0.2));
    }

    TEST_CASE("zero velocity fails the criterion")
    {
        const auto cert = linear_certificate(0.0);
        CHECK(cert.H0 == 0.0);
        CHECK_FALSE(cert.criterion);
        CHECK_FALSE(cert.T_pred.has_value());
        CHECK_THROWS_AS(riccati_lower_bound(cert, 0.0), DomainError);
    }

    TEST_CASE("criterion is strict at the threshold")
    {
        // H0 = 0.3 R^2 s / 0.9 for slope s; bracket the threshold ulp by ulp
        const auto ref = linear_certificate(0.9);
        double s = 0.9 * ref.threshold / ref.H0;
        auto c = linear_certificate(s);
        while (c.H0 > c.threshold) {
            s = std::nextafter(s, 0.0);
            c = linear_certificate(s);
        }
        CHECK_FALSE(c.criterion);
        if (c.H0 == c.threshold)
            MESSAGE("hit H0 == threshold exactly");
        c = linear_certificate(std::nextafter(s, 1.0));
        while (!(c.H0 > c.threshold)) {
            s = std::nextafter(s, 1.0);
            c = linear_certificate(s);
        }
        CHECK(c.criterion);
    }

    TEST_CASE("scale covariance in the testing function")
    {
        const auto base = linear_certificate(0.9);
        for (double k : {0.01, 3.0, 250.0}) {
            const TestingFunction scaled([k](double r) { return k * r; }, [k](double) { return k; }, "k r");
            const auto c = linear_certificate(0.9, scaled);
            CHECK(c.H0 == doctest::Approx(k * base.H0).epsilon(1e-12));
            CHECK(c.B1 == doctest::Approx(k * base.B1).epsilon(1e-12));
            CHECK(c.criterion == base.criterion);
            CHECK(*c.T_pred == doctest::Approx(*base.T_pred).epsilon(1e-10));
        }
    }

    TEST_CASE("criterion is monotone in the initial velocity")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 0.99);
        for (int k = 0; k < 50; ++k) {
            double a = u(rng), b = u(rng);
            if (a > b)
                std::swap(a, b);
            if (linear_certificate(a).criterion)
                CHECK(linear_certificate(b).criterion);
        }
    }

    TEST_CASE("hypothesis violation")
    {
        Setup s(0.3); // p' = 0.6 >= a c^2 = 0.5
        CHECK_THROWS_AS(certify(TestingFunction::power(1), s.prim0, s.grid, kParams), HypothesisViolation);
    }

    TEST_CASE("cell-interpolated velocity reproduces the linear profile")
    {
        Setup s;
        const auto cert = certify(TestingFunction::power(1), s.prim0, s.grid, kParams);
        CHECK(cert.H0 == doctest::Approx(3e-5).epsilon(1e-10));
    }

    TEST_CASE("Riccati bound")
    {
        const auto cert = linear_certificate(0.9);
        CHECK(riccati_lower_bound(cert, 0.0) == doctest::Approx(cert.H0));
        double prev = 0.0;
        for (double t : {0.0, 0.02, 0.05, 0.09, 0.0999}) {
            const double b = riccati_lower_bound(cert, t);
            CHECK(b > prev);
            prev = b;
        }
        // (1/H0 - slope t)^-1 with slope = (H0^2 - 2 B1 B2) / (2 B1 H0^2) = 1 / (H0 T)
        CHECK(riccati_lower_bound(cert, 0.05) == doctest::Approx(2.0 * cert.H0).epsilon(1e-8));
        CHECK_THROWS_AS(riccati_lower_bound(cert, *cert.T_pred), DomainError);
        CHECK_THROWS_AS(riccati_lower_bound(cert, -1e-3), DomainError);
    }

    TEST_CASE("monitor on synthetic series")
    {
        Setup s;
        const auto cert = certify(TestingFunction::power(1), s.prim0, s.grid, kParams);
        SimulationSeries series(s.grid, kParams);
        for (double t : {0.0, 0.02, 0.04, 0.06}) {
            Snapshot snap;
            snap.t = t;
            snap.prim = s.prim0;
            const double grow = riccati_lower_bound(cert, t) / cert.H0;
            for (auto& v : snap.prim.v)
                v *= grow;
            series.push(snap);
        }
        const auto ok = monitor(series, TestingFunction::power(1), cert);
        CHECK(ok.passed());
        CHECK(ok.records.size() == 4);

        auto zeroed = series;
        for (auto& snap : zeroed.snapshots)
            std::fill(snap.prim.v.begin(), snap.prim.v.end(), 0.0);
        const auto bad = monitor(zeroed, TestingFunction::power(1), cert);
        CHECK_FALSE(bad.passed());
        CHECK(bad.violation_times.front() == 0.0);
        CHECK(bad.worst_margin < 0.0);

        const auto stopped = monitor(series, TestingFunction::power(1), cert, 0.05, 0.03);
        CHECK(stopped.records.size() == 2);

        series.snapshots[2].regularity.regular = false;
        CHECK(monitor(series, TestingFunction::power(1), cert).records.size() == 2);
    }
}
