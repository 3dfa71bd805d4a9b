#include "rep/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rep {

TestingFunction::TestingFunction(Fn f, Fn df, std::string label)
    : f_(std::move(f)), df_(std::move(df)), label_(std::move(label))
{
    if (!f_ || !df_)
        throw InvalidTestingFunction("testing function " + label_ + " needs both f and f'");
    if (f_(0.0) != 0.0)
        throw InvalidTestingFunction("testing function " + label_ + " must vanish at r = 0");
}

TestingFunction TestingFunction::power(int k)
{
    if (k < 1)
        throw InvalidTestingFunction("power testing function needs k >= 1");
    const double kd = k;
    return TestingFunction([kd](double r) { return std::pow(r, kd); },
                           [kd](double r) { return kd * std::pow(r, kd - 1.0); }, "r^" + std::to_string(k));
}

TestingFunction TestingFunction::sine(double r_cut)
{
    if (!(r_cut > 0.0))
        throw InvalidTestingFunction("sine testing function needs r_cut > 0");
    const double w = std::numbers::pi / (2.0 * r_cut);
    return TestingFunction([w](double r) { return std::sin(w * r); }, [w](double r) { return w * std::cos(w * r); },
                           "sin(pi r / (2 * " + std::to_string(r_cut) + "))");
}

void TestingFunction::validate(double R, int samples) const
{
    if (!(R > 0.0))
        throw InvalidTestingFunction("validation radius must be positive");
    double scale = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double r = R * k / samples;
        const double d = df_(r);
        const double val = f_(r);
        if (!std::isfinite(d) || !std::isfinite(val))
            throw InvalidTestingFunction(label_ + " is not finite at r = " + std::to_string(r));
        if (!(d > 0.0))
            throw InvalidTestingFunction(label_ + " has f'(r) <= 0 at r = " + std::to_string(r));
        scale = std::max(scale, d);
    }
    // f' that vanishes at R up to rounding (sine with r_cut = R) makes B1 diverge.
    if (!(df_(R) > 1e-12 * scale))
        throw InvalidTestingFunction(label_ + " has f'(R) = 0 to rounding; B1 diverges");
}

double simpson(const std::function<double(double)>& g, double a, double b, int n)
{
    if (n < 2)
        throw DomainError("Simpson quadrature needs at least two panels");
    if (n % 2 != 0)
        ++n;
    const double h = (b - a) / n;
    double sum = g(a) + g(b);
    for (int k = 1; k < n; ++k)
        sum += (k % 2 ? 4.0 : 2.0) * g(a + k * h);
    return sum * h / 3.0;
}

double constant_C_closed_form(const PhysicalParams& p)
{
    const double g = p.gamma(), a = p.a();
    return p.c2() * (g + a - g * a + 9.0) / (2.0 * (g - 1.0) * (1.0 - a) * (1.0 - a));
}

double constant_C_decomposed(const PhysicalParams& p)
{
    const double g = p.gamma(), a = p.a();
    return p.c2() / (2.0 * (1.0 - a)) + 5.0 * p.c2() / ((g - 1.0) * (1.0 - a) * (1.0 - a));
}

double constant_C(const PhysicalParams& params)
{
    const double closed = constant_C_closed_form(params);
    const double split = constant_C_decomposed(params);
    if (std::abs(closed - split) > 1e-12 * std::abs(closed))
        throw std::logic_error("constant C: closed form and decomposition disagree");
    return closed;
}

double b1(const TestingFunction& f, double R, int quad_n)
{
    f.validate(R);
    auto integrand = [&](double r) {
        const double fr = f(r);
        const double d = f.deriv(r);
        if (fr == 0.0)
            return 0.0; // f(0) = 0: f^2/f' -> 0 for f' > 0 and for f ~ r^k alike
        if (!(d > 0.0))
            throw InvalidTestingFunction(f.label() + " has f'(r) <= 0 at r = " + std::to_string(r));
        return fr * fr / d;
    };
    return simpson(integrand, 0.0, R, quad_n);
}

double b2(const TestingFunction& f, double R, double C, int quad_n)
{
    f.validate(R);
    return C * simpson([&](double r) { return f(r); }, 0.0, R, quad_n);
}

double h_functional(const TestingFunction& f, std::span<const double> v, const RadialGrid& grid)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.size() && i < v.size(); ++i) {
        const double r = grid.center(i);
        if (r > grid.R())
            break;
        sum += f(r) * v[i];
    }
    return sum * grid.dr();
}

std::function<double(double)> velocity_interpolant(std::span<const double> v, const RadialGrid& grid)
{
    std::vector<double> r{0.0}, val{0.0};
    for (std::size_t i = 0; i < grid.size() && grid.center(i) <= grid.R(); ++i) {
        r.push_back(grid.center(i));
        val.push_back(v[i]);
    }
    return [r = std::move(r), val = std::move(val)](double x) {
        if (r.size() < 2)
            return 0.0;
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t j = static_cast<std::size_t>(it - r.begin());
        j = std::clamp<std::size_t>(j, 1, r.size() - 1); // extrapolate from the last segment
        const double w = (x - r[j - 1]) / (r[j] - r[j - 1]);
        return val[j - 1] + w * (val[j] - val[j - 1]);
    };
}

BlowupCertificate certify(const TestingFunction& f, const std::function<double(double)>& v0,
                          const PrimitiveState& prim0, const RadialGrid& grid, const PhysicalParams& params, int quad_n)
{
    const double R = grid.R();
    BlowupCertificate cert;
    cert.testing_function = f.label();
    cert.R = R;
    cert.quad_n = quad_n;

    for (std::size_t i = 0; i < prim0.size(); ++i) {
        cert.max_pprime0 = std::max(cert.max_pprime0, pressure_derivative(prim0.rho[i], params));
        if (!subcritical(prim0.rho[i], params)) {
            throw HypothesisViolation("p'(rho0) = " + std::to_string(pressure_derivative(prim0.rho[i], params)) +
                                      " >= a c^2 = " + std::to_string(params.a() * params.c2()) + " at cell " +
                                      std::to_string(i));
        }
    }

    cert.C = constant_C(params);
    cert.B1 = b1(f, R, quad_n);
    cert.B2 = b2(f, R, cert.C, quad_n);
    cert.H0 = simpson([&](double r) { return f(r) * v0(r); }, 0.0, R, quad_n);
    cert.threshold = std::sqrt(2.0 * cert.B1 * cert.B2);
    cert.criterion = cert.H0 > cert.threshold;
    if (cert.criterion)
        cert.T_pred = 2.0 * cert.B1 * cert.H0 / (cert.H0 * cert.H0 - 2.0 * cert.B1 * cert.B2);
    return cert;
}

BlowupCertificate certify(const TestingFunction& f, const PrimitiveState& prim0, const RadialGrid& grid,
                          const PhysicalParams& params, int quad_n)
{
    return certify(f, velocity_interpolant(prim0.v, grid), prim0, grid, params, quad_n);
}

double riccati_lower_bound(const BlowupCertificate& cert, double t)
{
    if (!cert.criterion || !cert.T_pred)
        throw DomainError("Riccati bound requires a certificate whose criterion holds");
    if (!(t >= 0.0))
        throw DomainError("Riccati bound requires t >= 0");
    if (!(t < *cert.T_pred))
        throw DomainError("Riccati bound diverged: t >= T_pred");
    const double H0 = cert.H0;
    const double slope = (H0 * H0 - 2.0 * cert.B1 * cert.B2) / (2.0 * cert.B1 * H0 * H0);
    return 1.0 / (1.0 / H0 - slope * t);
}

MonitorVerdict monitor(const SimulationSeries& series, const TestingFunction& f, const BlowupCertificate& cert,
                       double tol_monitor, std::optional<double> t_stop)
{
    if (!cert.criterion || !cert.T_pred)
        throw DomainError("monitor requires a certificate whose criterion holds");
    MonitorVerdict out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    const double t_end = 0.99 * *cert.T_pred;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& snap = series.snapshots[k];
        if (snap.t >= t_end)
            break;
        if (k > 0) {
            if (!snap.regularity.regular)
                break;
            if (t_stop && snap.t >= *t_stop)
                break;
        }
        const double H = h_functional(f, snap.prim.v, series.grid);
        const double bound = riccati_lower_bound(cert, snap.t);
        const bool ok = H >= (1.0 - tol_monitor) * bound;
        out.records.push_back({snap.t, H, bound, ok});
        out.worst_margin = std::min(out.worst_margin, H / bound - (1.0 - tol_monitor));
        if (!ok)
            out.violation_times.push_back(snap.t);
    }
    if (out.records.empty())
        out.worst_margin = 0.0;
    return out;
}

} // namespace rep
