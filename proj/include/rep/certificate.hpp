#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rep/model.hpp"
#include "rep/solver.hpp"

namespace rep {

inline constexpr int kDefaultQuadN = 10'000;
inline constexpr double kDefaultTolMonitor = 0.05;

/// Strictly increasing C^1 weight f with f(0) = 0.
class TestingFunction {
public:
    using Fn = std::function<double(double)>;

    TestingFunction(Fn f, Fn df, std::string label);

    /// f(r) = r^k
    static TestingFunction power(int k);
    /// f(r) = sin(pi r / (2 r_cut)); usable on [0, R] for r_cut > R.
    static TestingFunction sine(double r_cut);

    double operator()(double r) const { return f_(r); }
    double deriv(double r) const { return df_(r); }
    const std::string& label() const { return label_; }

    /// Samples f' > 0 on (0, R] at `samples` points; throws InvalidTestingFunction.
    void validate(double R, int samples = 10'000) const;

private:
    Fn f_, df_;
    std::string label_;
};

/// Composite Simpson on [a, b]; n is rounded up to an even panel count.
double simpson(const std::function<double(double)>& g, double a, double b, int n);

double constant_C_closed_form(const PhysicalParams& params);
/// c^2 / (2 (1 - a)) + 5 c^2 / ((gamma - 1)(1 - a)^2)
double constant_C_decomposed(const PhysicalParams& params);
/// Closed form, after checking it against the decomposition to 1e-12 relative.
double constant_C(const PhysicalParams& params);

/// B1 = int_0^R f^2 / f' dr
double b1(const TestingFunction& f, double R, int quad_n = kDefaultQuadN);
/// B2 = C int_0^R f dr
double b2(const TestingFunction& f, double R, double C, int quad_n = kDefaultQuadN);

/// H = int_0^R f v dr by the midpoint rule over cells with r_i <= R.
double h_functional(const TestingFunction& f, std::span<const double> v, const RadialGrid& grid);

struct BlowupCertificate {
    std::string testing_function;
    double R = 0.0;
    int quad_n = kDefaultQuadN;
    double C = 0.0;
    double B1 = 0.0;
    double B2 = 0.0;
    double H0 = 0.0;
    double threshold = 0.0;
    bool criterion = false;
    std::optional<double> T_pred;
    double max_pprime0 = 0.0; ///< max p'(rho0) over the initial cells, for the hypothesis echo
};

/**
 * Assemble the certificate. H0 integrates f v0 with Simpson at quad_n panels; the cell
 * overload reconstructs v0 linearly from the cell centres (odd through r = 0). Throws
 * HypothesisViolation unless p'(rho0) < a c^2 in every cell.
 */
BlowupCertificate certify(const TestingFunction& f, const std::function<double(double)>& v0,
                          const PrimitiveState& prim0, const RadialGrid& grid, const PhysicalParams& params,
                          int quad_n = kDefaultQuadN);
BlowupCertificate certify(const TestingFunction& f, const PrimitiveState& prim0, const RadialGrid& grid,
                          const PhysicalParams& params, int quad_n = kDefaultQuadN);

/// Linear interpolant of cell-centred v on [0, R], odd through the origin.
std::function<double(double)> velocity_interpolant(std::span<const double> v, const RadialGrid& grid);

/// (1/H0 - (H0^2 - 2 B1 B2) / (2 B1 H0^2) t)^-1 for 0 <= t < T_pred.
double riccati_lower_bound(const BlowupCertificate& cert, double t);

struct MonitorRecord {
    double t;
    double H;
    double bound;
    bool passed;
};

struct MonitorVerdict {
    std::vector<MonitorRecord> records;
    std::vector<double> violation_times;
    double worst_margin = 0.0; ///< min over records of H / bound - (1 - tol)
    bool passed() const { return violation_times.empty(); }
};

/**
 * Check H(t) >= (1 - tol) * riccati_lower_bound(t) along a run. The t = 0 snapshot anchors the
 * comparison and is always checked; later snapshots are checked while the regularity flag has
 * stayed true, stopping at `t_stop` (breakdown) or at 0.99 T_pred.
 */
MonitorVerdict monitor(const SimulationSeries& series, const TestingFunction& f, const BlowupCertificate& cert,
                       double tol_monitor = kDefaultTolMonitor, std::optional<double> t_stop = std::nullopt);

} // namespace rep
