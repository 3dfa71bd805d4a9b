#include "rep/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>

#include "rep/characteristics.hpp"
#include "rep/output.hpp"

namespace rep {

namespace {

std::ostream& log_stream(const CommandContext& ctx)
{
    static std::ostream null(nullptr);
    if (ctx.quiet || ctx.log == nullptr)
        return null;
    return *ctx.log;
}

std::ostream& err_stream(const CommandContext& ctx)
{
    return ctx.err ? *ctx.err : std::cerr;
}

void report_warnings(const RunConfig& config, const CommandContext& ctx)
{
    for (const auto& w : config.warnings)
        err_stream(ctx) << "warning: " << w << '\n';
}

BlowupCertificate make_certificate(const RunConfig& config, const TestingFunction& f)
{
    const auto grid = config.grid();
    const auto prim0 = config.initial_state();
    const auto& init = config.initial;
    return certify(f, [&init](double r) { return init.v0(r); }, prim0, grid, config.params, config.quad_n);
}

struct Simulation {
    TestingFunction f;
    std::optional<BlowupCertificate> cert;
    RunResult result;
    SeriesTable table;
};

std::string snapshot_name(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%05zu.csv", k);
    return buf;
}

Simulation simulate_and_write(const RunConfig& config, const CommandContext& ctx)
{
    auto& log = log_stream(ctx);
    auto f = config.testing.build();
    f.validate(config.R);

    std::optional<BlowupCertificate> cert;
    try {
        cert = make_certificate(config, f);
    } catch (const HypothesisViolation& e) {
        err_stream(ctx) << "warning: " << e.what() << "; no Riccati bound\n";
    }

    const auto grid = config.grid();
    auto result = run(config.initial_state(), grid, config.params, config.solver);
    const auto& series = result.series;
    log << "simulated " << series.dt_history.size() << " steps to t = " << format_number(series.times.back())
        << ", " << series.size() << " snapshots\n";
    if (result.breakdown.event) {
        const auto& ev = *result.breakdown.event;
        log << "breakdown (" << to_string(ev.cause) << ") at t = " << format_number(ev.t) << ", cell " << ev.cell
            << '\n';
    }

    auto table = tabulate(series, f, cert, config.mass_fraction);
    std::filesystem::create_directories(ctx.out_dir);
    write_series_csv(ctx.out_dir / "series.csv", table);

    const auto profiles = ctx.out_dir / "profiles";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const bool edge = k == 0 || k + 1 == series.size();
        const bool cadence = config.profile_every > 0 && k % config.profile_every == 0;
        if (edge || cadence)
            write_profile_csv(profiles / snapshot_name(k), series.snapshots[k], grid);
    }
    write_json(ctx.out_dir / "breakdown.json", breakdown_json(result.breakdown));

    std::string warning;
    emit_plots(table, series, ctx.out_dir, warning);
    if (!warning.empty())
        err_stream(ctx) << "warning: " << warning << '\n';

    return {std::move(f), std::move(cert), std::move(result), std::move(table)};
}

struct Property {
    std::string name;
    bool passed = true;
    double worst_margin = 0.0; ///< non-negative iff the property holds
    std::string detail;
};

Json property_json(const Property& p)
{
    Json j;
    j["name"] = p.name;
    j["passed"] = p.passed;
    j["worst_margin"] = std::isfinite(p.worst_margin) ? Json(p.worst_margin) : Json(nullptr);
    j["detail"] = p.detail;
    return j;
}

// Snapshots that precede the breakdown and still carry the regularity flag.
std::size_t regular_prefix(const SimulationSeries& series, const BreakdownReport& report)
{
    std::size_t n = 0;
    while (n < series.size()) {
        const auto& snap = series.snapshots[n];
        if (!snap.regularity.regular || (report.event && snap.t >= report.event->t))
            break;
        ++n;
    }
    return n;
}

Property check_positivity(const SimulationSeries& series)
{
    Property p;
    p.name = "positivity";
    double min_D = std::numeric_limits<double>::infinity();
    for (const auto& rec : series.steps)
        min_D = std::min(min_D, rec.min_D);
    p.worst_margin = min_D;
    p.passed = min_D >= 0.0;
    p.detail = "min D over " + std::to_string(series.steps.size()) + " recorded states";
    return p;
}

Property check_conservation(const SimulationSeries& series)
{
    Property p;
    p.name = "conservation";
    const double q0 = series.steps.front().total_charge;
    const double scale = std::abs(q0) > 0.0 ? std::abs(q0) : 1.0;
    double drift = 0.0;
    for (const auto& rec : series.steps)
        drift = std::max(drift, std::abs(rec.total_charge - q0) / scale);
    const double nsteps = static_cast<double>(series.dt_history.size());
    const double budget = 1e-8 * std::max(1.0, nsteps / 1000.0);
    p.worst_margin = budget - drift;
    p.passed = drift <= budget;
    p.detail = "relative drift " + format_number(drift) + ", budget " + format_number(budget);
    return p;
}

Property check_support(const SimulationSeries& series, std::size_t n_regular, double R, double mass_fraction)
{
    Property p;
    p.name = "support";
    const double limit = R + 2.0 * series.grid.dr();
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_regular; ++k)
        worst = std::min(worst, limit - support_radius(series.snapshots[k].cons.D, series.grid, mass_fraction));
    p.passed = !(worst < 0.0);
    p.worst_margin = n_regular ? worst : 0.0;
    p.detail = std::to_string(n_regular) + " regular snapshots checked against R + 2 dr";
    return p;
}

Property check_monitor(const SimulationSeries& series, const TestingFunction& f,
                       const std::optional<BlowupCertificate>& cert, const RunConfig& config,
                       const BreakdownReport& report)
{
    Property p;
    p.name = "monitor";
    if (!cert || !cert->criterion) {
        p.detail = "criterion false, nothing to monitor";
        return p;
    }
    std::optional<double> t_stop;
    if (report.event)
        t_stop = report.event->t;
    const auto verdict = monitor(series, f, *cert, config.tol_monitor, t_stop);
    p.passed = verdict.passed();
    p.worst_margin = verdict.worst_margin;
    p.detail = std::to_string(verdict.records.size()) + " snapshots monitored, " +
               std::to_string(verdict.violation_times.size()) + " violations";
    return p;
}

Property check_blowup(const std::optional<BlowupCertificate>& cert, const RunConfig& config,
                      const BreakdownReport& report)
{
    Property p;
    p.name = "blowup_bracket";
    if (!cert || !cert->criterion) {
        p.detail = "criterion false, no predicted time";
        return p;
    }
    const double limit = 1.5 * *cert->T_pred;
    if (report.event) {
        p.worst_margin = limit - report.event->t;
        p.passed = report.event->t <= limit;
        p.detail = "breakdown at t = " + format_number(report.event->t) + ", limit 1.5 T_pred = " +
                   format_number(limit);
    } else if (config.solver.t_final < limit) {
        p.worst_margin = limit - config.solver.t_final;
        p.detail = "no breakdown before t_final = " + format_number(config.solver.t_final) +
                   ", which ends before 1.5 T_pred";
    } else {
        p.passed = false;
        p.worst_margin = -std::numeric_limits<double>::infinity();
        p.detail = "no breakdown up to t_final = " + format_number(config.solver.t_final);
    }
    return p;
}

Property check_subluminal(const SimulationSeries& series)
{
    Property p;
    p.name = "subluminality";
    double vmax = 0.0;
    for (const auto& rec : series.steps)
        vmax = std::max(vmax, rec.max_abs_v);
    p.worst_margin = series.params.c() - vmax;
    p.passed = vmax < series.params.c();
    p.detail = "max |v| = " + format_number(vmax);
    return p;
}

SimulationSeries truncate(const SimulationSeries& series, std::size_t n)
{
    SimulationSeries out(series.grid, series.params);
    for (std::size_t k = 0; k < n; ++k)
        out.push(series.snapshots[k]);
    return out;
}

// Paths from inside the initial support must carry positive transported density; paths from
// the vacuum region beyond R + 2 dr must stay put to within 2 dr.
Property check_characteristics(const SimulationSeries& regular, const RunConfig& config)
{
    Property p;
    p.name = "characteristics";
    if (regular.size() == 0 || config.paths == 0) {
        p.detail = "no regular snapshots or no paths requested";
        return p;
    }
    const auto& grid = regular.grid;
    const double dr = grid.dr();
    const double outer = config.R + 2.0 * dr;
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double worst = std::numeric_limits<double>::infinity();
    std::size_t inside = 0, outside = 0;
    for (std::size_t j = 0; j < config.paths; ++j) {
        const bool in = j % 2 == 0 || !(outer < grid.r_max());
        const double lo = in ? 0.0 : outer;
        const double hi = in ? config.R : grid.r_max();
        double r0 = lo + (hi - lo) * unit(rng);
        r0 = std::clamp(r0, 0.5 * grid.center(0), std::nextafter(grid.r_max(), 0.0));
        const auto path = trace(r0, regular);
        if (in) {
            ++inside;
            if (interpolate_cells(regular.snapshots.front().cons.D, grid, r0, false) <= 0.0)
                continue;
            for (const auto& rec : density_along_path(path, regular))
                worst = std::min(worst, rec.D_predicted);
        } else {
            ++outside;
            for (double r : path.positions)
                worst = std::min(worst, 2.0 * dr - std::abs(r - r0));
            if (path.left_grid)
                worst = std::min(worst, -dr);
        }
    }
    p.passed = !(worst <= 0.0);
    p.worst_margin = std::isfinite(worst) ? worst : 0.0;
    p.detail = std::to_string(inside) + " paths from the support, " + std::to_string(outside) +
               " from the vacuum region";
    if (p.passed && !std::isfinite(worst))
        p.detail += " (no path carried data)";
    return p;
}

} // namespace

int cmd_certify(const RunConfig& config, const CommandContext& ctx)
{
    report_warnings(config, ctx);
    auto f = config.testing.build();
    f.validate(config.R);
    const auto cert = make_certificate(config, f);
    std::filesystem::create_directories(ctx.out_dir);
    write_json(ctx.out_dir / "certificate.json", certificate_json(cert, config));
    auto& log = log_stream(ctx);
    log << "H0 = " << format_number(cert.H0) << ", threshold = " << format_number(cert.threshold)
        << ", criterion " << (cert.criterion ? "true" : "false");
    if (cert.T_pred)
        log << ", T_pred = " << format_number(*cert.T_pred);
    log << '\n';
    return cert.criterion ? kExitOk : kExitNotSatisfied;
}

int cmd_simulate(const RunConfig& config, const CommandContext& ctx)
{
    report_warnings(config, ctx);
    simulate_and_write(config, ctx);
    return kExitOk;
}

int cmd_verify(const RunConfig& config, const CommandContext& ctx)
{
    report_warnings(config, ctx);
    auto sim = simulate_and_write(config, ctx);
    if (sim.cert)
        write_json(ctx.out_dir / "certificate.json", certificate_json(*sim.cert, config));

    auto& series = sim.result.series;
    const auto& report = sim.result.breakdown;
    if (config.tamper_zero_velocity) {
        for (auto& snap : series.snapshots) {
            std::fill(snap.prim.v.begin(), snap.prim.v.end(), 0.0);
            std::fill(snap.cons.S.begin(), snap.cons.S.end(), 0.0);
        }
    }
    const std::size_t n_regular = regular_prefix(series, report);
    const auto regular = truncate(series, n_regular);

    const std::vector<Property> props = {
        check_positivity(series),
        check_conservation(series),
        check_support(series, n_regular, config.R, config.mass_fraction),
        check_monitor(series, sim.f, sim.cert, config, report),
        check_blowup(sim.cert, config, report),
        check_subluminal(series),
        check_characteristics(regular, config),
    };

    bool all = true;
    Json list = Json::array();
    auto& log = log_stream(ctx);
    for (const auto& p : props) {
        all = all && p.passed;
        list.push_back(property_json(p));
        log << (p.passed ? "pass " : "FAIL ") << p.name << ": " << p.detail << '\n';
    }
    Json doc;
    doc["passed"] = all;
    doc["properties"] = list;
    doc["regular_snapshots"] = n_regular;
    doc["tampered"] = config.tamper_zero_velocity;
    doc["breakdown"] = breakdown_json(report);
    write_json(ctx.out_dir / "verdict.json", doc);
    return all ? kExitOk : kExitNotSatisfied;
}

int run_command(std::string_view name, const std::filesystem::path& config_path, const CommandContext& ctx)
{
    auto& err = err_stream(ctx);
    try {
        const auto config = parse_config(config_path);
        if (name == "certify")
            return cmd_certify(config, ctx);
        if (name == "simulate")
            return cmd_simulate(config, ctx);
        if (name == "verify")
            return cmd_verify(config, ctx);
        err << "error: unknown command " << name << '\n';
        return kExitUsage;
    } catch (const HypothesisViolation& e) {
        err << "error: " << e.what() << '\n';
        return kExitHypothesis;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace rep
