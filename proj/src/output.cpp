#include "rep/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rep {

SeriesTable tabulate(const SimulationSeries& series, const TestingFunction& f,
                     const std::optional<BlowupCertificate>& cert, double mass_fraction)
{
    SeriesTable table;
    const auto support = support_radius(series, mass_fraction);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& snap = series.snapshots[k];
        table.t.push_back(snap.t);
        table.H.push_back(h_functional(f, snap.prim.v, series.grid));
        std::optional<double> bound;
        if (cert && cert->criterion && snap.t < *cert->T_pred)
            bound = riccati_lower_bound(*cert, snap.t);
        table.bound.push_back(bound);
        table.max_dv2_dr.push_back(snap.regularity.max_dv2_dr);
        table.max_dpprime_dr.push_back(snap.regularity.max_dpprime_dr);
        table.support.push_back(support[k]);
        table.charge.push_back(total_charge(snap.cons.D, series.grid));
    }
    return table;
}

std::string format_number(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        out << csv_field(fields[i]);
    }
    out << "\r\n";
}

} // namespace

void write_series_csv(const std::filesystem::path& path, const SeriesTable& table)
{
    auto out = open_out(path);
    write_row(out, kSeriesColumns);
    for (std::size_t k = 0; k < table.size(); ++k) {
        write_row(out, {format_number(table.t[k]), format_number(table.H[k]),
                        table.bound[k] ? format_number(*table.bound[k]) : std::string(),
                        format_number(table.max_dv2_dr[k]), format_number(table.max_dpprime_dr[k]),
                        format_number(table.support[k]), format_number(table.charge[k])});
    }
    if (!out)
        throw Error("write failed: " + path.string());
}

void write_profile_csv(const std::filesystem::path& path, const Snapshot& snap, const RadialGrid& grid)
{
    auto out = open_out(path);
    write_row(out, kProfileColumns);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        write_row(out, {format_number(grid.center(i)), format_number(snap.prim.rho[i]), format_number(snap.prim.v[i]),
                        format_number(snap.cons.D[i]), format_number(snap.cons.S[i]),
                        format_number(snap.field.phi_r[i])});
    }
    if (!out)
        throw Error("write failed: " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& doc)
{
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    if (!out)
        throw Error("write failed: " + path.string());
}

Json inputs_json(const RunConfig& config)
{
    Json physics;
    physics["c"] = config.params.c();
    physics["gamma"] = config.params.gamma();
    physics["a"] = config.params.a();
    physics["e0"] = config.params.e0();

    Json grid;
    grid["n_cells"] = config.n_cells;
    grid["r_max"] = config.r_max;
    grid["R"] = config.R;

    Json init;
    init["kind"] = config.initial.kind;
    if (config.initial.kind == "ball") {
        init["A"] = config.initial.A;
        init["V"] = config.initial.V;
        init["m"] = config.initial.m;
    } else {
        init["r"] = config.initial.table_r;
        init["rho"] = config.initial.table_rho;
        init["v"] = config.initial.table_v;
    }

    Json tf;
    tf["kind"] = config.testing.kind;
    if (config.testing.kind == "power")
        tf["k"] = config.testing.k;
    else
        tf["r_cut"] = config.testing.r_cut;

    Json doc;
    doc["physics"] = physics;
    doc["grid"] = grid;
    doc["initial_data"] = init;
    doc["testing_function"] = tf;
    return doc;
}

Json certificate_json(const BlowupCertificate& cert, const RunConfig& config)
{
    Json doc;
    doc["testing_function"] = cert.testing_function;
    doc["R"] = cert.R;
    doc["quad_n"] = cert.quad_n;
    doc["C"] = cert.C;
    doc["B1"] = cert.B1;
    doc["B2"] = cert.B2;
    doc["H0"] = cert.H0;
    doc["threshold"] = cert.threshold;
    doc["criterion"] = cert.criterion;
    doc["T_pred"] = cert.T_pred ? Json(*cert.T_pred) : Json(nullptr);
    Json hyp;
    hyp["max_pprime0"] = cert.max_pprime0;
    hyp["a_c2"] = config.params.a() * config.params.c2();
    hyp["satisfied"] = cert.max_pprime0 < config.params.a() * config.params.c2();
    doc["hypothesis"] = hyp;
    doc["inputs"] = inputs_json(config);
    return doc;
}

Json breakdown_json(const BreakdownReport& report)
{
    Json doc;
    doc["occurred"] = report.occurred();
    if (report.event) {
        doc["t_breakdown"] = report.event->t;
        doc["cause"] = std::string(to_string(report.event->cause));
        doc["cell_index"] = report.event->cell;
        doc["detail"] = report.event->detail;
    }
    return doc;
}

namespace {

// Minimal line chart: one panel, linear axes, legend in the top-left corner.
class SvgChart {
public:
    struct Curve {
        std::string label, color;
        std::vector<double> x, y;
    };

    SvgChart(std::string title, std::string xlabel, std::string ylabel)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

    void add(Curve c)
    {
        if (c.x.size() != c.y.size())
            throw Error("plot curve '" + c.label + "' has mismatched x and y lengths");
        curves_.push_back(std::move(c));
    }

    // Panel placed at (ox, oy) with size (w, h) inside a larger document.
    void render(std::ostream& out, double ox, double oy, double w, double h) const
    {
        const double ml = 70, mr = 20, mt = 30, mb = 45;
        double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
        for (const auto& c : curves_) {
            for (std::size_t i = 0; i < c.x.size(); ++i) {
                if (!std::isfinite(c.y[i]))
                    continue;
                x0 = std::min(x0, c.x[i]);
                x1 = std::max(x1, c.x[i]);
                y0 = std::min(y0, c.y[i]);
                y1 = std::max(y1, c.y[i]);
            }
        }
        if (!(x1 > x0)) {
            x0 = std::isfinite(x0) ? x0 - 0.5 : 0.0;
            x1 = x0 + 1.0;
        }
        if (!(y1 > y0)) {
            const double mid = std::isfinite(y0) ? y0 : 0.0;
            const double pad = mid == 0.0 ? 1.0 : 0.5 * std::abs(mid);
            y0 = mid - pad;
            y1 = mid + pad;
        }
        const double pw = w - ml - mr, ph = h - mt - mb;
        auto px = [&](double x) { return ox + ml + (x - x0) / (x1 - x0) * pw; };
        auto py = [&](double y) { return oy + mt + (1.0 - (y - y0) / (y1 - y0)) * ph; };

        out << "<text x=\"" << ox + w / 2 << "\" y=\"" << oy + 18
            << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(title_) << "</text>\n";
        out << "<rect x=\"" << ox + ml << "\" y=\"" << oy + mt << "\" width=\"" << pw << "\" height=\"" << ph
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 4; ++k) {
            const double fx = x0 + (x1 - x0) * k / 4.0;
            const double fy = y0 + (y1 - y0) * k / 4.0;
            out << "<line x1=\"" << px(fx) << "\" y1=\"" << oy + mt + ph << "\" x2=\"" << px(fx) << "\" y2=\""
                << oy + mt + ph + 5 << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << px(fx) << "\" y=\"" << oy + mt + ph + 18
                << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(fx) << "</text>\n";
            out << "<line x1=\"" << ox + ml - 5 << "\" y1=\"" << py(fy) << "\" x2=\"" << ox + ml << "\" y2=\""
                << py(fy) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << ox + ml - 8 << "\" y=\"" << py(fy) + 3
                << "\" text-anchor=\"end\" font-size=\"10\">" << tick(fy) << "</text>\n";
        }
        out << "<text x=\"" << ox + ml + pw / 2 << "\" y=\"" << oy + h - 8
            << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xlabel_) << "</text>\n";
        out << "<text x=\"" << ox + 14 << "\" y=\"" << oy + mt + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\""
            << " transform=\"rotate(-90 " << ox + 14 << ' ' << oy + mt + ph / 2 << ")\">" << escape(ylabel_)
            << "</text>\n";

        for (std::size_t n = 0; n < curves_.size(); ++n) {
            const auto& c = curves_[n];
            out << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < c.x.size(); ++i) {
                if (std::isfinite(c.y[i]))
                    out << px(c.x[i]) << ',' << py(c.y[i]) << ' ';
            }
            out << "\"/>\n";
            const double ly = oy + mt + 14 + 14 * static_cast<double>(n);
            out << "<line x1=\"" << ox + ml + 8 << "\" y1=\"" << ly << "\" x2=\"" << ox + ml + 28 << "\" y2=\"" << ly
                << "\" stroke=\"" << c.color << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << ox + ml + 32 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << escape(c.label)
                << "</text>\n";
        }
    }

private:
    static std::string tick(double v)
    {
        std::ostringstream s;
        s.precision(3);
        s << v;
        return s.str();
    }

    static std::string escape(const std::string& s)
    {
        std::string out;
        for (char ch : s) {
            switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += ch;
            }
        }
        return out;
    }

    std::string title_, xlabel_, ylabel_;
    std::vector<Curve> curves_;
};

void write_svg(const std::filesystem::path& path, double w, double h,
               const std::vector<std::pair<const SvgChart*, double>>& panels)
{
    auto out = open_out(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 "
        << w << ' ' << h << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    const double ph = h / static_cast<double>(panels.size());
    for (std::size_t k = 0; k < panels.size(); ++k)
        panels[k].first->render(out, 0.0, ph * static_cast<double>(k), w, ph);
    out << "</svg>\n";
}

} // namespace

std::vector<std::filesystem::path> emit_plots(const SeriesTable& table, const SimulationSeries& series,
                                              const std::filesystem::path& out_dir, std::string& warning)
{
    std::vector<std::filesystem::path> written;
    if (table.size() == 0 || series.size() == 0) {
        warning = "empty series, no plots written";
        return written;
    }

    SvgChart hplot("H(t) and Riccati lower bound", "t", "H");
    hplot.add({"H(t)", "#1f77b4", table.t, table.H});
    std::vector<double> bt, by;
    for (std::size_t k = 0; k < table.size(); ++k) {
        if (table.bound[k]) {
            bt.push_back(table.t[k]);
            by.push_back(*table.bound[k]);
        }
    }
    if (!bt.empty())
        hplot.add({"Riccati bound", "#d62728", bt, by});
    const auto hpath = out_dir / "h_vs_bound.svg";
    write_svg(hpath, 640, 400, {{&hplot, 0.0}});
    written.push_back(hpath);

    const auto& snap = series.snapshots.back();
    const auto r = series.grid.centers();
    const std::string when = "t = " + format_number(snap.t);
    SvgChart prho("density, " + when, "r", "rho");
    prho.add({"rho", "#1f77b4", r, snap.prim.rho});
    SvgChart pv("velocity, " + when, "r", "v");
    pv.add({"v", "#2ca02c", r, snap.prim.v});
    SvgChart pphi("electric field, " + when, "r", "phi_r");
    pphi.add({"phi_r", "#9467bd", r, snap.field.phi_r});
    const auto ppath = out_dir / "profiles.svg";
    write_svg(ppath, 640, 900, {{&prho, 0.0}, {&pv, 0.0}, {&pphi, 0.0}});
    written.push_back(ppath);
    return written;
}

} // namespace rep
