#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rep/certificate.hpp"
#include "rep/config.hpp"
#include "rep/solver.hpp"

namespace rep {

using Json = nlohmann::ordered_json;

/// Column order of series.csv.
inline const std::vector<std::string> kSeriesColumns = {
    "t", "H", "riccati_bound", "max_dv2_dr", "max_dpprime_dr", "support_radius", "total_charge"};
/// Column order of the snapshot profile files.
inline const std::vector<std::string> kProfileColumns = {"r", "rho", "v", "D", "S", "phi_r"};

/// One row per snapshot; riccati_bound is absent when there is no certificate, its criterion
/// fails, or t >= T_pred.
struct SeriesTable {
    std::vector<double> t, H;
    std::vector<std::optional<double>> bound;
    std::vector<double> max_dv2_dr, max_dpprime_dr, support, charge;

    std::size_t size() const { return t.size(); }
};

SeriesTable tabulate(const SimulationSeries& series, const TestingFunction& f,
                     const std::optional<BlowupCertificate>& cert, double mass_fraction);

/// Shortest representation that round-trips exactly.
std::string format_number(double x);
/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

void write_series_csv(const std::filesystem::path& path, const SeriesTable& table);
void write_profile_csv(const std::filesystem::path& path, const Snapshot& snap, const RadialGrid& grid);
void write_json(const std::filesystem::path& path, const Json& doc);

Json certificate_json(const BlowupCertificate& cert, const RunConfig& config);
Json breakdown_json(const BreakdownReport& report);
Json inputs_json(const RunConfig& config);

/**
 * h_vs_bound.svg (H(t) with the Riccati bound overlaid when present) and profiles.svg
 * (rho, v, phi_r of the last snapshot). Returns the written files; an empty series writes
 * nothing and sets `warning`.
 */
std::vector<std::filesystem::path> emit_plots(const SeriesTable& table, const SimulationSeries& series,
                                              const std::filesystem::path& out_dir, std::string& warning);

} // namespace rep
