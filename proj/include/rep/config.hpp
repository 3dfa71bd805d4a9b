#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rep/certificate.hpp"
#include "rep/characteristics.hpp"
#include "rep/model.hpp"
#include "rep/solver.hpp"

namespace rep {

/**
 * Compactly supported initial data on [0, R].
 *
 * "ball":   rho0 = A (1 - (r/R)^2)_+^m,  v0 = V (r/R) (1 - (r/R)^2)_+^m
 * "custom": linear interpolation of tabulated (r, rho0, v0), zero beyond the last sample
 *
 * v0 is forced to zero wherever rho0 vanishes.
 */
struct InitialData {
    std::string kind = "ball";
    double R = 1.0;
    double A = 0.0;
    double V = 0.0;
    double m = 2.0;
    std::vector<double> table_r, table_rho, table_v;

    double rho0(double r) const;
    double v0(double r) const;
    PrimitiveState sample(const RadialGrid& grid) const;
    double max_rho0() const;
};

struct TestingFunctionSpec {
    std::string kind = "power";
    int k = 1;
    double r_cut = 0.0;

    TestingFunction build() const;
};

struct RunConfig {
    PhysicalParams params{1.0, 2.0, 0.5, 0.0};
    std::size_t n_cells = 0;
    double r_max = 0.0;
    double R = 0.0;
    InitialData initial;
    TestingFunctionSpec testing;
    SolverOptions solver;
    int quad_n = kDefaultQuadN;
    double tol_monitor = kDefaultTolMonitor;
    double mass_fraction = kDefaultMassFraction;
    std::uint64_t seed = 1;
    std::size_t paths = 8;
    std::size_t profile_every = 0; ///< snapshot profile CSV cadence in snapshots; 0 = first and last
    bool tamper_zero_velocity = false;
    std::vector<std::string> warnings;

    RadialGrid grid() const { return RadialGrid(n_cells, r_max, R); }
    PrimitiveState initial_state() const { return initial.sample(grid()); }
};

/// Parses and validates a TOML configuration; throws ConfigError naming the offending key.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_string(std::string_view toml_text);

} // namespace rep
