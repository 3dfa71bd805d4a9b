#include "rep/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "toml.hpp"

namespace rep {

double InitialData::rho0(double r) const
{
    if (r < 0.0 || r > R)
        return 0.0;
    if (kind == "ball") {
        const double x = r / R;
        return A * std::pow(std::max(1.0 - x * x, 0.0), m);
    }
    if (table_r.empty() || r > table_r.back())
        return 0.0;
    if (r <= table_r.front())
        return table_rho.front();
    auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
    const auto j = static_cast<std::size_t>(it - table_r.begin());
    if (j >= table_r.size())
        return table_rho.back();
    const double w = (r - table_r[j - 1]) / (table_r[j] - table_r[j - 1]);
    return table_rho[j - 1] + w * (table_rho[j] - table_rho[j - 1]);
}

double InitialData::v0(double r) const
{
    if (rho0(r) == 0.0)
        return 0.0;
    if (kind == "ball") {
        const double x = r / R;
        return V * x * std::pow(std::max(1.0 - x * x, 0.0), m);
    }
    if (r <= table_r.front())
        return table_v.front();
    auto it = std::upper_bound(table_r.begin(), table_r.end(), r);
    const auto j = static_cast<std::size_t>(it - table_r.begin());
    if (j >= table_r.size())
        return table_v.back();
    const double w = (r - table_r[j - 1]) / (table_r[j] - table_r[j - 1]);
    return table_v[j - 1] + w * (table_v[j] - table_v[j - 1]);
}

PrimitiveState InitialData::sample(const RadialGrid& grid) const
{
    PrimitiveState prim = vacuum_primitive(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid.center(i);
        prim.rho[i] = rho0(r);
        prim.v[i] = v0(r);
    }
    return prim;
}

double InitialData::max_rho0() const
{
    if (kind == "ball")
        return A;
    return table_rho.empty() ? 0.0 : *std::max_element(table_rho.begin(), table_rho.end());
}

TestingFunction TestingFunctionSpec::build() const
{
    if (kind == "power")
        return TestingFunction::power(k);
    return TestingFunction::sine(r_cut);
}

namespace {

const std::map<std::string, std::set<std::string>, std::less<>> kSchema = {
    {"physics", {"c", "gamma", "a", "e0"}},
    {"grid", {"n_cells", "r_max", "R"}},
    {"initial_data", {"kind", "A", "V", "m", "r", "rho", "v"}},
    {"testing_function", {"kind", "k", "r_cut"}},
    {"run", {"t_final", "cfl", "output_every", "stop_at_breakdown", "dt_min_factor", "velocity_guard", "max_steps"}},
    {"certificate", {"quad_n", "tol_monitor"}},
    {"verify", {"seed", "paths", "mass_fraction", "tamper_zero_velocity"}},
    {"output", {"profile_every"}},
};

class Reader {
public:
    explicit Reader(const toml::table& root) : root_(root) {}

    const toml::table* section(std::string_view name, bool required) const
    {
        const auto* t = root_[name].as_table();
        if (!t && root_.contains(name))
            throw ConfigError(std::string(name), "must be a table");
        if (!t && required)
            throw ConfigError(std::string(name), "missing required section");
        return t;
    }

    double number(std::string_view sec, std::string_view key, std::optional<double> def = std::nullopt) const
    {
        const auto node = root_[sec][key];
        if (!node) {
            if (def)
                return *def;
            throw ConfigError(path(sec, key), "missing required value");
        }
        if (auto v = node.value<double>(); v && node.is_number())
            return *v;
        throw ConfigError(path(sec, key), "must be a number");
    }

    std::int64_t integer(std::string_view sec, std::string_view key, std::optional<std::int64_t> def = std::nullopt) const
    {
        const auto node = root_[sec][key];
        if (!node) {
            if (def)
                return *def;
            throw ConfigError(path(sec, key), "missing required value");
        }
        if (auto v = node.value<std::int64_t>(); v && node.is_integer())
            return *v;
        throw ConfigError(path(sec, key), "must be an integer");
    }

    bool boolean(std::string_view sec, std::string_view key, bool def) const
    {
        const auto node = root_[sec][key];
        if (!node)
            return def;
        if (auto v = node.value<bool>())
            return *v;
        throw ConfigError(path(sec, key), "must be a boolean");
    }

    std::string string(std::string_view sec, std::string_view key, std::optional<std::string> def = std::nullopt) const
    {
        const auto node = root_[sec][key];
        if (!node) {
            if (def)
                return *def;
            throw ConfigError(path(sec, key), "missing required value");
        }
        if (auto v = node.value<std::string>())
            return *v;
        throw ConfigError(path(sec, key), "must be a string");
    }

    std::vector<double> numbers(std::string_view sec, std::string_view key) const
    {
        const auto* arr = root_[sec][key].as_array();
        if (!arr)
            throw ConfigError(path(sec, key), "missing array of numbers");
        std::vector<double> out;
        for (const auto& el : *arr) {
            auto v = el.value<double>();
            if (!v || !el.is_number())
                throw ConfigError(path(sec, key), "array entries must be numbers");
            out.push_back(*v);
        }
        return out;
    }

    static std::string path(std::string_view sec, std::string_view key)
    {
        return std::string(sec) + "." + std::string(key);
    }

private:
    const toml::table& root_;
};

void check_schema(const toml::table& root)
{
    for (const auto& [key, node] : root) {
        const auto sec = kSchema.find(key.str());
        if (sec == kSchema.end())
            throw ConfigError(std::string(key.str()), "unknown section");
        if (const auto* t = node.as_table()) {
            for (const auto& [sub, _] : *t) {
                if (!sec->second.contains(std::string(sub.str())))
                    throw ConfigError(std::string(key.str()) + "." + std::string(sub.str()), "unknown key");
            }
        }
    }
}

template <class Fn>
auto guarded(const std::string& field, Fn&& fn)
{
    try {
        return fn();
    } catch (const DomainError& e) {
        throw ConfigError(field, e.what());
    }
}

RunConfig build(const toml::table& root)
{
    check_schema(root);
    Reader in(root);
    RunConfig cfg;

    in.section("physics", true);
    const double c = in.number("physics", "c");
    const double gamma = in.number("physics", "gamma");
    const double a = in.number("physics", "a");
    const double e0 = in.number("physics", "e0", 0.0);
    if (!(c > 0.0))
        throw ConfigError("physics.c", "speed of light must be positive");
    if (!(gamma > 1.0))
        throw ConfigError("physics.gamma", "adiabatic index must exceed 1");
    if (!(a > 0.0 && a < 1.0))
        throw ConfigError("physics.a", "sound-speed fraction must lie in (0, 1)");
    if (!(e0 >= 0.0))
        throw ConfigError("physics.e0", "vacuum internal energy must be non-negative");
    cfg.params = PhysicalParams(c, gamma, a, e0);

    in.section("grid", true);
    const auto n_cells = in.integer("grid", "n_cells");
    if (n_cells < 3)
        throw ConfigError("grid.n_cells", "need at least 3 cells");
    cfg.n_cells = static_cast<std::size_t>(n_cells);
    cfg.R = in.number("grid", "R");
    cfg.r_max = in.number("grid", "r_max");
    if (!(cfg.R > 0.0))
        throw ConfigError("grid.R", "support radius must be positive");
    if (!(cfg.r_max >= cfg.R))
        throw ConfigError("grid.r_max", "outer radius must be >= R");

    in.section("initial_data", true);
    auto& init = cfg.initial;
    init.R = cfg.R;
    init.kind = in.string("initial_data", "kind");
    if (init.kind == "ball") {
        init.A = in.number("initial_data", "A");
        init.V = in.number("initial_data", "V", 0.0);
        init.m = in.number("initial_data", "m", 2.0);
        if (!(init.A >= 0.0))
            throw ConfigError("initial_data.A", "amplitude must be non-negative");
        if (!(std::abs(init.V) < c))
            throw ConfigError("initial_data.V", "|V| must be below the speed of light (subluminal initial velocity)");
        if (!(init.m >= 1.0))
            throw ConfigError("initial_data.m", "exponent must be >= 1");
    } else if (init.kind == "custom") {
        init.table_r = in.numbers("initial_data", "r");
        init.table_rho = in.numbers("initial_data", "rho");
        init.table_v = in.numbers("initial_data", "v");
        if (init.table_r.size() < 2)
            throw ConfigError("initial_data.r", "need at least two samples");
        if (init.table_rho.size() != init.table_r.size())
            throw ConfigError("initial_data.rho", "length must match initial_data.r");
        if (init.table_v.size() != init.table_r.size())
            throw ConfigError("initial_data.v", "length must match initial_data.r");
        if (init.table_r.front() < 0.0)
            throw ConfigError("initial_data.r", "radii must be non-negative");
        for (std::size_t i = 1; i < init.table_r.size(); ++i) {
            if (!(init.table_r[i] > init.table_r[i - 1]))
                throw ConfigError("initial_data.r", "radii must be strictly increasing");
        }
        if (init.table_r.back() > cfg.R)
            throw ConfigError("initial_data.r", "samples must lie inside the support [0, R]");
        for (double rho : init.table_rho) {
            if (!(rho >= 0.0))
                throw ConfigError("initial_data.rho", "densities must be non-negative");
        }
        for (double v : init.table_v) {
            if (!(std::abs(v) < c))
                throw ConfigError("initial_data.v", "|v| must be below the speed of light (subluminal initial velocity)");
        }
    } else {
        throw ConfigError("initial_data.kind", "expected \"ball\" or \"custom\", got \"" + init.kind + "\"");
    }
    if (!subcritical(init.max_rho0(), cfg.params)) {
        cfg.warnings.push_back("initial density peak has p'(rho) = " +
                               std::to_string(pressure_derivative(init.max_rho0(), cfg.params)) +
                               " >= a c^2; certification will refuse these data");
    }

    auto& tf = cfg.testing;
    tf.kind = in.string("testing_function", "kind", std::string("power"));
    if (tf.kind == "power") {
        const auto k = in.integer("testing_function", "k", 1);
        if (k < 1 || k > 3)
            throw ConfigError("testing_function.k", "built-in powers are k = 1, 2, 3");
        tf.k = static_cast<int>(k);
    } else if (tf.kind == "sine") {
        tf.r_cut = in.number("testing_function", "r_cut", cfg.R);
        if (!(tf.r_cut > cfg.R))
            throw ConfigError("testing_function.r_cut", "must exceed R so that f' > 0 on [0, R]");
    } else {
        throw ConfigError("testing_function.kind", "expected \"power\" or \"sine\", got \"" + tf.kind + "\"");
    }

    auto& s = cfg.solver;
    s.t_final = in.number("run", "t_final");
    if (!(s.t_final > 0.0))
        throw ConfigError("run.t_final", "must be positive");
    s.cfl = in.number("run", "cfl", kDefaultCfl);
    if (!(s.cfl > 0.0 && s.cfl < 1.0))
        throw ConfigError("run.cfl", "must lie in (0, 1)");
    const auto every = in.integer("run", "output_every", 1);
    if (every < 1)
        throw ConfigError("run.output_every", "must be >= 1");
    s.output_every = static_cast<std::size_t>(every);
    s.stop_at_breakdown = in.boolean("run", "stop_at_breakdown", true);
    s.dt_min_factor = in.number("run", "dt_min_factor", 1e-12);
    if (!(s.dt_min_factor > 0.0 && s.dt_min_factor < 1.0))
        throw ConfigError("run.dt_min_factor", "must lie in (0, 1)");
    s.velocity_guard = in.number("run", "velocity_guard", 1e-9);
    if (!(s.velocity_guard > 0.0 && s.velocity_guard < 1.0))
        throw ConfigError("run.velocity_guard", "must lie in (0, 1)");
    const auto max_steps = in.integer("run", "max_steps", 10'000'000);
    if (max_steps < 1)
        throw ConfigError("run.max_steps", "must be >= 1");
    s.max_steps = static_cast<std::size_t>(max_steps);

    const auto quad_n = in.integer("certificate", "quad_n", kDefaultQuadN);
    if (quad_n < 2 || quad_n > 100'000'000)
        throw ConfigError("certificate.quad_n", "must lie in [2, 1e8]");
    cfg.quad_n = static_cast<int>(quad_n);
    cfg.tol_monitor = in.number("certificate", "tol_monitor", kDefaultTolMonitor);
    if (!(cfg.tol_monitor >= 0.0 && cfg.tol_monitor < 1.0))
        throw ConfigError("certificate.tol_monitor", "must lie in [0, 1)");

    const auto seed = in.integer("verify", "seed", 1);
    if (seed < 0)
        throw ConfigError("verify.seed", "must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    const auto paths = in.integer("verify", "paths", 8);
    if (paths < 0)
        throw ConfigError("verify.paths", "must be non-negative");
    cfg.paths = static_cast<std::size_t>(paths);
    cfg.mass_fraction = in.number("verify", "mass_fraction", kDefaultMassFraction);
    if (!(cfg.mass_fraction > 0.0 && cfg.mass_fraction < 1.0))
        throw ConfigError("verify.mass_fraction", "must lie in (0, 1)");
    cfg.tamper_zero_velocity = in.boolean("verify", "tamper_zero_velocity", false);

    const auto profile_every = in.integer("output", "profile_every", 0);
    if (profile_every < 0)
        throw ConfigError("output.profile_every", "must be non-negative");
    cfg.profile_every = static_cast<std::size_t>(profile_every);

    guarded("grid", [&] { return cfg.grid(); });
    return cfg;
}

} // namespace

RunConfig parse_config_string(std::string_view toml_text)
{
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError("<toml>", msg.str());
    }
    return build(root);
}

RunConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream file(path);
    if (!file)
        throw ConfigError(path.string(), "cannot open configuration file");
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config_string(text.str());
}

} // namespace rep
