#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bloch2d/geometry.hpp"

namespace bloch2d {

struct ConfigError : std::runtime_error {
    int line = 0;              // 0 when not tied to a line
    std::string field;

    ConfigError(int line_, std::string field_, const std::string& what_)
        : std::runtime_error(field_.empty() ? what_ : field_ + ": " + what_),
          line(line_), field(std::move(field_)) {}
};

/// Run configuration, parsed from a line-based `section.key = value` file.
/// Exactly one of the potential block or a hopping-table file supplies the
/// model.
struct RunConfig {
    // potential.*
    std::optional<double> V0;
    int Nc = 7;
    int M = 32;
    // hoppings.*
    std::optional<std::string> hoppings_file;
    // packet.*
    int L = 121;
    double sigma = 20.0;
    WaveVector k0{0.05, 0.03};
    // force.* (F in units of J1 of the active model)
    Vec2 F_over_J1{0.5, -0.5};
    std::optional<std::pair<int, int>> qr;
    int qmax = 12;
    // evolution.* (times in units of 1/J1 to match the force convention)
    double dt = 0.0;        // 1/E_r; 0 = automatic stability bound
    double t_end_J1 = 200.0;
    double stride_J1 = 0.5;
    int boundary_band = 2;
    double boundary_tol = 1e-6;
    // outputs.*
    std::string out_directory = ".";
    bool plot = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <typename T>
T parse_one(const std::string& value, int line, const std::string& field) {
    std::istringstream ss(value);
    T v;
    std::string rest;
    if (!(ss >> v) || (ss >> rest))
        throw ConfigError(line, field, "cannot parse value '" + value + "'");
    return v;
}

template <typename T>
std::pair<T, T> parse_two(const std::string& value, int line, const std::string& field) {
    std::istringstream ss(value);
    T a, b;
    std::string rest;
    if (!(ss >> a >> b) || (ss >> rest))
        throw ConfigError(line, field, "expected two values, got '" + value + "'");
    return {a, b};
}

inline bool parse_bool(const std::string& value, int line, const std::string& field) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ConfigError(line, field, "expected a boolean, got '" + value + "'");
}

}  // namespace detail

/// Parse without cross-field validation (see validate_config). Unknown keys
/// are rejected with their line number, as a typo guard.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "", "expected 'section.key = value' at line " +
                                              std::to_string(lineno));
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        using detail::parse_one;
        using detail::parse_two;

        if (key == "potential.V0") cfg.V0 = parse_one<double>(value, lineno, key);
        else if (key == "potential.Nc") cfg.Nc = parse_one<int>(value, lineno, key);
        else if (key == "potential.M") cfg.M = parse_one<int>(value, lineno, key);
        else if (key == "hoppings.file") cfg.hoppings_file = value;
        else if (key == "packet.L") cfg.L = parse_one<int>(value, lineno, key);
        else if (key == "packet.sigma") cfg.sigma = parse_one<double>(value, lineno, key);
        else if (key == "packet.k0") {
            const auto [a, b] = parse_two<double>(value, lineno, key);
            cfg.k0 = {a, b};
        } else if (key == "force.F") {
            const auto [a, b] = parse_two<double>(value, lineno, key);
            cfg.F_over_J1 = {a, b};
        } else if (key == "force.qr") {
            cfg.qr = parse_two<int>(value, lineno, key);
        } else if (key == "force.qmax") cfg.qmax = parse_one<int>(value, lineno, key);
        else if (key == "evolution.dt") cfg.dt = parse_one<double>(value, lineno, key);
        else if (key == "evolution.t_end") cfg.t_end_J1 = parse_one<double>(value, lineno, key);
        else if (key == "evolution.stride") cfg.stride_J1 = parse_one<double>(value, lineno, key);
        else if (key == "evolution.boundary_band")
            cfg.boundary_band = parse_one<int>(value, lineno, key);
        else if (key == "evolution.boundary_tol")
            cfg.boundary_tol = parse_one<double>(value, lineno, key);
        else if (key == "outputs.directory") cfg.out_directory = value;
        else if (key == "outputs.plot") cfg.plot = detail::parse_bool(value, lineno, key);
        else
            throw ConfigError(lineno, key, "unknown key at line " + std::to_string(lineno));
    }
    return cfg;
}

/// Range checks plus the one-model-source rule.
inline void validate_config(const RunConfig& cfg) {
    if (cfg.V0 && cfg.hoppings_file)
        throw ConfigError(0, "", "give either potential.V0 or hoppings.file, not both");
    if (!cfg.V0 && !cfg.hoppings_file)
        throw ConfigError(0, "", "no model source: set potential.V0 or hoppings.file");
    if (cfg.V0 && *cfg.V0 > 0.0)
        throw ConfigError(0, "potential.V0", "must be <= 0 (red detuned)");
    if (cfg.Nc < 3) throw ConfigError(0, "potential.Nc", "must be >= 3");
    if (cfg.M < 8) throw ConfigError(0, "potential.M", "must be >= 8");
    if (cfg.L < 3 || cfg.L % 2 == 0)
        throw ConfigError(0, "packet.L", "must be odd and >= 3");
    if (cfg.sigma <= 0.0) throw ConfigError(0, "packet.sigma", "must be > 0");
    if (!(cfg.F_over_J1.x != 0.0 || cfg.F_over_J1.y != 0.0) &&
        cfg.qr)
        throw ConfigError(0, "force.qr", "meaningless for zero force");
    if (cfg.qmax < 1) throw ConfigError(0, "force.qmax", "must be >= 1");
    if (cfg.dt < 0.0) throw ConfigError(0, "evolution.dt", "must be >= 0");
    if (cfg.t_end_J1 < 0.0) throw ConfigError(0, "evolution.t_end", "must be >= 0");
    if (cfg.stride_J1 <= 0.0) throw ConfigError(0, "evolution.stride", "must be > 0");
    if (cfg.boundary_band < 1) throw ConfigError(0, "evolution.boundary_band", "must be >= 1");
    if (cfg.boundary_tol <= 0.0) throw ConfigError(0, "evolution.boundary_tol", "must be > 0");
}

}  // namespace bloch2d
