#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bloch2d/lattice.hpp"

namespace bloch2d {

/// Shortest round-trip decimal form of a double.
inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// FNV-1a 64-bit, used to stamp hopping tables into provenance headers.
inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string fnv1a64_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Hopping table: `# key = value` comment lines, an optional `m1 m2 J`
/// header line, then one `m1 m2 J` row per stored offset.
inline void write_hoppings(std::ostream& out, const HoppingSet& J,
                           const std::vector<std::pair<std::string, std::string>>& comments) {
    for (const auto& [k, v] : comments) out << "# " << k << " = " << v << "\n";
    out << "m1 m2 J\n";
    for (const auto& [m, Jm] : J.entries())
        out << m.m1 << " " << m.m2 << " " << format_full(Jm) << "\n";
}

inline HoppingSet read_hoppings(std::istream& in) {
    std::vector<std::pair<Offset, double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        Offset m;
        double J;
        if (!(ss >> m.m1 >> m.m2 >> J)) {
            // tolerate a single header line
            std::istringstream hs(line);
            std::string a, b, c;
            if (hs >> a >> b >> c && a == "m1" && b == "m2" && c == "J") continue;
            throw std::runtime_error("hopping table: parse error at line " +
                                     std::to_string(lineno));
        }
        std::string rest;
        if (ss >> rest)
            throw std::runtime_error("hopping table: trailing junk at line " +
                                     std::to_string(lineno));
        rows.emplace_back(m, J);
    }
    return HoppingSet::from_rows(rows);
}

inline HoppingSet read_hoppings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hopping table: " + path);
    return read_hoppings(in);
}

inline std::string hoppings_to_string(
    const HoppingSet& J,
    const std::vector<std::pair<std::string, std::string>>& comments) {
    std::ostringstream ss;
    write_hoppings(ss, J, comments);
    return ss.str();
}

/// J1 scale of a model: the amplitude at offset (1,0). Forces given in units
/// of J1 are converted to E_r with this value.
inline double j1_scale(const HoppingSet& J) {
    if (!J.contains({1, 0}))
        throw std::invalid_argument(
            "hopping set has no (1,0) entry; cannot express forces in units of J1");
    return J.at({1, 0});
}

}  // namespace bloch2d
