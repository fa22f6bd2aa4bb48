#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gmcf/grid.hpp"

namespace gmcf {

/// Flat key-value experiment configuration with dotted keys. Keys are
/// validated against the documented schema; unknown keys are errors.
struct Config {
    std::vector<std::pair<std::string, std::string>> entries;

    bool has(const std::string& key) const;
    /// Throws ConfigError("missing key: <key>") when absent.
    std::string get(const std::string& key) const;
    std::string get_or(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key) const;
    double num_or(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer_or(const std::string& key, int fallback) const;
    std::vector<double> list_or(const std::string& key,
                                const std::vector<double>& fallback) const;

    void set(const std::string& key, const std::string& value);
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

/// Initial-condition closure for torus experiments; fills the winding matrix.
std::function<void(const double*, double*)> torus_preset(
    const std::string& name, int n, int m, double amplitude, double value,
    const std::vector<double>& coeffs, std::vector<int>& winding);

/// Initial profile for equivariant sphere experiments; also reports the
/// boundary kind the preset assumes.
std::function<double(double)> sphere_preset(const std::string& name,
                                            double amplitude,
                                            std::string& boundary_kind);

}  // namespace gmcf
