#include "gmcf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace gmcf {

namespace {

const std::set<std::string> kKnownKeys = {
    "experiment.kind", "grid.n", "grid.m", "grid.resolution",
    "initial.preset", "initial.amplitude", "initial.value", "initial.coeffs",
    "initial.winding", "sphere.boundary",
    "solver.t_end", "solver.sigma", "solver.output_every", "solver.threads",
    "solver.checkpoint_every",
    "verify.levels", "verify.samples", "verify.seed", "verify.suites",
    "verify.mutation",
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

bool Config::has(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return true;
    return false;
}

std::string Config::get(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    throw ConfigError("missing key: " + key);
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get(key) : fallback;
}

double Config::num(const std::string& key) const {
    try {
        return std::stod(get(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("invalid number for key: " + key);
    }
}

double Config::num_or(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
}

int Config::integer(const std::string& key) const {
    try {
        return std::stoi(get(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("invalid integer for key: " + key);
    }
}

int Config::integer_or(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::vector<double> Config::list_or(const std::string& key,
                                    const std::vector<double>& fallback) const {
    return has(key) ? parse_list(get(key)) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries)
        if (k == key) {
            v = value;
            return;
        }
    entries.emplace_back(key, value);
}

Config parse_config_text(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!kKnownKeys.count(key)) throw ConfigError("unknown key: " + key);
        cfg.set(key, value);
    }
    return cfg;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::function<void(const double*, double*)> torus_preset(
    const std::string& name, int n, int m, double amplitude, double value,
    const std::vector<double>& coeffs, std::vector<int>& winding) {
    constexpr double tau = 2.0 * std::numbers::pi;
    // A pre-sized winding matrix is honored (affine uses it as the linear
    // part); otherwise the preset fills its default.
    const bool winding_given = static_cast<int>(winding.size()) == m * n;
    if (!winding_given) winding.assign(m * n, 0);

    if (name == "constant") {
        return [m, value](const double*, double* f) {
            for (int c = 0; c < m; ++c) f[c] = value;
        };
    }
    if (name == "affine") {
        if (!winding_given)
            for (int c = 0; c < std::min(n, m); ++c) winding[c * n + c] = 1;
        std::vector<int> L = winding;
        return [n, m, value, L](const double* x, double* f) {
            for (int c = 0; c < m; ++c) {
                double s = value;
                for (int a = 0; a < n; ++a) s += L[c * n + a] * x[a];
                f[c] = s;
            }
        };
    }
    if (name == "small_sine") {
        return [n, m, amplitude](const double* x, double* f) {
            for (int c = 0; c < m; ++c) {
                const int a = c % n, b = (c + 1) % n;
                f[c] = (n == 1) ? amplitude * std::sin(tau * x[0])
                                : amplitude * std::sin(tau * x[a]) * std::cos(tau * x[b]);
            }
        };
    }
    if (name == "custom_trig") {
        if (coeffs.empty())
            throw ConfigError("custom_trig preset needs initial.coeffs");
        return [n, m, coeffs](const double* x, double* f) {
            for (int c = 0; c < m; ++c) {
                double s = 0.0;
                for (std::size_t k = 0; k < coeffs.size(); ++k)
                    s += coeffs[k] * std::sin(tau * (k + 1) * x[c % n]);
                f[c] = s;
            }
        };
    }
    throw ConfigError("unknown torus preset: " + name);
}

std::function<double(double)> sphere_preset(const std::string& name,
                                            double amplitude,
                                            std::string& boundary_kind) {
    constexpr double pi = std::numbers::pi;
    if (name == "constant") {
        boundary_kind = "null_homotopic";
        return [](double) { return 0.0; };
    }
    if (name == "half_sine_sphere") {
        boundary_kind = "null_homotopic";
        return [amplitude](double th) { return amplitude * std::sin(th); };
    }
    if (name == "degree_one_steep") {
        boundary_kind = "degree_one";
        return [](double th) {
            return pi * (1.0 + std::tanh(10.0 * (th - 0.5 * pi))) / 2.0;
        };
    }
    throw ConfigError("unknown sphere preset: " + name);
}

}  // namespace gmcf
