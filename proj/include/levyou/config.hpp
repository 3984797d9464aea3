#pragma once

// JSON run configuration parsed into library objects.
// Every key is optional; unknown keys are rejected.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "levyou/cylindrical.hpp"
#include "levyou/levy_measure.hpp"
#include "levyou/model.hpp"

namespace levyou {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    json measure_record;
    std::shared_ptr<const SymmetricLevyMeasure> measure;
    Spectrum spectrum;
    std::size_t n_max = 4096;
    double tol = 1e-3;
    double t0 = 1.0;
    double t = 1.0;
    std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0};
    std::size_t n_modes = 64;
    std::vector<std::size_t> n_grid;  // default {n_modes/4, n_modes/2, n_modes}
    std::size_t m = 1000;
    std::size_t n_coords = 5;
    std::vector<double> x0;
    std::optional<Ball> ball;
    SimulationOptions sim;
    std::size_t grid = 33;
    std::uint64_t seed = 20240601;

    json resolved;  // full config with defaults filled in
};

namespace detail {

inline void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

inline double get_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline double get_number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
    return j.contains(key) ? get_number(j, key, where) : fallback;
}

inline std::vector<double> get_numbers(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw ConfigError(where + ": expected an array of numbers");
        v.push_back(e.get<double>());
    }
    return v;
}

inline std::size_t get_count(const json& j, const std::string& where) {
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0)) throw ConfigError(where + ": expected a nonnegative integer");
    return static_cast<std::size_t>(j.get<long long>());
}

template <class F>
auto wrap_invalid(F&& f, const std::string& where) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace detail

inline SymmetricLevyMeasure parse_measure(const json& j) {
    const std::string where = "measure";
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ConfigError("measure: expected an object with a string 'type'");
    const std::string type = j.at("type").get<std::string>();
    using detail::get_number;
    using detail::get_number_or;
    if (type == "stable") {
        detail::check_keys(j, {"type", "alpha", "coef"}, where);
        return detail::wrap_invalid([&] {
            return SymmetricLevyMeasure::stable(get_number(j, "alpha", where), get_number_or(j, "coef", 1.0, where));
        }, where);
    }
    if (type == "tempered") {
        detail::check_keys(j, {"type", "alpha", "lambda", "coef"}, where);
        return detail::wrap_invalid([&] {
            return SymmetricLevyMeasure::tempered(get_number(j, "alpha", where), get_number(j, "lambda", where),
                                                  get_number_or(j, "coef", 1.0, where));
        }, where);
    }
    if (type == "cp") {
        detail::check_keys(j, {"type", "atoms"}, where);
        if (!j.contains("atoms") || !j.at("atoms").is_array()) throw ConfigError("measure: 'atoms' must be an array");
        std::vector<Atom> atoms;
        for (const auto& a : j.at("atoms")) {
            if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number())
                throw ConfigError("measure: each atom must be [location, mass]");
            atoms.push_back({a[0].get<double>(), a[1].get<double>()});
        }
        return detail::wrap_invalid([&] { return SymmetricLevyMeasure::compound_poisson(atoms); }, where);
    }
    if (type == "table") {
        detail::check_keys(j, {"type", "knots", "values", "near_zero", "tail"}, where);
        TableDensity t;
        if (!j.contains("knots") || !j.contains("values")) throw ConfigError("measure: table needs 'knots' and 'values'");
        t.knots = detail::get_numbers(j.at("knots"), "measure.knots");
        t.values = detail::get_numbers(j.at("values"), "measure.values");
        if (j.contains("near_zero")) {
            const auto& nz = j.at("near_zero");
            detail::check_keys(nz, {"coef", "exponent"}, "measure.near_zero");
            t.near_zero = TableDensity::NearZero{get_number(nz, "coef", "measure.near_zero"),
                                                 get_number(nz, "exponent", "measure.near_zero")};
        }
        if (j.contains("tail")) {
            const auto& tl = j.at("tail");
            detail::check_keys(tl, {"coef", "exponent", "log_power"}, "measure.tail");
            t.tail = TableDensity::Tail{get_number(tl, "coef", "measure.tail"), get_number(tl, "exponent", "measure.tail"),
                                        get_number_or(tl, "log_power", 0.0, "measure.tail")};
        }
        return detail::wrap_invalid([&] { return SymmetricLevyMeasure(t); }, where);
    }
    throw ConfigError("measure: unknown type '" + type + "'");
}

inline GammaRule parse_gamma(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ConfigError("spectrum: expected an object with a string 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "laplacian") {
        detail::check_keys(j, {"type", "d"}, "spectrum");
        const auto d = j.contains("d") ? detail::get_count(j.at("d"), "spectrum.d") : 1;
        if (d < 1 || d > 8) throw ConfigError("spectrum: d must lie in [1, 8]");
        return LaplacianRule{static_cast<int>(d)};
    }
    if (type == "power") {
        detail::check_keys(j, {"type", "c", "p"}, "spectrum");
        return PowerRule{detail::get_number_or(j, "c", 1.0, "spectrum"), detail::get_number(j, "p", "spectrum")};
    }
    if (type == "log") {
        detail::check_keys(j, {"type"}, "spectrum");
        return LogRule{};
    }
    if (type == "explicit") {
        detail::check_keys(j, {"type", "values"}, "spectrum");
        if (!j.contains("values")) throw ConfigError("spectrum: explicit needs 'values'");
        return ExplicitRule{detail::get_numbers(j.at("values"), "spectrum.values")};
    }
    throw ConfigError("spectrum: unknown type '" + type + "'");
}

inline BetaRule parse_beta(const json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ConfigError("beta: expected an object with a string 'type'");
    const std::string type = j.at("type").get<std::string>();
    if (type == "power") {
        detail::check_keys(j, {"type", "c", "p"}, "beta");
        return PowerRule{detail::get_number_or(j, "c", 1.0, "beta"), detail::get_number_or(j, "p", 0.0, "beta")};
    }
    if (type == "geometric") {
        detail::check_keys(j, {"type", "c", "r"}, "beta");
        return GeometricRule{detail::get_number_or(j, "c", 1.0, "beta"), detail::get_number(j, "r", "beta")};
    }
    if (type == "explicit") {
        detail::check_keys(j, {"type", "values"}, "beta");
        if (!j.contains("values")) throw ConfigError("beta: explicit needs 'values'");
        return ExplicitRule{detail::get_numbers(j.at("values"), "beta.values")};
    }
    throw ConfigError("beta: unknown type '" + type + "'");
}

/// Defaults for every key; a user config is merged over this.
inline json default_config() {
    return json{{"measure", {{"type", "stable"}, {"alpha", 1.5}}},
                {"spectrum", {{"type", "laplacian"}, {"d", 1}}},
                {"beta", {{"type", "power"}, {"c", 1.0}, {"p", 0.0}}},
                {"n_max", 4096},
                {"tol", 1e-3},
                {"t0", 1.0},
                {"t", 1.0},
                {"times", {0.0, 0.5, 1.0, 2.0, 4.0}},
                {"n_modes", 64},
                {"n_grid", nullptr},
                {"m", 1000},
                {"n_coords", 5},
                {"x0", json::array()},
                {"ball", nullptr},
                {"eps", 0.05},
                {"gaussian_surrogate", false},
                {"grid", 33},
                {"seed", 20240601}};
}

inline RunConfig parse_config(const json& user) {
    if (!user.is_object()) throw ConfigError("config: top level must be an object");
    json cfg = default_config();
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!cfg.contains(it.key())) throw ConfigError("config: unknown key '" + it.key() + "'");
        cfg[it.key()] = it.value();
    }
    RunConfig rc;
    rc.measure_record = cfg.at("measure");
    rc.measure = std::make_shared<const SymmetricLevyMeasure>(parse_measure(cfg.at("measure")));
    rc.spectrum.gamma = parse_gamma(cfg.at("spectrum"));
    rc.spectrum.beta = parse_beta(cfg.at("beta"));
    detail::wrap_invalid([&] { validate(rc.spectrum); return 0; }, "spectrum");

    auto number = [&](const char* key) {
        if (!cfg.at(key).is_number()) throw ConfigError(std::string(key) + ": expected a number");
        return cfg.at(key).get<double>();
    };
    rc.n_max = detail::get_count(cfg.at("n_max"), "n_max");
    if (rc.n_max < 16) throw ConfigError("n_max: must be >= 16");
    rc.tol = number("tol");
    if (!(rc.tol > 0.0)) throw ConfigError("tol: must be positive");
    rc.t0 = number("t0");
    if (!(rc.t0 > 0.0)) throw ConfigError("t0: must be positive");
    rc.t = number("t");
    if (!(rc.t >= 0.0)) throw ConfigError("t: must be >= 0");
    rc.times = detail::get_numbers(cfg.at("times"), "times");
    for (std::size_t k = 0; k < rc.times.size(); ++k) {
        if (!(rc.times[k] >= 0.0)) throw ConfigError("times: must be >= 0");
        if (k > 0 && !(rc.times[k] > rc.times[k - 1])) throw ConfigError("times: must be increasing");
    }
    rc.n_modes = detail::get_count(cfg.at("n_modes"), "n_modes");
    if (rc.n_modes < 1) throw ConfigError("n_modes: must be >= 1");
    const std::size_t needed = std::max(rc.n_max, rc.n_modes);
    if (const auto* e = std::get_if<ExplicitRule>(&rc.spectrum.gamma); e && e->values.size() < needed)
        throw ConfigError("spectrum: explicit list needs at least max(n_max, n_modes) = " + std::to_string(needed) +
                          " values");
    if (const auto* e = std::get_if<ExplicitRule>(&rc.spectrum.beta); e && e->values.size() < needed)
        throw ConfigError("beta: explicit list needs at least max(n_max, n_modes) = " + std::to_string(needed) +
                          " values");
    if (cfg.at("n_grid").is_null()) {
        json g = json::array();
        for (std::size_t N : {rc.n_modes / 4, rc.n_modes / 2, rc.n_modes})
            if (N >= 1 && (g.empty() || N > g.back().get<std::size_t>())) g.push_back(N);
        cfg["n_grid"] = g;
    }
    if (!cfg.at("n_grid").is_array()) throw ConfigError("n_grid: expected an array of counts");
    rc.n_grid.clear();
    for (const auto& e : cfg.at("n_grid")) rc.n_grid.push_back(detail::get_count(e, "n_grid"));
    for (std::size_t k = 0; k < rc.n_grid.size(); ++k) {
        if (rc.n_grid[k] < 1 || rc.n_grid[k] > rc.n_modes) throw ConfigError("n_grid: entries must lie in [1, n_modes]");
        if (k > 0 && !(rc.n_grid[k] > rc.n_grid[k - 1])) throw ConfigError("n_grid: must be increasing");
    }
    rc.m = detail::get_count(cfg.at("m"), "m");
    if (rc.m < 1) throw ConfigError("m: must be >= 1");
    rc.n_coords = detail::get_count(cfg.at("n_coords"), "n_coords");
    if (rc.n_coords < 1 || rc.n_coords > rc.n_modes) throw ConfigError("n_coords: must lie in [1, n_modes]");
    rc.x0 = detail::get_numbers(cfg.at("x0"), "x0");
    if (rc.x0.size() > rc.n_modes) throw ConfigError("x0: longer than n_modes");
    if (!cfg.at("ball").is_null()) {
        const auto& b = cfg.at("ball");
        detail::check_keys(b, {"center", "radius"}, "ball");
        Ball ball;
        ball.center = b.contains("center") ? detail::get_numbers(b.at("center"), "ball.center") : std::vector<double>{};
        ball.radius = detail::get_number(b, "radius", "ball");
        if (!(ball.radius > 0.0)) throw ConfigError("ball: radius must be positive");
        if (ball.center.size() > rc.n_modes) throw ConfigError("ball: center longer than n_modes");
        rc.ball = ball;
    }
    rc.sim.eps = number("eps");
    if (!(rc.sim.eps > 0.0)) throw ConfigError("eps: must be positive");
    if (!cfg.at("gaussian_surrogate").is_boolean()) throw ConfigError("gaussian_surrogate: expected a boolean");
    rc.sim.gaussian_surrogate = cfg.at("gaussian_surrogate").get<bool>();
    rc.grid = detail::get_count(cfg.at("grid"), "grid");
    if (rc.grid < 2) throw ConfigError("grid: must be >= 2");
    const auto& sj = cfg.at("seed");
    if (!sj.is_number_integer() || (!sj.is_number_unsigned() && sj.get<long long>() < 0))
        throw ConfigError("seed: expected an unsigned 64-bit integer");
    rc.seed = cfg.at("seed").get<std::uint64_t>();
    rc.resolved = cfg;
    return rc;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string config_hash(const json& resolved) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a(resolved.dump());
    return os.str();
}

}  // namespace levyou
