#ifndef ADVSEL_CONFIG_HPP
#define ADVSEL_CONFIG_HPP

// Problem config ingestion. Two on-disk forms carry the same schema:
// a minimal TOML subset (documented in docs/config-format.md) and a
// JSON mirror. Both produce a RawConfig; validation into a ProblemSpec
// happens in problem.hpp.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace advsel {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericConfig {
    double tol_root = 1e-10;
    double tol_hyperbolic = 1e-6;
    double tol_fit = 0.05;
    double ode_rel_tol = 1e-9;
    double ode_abs_tol = 1e-12;
    double quad_rel_tol = 1e-9;
    double t_horizon = 40.0;
    int grid_n = 2048;
    int particle_n = 512;
    double tie_rel_tol = 1e-6;      // limits closer than this (relative) are a tie
    double dirac_radius_frac = 0.05; // fraction of domain width
    int residual_test_fns = 16;

    void check() const {
        auto pos = [](double v, const char* name) {
            if (!(v > 0)) throw ConfigError(std::string("numerics.") + name + " must be positive");
        };
        pos(tol_root, "tol_root");
        pos(tol_hyperbolic, "tol_hyperbolic");
        pos(tol_fit, "tol_fit");
        pos(ode_rel_tol, "ode_rel_tol");
        pos(ode_abs_tol, "ode_abs_tol");
        pos(quad_rel_tol, "quad_rel_tol");
        pos(t_horizon, "t_horizon");
        pos(tie_rel_tol, "tie_rel_tol");
        pos(dirac_radius_frac, "dirac_radius_frac");
        if (grid_n < 2) throw ConfigError("numerics.grid_n must be >= 2");
        if (particle_n < 16) throw ConfigError("numerics.particle_n must be >= 16");
        if (residual_test_fns < 1) throw ConfigError("numerics.residual_test_fns must be >= 1");
    }
};

struct AlphaHint {
    double root = 0.0;
    std::string side = "right"; // "left" | "right"
    double alpha = 0.0;
    double C = 1.0;
};

struct RawConfig {
    std::string f, r, n0;       // expression strings
    double domain_lo = 0.0, domain_hi = 1.0;
    std::optional<AlphaHint> alpha_hint;
    NumericConfig numerics;
};

namespace detail {

// ---- minimal TOML subset -------------------------------------------------
// Supported: comments (#), [section] headers one level deep,
// key = value with value one of: "string", number, true/false,
// [num, num, ...], {k = v, ...} (inline table of scalars).

struct TomlValue {
    enum class Kind { Str, Num, Bool, NumArray, Table } kind = Kind::Num;
    std::string str;
    double num = 0.0;
    bool b = false;
    std::vector<double> arr;
    std::map<std::string, TomlValue> table;
};

using TomlDoc = std::map<std::string, TomlValue>; // "key" or "section.key"

inline std::string toml_trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline TomlValue toml_parse_value(const std::string& raw, int line_no);

inline TomlValue toml_parse_scalar(const std::string& v, int line_no) {
    TomlValue out;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
        out.kind = TomlValue::Kind::Str;
        out.str = v.substr(1, v.size() - 2);
        return out;
    }
    if (v == "true" || v == "false") {
        out.kind = TomlValue::Kind::Bool;
        out.b = (v == "true");
        return out;
    }
    char* end = nullptr;
    double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("line " + std::to_string(line_no) + ": cannot parse value '" + v + "'");
    out.kind = TomlValue::Kind::Num;
    out.num = d;
    return out;
}

// Split "a, b, c" at top level (no nested brackets in the subset).
inline std::vector<std::string> toml_split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    bool in_str = false;
    for (char c : s) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            parts.push_back(toml_trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = toml_trim(cur);
    if (!last.empty()) parts.push_back(last);
    return parts;
}

inline TomlValue toml_parse_value(const std::string& raw, int line_no) {
    std::string v = toml_trim(raw);
    if (v.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing value");
    if (v.front() == '[') {
        if (v.back() != ']')
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated array");
        TomlValue out;
        out.kind = TomlValue::Kind::NumArray;
        for (const auto& part : toml_split_commas(v.substr(1, v.size() - 2))) {
            TomlValue el = toml_parse_scalar(part, line_no);
            if (el.kind != TomlValue::Kind::Num)
                throw ConfigError("line " + std::to_string(line_no) + ": arrays must be numeric");
            out.arr.push_back(el.num);
        }
        return out;
    }
    if (v.front() == '{') {
        if (v.back() != '}')
            throw ConfigError("line " + std::to_string(line_no) + ": unterminated inline table");
        TomlValue out;
        out.kind = TomlValue::Kind::Table;
        for (const auto& part : toml_split_commas(v.substr(1, v.size() - 2))) {
            std::size_t eq = part.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(line_no) + ": expected k = v in inline table");
            std::string k = toml_trim(part.substr(0, eq));
            out.table[k] = toml_parse_scalar(toml_trim(part.substr(eq + 1)), line_no);
        }
        return out;
    }
    return toml_parse_scalar(v, line_no);
}

inline TomlDoc toml_parse(const std::string& text) {
    TomlDoc doc;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        // strip comments outside strings
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_str = !in_str;
            if (line[i] == '#' && !in_str) {
                line = line.substr(0, i);
                break;
            }
        }
        line = toml_trim(line);
        if (line.empty()) continue;

        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = toml_trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = toml_trim(line.substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        std::string full = section.empty() ? key : section + "." + key;
        doc[full] = toml_parse_value(line.substr(eq + 1), line_no);
    }
    return doc;
}

inline void apply_numeric(NumericConfig& nc, const std::string& key, double v) {
    if (key == "tol_root") nc.tol_root = v;
    else if (key == "tol_hyperbolic") nc.tol_hyperbolic = v;
    else if (key == "tol_fit") nc.tol_fit = v;
    else if (key == "ode_rel_tol") nc.ode_rel_tol = v;
    else if (key == "ode_abs_tol") nc.ode_abs_tol = v;
    else if (key == "quad_rel_tol") nc.quad_rel_tol = v;
    else if (key == "t_horizon") nc.t_horizon = v;
    else if (key == "grid_n") nc.grid_n = static_cast<int>(v);
    else if (key == "particle_n") nc.particle_n = static_cast<int>(v);
    else if (key == "tie_rel_tol") nc.tie_rel_tol = v;
    else if (key == "dirac_radius_frac") nc.dirac_radius_frac = v;
    else if (key == "residual_test_fns") nc.residual_test_fns = static_cast<int>(v);
    else throw ConfigError("unknown numerics key '" + key + "'");
}

} // namespace detail

inline RawConfig parse_config_toml(const std::string& text) {
    using detail::TomlValue;
    auto doc = detail::toml_parse(text);
    RawConfig cfg;
    bool have_f = false, have_r = false, have_n0 = false, have_domain = false;

    for (const auto& [key, val] : doc) {
        if (key == "f" || key == "r" || key == "n0") {
            if (val.kind != TomlValue::Kind::Str)
                throw ConfigError("'" + key + "' must be an expression string");
            (key == "f" ? cfg.f : key == "r" ? cfg.r : cfg.n0) = val.str;
            (key == "f" ? have_f : key == "r" ? have_r : have_n0) = true;
        } else if (key == "domain") {
            if (val.kind != TomlValue::Kind::NumArray || val.arr.size() != 2)
                throw ConfigError("'domain' must be [lo, hi]");
            cfg.domain_lo = val.arr[0];
            cfg.domain_hi = val.arr[1];
            have_domain = true;
        } else if (key == "alpha_hint") {
            if (val.kind != TomlValue::Kind::Table)
                throw ConfigError("'alpha_hint' must be an inline table {root, side, alpha, C}");
            AlphaHint h;
            for (const auto& [k, v] : val.table) {
                if (k == "root") h.root = v.num;
                else if (k == "side") h.side = v.str;
                else if (k == "alpha") h.alpha = v.num;
                else if (k == "C") h.C = v.num;
                else throw ConfigError("unknown alpha_hint key '" + k + "'");
            }
            if (h.side != "left" && h.side != "right")
                throw ConfigError("alpha_hint.side must be \"left\" or \"right\"");
            cfg.alpha_hint = h;
        } else if (key.rfind("numerics.", 0) == 0) {
            if (val.kind != TomlValue::Kind::Num)
                throw ConfigError("numerics values must be numbers");
            detail::apply_numeric(cfg.numerics, key.substr(9), val.num);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    if (!have_f || !have_r || !have_n0 || !have_domain)
        throw ConfigError("config must set f, r, n0, and domain");
    cfg.numerics.check();
    return cfg;
}

inline RawConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
    RawConfig cfg;
    try {
        cfg.f = j.at("f").get<std::string>();
        cfg.r = j.at("r").get<std::string>();
        cfg.n0 = j.at("n0").get<std::string>();
        cfg.domain_lo = j.at("domain").at(0).get<double>();
        cfg.domain_hi = j.at("domain").at(1).get<double>();
        if (j.contains("alpha_hint")) {
            AlphaHint h;
            const auto& a = j["alpha_hint"];
            h.root = a.at("root").get<double>();
            h.side = a.value("side", std::string("right"));
            h.alpha = a.at("alpha").get<double>();
            h.C = a.value("C", 1.0);
            if (h.side != "left" && h.side != "right")
                throw ConfigError("alpha_hint.side must be \"left\" or \"right\"");
            cfg.alpha_hint = h;
        }
        if (j.contains("numerics")) {
            for (const auto& [k, v] : j["numerics"].items())
                detail::apply_numeric(cfg.numerics, k, v.get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config schema: ") + e.what());
    }
    cfg.numerics.check();
    return cfg;
}

// Dispatch on content: JSON configs start with '{'.
inline RawConfig parse_config_text(const std::string& text) {
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
        if (c == '{') return parse_config_json(text);
        break;
    }
    return parse_config_toml(text);
}

// Environment overrides for the numerics table: ADVSEL_<KEY> (upper case),
// e.g. ADVSEL_ODE_REL_TOL=1e-10.
inline void apply_env_overrides(NumericConfig& nc) {
    static const char* keys[] = {
        "tol_root", "tol_hyperbolic", "tol_fit", "ode_rel_tol", "ode_abs_tol",
        "quad_rel_tol", "t_horizon", "grid_n", "particle_n", "tie_rel_tol",
        "dirac_radius_frac", "residual_test_fns",
    };
    for (const char* k : keys) {
        std::string env = "ADVSEL_";
        for (const char* p = k; *p; ++p) env += static_cast<char>(std::toupper(*p));
        if (const char* v = std::getenv(env.c_str())) detail::apply_numeric(nc, k, std::atof(v));
    }
    nc.check();
}

} // namespace advsel

#endif
