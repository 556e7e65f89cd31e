#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "glduality/mesh.hpp"
#include "glduality/primal.hpp"

namespace glduality {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Experiment description parsed from a sectioned key = value file
// ([domain], [model], [reg], [solver], [checks]). Absent keys take the
// documented defaults; K and K1 may stay automatic (resolved after the
// primal solve).
struct ExperimentConfig {
    // [domain]
    int dim = 1;
    int n = 64;
    double length = 1.0;
    // [model]
    double gamma = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    std::string f_spec = "const:0";
    // [reg]  (k_big / k1 <= 0 means auto)
    double k_big = -1.0;
    double k1 = -1.0;
    double eps = 1e-3;
    double eps1 = 1e-2;
    double k3 = 10.0;
    // [solver]
    double tol = 1e-10;
    int max_iter = 100;
    std::uint64_t seed = 42;
    // [checks]
    std::vector<std::string> suites = {"all"};
    std::map<std::string, double> suite_tol;  // per-suite headline tolerance overrides

    nlohmann::json echo() const {
        nlohmann::json j;
        j["domain"] = {{"dim", dim}, {"n", n}, {"length", length}};
        j["model"] = {{"gamma", gamma}, {"alpha", alpha}, {"beta", beta}, {"f", f_spec}};
        j["reg"] = {{"K", k_big}, {"K1", k1}, {"eps", eps}, {"eps1", eps1}, {"K3", k3}};
        j["solver"] = {{"tol", tol}, {"max_iter", max_iter}, {"seed", seed}};
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& s : suites) cs.push_back(s);
        j["checks"] = {{"suites", cs}};
        for (const auto& [k, v] : suite_tol) j["checks"][k + "_tol"] = v;
        return j;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& value, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": expected a number, got '" + value + "'");
    }
    if (pos != value.size())
        throw ConfigError("line " + std::to_string(line) + ": trailing characters in number '" + value + "'");
    return v;
}

inline long long parse_integer(const std::string& value, int line) {
    const double v = parse_number(value, line);
    if (v != std::floor(v))
        throw ConfigError("line " + std::to_string(line) + ": expected an integer, got '" + value + "'");
    return static_cast<long long>(v);
}

inline std::string parse_string(const std::string& value, int line) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        return value.substr(1, value.size() - 2);
    if (!value.empty() && value.find('"') == std::string::npos) return value;
    throw ConfigError("line " + std::to_string(line) + ": malformed string '" + value + "'");
}

}  // namespace detail

inline const std::set<std::string>& known_suites() {
    static const std::set<std::string> s = {"thm1", "thm2", "thm3-penalty", "toland",
                                            "exact-dual", "biconj", "all"};
    return s;
}

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        const auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = detail::trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(line) + ": unterminated section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            if (section != "domain" && section != "model" && section != "reg" &&
                section != "solver" && section != "checks")
                throw ConfigError("line " + std::to_string(line) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        const std::string key = detail::trim(s.substr(0, eq));
        const std::string value = detail::trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' outside any section");

        auto unknown = [&]() {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                              "' in section [" + section + "]");
        };
        if (section == "domain") {
            if (key == "dim") cfg.dim = static_cast<int>(detail::parse_integer(value, line));
            else if (key == "n") cfg.n = static_cast<int>(detail::parse_integer(value, line));
            else if (key == "length") cfg.length = detail::parse_number(value, line);
            else unknown();
        } else if (section == "model") {
            if (key == "gamma") cfg.gamma = detail::parse_number(value, line);
            else if (key == "alpha") cfg.alpha = detail::parse_number(value, line);
            else if (key == "beta") cfg.beta = detail::parse_number(value, line);
            else if (key == "f") cfg.f_spec = detail::parse_string(value, line);
            else unknown();
        } else if (section == "reg") {
            if (key == "K") cfg.k_big = detail::parse_number(value, line);
            else if (key == "K1") cfg.k1 = detail::parse_number(value, line);
            else if (key == "eps") cfg.eps = detail::parse_number(value, line);
            else if (key == "eps1") cfg.eps1 = detail::parse_number(value, line);
            else if (key == "K3") cfg.k3 = detail::parse_number(value, line);
            else unknown();
        } else if (section == "solver") {
            if (key == "tol") cfg.tol = detail::parse_number(value, line);
            else if (key == "max_iter") cfg.max_iter = static_cast<int>(detail::parse_integer(value, line));
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(detail::parse_integer(value, line));
            else unknown();
        } else {  // checks
            if (key == "suites") {
                cfg.suites.clear();
                std::istringstream ls(detail::parse_string(value, line));
                std::string tok;
                while (std::getline(ls, tok, ',')) {
                    tok = detail::trim(tok);
                    if (tok.empty()) continue;
                    if (!known_suites().count(tok))
                        throw ConfigError("line " + std::to_string(line) + ": unknown suite '" + tok + "'");
                    cfg.suites.push_back(tok);
                }
                if (cfg.suites.empty())
                    throw ConfigError("line " + std::to_string(line) + ": empty suite list");
            } else if (key.size() > 4 && key.substr(key.size() - 4) == "_tol") {
                const std::string suite = key.substr(0, key.size() - 4);
                if (!known_suites().count(suite) || suite == "all")
                    throw ConfigError("line " + std::to_string(line) + ": unknown suite in key '" + key + "'");
                cfg.suite_tol[suite] = detail::parse_number(value, line);
            } else {
                unknown();
            }
        }
    }

    // constraint validation, named after the violated requirement
    if (cfg.dim != 1 && cfg.dim != 2) throw ConfigError("domain.dim must be 1 or 2");
    if (cfg.n < 1) throw ConfigError("domain.n must be >= 1");
    if (!(cfg.length > 0.0)) throw ConfigError("domain.length must be > 0");
    if (!(cfg.gamma > 0.0)) throw ConfigError("model.gamma violates gamma > 0");
    if (!(cfg.alpha > 0.0)) throw ConfigError("model.alpha violates alpha > 0");
    if (!(cfg.beta > 0.0)) throw ConfigError("model.beta violates beta > 0");
    if (!(cfg.eps > 0.0)) throw ConfigError("reg.eps violates eps > 0");
    if (!(cfg.eps1 > 0.0 && cfg.eps1 < 1.0)) throw ConfigError("reg.eps1 violates 0 < eps1 < 1");
    if (!(cfg.k3 > 0.0)) throw ConfigError("reg.K3 violates K3 > 0");
    if (!(cfg.tol > 0.0)) throw ConfigError("solver.tol violates tol > 0");
    if (cfg.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
    if (cfg.f_spec.rfind("const:", 0) != 0 && cfg.f_spec != "sinpi" && cfg.f_spec.rfind("file:", 0) != 0)
        throw ConfigError("model.f must be const:<real>, sinpi, or file:<path>");
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

// Resolves the source term of a config on a given mesh.
inline Field make_source_field(const ExperimentConfig& cfg, const Mesh& m) {
    if (cfg.f_spec.rfind("const:", 0) == 0) {
        const std::string num = cfg.f_spec.substr(6);
        std::size_t pos = 0;
        double c = 0.0;
        try {
            c = std::stod(num, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != num.size()) throw ConfigError("model.f: bad constant in '" + cfg.f_spec + "'");
        return Field(m, c);
    }
    if (cfg.f_spec == "sinpi") {
        Field f(m);
        if (m.dim == 1) {
            for (int i = 0; i < m.n; ++i) f[i] = std::sin(M_PI * m.coord(i));
        } else {
            for (int j = 0; j < m.n; ++j)
                for (int i = 0; i < m.n; ++i)
                    f[j * m.n + i] = std::sin(M_PI * m.coord(i)) * std::sin(M_PI * m.coord(j));
        }
        return f;
    }
    const std::string path = cfg.f_spec.substr(5);
    std::ifstream is(path);
    if (!is) throw ConfigError("model.f: cannot open field file: " + path);
    return read_field_csv(is, m);
}

inline Mesh make_mesh(const ExperimentConfig& cfg) { return build_mesh(cfg.dim, cfg.n, cfg.length); }

inline GLParams make_params(const ExperimentConfig& cfg, const Mesh& m) {
    return GLParams(cfg.gamma, cfg.alpha, cfg.beta, make_source_field(cfg, m));
}

// K defaults to the admissibility-driven formula, K1 to 100 K.
inline RegParams make_reg(const ExperimentConfig& cfg, const GLParams& p, const Field& u0) {
    RegParams r;
    r.k_big = cfg.k_big > 0.0 ? cfg.k_big : default_k_big(p, u0);
    r.k1 = cfg.k1 > 0.0 ? cfg.k1 : 100.0 * r.k_big;
    r.eps = cfg.eps;
    r.eps1 = cfg.eps1;
    r.k3 = cfg.k3;
    r.validate();
    return r;
}

}  // namespace glduality
