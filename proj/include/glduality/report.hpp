#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace glduality {

struct Check {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Result of one verification suite. A check passes iff residual <= tolerance;
// that predicate is evaluated once, here, and reused verbatim by both the
// serializer and the process exit logic. Named scalars (energies, eigenvalue
// extrema, estimated radii, fitted slopes) go into `values`.
struct CheckReport {
    std::string suite;
    std::vector<Check> checks;
    std::map<std::string, double> values;
    nlohmann::json config_echo = nlohmann::json::object();

    Check& add(const std::string& name, double residual, double tolerance) {
        checks.push_back({name, residual, tolerance, residual <= tolerance});
        return checks.back();
    }

    // Premise checks guard a suite's hypotheses (e.g. the primal solve
    // converged); their failure is reported distinctly from a failed
    // conclusion.
    Check& add_premise(const std::string& name, double residual, double tolerance) {
        return add("premise_" + name, residual, tolerance);
    }

    void set_value(const std::string& name, double v) { values[name] = v; }

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    bool premise_failed() const {
        for (const auto& c : checks)
            if (!c.pass && c.name.rfind("premise_", 0) == 0) return true;
        return false;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["suite"] = suite;
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks) {
            j["checks"].push_back({{"name", c.name},
                                   {"residual", c.residual},
                                   {"tolerance", c.tolerance},
                                   {"pass", c.pass}});
        }
        j["values"] = values;
        j["config_echo"] = config_echo;
        return j;
    }

    std::string to_string() const { return to_json().dump(2) + "\n"; }
};

}  // namespace glduality
