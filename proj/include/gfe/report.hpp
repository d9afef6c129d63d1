#pragma once

// Machine-readable verification reports: a named list of checks, each with a
// verdict, tolerance, and attained residual, serialized as JSON conforming to
// docs/report.schema.json.

#include <gfe/zero.hpp>

#include <json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace gfe {

inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr int kReportSchemaVersion = 1;

enum class CheckVerdict { Proved, Probable, Failed };

inline const char* to_string(CheckVerdict v) {
    switch (v) {
        case CheckVerdict::Proved: return "proved";
        case CheckVerdict::Probable: return "probable";
        default: return "failed";
    }
}

struct Check {
    std::string name;
    CheckVerdict verdict = CheckVerdict::Failed;
    double tolerance = 0;
    double max_residual = 0;
    std::optional<nlohmann::json> witness;
    double wall_time_ms = 0;
};

struct Report {
    std::string command;
    std::map<std::string, std::string> parameters;
    std::vector<Check> checks;
    std::uint64_t seed = 0;
    // with deterministic output requested (explicit --seed), wall times are
    // zeroed so equal runs produce byte-identical reports
    bool deterministic = false;

    bool all_passed() const {
        for (const auto& c : checks)
            if (c.verdict == CheckVerdict::Failed) return false;
        return true;
    }

    void add(Check c) {
        for (const auto& existing : checks)
            if (existing.name == c.name)
                throw std::logic_error("duplicate check name: " + c.name);
        checks.push_back(std::move(c));
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["schema_version"] = kReportSchemaVersion;
        j["toolkit_version"] = kToolkitVersion;
        j["command"] = command;
        j["parameters"] = parameters;
        j["seed"] = seed;
        j["deterministic"] = deterministic;
        j["exit_status"] = all_passed() ? 0 : 1;
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks) {
            nlohmann::json cj;
            cj["name"] = c.name;
            cj["verdict"] = gfe::to_string(c.verdict);
            cj["tolerance"] = c.tolerance;
            cj["max_residual"] = c.max_residual;
            cj["wall_time_ms"] = deterministic ? 0.0 : c.wall_time_ms;
            if (c.witness) cj["witness"] = *c.witness;
            j["checks"].push_back(cj);
        }
        return j;
    }

    std::string to_string() const { return to_json().dump(2) + "\n"; }
};

/// Runs `body` (which fills in verdict/residual fields of the given check),
/// timing it, and appends the result to the report. Exceptions from `body`
/// mark the check failed with the message as witness.
template <class F>
void timed_check(Report& report, const std::string& name, double tolerance, F&& body) {
    Check c;
    c.name = name;
    c.tolerance = tolerance;
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& ex) {
        c.verdict = CheckVerdict::Failed;
        c.witness = nlohmann::json{{"error", ex.what()}};
    }
    auto t1 = std::chrono::steady_clock::now();
    c.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    report.add(std::move(c));
}

}  // namespace gfe
