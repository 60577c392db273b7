#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirflow/theorems.hpp"

namespace dirflow {

/// Embedded in every report so a run can be reproduced from its output.
struct RunManifest {
    std::string tool = "dirflow";
    std::string version;
    std::string command;
    std::uint64_t seed = 0;
    double tolerance = kDefaultTolerance;
    std::string spec_hash;  // empty for generator-driven runs
    std::string timestamp;

    static std::string now_utc();
};

nlohmann::json to_json(const RunManifest& manifest);
nlohmann::json to_json(const CheckResult& result);

/// {"manifest": ..., "results": [...]}; term order is preserved.
nlohmann::json report_json(const RunManifest& manifest,
                           const std::vector<CheckResult>& results);

/// Flat form: one row per check, a column per term label across the report.
std::string report_csv(const std::vector<CheckResult>& results);

/// Aggregate emitted by the suite command: per-check verdict counts and the
/// largest identity slack observed, plus every per-system report.
struct SuiteRun {
    std::uint64_t seed = 0;
    SuiteReport report;
};

nlohmann::json suite_json(const RunManifest& manifest, const std::vector<SuiteRun>& runs);

}  // namespace dirflow
