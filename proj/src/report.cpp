#include "dirflow/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <set>
#include <sstream>

namespace dirflow {

std::string RunManifest::now_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json to_json(const RunManifest& manifest) {
    return {
        {"tool", manifest.tool},
        {"version", manifest.version},
        {"command", manifest.command},
        {"seed", manifest.seed},
        {"tolerance", manifest.tolerance},
        {"spec_hash", manifest.spec_hash},
        {"timestamp", manifest.timestamp},
    };
}

nlohmann::json to_json(const CheckResult& result) {
    nlohmann::json preconditions = nlohmann::json::array();
    for (const auto& p : result.preconditions)
        preconditions.push_back({{"name", p.name}, {"holds", p.holds}});

    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : result.terms)
        terms.push_back({{"quantity", t.label}, {"bits", t.bits}});

    return {
        {"theorem", to_string(result.theorem)},
        {"label", result.label},
        {"preconditions", preconditions},
        {"terms", terms},
        {"slack", result.slack},
        {"verdict", to_string(result.verdict)},
    };
}

nlohmann::json report_json(const RunManifest& manifest,
                           const std::vector<CheckResult>& results) {
    nlohmann::json out;
    out["manifest"] = to_json(manifest);
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& r : results) checks.push_back(to_json(r));
    out["results"] = checks;
    return out;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string bits_to_string(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

std::string report_csv(const std::vector<CheckResult>& results) {
    std::vector<std::string> term_labels;
    std::set<std::string> seen;
    for (const auto& r : results)
        for (const auto& t : r.terms)
            if (seen.insert(t.label).second) term_labels.push_back(t.label);

    std::ostringstream os;
    os << "label,verdict,slack,preconditions";
    for (const auto& label : term_labels) os << "," << csv_escape(label);
    os << "\n";

    for (const auto& r : results) {
        std::string pre;
        for (const auto& p : r.preconditions) {
            if (!pre.empty()) pre += ";";
            pre += p.name + "=" + (p.holds ? "1" : "0");
        }
        os << csv_escape(r.label) << "," << to_string(r.verdict) << ","
           << bits_to_string(r.slack) << "," << csv_escape(pre);
        for (const auto& label : term_labels) {
            os << ",";
            for (const auto& t : r.terms)
                if (t.label == label) {
                    os << bits_to_string(t.bits);
                    break;
                }
        }
        os << "\n";
    }
    return os.str();
}

nlohmann::json suite_json(const RunManifest& manifest, const std::vector<SuiteRun>& runs) {
    struct Tally {
        int identity = 0, inequality = 0, unmet = 0, violated = 0;
        double max_abs_slack = 0.0;
    };
    std::map<std::string, Tally> tallies;
    for (const auto& run : runs) {
        for (const auto& r : run.report.results) {
            Tally& t = tallies[r.label];
            switch (r.verdict) {
                case Verdict::identity_holds: t.identity++; break;
                case Verdict::inequality_holds: t.inequality++; break;
                case Verdict::preconditions_unmet: t.unmet++; break;
                case Verdict::violated: t.violated++; break;
            }
            if (r.verdict == Verdict::identity_holds)
                t.max_abs_slack = std::max(t.max_abs_slack, std::abs(r.slack));
        }
    }

    nlohmann::json aggregate = nlohmann::json::array();
    for (const auto& [label, t] : tallies)
        aggregate.push_back({{"label", label},
                             {"identity_holds", t.identity},
                             {"inequality_holds", t.inequality},
                             {"preconditions_unmet", t.unmet},
                             {"violated", t.violated},
                             {"max_identity_slack", t.max_abs_slack}});

    nlohmann::json systems = nlohmann::json::array();
    for (const auto& run : runs) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& r : run.report.results) checks.push_back(to_json(r));
        systems.push_back({{"seed", run.seed}, {"results", checks}});
    }

    nlohmann::json out;
    out["manifest"] = to_json(manifest);
    out["aggregate"] = aggregate;
    out["systems"] = systems;
    return out;
}

}  // namespace dirflow
