#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirflow/expr.hpp"
#include "dirflow/generators.hpp"
#include "dirflow/report.hpp"
#include "dirflow/spec_io.hpp"
#include "dirflow/theorems.hpp"

namespace {

using namespace dirflow;

constexpr int kExitClean = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;

std::string join_command(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += " ";
        out += argv[i];
    }
    return out;
}

double default_tolerance() {
    if (const char* env = std::getenv("DIRFLOW_TOL")) {
        try {
            return std::stod(env);
        } catch (const std::exception&) {
            throw Error("DIRFLOW_TOL is not a number: " + std::string(env));
        }
    }
    return kDefaultTolerance;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << bytes;
}

std::string hash_string(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<TheoremId> parse_theorem_filter(const std::string& csv) {
    if (csv.empty()) return all_theorem_ids();
    std::vector<TheoremId> out;
    std::string token;
    std::istringstream is(csv);
    while (std::getline(is, token, ',')) out.push_back(theorem_from_string(token));
    return out;
}

void print_check_line(const CheckResult& r) {
    std::printf("%-24s %-20s slack=%.3e\n", r.label.c_str(), to_string(r.verdict).c_str(),
                r.slack);
}

std::vector<CheckResult> run_checks(const TrajectoryDistribution& traj,
                                    const std::vector<TheoremId>& ids, double tol) {
    std::vector<CheckResult> results;
    for (TheoremId id : ids) {
        if (id == TheoremId::GEN_CONSERVATION) {
            for (const char* alpha : kInternalSignals)
                for (const char* beta : kInternalSignals)
                    if (std::string(alpha) != beta)
                        results.push_back(generalized_conservation(traj, alpha, beta, tol));
        } else {
            results.push_back(check_theorem(traj, id, tol));
        }
    }
    return results;
}

int cmd_verify(const std::string& spec_path, const std::string& theorems, double tol,
               const std::string& out_path, const std::string& csv_path,
               const std::string& command) {
    SystemSpec spec = load_spec_file(spec_path);
    auto violations = validate(spec);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "error: " << v << "\n";
        return kExitUsage;
    }

    TrajectoryDistribution traj = unroll(spec);
    std::vector<CheckResult> results = run_checks(traj, parse_theorem_filter(theorems), tol);

    RunManifest manifest;
    manifest.version = DIRFLOW_VERSION;
    manifest.command = command;
    manifest.tolerance = tol;
    manifest.spec_hash = hash_string(spec_hash(spec));
    manifest.timestamp = RunManifest::now_utc();

    for (const auto& r : results) print_check_line(r);
    if (!out_path.empty()) write_file(out_path, report_json(manifest, results).dump(2) + "\n");
    if (!csv_path.empty()) write_file(csv_path, report_csv(results));

    bool violated = std::any_of(results.begin(), results.end(), [](const CheckResult& r) {
        return r.verdict == Verdict::violated;
    });
    return violated ? kExitViolation : kExitClean;
}

int cmd_measure(const std::string& spec_path, const std::string& expr_text) {
    SystemSpec spec = load_spec_file(spec_path);
    auto violations = validate(spec);
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "error: " << v << "\n";
        return kExitUsage;
    }

    MeasureExpr expr = [&] {
        try {
            return parse(expr_text);
        } catch (const ParseError& e) {
            std::cerr << "error: " << e.what() << "\n";
            std::cerr << "  " << expr_text << "\n";
            std::cerr << "  " << std::string(e.position(), ' ') << "^\n";
            std::exit(kExitUsage);
        }
    }();

    TrajectoryDistribution traj = unroll(spec);
    std::printf("%#.10g\n", evaluate(expr, traj));
    return kExitClean;
}

struct SuiteOptions {
    int count = 1;
    std::uint64_t seed = 1;
    int horizon = 2;
    int alphabet = 2;
    std::string partition = "s|r|p|q";
    std::string style = "random";
    std::string delays = "constant";
    std::vector<std::string> iid;
    int max_weight = 16;
    int jobs = 0;
};

GeneratorConfig config_from(const SuiteOptions& opt, std::uint64_t seed) {
    GeneratorConfig config;
    config.seed = seed;
    config.horizon = opt.horizon;
    config.alphabet = opt.alphabet;
    config.partition = parse_partition(opt.partition);
    config.style = block_style_from_string(opt.style);
    config.delay_pattern = delay_pattern_from_string(opt.delays);
    config.iid_signals = opt.iid;
    config.max_weight = opt.max_weight;
    return config;
}

int cmd_suite(const SuiteOptions& opt, double tol, const std::string& out_path,
              const std::string& command) {
    std::vector<SuiteRun> runs(static_cast<std::size_t>(opt.count));
    std::atomic<int> next{0};
    int jobs = opt.jobs > 0 ? opt.jobs
                            : static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(opt.count));
    for (int w = 0; w < std::min(jobs, opt.count); ++w) {
        workers.emplace_back([&] {
            for (int i = next.fetch_add(1); i < opt.count; i = next.fetch_add(1)) {
                try {
                    std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(i);
                    SystemSpec spec = random_system(config_from(opt, seed));
                    runs[static_cast<std::size_t>(i)] = {seed, verify_all(spec, tol)};
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunManifest manifest;
    manifest.version = DIRFLOW_VERSION;
    manifest.command = command;
    manifest.seed = opt.seed;
    manifest.tolerance = tol;
    manifest.timestamp = RunManifest::now_utc();

    nlohmann::json out = suite_json(manifest, runs);
    if (!out_path.empty()) write_file(out_path, out.dump(2) + "\n");

    int violations = 0;
    for (const auto& entry : out.at("aggregate")) {
        std::printf("%-24s identity=%-5d inequality=%-5d unmet=%-5d violated=%-5d "
                    "max_identity_slack=%.3e\n",
                    entry.at("label").get<std::string>().c_str(),
                    entry.at("identity_holds").get<int>(),
                    entry.at("inequality_holds").get<int>(),
                    entry.at("preconditions_unmet").get<int>(),
                    entry.at("violated").get<int>(),
                    entry.at("max_identity_slack").get<double>());
        violations += entry.at("violated").get<int>();
    }
    std::printf("systems=%d violations=%d\n", opt.count, violations);
    return violations ? kExitViolation : kExitClean;
}

int cmd_search(const std::string& theorem, const SuiteOptions& opt, int budget,
               double threshold, double tol, const std::string& out_path,
               const std::string& command) {
    TheoremId id = theorem_from_string(theorem);
    GeneratorConfig config = config_from(opt, opt.seed);

    auto hit = search_counterexample(id, config, budget, threshold, tol);

    RunManifest manifest;
    manifest.version = DIRFLOW_VERSION;
    manifest.command = command;
    manifest.seed = opt.seed;
    manifest.tolerance = tol;
    manifest.timestamp = RunManifest::now_utc();

    nlohmann::json out;
    out["manifest"] = to_json(manifest);
    out["theorem"] = to_string(id);
    out["budget"] = budget;
    out["threshold"] = threshold;
    if (hit) {
        out["found"] = true;
        out["seed"] = hit->seed;
        out["result"] = to_json(hit->result);
        std::printf("counterexample at seed %llu\n",
                    static_cast<unsigned long long>(hit->seed));
        print_check_line(hit->result);
    } else {
        out["found"] = false;
        std::printf("none within budget (%d seeds)\n", budget);
    }
    if (!out_path.empty()) write_file(out_path, out.dump(2) + "\n");
    return kExitClean;
}

int cmd_example(const std::string& name, const std::string& out_path) {
    if (name.empty()) {
        for (const auto& [n, spec] : canned_examples()) {
            (void)spec;
            std::printf("%s\n", n.c_str());
        }
        return kExitClean;
    }
    SystemSpec spec = canned_example(name);
    std::string bytes = spec_to_json(spec).dump(2) + "\n";
    if (out_path.empty())
        std::fputs(bytes.c_str(), stdout);
    else
        write_file(out_path, bytes);
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verification of directed-information identities in feedback systems"};
    app.require_subcommand(1);
    std::string command = join_command(argc, argv);

    double tol = kDefaultTolerance;
    try {
        tol = default_tolerance();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::string spec_path, theorems, out_path, csv_path, expr_text, theorem, name;
    int budget = 1000;
    double threshold = 0.01;
    SuiteOptions suite;

    CLI::App* verify = app.add_subcommand("verify", "run the identity suite on a spec file");
    verify->add_option("--spec", spec_path, "system spec file")->required();
    verify->add_option("--theorems", theorems, "comma-separated filter, e.g. T1,T3");
    verify->add_option("--tol", tol, "tolerance in bits");
    verify->add_option("--out", out_path, "report JSON path");
    verify->add_option("--csv", csv_path, "flat CSV path");

    CLI::App* measure = app.add_subcommand("measure", "evaluate a measure expression");
    measure->add_option("--spec", spec_path, "system spec file")->required();
    measure->add_option("--expr", expr_text, "expression, e.g. \"I(x -> y)\"")->required();
    measure->add_option("--tol", tol, "tolerance in bits");

    CLI::App* suite_cmd = app.add_subcommand("suite", "verify generated random systems");
    suite_cmd->add_option("--count", suite.count, "number of systems");
    suite_cmd->add_option("--seed", suite.seed, "base seed");
    suite_cmd->add_option("--k", suite.horizon, "horizon");
    suite_cmd->add_option("--alphabet", suite.alphabet, "alphabet size");
    suite_cmd->add_option("--partition", suite.partition, "independence groups, e.g. s|r|p|q");
    suite_cmd->add_option("--style", suite.style,
                          "block style: random, xor, summing, constant, two-block");
    suite_cmd->add_option("--delays", suite.delays, "delay pattern: constant, varying");
    suite_cmd->add_option("--iid", suite.iid, "signal sampled independently across time");
    suite_cmd->add_option("--max-weight", suite.max_weight, "largest integer cell weight");
    suite_cmd->add_option("--jobs", suite.jobs, "worker threads (default: hardware)");
    suite_cmd->add_option("--tol", tol, "tolerance in bits");
    suite_cmd->add_option("--out", out_path, "aggregate JSON path");

    CLI::App* search = app.add_subcommand("search", "scan seeds for a hypothesis-breaking gap");
    search->add_option("--theorem", theorem, "check to attack, e.g. T1")->required();
    search->add_option("--partition", suite.partition, "independence groups")->required();
    search->add_option("--budget", budget, "number of seeds");
    search->add_option("--threshold", threshold, "gap that counts, in bits");
    search->add_option("--seed", suite.seed, "base seed");
    search->add_option("--k", suite.horizon, "horizon");
    search->add_option("--alphabet", suite.alphabet, "alphabet size");
    search->add_option("--style", suite.style, "block style");
    search->add_option("--iid", suite.iid, "signal sampled independently across time");
    search->add_option("--tol", tol, "tolerance in bits");
    search->add_option("--out", out_path, "result JSON path");

    CLI::App* example = app.add_subcommand("example", "print a built-in example spec");
    example->add_option("--name", name, "fixture name (omit to list)");
    example->add_option("--out", out_path, "spec JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitClean : kExitUsage;
    }

    try {
        if (verify->parsed())
            return cmd_verify(spec_path, theorems, tol, out_path, csv_path, command);
        if (measure->parsed()) return cmd_measure(spec_path, expr_text);
        if (suite_cmd->parsed()) return cmd_suite(suite, tol, out_path, command);
        if (search->parsed())
            return cmd_search(theorem, suite, budget, threshold, tol, out_path, command);
        if (example->parsed()) return cmd_example(name, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
