#include "dirflow/generators.hpp"

#include <algorithm>
#include <functional>

namespace dirflow {

namespace {

constexpr std::array<const char*, 8> kAllSignals = {"r", "p", "s", "q", "e", "x", "y", "u"};

int config_alphabet(const GeneratorConfig& config, const std::string& signal) {
    auto it = config.alphabet_overrides.find(signal);
    return it == config.alphabet_overrides.end() ? config.alphabet : it->second;
}

/// Enumerates every (time, input-prefix, exogenous-prefix) row of one block
/// in a fixed order and fills the output with `emit`.
void fill_block(SystemSpec& spec, int b,
                const std::function<int(int time, const std::vector<int>& input,
                                        const std::vector<int>& exog)>& emit) {
    const auto& wiring = kBlockWiring[b];
    CausalBlock block;
    block.name = wiring.name;
    for (int i = 1; i <= spec.horizon; ++i) {
        int in_len = std::max(0, i - spec.delays[b].at(i));
        std::vector<int> input(static_cast<std::size_t>(in_len), 0);
        bool done_input = false;
        while (!done_input) {
            std::vector<int> exog(static_cast<std::size_t>(i), 0);
            bool done_exog = false;
            while (!done_exog) {
                block.table.emplace(std::make_tuple(i, input, exog), emit(i, input, exog));
                done_exog = true;
                for (std::size_t j = exog.size(); j-- > 0;) {
                    int t = static_cast<int>(j) + 1;
                    if (++exog[j] < spec.alphabet_of(wiring.exogenous, t)) {
                        done_exog = false;
                        break;
                    }
                    exog[j] = 0;
                }
                if (exog.empty()) break;
            }
            done_input = true;
            for (std::size_t j = input.size(); j-- > 0;) {
                int t = static_cast<int>(j) + 1;
                if (++input[j] < spec.alphabet_of(wiring.input, t)) {
                    done_input = false;
                    break;
                }
                input[j] = 0;
            }
            if (input.empty()) break;
        }
    }
    spec.blocks[b] = std::move(block);
}

void fill_random_block(SystemSpec& spec, int b, SplitMix64& rng) {
    const std::string output = kBlockWiring[b].output;
    fill_block(spec, b, [&](int i, const std::vector<int>&, const std::vector<int>&) {
        return static_cast<int>(
            rng.below(static_cast<std::uint64_t>(spec.alphabet_of(output, i))));
    });
}

void fill_identity_block(SystemSpec& spec, int b) {
    // output(i) = most recent available input sample, 0 when the prefix is empty
    fill_block(spec, b, [](int, const std::vector<int>& input, const std::vector<int>&) {
        return input.empty() ? 0 : input.back();
    });
}

void fill_adder_block(SystemSpec& spec, int b) {
    const std::string output = kBlockWiring[b].output;
    fill_block(spec, b, [&](int i, const std::vector<int>& input, const std::vector<int>& exog) {
        int m = spec.alphabet_of(output, i);
        int in = input.empty() ? 0 : input.back();
        return (in + exog.back()) % m;
    });
}

void fill_constant_block(SystemSpec& spec, int b) {
    fill_block(spec, b, [](int, const std::vector<int>&, const std::vector<int>&) { return 0; });
}

void assign_delays(SystemSpec& spec, const GeneratorConfig& config, SplitMix64& rng) {
    const int k = spec.horizon;
    switch (config.delay_pattern) {
        case DelayPattern::fixed: {
            for (int b = 0; b < 4; ++b)
                spec.delays[b] = DelaySchedule::constant(config.fixed_delays[b], k);
            break;
        }
        case DelayPattern::random_constant: {
            std::array<int, 4> d{};
            int total = 0;
            for (int b = 0; b < 4; ++b) total += d[b] = static_cast<int>(rng.below(2));
            if (total == 0) d[rng.below(4)] = 1;
            for (int b = 0; b < 4; ++b) spec.delays[b] = DelaySchedule::constant(d[b], k);
            break;
        }
        case DelayPattern::random_varying: {
            std::array<std::vector<int>, 4> values;
            for (int i = 0; i < k; ++i) {
                std::array<int, 4> d{};
                int total = 0;
                for (int b = 0; b < 4; ++b) total += d[b] = static_cast<int>(rng.below(2));
                if (total == 0) d[rng.below(4)] = 1;
                for (int b = 0; b < 4; ++b) values[b].push_back(d[b]);
            }
            for (int b = 0; b < 4; ++b) spec.delays[b] = DelaySchedule(values[b]);
            break;
        }
    }
}

void sample_exogenous(SystemSpec& spec, const GeneratorConfig& config, SplitMix64& rng) {
    const int k = spec.horizon;
    const std::uint64_t w = static_cast<std::uint64_t>(config.max_weight);
    for (const auto& group : config.partition) {
        std::vector<std::string> signals;
        for (char c : group) signals.push_back(std::string(1, c));

        bool iid = signals.size() == 1 &&
                   std::find(config.iid_signals.begin(), config.iid_signals.end(),
                             signals.front()) != config.iid_signals.end();

        std::vector<Variable> vars;
        for (const auto& sig : signals)
            for (int t = 1; t <= k; ++t)
                vars.push_back({{sig, t}, spec.alphabet_of(sig, t)});

        if (iid) {
            JointTable joint = JointTable::unit();
            for (int t = 1; t <= k; ++t) {
                int m = spec.alphabet_of(signals.front(), t);
                std::vector<std::uint64_t> weights;
                for (int a = 0; a < m; ++a) weights.push_back(1 + rng.below(w));
                joint = JointTable::product(
                    joint, JointTable::from_dense_weights({{{signals.front(), t},
                                                            m}}, weights));
            }
            spec.exogenous.push_back({signals, joint});
        } else {
            std::uint64_t span = 1;
            for (const auto& v : vars) span *= static_cast<std::uint64_t>(v.alphabet);
            std::vector<std::uint64_t> weights;
            weights.reserve(span);
            for (std::uint64_t c = 0; c < span; ++c) weights.push_back(1 + rng.below(w));
            spec.exogenous.push_back({signals, JointTable::from_dense_weights(vars, weights)});
        }
    }
}

}  // namespace

BlockStyle block_style_from_string(const std::string& s) {
    if (s == "random") return BlockStyle::random_table;
    if (s == "xor") return BlockStyle::xor_loop;
    if (s == "summing") return BlockStyle::summing_node;
    if (s == "constant") return BlockStyle::constant;
    if (s == "two-block") return BlockStyle::two_block;
    throw Error("unknown block style \"" + s + "\" (random, xor, summing, constant, two-block)");
}

DelayPattern delay_pattern_from_string(const std::string& s) {
    if (s == "constant") return DelayPattern::random_constant;
    if (s == "varying") return DelayPattern::random_varying;
    throw Error("unknown delay pattern \"" + s + "\" (constant, varying)");
}

std::vector<std::string> parse_partition(const std::string& flag) {
    std::vector<std::string> groups;
    std::string current;
    for (char c : flag) {
        if (c == '|') {
            groups.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    groups.push_back(current);

    std::map<char, int> seen;
    for (const auto& g : groups) {
        if (g.empty()) throw Error("partition \"" + flag + "\" has an empty group");
        for (char c : g) {
            if (std::string("rpsq").find(c) == std::string::npos)
                throw Error("partition \"" + flag + "\" names unknown signal '" +
                            std::string(1, c) + "'");
            seen[c]++;
        }
    }
    for (char c : std::string("rpsq"))
        if (seen[c] != 1)
            throw Error("partition \"" + flag + "\" must name each of r,p,s,q exactly once");
    return groups;
}

SystemSpec random_system(const GeneratorConfig& config) {
    if (config.horizon < 1) throw Error("generator horizon must be >= 1");
    if (config.alphabet < 1) throw Error("generator alphabet must be >= 1");
    for (const auto& g : config.partition)
        if (g.empty()) throw Error("generator partition has an empty group");
    for (const auto& sig : config.iid_signals)
        if (std::find(config.partition.begin(), config.partition.end(), sig) ==
            config.partition.end())
            throw Error("iid signal " + sig + " must form a singleton partition group");

    SplitMix64 rng(config.seed);

    SystemSpec spec;
    spec.horizon = config.horizon;
    for (const char* sig : kAllSignals)
        spec.alphabets[sig] = std::vector<int>(static_cast<std::size_t>(config.horizon),
                                               config_alphabet(config, sig));

    switch (config.style) {
        case BlockStyle::random_table: {
            assign_delays(spec, config, rng);
            for (int b = 0; b < 4; ++b) fill_random_block(spec, b, rng);
            break;
        }
        case BlockStyle::xor_loop: {
            if (config_alphabet(config, "e") != 2)
                throw Error("the xor style needs binary alphabets");
            // e(i) = r(i) xor u(i−1); the three remaining links are
            // instantaneous xors with the block's exogenous sample.
            spec.delays = {DelaySchedule::constant(1, spec.horizon),
                           DelaySchedule::constant(0, spec.horizon),
                           DelaySchedule::constant(0, spec.horizon),
                           DelaySchedule::constant(0, spec.horizon)};
            for (int b = 0; b < 4; ++b)
                fill_block(spec, b,
                           [](int, const std::vector<int>& input, const std::vector<int>& exog) {
                               return (input.empty() ? 0 : input.back()) ^ exog.back();
                           });
            break;
        }
        case BlockStyle::summing_node: {
            // u(i) = y(i) + q(i) mod m, e(i) = u(i); the forward path
            // (s2, s3) is random with total delay >= 1.
            std::array<int, 4> d{0, 0, 0, 0};
            d[1] = static_cast<int>(rng.below(2));
            d[2] = d[1] == 1 ? static_cast<int>(rng.below(2)) : 1;
            for (int b = 0; b < 4; ++b)
                spec.delays[b] = DelaySchedule::constant(d[b], spec.horizon);
            fill_identity_block(spec, 0);
            fill_random_block(spec, 1, rng);
            fill_random_block(spec, 2, rng);
            fill_adder_block(spec, 3);
            break;
        }
        case BlockStyle::constant: {
            spec.delays = {DelaySchedule::constant(1, spec.horizon),
                           DelaySchedule::constant(0, spec.horizon),
                           DelaySchedule::constant(0, spec.horizon),
                           DelaySchedule::constant(0, spec.horizon)};
            for (int b = 0; b < 4; ++b) fill_constant_block(spec, b);
            break;
        }
        case BlockStyle::two_block: {
            // s2 and s3 are pass-throughs with inert exogenous inputs, so the
            // loop reduces to s1 (driven by r) against s4 (driven by q).
            for (const char* sig : {"p", "s"})
                spec.alphabets[sig] = std::vector<int>(
                    static_cast<std::size_t>(config.horizon), 1);
            std::array<int, 4> d{0, 0, 0, 0};
            d[0] = static_cast<int>(rng.below(2));
            d[3] = d[0] == 1 ? static_cast<int>(rng.below(2)) : 1;
            for (int b = 0; b < 4; ++b)
                spec.delays[b] = DelaySchedule::constant(d[b], spec.horizon);
            fill_random_block(spec, 0, rng);
            fill_identity_block(spec, 1);
            fill_identity_block(spec, 2);
            fill_random_block(spec, 3, rng);
            break;
        }
    }

    sample_exogenous(spec, config, rng);

    auto violations = validate(spec);
    if (!violations.empty())
        throw Error("generated spec failed validation: " + violations.front());
    return spec;
}

std::vector<std::pair<std::string, SystemSpec>> canned_examples() {
    std::vector<std::pair<std::string, SystemSpec>> out;

    {
        GeneratorConfig config;
        config.seed = 11;
        config.style = BlockStyle::xor_loop;
        config.horizon = 2;
        config.max_weight = 1;  // uniform bits
        out.emplace_back("xor-loop", random_system(config));
    }
    {
        GeneratorConfig config;
        config.seed = 12;
        config.style = BlockStyle::summing_node;
        config.horizon = 2;
        out.emplace_back("summing-node", random_system(config));
    }
    {
        // Strictly causal forward channel y(i) = x(i−1) xor s(i) whose
        // output is fed back instantaneously and perfectly: x(i) = y(i).
        GeneratorConfig config;
        config.seed = 13;
        config.horizon = 3;
        config.max_weight = 1;
        config.alphabet_overrides = {{"r", 1}, {"p", 1}, {"q", 1}};
        config.delay_pattern = DelayPattern::fixed;
        config.fixed_delays = {0, 0, 1, 0};
        SystemSpec spec = random_system(config);
        fill_identity_block(spec, 0);
        fill_identity_block(spec, 1);
        fill_identity_block(spec, 3);
        fill_block(spec, 2, [](int, const std::vector<int>& input, const std::vector<int>& exog) {
            return (input.empty() ? 0 : input.back()) ^ exog.back();
        });
        out.emplace_back("perfect-instantaneous-feedback", spec);
    }
    {
        // Instantaneous channel y(i) = x(i) xor s(i) with strictly causal
        // perfect feedback x(i) = y(i−1).
        GeneratorConfig config;
        config.seed = 14;
        config.horizon = 3;
        config.max_weight = 1;
        config.alphabet_overrides = {{"r", 1}, {"p", 1}, {"q", 1}};
        config.delay_pattern = DelayPattern::fixed;
        config.fixed_delays = {0, 0, 0, 1};
        SystemSpec spec = random_system(config);
        fill_identity_block(spec, 0);
        fill_identity_block(spec, 1);
        fill_identity_block(spec, 3);
        fill_block(spec, 2, [](int, const std::vector<int>& input, const std::vector<int>& exog) {
            return (input.empty() ? 0 : input.back()) ^ exog.back();
        });
        out.emplace_back("strictly-causal-feedback", spec);
    }
    {
        // Xor loop whose channel noise s stays uniform while r, p, q carry
        // skewed laws; the fresh uniform xor noise decouples y from the loop.
        GeneratorConfig config;
        config.seed = 15;
        config.style = BlockStyle::xor_loop;
        config.horizon = 2;
        config.iid_signals = {"s"};
        SystemSpec spec = random_system(config);
        for (auto& group : spec.exogenous) {
            if (group.signals == std::vector<std::string>{"s"}) {
                std::vector<Variable> vars;
                for (int t = 1; t <= spec.horizon; ++t) vars.push_back({{"s", t}, 2});
                group.joint = JointTable::from_dense_weights(
                    vars, std::vector<std::uint64_t>(std::size_t{1} << spec.horizon, 1));
            }
        }
        out.emplace_back("uniform-noise-wash", spec);
    }
    {
        GeneratorConfig config;
        config.seed = 16;
        config.style = BlockStyle::two_block;
        config.horizon = 2;
        config.partition = {"r", "q", "p", "s"};
        out.emplace_back("two-block", random_system(config));
    }

    return out;
}

SystemSpec canned_example(const std::string& name) {
    for (auto& [n, spec] : canned_examples())
        if (n == name) return spec;
    throw Error("unknown example \"" + name + "\"");
}

JointTable random_joint(std::uint64_t seed, const std::vector<std::string>& signals,
                        int horizon, int alphabet, int max_weight) {
    SplitMix64 rng(seed);
    std::vector<Variable> vars;
    for (const auto& sig : signals)
        for (int t = 1; t <= horizon; ++t) vars.push_back({{sig, t}, alphabet});
    std::uint64_t span = 1;
    for (const auto& v : vars) span *= static_cast<std::uint64_t>(v.alphabet);
    std::vector<std::uint64_t> weights;
    weights.reserve(span);
    for (std::uint64_t c = 0; c < span; ++c)
        weights.push_back(1 + rng.below(static_cast<std::uint64_t>(max_weight)));
    return JointTable::from_dense_weights(std::move(vars), weights);
}

}  // namespace dirflow
