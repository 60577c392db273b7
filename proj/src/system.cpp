#include "dirflow/system.hpp"

#include <algorithm>
#include <sstream>

namespace dirflow {

namespace {

std::string prefix_to_string(std::span<const int> prefix) {
    std::ostringstream os;
    os << "[";
    for (std::size_t j = 0; j < prefix.size(); ++j) {
        if (j) os << ",";
        os << prefix[j];
    }
    os << "]";
    return os.str();
}

}  // namespace

DelaySchedule::DelaySchedule(std::vector<int> per_time) : values_(std::move(per_time)) {
    for (int d : values_)
        if (d < 0) throw Error("delays must be nonnegative");
}

DelaySchedule DelaySchedule::constant(int d, int horizon) {
    if (d < 0) throw Error("delays must be nonnegative");
    return DelaySchedule(std::vector<int>(static_cast<std::size_t>(horizon), d));
}

int DelaySchedule::at(int time) const {
    if (time < 1 || time > horizon())
        throw Error("delay schedule has no entry for time " + std::to_string(time));
    return values_[static_cast<std::size_t>(time) - 1];
}

int CausalBlock::output_at(int time, std::span<const int> input_prefix,
                           std::span<const int> exog_prefix) const {
    auto it = table.find({time, std::vector<int>(input_prefix.begin(), input_prefix.end()),
                          std::vector<int>(exog_prefix.begin(), exog_prefix.end())});
    if (it == table.end())
        throw Error("block " + name + " has no row for time " + std::to_string(time) +
                    ", input prefix " + prefix_to_string(input_prefix) +
                    ", exogenous prefix " + prefix_to_string(exog_prefix));
    return it->second;
}

int SystemSpec::alphabet_of(const std::string& signal, int time) const {
    auto it = alphabets.find(signal);
    if (it == alphabets.end()) throw Error("unknown signal " + signal);
    if (time < 1 || time > static_cast<int>(it->second.size()))
        throw Error("signal " + signal + " has no alphabet for time " + std::to_string(time));
    return it->second[static_cast<std::size_t>(time) - 1];
}

std::vector<std::string> SystemSpec::group_of(const std::string& signal) const {
    for (const auto& g : exogenous)
        if (std::find(g.signals.begin(), g.signals.end(), signal) != g.signals.end())
            return g.signals;
    throw Error("signal " + signal + " is not exogenous");
}

JointTable SystemSpec::exogenous_joint() const {
    JointTable joint = JointTable::unit();
    for (const auto& g : exogenous) joint = JointTable::product(joint, g.joint);

    // Reorder into canonical (r, p, s, q) × time order.
    std::vector<Variable> canonical;
    for (const char* sig : kExogenousSignals)
        for (int t = 1; t <= horizon; ++t)
            canonical.push_back({{sig, t}, joint.alphabet_of({sig, t})});

    std::vector<std::size_t> src_idx;
    for (const auto& v : canonical) src_idx.push_back(joint.index_of(v.id));

    std::map<std::uint64_t, std::uint64_t> support;
    JointTable out_shape(canonical, {{0, joint.normalizer()}}, joint.normalizer());
    joint.for_each_point([&](const Assignment& a, std::uint64_t w) {
        Assignment reordered(src_idx.size());
        for (std::size_t j = 0; j < src_idx.size(); ++j) reordered[j] = a[src_idx[j]];
        support[out_shape.encode(reordered)] += w;
    });
    return JointTable(canonical, std::move(support), joint.normalizer());
}

std::vector<std::string> validate(const SystemSpec& spec) {
    std::vector<std::string> violations;

    if (spec.horizon < 1) {
        violations.push_back("horizon must be >= 1");
        return violations;
    }

    const std::vector<std::string> all_signals = {"r", "p", "s", "q", "e", "x", "y", "u"};
    for (const auto& sig : all_signals) {
        auto it = spec.alphabets.find(sig);
        if (it == spec.alphabets.end()) {
            violations.push_back("missing alphabet for signal " + sig);
            continue;
        }
        if (static_cast<int>(it->second.size()) != spec.horizon)
            violations.push_back("alphabet list for " + sig + " must have one entry per time");
        for (int a : it->second)
            if (a < 1) violations.push_back("alphabet of " + sig + " must be >= 1");
    }
    if (!violations.empty()) return violations;

    for (int b = 0; b < 4; ++b) {
        if (spec.delays[b].horizon() != spec.horizon)
            violations.push_back(std::string("delay schedule of ") + kBlockWiring[b].name +
                                 " must cover times 1.." + std::to_string(spec.horizon));
    }
    if (!violations.empty()) return violations;

    for (int i = 1; i <= spec.horizon; ++i) {
        int total = 0;
        for (int b = 0; b < 4; ++b) total += spec.delays[b].at(i);
        if (total < 1)
            violations.push_back("loop delay 0 at time " + std::to_string(i));
    }

    // Exogenous partition covers r,p,s,q exactly once.
    std::map<std::string, int> seen;
    for (const auto& g : spec.exogenous) {
        for (const auto& sig : g.signals) {
            if (std::find(kExogenousSignals.begin(), kExogenousSignals.end(), sig) ==
                kExogenousSignals.end())
                violations.push_back("exogenous group names unknown signal " + sig);
            else
                seen[sig]++;
        }
        for (const auto& sig : g.signals) {
            for (int t = 1; t <= spec.horizon; ++t) {
                VariableId id{sig, t};
                if (!g.joint.has_variable(id)) {
                    violations.push_back("group joint is missing variable " + to_string(id));
                } else if (g.joint.alphabet_of(id) != spec.alphabet_of(sig, t)) {
                    violations.push_back("group joint alphabet of " + to_string(id) +
                                         " disagrees with the signal alphabet");
                }
            }
        }
        if (g.joint.variables().size() != g.signals.size() * static_cast<std::size_t>(spec.horizon))
            violations.push_back("group joint has extraneous variables");
    }
    for (const char* sig : kExogenousSignals) {
        if (seen[sig] == 0)
            violations.push_back(std::string("exogenous partition does not cover ") + sig);
        else if (seen[sig] > 1)
            violations.push_back(std::string("exogenous partition covers ") + sig + " twice");
    }

    // Block tables must be total over every prefix combination.
    for (int b = 0; b < 4; ++b) {
        const auto& wiring = kBlockWiring[b];
        const auto& block = spec.blocks[b];
        for (int i = 1; i <= spec.horizon; ++i) {
            int in_len = std::max(0, i - spec.delays[b].at(i));
            std::vector<int> input(static_cast<std::size_t>(in_len), 0);
            std::vector<int> exog(static_cast<std::size_t>(i), 0);
            bool done_input = false;
            while (!done_input) {
                bool done_exog = false;
                std::fill(exog.begin(), exog.end(), 0);
                while (!done_exog) {
                    auto it = block.table.find({i, input, exog});
                    if (it == block.table.end()) {
                        violations.push_back("block " + std::string(wiring.name) +
                                             " is missing a row for time " + std::to_string(i) +
                                             ", input prefix " + prefix_to_string(input) +
                                             ", exogenous prefix " + prefix_to_string(exog));
                    } else if (it->second < 0 ||
                               it->second >= spec.alphabet_of(wiring.output, i)) {
                        violations.push_back("block " + std::string(wiring.name) +
                                             " output at time " + std::to_string(i) +
                                             " is outside the alphabet of " + wiring.output);
                    }
                    // advance exogenous prefix (last position fastest)
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
    }

    return violations;
}

std::vector<std::string> evaluation_order(const SystemSpec& spec, int time) {
    std::array<std::string, 4> priority = {"e", "x", "y", "u"};
    // Instantaneous dependency: output of block b needs its same-time loop
    // input iff the block delay is zero at `time`.
    std::array<bool, 4> placed{};
    auto idx_of = [&](const std::string& sig) {
        for (int j = 0; j < 4; ++j)
            if (kInternalSignals[j] == sig) return j;
        throw Error("unknown internal signal " + sig);
    };

    std::vector<std::string> order;
    for (int round = 0; round < 4 && order.size() < 4; ++round) {
        std::vector<std::string> layer;
        for (const auto& sig : priority) {
            int out = idx_of(sig);
            if (placed[out]) continue;
            // find the producing block and its instantaneous predecessor
            bool ready = true;
            for (int b = 0; b < 4; ++b) {
                if (kBlockWiring[b].output != sig) continue;
                if (spec.delays[b].at(time) == 0 && !placed[idx_of(kBlockWiring[b].input)])
                    ready = false;
            }
            if (ready) layer.push_back(sig);
        }
        if (layer.empty())
            throw Error("no evaluation order at time " + std::to_string(time) +
                        ": all four delays are zero");
        for (const auto& sig : layer) {
            placed[idx_of(sig)] = true;
            order.push_back(sig);
        }
    }
    return order;
}

TrajectoryDistribution::TrajectoryDistribution(SystemSpec spec, JointTable table)
    : spec_(std::make_shared<const SystemSpec>(std::move(spec))), table_(std::move(table)) {}

VarSet TrajectoryDistribution::sequence(const std::string& signal) const {
    return prefix(signal, spec_->horizon);
}

VarSet TrajectoryDistribution::prefix(const std::string& signal, int up_to) const {
    VarSet out;
    for (int t = 1; t <= std::min(up_to, spec_->horizon); ++t) out.insert({signal, t});
    return out;
}

namespace {

TrajectoryDistribution unroll_impl(const SystemSpec& spec,
                                   const std::array<std::string, 4>& priority) {
    {
        auto violations = validate(spec);
        if (!violations.empty())
            throw Error("invalid system spec: " + violations.front());
    }

    const int k = spec.horizon;

    // Per-time evaluation orders, honoring the requested within-layer priority.
    std::vector<std::vector<std::string>> orders;
    for (int i = 1; i <= k; ++i) {
        auto canonical = evaluation_order(spec, i);
        if (priority == std::array<std::string, 4>{"e", "x", "y", "u"}) {
            orders.push_back(canonical);
        } else {
            // Re-run the layering with the alternative priority.
            std::vector<std::string> order;
            std::map<std::string, bool> placed;
            while (order.size() < 4) {
                std::vector<std::string> layer;
                for (const auto& sig : priority) {
                    if (placed[sig]) continue;
                    bool ready = true;
                    for (int b = 0; b < 4; ++b) {
                        if (kBlockWiring[b].output != sig) continue;
                        if (spec.delays[b].at(i) == 0 && !placed[kBlockWiring[b].input])
                            ready = false;
                    }
                    if (ready) layer.push_back(sig);
                }
                if (layer.empty()) throw Error("no evaluation order at time " + std::to_string(i));
                for (const auto& sig : layer) {
                    placed[sig] = true;
                    order.push_back(sig);
                }
            }
            orders.push_back(order);
        }
    }

    JointTable exog = spec.exogenous_joint();

    // Canonical trajectory variable order: (r, p, s, q, e, x, y, u) × time.
    std::vector<Variable> traj_vars;
    std::vector<const char*> all_signals = {"r", "p", "s", "q", "e", "x", "y", "u"};
    for (const char* sig : all_signals)
        for (int t = 1; t <= k; ++t) traj_vars.push_back({{sig, t}, spec.alphabet_of(sig, t)});

    JointTable shape(traj_vars, {{0, exog.normalizer()}}, exog.normalizer());

    auto var_slot = [&](const std::string& sig, int t) -> std::size_t {
        for (std::size_t j = 0; j < all_signals.size(); ++j)
            if (sig == all_signals[j])
                return j * static_cast<std::size_t>(k) + static_cast<std::size_t>(t) - 1;
        throw Error("unknown signal " + sig);
    };

    std::map<std::uint64_t, std::uint64_t> support;
    exog.for_each_point([&](const Assignment& exog_point, std::uint64_t w) {
        Assignment full(traj_vars.size(), 0);
        for (std::size_t j = 0; j < exog.variables().size(); ++j) {
            const auto& id = exog.variables()[j].id;
            full[var_slot(id.signal, id.time)] = exog_point[j];
        }

        std::vector<int> input_prefix, exog_prefix;
        for (int i = 1; i <= k; ++i) {
            for (const auto& sig : orders[static_cast<std::size_t>(i) - 1]) {
                for (int b = 0; b < 4; ++b) {
                    const auto& wiring = kBlockWiring[b];
                    if (wiring.output != sig) continue;
                    int in_len = std::max(0, i - spec.delays[b].at(i));
                    input_prefix.clear();
                    for (int t = 1; t <= in_len; ++t)
                        input_prefix.push_back(full[var_slot(wiring.input, t)]);
                    exog_prefix.clear();
                    for (int t = 1; t <= i; ++t)
                        exog_prefix.push_back(full[var_slot(wiring.exogenous, t)]);
                    full[var_slot(sig, i)] =
                        spec.blocks[b].output_at(i, input_prefix, exog_prefix);
                }
            }
        }
        support.emplace(shape.encode(full), w);
    });

    return TrajectoryDistribution(spec,
                                  JointTable(traj_vars, std::move(support), exog.normalizer()));
}

}  // namespace

TrajectoryDistribution unroll(const SystemSpec& spec) {
    return unroll_impl(spec, {"e", "x", "y", "u"});
}

TrajectoryDistribution unroll_with_priority(const SystemSpec& spec,
                                            const std::array<std::string, 4>& priority) {
    return unroll_impl(spec, priority);
}

TrajectoryDistribution prepend_zero(const TrajectoryDistribution& traj,
                                    const std::string& signal) {
    return TrajectoryDistribution(traj.spec(),
                                  prepend_zero(traj.table(), signal, signal + "_lag"));
}

}  // namespace dirflow
