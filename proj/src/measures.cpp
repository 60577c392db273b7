#include "dirflow/measures.hpp"

#include <algorithm>

namespace dirflow {

namespace {

int horizon_of_signal(const JointTable& table, const std::string& signal) {
    int k = 0;
    for (const auto& v : table.variables())
        if (v.id.signal == signal) k = std::max(k, v.id.time);
    if (k == 0) throw Error("unknown signal " + signal);
    for (int t = 1; t <= k; ++t)
        if (!table.has_variable({signal, t}))
            throw Error("signal " + signal + " is missing time " + std::to_string(t));
    return k;
}

VarSet signal_prefix(const JointTable& table, const std::string& signal, int up_to) {
    VarSet out;
    for (int t = 1; t <= up_to; ++t) {
        VariableId id{signal, t};
        if (!table.has_variable(id)) throw Error("unknown variable " + to_string(id));
        out.insert(id);
    }
    return out;
}

VarSet signal_union(const JointTable& table, const std::vector<std::string>& signals) {
    VarSet out;
    for (const auto& sig : signals) {
        int k = horizon_of_signal(table, sig);
        for (int t = 1; t <= k; ++t) out.insert({sig, t});
    }
    return out;
}

}  // namespace

double seq_mutual_info(const JointTable& table, const std::vector<std::string>& a,
                       const std::vector<std::string>& b,
                       const std::vector<std::string>& given) {
    VarSet va = signal_union(table, a);
    VarSet vb = signal_union(table, b);
    VarSet vg = signal_union(table, given);
    for (const auto& id : vg)
        if (va.count(id) || vb.count(id))
            throw Error("conditioning signal " + id.signal + " overlaps an argument group");

    VarSet vag = va, vbg = vb, vabg = va;
    vag.insert(vg.begin(), vg.end());
    vbg.insert(vg.begin(), vg.end());
    vabg.insert(vb.begin(), vb.end());
    vabg.insert(vg.begin(), vg.end());
    return table.entropy(vag) + table.entropy(vbg) - table.entropy(vabg) - table.entropy(vg);
}

double seq_mutual_info(const TrajectoryDistribution& traj, const std::vector<std::string>& a,
                       const std::vector<std::string>& b,
                       const std::vector<std::string>& given) {
    return seq_mutual_info(traj.table(), a, b, given);
}

double directed_info(const JointTable& table, const std::string& dst,
                     const std::vector<SourceTerm>& sources,
                     const std::vector<ConditioningTerm>& conditioning) {
    const int k = horizon_of_signal(table, dst);

    std::set<std::string> roles{dst};
    for (const auto& s : sources) {
        if (!roles.insert(s.signal).second)
            throw Error("signal " + s.signal + " appears twice in a directed information");
        horizon_of_signal(table, s.signal);
        if (s.delay.horizon() < k)
            throw Error("delay schedule of source " + s.signal + " has no entry for time " +
                        std::to_string(s.delay.horizon() + 1));
    }
    for (const auto& c : conditioning) {
        if (!roles.insert(c.signal).second)
            throw Error("signal " + c.signal + " appears twice in a directed information");
        horizon_of_signal(table, c.signal);
        if (c.mode == ConditioningTerm::Mode::causal_prefix && c.prefix_delay.horizon() < k)
            throw Error("delay schedule of conditioning " + c.signal +
                        " has no entry for time " + std::to_string(c.prefix_delay.horizon() + 1));
    }

    double total = 0.0;
    for (int i = 1; i <= k; ++i) {
        VarSet step_sources;
        for (const auto& s : sources) {
            int up_to = i - s.delay.at(i);
            auto prefix = signal_prefix(table, s.signal, std::max(0, up_to));
            step_sources.insert(prefix.begin(), prefix.end());
        }
        if (step_sources.empty()) continue;

        VarSet cond = signal_prefix(table, dst, i - 1);
        for (const auto& c : conditioning) {
            VarSet extra = (c.mode == ConditioningTerm::Mode::full_sequence)
                               ? signal_prefix(table, c.signal, horizon_of_signal(table, c.signal))
                               : signal_prefix(table, c.signal,
                                               std::max(0, i - c.prefix_delay.at(i)));
            cond.insert(extra.begin(), extra.end());
        }

        total += table.conditional_mutual_info({VariableId{dst, i}}, step_sources, cond);
    }
    return total;
}

double directed_info(const TrajectoryDistribution& traj, const std::string& dst,
                     const std::vector<SourceTerm>& sources,
                     const std::vector<ConditioningTerm>& conditioning) {
    return directed_info(traj.table(), dst, sources, conditioning);
}

DelaySchedule effective_delay(const SystemSpec& spec, const std::string& src,
                              const std::string& dst) {
    if (src == dst) throw Error("effective delay needs two distinct internal signals");

    auto ring_index = [](const std::string& sig) {
        for (int j = 0; j < 4; ++j)
            if (kInternalSignals[j] == sig) return j;
        throw Error("signal " + sig + " is not internal");
    };
    auto block_into = [&](int signal_idx) {
        // block whose output is this signal
        for (int b = 0; b < 4; ++b)
            if (kBlockWiring[b].output == kInternalSignals[signal_idx]) return b;
        throw Error("no producing block");
    };

    int src_idx = ring_index(src);
    int dst_idx = ring_index(dst);

    std::vector<int> values;
    for (int i = 1; i <= spec.horizon; ++i) {
        int j = i;
        int cur = dst_idx;
        for (;;) {
            int b = block_into(cur);
            j -= spec.delays[b].at(j);
            cur = (cur + 3) % 4;  // predecessor on the e→x→y→u ring
            if (cur == src_idx) {
                values.push_back(i - j);
                break;
            }
            // the composed index left the horizon: the prefix is empty and
            // there is no meaningful entry to look up for the next link
            if (j <= 0) {
                values.push_back(i);
                break;
            }
        }
    }
    return DelaySchedule(values);
}

}  // namespace dirflow
