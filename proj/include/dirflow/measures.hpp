#pragma once

#include <string>
#include <vector>

#include "dirflow/system.hpp"

namespace dirflow {

/// One source of a directed information: at step i the term contributes the
/// prefix signal^{i−delay(i)} (nothing when the index drops to zero).
struct SourceTerm {
    std::string signal;
    DelaySchedule delay;
};

/// Extra conditioning of the per-step terms: either the running prefix
/// signal^{i−delay(i)} (causal conditioning) or the entire sequence at every
/// step (full conditioning).
struct ConditioningTerm {
    enum class Mode { causal_prefix, full_sequence };

    std::string signal;
    Mode mode = Mode::causal_prefix;
    DelaySchedule prefix_delay;  // ignored for full_sequence

    static ConditioningTerm causal(std::string signal, DelaySchedule delay) {
        return {std::move(signal), Mode::causal_prefix, std::move(delay)};
    }
    static ConditioningTerm full(std::string signal) {
        return {std::move(signal), Mode::full_sequence, {}};
    }
};

/// I(A-sequences ; B-sequences | given-sequences) over full trajectories.
/// A and B may share signals (I(x;x) = H(x)); `given` must be disjoint from
/// both.
double seq_mutual_info(const JointTable& table, const std::vector<std::string>& a,
                       const std::vector<std::string>& b,
                       const std::vector<std::string>& given = {});
double seq_mutual_info(const TrajectoryDistribution& traj, const std::vector<std::string>& a,
                       const std::vector<std::string>& b,
                       const std::vector<std::string>& given = {});

/// Directed information with per-source forward delays:
///
///   Σ_{i=1..k}  I( dst(i) ; ∪_s source^{i−d_s(i)} | dst^{i−1}, conditioning at i )
///
/// The horizon k is taken from the dst signal, which must be present at
/// times 1..k. Steps where every source prefix is empty contribute nothing.
double directed_info(const JointTable& table, const std::string& dst,
                     const std::vector<SourceTerm>& sources,
                     const std::vector<ConditioningTerm>& conditioning = {});
double directed_info(const TrajectoryDistribution& traj, const std::string& dst,
                     const std::vector<SourceTerm>& sources,
                     const std::vector<ConditioningTerm>& conditioning = {});

/// Composed per-time delay along the forward path src → … → dst around the
/// loop, accumulated right-to-left; e.g. the path e→x→y composes the x→y
/// block delay with the e→x block delay evaluated at the shifted time. When
/// the composed index drops to zero the entry equals the time itself, which
/// makes the downstream prefix empty.
DelaySchedule effective_delay(const SystemSpec& spec, const std::string& src,
                              const std::string& dst);

}  // namespace dirflow
