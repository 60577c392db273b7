#pragma once

#include <array>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "dirflow/joint_table.hpp"

namespace dirflow {

inline constexpr std::array<const char*, 4> kExogenousSignals = {"r", "p", "s", "q"};
inline constexpr std::array<const char*, 4> kInternalSignals = {"e", "x", "y", "u"};

/// Fixed wiring of the four-block loop. Block j consumes a delayed prefix of
/// its loop input plus the current prefix of its exogenous signal:
///   s1: e(i) = f(u^{i−d1(i)}, r^i)     s2: x(i) = f(e^{i−d2(i)}, p^i)
///   s3: y(i) = f(x^{i−d3(i)}, s^i)     s4: u(i) = f(y^{i−d4(i)}, q^i)
struct BlockWiring {
    const char* name;
    const char* input;
    const char* exogenous;
    const char* output;
};

inline constexpr std::array<BlockWiring, 4> kBlockWiring = {{
    {"s1", "u", "r", "e"},
    {"s2", "e", "p", "x"},
    {"s3", "x", "s", "y"},
    {"s4", "y", "q", "u"},
}};

/// Per-time nonnegative delay d(i), i = 1..k.
class DelaySchedule {
public:
    DelaySchedule() = default;
    explicit DelaySchedule(std::vector<int> per_time);
    static DelaySchedule constant(int d, int horizon);

    int at(int time) const;
    int horizon() const { return static_cast<int>(values_.size()); }
    const std::vector<int>& values() const { return values_; }

    bool operator==(const DelaySchedule&) const = default;

private:
    std::vector<int> values_;
};

/// Deterministic causal map given as an explicit lookup table so that specs
/// serialize and runs reproduce. Rows are keyed by (time, delayed input
/// prefix, exogenous prefix); the input prefix is empty when i − d(i) ≤ 0.
struct CausalBlock {
    std::string name;
    std::map<std::tuple<int, std::vector<int>, std::vector<int>>, int> table;

    int output_at(int time, std::span<const int> input_prefix,
                  std::span<const int> exog_prefix) const;
};

/// One mutually-independent group of exogenous sequences with its exact
/// joint law over the group's full trajectories.
struct ExogenousGroup {
    std::vector<std::string> signals;
    JointTable joint;  // variables ordered (signal in listed order) × (time 1..k)
};

struct SystemSpec {
    int horizon = 1;
    std::map<std::string, std::vector<int>> alphabets;  // all 8 signals, per time
    std::array<DelaySchedule, 4> delays;                // d1..d4
    std::array<CausalBlock, 4> blocks;                  // s1..s4
    std::vector<ExogenousGroup> exogenous;

    int alphabet_of(const std::string& signal, int time) const;

    /// Signals sharing an exogenous group with `signal` (including itself).
    std::vector<std::string> group_of(const std::string& signal) const;

    /// Exact joint law of all four exogenous sequences (product of groups),
    /// variables in canonical (r, p, s, q) × time order.
    JointTable exogenous_joint() const;
};

/// Empty iff the loop-delay constraint holds at every time, every block
/// table is total and every time admits an evaluation order. Violations are
/// reported as data, never thrown.
std::vector<std::string> validate(const SystemSpec& spec);

/// Order in which the four same-time samples are computed. Evaluation is
/// layered: each round emits every signal whose instantaneous predecessors
/// (delay 0 at `time`) are already available, in e,x,y,u priority order.
/// Throws when all four delays are zero at `time`.
std::vector<std::string> evaluation_order(const SystemSpec& spec, int time);

class TrajectoryDistribution {
public:
    TrajectoryDistribution(SystemSpec spec, JointTable table);

    const SystemSpec& spec() const { return *spec_; }
    const JointTable& table() const { return table_; }
    int horizon() const { return spec_->horizon; }

    /// All per-time variables of `signal`, times 1..k.
    VarSet sequence(const std::string& signal) const;
    /// Prefix variables, times 1..min(k, up_to); empty when up_to ≤ 0.
    VarSet prefix(const std::string& signal, int up_to) const;

private:
    std::shared_ptr<const SystemSpec> spec_;
    JointTable table_;
};

/// Enumerates every exogenous outcome and simulates the loop time-by-time,
/// yielding the exact joint law over all eight signal trajectories. Weights
/// carry over from the exogenous law unchanged (internal signals are
/// deterministic given the exogenous ones).
TrajectoryDistribution unroll(const SystemSpec& spec);

/// Internal knob for the order-invariance tests: evaluates each time step
/// with the given within-layer priority instead of e,x,y,u.
TrajectoryDistribution unroll_with_priority(const SystemSpec& spec,
                                            const std::array<std::string, 4>& priority);

/// Adds the lagged signal "<signal>_lag" (zero, then signal(1..k−1)).
TrajectoryDistribution prepend_zero(const TrajectoryDistribution& traj,
                                    const std::string& signal);

}  // namespace dirflow
