#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirflow/generators.hpp"
#include "dirflow/measures.hpp"
#include "dirflow/system.hpp"

namespace dirflow {

/// The closed catalog of checks. T1..T6 and COR1 are the core identities
/// and inequalities; the remaining ids cover the related results the suite
/// cross-checks (Massey's bound, the mutual/directed conservation law, the
/// noisy-feedback identities, and the two-block Markov lemma).
enum class TheoremId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    COR1,
    MASSEY_EQ5,
    CONSERVATION_MM05,
    LIELI_EQ7,
    LIELI_EQ8,
    LEMMA1,
    GEN_CONSERVATION,
};

std::string to_string(TheoremId id);
TheoremId theorem_from_string(const std::string& name);
const std::vector<TheoremId>& all_theorem_ids();

enum class Verdict { identity_holds, inequality_holds, violated, preconditions_unmet };

std::string to_string(Verdict v);

struct Precondition {
    std::string name;
    bool holds = false;
};

struct Term {
    std::string label;  // canonical measure-language text where expressible
    double bits = 0.0;
};

struct CheckResult {
    TheoremId theorem = TheoremId::T1;
    std::string label;  // "T1", ..., "GEN_CONSERVATION(e,u)"
    std::vector<Precondition> preconditions;
    std::vector<Term> terms;
    /// |LHS − RHS| for identities; holding margin (≥ 0 iff satisfied) for
    /// inequalities.
    double slack = 0.0;
    Verdict verdict = Verdict::preconditions_unmet;

    double term(const std::string& label) const;  // throws if absent
    bool preconditions_hold() const;
};

inline constexpr double kDefaultTolerance = 1e-9;

/// Structural (partition / block shape) and numerical (total correlation on
/// the exogenous law) hypothesis checks. A structurally independent split
/// that fails numerically indicates an internal inconsistency and throws.
std::vector<Precondition> check_preconditions(const SystemSpec& spec, TheoremId id,
                                              double tol = kDefaultTolerance);

/// Evaluates every term of the statement on the unrolled trajectory. Terms
/// are reported even when preconditions fail; claims that hold
/// unconditionally are enforced regardless of the verdict path.
CheckResult check_theorem(const TrajectoryDistribution& traj, TheoremId id,
                          double tol = kDefaultTolerance);

/// Exogenous signals entering the blocks on the forward path alpha → beta,
/// plus the complementary set, both in canonical (r,p,s,q) order.
std::pair<std::vector<std::string>, std::vector<std::string>> theta_partition(
    const SystemSpec& spec, const std::string& alpha, const std::string& beta);

/// Conservation identity for an arbitrary ordered pair of internal signals:
/// I(alpha→beta) with the composed path delay against the mutual information
/// between the complementary exogenous signals and beta, plus the per-signal
/// split inequalities over the complement.
CheckResult generalized_conservation(const TrajectoryDistribution& traj,
                                     const std::string& alpha, const std::string& beta,
                                     double tol = kDefaultTolerance);

struct SuiteReport {
    std::vector<CheckResult> results;

    bool any_violation() const;
};

/// Unrolls once and runs the whole catalog, including the generalized
/// conservation check for every ordered pair of internal signals.
SuiteReport verify_all(const SystemSpec& spec, double tol = kDefaultTolerance);

struct SearchHit {
    std::uint64_t seed = 0;
    CheckResult result;
};

/// Scans seeds base.seed, base.seed+1, ... for an instance whose claim gap
/// exceeds `threshold` once the intentionally broken hypotheses are ignored.
/// Throws when the config does not break any hypothesis of the theorem —
/// there would be nothing to search. Exhausting the budget returns nullopt,
/// which is an informative outcome, not a failure.
std::optional<SearchHit> search_counterexample(TheoremId id, const GeneratorConfig& config,
                                               int budget, double threshold = 0.01,
                                               double tol = kDefaultTolerance);

}  // namespace dirflow
