#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirflow {

/// Error type used across the library. Messages are meant to be shown to
/// users verbatim, so they name the offending variable/block/time.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// One per-time sample of a named signal, e.g. y(2).
struct VariableId {
    std::string signal;
    int time = 1;

    auto operator<=>(const VariableId&) const = default;
};

std::string to_string(const VariableId& v);

struct Variable {
    VariableId id;
    int alphabet = 2;
};

using VarSet = std::set<VariableId>;

/// Full assignment of symbols, one per table variable, in table order.
using Assignment = std::vector<int>;

struct MarkovResult {
    bool holds = false;
    double gap_bits = 0.0;
};

struct IndependenceResult {
    bool holds = false;
    double gap_bits = 0.0;  // total correlation
};

/// Sparse exact joint distribution over a finite set of per-time variables.
///
/// Probabilities are integer weights over a common normalizer, so every
/// distribution-level operation (marginalization, products, extension) is
/// exact; floating point enters only through the base-2 logarithms in the
/// entropy computations. Assignments are packed into a mixed-radix 64-bit
/// key, which caps the representable product state space at 2^62 points.
///
/// Instances are immutable after construction; all member functions are
/// const and safe to call concurrently.
class JointTable {
public:
    JointTable(std::vector<Variable> vars,
               std::map<std::uint64_t, std::uint64_t> support,
               std::uint64_t normalizer);

    /// Table with no variables and a single unit-mass point.
    static JointTable unit();

    /// Dense weight list in row-major order, last variable fastest.
    /// Zero-weight cells are dropped from the support.
    static JointTable from_dense_weights(std::vector<Variable> vars,
                                         const std::vector<std::uint64_t>& weights);

    /// Independent combination: variables concatenated, weights multiplied.
    static JointTable product(const JointTable& a, const JointTable& b);

    const std::vector<Variable>& variables() const { return vars_; }
    std::uint64_t normalizer() const { return normalizer_; }
    std::size_t support_size() const { return support_.size(); }
    const std::map<std::uint64_t, std::uint64_t>& support() const { return support_; }

    bool has_variable(const VariableId& id) const;
    int alphabet_of(const VariableId& id) const;
    std::size_t index_of(const VariableId& id) const;  // throws naming the variable

    std::uint64_t encode(const Assignment& a) const;
    Assignment decode(std::uint64_t key) const;

    void for_each_point(const std::function<void(const Assignment&, std::uint64_t)>& fn) const;

    /// Keeps exactly `keep` (in table order); weights summed over the rest.
    /// Total mass and normalizer are preserved exactly.
    JointTable marginal(const VarSet& keep) const;

    /// Appends derived variables computed point-wise from each assignment.
    JointTable extended(const std::vector<Variable>& new_vars,
                        const std::function<std::vector<int>(const Assignment&)>& derive) const;

    /// H(vars) in bits; H(empty) = 0 by convention.
    double entropy(const VarSet& vars) const;

    /// H(vars | given) = H(vars ∪ given) − H(given).
    double conditional_entropy(const VarSet& vars, const VarSet& given) const;

    /// I(a; b | given), a/b/given pairwise disjoint (given may be empty).
    /// Symmetric in (a, b) by construction: the same entropy terms are used.
    double conditional_mutual_info(const VarSet& a, const VarSet& b, const VarSet& given) const;

    /// Chain a ↔ b ↔ c: holds iff I(a; c | b) ≤ tol.
    MarkovResult is_markov_chain(const VarSet& a, const VarSet& b, const VarSet& c,
                                 double tol) const;

    /// Mutual independence of ≥2 disjoint groups via total correlation:
    /// Σ H(g) − H(∪g) ≤ tol.
    IndependenceResult is_independent(const std::vector<VarSet>& groups, double tol) const;

private:
    std::vector<Variable> vars_;
    std::vector<std::uint64_t> place_;  // mixed-radix multipliers, last variable fastest
    std::map<std::uint64_t, std::uint64_t> support_;
    std::uint64_t normalizer_ = 1;

    struct EntropyCache;
    std::shared_ptr<EntropyCache> cache_;

    std::uint64_t subset_mask(const VarSet& vars, const char* role) const;
    double entropy_of_mask(std::uint64_t mask) const;
    double entropy_of_mask_uncached(std::uint64_t mask) const;
};

/// Lagged copy of a per-time signal: new_name(1) = 0, new_name(i) = signal(i−1).
/// The variable at time 1 is a deterministic constant with a unit alphabet.
JointTable prepend_zero(const JointTable& table, const std::string& signal,
                        const std::string& new_name);

}  // namespace dirflow
