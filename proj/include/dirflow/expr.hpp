#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dirflow/measures.hpp"

namespace dirflow {

/// Delay annotation on a directed-information node: either an explicit
/// nonnegative step count or `loop`, which resolves through the system's
/// block delays along the forward path at evaluation time.
struct DelayAnnotation {
    bool loop = true;
    int value = 0;

    static DelayAnnotation loop_delay() { return {true, 0}; }
    static DelayAnnotation steps(int d) { return {false, d}; }

    bool operator==(const DelayAnnotation&) const = default;
};

struct EntropyExpr {
    std::vector<std::string> vars;
    std::vector<std::string> given;

    bool operator==(const EntropyExpr&) const = default;
};

struct MutualInfoExpr {
    std::vector<std::string> a;
    std::vector<std::string> b;
    std::vector<std::string> given;

    bool operator==(const MutualInfoExpr&) const = default;
};

struct CausalCond {
    std::string signal;
    DelayAnnotation delay = DelayAnnotation::steps(0);

    bool operator==(const CausalCond&) const = default;
};

struct DirectedExpr {
    std::vector<std::string> sources;
    std::string dst;
    DelayAnnotation delay = DelayAnnotation::loop_delay();
    std::vector<CausalCond> causal;      // ‖-conditioning, running prefixes
    std::vector<std::string> full;       // |-conditioning, entire sequences

    bool operator==(const DirectedExpr&) const = default;
};

class MeasureExpr;

struct BinaryExpr {
    char op;  // '+' or '-'
    std::shared_ptr<const MeasureExpr> lhs;
    std::shared_ptr<const MeasureExpr> rhs;
};

class MeasureExpr {
public:
    using Node = std::variant<EntropyExpr, MutualInfoExpr, DirectedExpr, BinaryExpr>;

    explicit MeasureExpr(Node node) : node_(std::make_shared<const Node>(std::move(node))) {}

    const Node& node() const { return *node_; }

private:
    std::shared_ptr<const Node> node_;
};

bool structurally_equal(const MeasureExpr& a, const MeasureExpr& b);

class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t position, std::string expected);

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

/// Grammar (whitespace-insensitive; `^tok` after a name is accepted and
/// ignored — sequences are always full-horizon):
///
///   expr     := measure (('+' | '-') measure)*
///   measure  := 'H' '(' names ('|' names)? ')'
///             | 'I' '(' names ';' names ('|' names)? ')'
///             | 'I' '(' names '->' name ('@' delay)?
///                       ('||' cond (',' cond)*)? ('|' names)? ')'
///   cond     := name ('@' delay)?
///   delay    := integer | 'loop'
///   names    := name (',' name)*
MeasureExpr parse(const std::string& text);

/// Canonical text; parse(format(e)) is structurally equal to e.
std::string format(const MeasureExpr& expr);

/// Value in bits. Signal names resolve against the trajectory's table;
/// `loop` delays resolve through the system's block delays.
double evaluate(const MeasureExpr& expr, const TrajectoryDistribution& traj);

}  // namespace dirflow
