#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dirflow/system.hpp"

namespace dirflow {

/// SplitMix64. Fixed here (rather than a standard-library engine) so that
/// identical configs produce byte-identical specs on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Unbiased uniform draw in [0, n); n ≥ 1.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw Error("empty draw range");
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % n;
    }

private:
    std::uint64_t state_;
};

enum class BlockStyle { random_table, xor_loop, summing_node, constant, two_block };
enum class DelayPattern { random_constant, random_varying, fixed };

BlockStyle block_style_from_string(const std::string& s);
DelayPattern delay_pattern_from_string(const std::string& s);

struct GeneratorConfig {
    std::uint64_t seed = 1;
    int horizon = 2;
    int alphabet = 2;
    BlockStyle style = BlockStyle::random_table;
    DelayPattern delay_pattern = DelayPattern::random_constant;
    std::array<int, 4> fixed_delays = {1, 0, 0, 0};
    /// Groups of mutually independent exogenous signals, e.g. {"s","r","p","q"}
    /// or {"sp","r","q"}; each of r,p,s,q appears exactly once overall.
    std::vector<std::string> partition = {"s", "r", "p", "q"};
    /// Singleton groups whose per-time samples are drawn independently
    /// (the group joint is a product across time).
    std::vector<std::string> iid_signals = {};
    /// Per-signal alphabet overrides (e.g. unit alphabets for inert signals).
    std::map<std::string, int> alphabet_overrides = {};
    int max_weight = 16;
};

/// Parses a partition flag such as "s|r|p|q" or "qs|r|p".
std::vector<std::string> parse_partition(const std::string& flag);

/// Deterministic function of the config; the result always passes validate.
SystemSpec random_system(const GeneratorConfig& config);

/// The fixture systems used throughout the tests and the docs.
std::vector<std::pair<std::string, SystemSpec>> canned_examples();
SystemSpec canned_example(const std::string& name);

/// Seeded joint law over arbitrary named sequences with full support and
/// integer weights in 1..max_weight.
JointTable random_joint(std::uint64_t seed, const std::vector<std::string>& signals,
                        int horizon, int alphabet, int max_weight = 16);

}  // namespace dirflow
