#include "dirflow/joint_table.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace dirflow {

namespace {

constexpr std::uint64_t kMaxKeySpace = std::uint64_t{1} << 62;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    if (a != 0 && b > kMaxKeySpace / a)
        throw Error(std::string("integer overflow in ") + what);
    return a * b;
}

}  // namespace

std::string to_string(const VariableId& v) {
    return v.signal + "(" + std::to_string(v.time) + ")";
}

struct JointTable::EntropyCache {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, double> bits;
};

JointTable::JointTable(std::vector<Variable> vars,
                       std::map<std::uint64_t, std::uint64_t> support,
                       std::uint64_t normalizer)
    : vars_(std::move(vars)),
      support_(std::move(support)),
      normalizer_(normalizer),
      cache_(std::make_shared<EntropyCache>()) {
    if (normalizer_ == 0) throw Error("joint table normalizer must be positive");
    if (vars_.size() > 62) throw Error("joint table limited to 62 variables");

    std::set<VariableId> seen;
    for (const auto& v : vars_) {
        if (v.alphabet < 1)
            throw Error("variable " + to_string(v.id) + " has empty alphabet");
        if (!seen.insert(v.id).second)
            throw Error("duplicate variable " + to_string(v.id));
    }

    place_.assign(vars_.size(), 1);
    std::uint64_t span = 1;
    for (std::size_t j = vars_.size(); j-- > 0;) {
        place_[j] = span;
        span = checked_mul(span, static_cast<std::uint64_t>(vars_[j].alphabet),
                           "joint state space");
    }

    std::uint64_t total = 0;
    for (const auto& [key, w] : support_) {
        if (key >= span) throw Error("support key outside the joint state space");
        if (w == 0) throw Error("zero-probability points must be absent from the support");
        if (total > kMaxKeySpace - w) throw Error("integer overflow in total mass");
        total += w;
    }
    if (total != normalizer_)
        throw Error("support weights sum to " + std::to_string(total) +
                    ", expected normalizer " + std::to_string(normalizer_));
}

JointTable JointTable::unit() {
    return JointTable({}, {{0, 1}}, 1);
}

JointTable JointTable::from_dense_weights(std::vector<Variable> vars,
                                          const std::vector<std::uint64_t>& weights) {
    std::uint64_t span = 1;
    for (const auto& v : vars)
        span = checked_mul(span, static_cast<std::uint64_t>(v.alphabet), "weight list size");
    if (weights.size() != span)
        throw Error("weight list has " + std::to_string(weights.size()) +
                    " entries, expected " + std::to_string(span));

    std::map<std::uint64_t, std::uint64_t> support;
    std::uint64_t total = 0;
    for (std::uint64_t key = 0; key < span; ++key) {
        if (weights[key] == 0) continue;
        support.emplace(key, weights[key]);
        total += weights[key];
    }
    if (total == 0) throw Error("weight list has zero total mass");
    return JointTable(std::move(vars), std::move(support), total);
}

JointTable JointTable::product(const JointTable& a, const JointTable& b) {
    std::vector<Variable> vars = a.vars_;
    vars.insert(vars.end(), b.vars_.begin(), b.vars_.end());

    std::map<std::uint64_t, std::uint64_t> support;
    std::uint64_t b_span = 1;
    for (const auto& v : b.vars_)
        b_span = checked_mul(b_span, static_cast<std::uint64_t>(v.alphabet), "product space");
    for (const auto& [ka, wa] : a.support_)
        for (const auto& [kb, wb] : b.support_)
            support.emplace(checked_mul(ka, b_span, "product key") + kb,
                            checked_mul(wa, wb, "product weight"));

    return JointTable(std::move(vars), std::move(support),
                      checked_mul(a.normalizer_, b.normalizer_, "product normalizer"));
}

bool JointTable::has_variable(const VariableId& id) const {
    return std::any_of(vars_.begin(), vars_.end(),
                       [&](const Variable& v) { return v.id == id; });
}

int JointTable::alphabet_of(const VariableId& id) const {
    return vars_[index_of(id)].alphabet;
}

std::size_t JointTable::index_of(const VariableId& id) const {
    for (std::size_t j = 0; j < vars_.size(); ++j)
        if (vars_[j].id == id) return j;
    throw Error("unknown variable " + to_string(id));
}

std::uint64_t JointTable::encode(const Assignment& a) const {
    if (a.size() != vars_.size()) throw Error("assignment arity mismatch");
    std::uint64_t key = 0;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        if (a[j] < 0 || a[j] >= vars_[j].alphabet)
            throw Error("symbol " + std::to_string(a[j]) + " outside alphabet of " +
                        to_string(vars_[j].id));
        key += static_cast<std::uint64_t>(a[j]) * place_[j];
    }
    return key;
}

Assignment JointTable::decode(std::uint64_t key) const {
    Assignment a(vars_.size());
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        a[j] = static_cast<int>((key / place_[j]) %
                                static_cast<std::uint64_t>(vars_[j].alphabet));
    }
    return a;
}

void JointTable::for_each_point(
    const std::function<void(const Assignment&, std::uint64_t)>& fn) const {
    Assignment a(vars_.size());
    for (const auto& [key, w] : support_) {
        for (std::size_t j = 0; j < vars_.size(); ++j)
            a[j] = static_cast<int>((key / place_[j]) %
                                    static_cast<std::uint64_t>(vars_[j].alphabet));
        fn(a, w);
    }
}

std::uint64_t JointTable::subset_mask(const VarSet& vars, const char* role) const {
    std::uint64_t mask = 0;
    for (const auto& id : vars) {
        std::size_t j;
        try {
            j = index_of(id);
        } catch (const Error&) {
            throw Error(std::string("unknown variable ") + to_string(id) + " in " + role);
        }
        mask |= std::uint64_t{1} << j;
    }
    return mask;
}

JointTable JointTable::marginal(const VarSet& keep) const {
    std::uint64_t mask = subset_mask(keep, "marginal");

    std::vector<Variable> kept_vars;
    std::vector<std::size_t> kept_idx;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
        if (mask & (std::uint64_t{1} << j)) {
            kept_vars.push_back(vars_[j]);
            kept_idx.push_back(j);
        }
    }

    std::vector<std::uint64_t> kept_place(kept_idx.size(), 1);
    std::uint64_t span = 1;
    for (std::size_t j = kept_idx.size(); j-- > 0;) {
        kept_place[j] = span;
        span *= static_cast<std::uint64_t>(kept_vars[j].alphabet);
    }

    std::map<std::uint64_t, std::uint64_t> out;
    for (const auto& [key, w] : support_) {
        std::uint64_t reduced = 0;
        for (std::size_t j = 0; j < kept_idx.size(); ++j) {
            std::size_t src = kept_idx[j];
            reduced += ((key / place_[src]) %
                        static_cast<std::uint64_t>(vars_[src].alphabet)) *
                       kept_place[j];
        }
        out[reduced] += w;
    }
    return JointTable(std::move(kept_vars), std::move(out), normalizer_);
}

JointTable JointTable::extended(
    const std::vector<Variable>& new_vars,
    const std::function<std::vector<int>(const Assignment&)>& derive) const {
    for (const auto& v : new_vars)
        if (has_variable(v.id)) throw Error("variable " + to_string(v.id) + " already exists");

    std::vector<Variable> vars = vars_;
    vars.insert(vars.end(), new_vars.begin(), new_vars.end());

    std::uint64_t tail_span = 1;
    for (const auto& v : new_vars)
        tail_span = checked_mul(tail_span, static_cast<std::uint64_t>(v.alphabet),
                                "extended state space");

    std::map<std::uint64_t, std::uint64_t> out;
    for_each_point([&](const Assignment& a, std::uint64_t w) {
        std::vector<int> extra = derive(a);
        if (extra.size() != new_vars.size())
            throw Error("derived assignment arity mismatch");
        std::uint64_t tail = 0;
        for (std::size_t j = 0; j < new_vars.size(); ++j) {
            if (extra[j] < 0 || extra[j] >= new_vars[j].alphabet)
                throw Error("derived symbol outside alphabet of " + to_string(new_vars[j].id));
            tail = tail * static_cast<std::uint64_t>(new_vars[j].alphabet) +
                   static_cast<std::uint64_t>(extra[j]);
        }
        out[encode(a) * tail_span + tail] += w;
    });
    return JointTable(std::move(vars), std::move(out), normalizer_);
}

double JointTable::entropy_of_mask_uncached(std::uint64_t mask) const {
    // Accumulate Σ w·log2(w) over the marginal defined by `mask`.
    // Marginal cells are collected in a map keyed by the reduced assignment,
    // so the summation order is canonical and runs reproduce bit-identically.
    std::map<std::uint64_t, std::uint64_t> cells;
    for (const auto& [key, w] : support_) {
        std::uint64_t reduced = 0;
        for (std::size_t j = 0; j < vars_.size(); ++j) {
            if (!(mask & (std::uint64_t{1} << j))) continue;
            reduced += ((key / place_[j]) %
                        static_cast<std::uint64_t>(vars_[j].alphabet)) *
                       place_[j];
        }
        cells[reduced] += w;
    }

    long double acc = 0.0L;
    for (const auto& [cell, w] : cells) {
        (void)cell;
        acc += static_cast<long double>(w) *
               std::log2(static_cast<long double>(w));
    }
    long double n = static_cast<long double>(normalizer_);
    long double h = std::log2(n) - acc / n;
    if (h < 0.0L && h > -1e-12L) h = 0.0L;  // exact-zero cases may round below zero
    return static_cast<double>(h);
}

double JointTable::entropy_of_mask(std::uint64_t mask) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->bits.find(mask);
        if (it != cache_->bits.end()) return it->second;
    }
    double h = entropy_of_mask_uncached(mask);
    std::lock_guard<std::mutex> lock(cache_->mutex);
    cache_->bits.emplace(mask, h);
    return h;
}

double JointTable::entropy(const VarSet& vars) const {
    return entropy_of_mask(subset_mask(vars, "entropy"));
}

double JointTable::conditional_entropy(const VarSet& vars, const VarSet& given) const {
    std::uint64_t mv = subset_mask(vars, "conditional entropy");
    std::uint64_t mg = subset_mask(given, "conditional entropy");
    return entropy_of_mask(mv | mg) - entropy_of_mask(mg);
}

double JointTable::conditional_mutual_info(const VarSet& a, const VarSet& b,
                                           const VarSet& given) const {
    std::uint64_t ma = subset_mask(a, "mutual information");
    std::uint64_t mb = subset_mask(b, "mutual information");
    std::uint64_t mc = subset_mask(given, "mutual information");
    if ((ma & mb) || (ma & mc) || (mb & mc))
        throw Error("variable sets of I(A;B|C) must be pairwise disjoint");
    return entropy_of_mask(ma | mc) + entropy_of_mask(mb | mc) -
           entropy_of_mask(ma | mb | mc) - entropy_of_mask(mc);
}

MarkovResult JointTable::is_markov_chain(const VarSet& a, const VarSet& b,
                                         const VarSet& c, double tol) const {
    double gap = conditional_mutual_info(a, c, b);
    return {gap <= tol, gap};
}

IndependenceResult JointTable::is_independent(const std::vector<VarSet>& groups,
                                              double tol) const {
    if (groups.size() < 2) throw Error("independence test needs at least two groups");
    std::uint64_t all = 0;
    long double sum = 0.0L;
    for (const auto& g : groups) {
        std::uint64_t m = subset_mask(g, "independence test");
        if (m & all) throw Error("independence test groups must be disjoint");
        all |= m;
        sum += entropy_of_mask(m);
    }
    double gap = static_cast<double>(sum - entropy_of_mask(all));
    return {gap <= tol, gap};
}

JointTable prepend_zero(const JointTable& table, const std::string& signal,
                        const std::string& new_name) {
    std::vector<int> times;
    for (const auto& v : table.variables())
        if (v.id.signal == signal) times.push_back(v.id.time);
    if (times.empty()) throw Error("unknown signal " + signal);
    std::sort(times.begin(), times.end());
    int k = times.back();
    for (int t = 1; t <= k; ++t)
        if (times[static_cast<std::size_t>(t) - 1] != t)
            throw Error("signal " + signal + " is missing time " + std::to_string(t));

    std::vector<Variable> new_vars;
    std::vector<std::size_t> source_idx;  // index of signal(t−1) for t ≥ 2
    new_vars.push_back({{new_name, 1}, 1});
    for (int t = 2; t <= k; ++t) {
        VariableId src{signal, t - 1};
        new_vars.push_back({{new_name, t}, table.alphabet_of(src)});
        source_idx.push_back(table.index_of(src));
    }

    return table.extended(new_vars, [&, source_idx](const Assignment& a) {
        std::vector<int> out;
        out.reserve(source_idx.size() + 1);
        out.push_back(0);
        for (std::size_t j : source_idx) out.push_back(a[j]);
        return out;
    });
}

}  // namespace dirflow
