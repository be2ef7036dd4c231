#pragma once

#include <cmath>
#include <iterator>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dst/frame.hpp"

namespace dst {

// Input masses and probabilities must sum to 1 within this tolerance; such
// inputs are renormalized exactly by dividing by the sum.
inline constexpr double kMassTol = 1e-9;
// Exact-arithmetic roundtrips (zeta/Moebius pairs) are held to this bound.
inline constexpr double kRoundTol = 1e-12;

// -t*log2(t) with the 0*log(0) = 0 convention.
inline double entropy_term(double t) { return t > 0.0 ? -t * std::log2(t) : 0.0; }

// Basic probability assignment: a sparse map from focal sets to positive
// masses summing to 1. The empty set never appears (its mass is 0 by
// omission). Focal sets iterate in increasing bitmask order.
class MassFunction {
public:
    using FocalMap = std::map<SubsetMask, double>;

    MassFunction(Frame frame, FocalMap focal)
        : frame_(std::move(frame)), focal_(std::move(focal)) {
        if (focal_.empty()) throw std::invalid_argument("mass: no focal sets");
        double total = 0.0;
        for (const auto& [set, mass] : focal_) {
            if (set == 0) throw std::invalid_argument("mass: empty set cannot be focal");
            frame_.require_mask(set);
            if (!(mass > 0.0)) throw std::invalid_argument("mass: non-positive mass for " + frame_.describe(set));
            total += mass;
        }
        if (std::abs(total - 1.0) > kMassTol)
            throw std::invalid_argument("mass: masses sum to " + std::to_string(total) + ", not 1");
        if (total != 1.0)
            for (auto& [set, mass] : focal_) mass /= total;
        // pin the stored sum to exactly 1 by absorbing the division residue
        // into the last entry, so re-reading an emitted document changes
        // nothing and parse/emit is an identity
        double head = 0.0;
        for (auto it = focal_.begin(); std::next(it) != focal_.end(); ++it)
            head += it->second;
        const double tail = 1.0 - head;
        if (tail > 0.0) std::prev(focal_.end())->second = tail;
    }

    const Frame& frame() const { return frame_; }
    const FocalMap& focal() const { return focal_; }
    int focal_count() const { return static_cast<int>(focal_.size()); }

    double mass(SubsetMask a) const {
        auto it = focal_.find(a);
        return it == focal_.end() ? 0.0 : it->second;
    }

    bool is_focal(SubsetMask a) const { return focal_.count(a) != 0; }

private:
    Frame frame_;
    FocalMap focal_;
};

// Dense table of Bel(A) for every A. Boundary conditions are enforced here;
// full validity (non-negative Moebius transform) is the job of
// is_belief_function and mass_from_belief.
class BeliefFunction {
public:
    BeliefFunction(Frame frame, std::vector<double> values)
        : frame_(std::move(frame)), values_(std::move(values)) {
        if (values_.size() != frame_.table_size())
            throw std::invalid_argument("belief: table size must be 2^N");
        if (std::abs(values_.front()) > kMassTol)
            throw std::invalid_argument("belief: Bel(empty) must be 0");
        if (std::abs(values_.back() - 1.0) > kMassTol)
            throw std::invalid_argument("belief: Bel(X) must be 1");
    }

    const Frame& frame() const { return frame_; }
    const std::vector<double>& values() const { return values_; }
    double at(SubsetMask a) const { return values_[a]; }

private:
    Frame frame_;
    std::vector<double> values_;
};

// Distribution over frame elements.
class ProbabilityVector {
public:
    ProbabilityVector(Frame frame, std::vector<double> p)
        : frame_(std::move(frame)), p_(std::move(p)) {
        if (static_cast<int>(p_.size()) != frame_.size())
            throw std::invalid_argument("probability: wrong length");
        double total = 0.0;
        for (double v : p_) {
            if (v < 0.0 || v > 1.0 + kMassTol)
                throw std::invalid_argument("probability: entry outside [0,1]");
            total += v;
        }
        if (std::abs(total - 1.0) > kMassTol)
            throw std::invalid_argument("probability: entries sum to " + std::to_string(total) + ", not 1");
        if (total != 1.0)
            for (double& v : p_) v /= total;
    }

    const Frame& frame() const { return frame_; }
    const std::vector<double>& p() const { return p_; }
    double at(int i) const { return p_[i]; }

private:
    Frame frame_;
    std::vector<double> p_;
};

inline double shannon_entropy(const ProbabilityVector& p) {
    double h = 0.0;
    for (double v : p.p()) h += entropy_term(v);
    return h;
}

namespace detail {

// In-place subset-sum (zeta) sweep: table[A] becomes sum over B subset of A.
inline void zeta_transform(std::vector<double>& table, int n) {
    for (int i = 0; i < n; ++i) {
        const SubsetMask bit = singleton_mask(i);
        for (SubsetMask s = 0; s < table.size(); ++s)
            if (s & bit) table[s] += table[s ^ bit];
    }
}

// Inverse of zeta_transform.
inline void moebius_transform(std::vector<double>& table, int n) {
    for (int i = 0; i < n; ++i) {
        const SubsetMask bit = singleton_mask(i);
        for (SubsetMask s = 0; s < table.size(); ++s)
            if (s & bit) table[s] -= table[s ^ bit];
    }
}

} // namespace detail

// Bel(A) = sum of m(B) over B subset of A, for all 2^N subsets.
inline BeliefFunction belief_from_mass(const MassFunction& m) {
    std::vector<double> table(m.frame().table_size(), 0.0);
    for (const auto& [set, mass] : m.focal()) table[set] = mass;
    detail::zeta_transform(table, m.frame().size());
    // Pin the boundary exactly; the sweep can leave it a few ulps off 1.
    table.back() = 1.0;
    return BeliefFunction(m.frame(), std::move(table));
}

// Moebius inversion of a belief table back to the sparse assignment.
// Throws when some coefficient is negative beyond kMassTol, reporting the
// offending subset.
inline MassFunction mass_from_belief(const BeliefFunction& bel) {
    std::vector<double> table = bel.values();
    detail::moebius_transform(table, bel.frame().size());
    MassFunction::FocalMap focal;
    for (SubsetMask a = 1; a < table.size(); ++a) {
        if (table[a] < -kMassTol)
            throw std::invalid_argument("not a belief function: negative mass " +
                                        std::to_string(table[a]) + " on " + bel.frame().describe(a));
        if (table[a] > kRoundTol) focal.emplace(a, table[a]);
    }
    return MassFunction(bel.frame(), std::move(focal));
}

struct BeliefVerdict {
    bool valid = true;
    SubsetMask witness = 0;
    std::string reason;
};

// Verdict form of the belief-function test on a raw dense table: boundary
// conditions plus a non-negative Moebius transform.
inline BeliefVerdict is_belief_function(const Frame& frame, const std::vector<double>& values) {
    if (values.size() != frame.table_size())
        return {false, 0, "table size must be 2^N"};
    if (std::abs(values.front()) > kMassTol)
        return {false, 0, "boundary violation: Bel(empty) != 0"};
    if (std::abs(values.back() - 1.0) > kMassTol)
        return {false, frame.full(), "boundary violation: Bel(X) != 1"};
    std::vector<double> table = values;
    detail::moebius_transform(table, frame.size());
    for (SubsetMask a = 1; a < table.size(); ++a)
        if (table[a] < -kMassTol)
            return {false, a, "negative mass " + std::to_string(table[a]) + " on " + frame.describe(a)};
    return {};
}

// m projected onto a partition: masses accumulate over sets with equal
// projection. The result lives on the block frame.
inline MassFunction project_mass(const MassFunction& m, const Partition& y) {
    if (!(m.frame() == y.frame()))
        throw std::invalid_argument("project_mass: partition is over a different frame");
    MassFunction::FocalMap focal;
    for (const auto& [set, mass] : m.focal())
        focal[project_set(set, y)] += mass;
    return MassFunction(block_frame(y), std::move(focal));
}

// Direct projection of a belief table: Bel'(C) = Bel(union of C's blocks).
inline BeliefFunction project_belief(const BeliefFunction& bel, const Partition& y) {
    if (!(bel.frame() == y.frame()))
        throw std::invalid_argument("project_belief: partition is over a different frame");
    Frame bf = block_frame(y);
    std::vector<double> table(bf.table_size(), 0.0);
    for (SubsetMask c = 0; c < table.size(); ++c) {
        SubsetMask un = 0;
        for (int i = 0; i < y.block_count(); ++i)
            if (c & singleton_mask(i)) un |= y.blocks()[i];
        table[c] = bel.at(un);
    }
    return BeliefFunction(std::move(bf), std::move(table));
}

// Carry masses along a bijection onto a same-size frame. to_target[i] is the
// target index of source element i.
inline MassFunction relabel(const MassFunction& m, const Frame& target,
                            const std::vector<int>& to_target) {
    const int n = m.frame().size();
    if (target.size() != n || static_cast<int>(to_target.size()) != n)
        throw std::invalid_argument("relabel: frames must have equal size");
    SubsetMask seen = 0;
    for (int i : to_target) {
        if (i < 0 || i >= n || (seen & singleton_mask(i)))
            throw std::invalid_argument("relabel: map is not a bijection");
        seen |= singleton_mask(i);
    }
    MassFunction::FocalMap focal;
    for (const auto& [set, mass] : m.focal()) {
        SubsetMask image = 0;
        for (int i = 0; i < n; ++i)
            if (set & singleton_mask(i)) image |= singleton_mask(to_target[i]);
        focal.emplace(image, mass);
    }
    return MassFunction(target, std::move(focal));
}

// Add an element the evidence says nothing about: same focal sets, same
// masses, one more frame element.
inline MassFunction expand(const MassFunction& m, const std::string& new_label) {
    if (m.frame().index_of(new_label) >= 0)
        throw std::invalid_argument("expand: label already in frame");
    std::vector<std::string> labels = m.frame().labels();
    labels.push_back(new_label);
    return MassFunction(Frame(std::move(labels)), m.focal());
}

// Move a (1-alpha) share of A's mass onto a strict superset B, leaving all
// other focal sets alone. Entries that fall within kMassTol of 0 are dropped.
inline MassFunction transfer(const MassFunction& m, SubsetMask a, SubsetMask b, double alpha) {
    if (!m.is_focal(a)) throw std::invalid_argument("transfer: source set is not focal");
    m.frame().require_mask(b);
    if (!(subset_of(a, b) && a != b))
        throw std::invalid_argument("transfer: target must be a strict superset of the source");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("transfer: alpha outside [0,1]");
    MassFunction::FocalMap focal = m.focal();
    const double moved = (1.0 - alpha) * focal[a];
    focal[a] *= alpha;
    focal[b] += moved;
    if (focal[a] <= kMassTol) focal.erase(a);
    if (focal[b] <= kMassTol) focal.erase(b);
    return MassFunction(m.frame(), std::move(focal));
}

// Independent combination on the product frame: every focal is the rectangle
// spanned by one focal of each factor, with the product mass. Marginalizing
// back onto rows/columns recovers the factors.
inline MassFunction product_mass(const MassFunction& m1, const MassFunction& m2) {
    const int p = m1.frame().size(), q = m2.frame().size();
    ProductStructure ps = product_structure(p, q);
    MassFunction::FocalMap focal;
    for (const auto& [a1, mass1] : m1.focal())
        for (const auto& [a2, mass2] : m2.focal()) {
            SubsetMask rect = 0;
            for (int i = 0; i < p; ++i)
                if (a1 & singleton_mask(i))
                    for (int j = 0; j < q; ++j)
                        if (a2 & singleton_mask(j)) rect |= singleton_mask(i * q + j);
            focal[rect] += mass1 * mass2;
        }
    return MassFunction(std::move(ps.frame), std::move(focal));
}

// Total ignorance within A.
inline MassFunction vacuous(const Frame& frame, SubsetMask a) {
    if (a == 0) throw std::invalid_argument("vacuous: focal set cannot be empty");
    frame.require_mask(a);
    return MassFunction(frame, {{a, 1.0}});
}

inline MassFunction vacuous(const Frame& frame) { return vacuous(frame, frame.full()); }

// Probability distribution as evidence: singleton focal sets, zero entries
// omitted.
inline MassFunction bayesian(const ProbabilityVector& p) {
    MassFunction::FocalMap focal;
    for (int i = 0; i < p.frame().size(); ++i)
        if (p.at(i) > 0.0) focal.emplace(singleton_mask(i), p.at(i));
    return MassFunction(p.frame(), std::move(focal));
}

} // namespace dst
