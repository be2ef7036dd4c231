#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dst/evidence.hpp"
#include "dst/frame.hpp"
#include "dst/random.hpp"

namespace dst {

// Slack used when deciding dominance and flow feasibility.
inline constexpr double kConsTol = 1e-9;

struct ConsistencyVerdict {
    bool consistent = true;
    SubsetMask witness = 0;   // worst-violating subset when inconsistent
    double slack = 0.0;       // min over A of p(A) - Bel(A)
};

namespace detail {

// Subset sums of a per-element vector, table[A] = sum over x in A.
inline std::vector<double> subset_sums(const std::vector<double>& p) {
    std::vector<double> table(std::size_t{1} << p.size(), 0.0);
    for (SubsetMask a = 1; a < table.size(); ++a) {
        SubsetMask low = a & (a ^ (a - 1));
        table[a] = table[a ^ low] + p[std::countr_zero(low)];
    }
    return table;
}

} // namespace detail

// Dominance check: p is in the credal set of Bel iff Bel(A) <= p(A) for
// every subset A. Checked exhaustively over all 2^N subsets.
inline ConsistencyVerdict is_consistent(const ProbabilityVector& p, const BeliefFunction& bel) {
    if (!(p.frame() == bel.frame()))
        throw std::invalid_argument("is_consistent: frames differ");
    std::vector<double> psum = detail::subset_sums(p.p());
    ConsistencyVerdict v;
    bool first = true;
    for (SubsetMask a = 1; a < psum.size(); ++a) {
        double slack = psum[a] - bel.at(a);
        if (first || slack < v.slack) {
            v.slack = slack;
            v.witness = a;
            first = false;
        }
    }
    v.consistent = v.slack >= -kConsTol;
    return v;
}

// Split of each focal mass among its members: entries (A, x) -> alpha >= 0
// with x in A. Row sums recover the mass assignment, column sums a
// probability vector.
class Allocation {
public:
    using Splits = std::map<SubsetMask, std::map<int, double>>;

    Allocation(Frame frame, Splits entries)
        : frame_(std::move(frame)), entries_(std::move(entries)) {
        for (const auto& [set, split] : entries_) {
            if (set == 0) throw std::invalid_argument("allocation: empty focal set");
            frame_.require_mask(set);
            for (const auto& [x, alpha] : split) {
                if (!(set & singleton_mask(x)))
                    throw std::invalid_argument("allocation: element outside its focal set");
                if (alpha < 0.0) throw std::invalid_argument("allocation: negative entry");
            }
        }
    }

    const Frame& frame() const { return frame_; }
    const Splits& entries() const { return entries_; }

    double at(SubsetMask a, int x) const {
        auto it = entries_.find(a);
        if (it == entries_.end()) return 0.0;
        auto jt = it->second.find(x);
        return jt == it->second.end() ? 0.0 : jt->second;
    }

private:
    Frame frame_;
    Splits entries_;
};

namespace detail {

// Small Edmonds-Karp max-flow used for allocation feasibility. Node ids:
// 0 = source, 1..F = focal sets, F+1..F+N = elements, F+N+1 = sink.
class MaxFlow {
public:
    explicit MaxFlow(int nodes) : adj_(nodes) {}

    int add_arc(int from, int to, double cap) {
        adj_[from].push_back({to, cap, static_cast<int>(adj_[to].size())});
        adj_[to].push_back({from, 0.0, static_cast<int>(adj_[from].size()) - 1});
        return static_cast<int>(adj_[from].size()) - 1;
    }

    double run(int source, int sink) {
        constexpr double eps = 1e-14;
        double total = 0.0;
        while (true) {
            std::vector<std::pair<int, int>> parent(adj_.size(), {-1, -1});
            std::deque<int> queue{source};
            parent[source] = {source, 0};
            while (!queue.empty() && parent[sink].first < 0) {
                int u = queue.front();
                queue.pop_front();
                for (int k = 0; k < static_cast<int>(adj_[u].size()); ++k) {
                    const Arc& arc = adj_[u][k];
                    if (arc.cap > eps && parent[arc.to].first < 0) {
                        parent[arc.to] = {u, k};
                        queue.push_back(arc.to);
                    }
                }
            }
            if (parent[sink].first < 0) break;
            double bottleneck = 2.0;
            for (int v = sink; v != source;) {
                auto [u, k] = parent[v];
                bottleneck = std::min(bottleneck, adj_[u][k].cap);
                v = u;
            }
            for (int v = sink; v != source;) {
                auto [u, k] = parent[v];
                Arc& arc = adj_[u][k];
                arc.cap -= bottleneck;
                adj_[arc.to][arc.rev].cap += bottleneck;
                v = u;
            }
            total += bottleneck;
        }
        return total;
    }

    // Flow pushed through an arc previously returned by add_arc.
    double flow(int from, int k) const {
        const Arc& arc = adj_[from][k];
        return adj_[arc.to][arc.rev].cap;
    }

private:
    struct Arc {
        int to;
        double cap;
        int rev;
    };
    std::vector<std::vector<Arc>> adj_;
};

struct FlowFit {
    Allocation::Splits splits;    // shipped flow per (focal, element)
    std::vector<double> leftover; // unshipped mass per focal, focal order
    double shipped = 0.0;
};

// Ship focal masses toward per-element capacity targets. Shipped flow is a
// partial allocation; whatever the targets cannot absorb comes back as
// per-focal leftovers.
inline FlowFit flow_toward(const MassFunction& m, const std::vector<double>& target) {
    const int n = m.frame().size();
    const int f = m.focal_count();
    MaxFlow net(f + n + 2);
    const int source = 0, sink = f + n + 1;
    std::vector<std::pair<SubsetMask, double>> focals(m.focal().begin(), m.focal().end());
    std::vector<std::vector<std::pair<int, int>>> member_arcs(f);
    for (int i = 0; i < f; ++i) {
        net.add_arc(source, 1 + i, focals[i].second);
        for (int x = 0; x < n; ++x)
            if (focals[i].first & singleton_mask(x))
                member_arcs[i].push_back({x, net.add_arc(1 + i, 1 + f + x, 2.0)});
    }
    for (int x = 0; x < n; ++x) net.add_arc(1 + f + x, sink, target[x]);

    FlowFit fit;
    fit.shipped = net.run(source, sink);
    fit.leftover.resize(f);
    for (int i = 0; i < f; ++i) {
        double sent = 0.0;
        auto& split = fit.splits[focals[i].first];
        for (auto [x, k] : member_arcs[i]) {
            double v = net.flow(1 + i, k);
            if (v > 0.0) split[x] = v;
            sent += v;
        }
        fit.leftover[i] = std::max(0.0, focals[i].second - sent);
    }
    return fit;
}

// One flat-Dirichlet split of every focal mass; always a valid allocation.
inline Allocation::Splits random_splits(const MassFunction& m, Rng& rng) {
    Allocation::Splits splits;
    for (const auto& [set, mass] : m.focal()) {
        std::vector<int> members;
        for (int x = 0; x < m.frame().size(); ++x)
            if (set & singleton_mask(x)) members.push_back(x);
        std::vector<double> w = rng.simplex(static_cast<int>(members.size()));
        auto& split = splits[set];
        for (std::size_t k = 0; k < members.size(); ++k) split[members[k]] = mass * w[k];
    }
    return splits;
}

inline std::vector<double> split_marginal(const Allocation::Splits& splits, int n) {
    std::vector<double> p(n, 0.0);
    for (const auto& [set, split] : splits)
        for (const auto& [x, alpha] : split) p[x] += alpha;
    return p;
}

} // namespace detail

// Constructive dominance witness: succeeds exactly when p lies in the
// credal set, returning masses split so that row sums give m and column
// sums give p. Solved as a max-flow feasibility problem on the bipartite
// focal/element network; flow value 1 means feasible.
inline std::optional<Allocation> build_allocation(const MassFunction& m, const ProbabilityVector& p) {
    if (!(m.frame() == p.frame()))
        throw std::invalid_argument("build_allocation: frames differ");
    detail::FlowFit fit = detail::flow_toward(m, p.p());
    if (fit.shipped < 1.0 - kConsTol) return std::nullopt;
    return Allocation(m.frame(), std::move(fit.splits));
}

// Row and column sums of an allocation.
inline std::pair<ProbabilityVector, MassFunction> allocation_marginals(const Allocation& alloc) {
    std::vector<double> p(alloc.frame().size(), 0.0);
    MassFunction::FocalMap focal;
    for (const auto& [set, split] : alloc.entries()) {
        double row = 0.0;
        for (const auto& [x, alpha] : split) {
            p[x] += alpha;
            row += alpha;
        }
        if (row > 0.0) focal.emplace(set, row);
    }
    return {ProbabilityVector(alloc.frame(), std::move(p)),
            MassFunction(alloc.frame(), std::move(focal))};
}

// Random members of the credal set, built by splitting every focal mass
// with flat-Dirichlet weights. Deterministic for a given seed.
inline std::vector<ProbabilityVector> sample_consistent(const MassFunction& m,
                                                        std::uint64_t seed, int count) {
    Rng rng(derive_seed(seed, "sample_consistent"));
    std::vector<ProbabilityVector> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        auto splits = detail::random_splits(m, rng);
        out.emplace_back(m.frame(), detail::split_marginal(splits, m.frame().size()));
    }
    return out;
}

} // namespace dst
