#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dst/credal.hpp"
#include "dst/evidence.hpp"
#include "dst/frame.hpp"
#include "dst/random.hpp"

namespace dst {

// Tolerance for exact-path AU comparisons.
inline constexpr double kAuTol = 1e-9;

struct AURound {
    SubsetMask set;
    double ratio;
};

struct AUResult {
    double value;             // bits
    ProbabilityVector argmax; // maximizing distribution
    std::vector<AURound> rounds;
};

// Maximum Shannon entropy over all probability vectors dominating Bel.
// Greedy decomposition: over the elements not yet removed, pick the set A
// with the largest residual ratio (Bel(A u R) - Bel(R)) / |A|, assign that
// ratio to every element of A, remove A, repeat. Ties prefer larger |A|,
// then the smaller bitmask, so the output is deterministic.
inline AUResult au(const BeliefFunction& bel) {
    const Frame& frame = bel.frame();
    const int n = frame.size();
    const SubsetMask full = frame.full();
    std::vector<double> p(n, 0.0);
    std::vector<AURound> rounds;
    SubsetMask removed = 0;
    while (removed != full) {
        const SubsetMask rem = full ^ removed;
        const double base = bel.at(removed);
        SubsetMask best = 0;
        double best_ratio = 0.0;
        int best_size = 0;
        for (SubsetMask s = rem; s != 0; s = (s - 1) & rem) {
            const double ratio = (bel.at(removed | s) - base) / set_size(s);
            const int size = set_size(s);
            const bool better =
                best == 0 || ratio > best_ratio ||
                (ratio == best_ratio &&
                 (size > best_size || (size == best_size && s < best)));
            if (better) {
                best = s;
                best_ratio = ratio;
                best_size = size;
            }
        }
        const double ratio = std::max(0.0, best_ratio);
        for (int x = 0; x < n; ++x)
            if (best & singleton_mask(x)) p[x] = ratio;
        rounds.push_back({best, ratio});
        removed |= best;
    }
    ProbabilityVector argmax(frame, std::move(p));
    double value = shannon_entropy(argmax);
    return {value, std::move(argmax), std::move(rounds)};
}

inline AUResult au(const MassFunction& m) { return au(belief_from_mass(m)); }

enum class OracleMode { grid, ascent };

struct OracleOptions {
    OracleMode mode = OracleMode::grid;
    std::uint64_t seed = 1;
    int starts = 8;    // ascent starting points
    int sweeps = 2000; // cap on coordinate sweeps per start
};

namespace detail {

// Cyclic per-focal ascent over allocations. Each step re-splits one focal
// mass among its members so the marginal's entropy is maximized with the
// other focals held fixed (a water-filling move). The objective is concave
// and the constraint set is a product of per-focal simplices, so the sweep
// converges to the global maximum from any start.
class Ascender {
public:
    explicit Ascender(const MassFunction& m) : n_(m.frame().size()) {
        for (const auto& [set, mass] : m.focal()) {
            std::vector<int> mem;
            for (int x = 0; x < n_; ++x)
                if (set & singleton_mask(x)) mem.push_back(x);
            sets_.push_back(set);
            masses_.push_back(mass);
            members_.push_back(std::move(mem));
        }
        split_.resize(sets_.size());
        for (std::size_t i = 0; i < sets_.size(); ++i)
            split_[i].assign(members_[i].size(), 0.0);
    }

    // Load per-focal splits. Partial rows (for example shipped flow from a
    // fit) are fine: the first sweep restores every row sum to m(A).
    void load(const Allocation::Splits& splits) {
        for (std::size_t i = 0; i < sets_.size(); ++i) {
            std::fill(split_[i].begin(), split_[i].end(), 0.0);
            auto it = splits.find(sets_[i]);
            if (it == splits.end()) continue;
            for (std::size_t k = 0; k < members_[i].size(); ++k) {
                auto jt = it->second.find(members_[i][k]);
                if (jt != it->second.end()) split_[i][k] = jt->second;
            }
        }
        refresh_marginal();
    }

    double run(int max_sweeps) {
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double shift = 0.0;
            for (std::size_t i = 0; i < sets_.size(); ++i) shift += refill(i);
            if (shift < 1e-13) break;
        }
        refresh_marginal();
        double h = 0.0;
        for (double v : p_) h += entropy_term(v);
        return h;
    }

    const std::vector<double>& marginal() const { return p_; }

private:
    // Re-split focal i: levels b_x + alpha_x are equalized at the water
    // level c with sum of max(0, c - b_x) equal to the focal mass.
    double refill(std::size_t i) {
        const auto& mem = members_[i];
        const std::size_t k = mem.size();
        std::vector<std::pair<double, std::size_t>> base(k);
        for (std::size_t t = 0; t < k; ++t)
            base[t] = {p_[mem[t]] - split_[i][t], t};
        std::sort(base.begin(), base.end());
        double prefix = 0.0;
        double level = 0.0;
        std::size_t filled = k;
        for (std::size_t j = 1; j <= k; ++j) {
            prefix += base[j - 1].first;
            level = (masses_[i] + prefix) / j;
            if (j == k || level <= base[j].first) {
                filled = j;
                break;
            }
        }
        double change = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t t = base[j].second;
            const double fresh = j < filled ? std::max(0.0, level - base[j].first) : 0.0;
            change += std::abs(fresh - split_[i][t]);
            p_[mem[t]] = base[j].first + fresh;
            split_[i][t] = fresh;
        }
        return change;
    }

    void refresh_marginal() {
        p_.assign(n_, 0.0);
        for (std::size_t i = 0; i < sets_.size(); ++i)
            for (std::size_t k = 0; k < members_[i].size(); ++k)
                p_[members_[i][k]] += split_[i][k];
    }

    int n_;
    std::vector<SubsetMask> sets_;
    std::vector<double> masses_;
    std::vector<std::vector<int>> members_;
    std::vector<std::vector<double>> split_;
    std::vector<double> p_;
};

// Ascend to convergence from the splits produced by shipping mass toward a
// target marginal. The result is always exactly feasible.
inline double polish_toward(const MassFunction& m, const std::vector<double>& target,
                            int sweeps) {
    Ascender climb(m);
    climb.load(flow_toward(m, target).splits);
    return climb.run(sweeps);
}

struct GridPoint {
    std::vector<int> units;
    double entropy;
};

// Enumerate integer compositions of `total` with per-coordinate bounds,
// invoking fn(units) for each.
template <typename Fn>
void enumerate_compositions(const std::vector<int>& lo, const std::vector<int>& hi,
                            int total, Fn&& fn) {
    const int n = static_cast<int>(lo.size());
    std::vector<int> lo_suffix(n + 1, 0), hi_suffix(n + 1, 0);
    for (int i = n - 1; i >= 0; --i) {
        lo_suffix[i] = lo_suffix[i + 1] + lo[i];
        hi_suffix[i] = hi_suffix[i + 1] + hi[i];
    }
    std::vector<int> units(n, 0);
    auto descend = [&](auto&& self, int i, int remaining) -> void {
        if (i == n - 1) {
            if (remaining >= lo[i] && remaining <= hi[i]) {
                units[i] = remaining;
                fn(units);
            }
            return;
        }
        const int floor_i = std::max(lo[i], remaining - hi_suffix[i + 1]);
        const int ceil_i = std::min(hi[i], remaining - lo_suffix[i + 1]);
        for (int v = floor_i; v <= ceil_i; ++v) {
            units[i] = v;
            self(self, i + 1, remaining - v);
        }
    };
    if (total >= lo_suffix[0] && total <= hi_suffix[0]) descend(descend, 0, total);
}

// Keep the best `cap` points by entropy.
inline void beam_insert(std::vector<GridPoint>& beam, std::size_t cap,
                        const std::vector<int>& units, double entropy) {
    if (beam.size() == cap && entropy <= beam.back().entropy) return;
    GridPoint pt{units, entropy};
    auto pos = std::lower_bound(beam.begin(), beam.end(), entropy,
                                [](const GridPoint& g, double e) { return g.entropy > e; });
    beam.insert(pos, std::move(pt));
    if (beam.size() > cap) beam.pop_back();
}

// Multilevel simplex sweep. Each level divides the simplex into steps of
// 1/D; the beam carries the best points satisfying dominance with slack
// (N/2 + 1)/D into windows around them at the next, finer level. The final
// level's step is below 1e-4. Top survivors are then made exactly feasible
// and ascended, so the reported value never overshoots the true maximum.
inline double grid_max(const MassFunction& m) {
    const int n = m.frame().size();
    const BeliefFunction bel = belief_from_mass(m);
    const std::size_t table = bel.frame().table_size();
    static constexpr int kLevels[] = {24, 120, 600, 3000, 15000};
    static constexpr std::size_t kBeam = 16;
    static constexpr int kWindow = 7;

    std::vector<double> p(n, 0.0);
    auto scan = [&](const std::vector<int>& lo, const std::vector<int>& hi, int d,
                    double slack, std::vector<GridPoint>& beam) {
        enumerate_compositions(lo, hi, d, [&](const std::vector<int>& units) {
            double psum[1u << 4] = {0.0};
            for (int i = 0; i < n; ++i) p[i] = static_cast<double>(units[i]) / d;
            for (SubsetMask a = 1; a < table; ++a) {
                const SubsetMask low = a & (a ^ (a - 1));
                psum[a] = psum[a ^ low] + p[std::countr_zero(low)];
                if (psum[a] < bel.at(a) - slack) return;
            }
            double h = 0.0;
            for (int i = 0; i < n; ++i) h += entropy_term(p[i]);
            beam_insert(beam, kBeam, units, h);
        });
    };

    std::vector<GridPoint> beam;
    {
        const int d = kLevels[0];
        std::vector<int> lo(n, 0), hi(n, d);
        scan(lo, hi, d, (n / 2.0 + 1) / d, beam);
    }
    for (std::size_t level = 1; level < std::size(kLevels); ++level) {
        const int d = kLevels[level];
        const int factor = d / kLevels[level - 1];
        std::vector<GridPoint> next;
        double slack = (n / 2.0 + 1) / d;
        // A scaled-up beam point keeps its marginal, so it satisfies the
        // previous level's slack; widening the slack when a window round
        // comes back empty therefore always terminates.
        while (next.empty()) {
            for (const GridPoint& g : beam) {
                std::vector<int> lo(n), hi(n);
                for (int i = 0; i < n; ++i) {
                    lo[i] = std::max(0, g.units[i] * factor - kWindow);
                    hi[i] = std::min(d, g.units[i] * factor + kWindow);
                }
                scan(lo, hi, d, slack, next);
            }
            slack *= factor;
        }
        beam = std::move(next);
    }

    std::vector<double> target(n, 1.0 / n);
    double best = polish_toward(m, target, 400);
    const std::size_t polish = std::min<std::size_t>(6, beam.size());
    for (std::size_t i = 0; i < polish; ++i) {
        const int d = kLevels[std::size(kLevels) - 1];
        for (int x = 0; x < n; ++x)
            target[x] = static_cast<double>(beam[i].units[x]) / d;
        best = std::max(best, polish_toward(m, target, 400));
    }
    return best;
}

// Multi-start ascent. One deterministic start aims at the uniform
// distribution; the rest split every focal mass at random. The reduction
// is a max, so the result is identical run to run for a fixed seed.
inline double ascent_max(const MassFunction& m, const OracleOptions& opts) {
    const int n = m.frame().size();
    std::vector<double> uniform(n, 1.0 / n);
    double best = polish_toward(m, uniform, opts.sweeps);
    Rng rng(derive_seed(opts.seed, "au_oracle"));
    Ascender climb(m);
    for (int s = 1; s < std::max(1, opts.starts); ++s) {
        climb.load(random_splits(m, rng));
        best = std::max(best, climb.run(opts.sweeps));
    }
    return best;
}

} // namespace detail

// Independent approximation of the same maximum, for cross-checking au.
// Grid mode sweeps the whole simplex and is limited to small frames;
// ascent mode climbs within the credal set from several starts.
inline double au_oracle(const MassFunction& m, const OracleOptions& opts = {}) {
    if (opts.mode == OracleMode::grid) {
        if (m.frame().size() > 4)
            throw std::length_error("grid oracle supports frames of at most 4 elements");
        return detail::grid_max(m);
    }
    return detail::ascent_max(m, opts);
}

} // namespace dst
