#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iterator>
#include <string>
#include <utility>
#include <vector>

#include "dst/au.hpp"
#include "dst/credal.hpp"
#include "dst/evidence.hpp"
#include "dst/frame.hpp"
#include "dst/random.hpp"

namespace dst {

// Version tag of the random BPA generator, recorded in reports so a failing
// witness can be replayed against the exact generator that produced it.
inline constexpr const char* kGeneratorVersion = "bpagen-1";

// Any candidate uncertainty measure. The suite takes the measure as a value
// so counterexample measures can exercise the FAIL paths.
using Measure = std::function<double(const MassFunction&)>;

// Outcome of one requirement check. Equality-style checks report the worst
// absolute deviation as the margin (0 is perfect); inequality-style checks
// report the worst slack (negative means violated).
struct CheckReport {
    std::string id;
    bool pass = true;
    double margin = 0.0;
    std::string witness;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_perm(const std::vector<int>& perm) {
    std::string s = "(";
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(perm[i]);
    }
    return s + ")";
}

// A label guaranteed not to collide with the frame's own labels.
inline std::string fresh_label(const Frame& frame) {
    for (int k = 0;; ++k) {
        std::string label = "x" + std::to_string(k);
        if (frame.index_of(label) < 0) return label;
    }
}

// m with `moved` mass carried from focal set `from` onto `to`. Unlike
// transfer, `to` may be any other non-empty set; needed by the continuity
// probe, which perturbs evidence in arbitrary directions.
inline MassFunction move_mass(const MassFunction& m, SubsetMask from, SubsetMask to,
                              double moved) {
    MassFunction::FocalMap focal = m.focal();
    focal[from] -= moved;
    focal[to] += moved;
    if (focal[from] <= kMassTol) focal.erase(from);
    if (focal[to] <= kMassTol) focal.erase(to);
    return MassFunction(m.frame(), std::move(focal));
}

} // namespace detail

// Sampled modulus bound for the continuity probe.
inline double cont_bound(double step) {
    return std::max(1e-2, 50.0 * std::sqrt(step));
}

// Frame with labels e1..eN, used wherever a test only cares about size.
inline Frame index_frame(int n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (int i = 1; i <= n; ++i) labels.push_back("e" + std::to_string(i));
    return Frame(std::move(labels));
}

// Random BPA: focal count uniform in [1, min(2^N - 1, 8)], that many
// distinct non-empty subsets drawn uniformly, masses from a flat simplex.
inline MassFunction random_bpa(const Frame& frame, Rng& rng) {
    const int full = static_cast<int>(frame.full());
    const int k = rng.uniform_int(1, std::min(full, 8));
    std::vector<SubsetMask> sets;
    while (static_cast<int>(sets.size()) < k) {
        SubsetMask s = static_cast<SubsetMask>(rng.uniform_int(1, full));
        bool seen = false;
        for (SubsetMask t : sets) seen = seen || t == s;
        if (!seen) sets.push_back(s);
    }
    std::vector<double> w = rng.simplex(k);
    MassFunction::FocalMap focal;
    for (int i = 0; i < k; ++i) focal.emplace(sets[i], w[i]);
    return MassFunction(frame, std::move(focal));
}

// R1': relabeling the frame leaves the measure unchanged.
inline CheckReport check_symmetry(const Measure& u, const MassFunction& m,
                                  const std::vector<int>& perm) {
    const double lhs = u(m);
    const double rhs = u(relabel(m, m.frame(), perm));
    const double diff = std::abs(lhs - rhs);
    return {"R1", diff <= kAuTol, diff,
            "perm=" + detail::fmt_perm(perm) + " u=" + detail::fmt(lhs) +
                " u_relabel=" + detail::fmt(rhs)};
}

// R3: an element the evidence says nothing about changes nothing.
inline CheckReport check_expansibility(const Measure& u, const MassFunction& m) {
    const double lhs = u(m);
    const double rhs = u(expand(m, detail::fresh_label(m.frame())));
    const double diff = std::abs(lhs - rhs);
    return {"R3", diff <= kAuTol, diff,
            "u=" + detail::fmt(lhs) + " u_expanded=" + detail::fmt(rhs)};
}

// R4: projecting onto the two factors of a product frame cannot lose less
// uncertainty than the joint carries.
inline CheckReport check_subadditivity(const Measure& u, const MassFunction& m,
                                       const Partition& rows, const Partition& cols) {
    const double joint = u(m);
    const double split = u(project_mass(m, rows)) + u(project_mass(m, cols));
    const double margin = split - joint;
    return {"R4", margin >= -kAuTol, margin,
            "u_joint=" + detail::fmt(joint) + " u_rows+u_cols=" + detail::fmt(split)};
}

// R5: non-interacting product evidence carries exactly the sum.
inline CheckReport check_additivity(const Measure& u, const MassFunction& m1,
                                    const MassFunction& m2) {
    const double joint = u(product_mass(m1, m2));
    const double parts = u(m1) + u(m2);
    const double diff = std::abs(joint - parts);
    return {"R5", diff <= kAuTol, diff,
            "u_product=" + detail::fmt(joint) + " u1+u2=" + detail::fmt(parts)};
}

// R6: moving mass onto a strict superset never decreases the measure.
inline CheckReport check_monotone_dispensability(const Measure& u, const MassFunction& m,
                                                 SubsetMask a, SubsetMask b, double alpha) {
    const double before = u(m);
    const double after = u(transfer(m, a, b, alpha));
    const double margin = after - before;
    return {"R6", margin >= -kAuTol, margin,
            "A=" + m.frame().describe(a) + " B=" + m.frame().describe(b) +
                " alpha=" + detail::fmt(alpha) + " u=" + detail::fmt(before) +
                " u_transfer=" + detail::fmt(after)};
}

// R7 and R8: the two-element calibrations u(1/2,1/2,0) = 1 and u(0,0,1) = 1.
inline std::array<CheckReport, 2> check_normalizations(const Measure& u) {
    Frame two({"1", "2"});
    const double half = u(bayesian(ProbabilityVector(two, {0.5, 0.5})));
    const double vac = u(vacuous(two));
    const double d7 = std::abs(half - 1.0);
    const double d8 = std::abs(vac - 1.0);
    return {CheckReport{"R7", d7 <= kAuTol, d7, "u(1/2,1/2,0)=" + detail::fmt(half)},
            CheckReport{"R8", d8 <= kAuTol, d8, "u(0,0,1)=" + detail::fmt(vac)}};
}

// Lower and upper bounds: 0 <= u(m) <= log2 N.
inline std::array<CheckReport, 2> check_range(const Measure& u, const MassFunction& m) {
    const double value = u(m);
    const double cap = std::log2(static_cast<double>(m.frame().size()));
    const std::string w = "u=" + detail::fmt(value) + " log2N=" + detail::fmt(cap);
    return {CheckReport{"T1", value >= -kAuTol, value, w},
            CheckReport{"C4", cap - value >= -kAuTol, cap - value, w}};
}

// Shannon collapse: on Bayesian evidence the measure is Shannon entropy.
inline CheckReport check_collapse(const Measure& u, const ProbabilityVector& p) {
    const double lhs = u(bayesian(p));
    const double rhs = shannon_entropy(p);
    const double diff = std::abs(lhs - rhs);
    return {"T2", diff <= kAuTol, diff,
            "u=" + detail::fmt(lhs) + " shannon=" + detail::fmt(rhs)};
}

// Hartley collapse: on a single focal set the measure is log2 |A|.
inline CheckReport check_collapse(const Measure& u, const Frame& frame, SubsetMask a) {
    const double lhs = u(vacuous(frame, a));
    const double rhs = std::log2(static_cast<double>(set_size(a)));
    const double diff = std::abs(lhs - rhs);
    return {"T3", diff <= kAuTol, diff,
            "A=" + frame.describe(a) + " u=" + detail::fmt(lhs) +
                " log2=" + detail::fmt(rhs)};
}

// Minimality: no consistent distribution has entropy above the measure.
inline CheckReport check_minimality(const Measure& u, const MassFunction& m,
                                    int count, std::uint64_t seed) {
    const double value = u(m);
    double slack = 0.0;
    int worst = -1;
    bool first = true;
    std::vector<ProbabilityVector> samples = sample_consistent(m, seed, count);
    for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
        const double s = value - shannon_entropy(samples[i]);
        if (first || s < slack) {
            slack = s;
            worst = i;
            first = false;
        }
    }
    return {"T7", slack >= -kAuTol, slack,
            "seed=" + std::to_string(seed) + " count=" + std::to_string(count) +
                " worst_sample=" + std::to_string(worst) + " slack=" + detail::fmt(slack)};
}

// R2 probe: walk mass from I to J in small steps and bound the jumps of the
// measure along the walk. A sampled necessary condition, not a proof.
inline CheckReport check_continuity(const Measure& u, const MassFunction& m,
                                    SubsetMask i_set, SubsetMask j_set, double mesh) {
    if (!m.is_focal(i_set))
        throw std::invalid_argument("check_continuity: I must be focal");
    if (j_set == 0 || j_set == i_set)
        throw std::invalid_argument("check_continuity: J must be non-empty and differ from I");
    m.frame().require_mask(j_set);
    const double total = m.mass(i_set);
    const double bound = cont_bound(mesh);
    double prev = u(m);
    double jump = 0.0;
    double at = 0.0;
    for (double x = mesh; x < total + mesh; x += mesh) {
        const double clamped = std::min(x, total);
        const double value = u(detail::move_mass(m, i_set, j_set, clamped));
        if (std::abs(value - prev) > jump) {
            jump = std::abs(value - prev);
            at = clamped;
        }
        prev = value;
        if (clamped == total) break;
    }
    return {"R2", jump <= bound, jump,
            "I=" + m.frame().describe(i_set) + " J=" + m.frame().describe(j_set) +
                " mesh=" + detail::fmt(mesh) + " max_jump=" + detail::fmt(jump) +
                " at_x=" + detail::fmt(at) + " bound=" + detail::fmt(bound)};
}

struct SuiteOptions {
    int frame_size = 4;
    int samples = 200;
    std::uint64_t seed = 1;
};

namespace detail {

// Keep the report whose margin is closest to failure, tagging it with the
// sample index so it can be replayed.
inline void keep_worst(CheckReport& acc, CheckReport next, int sample, bool equality) {
    next.witness = "sample=" + std::to_string(sample) + " " + next.witness;
    const bool worse = acc.witness.empty() ||
                       (equality ? next.margin > acc.margin : next.margin < acc.margin);
    if (worse) {
        const std::string id = acc.id.empty() ? next.id : acc.id;
        acc = std::move(next);
        acc.id = id;
    }
}

// Random strict superset of a: a plus a non-empty subset of its complement.
inline SubsetMask random_superset(SubsetMask a, SubsetMask full, Rng& rng) {
    const SubsetMask comp = full & ~a;
    std::vector<int> bits;
    for (int x = 0; x < kMaxFrame; ++x)
        if (comp & singleton_mask(x)) bits.push_back(x);
    const int pick = rng.uniform_int(1, (1 << bits.size()) - 1);
    SubsetMask extra = 0;
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (pick & (1 << k)) extra |= singleton_mask(bits[k]);
    return a | extra;
}

// A BPA with at least one focal set that has a strict superset.
inline MassFunction random_transferable_bpa(const Frame& frame, Rng& rng) {
    while (true) {
        MassFunction m = random_bpa(frame, rng);
        for (const auto& [set, mass] : m.focal())
            if (set != frame.full()) return m;
    }
}

inline SubsetMask random_focal(const MassFunction& m, Rng& rng) {
    const int pick = rng.uniform_int(0, m.focal_count() - 1);
    auto it = m.focal().begin();
    std::advance(it, pick);
    return it->first;
}

} // namespace detail

// Run one named suite (R1..R8, T1, T2, T3, C4, T7) or all of them against a
// measure, aggregating each suite into the single worst-margin report.
// Deterministic for a fixed seed; each suite derives its own substream.
inline std::vector<CheckReport> run_suite(const Measure& u, const std::string& suite,
                                          const SuiteOptions& opts) {
    const Frame frame = index_frame(opts.frame_size);
    const std::vector<std::string> known = {"R1", "R2", "R3", "R4", "R5", "R6",
                                            "R7", "R8", "T1", "T2", "T3", "C4", "T7"};
    bool valid = suite == "all";
    for (const std::string& k : known) valid = valid || suite == k;
    if (!valid) throw std::invalid_argument("run_suite: unknown suite " + suite);
    auto wants = [&](const char* id) { return suite == "all" || suite == id; };
    std::vector<CheckReport> reports;

    if (wants("R1")) {
        Rng rng(derive_seed(opts.seed, "suite-R1"));
        CheckReport worst;
        for (int i = 0; i < opts.samples; ++i) {
            MassFunction m = random_bpa(frame, rng);
            detail::keep_worst(worst, check_symmetry(u, m, rng.permutation(frame.size())),
                               i, true);
        }
        reports.push_back(std::move(worst));
    }
    if (wants("R2")) {
        // the probe needs two distinct non-empty sets, so a 1-element frame
        // has nothing to walk
        if (frame.size() < 2) {
            reports.push_back({"R2", true, 0.0, "skipped: frame has a single element"});
        } else {
            Rng rng(derive_seed(opts.seed, "suite-R2"));
            CheckReport worst;
            for (int i = 0; i < opts.samples; ++i) {
                MassFunction m = random_bpa(frame, rng);
                const SubsetMask i_set = detail::random_focal(m, rng);
                SubsetMask j_set = i_set;
                while (j_set == i_set)
                    j_set = static_cast<SubsetMask>(
                        rng.uniform_int(1, static_cast<int>(frame.full())));
                detail::keep_worst(worst, check_continuity(u, m, i_set, j_set, 1e-3), i, true);
            }
            reports.push_back(std::move(worst));
        }
    }
    if (wants("R3")) {
        Rng rng(derive_seed(opts.seed, "suite-R3"));
        CheckReport worst;
        for (int i = 0; i < opts.samples; ++i)
            detail::keep_worst(worst, check_expansibility(u, random_bpa(frame, rng)), i, true);
        reports.push_back(std::move(worst));
    }
    if (wants("R4")) {
        Rng rng(derive_seed(opts.seed, "suite-R4"));
        CheckReport worst;
        const std::pair<int, int> shapes[] = {{2, 2}, {2, 3}, {3, 3}};
        for (int i = 0; i < opts.samples; ++i) {
            const auto [p, q] = shapes[i % 3];
            ProductStructure ps = product_structure(p, q);
            MassFunction m = random_bpa(ps.frame, rng);
            detail::keep_worst(worst, check_subadditivity(u, m, ps.rows, ps.cols), i, false);
        }
        reports.push_back(std::move(worst));
    }
    if (wants("R5")) {
        Rng rng(derive_seed(opts.seed, "suite-R5"));
        CheckReport worst;
        for (int i = 0; i < opts.samples; ++i) {
            MassFunction m1 = random_bpa(index_frame(2 + i % 2), rng);
            MassFunction m2 = random_bpa(index_frame(2 + (i / 2) % 2), rng);
            detail::keep_worst(worst, check_additivity(u, m1, m2), i, true);
        }
        reports.push_back(std::move(worst));
    }
    if (wants("R6")) {
        // a transfer needs a focal set with a strict superset, so a
        // 1-element frame has none
        if (frame.size() < 2) {
            reports.push_back({"R6", true, 0.0, "skipped: frame has a single element"});
        } else {
            Rng rng(derive_seed(opts.seed, "suite-R6"));
            CheckReport worst;
            for (int i = 0; i < opts.samples; ++i) {
                MassFunction m = detail::random_transferable_bpa(frame, rng);
                SubsetMask a = detail::random_focal(m, rng);
                while (a == frame.full()) a = detail::random_focal(m, rng);
                const SubsetMask b = detail::random_superset(a, frame.full(), rng);
                detail::keep_worst(
                    worst, check_monotone_dispensability(u, m, a, b, rng.uniform()), i, false);
            }
            reports.push_back(std::move(worst));
        }
    }
    if (wants("R7") || wants("R8")) {
        auto [r7, r8] = check_normalizations(u);
        if (wants("R7")) reports.push_back(std::move(r7));
        if (wants("R8")) reports.push_back(std::move(r8));
    }
    if (wants("T1") || wants("C4")) {
        Rng rng(derive_seed(opts.seed, "suite-range"));
        CheckReport worst_lo, worst_hi;
        for (int i = 0; i < opts.samples; ++i) {
            auto [t1, c4] = check_range(u, random_bpa(frame, rng));
            detail::keep_worst(worst_lo, std::move(t1), i, false);
            detail::keep_worst(worst_hi, std::move(c4), i, false);
        }
        if (wants("T1")) reports.push_back(std::move(worst_lo));
        if (wants("C4")) reports.push_back(std::move(worst_hi));
    }
    if (wants("T2")) {
        Rng rng(derive_seed(opts.seed, "suite-T2"));
        CheckReport worst;
        for (int i = 0; i < opts.samples; ++i) {
            ProbabilityVector p(frame, rng.simplex(frame.size()));
            detail::keep_worst(worst, check_collapse(u, p), i, true);
        }
        reports.push_back(std::move(worst));
    }
    if (wants("T3")) {
        CheckReport worst;
        for (int s = 1; s <= frame.size(); ++s) {
            const SubsetMask a = (SubsetMask{1} << s) - 1;
            detail::keep_worst(worst, check_collapse(u, frame, a), s, true);
        }
        reports.push_back(std::move(worst));
    }
    if (wants("T7")) {
        Rng rng(derive_seed(opts.seed, "suite-T7"));
        CheckReport worst;
        for (int i = 0; i < opts.samples; ++i) {
            MassFunction m = random_bpa(frame, rng);
            detail::keep_worst(
                worst, check_minimality(u, m, 100, derive_seed(opts.seed, "T7-samples") + i),
                i, false);
        }
        reports.push_back(std::move(worst));
    }
    return reports;
}

} // namespace dst
