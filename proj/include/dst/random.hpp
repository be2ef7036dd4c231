#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dst {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable tag hash for deriving independent seed streams per subsystem.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = seed ^ h;
    return splitmix64(s);
}

// Deterministic generator. Draws are extracted manually from mt19937_64 so
// that sequences are identical across standard library implementations
// (std::uniform_real_distribution and friends are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // (0, 1]
    double positive_uniform() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential() { return -std::log(positive_uniform()); }

    // Inclusive range, rejection sampled so every value is equally likely.
    int uniform_int(int lo, int hi) {
        const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % range;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return lo + static_cast<int>(x % range);
    }

    // Flat Dirichlet draw: k positive weights summing to 1.
    std::vector<double> simplex(int k) {
        std::vector<double> w(k);
        double total = 0.0;
        for (double& v : w) {
            v = exponential();
            total += v;
        }
        for (double& v : w) v /= total;
        return w;
    }

    std::vector<int> permutation(int n) {
        std::vector<int> p(n);
        for (int i = 0; i < n; ++i) p[i] = i;
        for (int i = n - 1; i > 0; --i) {
            int j = uniform_int(0, i);
            std::swap(p[i], p[j]);
        }
        return p;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace dst
