#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace textrobust {

// 64-bit FNV-1a. Used wherever a hash must be stable across platforms and
// runs (per-example seeds, store checksums); std::hash gives no such promise.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64_bytes(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(std::string_view(static_cast<const char*>(data), n), h);
}

// Per-example / per-stage seed: global seed XOR hash of a salt string.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view salt) {
    return seed ^ fnv1a64(salt);
}

// xoshiro256** seeded through splitmix64. Self-contained so that identical
// seeds give identical streams on every platform; <random> distributions are
// implementation-defined and would break reproducibility of outputs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            s = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Unbiased uniform draw in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller, spare value cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Fisher-Yates. shuffle_prefix leaves positions [0, k) uniformly sampled
    // without replacement, which is all the perturbation sampler needs.
    template <typename T>
    void shuffle_prefix(std::vector<T>& v, std::size_t k) {
        const std::size_t n = v.size();
        if (n < 2) return;
        if (k > n) k = n;
        for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(below(n - i));
            std::swap(v[i], v[j]);
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        shuffle_prefix(v, v.size());
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace textrobust
