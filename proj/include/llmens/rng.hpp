#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace llmens {

// Versioned PRNG: "splitmix64-v1".
//
// Every seeded random decision in the project (corpus splits, RSE draws,
// k-means++ seeding, mock-model noise) goes through this generator so that
// results are reproducible bit-for-bit across platforms and can be re-derived
// by other implementations. The algorithm is Steele/Lea/Flood's SplitMix64:
//
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
//
// Derived draws (documented because splits must be reproducible):
//   bounded(n): rejection sampling; draw x until x >= 2^64 mod n, return x % n
//   u01():      (next() >> 11) * 2^-53, uniform in [0, 1)
//   shuffle:    Fisher-Yates, i from n-1 down to 1, j = bounded(i+1)
//   sample k:   partial Fisher-Yates, i from 0 to k-1, swap(a[i], a[i+bounded(n-i)])
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Unbiased integer in [0, n). n must be > 0.
    std::uint64_t bounded(std::uint64_t n) {
        // 2^64 mod n, computed without 128-bit arithmetic
        const std::uint64_t threshold = (0ULL - n) % n;
        for (;;) {
            const std::uint64_t x = next();
            if (x >= threshold) return x % n;
        }
    }

    // Uniform double in [0, 1), 53 random bits.
    double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // First k elements of a partial Fisher-Yates shuffle of [0, n), in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k && i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

  private:
    std::uint64_t state_;
};

// FNV-1a 64-bit hash. Used to key text-derived deterministic streams
// (test embedder, mock backend) and config hashes.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Order-sensitive combiner for multi-part stream keys.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
    return g.next();
}

}  // namespace llmens
