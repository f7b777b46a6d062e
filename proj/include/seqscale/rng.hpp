#pragma once

#include <cstdint>
#include <string_view>

// Counter-based splittable random streams built on the splitmix64 finalizer.
// A Stream is identified by a 64-bit key; draws are pure functions of
// (key, counter), so parallel execution order never changes the values.
namespace seqscale::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Folds one word into a key. Composes left-to-right: derive(derive(s, a), b).
constexpr std::uint64_t derive(std::uint64_t key, std::uint64_t word) {
    return mix64(key + kGolden + word);
}

// FNV-1a, used to key streams by question id.
constexpr std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

class Stream {
public:
    constexpr explicit Stream(std::uint64_t key) : key_(key) {}

    constexpr Stream child(std::uint64_t word) const { return Stream(derive(key_, word)); }

    constexpr std::uint64_t word(std::uint64_t counter) const {
        return mix64(key_ + counter * kGolden + kGolden);
    }

    // Uniform draw in [0, 1) with 53 significant bits.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; consumes counters 2n and 2n+1.
    double gaussian(std::uint64_t counter) const;

    constexpr std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
};

} // namespace seqscale::rng
