#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace ialign {

// Deterministic 64-bit generator (splitmix64). Used everywhere randomness is
// needed so that results are reproducible bit-for-bit across runs and
// platforms; the standard library distributions are implementation-defined
// and are deliberately avoided.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform index in [0, n). Multiply-high mapping; bias is < 2^-32 for any
    // n that fits a corpus.
    size_t uniform_index(size_t n) {
        return static_cast<size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Fisher-Yates. std::shuffle is not used because its draw sequence is
    // implementation-defined.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (size_t i = v.size() - 1; i > 0; --i) {
            size_t j = uniform_index(i + 1);
            std::swap(v[i], v[j]);
        }
    }

private:
    uint64_t state_;
};

// FNV-1a over the tag, mixed with the run seed. One run seed fans out into
// independent streams ("train/shuffle", "pairing", ...) without the streams
// ever sharing state.
inline uint64_t derive_stream_seed(uint64_t seed, std::string_view tag) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (int i = 0; i < 8; ++i) {
        h ^= (seed >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline Rng derive_stream(uint64_t seed, std::string_view tag) {
    return Rng(derive_stream_seed(seed, tag));
}

}  // namespace ialign
