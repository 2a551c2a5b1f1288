#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "random.hpp"

namespace continuum {

// Plain bit-array Bloom filter with double hashing.
class BloomFilter {
public:
    BloomFilter() = default;

    BloomFilter(std::uint64_t bits, std::uint64_t expected_entries, std::uint64_t seed = 0)
        : bits_(bits), seed_(seed), words_((bits + 63) / 64, 0) {
        const double bpe = expected_entries ? static_cast<double>(bits) / expected_entries : 0.0;
        hashes_ = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::lround(std::log(2.0) * bpe)));
    }

    std::uint64_t bit_count() const { return bits_; }
    std::uint32_t hash_count() const { return hashes_; }

    void add(std::uint64_t key) {
        if (bits_ == 0) return;
        const auto [h1, h2] = base_hashes(key);
        for (std::uint32_t i = 0; i < hashes_; ++i) {
            const std::uint64_t b = (h1 + i * h2) % bits_;
            words_[b >> 6] |= 1ULL << (b & 63);
        }
    }

    // A filter without bits passes every key.
    bool maybe_contains(std::uint64_t key) const {
        if (bits_ == 0) return true;
        const auto [h1, h2] = base_hashes(key);
        for (std::uint32_t i = 0; i < hashes_; ++i) {
            const std::uint64_t b = (h1 + i * h2) % bits_;
            if (!(words_[b >> 6] >> (b & 63) & 1)) return false;
        }
        return true;
    }

private:
    std::pair<std::uint64_t, std::uint64_t> base_hashes(std::uint64_t key) const {
        const std::uint64_t h1 = hash_words(key, seed_, 1);
        const std::uint64_t h2 = hash_words(key, seed_, 2) | 1;
        return {h1, h2};
    }

    std::uint64_t bits_ = 0;
    std::uint32_t hashes_ = 1;
    std::uint64_t seed_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace continuum
