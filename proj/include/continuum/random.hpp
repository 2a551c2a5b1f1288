#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace continuum {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless hash of several words, absorbed one at a time; used where draws
// must not depend on how many draws happened earlier.
inline std::uint64_t hash_words(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                                std::uint64_t d = 0) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::uint64_t w : {a, b, c, d}) h = mix64(h ^ mix64(w + 0x632be59bd9b4e019ULL)) + 0x9e3779b97f4a7c15ULL;
    return mix64(h);
}

inline double unit_from_bits(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

// xoshiro256**, seeded through splitmix64. All samplers below draw only from
// next_u64 so a seed gives the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t s = seed;
        for (auto& w : s_) w = splitmix64(s);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // [0, 1)
    double uniform() { return unit_from_bits(next_u64()); }

    // [0, n), Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) return 0;
        for (;;) {
            const std::uint64_t x = next_u64();
            const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            const std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Marsaglia polar method; the spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    // Marsaglia-Tsang; shape < 1 uses the boost u^(1/shape).
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u > 0 ? u : 0x1.0p-53, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0, c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = gamma(a), y = gamma(b);
        return x / (x + y);
    }

    // Knuth's product method for small means, PTRS (Hormann) otherwise.
    std::uint64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 30.0) {
            const double limit = std::exp(-lambda);
            std::uint64_t k = 0;
            double p = uniform();
            while (p > limit) {
                ++k;
                p *= uniform();
            }
            return k;
        }
        const double slam = std::sqrt(lambda), loglam = std::log(lambda);
        const double b = 0.931 + 2.53 * slam, a = -0.059 + 0.02483 * b;
        const double invalpha = 1.1239 + 1.1328 / (b - 3.4), vr = 0.9277 - 3.6224 / (b - 2);
        for (;;) {
            const double U = uniform() - 0.5, V = uniform();
            const double us = 0.5 - std::abs(U);
            const double k = std::floor((2 * a / us + b) * U + lambda + 0.43);
            if (us >= 0.07 && V <= vr) return static_cast<std::uint64_t>(k);
            if (k < 0 || (us < 0.013 && V > us)) continue;
            if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <=
                -lambda + k * loglam - std::lgamma(k + 1))
                return static_cast<std::uint64_t>(k);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4]{};
    double spare_ = 0;
    bool has_spare_ = false;
};

// Zeta distribution truncated to ranks 1..n, sampled by inverse CDF.
class ZetaSampler {
public:
    ZetaSampler(std::uint64_t n, double s) : cdf_(n) {
        double acc = 0;
        for (std::uint64_t k = 0; k < n; ++k) {
            acc += std::pow(static_cast<double>(k + 1), -s);
            cdf_[k] = acc;
        }
        for (auto& c : cdf_) c /= acc;
    }

    // Returns a rank in [1, n].
    std::uint64_t sample(Rng& rng) const {
        const double u = rng.uniform();
        std::uint64_t lo = 0, hi = cdf_.size() - 1;
        while (lo < hi) {
            const std::uint64_t mid = (lo + hi) / 2;
            if (cdf_[mid] > u) hi = mid;
            else lo = mid + 1;
        }
        return lo + 1;
    }

private:
    std::vector<double> cdf_;
};

}  // namespace continuum
