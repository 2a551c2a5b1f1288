#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace continuum {

// False positive rate of a Bloom filter with an optimal hash count is
// approximately kFprBase^(bits per entry).
inline constexpr double kFprBase = 0.6185;

inline double fpr_from_bits_per_entry(double bits_per_entry) {
    if (bits_per_entry <= 0.0) return 1.0;
    return std::pow(kFprBase, bits_per_entry);
}

inline double bits_per_entry_for_fpr(double fpr) {
    if (fpr >= 1.0) return 0.0;
    return std::log(fpr) / std::log(kFprBase);
}

// Splits `budget` bits across groups proportional to their entry counts.
inline std::vector<double> allocate_even(const std::vector<double>& entries, double budget) {
    std::vector<double> bits(entries.size(), 0.0);
    double total = 0.0;
    for (double n : entries) total += n;
    if (total <= 0.0 || budget <= 0.0) return bits;
    for (std::size_t i = 0; i < entries.size(); ++i) bits[i] = budget * entries[i] / total;
    return bits;
}

// Minimises sum(weight_i * fpr_i) subject to sum(bits_i) == budget.
// The optimum has fpr_i proportional to entries_i / weight_i. Groups that
// would get negative bits get none; groups that would exceed `cap` bits per
// entry are pinned at the cap and the rest is re-solved.
inline std::vector<double> allocate_monkey(const std::vector<double>& entries,
                                           const std::vector<double>& weights, double budget,
                                           double cap = std::numeric_limits<double>::infinity()) {
    const std::size_t n = entries.size();
    std::vector<double> bpe(n, 0.0);
    std::vector<int> state(n, 0);  // 0 active, 1 dropped, 2 capped
    for (std::size_t i = 0; i < n; ++i)
        if (entries[i] <= 0.0 || weights[i] <= 0.0) state[i] = 1;
    if (budget <= 0.0) {
        return std::vector<double>(n, 0.0);
    }
    const double c = -std::log(kFprBase);
    for (std::size_t iter = 0; iter < 4 * n + 4; ++iter) {
        double remaining = budget;
        double active_entries = 0.0, weighted_log = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (state[i] == 2) remaining -= entries[i] * cap;
            if (state[i] != 0) continue;
            active_entries += entries[i];
            weighted_log += entries[i] * std::log(entries[i] / weights[i]);
        }
        if (active_entries <= 0.0) break;
        // -ln(mu) where fpr_i = mu * entries_i / weights_i
        const double neg_log_mu = (c * remaining + weighted_log) / active_entries;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (state[i] != 0) continue;
            bpe[i] = (neg_log_mu - std::log(entries[i] / weights[i])) / c;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (state[i] == 0 && bpe[i] <= 0.0) {
                state[i] = 1;
                bpe[i] = 0.0;
                changed = true;
            }
        }
        if (changed) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (state[i] == 0 && bpe[i] > cap) {
                state[i] = 2;
                changed = true;
            }
        }
        if (!changed) break;
    }
    std::vector<double> bits(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (state[i] == 1) continue;
        bits[i] = (state[i] == 2 ? cap : bpe[i]) * entries[i];
    }
    return bits;
}

}  // namespace continuum
