#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "filter_math.hpp"

namespace continuum {

struct Environment {
    double n_entries = 0;          // N
    double entry_bits = 0;         // E
    double entries_per_page = 0;   // B
    double key_bits = 0;           // F
    double total_memory_bits = 0;  // M
    double page_bytes = 0;

    void validate() const {
        auto positive = [](const char* field, double v) {
            if (!(v > 0) || !std::isfinite(v))
                throw DomainError(field, std::string(field) + " must be positive");
        };
        positive("n_entries", n_entries);
        positive("entry_bits", entry_bits);
        positive("entries_per_page", entries_per_page);
        positive("key_bits", key_bits);
        positive("total_memory_bits", total_memory_bits);
        positive("page_bytes", page_bytes);
        if (key_bits > entry_bits)
            throw DomainError("key_bits", "key_bits exceeds entry_bits");
        // A page holds B entries up to rounding of the last entry.
        if (std::abs(entries_per_page * entry_bits - 8.0 * page_bytes) >= entry_bits)
            throw DomainError("entries_per_page",
                              "entries_per_page * entry_bits does not match page_bytes * 8");
    }
};

// The six knobs of the key-value design space.
struct DesignKnobs {
    double growth_factor = 10;             // T
    double hot_merge_threshold = 1;        // K
    double cold_merge_threshold = 1;       // Z
    double node_size_pages = 1;            // D
    double fence_filter_memory_bits = 0;   // M_F
    double buffer_memory_bits = 0;         // M_B
};

struct ModelOptions {
    double filter_drop_threshold = 1.0;  // X, bits per entry below which a filter is dropped
    double selectivity = 1e-3;           // fraction of the key space a long range touches
};

// Quantities that follow from (env, knobs). Level vectors are indexed from
// 0 for level 1; `hash_table_levels` holds 1-based level numbers.
struct DerivedDesign {
    int levels = 0;                   // L
    int cold_levels = 0;              // Y
    int no_filter_levels = 0;         // Q
    double closed_form_cold_levels = 0;
    double fence_budget_bits = 0;     // M_FP
    double filter_budget_bits = 0;    // M_BF
    double min_fence_memory_bits = 0;
    double all_hot_memory_bits = 0;
    double filter_drop_threshold = 1.0;
    bool sibling_patch = false;
    double sibling_chain_len = 1;
    std::vector<double> level_entries;
    std::vector<double> runs_per_level;
    std::vector<double> per_level_filter_bits;
    std::vector<double> per_level_fpr;
    std::vector<int> hash_table_levels;

    int hot_levels() const { return levels - cold_levels; }
};

// Worst-case expected page I/Os per operation plus memory footprint.
struct CostVector {
    double zero_point_read = 0;  // R
    double point_read = 0;       // V
    double short_range = 0;      // Q
    double long_range = 0;       // C
    double update = 0;           // W
    double memory_bits = 0;

    std::array<double, 5> terms() const {
        return {zero_point_read, point_read, short_range, long_range, update};
    }
};

inline constexpr double kEps = 1e-9;

inline double max_growth_factor(const Environment& env, const DesignKnobs& k) {
    return env.n_entries * env.entry_bits / k.buffer_memory_bits;
}

// Memory needed to point at the first node of level 1.
inline double min_fence_memory(const Environment& env) { return env.key_bits; }

inline int level_count(double n_entries, double entries_per_page, double node_pages, double T) {
    const double span = n_entries / (entries_per_page * node_pages);
    if (span <= 1.0) return 1;
    const int L = static_cast<int>(std::ceil(std::log(span) / std::log(T) - kEps));
    return std::max(1, L);
}

inline void validate_knobs(const Environment& env, const DesignKnobs& k) {
    env.validate();
    const double T = k.growth_factor;
    if (!(k.buffer_memory_bits > 0))
        throw DomainError("buffer_memory_bits", "buffer_memory_bits must be positive");
    if (!(T >= 2.0))
        throw DomainError("growth_factor", "growth_factor must be at least 2");
    const double t_max = max_growth_factor(env, k);
    if (T > t_max * (1 + kEps))
        throw DomainError("growth_factor", "growth_factor exceeds N*E/M_B = " + std::to_string(t_max));
    if (!(k.hot_merge_threshold >= 1.0) || k.hot_merge_threshold > T - 1 + kEps)
        throw DomainError("hot_merge_threshold", "hot_merge_threshold must lie in [1, T-1]");
    if (!(k.cold_merge_threshold >= 1.0) || k.cold_merge_threshold > T - 1 + kEps)
        throw DomainError("cold_merge_threshold", "cold_merge_threshold must lie in [1, T-1]");
    if (!(k.node_size_pages >= 1.0))
        throw DomainError("node_size_pages", "node_size_pages must be at least 1");
    // The buffer holds at least one node.
    const double buffer_pages = k.buffer_memory_bits / (env.entries_per_page * env.entry_bits);
    if (k.node_size_pages > buffer_pages * (1 + kEps))
        throw DomainError("node_size_pages",
                          "node_size_pages exceeds the buffer's M_B/(B*E) = " + std::to_string(buffer_pages) + " pages");
    if (!(k.fence_filter_memory_bits >= 0))
        throw DomainError("fence_filter_memory_bits", "fence_filter_memory_bits must be non-negative");
    if (k.fence_filter_memory_bits + k.buffer_memory_bits > env.total_memory_bits * (1 + kEps))
        throw DomainError("fence_filter_memory_bits",
                          "fence_filter_memory_bits + buffer_memory_bits exceeds total_memory_bits");
    if (k.fence_filter_memory_bits < min_fence_memory(env) * (1 - kEps))
        throw InsufficientMemory("fence_filter_memory_bits below the level-1 fence minimum of " +
                                 std::to_string(min_fence_memory(env)) + " bits");
}

inline DerivedDesign derive(const Environment& env, const DesignKnobs& k,
                            const ModelOptions& opt = {}) {
    validate_knobs(env, k);
    const double N = env.n_entries, B = env.entries_per_page, F = env.key_bits;
    const double T = k.growth_factor, D = k.node_size_pages, MF = k.fence_filter_memory_bits;
    const double X = opt.filter_drop_threshold;

    DerivedDesign d;
    d.filter_drop_threshold = X;
    d.min_fence_memory_bits = min_fence_memory(env);
    d.levels = level_count(N, B, D, T);
    const int L = d.levels;

    // Geometric level sizes that sum to N.
    d.level_entries.resize(L);
    const double denom = std::pow(T, L) - 1.0;
    for (int i = 0; i < L; ++i) d.level_entries[i] = N * std::pow(T, i) * (T - 1.0) / denom;

    const double per_entry = X + F / B;
    d.all_hot_memory_bits = N * per_entry;
    {
        const double ratio = N * per_entry / MF;
        d.closed_form_cold_levels =
            ratio <= 1.0 ? 0.0 : std::min<double>(L, std::floor(std::log(ratio) / std::log(T) + kEps));
    }

    // Levels take fences plus X filter bits per entry, smallest first, until
    // the budget runs out.
    int hot = 0;
    double used = 0.0;
    if (MF >= N * per_entry * (1 - kEps)) {
        hot = L;
        used = N * per_entry;
    } else if (MF < B * D * per_entry) {
        hot = 0;
    } else {
        for (int i = 0; i < L; ++i) {
            const double need = d.level_entries[i] * per_entry;
            if (used + need > MF * (1 + kEps)) break;
            used += need;
            ++hot;
        }
    }
    d.cold_levels = L - hot;
    const bool straddle = d.cold_levels > 0 && MF - used > 0.0;
    d.no_filter_levels = d.cold_levels - (straddle ? 1 : 0);

    d.fence_budget_bits = 0.0;
    for (int i = 0; i < hot; ++i) d.fence_budget_bits += d.level_entries[i] * F / B;
    d.filter_budget_bits = hot > 0 ? std::max(0.0, MF - d.fence_budget_bits) : 0.0;

    d.runs_per_level.resize(L);
    for (int i = 0; i < L; ++i)
        d.runs_per_level[i] = (i + 1 < hot) ? k.hot_merge_threshold : k.cold_merge_threshold;

    d.per_level_filter_bits.assign(L, 0.0);
    d.per_level_fpr.assign(L, 1.0);
    if (hot > 0) {
        std::vector<double> entries(d.level_entries.begin(), d.level_entries.begin() + hot);
        std::vector<double> weights(hot, 1.0);
        const auto bits = allocate_monkey(entries, weights, d.filter_budget_bits, F);
        for (int i = 0; i < hot; ++i) {
            d.per_level_filter_bits[i] = bits[i];
            const double bpe = bits[i] / entries[i];
            if (bpe >= F * (1 - kEps)) {
                d.hash_table_levels.push_back(i + 1);
                d.per_level_fpr[i] = 0.0;
            } else {
                d.per_level_fpr[i] = fpr_from_bits_per_entry(bpe);
            }
        }
    }

    d.sibling_patch = D < T / B && B < T;
    d.sibling_chain_len = d.sibling_patch ? T / B : 1.0;
    return d;
}

inline CostVector cost(const Environment& env, const DesignKnobs& k, const DerivedDesign& d,
                       const ModelOptions& opt = {}) {
    const double N = env.n_entries, B = env.entries_per_page, T = k.growth_factor;
    const double Z = k.cold_merge_threshold;
    const int L = d.levels, hot = d.hot_levels(), Y = d.cold_levels;
    const double chain_extra = d.sibling_patch ? T / B : 0.0;

    CostVector c;
    double fp = 0.0;
    for (int i = 0; i < hot; ++i) fp += d.runs_per_level[i] * d.per_level_fpr[i];
    c.zero_point_read = fp + Y * (Z + chain_extra);
    // An existing key in the oldest run of the last level: under a cold last
    // level the cascade's own I/O finds it, otherwise one more probe.
    c.point_read = Y > 0 ? c.zero_point_read : c.zero_point_read - d.per_level_fpr[L - 1] + 1.0;

    double runs = 0.0;
    for (int i = 0; i < L; ++i) runs += d.runs_per_level[i];
    c.short_range = runs + Y * chain_extra;
    c.long_range = opt.selectivity * N / B * (Z + 1.0 / T) + runs + Y * chain_extra;

    double copies = 0.0;
    for (int i = 0; i < L; ++i) copies += T / d.runs_per_level[i];
    c.update = copies / B;
    c.memory_bits = k.fence_filter_memory_bits + k.buffer_memory_bits;
    return c;
}

inline CostVector cost(const Environment& env, const DesignKnobs& k, const ModelOptions& opt = {}) {
    return cost(env, k, derive(env, k, opt), opt);
}

// ---------------------------------------------------------------- presets

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "b_plus_tree", "b_epsilon_tree", "leveled_lsm", "lazy_leveled_lsm",
        "tiered_lsm",  "lsh_table",      "sorted_array", "log"};
    return names;
}

inline DesignKnobs preset(const std::string& name, const Environment& env,
                          const ModelOptions& opt = {}) {
    env.validate();
    const double N = env.n_entries, B = env.entries_per_page, E = env.entry_bits, F = env.key_bits;
    const double X = opt.filter_drop_threshold;
    DesignKnobs k;
    k.node_size_pages = 1;
    k.buffer_memory_bits = B * E;
    const double lsm_memory = N * (F / B + 10.0);
    if (name == "b_plus_tree") {
        k.growth_factor = B;
        k.hot_merge_threshold = k.cold_merge_threshold = 1;
        k.fence_filter_memory_bits = min_fence_memory(env);
    } else if (name == "b_epsilon_tree") {
        const double T = std::max(2.0, std::round(std::sqrt(B)));
        k.growth_factor = T;
        k.hot_merge_threshold = k.cold_merge_threshold = 1;
        // Enough for level 1 only.
        const int L = level_count(N, B, 1, T);
        const double first = N * (T - 1.0) / (std::pow(T, L) - 1.0);
        k.fence_filter_memory_bits = std::max(first, B) * (X + F / B) * (1 + 1e-6);
    } else if (name == "leveled_lsm") {
        k.growth_factor = 10;
        k.hot_merge_threshold = k.cold_merge_threshold = 1;
        k.fence_filter_memory_bits = lsm_memory;
    } else if (name == "lazy_leveled_lsm") {
        k.growth_factor = 10;
        k.hot_merge_threshold = 9;
        k.cold_merge_threshold = 1;
        k.fence_filter_memory_bits = lsm_memory;
    } else if (name == "tiered_lsm") {
        k.growth_factor = 10;
        k.hot_merge_threshold = k.cold_merge_threshold = 9;
        k.fence_filter_memory_bits = lsm_memory;
    } else if (name == "lsh_table") {
        k.growth_factor = N * E / k.buffer_memory_bits;
        k.hot_merge_threshold = k.cold_merge_threshold = k.growth_factor - 1;
        k.fence_filter_memory_bits = F * N * (1.0 + 1.0 / B);
    } else if (name == "sorted_array") {
        k.growth_factor = N * E / k.buffer_memory_bits;
        k.hot_merge_threshold = k.cold_merge_threshold = 1;
        k.fence_filter_memory_bits = N * (F / B + X);
    } else if (name == "log") {
        k.growth_factor = N * E / k.buffer_memory_bits;
        k.hot_merge_threshold = k.cold_merge_threshold = k.growth_factor - 1;
        k.fence_filter_memory_bits = N * (F / B + X);
    } else {
        throw UnknownPreset(name);
    }
    return k;
}

// ---------------------------------------------------------------- LSB-tree

struct LsbTreeModel {
    double overhead = 1.0;    // C, fraction of data replicated in indexes
    double asymmetry = 20.0;  // cost ratio of a random read to a sequential write
};

inline CostVector lsb_tree_cost(const Environment& env, const LsbTreeModel& m) {
    env.validate();
    if (!(m.overhead > 0)) throw DomainError("overhead", "overhead must be positive");
    if (!(m.asymmetry > 0)) throw DomainError("asymmetry", "asymmetry must be positive");
    const double depth = std::log(env.n_entries) / std::log(env.entries_per_page);
    CostVector c;
    c.zero_point_read = c.point_read = c.short_range = c.long_range = m.overhead * depth;
    c.update = m.overhead * depth / m.asymmetry + 1.0 / m.overhead;
    c.memory_bits = m.overhead * env.n_entries * env.key_bits / env.entries_per_page;
    return c;
}

}  // namespace continuum
