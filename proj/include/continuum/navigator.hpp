#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "continuum.hpp"

namespace continuum {

// Operation frequencies; they weight the five cost terms.
struct WorkloadMix {
    double zero_point_reads = 0;  // r
    double point_reads = 0;       // v
    double short_ranges = 0;      // q
    double long_ranges = 0;       // c
    double updates = 0;           // w

    std::array<double, 5> weights() const {
        return {zero_point_reads, point_reads, short_ranges, long_ranges, updates};
    }

    void validate() const {
        const char* names[] = {"zero_point_reads", "point_reads", "short_ranges", "long_ranges",
                               "updates"};
        double sum = 0;
        auto w = weights();
        for (int i = 0; i < 5; ++i) {
            if (!(w[i] >= 0) || !std::isfinite(w[i]))
                throw DomainError(names[i], std::string(names[i]) + " must be non-negative");
            sum += w[i];
        }
        if (!(sum > 0)) throw DomainError("mix", "mix must have a positive weight");
    }
};

inline double theta(const CostVector& c, const WorkloadMix& m) {
    const auto t = c.terms();
    const auto w = m.weights();
    double s = 0;
    for (int i = 0; i < 5; ++i) s += w[i] * t[i];
    return s;
}

inline const char* cost_term_name(int i) {
    static const char* n[] = {"zero_point_read", "point_read", "short_range", "long_range", "update"};
    return n[i];
}

struct NavigationStep {
    DesignKnobs knobs;
    CostVector costs;
    double theta = 0;
    std::string bottleneck;  // empty for the starting point
    std::string move;        // e.g. "cold_merge_threshold+"
};

struct NavigationTrace {
    std::vector<NavigationStep> steps;
    const NavigationStep& final_step() const { return steps.back(); }
};

namespace detail {

enum class Move { ZUp, TUp, KDown, FiltersUp, ZDown, KUp, TDown, BufferUp, LineT, LineZ, LineBuffer, LineD };

inline const char* move_name(Move m) {
    switch (m) {
        case Move::ZUp: return "cold_merge_threshold+";
        case Move::TUp: return "growth_factor+";
        case Move::KDown: return "hot_merge_threshold-";
        case Move::FiltersUp: return "fence_filter_memory_bits+";
        case Move::ZDown: return "cold_merge_threshold-";
        case Move::KUp: return "hot_merge_threshold+";
        case Move::TDown: return "growth_factor-";
        case Move::BufferUp: return "buffer_memory_bits+";
        case Move::LineT: return "growth_factor*";
        case Move::LineZ: return "cold_merge_threshold*";
        case Move::LineBuffer: return "buffer_memory_bits*";
        case Move::LineD: return "node_size_pages*";
    }
    return "";
}

inline bool is_line(Move m) {
    return m == Move::LineT || m == Move::LineZ || m == Move::LineBuffer || m == Move::LineD;
}

// Knob directions tried for each bottleneck term, in order. The scenario
// moves come first; the line searches over the memory split, node size and
// T are the fallback once those stop helping.
inline std::vector<Move> moves_for(int term) {
    std::vector<Move> v;
    switch (term) {
        case 0:
        case 1: v = {Move::FiltersUp, Move::ZDown}; break;
        case 2: v = {Move::KDown, Move::TUp}; break;
        case 3: v = {Move::LineT, Move::LineZ}; break;
        case 4: v = {Move::ZUp, Move::TUp}; break;
    }
    for (Move m : {Move::LineBuffer, Move::LineD, Move::LineT})
        if (std::find(v.begin(), v.end(), m) == v.end()) v.push_back(m);
    return v;
}

inline std::optional<DesignKnobs> apply(const Environment& env, DesignKnobs k, Move m) {
    const double page = env.entries_per_page * env.entry_bits;
    switch (m) {
        case Move::ZUp: k.cold_merge_threshold += 1; break;
        case Move::ZDown: k.cold_merge_threshold -= 1; break;
        case Move::KUp: k.hot_merge_threshold += 1; break;
        case Move::KDown: k.hot_merge_threshold -= 1; break;
        case Move::TUp: k.growth_factor *= 2; break;
        case Move::TDown:
            k.growth_factor /= 2;
            k.hot_merge_threshold = std::min(k.hot_merge_threshold, std::max(1.0, k.growth_factor - 1));
            k.cold_merge_threshold = std::min(k.cold_merge_threshold, std::max(1.0, k.growth_factor - 1));
            break;
        case Move::FiltersUp: {
            const double give = k.buffer_memory_bits / 2;
            if (k.buffer_memory_bits - give < page) return std::nullopt;
            k.buffer_memory_bits -= give;
            k.fence_filter_memory_bits += give;
            break;
        }
        case Move::BufferUp: {
            const double give = k.fence_filter_memory_bits / 2;
            k.fence_filter_memory_bits -= give;
            k.buffer_memory_bits += give;
            break;
        }
        case Move::LineT:
        case Move::LineZ:
        case Move::LineBuffer:
        case Move::LineD: return std::nullopt;
    }
    try {
        validate_knobs(env, k);
    } catch (const Error&) {
        return std::nullopt;
    }
    return k;
}

// Single-knob exhaustive search, used for terms without a dedicated move.
inline std::vector<DesignKnobs> line_candidates(const Environment& env, const DesignKnobs& k, Move m) {
    std::vector<DesignKnobs> out;
    if (m == Move::LineT) {
        const double t_max = max_growth_factor(env, k);
        for (double T = 2; T <= t_max * (1 + kEps); T *= 2) {
            DesignKnobs c = k;
            c.growth_factor = T;
            c.hot_merge_threshold = std::min(k.hot_merge_threshold, std::max(1.0, T - 1));
            c.cold_merge_threshold = std::min(k.cold_merge_threshold, std::max(1.0, T - 1));
            out.push_back(c);
        }
    } else if (m == Move::LineZ) {
        for (double Z = 1; Z <= k.growth_factor - 1 + kEps; Z += 1) {
            DesignKnobs c = k;
            c.cold_merge_threshold = Z;
            out.push_back(c);
        }
    } else if (m == Move::LineBuffer) {
        // Memory split on the auto_design grid. The buffer bounds the node
        // size and both set the level count together with T, so each split is
        // paired with every (D, T) it allows; K and Z are kept.
        const double page = env.entries_per_page * env.entry_bits;
        const double M = k.buffer_memory_bits + k.fence_filter_memory_bits;
        for (double b = page; b < M; b *= 2) {
            DesignKnobs split = k;
            split.buffer_memory_bits = b;
            split.fence_filter_memory_bits = M - b;
            for (double D = 1; D <= b / page * (1 + kEps); D *= 2) {
                split.node_size_pages = D;
                const auto ts = line_candidates(env, split, Move::LineT);
                out.insert(out.end(), ts.begin(), ts.end());
            }
        }
    } else if (m == Move::LineD) {
        const double pages = k.buffer_memory_bits / (env.entries_per_page * env.entry_bits);
        for (double D = 1; D <= pages * (1 + kEps); D *= 2) {
            DesignKnobs c = k;
            c.node_size_pages = D;
            out.push_back(c);
        }
    }
    return out;
}

// Largest weighted term not yet exhausted; ties go to the earlier term.
inline int bottleneck(const CostVector& c, const WorkloadMix& m, const std::array<bool, 5>& done) {
    const auto t = c.terms();
    const auto w = m.weights();
    int best = -1;
    double best_v = 0;
    for (int i = 0; i < 5; ++i) {
        if (done[i] || w[i] <= 0) continue;
        const double v = w[i] * t[i];
        if (best < 0 || v > best_v) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

}  // namespace detail

// Greedy coordinate descent: repeatedly pick the dominant cost term and move
// the knob that relieves it to the best point along that direction. A knob
// direction is used at most once.
inline NavigationTrace navigate(const Environment& env, const DesignKnobs& start,
                                const WorkloadMix& mix, const ModelOptions& opt = {}) {
    mix.validate();
    NavigationTrace trace;
    DesignKnobs cur = start;
    CostVector cc = cost(env, cur, opt);
    double th = theta(cc, mix);
    trace.steps.push_back({cur, cc, th, "", ""});

    std::array<bool, 5> exhausted{};
    std::vector<detail::Move> used;
    for (;;) {
        const int term = detail::bottleneck(cc, mix, exhausted);
        if (term < 0) break;
        bool moved = false;
        for (detail::Move mv : detail::moves_for(term)) {
            if (std::find(used.begin(), used.end(), mv) != used.end()) continue;
            bool any = false;
            if (detail::is_line(mv)) {
                for (const auto& cand : detail::line_candidates(env, cur, mv)) {
                    CostVector nc;
                    try {
                        nc = cost(env, cand, opt);
                    } catch (const Error&) {
                        continue;
                    }
                    const double nt = theta(nc, mix);
                    if (nt < th * (1 - 1e-12)) {
                        cur = cand;
                        cc = nc;
                        th = nt;
                        any = true;
                    }
                }
                if (any) trace.steps.push_back({cur, cc, th, cost_term_name(term), detail::move_name(mv)});
            }
            if (!detail::is_line(mv)) {
                // Walk the direction to its bound and keep the best point on
                // the way; level counts change in jumps, so theta along the
                // ray has plateaus.
                std::vector<std::pair<DesignKnobs, CostVector>> ray;
                DesignKnobs probe = cur;
                while (auto next = detail::apply(env, probe, mv)) {
                    probe = *next;
                    ray.emplace_back(probe, cost(env, probe, opt));
                }
                std::size_t best = ray.size();
                double best_t = th;
                for (std::size_t i = 0; i < ray.size(); ++i) {
                    const double nt = theta(ray[i].second, mix);
                    if (nt < best_t * (1 - 1e-12)) {
                        best_t = nt;
                        best = i;
                    }
                }
                if (best < ray.size()) {
                    cur = ray[best].first;
                    cc = ray[best].second;
                    th = best_t;
                    trace.steps.push_back({cur, cc, th, cost_term_name(term), detail::move_name(mv)});
                    any = true;
                }
            }
            if (any) {
                // Line searches are not directions, so they may run again
                // once another knob has moved. Theta strictly drops on
                // every step over a finite grid, so this terminates.
                if (!detail::is_line(mv)) used.push_back(mv);
                moved = true;
                break;
            }
        }
        if (moved)
            exhausted.fill(false);
        else
            exhausted[term] = true;
    }
    return trace;
}

struct AutoDesignOptions {
    bool full_merge_thresholds = false;  // sweep every K, Z in [1, T-1] instead of {1, T-1}
    bool include_presets = true;
};

struct AutoDesignResult {
    DesignKnobs knobs;
    CostVector costs;
    double theta = 0;
    std::size_t evaluated = 0;
};

namespace detail {

inline bool knob_less(const DesignKnobs& a, const DesignKnobs& b) {
    return std::tie(a.growth_factor, a.hot_merge_threshold, a.cold_merge_threshold,
                    a.node_size_pages, a.buffer_memory_bits) <
           std::tie(b.growth_factor, b.hot_merge_threshold, b.cold_merge_threshold,
                    b.node_size_pages, b.buffer_memory_bits);
}

inline std::vector<double> powers_of_two_upto(double lo, double hi) {
    std::vector<double> v;
    for (double x = lo; x <= hi * (1 + kEps); x *= 2) v.push_back(x);
    return v;
}

}  // namespace detail

// Exhaustive search over a grid of the knobs. Ties in theta go to smaller T,
// then K, Z, D, then the smaller buffer.
inline AutoDesignResult auto_design(const Environment& env, const WorkloadMix& mix,
                                    const ModelOptions& opt = {}, const AutoDesignOptions& ao = {}) {
    env.validate();
    mix.validate();
    const double M = env.total_memory_bits, page = env.entries_per_page * env.entry_bits;
    const double mf_lo = min_fence_memory(env);

    std::vector<double> buffers;
    for (double b = page; b <= M - mf_lo; b *= 2) buffers.push_back(b);
    if (M - mf_lo >= page) buffers.push_back(M - mf_lo);
    for (double f = mf_lo; f < M - page; f *= 2) buffers.push_back(M - f);
    std::sort(buffers.begin(), buffers.end());
    buffers.erase(std::unique(buffers.begin(), buffers.end()), buffers.end());


    AutoDesignResult best;
    bool have = false;
    auto consider = [&](const DesignKnobs& k) {
        CostVector c;
        try {
            c = cost(env, k, opt);
        } catch (const Error&) {
            return;
        }
        ++best.evaluated;
        const double t = theta(c, mix);
        if (!have || t < best.theta - 1e-12 * std::abs(best.theta) ||
            (std::abs(t - best.theta) <= 1e-12 * std::abs(best.theta) && detail::knob_less(k, best.knobs))) {
            best.knobs = k;
            best.costs = c;
            best.theta = t;
            have = true;
        }
    };

    for (double mb : buffers) {
        const double t_max = env.n_entries * env.entry_bits / mb;
        auto ts = detail::powers_of_two_upto(2, t_max);
        if (t_max >= 2 && (ts.empty() || ts.back() < t_max * (1 - kEps))) ts.push_back(t_max);
        if (env.entries_per_page >= 2 && env.entries_per_page <= t_max) ts.push_back(env.entries_per_page);
        for (double T : ts) {
            std::vector<double> merges;
            if (ao.full_merge_thresholds) {
                for (double v = 1; v <= T - 1 + kEps; v += 1) merges.push_back(v);
            } else {
                merges.push_back(1);
                if (T - 1 > 1) merges.push_back(T - 1);
            }
            for (double K : merges)
                for (double Z : merges)
                    for (double D : detail::powers_of_two_upto(1, std::max(1.0, mb / page))) {
                        DesignKnobs k;
                        k.growth_factor = T;
                        k.hot_merge_threshold = K;
                        k.cold_merge_threshold = Z;
                        k.node_size_pages = D;
                        k.buffer_memory_bits = mb;
                        k.fence_filter_memory_bits = M - mb;
                        consider(k);
                    }
        }
    }
    if (ao.include_presets)
        for (const auto& name : preset_names()) consider(preset(name, env, opt));
    if (!have) throw DomainError("env", "no valid design fits the environment");
    return best;
}

}  // namespace continuum
