#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "simulator.hpp"
#include "workloads.hpp"

namespace continuum {

enum class Component { Cache = 0, Buffer = 1, Bloom = 2 };

inline const char* component_name(Component c) {
    switch (c) {
        case Component::Cache: return "cache";
        case Component::Buffer: return "buffer";
        case Component::Bloom: return "bloom";
    }
    return "";
}

struct MemoryPoint {
    double cache_bits = 0;
    double buffer_bits = 0;
    double bloom_bits = 0;

    double total() const { return cache_bits + buffer_bits + bloom_bits; }
    double get(Component c) const {
        return c == Component::Cache ? cache_bits : c == Component::Buffer ? buffer_bits : bloom_bits;
    }
    double& at(Component c) {
        return c == Component::Cache ? cache_bits : c == Component::Buffer ? buffer_bits : bloom_bits;
    }
    bool operator<(const MemoryPoint& o) const {
        return std::tie(cache_bits, buffer_bits, bloom_bits) < std::tie(o.cache_bits, o.buffer_bits, o.bloom_bits);
    }
    bool operator==(const MemoryPoint& o) const = default;
};

inline SimConfig with_memory(SimConfig cfg, const MemoryPoint& m) {
    cfg.cache_bits = m.cache_bits;
    cfg.buffer_bits = m.buffer_bits;
    cfg.bloom_bits = m.bloom_bits;
    return cfg;
}

// Expected I/Os saved over the statistics window by giving dM more bits to
// each component.
struct GradientEstimate {
    double dm_bits = 0;
    double cache_savings = 0;
    double buffer_read_savings = 0;
    double buffer_write_savings = 0;
    double bloom_savings = 0;
    std::vector<double> per_level_bloom_savings;
    bool buffer_write_dup_adjusted = false;

    double buffer_savings() const { return buffer_read_savings + buffer_write_savings; }
    double get(Component c) const {
        return c == Component::Cache ? cache_savings : c == Component::Buffer ? buffer_savings() : bloom_savings;
    }
};

struct Arrow {
    bool exists = false;
    Component from = Component::Cache;
    Component to = Component::Cache;
};

// Points from the component whose memory is worth least to the one worth
// most. Only components holding at least `min_give` bits can be the source,
// so the arrow never leaves the simplex.
inline Arrow arrow_of(const GradientEstimate& g, const MemoryPoint& at, double min_give) {
    const std::array<Component, 3> order = {Component::Cache, Component::Buffer, Component::Bloom};
    Arrow a;
    std::optional<Component> lo;
    for (Component c : order)
        if (at.get(c) >= min_give - 1e-9 && (!lo || g.get(c) < g.get(*lo))) lo = c;
    if (!lo) return a;
    Component hi = order[2];
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (g.get(*it) > g.get(hi)) hi = *it;
    if (!(g.get(hi) > g.get(*lo))) return a;
    a.exists = true;
    a.from = *lo;
    a.to = hi;
    return a;
}

inline double cache_savings_formula(double last_slot_hits, double cost_per_hit, double dm_bits,
                                    double entry_bits) {
    return dm_bits / entry_bits * last_slot_hits * cost_per_hit;
}

struct TreeModel {
    double write_io = 0;    // flush and merge pages
    double read_io = 0;     // expected pages of the disk-bound lookups
    double duplicates = 0;  // entries merges dropped
};

// Disk-bound lookups spread evenly over buffer additions.
struct LookupLoad {
    double per_addition = 0;
    double found_share = 0;  // lookups whose key is on disk
};

// Expected pages of one lookup against runs of the given sizes, newest
// first, filters split over the hot levels as the simulator splits them.
// A found key is equally likely to be any stored entry.
inline double model_lookup_cost(const std::vector<std::vector<double>>& levels, const SimConfig& cfg,
                                double found_share) {
    const std::size_t cold = static_cast<std::size_t>(cfg.cold_levels);
    const std::size_t hot = levels.size() > cold ? levels.size() - cold : 0;
    std::vector<double> entries(hot), weights(hot);
    for (std::size_t j = 0; j < hot; ++j) {
        for (double x : levels[j]) entries[j] += x;
        weights[j] = static_cast<double>(levels[j].size());
    }
    const std::vector<double> bits = cfg.filter_scheme == FilterScheme::Monkey
                                         ? allocate_monkey(entries, weights, cfg.bloom_bits)
                                         : allocate_even(entries, cfg.bloom_bits);
    const double T = cfg.growth_factor, B = static_cast<double>(cfg.entries_per_page);
    const double chain = (cfg.node_size_pages < T / B && B < T) ? T / B : 0.0;
    double total = 0, miss = 0, found = 0;
    for (const auto& lvl : levels)
        for (double x : lvl) total += x;
    for (std::size_t j = 0; j < levels.size(); ++j) {
        const double probe = j < hot ? (entries[j] > 0 ? fpr_from_bits_per_entry(bits[j] / entries[j]) : 0.0)
                                     : 1.0 + chain;
        const double hit = j < hot ? 1.0 : 1.0 + chain;
        for (double x : levels[j]) {
            if (total > 0) found += x / total * (miss + hit);
            miss += probe;
        }
    }
    return found_share * found + (1 - found_share) * miss;
}

// Replays `entries` buffer additions through the tree shape of `cfg` with a
// buffer of `capacity` entries. With a positive `universe` a merge keeps the
// expected union of its runs, each a random subset of that many keys;
// otherwise merges drop nothing.
inline TreeModel model_tree(double entries, std::uint64_t capacity, const SimConfig& cfg, double universe = 0,
                            const LookupLoad& load = {}) {
    const double B = static_cast<double>(cfg.entries_per_page);
    const double base = static_cast<double>(std::max<std::uint64_t>(1, capacity));
    std::vector<std::vector<double>> levels;
    TreeModel m;
    auto pages = [&](double n) { return std::ceil(n / B - 1e-9); };
    auto cap = [&](std::size_t i) { return base * std::pow(cfg.growth_factor, static_cast<double>(i + 1)); };
    auto hot = [&]() {
        const std::size_t cold = static_cast<std::size_t>(cfg.cold_levels);
        return levels.size() > cold ? levels.size() - cold : 0;
    };
    auto merge = [&](std::size_t i) {
        double in = 0, absent = 1;
        for (double x : levels[i]) {
            in += x;
            if (universe > 0) absent *= std::max(0.0, 1 - x / universe);
        }
        const double out = universe > 0 ? std::min(in, universe * (1 - absent)) : in;
        m.write_io += pages(in) + pages(out);
        m.duplicates += in - out;
        levels[i].clear();
        return out;
    };
    std::function<void(std::size_t, double)> arrive = [&](std::size_t i, double x) {
        if (levels.size() <= i) levels.resize(i + 1);
        double have = 0;
        for (double y : levels[i]) have += y;
        if (have > 0 && have + x > cap(i) + 1e-9) {
            const double down = levels[i].size() > 1 ? merge(i) : levels[i].front();
            levels[i].clear();
            arrive(i + 1, down);
        }
        levels[i].insert(levels[i].begin(), x);
        const int allowed = (i + 1 < hot()) ? cfg.hot_merge_threshold : cfg.cold_merge_threshold;
        if (static_cast<int>(levels[i].size()) > allowed) levels[i].push_back(merge(i));
    };
    const double per_flush = capacity == 0 ? 1.0 : static_cast<double>(capacity);
    const auto flushes = static_cast<std::uint64_t>(std::floor(entries / per_flush + 1e-9));
    for (std::uint64_t f = 0; f < flushes; ++f) {
        m.write_io += pages(per_flush);
        arrive(0, per_flush);
        if (load.per_addition > 0) {
            // Lookups until the next flush see this shape.
            const double span = f + 1 < flushes ? per_flush : entries - per_flush * static_cast<double>(flushes);
            m.read_io += span * load.per_addition * model_lookup_cost(levels, cfg, load.found_share);
        }
    }
    return m;
}

// model_tree averaged over where the trace ends inside a buffer fill: the
// flush count is interpolated between its neighbouring whole values. A
// buffer that never filled stays unflushed.
inline TreeModel model_tree_smooth(double entries, std::uint64_t capacity, const SimConfig& cfg,
                                   double universe = 0, const LookupLoad& load = {}) {
    const double per_flush = static_cast<double>(std::max<std::uint64_t>(1, capacity));
    const double fills = std::floor(entries / per_flush + 1e-9);
    const double frac = entries / per_flush - fills;
    const TreeModel lo = model_tree(fills * per_flush, capacity, cfg, universe, load);
    if (fills < 1 || frac < 1e-9) return lo;
    const TreeModel hi = model_tree((fills + 1) * per_flush, capacity, cfg, universe, load);
    return {lo.write_io + frac * (hi.write_io - lo.write_io), lo.read_io + frac * (hi.read_io - lo.read_io),
            lo.duplicates + frac * (hi.duplicates - lo.duplicates)};
}

// The key count whose random overlaps make the model drop as many
// duplicates as the tree did.
inline double fit_universe(double entries, std::uint64_t capacity, const SimConfig& cfg, double duplicates) {
    if (!(duplicates > 0)) return 0;
    double lo = std::log(std::max(1.0, static_cast<double>(capacity))), hi = std::log(1e12);
    for (int it = 0; it < 50; ++it) {
        const double mid = (lo + hi) / 2;
        if (model_tree(entries, capacity, cfg, std::exp(mid)).duplicates > duplicates)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp((lo + hi) / 2);
}

inline GradientEstimate estimate_gradients(const IOStats& s, const SimConfig& cfg, double dm_bits) {
    if (s.query_count == 0 && s.update_count == 0)
        throw EmptyStats("no operations were recorded");
    GradientEstimate g;
    g.dm_bits = dm_bits;
    const double E = cfg.entry_bits;

    // Hits per extra slot, averaged over the ghost slots.
    g.cache_savings = s.last_cache_slot_hits
                          ? cache_savings_formula(static_cast<double>(s.last_cache_slot_hits) /
                                                      static_cast<double>(std::max<std::uint64_t>(1, s.cache_ghost_slots)),
                                                  static_cast<double>(s.last_cache_slot_cost) /
                                                      static_cast<double>(s.last_cache_slot_hits),
                                                  dm_bits, E)
                          : 0.0;

    // Bloom: modelled FPR drop under dM more filter bits, scaled linearly when
    // the requested dM differs from the one the statistics were gathered for.
    const double scale = cfg.gradient_dm_bits > 0 ? dm_bits / cfg.gradient_dm_bits : 0.0;
    g.per_level_bloom_savings.assign(s.level_count(), 0.0);
    for (std::size_t i = 0; i < s.level_count(); ++i) {
        g.per_level_bloom_savings[i] = (s.fpr_sum[i] - s.fpr_dm_sum[i]) * scale;
        g.bloom_savings += g.per_level_bloom_savings[i];
    }

    // Buffer: recently written keys the larger buffer would still hold, plus
    // the flush, merge and lookup pages of the tree replayed at both sizes.
    const std::uint64_t cap = cfg.buffer_capacity();
    const auto bigger = static_cast<std::uint64_t>(std::floor((cfg.buffer_bits + dm_bits) / E + 1e-9));
    const double added = static_cast<double>(s.buffer_entries_added);
    double duplicates = 0, found = 0;
    for (auto d : s.duplicates_removed) duplicates += static_cast<double>(d);
    for (auto h : s.hits_per_level) found += static_cast<double>(h);
    g.buffer_write_dup_adjusted = cfg.growth_factor == 2;
    const double universe = g.buffer_write_dup_adjusted ? fit_universe(added, cap, cfg, duplicates) : 0.0;
    LookupLoad load;
    const double disk_lookups = static_cast<double>(s.query_count - s.buffer_hits - s.cache_hits);
    if (added > 0 && disk_lookups > 0) {
        load.per_addition = disk_lookups / added;
        load.found_share = std::min(1.0, found / disk_lookups);
    }
    const TreeModel now = model_tree_smooth(added, cap, cfg, universe, load);
    const TreeModel grown = model_tree_smooth(added, bigger, cfg, universe, load);
    g.buffer_read_savings = s.buffer_tail_savings * scale + now.read_io - grown.read_io;
    g.buffer_write_savings = now.write_io - grown.write_io;
    return g;
}

// ------------------------------------------------------------ grid and SGD

struct GridCell {
    MemoryPoint point;
    std::array<int, 3> lattice{};  // cache, buffer, bloom steps
    std::uint64_t total_io = 0;
    GradientEstimate estimate;
    Arrow arrow;
};

struct GridResult {
    int resolution = 0;
    double total_bits = 0;
    std::vector<GridCell> cells;

    int index_of(int cache, int buffer) const {
        // Rows enumerate cache steps, then buffer steps.
        const int n = resolution - 1;
        int idx = 0;
        for (int a = 0; a < cache; ++a) idx += n - a + 1;
        return idx + buffer;
    }
    const GridCell& at(int cache, int buffer) const { return cells[index_of(cache, buffer)]; }
};

inline std::vector<MemoryPoint> simplex_points(double total_bits, int resolution,
                                               std::vector<std::array<int, 3>>* lattice = nullptr) {
    if (resolution < 2) throw ConfigError("resolution", "resolution must be at least 2");
    const int n = resolution - 1;
    std::vector<MemoryPoint> pts;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n - a; ++b) {
            const int c = n - a - b;
            pts.push_back({total_bits * a / n, total_bits * b / n, total_bits * c / n});
            if (lattice) lattice->push_back({a, b, c});
        }
    return pts;
}

struct CellResult {
    std::uint64_t total_io = 0;
    GradientEstimate estimate;
};

inline CellResult evaluate_point(const std::vector<Operation>& trace, const SimConfig& base,
                                 const MemoryPoint& p, double dm_bits) {
    SimConfig cfg = with_memory(base, p);
    cfg.gradient_dm_bits = dm_bits;
    SimState s(cfg);
    s.run(trace);
    return {s.stats().total_io(), estimate_gradients(s.stats(), cfg, dm_bits)};
}

template <typename Fn>
inline void parallel_for(std::size_t n, int jobs, Fn fn) {
    const std::size_t workers = std::max(1, jobs);
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

using Progress = std::function<void(std::size_t done, std::size_t total)>;

inline GridResult grid_sweep(const std::vector<Operation>& trace, const SimConfig& base, double total_bits,
                             int resolution, double dm_bits = 64, int jobs = 1, const Progress& progress = {}) {
    base.validate();
    GridResult g;
    g.resolution = resolution;
    g.total_bits = total_bits;
    std::vector<std::array<int, 3>> lattice;
    const auto pts = simplex_points(total_bits, resolution, &lattice);
    g.cells.resize(pts.size());
    std::mutex progress_mu;
    std::size_t finished = 0;
    parallel_for(pts.size(), jobs, [&](std::size_t i) {
        const CellResult r = evaluate_point(trace, base, pts[i], dm_bits);
        GridCell& c = g.cells[i];
        c.point = pts[i];
        c.lattice = lattice[i];
        c.total_io = r.total_io;
        c.estimate = r.estimate;
        c.arrow = arrow_of(r.estimate, pts[i], total_bits / (resolution - 1));
        if (progress) {
            std::lock_guard<std::mutex> lock(progress_mu);
            progress(++finished, pts.size());
        }
    });
    return g;
}

struct SgdStep {
    MemoryPoint point;
    std::uint64_t total_io = 0;
    Arrow arrow;
};

struct SgdResult {
    std::vector<SgdStep> path;
    MemoryPoint predicted_min;
    std::string stop_reason;  // revisit, no_gradient, max_steps
};

struct SgdOptions {
    double step_bits = 64;
    double dm_bits = 64;
    std::size_t max_steps = 100000;
    std::function<void(const SgdStep&)> on_step;
};

// Moves step_bits at a time from the least to the most valuable component,
// re-simulating at every point.
inline SgdResult sgd_descend(const std::vector<Operation>& trace, const SimConfig& base,
                             const MemoryPoint& start, const SgdOptions& opt = {}) {
    base.validate();
    if (!(opt.step_bits > 0)) throw ConfigError("step_bits", "step_bits must be positive");
    SgdResult res;
    std::map<MemoryPoint, bool> seen;
    MemoryPoint cur = start;
    for (std::size_t step = 0;; ++step) {
        seen[cur] = true;
        const CellResult r = evaluate_point(trace, base, cur, opt.dm_bits);
        const Arrow a = arrow_of(r.estimate, cur, opt.step_bits);
        res.path.push_back({cur, r.total_io, a});
        if (opt.on_step) opt.on_step(res.path.back());
        res.predicted_min = cur;
        if (!a.exists) {
            res.stop_reason = "no_gradient";
            break;
        }
        if (step >= opt.max_steps) {
            res.stop_reason = "max_steps";
            break;
        }
        MemoryPoint next = cur;
        next.at(a.from) -= opt.step_bits;
        next.at(a.to) += opt.step_bits;
        if (seen.count(next)) {
            res.stop_reason = "revisit";
            break;
        }
        cur = next;
    }
    return res;
}

// Follows the arrows of a precomputed grid one lattice step at a time.
inline SgdResult sgd_on_grid(const GridResult& g, int start_index) {
    SgdResult res;
    std::vector<bool> seen(g.cells.size(), false);
    int idx = start_index;
    for (;;) {
        seen[idx] = true;
        const GridCell& c = g.cells[idx];
        res.path.push_back({c.point, c.total_io, c.arrow});
        res.predicted_min = c.point;
        if (!c.arrow.exists) {
            res.stop_reason = "no_gradient";
            break;
        }
        std::array<int, 3> next = c.lattice;
        next[static_cast<int>(c.arrow.from)] -= 1;
        next[static_cast<int>(c.arrow.to)] += 1;
        const int nidx = g.index_of(next[0], next[1]);
        if (seen[nidx]) {
            res.stop_reason = "revisit";
            break;
        }
        idx = nidx;
    }
    return res;
}

// Entry (i, j): estimated I/Os saved by moving one quantum of filter bits
// from level i to level j. Zero on the diagonal.
struct ReallocMatrix {
    std::vector<std::vector<double>> delta;
    double max_off_diagonal() const {
        double m = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < delta.size(); ++i)
            for (std::size_t j = 0; j < delta.size(); ++j)
                if (i != j) m = std::max(m, delta[i][j]);
        return m;
    }
};

inline ReallocMatrix bloom_realloc_check(const IOStats& s) {
    const std::size_t n = s.level_count();
    ReallocMatrix m;
    m.delta.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double gain = s.fpr_sum[j] - s.fpr_plus_quantum_sum[j];
            const double loss = s.fpr_minus_quantum_sum[i] - s.fpr_sum[i];
            m.delta[i][j] = gain - loss;
        }
    return m;
}

// ------------------------------------------------------------ validation

struct ComponentValidation {
    Component component = Component::Cache;
    double estimated_mean = 0;
    double actual_mean = 0;
    double actual_sd = 0;
    double ci_low = 0;
    double ci_high = 0;
    bool contains = false;
    std::vector<double> estimated;
    std::vector<double> actual;
};

struct ValidationReport {
    std::size_t trials = 0;
    double dm_bits = 0;
    std::array<ComponentValidation, 3> components;
};

// Upper end of the two-sided 95% interval for a Poisson mean after observing
// zero events.
inline constexpr double kPoissonZeroBound95 = 3.688879454113936;

// Two-sided 95% Student t quantile (Cornish-Fisher expansion around 1.96).
inline double t_quantile_975(std::size_t dof) {
    if (dof == 0) return std::numeric_limits<double>::infinity();
    const double z = 1.959963984540054, n = static_cast<double>(dof);
    const double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z;
    return z + (z3 + z) / (4 * n) + (5 * z5 + 16 * z3 + 3 * z) / (96 * n * n) +
           (3 * z7 + 19 * z5 + 17 * z3 - 15 * z) / (384 * n * n * n);
}

inline ValidationReport validate_gradients(const WorkloadSpec& spec, const SimConfig& cfg,
                                           std::size_t trials, double dm_bits = 64, int jobs = 1) {
    spec.validate();
    cfg.validate();
    if (trials < 2) throw ConfigError("trials", "at least two trials are needed");
    ValidationReport rep;
    rep.trials = trials;
    rep.dm_bits = dm_bits;
    std::vector<std::array<double, 3>> est(trials), act(trials);
    parallel_for(trials, jobs, [&](std::size_t t) {
        WorkloadSpec ws = spec;
        ws.seed = spec.seed + t;
        SimConfig c = cfg;
        c.seed = cfg.seed + t;
        c.gradient_dm_bits = dm_bits;
        const auto trace = generate(ws);
        SimState base(c);
        base.run(trace);
        const auto g = estimate_gradients(base.stats(), c, dm_bits);
        for (int k = 0; k < 3; ++k) {
            const Component comp = static_cast<Component>(k);
            MemoryPoint m{c.cache_bits, c.buffer_bits, c.bloom_bits};
            m.at(comp) += dm_bits;
            SimState bumped(with_memory(c, m));
            bumped.run(trace);
            est[t][k] = g.get(comp);
            act[t][k] = static_cast<double>(base.stats().total_io()) -
                        static_cast<double>(bumped.stats().total_io());
        }
    });
    const double tq = t_quantile_975(trials - 1);
    for (int k = 0; k < 3; ++k) {
        ComponentValidation& v = rep.components[k];
        v.component = static_cast<Component>(k);
        for (std::size_t t = 0; t < trials; ++t) {
            v.estimated.push_back(est[t][k]);
            v.actual.push_back(act[t][k]);
            v.estimated_mean += est[t][k];
            v.actual_mean += act[t][k];
        }
        v.estimated_mean /= trials;
        v.actual_mean /= trials;
        double ss = 0;
        for (double a : v.actual) ss += (a - v.actual_mean) * (a - v.actual_mean);
        v.actual_sd = std::sqrt(ss / (trials - 1));
        // Savings are I/O counts. When every pair agrees the t interval
        // collapses to a point, so fall back to the exact 95% Poisson bound
        // for no events observed over all trials.
        const double half = v.actual_sd > 0 ? tq * v.actual_sd / std::sqrt(static_cast<double>(trials))
                                            : kPoissonZeroBound95 / static_cast<double>(trials);
        v.ci_low = v.actual_mean - half;
        v.ci_high = v.actual_mean + half;
        const double slack = 1e-9 * std::max(1.0, std::abs(v.actual_mean));
        v.contains = v.estimated_mean >= v.ci_low - slack && v.estimated_mean <= v.ci_high + slack;
    }
    return rep;
}

}  // namespace continuum
