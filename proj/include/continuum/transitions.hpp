#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "continuum.hpp"
#include "errors.hpp"
#include "navigator.hpp"
#include "random.hpp"
#include "simulator.hpp"

namespace continuum {

// Level sizes of an LSM-tree about to become a B+-tree. The last level is
// the one whose pages become leaves under batch insertion.
struct TransitionState {
    std::vector<double> levels;      // entries per level, smallest level first
    double entry_bytes = 64;         // d
    double page_bytes = 4096;        // p
    double write_read_ratio = 1;     // phi, cost of a page write over a page read

    void validate() const {
        if (levels.empty()) throw DomainError("levels", "at least one level is required");
        for (std::size_t i = 0; i < levels.size(); ++i)
            if (!(levels[i] >= 0))
                throw DomainError("levels[" + std::to_string(i) + "]", "level sizes must be non-negative");
        if (!(levels.back() > 0)) throw DomainError("levels", "the last level must hold data");
        if (!(entry_bytes > 0)) throw DomainError("entry_bytes", "entry_bytes must be positive");
        if (!(page_bytes >= entry_bytes)) throw DomainError("page_bytes", "page_bytes must hold an entry");
        if (!(write_read_ratio >= 0)) throw DomainError("write_read_ratio", "write_read_ratio must be non-negative");
    }

    double upper_entries() const {
        return std::accumulate(levels.begin(), levels.end() - 1, 0.0);
    }
    double level_pages(std::size_t i) const { return std::ceil(entry_bytes * levels[i] / page_bytes - 1e-9); }
};

enum class TransitionStrategy { SortMerge, BatchInsert, Lazy };

inline const char* strategy_name(TransitionStrategy s) {
    switch (s) {
        case TransitionStrategy::SortMerge: return "sort_merge";
        case TransitionStrategy::BatchInsert: return "batch_insert";
        case TransitionStrategy::Lazy: return "lazy";
    }
    return "";
}

struct TransitionCosts {
    double sort_merge = 0;
    double batch_insert = 0;
    double lazy_bound = 0;        // natural final merge plus the index build
    double preemptive = 0;
    double per_update_bound = 0;  // batch insertion, per entry
    double threshold_ratio = 0;
};

inline double threshold_ratio(double d, double p, double phi) {
    return d * phi / (p + (2 * p - d) * phi);
}

inline TransitionCosts transition_costs(const TransitionState& s) {
    s.validate();
    const double d = s.entry_bytes, p = s.page_bytes, phi = s.write_read_ratio;
    TransitionCosts c;
    double pages = 0, all = 0;
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
        pages += s.level_pages(i);
        all += s.levels[i];
    }
    c.sort_merge = pages * (1 + phi);
    c.batch_insert = s.level_pages(s.levels.size() - 1) + s.upper_entries() * (d / p + 1 + 2 * phi);
    c.preemptive = c.sort_merge;
    c.lazy_bound = c.sort_merge + std::ceil(d * all / p - 1e-9);
    c.per_update_bound = 1 + 2 * phi;
    c.threshold_ratio = threshold_ratio(d, p, phi);
    return c;
}

// Batch insertion wins when the upper levels are small next to the last
// one. Equality goes to sort-merge; waiting for a natural merge is never
// picked because it pays a full merge anyway.
inline TransitionStrategy choose_strategy(const TransitionState& s) {
    s.validate();
    const double ratio = s.upper_entries() / s.levels.back();
    return ratio < threshold_ratio(s.entry_bytes, s.page_bytes, s.write_read_ratio)
               ? TransitionStrategy::BatchInsert
               : TransitionStrategy::SortMerge;
}

// Pages read by preemptively merging a tree whose levels 0..L are full,
// level i holding s0 * T^i bytes.
inline double preemptive_geometric_pages(double buffer_bytes, double T, int L, double page_bytes) {
    return buffer_bytes * (std::pow(T, L + 1) - 1) / (page_bytes * (T - 1));
}

// ------------------------------------------------------------ gradual

struct GradualStep {
    std::uint64_t pages_read = 0;
    std::uint64_t pages_written = 0;
    double io = 0;
    double threshold_rank = 0;  // keys of rank below this are on the B+-tree side
};

struct GradualPlan {
    std::uint64_t pages_per_step = 0;
    std::uint64_t total_pages = 0;
    double predicted_io = 0;
    std::vector<GradualStep> steps;
};

inline GradualPlan plan_gradual(const TransitionState& s, std::uint64_t k) {
    s.validate();
    if (k == 0) throw DomainError("pages_per_step", "pages_per_step must be positive");
    GradualPlan plan;
    plan.pages_per_step = k;
    double entries = 0;
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
        plan.total_pages += static_cast<std::uint64_t>(s.level_pages(i));
        entries += s.levels[i];
    }
    const double per_page = s.page_bytes / s.entry_bytes;
    std::uint64_t done = 0;
    while (done < plan.total_pages) {
        const std::uint64_t r = std::min(k, plan.total_pages - done);
        done += r;
        GradualStep st;
        st.pages_read = r;
        st.pages_written = r;
        st.io = r + s.write_read_ratio * r;
        st.threshold_rank = std::min(entries, done * per_page);
        plan.predicted_io += st.io;
        plan.steps.push_back(st);
    }
    return plan;
}

enum class Side { BTree, Lsm, Both };

// Where a key (given by rank in key order) lives after `step` steps.
inline Side route(const GradualPlan& plan, std::size_t step, double rank) {
    if (step >= plan.steps.size()) step = plan.steps.size() - 1;
    return rank < plan.steps[step].threshold_rank ? Side::BTree : Side::Lsm;
}

inline Side route_range(const GradualPlan& plan, std::size_t step, double lo_rank, double hi_rank) {
    const Side a = route(plan, step, lo_rank), b = route(plan, step, hi_rank);
    return a == b ? a : Side::Both;
}

// ------------------------------------------------------------ B+-tree

// Leaves on disk, inner nodes in memory: a point access costs one leaf I/O.
class BPlusTree {
public:
    struct Leaf {
        std::vector<std::uint64_t> keys;
        std::uint64_t page_id = 0;
    };

    explicit BPlusTree(std::uint64_t leaf_capacity = 32) : cap_(leaf_capacity) {
        if (cap_ == 0) throw DomainError("leaf_capacity", "leaf_capacity must be positive");
    }

    std::uint64_t reads() const { return reads_; }
    std::uint64_t writes() const { return writes_; }
    std::uint64_t total_io() const { return reads_ + writes_; }
    const std::vector<Leaf>& leaves() const { return leaves_; }
    std::uint64_t leaf_capacity() const { return cap_; }

    std::uint64_t size() const {
        std::uint64_t n = 0;
        for (const auto& l : leaves_) n += l.keys.size();
        return n;
    }

    // Packs sorted unique keys into full leaves without charging I/O.
    void bulk_load(const std::vector<std::uint64_t>& sorted) {
        leaves_.clear();
        for (std::size_t i = 0; i < sorted.size(); i += cap_) {
            Leaf l;
            l.keys.assign(sorted.begin() + i, sorted.begin() + std::min(sorted.size(), i + cap_));
            l.page_id = next_page_++;
            leaves_.push_back(std::move(l));
        }
    }

    bool contains(std::uint64_t key) const {
        if (leaves_.empty()) return false;
        const auto& l = leaves_[leaf_for(key)];
        return std::binary_search(l.keys.begin(), l.keys.end(), key);
    }

    std::uint64_t point_read(std::uint64_t key) {
        if (leaves_.empty()) return 0;
        (void)key;
        reads_ += 1;
        return 1;
    }

    std::uint64_t update(std::uint64_t key) {
        if (leaves_.empty()) {
            leaves_.push_back({{key}, next_page_++});
            writes_ += 1;
            return 1;
        }
        const std::size_t i = leaf_for(key);
        reads_ += 1;
        auto& keys = leaves_[i].keys;
        auto it = std::lower_bound(keys.begin(), keys.end(), key);
        if (it != keys.end() && *it == key) {
            writes_ += 1;
            return 2;
        }
        keys.insert(it, key);
        if (keys.size() <= cap_) {
            writes_ += 1;
            return 2;
        }
        Leaf right;
        right.keys.assign(keys.begin() + keys.size() / 2, keys.end());
        keys.resize(keys.size() / 2);
        right.page_id = next_page_++;
        leaves_.insert(leaves_.begin() + i + 1, std::move(right));
        writes_ += 2;
        return 3;
    }

    std::uint64_t range_scan(std::uint64_t lo, std::uint64_t hi) {
        if (leaves_.empty() || hi < lo) return 0;
        const std::size_t a = leaf_for(lo), b = leaf_for(hi);
        const std::uint64_t n = b - a + 1;
        reads_ += n;
        return n;
    }

    struct BatchIO {
        std::uint64_t reads = 0;
        std::uint64_t writes = 0;
    };

    // Inserts sorted unique keys leaf by leaf: each touched leaf is read
    // once and written back as ceil(size / capacity) leaves.
    BatchIO batch_insert(const std::vector<std::uint64_t>& sorted) {
        BatchIO io;
        if (sorted.empty()) return io;
        if (leaves_.empty()) {
            bulk_load(sorted);
            io.writes = leaves_.size();
            writes_ += io.writes;
            return io;
        }
        std::vector<Leaf> out;
        out.reserve(leaves_.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < leaves_.size(); ++i) {
            const bool last = i + 1 == leaves_.size();
            std::vector<std::uint64_t> incoming;
            while (k < sorted.size() && (last || sorted[k] < leaves_[i + 1].keys.front()))
                incoming.push_back(sorted[k++]);
            if (incoming.empty()) {
                out.push_back(std::move(leaves_[i]));
                continue;
            }
            io.reads += 1;
            std::vector<std::uint64_t> merged;
            std::set_union(leaves_[i].keys.begin(), leaves_[i].keys.end(), incoming.begin(), incoming.end(),
                           std::back_inserter(merged));
            const std::size_t parts = (merged.size() + cap_ - 1) / cap_;
            for (std::size_t p = 0; p < parts; ++p) {
                Leaf l;
                const std::size_t from = merged.size() * p / parts, to = merged.size() * (p + 1) / parts;
                l.keys.assign(merged.begin() + from, merged.begin() + to);
                l.page_id = p == 0 ? leaves_[i].page_id : next_page_++;
                out.push_back(std::move(l));
            }
            io.writes += parts;
        }
        leaves_ = std::move(out);
        reads_ += io.reads;
        writes_ += io.writes;
        return io;
    }

    std::vector<std::uint64_t> keys() const {
        std::vector<std::uint64_t> all;
        for (const auto& l : leaves_) all.insert(all.end(), l.keys.begin(), l.keys.end());
        return all;
    }

private:
    std::size_t leaf_for(std::uint64_t key) const {
        // Last leaf whose first key is <= key.
        std::size_t lo = 0, hi = leaves_.size();
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            if (leaves_[mid].keys.front() <= key) lo = mid;
            else hi = mid;
        }
        return lo;
    }

    std::uint64_t cap_;
    std::vector<Leaf> leaves_;
    std::uint64_t next_page_ = 0;
    std::uint64_t reads_ = 0;
    std::uint64_t writes_ = 0;
};

// ------------------------------------------------------------ LSM -> B+-tree

struct TransitionOutcome {
    TransitionStrategy strategy = TransitionStrategy::SortMerge;
    TransitionState state;
    TransitionCosts predicted;
    double predicted_cost = 0;  // closed form of the chosen strategy
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    double measured_cost = 0;   // reads + phi * writes
    BPlusTree tree;
};

// Converts the data of `lsm` into a B+-tree. The buffer counts as the first
// level but is read for free. With `automatic` the strategy comes from
// choose_strategy.
inline TransitionOutcome execute_lsm_to_btree(const SimState& lsm, double phi, bool automatic = true,
                                              TransitionStrategy forced = TransitionStrategy::SortMerge) {
    const SimConfig& cfg = lsm.config();
    const std::uint64_t B = cfg.entries_per_page;
    std::size_t bottom = lsm.levels().size();
    while (bottom > 0 && lsm.levels()[bottom - 1].runs.empty()) --bottom;
    if (bottom == 0) throw DomainError("levels", "the LSM-tree holds no data on disk");
    --bottom;

    // Groups of entries in level order; the oldest bottom run comes last.
    std::vector<std::vector<std::uint64_t>> groups;
    std::vector<bool> on_disk;
    if (!lsm.buffer().empty()) {
        groups.emplace_back(lsm.buffer().begin(), lsm.buffer().end());
        on_disk.push_back(false);
    }
    for (std::size_t j = 0; j < bottom; ++j) {
        if (lsm.levels()[j].runs.empty()) continue;
        std::vector<std::uint64_t> g;
        for (const auto& r : lsm.levels()[j].runs) g.insert(g.end(), r.keys.begin(), r.keys.end());
        groups.push_back(std::move(g));
        on_disk.push_back(true);
    }
    const auto& bottom_runs = lsm.levels()[bottom].runs;
    if (bottom_runs.size() > 1) {
        std::vector<std::uint64_t> g;
        for (std::size_t r = 0; r + 1 < bottom_runs.size(); ++r)
            g.insert(g.end(), bottom_runs[r].keys.begin(), bottom_runs[r].keys.end());
        groups.push_back(std::move(g));
        on_disk.push_back(true);
    }
    groups.push_back(bottom_runs.back().keys);
    on_disk.push_back(true);

    TransitionOutcome out{TransitionStrategy::SortMerge, {}, {}, 0, 0, 0, 0, BPlusTree(B)};
    out.state.entry_bytes = cfg.entry_bits / 8.0;
    out.state.page_bytes = out.state.entry_bytes * static_cast<double>(B);
    out.state.write_read_ratio = phi;
    for (const auto& g : groups) out.state.levels.push_back(static_cast<double>(g.size()));
    out.predicted = transition_costs(out.state);
    out.strategy = automatic ? choose_strategy(out.state) : forced;
    if (out.strategy == TransitionStrategy::Lazy)
        throw DomainError("strategy", "lazy transitions are not executed");

    auto pages = [&](std::size_t n) { return static_cast<std::uint64_t>((n + B - 1) / B); };
    if (out.strategy == TransitionStrategy::SortMerge) {
        std::vector<std::uint64_t> all;
        for (std::size_t i = 0; i < groups.size(); ++i) {
            if (on_disk[i]) out.reads += pages(groups[i].size());
            all.insert(all.end(), groups[i].begin(), groups[i].end());
        }
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        out.writes += pages(all.size());
        out.tree.bulk_load(all);
        out.predicted_cost = out.predicted.sort_merge;
    } else {
        out.reads += pages(groups.back().size());  // build the index over the leaves
        out.tree.bulk_load(groups.back());
        std::vector<std::uint64_t> upper;
        for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
            if (on_disk[i]) out.reads += pages(groups[i].size());
            upper.insert(upper.end(), groups[i].begin(), groups[i].end());
        }
        std::sort(upper.begin(), upper.end());
        upper.erase(std::unique(upper.begin(), upper.end()), upper.end());
        const auto io = out.tree.batch_insert(upper);
        out.reads += io.reads;
        out.writes += io.writes;
        out.predicted_cost = out.predicted.batch_insert;
    }
    out.measured_cost = static_cast<double>(out.reads) + phi * static_cast<double>(out.writes);
    return out;
}

// Builds an LSM-tree whose level i holds one run of `levels[i]` keys.
// Keys are distinct across levels unless `overlap` is set.
inline SimState sim_state_from_levels(const std::vector<std::uint64_t>& levels, const SimConfig& cfg,
                                      std::uint64_t seed, bool overlap = false) {
    SimState s(cfg);
    Rng rng(seed);
    std::uint64_t total = 0;
    for (auto n : levels) total += n;
    std::set<std::uint64_t> used;
    const std::uint64_t space = std::max<std::uint64_t>(16, total * 8);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        std::set<std::uint64_t> keys;
        while (keys.size() < levels[i]) {
            const std::uint64_t k = rng.below(space);
            if (!overlap && used.count(k)) continue;
            keys.insert(k);
        }
        used.insert(keys.begin(), keys.end());
        s.install_run(i, std::vector<std::uint64_t>(keys.begin(), keys.end()));
    }
    return s;
}

// ------------------------------------------------------------ B+-tree -> LSM

enum class BtreeToLsmMode { Naive, Indirection };

struct BtreeToLsmParams {
    double alpha = 1;            // cost of a random page access relative to a sequential one
    double fragmentation = 0.5;  // x, share of leaves not stored contiguously
    double merge_constant = 1;   // c
    double read_cost = 1;        // r
    double selectivity = 1e-3;   // s
    double growth_factor = 10;   // T
};

struct BtreeToLsmPlan {
    BtreeToLsmMode mode = BtreeToLsmMode::Indirection;
    double transition_io = 0;
    double range_degradation = 0;
    double first_merge_delta = 0;
};

inline BtreeToLsmPlan plan_btree_to_lsm(const Environment& env, const BtreeToLsmParams& p, BtreeToLsmMode mode) {
    if (!(env.n_entries > 0) || !(env.entry_bits > 0))
        throw DomainError("env", "n_entries and entry_bits must be positive");
    if (!(p.fragmentation >= 0 && p.fragmentation <= 1))
        throw DomainError("fragmentation", "fragmentation must lie in [0, 1]");
    if (!(p.growth_factor > 1)) throw DomainError("growth_factor", "growth_factor must exceed 1");
    const double NE = env.n_entries * env.entry_bits, x = p.fragmentation;
    BtreeToLsmPlan plan;
    plan.mode = mode;
    if (mode == BtreeToLsmMode::Naive) {
        // Read fragmented and contiguous leaves, write one sorted run.
        plan.transition_io = p.alpha * NE * x + p.alpha * NE * (1 - x) + NE;
    } else {
        const double T = p.growth_factor, c = p.merge_constant, r = p.read_cost, s = p.selectivity;
        plan.transition_io = 0;
        plan.range_degradation = p.alpha * NE * s * (x * r + x * c - c) + s * c * NE * (T + 1) / (T - 1);
        plan.first_merge_delta = x * (NE * r - c);
    }
    return plan;
}

struct Region {
    std::uint64_t start_page = 0;
    std::uint64_t disk_location = 0;
    std::uint64_t length = 0;
    bool operator==(const Region&) const = default;
};

// Logical page -> disk page for a run adopted without rewriting. Adjacent
// regions that are also adjacent on disk are coalesced.
class RegionMap {
public:
    static RegionMap build(std::vector<Region> runs) {
        std::sort(runs.begin(), runs.end(), [](const Region& a, const Region& b) { return a.start_page < b.start_page; });
        RegionMap m;
        std::uint64_t expect = 0;
        for (const auto& r : runs) {
            if (r.length == 0) throw DomainError("length", "regions must be non-empty");
            if (r.start_page != expect)
                throw DomainError("start_page", "regions must tile the page range without gaps or overlaps");
            expect += r.length;
            if (!m.regions_.empty()) {
                Region& last = m.regions_.back();
                if (last.disk_location + last.length == r.disk_location) {
                    last.length += r.length;
                    continue;
                }
            }
            m.regions_.push_back(r);
        }
        m.total_ = expect;
        return m;
    }

    static RegionMap from_leaves(const BPlusTree& t) {
        std::vector<Region> runs;
        std::uint64_t page = 0;
        for (const auto& l : t.leaves()) runs.push_back({page++, l.page_id, 1});
        return build(std::move(runs));
    }

    std::uint64_t resolve(std::uint64_t page) const {
        if (page >= total_)
            throw OutOfRange("page " + std::to_string(page) + " is beyond " + std::to_string(total_) + " pages");
        auto it = std::upper_bound(regions_.begin(), regions_.end(), page,
                                   [](std::uint64_t p, const Region& r) { return p < r.start_page; });
        --it;
        return it->disk_location + (page - it->start_page);
    }

    std::size_t region_count() const { return regions_.size(); }
    std::uint64_t total_pages() const { return total_; }
    const std::vector<Region>& regions() const { return regions_; }

private:
    std::vector<Region> regions_;
    std::uint64_t total_ = 0;
};

// ------------------------------------------------------------ hybrid

struct HybridPhase {
    std::uint64_t ops = 2000;
    double scan_fraction = 0.9;
    double write_fraction = 0.1;  // the rest are point reads
    std::uint64_t scan_length = 64;
};

struct HybridSpec {
    std::uint64_t initial_keys = 10000;
    std::vector<HybridPhase> phases;
    SimConfig lsm;                 // shape of every LSM-tree involved
    double write_read_ratio = 1;   // phi for LSM -> B+-tree transitions
    std::uint64_t seed = 0;
};

struct HybridTransition {
    std::size_t phase = 0;
    std::string from, to, strategy;
    double charged_io = 0;
    double measured_io = 0;
    std::size_t region_count = 0;
};

struct HybridReport {
    double btree_io = 0;
    double lsm_io = 0;
    double hybrid_io = 0;
    std::vector<double> btree_phase_io, lsm_phase_io, hybrid_phase_io;
    std::vector<std::string> hybrid_designs;
    std::vector<HybridTransition> transitions;
};

inline HybridSpec default_hybrid_spec() {
    HybridSpec s;
    s.phases = {{2000, 0.9, 0.1, 64}, {2000, 0.1, 0.9, 64}};
    s.lsm.entry_bits = 64;
    s.lsm.entries_per_page = 32;
    s.lsm.growth_factor = 10;
    s.lsm.hot_merge_threshold = s.lsm.cold_merge_threshold = 1;
    s.lsm.buffer_bits = 64 * 64;
    s.lsm.bloom_bits = 10.0 * 10000;
    return s;
}

namespace detail {

struct HybridOp {
    int kind;  // 0 point read, 1 scan, 2 write
    std::uint64_t key;
};

// The design the cost model prefers for a phase's operation mix.
inline std::string phase_design(const HybridSpec& spec, const HybridPhase& ph) {
    Environment env;
    env.n_entries = static_cast<double>(spec.initial_keys);
    env.entry_bits = spec.lsm.entry_bits;
    env.entries_per_page = static_cast<double>(spec.lsm.entries_per_page);
    env.key_bits = std::min(64.0, spec.lsm.entry_bits);
    env.page_bytes = env.entries_per_page * env.entry_bits / 8.0;
    env.total_memory_bits = env.n_entries * env.entry_bits;
    WorkloadMix mix;
    mix.short_ranges = ph.scan_fraction;
    mix.updates = ph.write_fraction;
    mix.point_reads = std::max(0.0, 1.0 - ph.scan_fraction - ph.write_fraction);
    const double bt = theta(cost(env, preset("b_plus_tree", env)), mix);
    const double lsm = theta(cost(env, preset("leveled_lsm", env)), mix);
    return bt <= lsm ? "b_plus_tree" : "lsm";
}

// Holds one of the two designs and runs operations on it.
struct Store {
    SimConfig cfg;
    std::string design;
    BPlusTree tree;
    std::unique_ptr<SimState> lsm;

    double io() const {
        if (design == "b_plus_tree") return static_cast<double>(tree.total_io());
        return static_cast<double>(lsm->stats().total_io());
    }

    void apply(const HybridOp& op, std::uint64_t scan_length) {
        if (design == "b_plus_tree") {
            if (op.kind == 0) tree.point_read(op.key);
            else if (op.kind == 1) tree.range_scan(op.key, op.key + scan_length - 1);
            else tree.update(op.key);
        } else {
            if (op.kind == 0) lsm->lookup(op.key);
            else if (op.kind == 1) lsm->range_scan(op.key, op.key + scan_length - 1);
            else lsm->write(op.key);
        }
    }
};

}  // namespace detail

// Runs the same phased trace on a pure B+-tree, a pure LSM-tree and a store
// that switches to the cheaper design at each phase boundary.
inline HybridReport hybrid_benefit(const HybridSpec& spec) {
    spec.lsm.validate();
    if (spec.phases.empty()) throw DomainError("phases", "at least one phase is required");
    if (spec.initial_keys == 0) throw DomainError("initial_keys", "initial_keys must be positive");
    for (std::size_t i = 0; i < spec.phases.size(); ++i) {
        const auto& ph = spec.phases[i];
        if (!(ph.scan_fraction >= 0 && ph.write_fraction >= 0 && ph.scan_fraction + ph.write_fraction <= 1 + 1e-12))
            throw DomainError("phases[" + std::to_string(i) + "]", "fractions must be non-negative and sum to at most 1");
        if (ph.scan_length == 0) throw DomainError("phases[" + std::to_string(i) + "].scan_length", "scan_length must be positive");
    }
    const std::uint64_t B = spec.lsm.entries_per_page;
    const std::uint64_t space = spec.initial_keys * 2;

    // Even keys are preloaded; writes draw from the whole space.
    std::vector<std::uint64_t> initial(spec.initial_keys);
    for (std::uint64_t i = 0; i < spec.initial_keys; ++i) initial[i] = 2 * i;

    Rng rng(spec.seed);
    std::vector<std::vector<detail::HybridOp>> ops(spec.phases.size());
    for (std::size_t p = 0; p < spec.phases.size(); ++p) {
        const auto& ph = spec.phases[p];
        for (std::uint64_t i = 0; i < ph.ops; ++i) {
            const double u = rng.uniform();
            const int kind = u < ph.scan_fraction ? 1 : u < ph.scan_fraction + ph.write_fraction ? 2 : 0;
            ops[p].push_back({kind, rng.below(space)});
        }
    }

    auto loaded_lsm = [&] {
        auto s = std::make_unique<SimState>(spec.lsm);
        for (auto k : initial) s->write(k);
        s->mutable_stats() = IOStats{};
        return s;
    };

    HybridReport rep;
    auto run_pure = [&](detail::Store& st, std::vector<double>& phase_io) {
        for (std::size_t p = 0; p < spec.phases.size(); ++p) {
            const double before = st.io();
            for (const auto& op : ops[p]) st.apply(op, spec.phases[p].scan_length);
            phase_io.push_back(st.io() - before);
        }
        return st.io();
    };
    {
        detail::Store st{spec.lsm, "b_plus_tree", BPlusTree(B), nullptr};
        st.tree.bulk_load(initial);
        rep.btree_io = run_pure(st, rep.btree_phase_io);
    }
    {
        detail::Store st{spec.lsm, "lsm", BPlusTree(B), loaded_lsm()};
        rep.lsm_io = run_pure(st, rep.lsm_phase_io);
    }

    // Hybrid: starts in the first phase's design, switches when cheaper.
    detail::Store st{spec.lsm, detail::phase_design(spec, spec.phases[0]), BPlusTree(B), nullptr};
    if (st.design == "b_plus_tree") st.tree.bulk_load(initial);
    else st.lsm = loaded_lsm();
    double total = 0;
    for (std::size_t p = 0; p < spec.phases.size(); ++p) {
        const std::string want = detail::phase_design(spec, spec.phases[p]);
        double charged = 0;
        if (want != st.design) {
            HybridTransition tr;
            tr.phase = p;
            tr.from = st.design;
            tr.to = want;
            if (want == "lsm") {
                // Adopt the leaves as the last level through a region map.
                tr.strategy = "indirection";
                tr.region_count = RegionMap::from_leaves(st.tree).region_count();
                auto lsm = std::make_unique<SimState>(spec.lsm);
                const auto keys = st.tree.keys();
                std::size_t level = 0;
                while (lsm->level_capacity(level) < keys.size()) ++level;
                lsm->install_run(level, keys);
                st.lsm = std::move(lsm);
                st.design = "lsm";
            } else {
                auto outcome = execute_lsm_to_btree(*st.lsm, spec.write_read_ratio);
                tr.strategy = strategy_name(outcome.strategy);
                tr.charged_io = outcome.predicted_cost;
                tr.measured_io = outcome.measured_cost;
                charged = outcome.predicted_cost;
                st.tree = std::move(outcome.tree);
                st.lsm.reset();
                st.design = "b_plus_tree";
            }
            rep.transitions.push_back(tr);
        }
        rep.hybrid_designs.push_back(st.design);
        const double before = st.io();
        for (const auto& op : ops[p]) st.apply(op, spec.phases[p].scan_length);
        const double spent = st.io() - before + charged;
        rep.hybrid_phase_io.push_back(spent);
        total += spent;
    }
    rep.hybrid_io = total;
    return rep;
}

}  // namespace continuum
