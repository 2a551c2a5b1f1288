#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <list>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bloom_filter.hpp"
#include "errors.hpp"
#include "filter_math.hpp"
#include "random.hpp"
#include "workloads.hpp"

namespace continuum {

enum class FilterScheme { BaselineEven, Monkey };
enum class FprMode { AnalyticBernoulli, ConcreteFilter };

inline const char* filter_scheme_name(FilterScheme s) {
    return s == FilterScheme::Monkey ? "monkey" : "baseline_even";
}
inline const char* fpr_mode_name(FprMode m) {
    return m == FprMode::ConcreteFilter ? "concrete_filter" : "analytic_bernoulli";
}

struct SimConfig {
    double cache_bits = 0;
    double buffer_bits = 0;
    double bloom_bits = 0;
    double entry_bits = 64;                  // E
    std::uint64_t entries_per_page = 32;     // B
    int growth_factor = 2;                   // T
    int hot_merge_threshold = 1;             // K
    int cold_merge_threshold = 1;            // Z
    int cold_levels = 0;                     // deepest levels probed without filters
    int node_size_pages = 1;                 // D
    FilterScheme filter_scheme = FilterScheme::Monkey;
    FprMode fpr_mode = FprMode::AnalyticBernoulli;
    std::uint64_t seed = 0;
    double gradient_dm_bits = 64;            // dM used for the m' statistics
    double realloc_quantum_bits = 1;         // filter bits moved between two levels
    std::uint64_t stats_warmup_ops = 0;      // gradient statistics skip the first ops

    double total_memory_bits() const { return cache_bits + buffer_bits + bloom_bits; }
    std::uint64_t buffer_capacity() const {
        return static_cast<std::uint64_t>(std::floor(buffer_bits / entry_bits + 1e-9));
    }
    std::uint64_t cache_capacity() const {
        return static_cast<std::uint64_t>(std::floor(cache_bits / entry_bits + 1e-9));
    }

    void validate() const {
        if (!(cache_bits >= 0)) throw ConfigError("cache_bits", "cache_bits must be non-negative");
        if (!(buffer_bits >= 0)) throw ConfigError("buffer_bits", "buffer_bits must be non-negative");
        if (!(bloom_bits >= 0)) throw ConfigError("bloom_bits", "bloom_bits must be non-negative");
        if (!(entry_bits > 0)) throw ConfigError("entry_bits", "entry_bits must be positive");
        if (entries_per_page == 0) throw ConfigError("entries_per_page", "entries_per_page must be positive");
        if (growth_factor < 2) throw ConfigError("growth_factor", "growth_factor must be at least 2");
        if (hot_merge_threshold < 1 || hot_merge_threshold > growth_factor - 1)
            throw ConfigError("hot_merge_threshold", "hot_merge_threshold must lie in [1, T-1]");
        if (cold_merge_threshold < 1 || cold_merge_threshold > growth_factor - 1)
            throw ConfigError("cold_merge_threshold", "cold_merge_threshold must lie in [1, T-1]");
        if (cold_levels < 0) throw ConfigError("cold_levels", "cold_levels must be non-negative");
        if (node_size_pages < 1) throw ConfigError("node_size_pages", "node_size_pages must be positive");
        if (!(gradient_dm_bits >= 0)) throw ConfigError("gradient_dm_bits", "gradient_dm_bits must be non-negative");
        if (!(realloc_quantum_bits > 0))
            throw ConfigError("realloc_quantum_bits", "realloc_quantum_bits must be positive");
    }
};

// Counters gathered while running a trace. Per-level vectors are indexed by
// disk level starting at 0 and grow as levels appear.
struct IOStats {
    std::uint64_t page_reads = 0;
    std::uint64_t page_writes = 0;
    std::uint64_t query_count = 0;
    std::uint64_t update_count = 0;
    std::uint64_t query_page_reads = 0;  // lookups only, merges excluded
    std::uint64_t buffer_hits = 0;
    std::uint64_t cache_hits = 0;
    std::uint64_t buffer_entries_added = 0;
    std::uint64_t flushes = 0;
    std::uint64_t merge_io = 0;          // page reads and writes of merges

    // Hits a cache gradient_dm_bits larger would have had on its extra
    // slots (the most recently evicted keys), and the disk reads those
    // lookups paid. cache_ghost_slots is the number of extra slots.
    std::uint64_t last_cache_slot_hits = 0;
    std::uint64_t last_cache_slot_cost = 0;
    std::uint64_t cache_ghost_slots = 1;
    // Hits on the least recently used slot of a full cache.
    std::uint64_t lru_slot_hits = 0;
    // Expected disk reads a buffer gradient_dm_bits larger would have
    // absorbed, from reads of recently written keys that had been flushed.
    double buffer_tail_savings = 0;

    std::vector<std::uint64_t> bloom_accesses;
    std::vector<std::uint64_t> bloom_false_events;   // false positives
    std::vector<std::uint64_t> bloom_negatives;      // key absent from the run
    std::vector<std::uint64_t> hits_per_level;
    std::vector<std::uint64_t> duplicates_removed;
    std::vector<std::uint64_t> total_entries_through;
    std::vector<std::uint64_t> merge_input_entries;
    // Sums of the modelled FPR over absent-key filter probes, under the
    // current allocation, the allocation with dM more bits, and with one
    // quantum more or less at this level.
    std::vector<double> fpr_sum;
    std::vector<double> fpr_dm_sum;
    std::vector<double> fpr_plus_quantum_sum;
    std::vector<double> fpr_minus_quantum_sum;
    std::vector<double> level_entries_sum;           // level size at each probe

    std::uint64_t total_io() const { return page_reads + page_writes; }

    std::size_t level_count() const { return bloom_accesses.size(); }

    double fpr_average(std::size_t i) const {
        return bloom_negatives[i] ? fpr_sum[i] / bloom_negatives[i] : 0.0;
    }
    double fpr_dm_average(std::size_t i) const {
        return bloom_negatives[i] ? fpr_dm_sum[i] / bloom_negatives[i] : 0.0;
    }

    void ensure_levels(std::size_t n) {
        if (bloom_accesses.size() >= n) return;
        for (auto* v : {&bloom_accesses, &bloom_false_events, &bloom_negatives, &hits_per_level,
                        &duplicates_removed, &total_entries_through, &merge_input_entries})
            v->resize(n, 0);
        for (auto* v : {&fpr_sum, &fpr_dm_sum, &fpr_plus_quantum_sum, &fpr_minus_quantum_sum,
                        &level_entries_sum})
            v->resize(n, 0.0);
    }
};

struct Run {
    std::vector<std::uint64_t> keys;  // sorted, unique
    BloomFilter filter;
    double filter_bits = -1;          // bits the concrete filter was built with

    std::size_t size() const { return keys.size(); }
    bool contains(std::uint64_t k) const { return std::binary_search(keys.begin(), keys.end(), k); }
};

struct Level {
    std::vector<Run> runs;  // newest first

    std::uint64_t entries() const {
        std::uint64_t n = 0;
        for (const auto& r : runs) n += r.size();
        return n;
    }
};

struct LookupResult {
    bool found = false;
    int level = -1;  // -1 buffer or cache, -2 missing, else disk level
    std::uint64_t ios = 0;
};

class SimState {
public:
    explicit SimState(const SimConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        ghost_slots_ = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::llround(cfg_.gradient_dm_bits / cfg_.entry_bits)));
        stats_.cache_ghost_slots = ghost_slots_;
    }

    const SimConfig& config() const { return cfg_; }
    const IOStats& stats() const { return stats_; }
    IOStats& mutable_stats() { return stats_; }
    const std::vector<Level>& levels() const { return levels_; }
    const std::set<std::uint64_t>& buffer() const { return buffer_; }
    std::uint64_t base_capacity() const { return std::max<std::uint64_t>(1, cfg_.buffer_capacity()); }

    std::uint64_t level_capacity(std::size_t i) const {
        double c = static_cast<double>(base_capacity());
        for (std::size_t j = 0; j <= i; ++j) c *= cfg_.growth_factor;
        return static_cast<std::uint64_t>(c);
    }

    std::size_t hot_level_count() const {
        const std::size_t cold = static_cast<std::size_t>(cfg_.cold_levels);
        return levels_.size() > cold ? levels_.size() - cold : 0;
    }

    bool cache_contains(std::uint64_t k) const { return cache_index_.count(k) != 0; }
    std::size_t cache_size() const { return cache_index_.size(); }

    // Reads and writes the whole structure holds on disk.
    std::uint64_t disk_entries() const {
        std::uint64_t n = 0;
        for (const auto& l : levels_) n += l.entries();
        return n;
    }

    void apply(const Operation& op) {
        collecting_ = op_index_ >= cfg_.stats_warmup_ops;
        ++op_index_;
        if (op.type == OpType::Read) lookup(op.key);
        else write(op.key);
    }

    void run(const std::vector<Operation>& ops) {
        for (const auto& op : ops) apply(op);
    }

    void write(std::uint64_t key) {
        ++stats_.update_count;
        cache_erase(key);
        ghost_erase(key);
        if (buffer_.insert(key).second) ++stats_.buffer_entries_added;
        last_write_[key] = stats_.buffer_entries_added;
        if (buffer_.size() >= cfg_.buffer_capacity()) flush();
    }

    void flush() {
        if (buffer_.empty()) return;
        Run r;
        r.keys.assign(buffer_.begin(), buffer_.end());
        buffer_.clear();
        stats_.page_writes += pages(r.size());
        ++stats_.flushes;
        arrive(0, std::move(r));
    }

    LookupResult lookup(std::uint64_t key) {
        ++stats_.query_count;
        const std::uint64_t qn = query_seq_++;
        LookupResult res;
        if (buffer_.count(key)) {
            ++stats_.buffer_hits;
            res.found = true;
            return res;
        }
        if (auto it = cache_index_.find(key); it != cache_index_.end()) {
            ++stats_.cache_hits;
            if (cache_index_.size() == cfg_.cache_capacity() && it->second == std::prev(cache_.end()))
                ++stats_.lru_slot_hits;
            cache_.splice(cache_.begin(), cache_, it->second);
            res.found = true;
            return res;
        }
        const bool shadow_hit = ghost_index_.count(key) > 0;
        ensure_allocation();
        const std::size_t hot = hot_level_count();
        const double chain = chain_extra();
        double ios = 0;
        res.level = -2;
        for (std::size_t j = 0; j < levels_.size() && !res.found; ++j) {
            Level& lvl = levels_[j];
            const double n = static_cast<double>(lvl.entries());
            for (std::size_t r = 0; r < lvl.runs.size(); ++r) {
                Run& run = lvl.runs[r];
                const bool present = run.contains(key);
                if (j < hot) {
                    if (collecting_) {
                        ++stats_.bloom_accesses[j];
                        stats_.level_entries_sum[j] += n;
                    }
                    if (present) {
                        ios += 1;
                    } else {
                        const double p = fpr_from_bits_per_entry(alloc_[j] / n);
                        if (collecting_) {
                            ++stats_.bloom_negatives[j];
                            stats_.fpr_sum[j] += p;
                            stats_.fpr_dm_sum[j] += fpr_from_bits_per_entry(alloc_dm_[j] / n);
                            stats_.fpr_plus_quantum_sum[j] +=
                                fpr_from_bits_per_entry((alloc_[j] + cfg_.realloc_quantum_bits) / n);
                            stats_.fpr_minus_quantum_sum[j] += fpr_from_bits_per_entry(
                                std::max(0.0, alloc_[j] - cfg_.realloc_quantum_bits) / n);
                        }
                        bool positive;
                        if (cfg_.fpr_mode == FprMode::AnalyticBernoulli) {
                            positive = unit_from_bits(hash_words(cfg_.seed, qn, j, r)) < p;
                        } else {
                            positive = run.filter.maybe_contains(key);
                        }
                        if (positive) {
                            ios += 1;
                            if (collecting_) ++stats_.bloom_false_events[j];
                        }
                    }
                } else {
                    ios += 1 + chain;
                }
                if (present) {
                    res.found = true;
                    res.level = static_cast<int>(j);
                    if (collecting_) ++stats_.hits_per_level[j];
                    break;
                }
            }
        }
        res.ios = static_cast<std::uint64_t>(std::llround(ios));
        stats_.page_reads += res.ios;
        stats_.query_page_reads += res.ios;
        if (collecting_) stats_.buffer_tail_savings += buffer_tail_weight(key) * static_cast<double>(res.ios);
        if (shadow_hit && collecting_) {
            stats_.cache_ghost_slots = ghost_slots_;
            ++stats_.last_cache_slot_hits;
            stats_.last_cache_slot_cost += res.ios;
        }
        if (res.found) {
            ghost_erase(key);
            cache_insert(key);
        }
        return res;
    }

    // Page I/Os of a key-range scan; runs whose fences rule out the range
    // cost nothing when the level is hot.
    std::uint64_t range_scan(std::uint64_t lo, std::uint64_t hi) {
        std::uint64_t ios = 0;
        const std::size_t hot = hot_level_count();
        for (std::size_t j = 0; j < levels_.size(); ++j) {
            for (const auto& run : levels_[j].runs) {
                auto first = std::lower_bound(run.keys.begin(), run.keys.end(), lo);
                auto last = std::upper_bound(run.keys.begin(), run.keys.end(), hi);
                if (first == last) {
                    // Fences cannot rule out a range inside the run's key span.
                    const bool spans = !run.keys.empty() && lo <= run.keys.back() && hi >= run.keys.front();
                    if (spans || j >= hot) ios += 1;
                    continue;
                }
                const std::uint64_t a = static_cast<std::uint64_t>(first - run.keys.begin());
                const std::uint64_t b = static_cast<std::uint64_t>(last - run.keys.begin()) - 1;
                ios += b / cfg_.entries_per_page - a / cfg_.entries_per_page + 1;
            }
        }
        stats_.page_reads += ios;
        return ios;
    }

    // Sort-merges every run of level i into one; charges the I/O.
    Run merge_level(std::size_t i) {
        Level& lvl = levels_[i];
        std::uint64_t input = 0;
        for (const auto& r : lvl.runs) input += r.size();
        Run out;
        out.keys.reserve(input);
        for (const auto& r : lvl.runs) out.keys.insert(out.keys.end(), r.keys.begin(), r.keys.end());
        std::sort(out.keys.begin(), out.keys.end());
        out.keys.erase(std::unique(out.keys.begin(), out.keys.end()), out.keys.end());
        stats_.page_reads += pages(input);
        stats_.page_writes += pages(out.size());
        stats_.merge_io += pages(input) + pages(out.size());
        stats_.ensure_levels(i + 1);
        stats_.duplicates_removed[i] += input - out.size();
        stats_.merge_input_entries[i] += input;
        lvl.runs.clear();
        dirty_ = true;
        return out;
    }

    // Adds a run as the oldest data of level i, e.g. to adopt existing pages.
    void install_run(std::size_t i, std::vector<std::uint64_t> keys) {
        if (levels_.size() <= i) levels_.resize(i + 1);
        Run r;
        r.keys = std::move(keys);
        levels_[i].runs.push_back(std::move(r));
        stats_.ensure_levels(levels_.size());
        dirty_ = true;
    }

    // Puts a key in the buffer without flushing or counting an update.
    void stage(std::uint64_t key) { buffer_.insert(key); }

    void drop_empty_runs() {
        for (auto& l : levels_)
            l.runs.erase(std::remove_if(l.runs.begin(), l.runs.end(), [](const Run& r) { return r.keys.empty(); }),
                         l.runs.end());
        dirty_ = true;
    }

    void clear_levels() {
        levels_.clear();
        buffer_.clear();
        dirty_ = true;
    }

    // Filter bits per disk level under the configured scheme.
    std::vector<double> filter_allocation(double budget) const {
        const std::size_t hot = hot_level_count();
        std::vector<double> entries(hot), weights(hot);
        for (std::size_t j = 0; j < hot; ++j) {
            entries[j] = static_cast<double>(levels_[j].entries());
            weights[j] = static_cast<double>(levels_[j].runs.size());
        }
        std::vector<double> bits = cfg_.filter_scheme == FilterScheme::Monkey
                                       ? allocate_monkey(entries, weights, budget)
                                       : allocate_even(entries, budget);
        bits.resize(levels_.size(), 0.0);
        return bits;
    }

    const std::vector<double>& current_allocation() {
        ensure_allocation();
        return alloc_;
    }

    std::uint64_t pages(std::uint64_t entries) const {
        return (entries + cfg_.entries_per_page - 1) / cfg_.entries_per_page;
    }

private:
    // Chance that a buffer `dm` bits larger still holds `key`, given that
    // this buffer has flushed it. Flushes come every `c` additions, so with a
    // uniform phase a key written d additions ago is still buffered with
    // probability 1 - d/c; the weight is the conditional gain in that
    // probability.
    double buffer_tail_weight(std::uint64_t key) const {
        auto it = last_write_.find(key);
        if (it == last_write_.end() || buffer_.count(key)) return 0.0;
        const double c = static_cast<double>(cfg_.buffer_capacity());
        const double bigger = std::floor((cfg_.buffer_bits + cfg_.gradient_dm_bits) / cfg_.entry_bits + 1e-9);
        const double extra = bigger - c;
        if (extra <= 0) return 0.0;
        const double age = static_cast<double>(stats_.buffer_entries_added - it->second);
        if (age < c) return extra / bigger;
        if (age < bigger) return 1.0 - age / bigger;
        return 0.0;
    }

    double chain_extra() const {
        const double T = cfg_.growth_factor, B = static_cast<double>(cfg_.entries_per_page);
        return (cfg_.node_size_pages < T / B && B < T) ? T / B : 0.0;
    }

    int allowed_runs(std::size_t i) const {
        const std::size_t hot = hot_level_count();
        return (i + 1 < hot) ? cfg_.hot_merge_threshold : cfg_.cold_merge_threshold;
    }

    void arrive(std::size_t i, Run run) {
        if (levels_.size() <= i) levels_.resize(i + 1);
        stats_.ensure_levels(levels_.size());
        dirty_ = true;
        {
            const std::uint64_t have = levels_[i].entries();
            if (have > 0 && have + run.size() > level_capacity(i)) {
                Run down = levels_[i].runs.size() > 1 ? merge_level(i) : std::move(levels_[i].runs.front());
                levels_[i].runs.clear();
                arrive(i + 1, std::move(down));
            }
        }
        stats_.total_entries_through[i] += run.size();
        levels_[i].runs.insert(levels_[i].runs.begin(), std::move(run));
        if (static_cast<int>(levels_[i].runs.size()) > allowed_runs(i)) {
            Run merged = merge_level(i);
            levels_[i].runs.push_back(std::move(merged));
        }
    }

    void ensure_allocation() {
        stats_.ensure_levels(levels_.size());
        if (!dirty_) return;
        alloc_ = filter_allocation(cfg_.bloom_bits);
        alloc_dm_ = filter_allocation(cfg_.bloom_bits + cfg_.gradient_dm_bits);
        if (cfg_.fpr_mode == FprMode::ConcreteFilter) rebuild_filters();
        dirty_ = false;
    }

    void rebuild_filters() {
        for (std::size_t j = 0; j < levels_.size(); ++j) {
            const double n = static_cast<double>(levels_[j].entries());
            for (auto& run : levels_[j].runs) {
                const double bits = n > 0 ? std::round(alloc_[j] / n * run.size()) : 0.0;
                if (bits == run.filter_bits) continue;
                run.filter = BloomFilter(static_cast<std::uint64_t>(bits), run.size(), cfg_.seed);
                for (auto k : run.keys) run.filter.add(k);
                run.filter_bits = bits;
            }
        }
    }

    void cache_insert(std::uint64_t key) {
        const std::uint64_t cap = cfg_.cache_capacity();
        if (cap == 0) {
            ghost_push(key);
            return;
        }
        if (cache_index_.size() >= cap) {
            ghost_push(cache_.back());
            cache_index_.erase(cache_.back());
            cache_.pop_back();
        }
        cache_.push_front(key);
        cache_index_[key] = cache_.begin();
    }

    // Evicted keys in LRU order, as many as the extra slots of a cache
    // gradient_dm_bits larger.
    void ghost_push(std::uint64_t key) {
        ghost_.push_front(key);
        ghost_index_[key] = ghost_.begin();
        if (ghost_.size() > ghost_slots_) {
            ghost_index_.erase(ghost_.back());
            ghost_.pop_back();
        }
    }

    void ghost_erase(std::uint64_t key) {
        auto it = ghost_index_.find(key);
        if (it == ghost_index_.end()) return;
        ghost_.erase(it->second);
        ghost_index_.erase(it);
    }

    void cache_erase(std::uint64_t key) {
        auto it = cache_index_.find(key);
        if (it == cache_index_.end()) return;
        cache_.erase(it->second);
        cache_index_.erase(it);
    }

    SimConfig cfg_;
    IOStats stats_;
    std::set<std::uint64_t> buffer_;
    std::list<std::uint64_t> cache_;
    std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> cache_index_;
    std::uint64_t ghost_slots_ = 1;
    std::list<std::uint64_t> ghost_;
    std::unordered_map<std::uint64_t, std::list<std::uint64_t>::iterator> ghost_index_;
    std::unordered_map<std::uint64_t, std::uint64_t> last_write_;  // key -> additions count at its write
    std::vector<Level> levels_;
    std::vector<double> alloc_, alloc_dm_;
    bool dirty_ = true;
    bool collecting_ = true;
    std::uint64_t op_index_ = 0;
    std::uint64_t query_seq_ = 0;
};

inline IOStats run_trace(const std::vector<Operation>& ops, const SimConfig& cfg) {
    SimState s(cfg);
    s.run(ops);
    return s.stats();
}

}  // namespace continuum
