#pragma once

#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "continuum.hpp"
#include "errors.hpp"
#include "gradients.hpp"
#include "navigator.hpp"
#include "simulator.hpp"
#include "transitions.hpp"
#include "workloads.hpp"

namespace continuum {

using json = nlohmann::json;

// Strict object reader: type errors and unknown fields raise ParseError with
// the dotted path of the offending field.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ParseError(path_.empty() ? "$" : path_, "expected an object");
    }

    std::string path_of(const std::string& name) const { return path_.empty() ? name : path_ + "." + name; }

    bool has(const std::string& name) const { return j_.contains(name); }

    const json& raw(const std::string& name) {
        seen_.insert(name);
        if (!j_.contains(name)) throw ParseError(path_of(name), "missing required field");
        return j_.at(name);
    }

    template <typename T>
    void required(const std::string& name, T& out) {
        read(raw(name), path_of(name), out);
    }

    template <typename T>
    void optional(const std::string& name, T& out) {
        seen_.insert(name);
        if (j_.contains(name) && !j_.at(name).is_null()) read(j_.at(name), path_of(name), out);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ParseError(path_of(it.key()), "unknown field");
    }

    static void read(const json& v, const std::string& path, double& out) {
        if (!v.is_number()) throw ParseError(path, "expected a number");
        out = v.get<double>();
    }
    static void read(const json& v, const std::string& path, int& out) {
        if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
        out = v.get<int>();
    }
    static void read(const json& v, const std::string& path, std::uint64_t& out) {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ParseError(path, "expected a non-negative integer");
        out = v.get<std::uint64_t>();
    }
    static void read(const json& v, const std::string& path, bool& out) {
        if (!v.is_boolean()) throw ParseError(path, "expected a boolean");
        out = v.get<bool>();
    }
    static void read(const json& v, const std::string& path, std::string& out) {
        if (!v.is_string()) throw ParseError(path, "expected a string");
        out = v.get<std::string>();
    }
    template <typename T>
    static void read(const json& v, const std::string& path, std::vector<T>& out) {
        if (!v.is_array()) throw ParseError(path, "expected an array");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            T x{};
            read(v[i], path + "[" + std::to_string(i) + "]", x);
            out.push_back(x);
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

// ------------------------------------------------------------ continuum

inline json to_json(const Environment& e) {
    return {{"n_entries", e.n_entries},       {"entry_bits", e.entry_bits},
            {"entries_per_page", e.entries_per_page}, {"key_bits", e.key_bits},
            {"total_memory_bits", e.total_memory_bits}, {"page_bytes", e.page_bytes}};
}

inline Environment environment_from_json(const json& j, const std::string& path = "env") {
    ObjectReader r(j, path);
    Environment e;
    r.required("n_entries", e.n_entries);
    r.required("entry_bits", e.entry_bits);
    r.required("entries_per_page", e.entries_per_page);
    r.required("key_bits", e.key_bits);
    r.required("total_memory_bits", e.total_memory_bits);
    r.required("page_bytes", e.page_bytes);
    r.finish();
    return e;
}

inline json to_json(const DesignKnobs& k) {
    return {{"growth_factor", k.growth_factor},
            {"hot_merge_threshold", k.hot_merge_threshold},
            {"cold_merge_threshold", k.cold_merge_threshold},
            {"node_size_pages", k.node_size_pages},
            {"fence_filter_memory_bits", k.fence_filter_memory_bits},
            {"buffer_memory_bits", k.buffer_memory_bits}};
}

inline DesignKnobs knobs_from_json(const json& j, const std::string& path = "knobs") {
    ObjectReader r(j, path);
    DesignKnobs k;
    r.required("growth_factor", k.growth_factor);
    r.required("hot_merge_threshold", k.hot_merge_threshold);
    r.required("cold_merge_threshold", k.cold_merge_threshold);
    r.required("node_size_pages", k.node_size_pages);
    r.required("fence_filter_memory_bits", k.fence_filter_memory_bits);
    r.required("buffer_memory_bits", k.buffer_memory_bits);
    r.finish();
    return k;
}

inline json to_json(const ModelOptions& o) {
    return {{"filter_drop_threshold", o.filter_drop_threshold}, {"selectivity", o.selectivity}};
}

inline ModelOptions options_from_json(const json& j, const std::string& path = "options") {
    ObjectReader r(j, path);
    ModelOptions o;
    r.optional("filter_drop_threshold", o.filter_drop_threshold);
    r.optional("selectivity", o.selectivity);
    r.finish();
    if (!(o.filter_drop_threshold >= 0)) throw ParseError(r.path_of("filter_drop_threshold"), "must be non-negative");
    if (!(o.selectivity >= 0 && o.selectivity <= 1)) throw ParseError(r.path_of("selectivity"), "must lie in [0, 1]");
    return o;
}

inline json to_json(const DerivedDesign& d) {
    return {{"levels", d.levels},
            {"cold_levels", d.cold_levels},
            {"no_filter_levels", d.no_filter_levels},
            {"closed_form_cold_levels", d.closed_form_cold_levels},
            {"fence_budget_bits", d.fence_budget_bits},
            {"filter_budget_bits", d.filter_budget_bits},
            {"min_fence_memory_bits", d.min_fence_memory_bits},
            {"all_hot_memory_bits", d.all_hot_memory_bits},
            {"filter_drop_threshold", d.filter_drop_threshold},
            {"sibling_patch", d.sibling_patch},
            {"sibling_chain_len", d.sibling_chain_len},
            {"level_entries", d.level_entries},
            {"runs_per_level", d.runs_per_level},
            {"per_level_filter_bits", d.per_level_filter_bits},
            {"per_level_fpr", d.per_level_fpr},
            {"hash_table_levels", d.hash_table_levels}};
}

inline json to_json(const CostVector& c) {
    return {{"zero_point_read", c.zero_point_read}, {"point_read", c.point_read},
            {"short_range", c.short_range},         {"long_range", c.long_range},
            {"update", c.update},                   {"memory_bits", c.memory_bits}};
}

inline json to_json(const WorkloadMix& m) {
    return {{"zero_point_reads", m.zero_point_reads}, {"point_reads", m.point_reads},
            {"short_ranges", m.short_ranges},         {"long_ranges", m.long_ranges},
            {"updates", m.updates}};
}

inline WorkloadMix mix_from_json(const json& j, const std::string& path = "mix") {
    ObjectReader r(j, path);
    WorkloadMix m;
    r.optional("zero_point_reads", m.zero_point_reads);
    r.optional("point_reads", m.point_reads);
    r.optional("short_ranges", m.short_ranges);
    r.optional("long_ranges", m.long_ranges);
    r.optional("updates", m.updates);
    r.finish();
    return m;
}

inline json to_json(const NavigationTrace& t) {
    json steps = json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"knobs", to_json(s.knobs)},
                         {"cost", to_json(s.costs)},
                         {"theta", s.theta},
                         {"bottleneck", s.bottleneck},
                         {"move", s.move}});
    return {{"steps", steps}, {"final_theta", t.final_step().theta}};
}

inline json to_json(const AutoDesignResult& a) {
    return {{"knobs", to_json(a.knobs)}, {"cost", to_json(a.costs)}, {"theta", a.theta}, {"evaluated", a.evaluated}};
}

inline LsbTreeModel lsb_from_json(const json& j, const std::string& path = "lsb") {
    ObjectReader r(j, path);
    LsbTreeModel m;
    r.optional("overhead", m.overhead);
    r.optional("asymmetry", m.asymmetry);
    r.finish();
    return m;
}

// ------------------------------------------------------------ workloads

inline json to_json(const WorkloadSpec& s) {
    return {{"kind", workload_kind_name(s.kind)},
            {"key_count", s.key_count},
            {"op_count", s.op_count},
            {"write_prob", s.write_prob},
            {"zipf_s", s.zipf_s},
            {"read_rate", s.read_rate},
            {"write_rate", s.write_rate},
            {"update_rate", s.update_rate},
            {"popularity_beta", {{"a", s.popularity_beta.a}, {"b", s.popularity_beta.b}}},
            {"decay_beta", {{"a", s.decay_beta.a}, {"b", s.decay_beta.b}}},
            {"period", s.period},
            {"cuspity", s.cuspity},
            {"seed", s.seed}};
}

inline BetaParams beta_from_json(const json& j, const std::string& path) {
    ObjectReader r(j, path);
    BetaParams b;
    r.required("a", b.a);
    r.required("b", b.b);
    r.finish();
    return b;
}

inline WorkloadSpec workload_from_json(const json& j, const std::string& path = "workload") {
    ObjectReader r(j, path);
    WorkloadSpec s;
    std::string kind;
    r.required("kind", kind);
    try {
        s.kind = parse_workload_kind(kind);
    } catch (const SpecError& e) {
        throw ParseError(r.path_of("kind"), e.what());
    }
    r.optional("key_count", s.key_count);
    r.optional("op_count", s.op_count);
    r.optional("write_prob", s.write_prob);
    r.optional("zipf_s", s.zipf_s);
    r.optional("read_rate", s.read_rate);
    r.optional("write_rate", s.write_rate);
    r.optional("update_rate", s.update_rate);
    if (r.has("popularity_beta")) s.popularity_beta = beta_from_json(r.raw("popularity_beta"), r.path_of("popularity_beta"));
    if (r.has("decay_beta")) s.decay_beta = beta_from_json(r.raw("decay_beta"), r.path_of("decay_beta"));
    r.optional("period", s.period);
    r.optional("cuspity", s.cuspity);
    r.optional("seed", s.seed);
    r.finish();
    return s;
}

inline json to_json(const Operation& op) { return {{"op", op_name(op.type)}, {"key", op.key}}; }

inline void write_trace(std::ostream& out, const std::vector<Operation>& ops) {
    for (const auto& op : ops) out << to_json(op).dump() << '\n';
}

inline std::vector<Operation> read_trace(std::istream& in) {
    std::vector<Operation> ops;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError("trace", "malformed JSON", n);
        }
        try {
            ObjectReader r(j, "");
            std::string op;
            Operation o;
            r.required("op", op);
            r.required("key", o.key);
            r.finish();
            if (op == "insert") o.type = OpType::Insert;
            else if (op == "read") o.type = OpType::Read;
            else if (op == "update") o.type = OpType::Update;
            else throw ParseError("op", "unknown operation '" + op + "'");
            ops.push_back(o);
        } catch (const ParseError& e) {
            throw ParseError(e.field(), e.what(), n);
        }
    }
    return ops;
}

// ------------------------------------------------------------ simulator

inline json to_json(const SimConfig& c) {
    return {{"cache_bits", c.cache_bits},
            {"buffer_bits", c.buffer_bits},
            {"bloom_bits", c.bloom_bits},
            {"entry_bits", c.entry_bits},
            {"entries_per_page", c.entries_per_page},
            {"growth_factor", c.growth_factor},
            {"hot_merge_threshold", c.hot_merge_threshold},
            {"cold_merge_threshold", c.cold_merge_threshold},
            {"cold_levels", c.cold_levels},
            {"node_size_pages", c.node_size_pages},
            {"filter_scheme", filter_scheme_name(c.filter_scheme)},
            {"fpr_mode", fpr_mode_name(c.fpr_mode)},
            {"seed", c.seed},
            {"gradient_dm_bits", c.gradient_dm_bits},
            {"realloc_quantum_bits", c.realloc_quantum_bits},
            {"stats_warmup_ops", c.stats_warmup_ops}};
}

inline SimConfig sim_config_from_json(const json& j, const std::string& path = "config") {
    ObjectReader r(j, path);
    SimConfig c;
    r.optional("cache_bits", c.cache_bits);
    r.optional("buffer_bits", c.buffer_bits);
    r.optional("bloom_bits", c.bloom_bits);
    r.optional("entry_bits", c.entry_bits);
    r.optional("entries_per_page", c.entries_per_page);
    r.optional("growth_factor", c.growth_factor);
    r.optional("hot_merge_threshold", c.hot_merge_threshold);
    r.optional("cold_merge_threshold", c.cold_merge_threshold);
    r.optional("cold_levels", c.cold_levels);
    r.optional("node_size_pages", c.node_size_pages);
    std::string scheme = filter_scheme_name(c.filter_scheme), mode = fpr_mode_name(c.fpr_mode);
    r.optional("filter_scheme", scheme);
    r.optional("fpr_mode", mode);
    if (scheme == "monkey") c.filter_scheme = FilterScheme::Monkey;
    else if (scheme == "baseline_even") c.filter_scheme = FilterScheme::BaselineEven;
    else throw ParseError(r.path_of("filter_scheme"), "expected monkey or baseline_even");
    if (mode == "analytic_bernoulli") c.fpr_mode = FprMode::AnalyticBernoulli;
    else if (mode == "concrete_filter") c.fpr_mode = FprMode::ConcreteFilter;
    else throw ParseError(r.path_of("fpr_mode"), "expected analytic_bernoulli or concrete_filter");
    r.optional("seed", c.seed);
    r.optional("gradient_dm_bits", c.gradient_dm_bits);
    r.optional("realloc_quantum_bits", c.realloc_quantum_bits);
    r.optional("stats_warmup_ops", c.stats_warmup_ops);
    r.finish();
    return c;
}

inline json to_json(const IOStats& s) {
    return {{"page_reads", s.page_reads},
            {"page_writes", s.page_writes},
            {"total_io", s.total_io()},
            {"query_count", s.query_count},
            {"update_count", s.update_count},
            {"query_page_reads", s.query_page_reads},
            {"buffer_hits", s.buffer_hits},
            {"cache_hits", s.cache_hits},
            {"buffer_entries_added", s.buffer_entries_added},
            {"flushes", s.flushes},
            {"last_cache_slot_hits", s.last_cache_slot_hits},
            {"last_cache_slot_cost", s.last_cache_slot_cost},
            {"cache_ghost_slots", s.cache_ghost_slots},
            {"lru_slot_hits", s.lru_slot_hits},
            {"merge_io", s.merge_io},
            {"buffer_tail_savings", s.buffer_tail_savings},
            {"bloom_accesses", s.bloom_accesses},
            {"bloom_false_events", s.bloom_false_events},
            {"bloom_negatives", s.bloom_negatives},
            {"hits_per_level", s.hits_per_level},
            {"duplicates_removed", s.duplicates_removed},
            {"total_entries_through", s.total_entries_through},
            {"merge_input_entries", s.merge_input_entries},
            {"fpr_sum", s.fpr_sum},
            {"fpr_dm_sum", s.fpr_dm_sum},
            {"fpr_plus_quantum_sum", s.fpr_plus_quantum_sum},
            {"fpr_minus_quantum_sum", s.fpr_minus_quantum_sum},
            {"level_entries_sum", s.level_entries_sum}};
}

inline json snapshot_to_json(const SimState& s) {
    json levels = json::array();
    for (const auto& l : s.levels()) {
        json runs = json::array();
        for (const auto& r : l.runs) runs.push_back(r.keys);
        levels.push_back(runs);
    }
    return {{"config", to_json(s.config())},
            {"buffer", std::vector<std::uint64_t>(s.buffer().begin(), s.buffer().end())},
            {"levels", levels}};
}

inline SimState snapshot_from_json(const json& j, const std::string& path = "state") {
    ObjectReader r(j, path);
    SimState s(sim_config_from_json(r.raw("config"), r.path_of("config")));
    std::vector<std::uint64_t> buffer;
    r.optional("buffer", buffer);
    const json& levels = r.raw("levels");
    r.finish();
    if (!levels.is_array()) throw ParseError(r.path_of("levels"), "expected an array");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const std::string lp = r.path_of("levels") + "[" + std::to_string(i) + "]";
        if (!levels[i].is_array()) throw ParseError(lp, "expected an array of runs");
        if (levels[i].empty()) s.install_run(i, {});
        for (std::size_t k = 0; k < levels[i].size(); ++k) {
            std::vector<std::uint64_t> keys;
            ObjectReader::read(levels[i][k], lp + "[" + std::to_string(k) + "]", keys);
            std::sort(keys.begin(), keys.end());
            keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
            s.install_run(i, std::move(keys));
        }
    }
    s.drop_empty_runs();
    for (auto k : buffer) s.stage(k);
    return s;
}

// ------------------------------------------------------------ gradients

inline json to_json(const MemoryPoint& m) {
    return {{"cache_bits", m.cache_bits}, {"buffer_bits", m.buffer_bits}, {"bloom_bits", m.bloom_bits}};
}

inline MemoryPoint memory_from_json(const json& j, const std::string& path = "start") {
    ObjectReader r(j, path);
    MemoryPoint m;
    r.required("cache_bits", m.cache_bits);
    r.required("buffer_bits", m.buffer_bits);
    r.required("bloom_bits", m.bloom_bits);
    r.finish();
    return m;
}

inline json to_json(const GradientEstimate& g) {
    return {{"dm_bits", g.dm_bits},
            {"cache_savings", g.cache_savings},
            {"buffer_read_savings", g.buffer_read_savings},
            {"buffer_write_savings", g.buffer_write_savings},
            {"buffer_savings", g.buffer_savings()},
            {"bloom_savings", g.bloom_savings},
            {"per_level_bloom_savings", g.per_level_bloom_savings},
            {"buffer_write_dup_adjusted", g.buffer_write_dup_adjusted}};
}

inline json arrow_json(const Arrow& a) {
    if (!a.exists) return nullptr;
    return {{"from", component_name(a.from)}, {"to", component_name(a.to)}};
}

inline json to_json(const GridResult& g) {
    json cells = json::array();
    for (const auto& c : g.cells)
        cells.push_back({{"point", to_json(c.point)},
                         {"lattice", c.lattice},
                         {"total_io", c.total_io},
                         {"gradient", to_json(c.estimate)},
                         {"arrow", arrow_json(c.arrow)}});
    return {{"resolution", g.resolution}, {"total_bits", g.total_bits}, {"cells", cells}};
}

inline std::string fraction_text(double v) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << v;
    return os.str();
}

inline void write_grid_csv(std::ostream& out, const GridResult& g) {
    out << "cache_frac,buffer_frac,bloom_frac,total_io,arrow_from,arrow_to\n";
    const double n = g.resolution - 1;
    for (const auto& c : g.cells) {
        out << fraction_text(c.lattice[0] / n) << ',' << fraction_text(c.lattice[1] / n) << ','
            << fraction_text(c.lattice[2] / n) << ',' << c.total_io << ','
            << (c.arrow.exists ? component_name(c.arrow.from) : "none") << ','
            << (c.arrow.exists ? component_name(c.arrow.to) : "none") << '\n';
    }
}

inline json to_json(const SgdResult& r) {
    json path = json::array();
    for (const auto& s : r.path)
        path.push_back({{"point", to_json(s.point)}, {"total_io", s.total_io}, {"arrow", arrow_json(s.arrow)}});
    return {{"path", path}, {"predicted_min", to_json(r.predicted_min)}, {"stop_reason", r.stop_reason}};
}

inline json to_json(const ValidationReport& v) {
    json comps = json::array();
    for (const auto& c : v.components)
        comps.push_back({{"component", component_name(c.component)},
                         {"estimated_mean", c.estimated_mean},
                         {"actual_mean", c.actual_mean},
                         {"actual_sd", c.actual_sd},
                         {"ci_low", c.ci_low},
                         {"ci_high", c.ci_high},
                         {"contains", c.contains}});
    return {{"trials", v.trials}, {"dm_bits", v.dm_bits}, {"components", comps}};
}

inline json to_json(const ReallocMatrix& m) {
    return {{"delta", m.delta}, {"max_off_diagonal", m.delta.size() > 1 ? json(m.max_off_diagonal()) : json(nullptr)}};
}

// ------------------------------------------------------------ transitions

inline json to_json(const TransitionState& s) {
    return {{"levels", s.levels},
            {"entry_bytes", s.entry_bytes},
            {"page_bytes", s.page_bytes},
            {"write_read_ratio", s.write_read_ratio}};
}

inline TransitionState transition_state_from_json(const json& j, const std::string& path = "state") {
    ObjectReader r(j, path);
    TransitionState s;
    r.required("levels", s.levels);
    r.optional("entry_bytes", s.entry_bytes);
    r.optional("page_bytes", s.page_bytes);
    r.optional("write_read_ratio", s.write_read_ratio);
    r.finish();
    return s;
}

inline json to_json(const TransitionCosts& c) {
    return {{"sort_merge", c.sort_merge},
            {"batch_insert", c.batch_insert},
            {"lazy_bound", c.lazy_bound},
            {"preemptive", c.preemptive},
            {"per_update_bound", c.per_update_bound},
            {"threshold_ratio", c.threshold_ratio}};
}

inline json to_json(const GradualPlan& p) {
    json steps = json::array();
    for (const auto& s : p.steps)
        steps.push_back({{"pages_read", s.pages_read},
                         {"pages_written", s.pages_written},
                         {"io", s.io},
                         {"threshold_rank", s.threshold_rank}});
    return {{"pages_per_step", p.pages_per_step},
            {"total_pages", p.total_pages},
            {"predicted_io", p.predicted_io},
            {"steps", steps}};
}

inline json to_json(const TransitionOutcome& o) {
    return {{"strategy", strategy_name(o.strategy)},
            {"state", to_json(o.state)},
            {"predicted", to_json(o.predicted)},
            {"predicted_cost", o.predicted_cost},
            {"reads", o.reads},
            {"writes", o.writes},
            {"measured_cost", o.measured_cost},
            {"leaves", o.tree.leaves().size()},
            {"entries", o.tree.size()}};
}

inline BtreeToLsmParams btree_to_lsm_from_json(const json& j, const std::string& path = "params") {
    ObjectReader r(j, path);
    BtreeToLsmParams p;
    r.optional("alpha", p.alpha);
    r.optional("fragmentation", p.fragmentation);
    r.optional("merge_constant", p.merge_constant);
    r.optional("read_cost", p.read_cost);
    r.optional("selectivity", p.selectivity);
    r.optional("growth_factor", p.growth_factor);
    r.finish();
    return p;
}

inline json to_json(const BtreeToLsmPlan& p) {
    return {{"mode", p.mode == BtreeToLsmMode::Naive ? "naive" : "indirection"},
            {"transition_io", p.transition_io},
            {"range_degradation", p.range_degradation},
            {"first_merge_delta", p.first_merge_delta}};
}

inline HybridSpec hybrid_from_json(const json& j, const std::string& path = "hybrid") {
    ObjectReader r(j, path);
    HybridSpec s = default_hybrid_spec();
    r.optional("initial_keys", s.initial_keys);
    r.optional("write_read_ratio", s.write_read_ratio);
    r.optional("seed", s.seed);
    if (r.has("lsm")) s.lsm = sim_config_from_json(r.raw("lsm"), r.path_of("lsm"));
    if (r.has("phases")) {
        const json& ph = r.raw("phases");
        if (!ph.is_array()) throw ParseError(r.path_of("phases"), "expected an array");
        s.phases.clear();
        for (std::size_t i = 0; i < ph.size(); ++i) {
            ObjectReader pr(ph[i], r.path_of("phases") + "[" + std::to_string(i) + "]");
            HybridPhase p;
            pr.optional("ops", p.ops);
            pr.optional("scan_fraction", p.scan_fraction);
            pr.optional("write_fraction", p.write_fraction);
            pr.optional("scan_length", p.scan_length);
            pr.finish();
            s.phases.push_back(p);
        }
    }
    r.finish();
    return s;
}

inline json to_json(const HybridReport& h) {
    json trs = json::array();
    for (const auto& t : h.transitions)
        trs.push_back({{"phase", t.phase},
                       {"from", t.from},
                       {"to", t.to},
                       {"strategy", t.strategy},
                       {"charged_io", t.charged_io},
                       {"measured_io", t.measured_io},
                       {"region_count", t.region_count}});
    return {{"btree_io", h.btree_io},
            {"lsm_io", h.lsm_io},
            {"hybrid_io", h.hybrid_io},
            {"btree_phase_io", h.btree_phase_io},
            {"lsm_phase_io", h.lsm_phase_io},
            {"hybrid_phase_io", h.hybrid_phase_io},
            {"hybrid_designs", h.hybrid_designs},
            {"transitions", trs}};
}

}  // namespace continuum
