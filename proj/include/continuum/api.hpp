#pragma once

#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "serialize.hpp"

// Request handlers shared by the command line and the HTTP server. Each takes
// a parsed request body and returns the response document; both front ends
// serialize the result with json::dump(), so identical bodies give identical
// bytes.
namespace continuum::api {

// Memory handed to the simplex when a request names none: 16 bits per key.
inline double default_total_bits(const WorkloadSpec& spec) { return 16.0 * static_cast<double>(spec.key_count); }

namespace detail {

inline DesignKnobs knobs_or_preset(const json& v, const std::string& path, const Environment& env,
                                   const ModelOptions& opt) {
    if (v.is_string()) return preset(v.get<std::string>(), env, opt);
    return knobs_from_json(v, path);
}

struct SweepRequest {
    WorkloadSpec spec;
    SimConfig config;
    double total_bits = 0;
    int resolution = 10;
    double dm_bits = 64;
};

inline SweepRequest sweep_request(const json& body) {
    ObjectReader r(body, "");
    SweepRequest q;
    q.spec = workload_from_json(r.raw("spec"), "spec");
    if (r.has("config")) q.config = sim_config_from_json(r.raw("config"), "config");
    q.total_bits = default_total_bits(q.spec);
    r.optional("total_bits", q.total_bits);
    r.optional("resolution", q.resolution);
    r.optional("dm_bits", q.dm_bits);
    r.finish();
    if (q.resolution < 2) throw ConfigError("resolution", "resolution must be at least 2");
    if (!(q.total_bits > 0)) throw ConfigError("total_bits", "total_bits must be positive");
    return q;
}

}  // namespace detail

inline json presets() {
    json names = json::array();
    for (const auto& n : preset_names()) names.push_back(n);
    return {{"presets", names}};
}

// {env, knobs | preset, options?, mix?}
inline json cost(const json& body) {
    ObjectReader r(body, "");
    const Environment env = environment_from_json(r.raw("env"));
    ModelOptions opt;
    if (r.has("options")) opt = options_from_json(r.raw("options"));
    DesignKnobs k;
    if (r.has("preset")) {
        std::string name;
        r.required("preset", name);
        if (r.has("knobs")) throw ParseError("knobs", "give either knobs or preset, not both");
        k = preset(name, env, opt);
    } else {
        k = knobs_from_json(r.raw("knobs"));
    }
    std::optional<WorkloadMix> mix;
    if (r.has("mix")) mix = mix_from_json(r.raw("mix"));
    r.finish();
    const DerivedDesign d = derive(env, k, opt);
    const CostVector c = continuum::cost(env, k, d, opt);
    json out = {{"knobs", to_json(k)}, {"derived", to_json(d)}, {"cost", to_json(c)}};
    if (mix) {
        mix->validate();
        out["theta"] = continuum::theta(c, *mix);
        out["bottleneck"] = cost_term_name(continuum::detail::bottleneck(c, *mix, {}));
    }
    return out;
}

// {env, mix, start: knobs | preset name, options?}
inline json navigate(const json& body) {
    ObjectReader r(body, "");
    const Environment env = environment_from_json(r.raw("env"));
    const WorkloadMix mix = mix_from_json(r.raw("mix"));
    ModelOptions opt;
    if (r.has("options")) opt = options_from_json(r.raw("options"));
    const DesignKnobs start = detail::knobs_or_preset(r.raw("start"), "start", env, opt);
    r.finish();
    return to_json(continuum::navigate(env, start, mix, opt));
}

// {env, mix, options?, full_merge_thresholds?, include_presets?}
inline json auto_design(const json& body) {
    ObjectReader r(body, "");
    const Environment env = environment_from_json(r.raw("env"));
    const WorkloadMix mix = mix_from_json(r.raw("mix"));
    ModelOptions opt;
    if (r.has("options")) opt = options_from_json(r.raw("options"));
    AutoDesignOptions ao;
    r.optional("full_merge_thresholds", ao.full_merge_thresholds);
    r.optional("include_presets", ao.include_presets);
    r.finish();
    return to_json(continuum::auto_design(env, mix, opt, ao));
}

// {env, overhead?, asymmetry?}: LSB-tree costs next to a leveled LSM-tree.
inline json lsb(const json& body) {
    ObjectReader r(body, "");
    const Environment env = environment_from_json(r.raw("env"));
    LsbTreeModel m;
    r.optional("overhead", m.overhead);
    r.optional("asymmetry", m.asymmetry);
    r.finish();
    return {{"lsb_tree", to_json(lsb_tree_cost(env, m))},
            {"leveled_lsm", to_json(continuum::cost(env, preset("leveled_lsm", env)))}};
}

// {spec, config?, total_bits?, resolution?, dm_bits?}
inline GridResult grid_result(const json& body, int jobs = 1, const Progress& progress = {}) {
    const auto q = detail::sweep_request(body);
    return grid_sweep(generate(q.spec), q.config, q.total_bits, q.resolution, q.dm_bits, jobs, progress);
}

inline json grid_rows(const GridResult& g) {
    json rows = json::array();
    const double n = g.resolution - 1;
    std::size_t best = 0;
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        const auto& c = g.cells[i];
        if (c.total_io < g.cells[best].total_io) best = i;
        rows.push_back({{"cache_frac", c.lattice[0] / n},
                        {"buffer_frac", c.lattice[1] / n},
                        {"bloom_frac", c.lattice[2] / n},
                        {"total_io", c.total_io},
                        {"arrow_from", c.arrow.exists ? component_name(c.arrow.from) : "none"},
                        {"arrow_to", c.arrow.exists ? component_name(c.arrow.to) : "none"}});
    }
    json minima = json::array();
    for (std::size_t i = 0; i < g.cells.size(); ++i)
        if (g.cells[i].total_io == g.cells[best].total_io) minima.push_back(i);
    return {{"resolution", g.resolution}, {"total_bits", g.total_bits}, {"rows", rows}, {"minima", minima}};
}

inline json grid(const json& body, int jobs = 1) { return grid_rows(grid_result(body, jobs)); }

// {spec, start, config?, step_bits?, dm_bits?, max_steps?}
inline json sgd(const json& body, std::function<void(const SgdStep&)> on_step = {}) {
    ObjectReader r(body, "");
    const WorkloadSpec spec = workload_from_json(r.raw("spec"), "spec");
    SimConfig cfg;
    if (r.has("config")) cfg = sim_config_from_json(r.raw("config"), "config");
    MemoryPoint start;
    if (r.has("start")) {
        start = memory_from_json(r.raw("start"), "start");
    } else {
        const double third = std::floor(default_total_bits(spec) / 3 / 64) * 64;
        start = {third, third, default_total_bits(spec) - 2 * third};
    }
    SgdOptions opt;
    r.optional("step_bits", opt.step_bits);
    r.optional("dm_bits", opt.dm_bits);
    std::uint64_t max_steps = opt.max_steps;
    r.optional("max_steps", max_steps);
    opt.max_steps = max_steps;
    opt.on_step = std::move(on_step);
    r.finish();
    return to_json(sgd_descend(generate(spec), cfg, start, opt));
}

// {spec, config?}: runs the trace and reports counters and gradients.
inline json simulate_trace(const std::vector<Operation>& ops, const SimConfig& cfg) {
    SimState s(cfg);
    s.run(ops);
    return {{"config", to_json(cfg)},
            {"ops", ops.size()},
            {"stats", to_json(s.stats())},
            {"gradient", to_json(estimate_gradients(s.stats(), cfg, cfg.gradient_dm_bits))},
            {"realloc", to_json(bloom_realloc_check(s.stats()))}};
}

inline json simulate(const json& body) {
    ObjectReader r(body, "");
    const WorkloadSpec spec = workload_from_json(r.raw("spec"), "spec");
    SimConfig cfg;
    if (r.has("config")) cfg = sim_config_from_json(r.raw("config"), "config");
    r.finish();
    return simulate_trace(generate(spec), cfg);
}

// {spec, config?, trials?, dm_bits?}
inline json validate(const json& body, int jobs = 1) {
    ObjectReader r(body, "");
    const WorkloadSpec spec = workload_from_json(r.raw("spec"), "spec");
    SimConfig cfg;
    if (r.has("config")) cfg = sim_config_from_json(r.raw("config"), "config");
    std::uint64_t trials = 64;
    double dm = 64;
    r.optional("trials", trials);
    r.optional("dm_bits", dm);
    r.finish();
    return to_json(validate_gradients(spec, cfg, trials, dm, jobs));
}

// {state, pages_per_step?}
inline json transition(const json& body) {
    ObjectReader r(body, "");
    const TransitionState st = transition_state_from_json(r.raw("state"));
    std::uint64_t k = 0;
    r.optional("pages_per_step", k);
    r.finish();
    st.validate();
    json out = {{"state", to_json(st)},
                {"costs", to_json(transition_costs(st))},
                {"strategy", strategy_name(choose_strategy(st))}};
    if (k > 0) out["gradual"] = to_json(plan_gradual(st, k));
    return out;
}

// {state: snapshot, write_read_ratio?, strategy?}
inline json transition_exec(const json& body) {
    ObjectReader r(body, "");
    const SimState lsm = snapshot_from_json(r.raw("state"));
    double phi = 1;
    std::string strategy = "auto";
    r.optional("write_read_ratio", phi);
    r.optional("strategy", strategy);
    r.finish();
    if (strategy == "auto") return to_json(execute_lsm_to_btree(lsm, phi));
    if (strategy == "sort_merge") return to_json(execute_lsm_to_btree(lsm, phi, false, TransitionStrategy::SortMerge));
    if (strategy == "batch_insert")
        return to_json(execute_lsm_to_btree(lsm, phi, false, TransitionStrategy::BatchInsert));
    throw ParseError("strategy", "expected auto, sort_merge or batch_insert");
}

inline json hybrid(const json& body) {
    const HybridSpec spec = body.is_null() ? default_hybrid_spec() : hybrid_from_json(body, "");
    return to_json(hybrid_benefit(spec));
}

// Error document used by both front ends.
inline json error_body(const Error& e) {
    json j = {{"code", e.code()}, {"message", e.what()}};
    if (!e.field().empty()) j["field"] = e.field();
    return j;
}

// Route table for the HTTP server: path -> handler.
inline const std::map<std::string, std::function<json(const json&)>>& post_routes() {
    static const std::map<std::string, std::function<json(const json&)>> routes = {
        {"/api/cost", [](const json& b) { return cost(b); }},
        {"/api/navigate", [](const json& b) { return navigate(b); }},
        {"/api/auto", [](const json& b) { return auto_design(b); }},
        {"/api/grid", [](const json& b) { return grid(b); }},
        {"/api/sgd", [](const json& b) { return sgd(b); }},
        {"/api/transition", [](const json& b) { return transition(b); }},
    };
    return routes;
}

}  // namespace continuum::api
