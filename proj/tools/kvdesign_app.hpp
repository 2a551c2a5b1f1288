#pragma once

#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "continuum/api.hpp"

namespace kvdesign {

using continuum::json;

// Bad flag values and unreadable inputs exit 2 like any other usage error.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A JSON argument is either inline text or a path to a file holding it.
inline json load_json(const std::string& arg, const std::string& flag) {
    std::string text = arg;
    const auto first = arg.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || (arg[first] != '{' && arg[first] != '[')) {
        std::ifstream in(arg);
        if (!in) throw UsageError(flag + ": cannot read '" + arg + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw continuum::ParseError(flag.substr(flag.find_first_not_of('-')), std::string("malformed JSON: ") + e.what());
    }
}

inline std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// Flattens a document into aligned "path  value" rows. Arrays of scalars stay
// on one line.
inline void flatten(const json& v, const std::string& path, std::vector<std::pair<std::string, std::string>>& rows) {
    const bool scalar_array =
        v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_primitive(); });
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), rows);
    } else if (v.is_array() && !scalar_array) {
        for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], path + "[" + std::to_string(i) + "]", rows);
    } else {
        rows.emplace_back(path, scalar_text(v));
    }
}

inline std::string table(const json& doc) {
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(doc, "", rows);
    std::size_t w = 0;
    for (const auto& r : rows) w = std::max(w, r.first.size());
    std::ostringstream os;
    for (const auto& r : rows) os << std::left << std::setw(static_cast<int>(w) + 2) << r.first << r.second << '\n';
    return os.str();
}

inline std::string csv_table(const std::string& csv) {
    std::vector<std::vector<std::string>> cells;
    std::istringstream in(csv);
    std::string line;
    std::vector<std::size_t> w;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) row.push_back(c);
        if (w.size() < row.size()) w.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) w[i] = std::max(w[i], row[i].size());
        cells.push_back(std::move(row));
    }
    std::ostringstream os;
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << std::left << std::setw(static_cast<int>(w[i]) + (i + 1 < row.size() ? 2 : 0)) << row[i];
        os << '\n';
    }
    return os.str();
}

inline void set_seed(json& body, const std::string& key, std::uint64_t seed) {
    if (!body.contains(key) || body[key].is_null()) body[key] = json::object();
    if (body[key].is_object()) body[key]["seed"] = seed;
}

// ------------------------------------------------------------ HTTP

inline void install_routes(httplib::Server& svr) {
    auto reply_error = [](httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    };
    svr.Get("/api/presets", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(continuum::api::presets().dump(), "application/json");
    });
    for (const auto& [path, handler] : continuum::api::post_routes()) {
        auto fn = handler;
        svr.Post(path, [fn, reply_error](const httplib::Request& req, httplib::Response& res) {
            try {
                const json body = json::parse(req.body);
                res.set_content(fn(body).dump(), "application/json");
            } catch (const json::parse_error& e) {
                reply_error(res, 400, {{"code", "parse_error"}, {"message", std::string("malformed JSON: ") + e.what()}});
            } catch (const continuum::Error& e) {
                reply_error(res, 400, continuum::api::error_body(e));
            } catch (const std::exception& e) {
                reply_error(res, 500, {{"code", "internal_error"}, {"message", e.what()}});
            }
        });
    }
}

// ------------------------------------------------------------ CLI

struct Options {
    bool pretty = false;
    std::string out;
    int jobs = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;

    std::string env, spec, config, knobs, preset, mix, start, trace, state, options;
    int resolution = 10;
    double total_bits = 0, dm_bits = 64, step_bits = 64;
    std::uint64_t trials = 64, max_steps = 100000;
    std::string format = "csv";
    std::vector<double> levels;
    double entry_bytes = 16, page_bytes = 4096, phi = 1;
    std::uint64_t pages_per_step = 0;
    std::string strategy = "auto";
    double overhead = 1, asymmetry = 20;
    int port = 8080;
    std::string static_dir;
};

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"kvdesign: key-value store design continuum, simulator and transitions", "kvdesign"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand
    Options o;
    app.add_flag("--pretty", o.pretty, "human-readable table instead of JSON/CSV");
    app.add_option("--out", o.out, "write output to this file instead of stdout");
    app.add_option("--jobs", o.jobs, "worker threads for sweeps and validation")->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", o.seed, "seed for workload generation and the simulator (default 0)");

    auto env_flag = [&](CLI::App* c, bool req) {
        auto* f = c->add_option("--env", o.env, "Environment JSON (file or inline)");
        if (req) f->required();
    };
    auto opts_flag = [&](CLI::App* c) { c->add_option("--options", o.options, "ModelOptions JSON"); };
    auto spec_flag = [&](CLI::App* c, bool req) {
        auto* f = c->add_option("--spec", o.spec, "WorkloadSpec JSON (file or inline)");
        if (req) f->required();
    };
    auto config_flag = [&](CLI::App* c) { c->add_option("--config", o.config, "SimConfig JSON (file or inline)"); };

    auto* design = app.add_subcommand("design", "continuum model")->require_subcommand(1);
    auto* instantiate = design->add_subcommand("instantiate", "knobs and costs of a preset");
    env_flag(instantiate, true);
    opts_flag(instantiate);
    instantiate->add_option("--preset", o.preset, "preset name")->required();
    auto* dcost = design->add_subcommand("cost", "costs of a knob vector");
    env_flag(dcost, true);
    opts_flag(dcost);
    dcost->add_option("--knobs", o.knobs, "DesignKnobs JSON");
    dcost->add_option("--preset", o.preset, "preset name instead of --knobs");
    dcost->add_option("--mix", o.mix, "WorkloadMix JSON; adds theta and bottleneck");
    auto* dnav = design->add_subcommand("navigate", "greedy walk from a starting design");
    env_flag(dnav, true);
    opts_flag(dnav);
    dnav->add_option("--mix", o.mix, "WorkloadMix JSON")->required();
    dnav->add_option("--start", o.start, "DesignKnobs JSON");
    dnav->add_option("--preset", o.preset, "preset to start from");
    auto* dauto = design->add_subcommand("auto", "exhaustive search over the knob grid");
    env_flag(dauto, true);
    opts_flag(dauto);
    dauto->add_option("--mix", o.mix, "WorkloadMix JSON")->required();
    auto* dlsb = design->add_subcommand("lsb", "LSB-tree costs next to a leveled LSM-tree");
    env_flag(dlsb, true);
    dlsb->add_option("--overhead", o.overhead, "index replication overhead");
    dlsb->add_option("--asymmetry", o.asymmetry, "random read to sequential write cost ratio");

    auto* workload = app.add_subcommand("workload", "trace generation")->require_subcommand(1);
    auto* wgen = workload->add_subcommand("gen", "emit a trace as JSON lines");
    spec_flag(wgen, true);

    auto* simulate = app.add_subcommand("simulate", "run a trace through the simulator");
    spec_flag(simulate, false);
    config_flag(simulate);
    simulate->add_option("--trace", o.trace, "trace file (JSON lines) instead of --spec");

    auto* sweep = app.add_subcommand("sweep", "I/O over the memory simplex");
    spec_flag(sweep, true);
    config_flag(sweep);
    sweep->add_option("--resolution", o.resolution, "points per simplex edge")->check(CLI::Range(2, 1000));
    sweep->add_option("--total-bits", o.total_bits, "memory shared by cache, buffer and filters");
    sweep->add_option("--dm-bits", o.dm_bits, "memory increment for the gradient estimates");
    sweep->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    auto* sgd = app.add_subcommand("sgd", "gradient descent over the memory split");
    spec_flag(sgd, true);
    config_flag(sgd);
    sgd->add_option("--start", o.start, "MemoryPoint JSON");
    sgd->add_option("--step-bits", o.step_bits, "bits moved per step");
    sgd->add_option("--dm-bits", o.dm_bits, "memory increment for the gradient estimates");
    sgd->add_option("--max-steps", o.max_steps, "step limit");

    auto* validate = app.add_subcommand("validate", "paired-simulation check of the gradient estimates");
    spec_flag(validate, true);
    config_flag(validate);
    validate->add_option("--trials", o.trials, "paired trials")->check(CLI::Range(2, 100000));
    validate->add_option("--dm-bits", o.dm_bits, "memory increment");

    auto* transition = app.add_subcommand("transition", "design transitions")->require_subcommand(1);
    auto* tplan = transition->add_subcommand("plan", "closed-form LSM to B+tree costs");
    tplan->add_option("--levels", o.levels, "entries per level, top first")->required()->delimiter(',');
    tplan->add_option("--entry-bytes", o.entry_bytes, "bytes per entry");
    tplan->add_option("--page-bytes", o.page_bytes, "bytes per page");
    tplan->add_option("--phi", o.phi, "write to read cost ratio");
    tplan->add_option("--pages-per-step", o.pages_per_step, "also plan a gradual transition");
    auto* texec = transition->add_subcommand("exec", "execute LSM to B+tree on a snapshot");
    texec->add_option("--state", o.state, "SimState snapshot JSON")->required();
    texec->add_option("--phi", o.phi, "write to read cost ratio");
    texec->add_option("--strategy", o.strategy, "auto, sort_merge or batch_insert")
        ->check(CLI::IsMember({"auto", "sort_merge", "batch_insert"}));
    auto* thybrid = transition->add_subcommand("hybrid", "two-phase trace with and without transitions");
    spec_flag(thybrid, false);

    auto* serve = app.add_subcommand("serve", "HTTP JSON API");
    serve->add_option("--port", o.port, "listen port")->check(CLI::Range(0, 65535));
    serve->add_option("--static", o.static_dir, "directory of web assets to serve at /");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }
    o.seed_set = seed_opt->count() > 0;

    std::ostringstream buf;
    auto emit = [&](const json& doc) {
        if (o.pretty) buf << table(doc);
        else buf << doc.dump() << '\n';
    };

    try {
        if (design->parsed()) {
            json body = {{"env", load_json(o.env, "--env")}};
            if (!o.options.empty()) body["options"] = load_json(o.options, "--options");
            if (instantiate->parsed()) {
                body["preset"] = o.preset;
                emit(continuum::api::cost(body));
            } else if (dcost->parsed()) {
                if (o.knobs.empty() == o.preset.empty()) throw UsageError("design cost: give exactly one of --knobs, --preset");
                if (!o.knobs.empty()) body["knobs"] = load_json(o.knobs, "--knobs");
                else body["preset"] = o.preset;
                if (!o.mix.empty()) body["mix"] = load_json(o.mix, "--mix");
                emit(continuum::api::cost(body));
            } else if (dnav->parsed()) {
                if (o.start.empty() == o.preset.empty()) throw UsageError("design navigate: give exactly one of --start, --preset");
                body["mix"] = load_json(o.mix, "--mix");
                body["start"] = o.start.empty() ? json(o.preset) : load_json(o.start, "--start");
                emit(continuum::api::navigate(body));
            } else if (dauto->parsed()) {
                body["mix"] = load_json(o.mix, "--mix");
                emit(continuum::api::auto_design(body));
            } else {
                body.erase("options");
                body["overhead"] = o.overhead;
                body["asymmetry"] = o.asymmetry;
                emit(continuum::api::lsb(body));
            }
        } else if (workload->parsed()) {
            json spec = load_json(o.spec, "--spec");
            if (o.seed_set) spec["seed"] = o.seed;
            continuum::write_trace(buf, continuum::generate(continuum::workload_from_json(spec, "spec")));
        } else if (simulate->parsed()) {
            json body = json::object();
            if (!o.config.empty()) body["config"] = load_json(o.config, "--config");
            if (o.seed_set) set_seed(body, "config", o.seed);
            if (!o.trace.empty()) {
                if (!o.spec.empty()) throw UsageError("simulate: give either --spec or --trace");
                std::ifstream in(o.trace);
                if (!in) throw UsageError("--trace: cannot read '" + o.trace + "'");
                const auto ops = continuum::read_trace(in);
                const auto cfg = body.contains("config") ? continuum::sim_config_from_json(body["config"])
                                                         : continuum::SimConfig{};
                emit(continuum::api::simulate_trace(ops, cfg));
            } else {
                if (o.spec.empty()) throw UsageError("simulate: --spec or --trace is required");
                body["spec"] = load_json(o.spec, "--spec");
                if (o.seed_set) set_seed(body, "spec", o.seed);
                emit(continuum::api::simulate(body));
            }
        } else if (sweep->parsed() || sgd->parsed() || validate->parsed()) {
            json body = {{"spec", load_json(o.spec, "--spec")}};
            if (!o.config.empty()) body["config"] = load_json(o.config, "--config");
            if (o.seed_set) {
                set_seed(body, "spec", o.seed);
                set_seed(body, "config", o.seed);
            }
            body["dm_bits"] = o.dm_bits;
            if (sweep->parsed()) {
                body["resolution"] = o.resolution;
                if (o.total_bits > 0) body["total_bits"] = o.total_bits;
                const auto g = continuum::api::grid_result(body, o.jobs, [&](std::size_t done, std::size_t total) {
                    if (done == total || done % 16 == 0) err << "sweep: " << done << "/" << total << " cells\n";
                });
                if (o.format == "json") {
                    emit(continuum::api::grid_rows(g));
                } else {
                    std::ostringstream csv;
                    continuum::write_grid_csv(csv, g);
                    buf << (o.pretty ? csv_table(csv.str()) : csv.str());
                }
            } else if (sgd->parsed()) {
                if (!o.start.empty()) body["start"] = load_json(o.start, "--start");
                body["step_bits"] = o.step_bits;
                body["max_steps"] = o.max_steps;
                std::size_t n = 0;
                emit(continuum::api::sgd(body, [&](const continuum::SgdStep& s) {
                    err << "sgd: step " << n++ << " total_io " << s.total_io << "\n";
                }));
            } else {
                body["trials"] = o.trials;
                emit(continuum::api::validate(body, o.jobs));
            }
        } else if (transition->parsed()) {
            if (tplan->parsed()) {
                json body = {{"state",
                              {{"levels", o.levels},
                               {"entry_bytes", o.entry_bytes},
                               {"page_bytes", o.page_bytes},
                               {"write_read_ratio", o.phi}}}};
                if (o.pages_per_step > 0) body["pages_per_step"] = o.pages_per_step;
                emit(continuum::api::transition(body));
            } else if (texec->parsed()) {
                json body = {{"state", load_json(o.state, "--state")}, {"write_read_ratio", o.phi}, {"strategy", o.strategy}};
                emit(continuum::api::transition_exec(body));
            } else {
                json body = o.spec.empty() ? json(nullptr) : load_json(o.spec, "--spec");
                if (o.seed_set) {
                    if (body.is_null()) body = json::object();
                    body["seed"] = o.seed;
                }
                emit(continuum::api::hybrid(body));
            }
        } else if (serve->parsed()) {
            httplib::Server svr;
            install_routes(svr);
            if (!o.static_dir.empty() && !svr.set_mount_point("/", o.static_dir))
                throw UsageError("--static: not a directory '" + o.static_dir + "'");
            err << "serving on port " << o.port << "\n";
            if (!svr.listen("0.0.0.0", o.port)) {
                err << "error: cannot listen on port " << o.port << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const continuum::Error& e) {
        err << continuum::api::error_body(e).dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << json{{"code", "internal_error"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }

    if (o.out.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) {
            err << "error: --out: cannot write '" << o.out << "'\n";
            return 2;
        }
        f << buf.str();
    }
    return 0;
}

}  // namespace kvdesign
