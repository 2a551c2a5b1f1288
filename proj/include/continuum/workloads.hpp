#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace continuum {

enum class OpType { Insert, Read, Update };

inline const char* op_name(OpType t) {
    switch (t) {
        case OpType::Insert: return "insert";
        case OpType::Read: return "read";
        case OpType::Update: return "update";
    }
    return "";
}

struct Operation {
    OpType type = OpType::Read;
    std::uint64_t key = 0;
    bool operator==(const Operation&) const = default;
};

enum class WorkloadKind { Uniform, RoundRobin, EightyTwenty, Zipf, DiscoverDecay, PeriodicDecay };

inline const char* workload_kind_name(WorkloadKind k) {
    switch (k) {
        case WorkloadKind::Uniform: return "uniform";
        case WorkloadKind::RoundRobin: return "round_robin";
        case WorkloadKind::EightyTwenty: return "eighty_twenty";
        case WorkloadKind::Zipf: return "zipf";
        case WorkloadKind::DiscoverDecay: return "discover_decay";
        case WorkloadKind::PeriodicDecay: return "periodic_decay";
    }
    return "";
}

inline WorkloadKind parse_workload_kind(const std::string& s) {
    for (auto k : {WorkloadKind::Uniform, WorkloadKind::RoundRobin, WorkloadKind::EightyTwenty,
                   WorkloadKind::Zipf, WorkloadKind::DiscoverDecay, WorkloadKind::PeriodicDecay})
        if (s == workload_kind_name(k)) return k;
    throw SpecError("kind", "unknown workload kind '" + s + "'");
}

struct BetaParams {
    double a = 1;
    double b = 1;
};

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::Uniform;
    std::uint64_t key_count = 1000;
    std::uint64_t op_count = 10000;
    double write_prob = 0.0;   // chance a repeat touch is an update
    double zipf_s = 1.1;
    double read_rate = 1;      // per-tick Poisson means for the decay kinds
    double write_rate = 1;
    double update_rate = 0;
    BetaParams popularity_beta{1, 1};
    // b == 0 is the degenerate limit: every key gets decay exactly 1.
    BetaParams decay_beta{1, 1};
    double period = 100;
    double cuspity = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (key_count == 0) throw SpecError("key_count", "key_count must be positive");
        if (op_count == 0) throw SpecError("op_count", "op_count must be positive");
        if (!(write_prob >= 0 && write_prob <= 1))
            throw SpecError("write_prob", "write_prob must lie in [0, 1]");
        if (kind == WorkloadKind::Zipf && !(zipf_s > 1))
            throw SpecError("zipf_s", "zipf_s must exceed 1");
        if (kind == WorkloadKind::DiscoverDecay || kind == WorkloadKind::PeriodicDecay) {
            if (!(read_rate >= 0) || !(write_rate >= 0) || !(update_rate >= 0))
                throw SpecError("read_rate", "Poisson rates must be non-negative");
            if (!(write_rate > 0)) throw SpecError("write_rate", "write_rate must be positive");
            if (!(popularity_beta.a > 0) || !(popularity_beta.b > 0))
                throw SpecError("popularity_beta", "Beta parameters must be positive");
            if (!(decay_beta.a > 0) || !(decay_beta.b >= 0))
                throw SpecError("decay_beta", "Beta parameters must be positive");
            if (read_rate + update_rate <= 0 && key_count < op_count)
                throw SpecError("op_count", "op_count exceeds key_count and no reads or updates are drawn");
        }
        if (kind == WorkloadKind::PeriodicDecay) {
            if (!(period > 0)) throw SpecError("period", "period must be positive");
            if (!(cuspity >= 1)) throw SpecError("cuspity", "cuspity must be at least 1");
        }
    }
};

// Per-key attributes of the decay workloads.
struct KeyAttributes {
    std::uint64_t key = 0;
    double popularity = 0;  // theta_i
    double decay = 1;       // gamma_i
    std::uint64_t born = 0; // tick of insertion
};

struct TickCounts {
    std::uint64_t reads = 0, writes = 0, updates = 0;
};

struct GeneratedTrace {
    std::vector<Operation> ops;
    std::vector<std::uint64_t> op_tick;   // decay kinds only
    std::vector<KeyAttributes> keys;      // decay kinds only
    std::vector<TickCounts> ticks;        // drawn counts, decay kinds only
};

// Height of a cycloid over one period mapped so the cusps sit at 1 and the
// mid-period trough at 0.
inline double inverse_cycloid(double age, double period) {
    const double x = std::fmod(age, period) / period * 2.0 * std::numbers::pi;
    // Solve phi - sin(phi) = x on [0, 2pi] by bisection (the map is monotone).
    double lo = 0, hi = 2.0 * std::numbers::pi;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid - std::sin(mid) < x) lo = mid;
        else hi = mid;
    }
    const double phi = 0.5 * (lo + hi);
    return std::clamp((1.0 + std::cos(phi)) / 2.0, 0.0, 1.0);
}

inline double decay_popularity(const KeyAttributes& k, std::uint64_t tick, const WorkloadSpec& spec) {
    const double age = static_cast<double>(tick - k.born);
    double p = k.popularity * std::pow(k.decay, age);
    if (spec.kind == WorkloadKind::PeriodicDecay)
        p *= std::pow(inverse_cycloid(age, spec.period), spec.cuspity);
    return p;
}

namespace detail {

class TouchTracker {
public:
    explicit TouchTracker(std::uint64_t n) : seen_(n, false) {}
    // First touch inserts; later touches update with probability w.
    Operation touch(std::uint64_t key, double w, Rng& rng) {
        if (!seen_[key]) {
            seen_[key] = true;
            return {OpType::Insert, key};
        }
        return {rng.bernoulli(w) ? OpType::Update : OpType::Read, key};
    }

private:
    std::vector<bool> seen_;
};

inline GeneratedTrace generate_decay(const WorkloadSpec& spec, Rng& rng) {
    GeneratedTrace out;
    std::vector<double> cdf;
    std::uint64_t next_key = 0;
    for (std::uint64_t tick = 0; out.ops.size() < spec.op_count; ++tick) {
        TickCounts tc;
        tc.reads = rng.poisson(spec.read_rate);
        tc.writes = rng.poisson(spec.write_rate);
        tc.updates = rng.poisson(spec.update_rate);
        out.ticks.push_back(tc);
        if (next_key >= spec.key_count && spec.read_rate + spec.update_rate <= 0) break;

        for (std::uint64_t i = 0; i < tc.writes && next_key < spec.key_count; ++i) {
            KeyAttributes k;
            k.key = next_key++;
            k.popularity = rng.beta(spec.popularity_beta.a, spec.popularity_beta.b);
            k.decay = spec.decay_beta.b == 0 ? 1.0 : rng.beta(spec.decay_beta.a, spec.decay_beta.b);
            k.born = tick;
            out.keys.push_back(k);
            if (out.ops.size() < spec.op_count) {
                out.ops.push_back({OpType::Insert, k.key});
                out.op_tick.push_back(tick);
            }
        }

        cdf.resize(out.keys.size());
        double acc = 0;
        for (std::size_t i = 0; i < out.keys.size(); ++i) {
            acc += decay_popularity(out.keys[i], tick, spec);
            cdf[i] = acc;
        }
        if (acc <= 0) continue;

        // Reads and updates of the tick in random order.
        std::uint64_t reads = tc.reads, updates = tc.updates;
        while ((reads > 0 || updates > 0) && out.ops.size() < spec.op_count) {
            const bool is_read = rng.below(reads + updates) < reads;
            (is_read ? reads : updates)--;
            const double u = rng.uniform() * acc;
            const auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            const auto& key = out.keys[std::min(idx, out.keys.size() - 1)];
            out.ops.push_back({is_read ? OpType::Read : OpType::Update, key.key});
            out.op_tick.push_back(tick);
        }
    }
    return out;
}

}  // namespace detail

inline GeneratedTrace generate_detailed(const WorkloadSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    if (spec.kind == WorkloadKind::DiscoverDecay || spec.kind == WorkloadKind::PeriodicDecay)
        return detail::generate_decay(spec, rng);

    GeneratedTrace out;
    out.ops.reserve(spec.op_count);
    detail::TouchTracker touched(spec.key_count);
    const std::uint64_t K = spec.key_count;
    switch (spec.kind) {
        case WorkloadKind::Uniform:
            for (std::uint64_t i = 0; i < spec.op_count; ++i)
                out.ops.push_back(touched.touch(rng.below(K), spec.write_prob, rng));
            break;
        case WorkloadKind::RoundRobin:
            for (std::uint64_t i = 0; i < spec.op_count; ++i)
                out.ops.push_back(touched.touch(i % K, spec.write_prob, rng));
            break;
        case WorkloadKind::Zipf: {
            ZetaSampler zeta(K, spec.zipf_s);
            for (std::uint64_t i = 0; i < spec.op_count; ++i)
                out.ops.push_back(touched.touch(zeta.sample(rng) - 1, spec.write_prob, rng));
            break;
        }
        case WorkloadKind::EightyTwenty: {
            // 80% of touches go to the most recent 20% of inserted keys.
            std::vector<std::uint64_t> inserted;
            for (std::uint64_t i = 0; i < spec.op_count; ++i) {
                std::uint64_t key;
                if (!inserted.empty() && rng.bernoulli(0.8)) {
                    const std::uint64_t window = std::max<std::uint64_t>(1, (inserted.size() + 4) / 5);
                    key = inserted[inserted.size() - 1 - rng.below(window)];
                } else {
                    key = rng.below(K);
                }
                const Operation op = touched.touch(key, spec.write_prob, rng);
                if (op.type == OpType::Insert) inserted.push_back(key);
                out.ops.push_back(op);
            }
            break;
        }
        default: break;
    }
    return out;
}

inline std::vector<Operation> generate(const WorkloadSpec& spec) {
    return generate_detailed(spec).ops;
}

}  // namespace continuum
