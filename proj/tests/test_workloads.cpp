#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "continuum/workloads.hpp"

using namespace continuum;

namespace {

WorkloadSpec spec_of(WorkloadKind kind, std::uint64_t keys = 500, std::uint64_t ops = 5000, std::uint64_t seed = 7) {
    WorkloadSpec s;
    s.kind = kind;
    s.key_count = keys;
    s.op_count = ops;
    s.write_prob = 0.3;
    s.seed = seed;
    s.read_rate = 5;
    s.write_rate = 2;
    s.update_rate = 1;
    s.decay_beta = {2, 1};
    s.period = 50;
    return s;
}

const WorkloadKind kAllKinds[] = {WorkloadKind::Uniform,      WorkloadKind::RoundRobin,
                                  WorkloadKind::EightyTwenty, WorkloadKind::Zipf,
                                  WorkloadKind::DiscoverDecay, WorkloadKind::PeriodicDecay};

}  // namespace

TEST(Workloads, RoundRobinExample) {
    WorkloadSpec s;
    s.kind = WorkloadKind::RoundRobin;
    s.key_count = 3;
    s.op_count = 6;
    s.write_prob = 0;
    const auto ops = generate(s);
    const std::vector<Operation> expect = {{OpType::Insert, 0}, {OpType::Insert, 1}, {OpType::Insert, 2},
                                           {OpType::Read, 0},   {OpType::Read, 1},   {OpType::Read, 2}};
    EXPECT_EQ(ops, expect);
}

TEST(Workloads, EveryKindHasExactLengthAndFirstTouchInserts) {
    for (auto kind : kAllKinds) {
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto spec = spec_of(kind, 300, 4000, seed);
            const auto ops = generate(spec);
            ASSERT_EQ(ops.size(), spec.op_count) << workload_kind_name(kind);
            std::set<std::uint64_t> seen;
            for (const auto& op : ops) {
                ASSERT_LT(op.key, spec.key_count);
                const bool first = seen.insert(op.key).second;
                EXPECT_EQ(first, op.type == OpType::Insert) << workload_kind_name(kind) << " key " << op.key;
            }
        }
    }
}

TEST(Workloads, SameSeedSameTrace) {
    for (auto kind : kAllKinds) {
        const auto a = generate(spec_of(kind)), b = generate(spec_of(kind));
        EXPECT_EQ(a, b) << workload_kind_name(kind);
        EXPECT_NE(a, generate(spec_of(kind, 500, 5000, 8))) << workload_kind_name(kind);
    }
}

TEST(Workloads, WriteProbabilitySetsUpdateShare) {
    auto s = spec_of(WorkloadKind::Uniform, 100, 40000);
    s.write_prob = 0.25;
    int repeats = 0, updates = 0;
    for (const auto& op : generate(s)) {
        if (op.type == OpType::Insert) continue;
        ++repeats;
        updates += op.type == OpType::Update;
    }
    const double p = 0.25, sd = std::sqrt(p * (1 - p) / repeats);
    EXPECT_NEAR(static_cast<double>(updates) / repeats, p, 3 * sd);
}

TEST(Workloads, UniformKeyFrequencies) {
    auto s = spec_of(WorkloadKind::Uniform, 20, 40000);
    std::vector<int> counts(20);
    for (const auto& op : generate(s)) ++counts[op.key];
    double chi2 = 0;
    for (int c : counts) chi2 += (c - 2000.0) * (c - 2000.0) / 2000.0;
    EXPECT_LT(chi2, 43.82);  // chi-square, 19 dof, p = 0.001
}

TEST(Workloads, ZipfRankRatio) {
    // Key 0 is rank 1. Oracle: the ratio of zeta weights, 2^s.
    auto s = spec_of(WorkloadKind::Zipf, 1000, 100000);
    s.zipf_s = 1.5;
    int one = 0, two = 0;
    for (const auto& op : generate(s)) {
        one += op.key == 0;
        two += op.key == 1;
    }
    const double expect = std::pow(2.0, 1.5);
    EXPECT_NEAR(static_cast<double>(one) / two, expect, 0.1 * expect);
}

TEST(Workloads, EightyTwentyFavoursRecentInserts) {
    auto s = spec_of(WorkloadKind::EightyTwenty, 2000, 20000);
    std::vector<std::uint64_t> inserted;
    int recent = 0, later = 0;
    for (const auto& op : generate(s)) {
        if (!inserted.empty()) {
            const std::size_t window = std::max<std::size_t>(1, (inserted.size() + 4) / 5);
            const auto begin = inserted.end() - static_cast<std::ptrdiff_t>(window);
            recent += std::find(begin, inserted.end(), op.key) != inserted.end();
            ++later;
        }
        if (op.type == OpType::Insert) inserted.push_back(op.key);
    }
    // 80% by construction plus whatever the uniform draws happen to hit.
    EXPECT_GE(static_cast<double>(recent) / later, 0.8 - 3 * std::sqrt(0.16 / later));
}

TEST(Workloads, DiscoverDecayTickRates) {
    auto s = spec_of(WorkloadKind::DiscoverDecay, 100000, 30000);
    s.read_rate = 12;
    s.write_rate = 4;
    s.update_rate = 2.5;
    const auto g = generate_detailed(s);
    ASSERT_GE(g.ticks.size(), 1000u);
    const double n = static_cast<double>(g.ticks.size());
    double r = 0, w = 0, u = 0;
    for (const auto& t : g.ticks) {
        r += t.reads;
        w += t.writes;
        u += t.updates;
    }
    EXPECT_NEAR(r / n, s.read_rate, 3 * std::sqrt(s.read_rate / n));
    EXPECT_NEAR(w / n, s.write_rate, 3 * std::sqrt(s.write_rate / n));
    EXPECT_NEAR(u / n, s.update_rate, 3 * std::sqrt(s.update_rate / n));
}

TEST(Workloads, DiscoverDecayWithoutDecayReadsInProportionToPopularity) {
    // A huge write rate inserts every key on tick 0; with decay 1 the read
    // distribution is then fixed at popularity / sum.
    auto s = spec_of(WorkloadKind::DiscoverDecay, 20, 60000);
    s.write_rate = 1000;
    s.read_rate = 50;
    s.update_rate = 0;
    s.decay_beta = {1, 0};
    const auto g = generate_detailed(s);
    ASSERT_EQ(g.keys.size(), 20u);
    double total_pop = 0;
    for (const auto& k : g.keys) {
        EXPECT_EQ(k.decay, 1.0);
        EXPECT_EQ(k.born, 0u);
        total_pop += k.popularity;
    }
    std::map<std::uint64_t, int> reads;
    int n = 0;
    for (const auto& op : g.ops)
        if (op.type == OpType::Read) {
            ++reads[op.key];
            ++n;
        }
    for (const auto& k : g.keys) {
        const double p = k.popularity / total_pop;
        const double sd = std::sqrt(n * p * (1 - p));
        EXPECT_NEAR(reads[k.key], n * p, 3 * sd) << "key " << k.key;
    }
}

TEST(Workloads, DecayedKeysFadeOverTime) {
    KeyAttributes k{0, 0.5, 0.9, 10};
    WorkloadSpec s = spec_of(WorkloadKind::DiscoverDecay);
    EXPECT_DOUBLE_EQ(decay_popularity(k, 10, s), 0.5);
    EXPECT_NEAR(decay_popularity(k, 13, s), 0.5 * 0.729, 1e-12);
}

TEST(Workloads, InverseCycloidShape) {
    const double P = 40;
    EXPECT_NEAR(inverse_cycloid(0, P), 1, 1e-9);
    EXPECT_NEAR(inverse_cycloid(P / 2, P), 0, 1e-9);
    EXPECT_NEAR(inverse_cycloid(P, P), 1, 1e-9);
    double prev = 2;
    for (double a = 0; a <= P / 2; a += 0.5) {
        const double v = inverse_cycloid(a, P);
        EXPECT_GE(v, 0);
        EXPECT_LE(v, prev + 1e-12);
        EXPECT_NEAR(v, inverse_cycloid(P - a, P), 1e-6);
        prev = v;
    }
    // The cusp is sharp: the curve leaves 1 faster than a cosine does.
    EXPECT_LT(inverse_cycloid(1, P), (1 + std::cos(2 * std::numbers::pi / P)) / 2);
}

TEST(Workloads, PeriodicCuspsBeatMidPeriod) {
    auto s = spec_of(WorkloadKind::PeriodicDecay, 200, 3000);
    s.cuspity = 2;
    const auto g = generate_detailed(s);
    ASSERT_FALSE(g.keys.empty());
    for (const auto& k : g.keys) {
        if (!(k.decay < 1)) continue;
        const auto mid = k.born + static_cast<std::uint64_t>(s.period / 2);
        const double cusp0 = decay_popularity(k, k.born, s);
        const double cusp1 = decay_popularity(k, k.born + static_cast<std::uint64_t>(s.period), s);
        EXPECT_GT(cusp0, decay_popularity(k, mid, s));
        EXPECT_GT(cusp1, decay_popularity(k, mid, s));
    }
}

TEST(Workloads, SpecValidation) {
    auto bad = [](auto edit, const char* field) {
        WorkloadSpec s = spec_of(WorkloadKind::PeriodicDecay);
        edit(s);
        try {
            s.validate();
            ADD_FAILURE() << "accepted bad " << field;
        } catch (const SpecError& e) {
            EXPECT_EQ(e.field(), field);
        }
    };
    bad([](WorkloadSpec& s) { s.key_count = 0; }, "key_count");
    bad([](WorkloadSpec& s) { s.op_count = 0; }, "op_count");
    bad([](WorkloadSpec& s) { s.write_prob = 1.5; }, "write_prob");
    bad([](WorkloadSpec& s) { s.popularity_beta.a = 0; }, "popularity_beta");
    bad([](WorkloadSpec& s) { s.decay_beta.a = -1; }, "decay_beta");
    bad([](WorkloadSpec& s) { s.period = 0; }, "period");
    bad([](WorkloadSpec& s) { s.cuspity = 0.5; }, "cuspity");
    bad([](WorkloadSpec& s) { s.write_rate = 0; }, "write_rate");
    bad([](WorkloadSpec& s) {
        s.read_rate = s.update_rate = 0;
        s.key_count = 10;
    }, "op_count");
    WorkloadSpec z = spec_of(WorkloadKind::Zipf);
    z.zipf_s = 1;
    EXPECT_THROW(z.validate(), SpecError);
    EXPECT_THROW(parse_workload_kind("gaussian"), SpecError);
    EXPECT_EQ(parse_workload_kind("eighty_twenty"), WorkloadKind::EightyTwenty);
}
