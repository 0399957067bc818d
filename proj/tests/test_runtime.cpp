#include <iostream>

#include "doctest.h"

#include <algorithm>
#include <random>

#include "impulse/runtime.hpp"
#include "helpers.hpp"

using namespace impulse;

namespace {

LayerSpec small_fc(NeuronModel::Kind kind = NeuronModel::Kind::IF, int threshold = 1) {
    LayerSpec l;
    l.kind = LayerSpec::Kind::FC;
    l.in_dim = 16;
    l.out_dim = 12;
    l.neuron = {kind, threshold};
    l.weights.assign(12, std::vector<int>(16, 1));
    return l;
}

long long count_kind(const Trace& trace, InstrKind kind) {
    long long n = 0;
    for (const auto& ev : trace) n += ev.kind == kind;
    return n;
}

}  // namespace

TEST_CASE("run_timestep: all-zero input issues only neuron-update instructions") {
    Engine engine({small_fc()}, {.parallel = false});
    SpikeTrain train;
    train.timesteps = 1;
    train.frames.emplace_back(16, 0);
    InferenceResult res = engine.run_inference(train);
    CHECK(count_kind(res.trace, InstrKind::AccW2V) == 0);
    CHECK(count_kind(res.trace, InstrKind::SpikeCheck) == 2);
    CHECK(count_kind(res.trace, InstrKind::ResetV) == 2);
    CHECK(res.trace.size() == 4);  // IF: 2 instructions per parity
}

TEST_CASE("run_timestep: k spiking inputs issue exactly 2k AccW2V events") {
    std::mt19937 rng(41);
    for (int k : {1, 3, 7, 16}) {
        Engine engine({small_fc()}, {.parallel = false});
        SpikeTrain train;
        train.timesteps = 1;
        train.frames.emplace_back(16, 0);
        std::vector<int> idx(16);
        for (int i = 0; i < 16; ++i) idx[i] = i;
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i = 0; i < k; ++i) train.frames[0][idx[i]] = 1;
        InferenceResult res = engine.run_inference(train);
        CHECK(count_kind(res.trace, InstrKind::AccW2V) == 2 * k);
    }
}

TEST_CASE("run_timestep: +1 weights with theta=1 fire and reset all 12 neurons") {
    Engine engine({small_fc(NeuronModel::Kind::IF, 1)}, {.parallel = false});
    SpikeTrain train;
    train.timesteps = 1;
    train.frames.emplace_back(16, 0);
    train.frames[0][5] = 1;
    InferenceResult res = engine.run_inference(train);
    for (int n = 0; n < 12; ++n) CHECK(res.output.frames[0][n] == 1);
    for (int v : engine.read_potentials(0)) CHECK(v == 0);
}

TEST_CASE("run_inference: T=1 equals a single run_timestep") {
    SpikeTrain train;
    train.timesteps = 1;
    train.frames.emplace_back(16, 0);
    train.frames[0][0] = train.frames[0][9] = 1;

    Engine a({small_fc(NeuronModel::Kind::LIF, 5)}, {.parallel = false});
    InferenceResult res = a.run_inference(train);

    Engine b({small_fc(NeuronModel::Kind::LIF, 5)}, {.parallel = false});
    auto out = b.run_timestep(train.frames[0]);
    CHECK(res.output.frames[0] == out);
}

TEST_CASE("run_inference: RMP under constant drive shows a sawtooth V trace") {
    LayerSpec l = small_fc(NeuronModel::Kind::RMP, 10);
    Engine engine({l}, {.parallel = false, .record_vmem = true});
    SpikeTrain train;
    train.timesteps = 8;
    train.frames.assign(8, std::vector<std::uint8_t>(16, 0));
    for (auto& f : train.frames) f[0] = f[1] = f[2] = 1;  // constant +3 drive
    InferenceResult res = engine.run_inference(train);

    std::vector<int> v0;  // neuron 0 trajectory
    for (const auto& e : res.v_trace) {
        if (e.neuron == 0) v0.push_back(e.value);
    }
    REQUIRE(v0.size() == 8);
    // Rises by 3 each step until it crosses theta, then soft-resets.
    std::vector<int> expect;
    int v = 0;
    for (int t = 0; t < 8; ++t) {
        v += 3;
        if (v >= 10) v -= 10;
        expect.push_back(v);
    }
    CHECK(v0 == expect);
    bool dropped = false;
    for (size_t i = 1; i < v0.size(); ++i) dropped |= v0[i] < v0[i - 1];
    CHECK(dropped);
}

TEST_CASE("trace determinism: identical runs give bit-identical traces") {
    std::mt19937 rng(43);
    LayerSpec l = test::random_fc_layer(rng, 64, 24, NeuronModel::Kind::LIF);
    SpikeTrain train = test::random_train(rng, 5, 64, 0.6);

    auto run = [&](bool parallel) {
        Engine engine({l}, {.parallel = parallel});
        return engine.run_inference(train);
    };
    InferenceResult r1 = run(false);
    InferenceResult r2 = run(false);
    REQUIRE(r1.trace.size() == r2.trace.size());
    for (size_t i = 0; i < r1.trace.size(); ++i) {
        CHECK(r1.trace[i].kind == r2.trace[i].kind);
        CHECK(r1.trace[i].w_row == r2.trace[i].w_row);
        CHECK(r1.trace[i].v_dst == r2.trace[i].v_dst);
    }
    // Parallel scheduling must not change the merged trace or outputs.
    InferenceResult r3 = run(true);
    REQUIRE(r3.trace.size() == r1.trace.size());
    for (size_t i = 0; i < r1.trace.size(); ++i) {
        CHECK(r3.trace[i].kind == r1.trace[i].kind);
    }
    for (int t = 0; t < 5; ++t) CHECK(r3.output.frames[t] == r1.output.frames[t]);
}

TEST_CASE("sparsity monotonicity: removing spikes never adds AccW2V events") {
    std::mt19937 rng(47);
    LayerSpec l = test::random_fc_layer(rng, 32, 12, NeuronModel::Kind::IF);
    SpikeTrain full = test::random_train(rng, 4, 32, 0.3);
    SpikeTrain sparse = full;
    for (auto& f : sparse.frames) {
        for (auto& s : f) {
            if (s && (rng() & 1)) s = 0;
        }
    }
    Engine a({l}, {.parallel = false});
    Engine b({l}, {.parallel = false});
    long long n_full = count_kind(a.run_inference(full).trace, InstrKind::AccW2V);
    long long n_sparse = count_kind(b.run_inference(sparse).trace, InstrKind::AccW2V);
    CHECK(n_sparse <= n_full);
}

TEST_CASE("compute_sparsity: boundary values and the 19/128 example") {
    RunStats stats;
    stats.widths = {128};
    stats.spike_counts = {{19}};
    SparsityTable table = compute_sparsity(stats);
    CHECK(table.overall == doctest::Approx(0.8516).epsilon(1e-3));

    stats.spike_counts = {{0}};
    CHECK(compute_sparsity(stats).overall == doctest::Approx(1.0));
    stats.spike_counts = {{128}};
    CHECK(compute_sparsity(stats).overall == doctest::Approx(0.0));
}

TEST_CASE("spike vector width mismatch is rejected") {
    Engine engine({small_fc()}, {.parallel = false});
    CHECK_THROWS_AS(engine.run_timestep(std::vector<std::uint8_t>(5, 0)),
                    ValidationError);
}

TEST_CASE("trace export formats") {
    std::vector<SpikeEvent> events{{0, 0, 3}, {1, 2, 7}};
    CHECK(spike_trace_tsv(events) == "0\t0\t3\n1\t2\t7\n");
    std::vector<VTraceEntry> vs{{0, 1, 2, -17}};
    CHECK(v_trace_csv(vs) == "t,layer,neuron,v_value\n0,1,2,-17\n");
}
