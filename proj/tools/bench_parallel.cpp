// Compares serial vs parallel engine execution on a wide synthetic
// network.  The parallel path distributes independent macros across
// OpenMP threads; outputs must match bit for bit.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "impulse/oracle.hpp"
#include "impulse/runtime.hpp"

#ifdef IMPULSE_HAVE_OPENMP
#include <omp.h>
#endif

using namespace impulse;
using Clock = std::chrono::steady_clock;

namespace {

std::vector<LayerSpec> make_network(std::mt19937& rng) {
    std::uniform_int_distribution<int> wd(-32, 31);
    auto fc = [&](int in, int out, int theta) {
        LayerSpec l;
        l.kind = LayerSpec::Kind::FC;
        l.in_dim = in;
        l.out_dim = out;
        l.neuron = {NeuronModel::Kind::LIF, theta, 1};
        l.weights.assign(out, std::vector<int>(in));
        for (auto& row : l.weights) {
            for (int& w : row) w = wd(rng);
        }
        return l;
    };
    // 32 macros in the first layer, 11 in the second.
    return {fc(128, 384, 96), fc(384, 128, 64)};
}

SpikeTrain make_train(std::mt19937& rng, int timesteps, int width) {
    std::bernoulli_distribution spike(0.4);
    SpikeTrain train;
    train.timesteps = timesteps;
    train.frames.assign(timesteps, std::vector<std::uint8_t>(width, 0));
    for (auto& f : train.frames) {
        for (auto& s : f) s = spike(rng) ? 1 : 0;
    }
    return train;
}

double run_once(const std::vector<LayerSpec>& layers, const SpikeTrain& train,
                bool parallel, InferenceResult& out) {
    Engine engine(layers, {.strict = false, .parallel = parallel});
    auto start = Clock::now();
    out = engine.run_inference(train);
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main() {
    std::mt19937 rng(2024);
    std::vector<LayerSpec> layers = make_network(rng);
    SpikeTrain train = make_train(rng, 20, 128);

    InferenceResult serial, parallel;
    // Warm-up to fault in pages before timing.
    run_once(layers, train, false, serial);

    const int reps = 3;
    double t_serial = 1e9, t_parallel = 1e9;
    for (int r = 0; r < reps; ++r) {
        t_serial = std::min(t_serial, run_once(layers, train, false, serial));
        t_parallel = std::min(t_parallel, run_once(layers, train, true, parallel));
    }

    bool identical = serial.output.frames == parallel.output.frames &&
                     serial.trace.size() == parallel.trace.size();
    for (size_t i = 0; identical && i < serial.trace.size(); ++i) {
        identical = serial.trace[i].kind == parallel.trace[i].kind &&
                    serial.trace[i].w_row == parallel.trace[i].w_row &&
                    serial.trace[i].v_dst == parallel.trace[i].v_dst;
    }

    std::printf("network:   128 -> 384 -> 128 LIF, T=20 (43 macros)\n");
#ifdef IMPULSE_HAVE_OPENMP
    std::printf("threads:   %d\n", omp_get_max_threads());
#else
    std::printf("threads:   1 (built without OpenMP)\n");
#endif
    std::printf("trace:     %zu instructions\n", serial.trace.size());
    std::printf("serial:    %.1f ms\n", t_serial * 1e3);
    std::printf("parallel:  %.1f ms\n", t_parallel * 1e3);
    std::printf("speedup:   %.2fx\n", t_serial / t_parallel);
    std::printf("outputs:   %s\n", identical ? "bit-identical" : "MISMATCH");
    return identical ? 0 : 1;
}
