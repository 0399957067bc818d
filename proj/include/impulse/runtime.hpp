#ifndef IMPULSE_RUNTIME_HPP_
#define IMPULSE_RUNTIME_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "impulse/mapper.hpp"

namespace impulse {

// Spikes over time for one layer boundary; frames[t] is a 0/1 vector
// as wide as the layer.
struct SpikeTrain {
    int timesteps = 0;
    std::vector<std::vector<std::uint8_t>> frames;
};

struct SpikeEvent {
    int t, layer, neuron;
};
struct VTraceEntry {
    int t, layer, neuron, value;
};

struct RunStats {
    std::vector<int> widths;  // index 0 = input layer
    std::vector<std::vector<long long>> spike_counts;  // [layer][t]
    std::array<long long, 6> instr_counts{};           // by InstrKind
    long long overflow_events = 0;
};

struct SparsityTable {
    struct Row {
        int layer, t;
        double sparsity;
    };
    std::vector<Row> rows;
    double overall = 0.0;  // spike-weighted over all layers and timesteps
};

SparsityTable compute_sparsity(const RunStats& stats);

struct RunOptions {
    bool strict = false;
    bool parallel = true;   // advance independent macros on OpenMP threads
    bool record_vmem = false;
};

struct InferenceResult {
    SpikeTrain output;
    std::vector<SpikeEvent> spike_trace;  // all layers, input = layer 0
    std::vector<VTraceEntry> v_trace;
    RunStats stats;
    Trace trace;
};

// Event-driven inference engine over mapped layers.  Spiking inputs
// issue AccW2V pairs; silent inputs issue nothing; neuron updates run
// at timestep boundaries.
class Engine {
  public:
    explicit Engine(std::vector<LayerSpec> layers, RunOptions opts = {});
    ~Engine();
    Engine(Engine&&) noexcept;
    Engine& operator=(Engine&&) noexcept;

    int input_width() const;
    int output_width() const;
    const std::vector<MappedLayerPlan>& plans() const { return plans_; }

    // Advances every layer by one timestep; returns the last layer's
    // output spikes.
    std::vector<std::uint8_t> run_timestep(const std::vector<std::uint8_t>& input);

    InferenceResult run_inference(const SpikeTrain& input);

    // Membrane potentials of one layer's outputs, in output order.
    std::vector<int> read_potentials(int layer) const;

    void reset();

  private:
    struct MacroInstance;
    struct LayerRuntime;

    std::vector<std::uint8_t> step_layer(LayerRuntime& lr,
                                         const std::vector<std::uint8_t>& in);
    std::vector<std::uint8_t> step_fc(LayerRuntime& lr,
                                      const std::vector<std::uint8_t>& in);
    std::vector<std::uint8_t> step_conv(LayerRuntime& lr,
                                        const std::vector<std::uint8_t>& in);
    void init_macro(MacroInstance& m, const MacroAllocation& a, const LayerSpec& spec);

    RunOptions opts_;
    std::vector<MappedLayerPlan> plans_;
    std::vector<std::unique_ptr<LayerRuntime>> layers_;
};

std::string spike_trace_tsv(const std::vector<SpikeEvent>& events);
std::string v_trace_csv(const std::vector<VTraceEntry>& entries);

}  // namespace impulse

#endif  // IMPULSE_RUNTIME_HPP_
