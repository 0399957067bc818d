#ifndef IMPULSE_ORACLE_HPP_
#define IMPULSE_ORACLE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "impulse/runtime.hpp"

namespace impulse {
// Pure-integer reference implementation of quantized SNN inference.
// No array or bitline modeling; the simulator's ground truth.
namespace oracle {

struct RefLayer {
    LayerSpec spec;
    std::vector<int> v;  // per output neuron, 11-bit two's complement
};

struct RefNetwork {
    std::vector<RefLayer> layers;

    explicit RefNetwork(const std::vector<LayerSpec>& specs);
    void reset();
};

std::vector<std::uint8_t> ref_step(RefLayer& layer,
                                   const std::vector<std::uint8_t>& input);

struct RefResult {
    SpikeTrain output;
    std::vector<std::vector<int>> final_v;  // per layer
    std::vector<VTraceEntry> v_trace;
};

RefResult run(RefNetwork& network, const SpikeTrain& input, bool record_vmem = false);

struct Divergence {
    int t = -1;  // -1 flags a final-V mismatch checked after the run
    int layer;
    int neuron;
    std::string what;
};

// Bitwise comparison of spike outputs and final membrane potentials.
std::optional<Divergence> compare(const SpikeTrain& sim_out,
                                  const std::vector<std::vector<int>>& sim_final_v,
                                  const RefResult& ref);

}  // namespace oracle
}  // namespace impulse

#endif  // IMPULSE_ORACLE_HPP_
