#ifndef IMPULSE_MODEL_IO_HPP_
#define IMPULSE_MODEL_IO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "impulse/energy.hpp"
#include "impulse/runtime.hpp"

namespace impulse {

// Parsed network model file (JSON).  See README for the schema.
struct NetworkModel {
    int timesteps = 1;
    bool strict_mode = false;
    std::optional<EnergyTable> energy_override;
    std::vector<LayerSpec> layers;
};

NetworkModel parse_model(const std::string& json_text);
NetworkModel load_model(const std::string& path);

EnergyTable parse_energy_table(const std::string& json_text);
EnergyTable load_energy_table(const std::string& path);

// Spike trains travel as one event per line: t <tab> layer <tab> neuron.
// Input events must address layer 0, which is also what the output
// writer emits so runs can be chained.
SpikeTrain parse_spike_train(const std::string& text, int timesteps, int width);
SpikeTrain load_spike_train(const std::string& path, int timesteps, int width);
std::string spike_train_tsv(const SpikeTrain& train);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace impulse

#endif  // IMPULSE_MODEL_IO_HPP_
