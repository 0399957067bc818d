#include "impulse/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace impulse {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ValidationError("missing field " + path + "." + key);
    }
    return *it;
}

int require_int(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number_integer()) {
        throw ValidationError(path + "." + key + " must be an integer");
    }
    return v.get<int>();
}

NeuronModel parse_neuron(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + " must be an object");
    NeuronModel n;
    std::string kind = require(j, "model", path).get<std::string>();
    if (kind == "if" || kind == "IF") n.kind = NeuronModel::Kind::IF;
    else if (kind == "lif" || kind == "LIF") n.kind = NeuronModel::Kind::LIF;
    else if (kind == "rmp" || kind == "RMP") n.kind = NeuronModel::Kind::RMP;
    else throw ValidationError(path + ".model must be one of if/lif/rmp");
    n.threshold = require_int(j, "threshold", path);
    if (j.contains("leak")) n.leak = require_int(j, "leak", path);
    if (j.contains("v_reset")) n.v_reset = require_int(j, "v_reset", path);
    try {
        n.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return n;
}

std::vector<std::vector<int>> parse_weights(const json& j, int n_out, int fan_in,
                                            const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != n_out) {
        throw ValidationError(path + " must be an array of " + std::to_string(n_out) +
                              " rows");
    }
    std::vector<std::vector<int>> w(n_out, std::vector<int>(fan_in));
    for (int o = 0; o < n_out; ++o) {
        const json& row = j[o];
        if (!row.is_array() || static_cast<int>(row.size()) != fan_in) {
            throw ValidationError(path + "[" + std::to_string(o) + "] must hold " +
                                  std::to_string(fan_in) + " weights");
        }
        for (int i = 0; i < fan_in; ++i) {
            if (!row[i].is_number_integer()) {
                throw ValidationError(path + "[" + std::to_string(o) + "][" +
                                      std::to_string(i) + "] must be an integer");
            }
            int v = row[i].get<int>();
            if (v < MacroGeometry::w_min || v > MacroGeometry::w_max) {
                throw ValidationError(path + "[" + std::to_string(o) + "][" +
                                      std::to_string(i) + "] = " + std::to_string(v) +
                                      " outside 6-bit signed range [-32, 31]");
            }
            w[o][i] = v;
        }
    }
    return w;
}

LayerSpec parse_layer(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path + " must be an object");
    LayerSpec layer;
    std::string kind = require(j, "kind", path).get<std::string>();
    if (kind == "fc" || kind == "FC") {
        layer.kind = LayerSpec::Kind::FC;
        layer.in_dim = require_int(j, "in_dim", path);
        layer.out_dim = require_int(j, "out_dim", path);
    } else if (kind == "conv" || kind == "Conv") {
        layer.kind = LayerSpec::Kind::Conv;
        layer.in_channels = require_int(j, "in_channels", path);
        layer.in_h = require_int(j, "in_h", path);
        layer.in_w = require_int(j, "in_w", path);
        layer.kernel_h = require_int(j, "kernel_h", path);
        layer.kernel_w = require_int(j, "kernel_w", path);
        layer.out_channels = require_int(j, "out_channels", path);
    } else {
        throw ValidationError(path + ".kind must be fc or conv");
    }
    layer.neuron = parse_neuron(require(j, "neuron", path), path + ".neuron");
    layer.weights = parse_weights(require(j, "weights", path), layer.n_outputs(),
                                  layer.fan_in(), path + ".weights");
    layer.validate();
    return layer;
}

EnergyTable parse_energy_table_json(const json& j, const std::string& path) {
    EnergyTable t = default_table();
    if (!j.is_object()) throw ValidationError(path + " must be an object");
    if (j.contains("clock_period_ns")) t.clock_period_ns = j["clock_period_ns"].get<double>();
    if (t.clock_period_ns <= 0) throw ValidationError(path + ".clock_period_ns must be > 0");
    if (j.contains("ops_per_acc_instruction")) {
        t.ops_per_acc_instruction = j["ops_per_acc_instruction"].get<int>();
    }
    if (j.contains("instructions")) {
        const json& instrs = j["instructions"];
        for (auto it = instrs.begin(); it != instrs.end(); ++it) {
            InstrKind kind;
            const std::string& name = it.key();
            if (name == "AccW2V") kind = InstrKind::AccW2V;
            else if (name == "AccV2V") kind = InstrKind::AccV2V;
            else if (name == "SpikeCheck") kind = InstrKind::SpikeCheck;
            else if (name == "ResetV") kind = InstrKind::ResetV;
            else if (name == "Read") kind = InstrKind::Read;
            else if (name == "Write") kind = InstrKind::Write;
            else throw ValidationError(path + ".instructions: unknown kind " + name);
            EnergyTable::Entry& e = t.at(kind);
            const json& spec = it.value();
            if (spec.contains("energy_pj")) e.energy_pj = spec["energy_pj"].get<double>();
            if (spec.contains("cycles")) e.cycles = spec["cycles"].get<int>();
            if (spec.contains("ops")) e.ops = spec["ops"].get<int>();
            if (e.energy_pj < 0 || e.cycles < 1) {
                throw ValidationError(path + ".instructions." + name + " values invalid");
            }
        }
    }
    return t;
}

}  // namespace

NetworkModel parse_model(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("model is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("model root must be an object");
    NetworkModel model;
    model.timesteps = require_int(j, "timesteps", "$");
    if (model.timesteps < 1) throw ValidationError("$.timesteps must be >= 1");
    if (j.contains("strict_mode")) model.strict_mode = j["strict_mode"].get<bool>();
    const json& layers = require(j, "layers", "$");
    if (!layers.is_array() || layers.empty()) {
        throw ValidationError("$.layers must be a non-empty array");
    }
    for (size_t l = 0; l < layers.size(); ++l) {
        model.layers.push_back(
            parse_layer(layers[l], "$.layers[" + std::to_string(l) + "]"));
    }
    if (j.contains("energy_table")) {
        model.energy_override = parse_energy_table_json(j["energy_table"], "$.energy_table");
    }
    return model;
}

EnergyTable parse_energy_table(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("energy table is not valid JSON: ") + e.what());
    }
    return parse_energy_table_json(j, "$");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("write to " + path + " failed");
}

NetworkModel load_model(const std::string& path) { return parse_model(read_file(path)); }
EnergyTable load_energy_table(const std::string& path) {
    return parse_energy_table(read_file(path));
}

SpikeTrain parse_spike_train(const std::string& text, int timesteps, int width) {
    SpikeTrain train;
    train.timesteps = timesteps;
    train.frames.assign(timesteps, std::vector<std::uint8_t>(width, 0));
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int t, layer, neuron;
        if (!(ls >> t >> layer >> neuron)) {
            throw ValidationError("spike train line " + std::to_string(lineno) +
                                  " is not 't layer neuron'");
        }
        if (layer != 0) {
            throw ValidationError("spike train line " + std::to_string(lineno) +
                                  ": input events must address layer 0");
        }
        if (t < 0 || t >= timesteps) {
            throw ValidationError("spike train line " + std::to_string(lineno) +
                                  ": timestep " + std::to_string(t) +
                                  " outside [0, " + std::to_string(timesteps) + ")");
        }
        if (neuron < 0 || neuron >= width) {
            throw ValidationError("spike train line " + std::to_string(lineno) +
                                  ": neuron " + std::to_string(neuron) +
                                  " outside input width " + std::to_string(width));
        }
        train.frames[t][neuron] = 1;
    }
    return train;
}

SpikeTrain load_spike_train(const std::string& path, int timesteps, int width) {
    return parse_spike_train(read_file(path), timesteps, width);
}

std::string spike_train_tsv(const SpikeTrain& train) {
    std::ostringstream os;
    for (int t = 0; t < train.timesteps; ++t) {
        const auto& frame = train.frames[t];
        for (size_t n = 0; n < frame.size(); ++n) {
            if (frame[n]) os << t << "\t0\t" << n << '\n';
        }
    }
    return os.str();
}

}  // namespace impulse
