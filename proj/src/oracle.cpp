#include "impulse/oracle.hpp"

namespace impulse {
namespace oracle {

RefNetwork::RefNetwork(const std::vector<LayerSpec>& specs) {
    for (const LayerSpec& s : specs) {
        s.validate();
        layers.push_back({s, std::vector<int>(s.output_size(), 0)});
    }
}

void RefNetwork::reset() {
    for (RefLayer& l : layers) l.v.assign(l.v.size(), 0);
}

namespace {

inline std::uint8_t spike_and_update(int& v, const NeuronModel& n) {
    if (n.kind == NeuronModel::Kind::LIF) v = wrap_v(static_cast<long long>(v) - n.leak);
    // Same mod-2^11 comparator as the macro: spike iff the wrapped
    // difference is non-negative.
    bool spike = wrap_v(static_cast<long long>(v) - n.threshold) >= 0;
    if (spike) {
        v = n.kind == NeuronModel::Kind::RMP
                ? wrap_v(static_cast<long long>(v) - n.threshold)
                : n.v_reset;
    }
    return spike;
}

}  // namespace

std::vector<std::uint8_t> ref_step(RefLayer& layer,
                                   const std::vector<std::uint8_t>& input) {
    const LayerSpec& s = layer.spec;
    if (static_cast<int>(input.size()) != s.input_size()) {
        throw ValidationError("oracle input width mismatch");
    }
    std::vector<std::uint8_t> out(s.output_size(), 0);
    if (s.kind == LayerSpec::Kind::FC) {
        for (int o = 0; o < s.out_dim; ++o) {
            long long acc = layer.v[o];
            for (int i = 0; i < s.in_dim; ++i) {
                if (input[i]) acc += s.weights[o][i];
            }
            int v = wrap_v(acc);
            out[o] = spike_and_update(v, s.neuron);
            layer.v[o] = v;
        }
    } else {
        const int oh = s.out_h(), ow = s.out_w();
        for (int oc = 0; oc < s.out_channels; ++oc) {
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    int idx = (oc * oh + oy) * ow + ox;
                    long long acc = layer.v[idx];
                    for (int kr = 0; kr < s.kernel_h; ++kr) {
                        for (int kc = 0; kc < s.kernel_w; ++kc) {
                            for (int ch = 0; ch < s.in_channels; ++ch) {
                                int in_idx =
                                    (ch * s.in_h + oy + kr) * s.in_w + ox + kc;
                                if (input[in_idx]) {
                                    acc += s.weights[oc][(kr * s.kernel_w + kc) *
                                                             s.in_channels +
                                                         ch];
                                }
                            }
                        }
                    }
                    int v = wrap_v(acc);
                    out[idx] = spike_and_update(v, s.neuron);
                    layer.v[idx] = v;
                }
            }
        }
    }
    return out;
}

RefResult run(RefNetwork& network, const SpikeTrain& input, bool record_vmem) {
    RefResult res;
    res.output.timesteps = input.timesteps;
    for (int t = 0; t < input.timesteps; ++t) {
        std::vector<std::uint8_t> spikes = input.frames.at(t);
        for (size_t l = 0; l < network.layers.size(); ++l) {
            spikes = ref_step(network.layers[l], spikes);
            if (record_vmem) {
                const auto& v = network.layers[l].v;
                for (size_t n = 0; n < v.size(); ++n) {
                    res.v_trace.push_back(
                        {t, static_cast<int>(l) + 1, static_cast<int>(n), v[n]});
                }
            }
        }
        res.output.frames.push_back(std::move(spikes));
    }
    for (const RefLayer& l : network.layers) res.final_v.push_back(l.v);
    return res;
}

std::optional<Divergence> compare(const SpikeTrain& sim_out,
                                  const std::vector<std::vector<int>>& sim_final_v,
                                  const RefResult& ref) {
    if (sim_out.timesteps != ref.output.timesteps ||
        sim_out.frames.size() != ref.output.frames.size()) {
        throw ValidationError("compare: timestep count mismatch");
    }
    for (int t = 0; t < sim_out.timesteps; ++t) {
        const auto& a = sim_out.frames[t];
        const auto& b = ref.output.frames[t];
        if (a.size() != b.size()) throw ValidationError("compare: output width mismatch");
        for (size_t n = 0; n < a.size(); ++n) {
            if ((a[n] != 0) != (b[n] != 0)) {
                return Divergence{t, static_cast<int>(ref.final_v.size()),
                                  static_cast<int>(n), "output spike differs"};
            }
        }
    }
    if (sim_final_v.size() != ref.final_v.size()) {
        throw ValidationError("compare: layer count mismatch");
    }
    for (size_t l = 0; l < ref.final_v.size(); ++l) {
        if (sim_final_v[l].size() != ref.final_v[l].size()) {
            throw ValidationError("compare: V width mismatch");
        }
        for (size_t n = 0; n < ref.final_v[l].size(); ++n) {
            if (sim_final_v[l][n] != ref.final_v[l][n]) {
                return Divergence{-1, static_cast<int>(l) + 1, static_cast<int>(n),
                                  "final membrane potential differs"};
            }
        }
    }
    return std::nullopt;
}

}  // namespace oracle
}  // namespace impulse
