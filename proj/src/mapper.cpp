#include "impulse/mapper.hpp"

#include <algorithm>
#include <sstream>

namespace impulse {

namespace {
constexpr int kMaxContexts = 13;  // (32 - 6 reserved) / 2
constexpr int kMaxFanIn = MacroGeometry::w_rows;
constexpr int kGroups = MacroGeometry::weights_per_row;

int ceil_div(int a, int b) { return (a + b - 1) / b; }
}  // namespace

void LayerSpec::validate() const {
    neuron.validate();
    if (kind == Kind::FC) {
        if (in_dim < 1 || out_dim < 1) throw ValidationError("FC layer needs in_dim and out_dim >= 1");
    } else {
        if (in_channels < 1 || out_channels < 1) {
            throw ValidationError("Conv layer needs in_channels and out_channels >= 1");
        }
        if (kernel_h < 1 || kernel_w < 1 || in_h < kernel_h || in_w < kernel_w) {
            throw ValidationError("Conv kernel does not fit the input plane");
        }
    }
    if (static_cast<int>(weights.size()) != n_outputs()) {
        throw ValidationError("weight matrix has " + std::to_string(weights.size()) +
                              " rows, expected " + std::to_string(n_outputs()));
    }
    for (size_t o = 0; o < weights.size(); ++o) {
        if (static_cast<int>(weights[o].size()) != fan_in()) {
            throw ValidationError("weights[" + std::to_string(o) + "] has " +
                                  std::to_string(weights[o].size()) +
                                  " entries, expected fan-in " + std::to_string(fan_in()));
        }
        for (size_t i = 0; i < weights[o].size(); ++i) {
            int w = weights[o][i];
            if (w < MacroGeometry::w_min || w > MacroGeometry::w_max) {
                throw ValidationError("weights[" + std::to_string(o) + "][" +
                                      std::to_string(i) + "] = " + std::to_string(w) +
                                      " outside 6-bit signed range");
            }
        }
    }
}

WImage pack_w_image(const std::vector<std::vector<int>>& weights) {
    int fan_in = static_cast<int>(weights.size());
    if (fan_in > kMaxFanIn) {
        throw CapacityError("fan-in " + std::to_string(fan_in) + " exceeds 128 rows");
    }
    WImage image{};
    for (int r = 0; r < fan_in; ++r) {
        int n_out = static_cast<int>(weights[r].size());
        if (n_out > kGroups) {
            throw CapacityError("row " + std::to_string(r) + " holds " +
                                std::to_string(n_out) + " weights, max 12");
        }
        for (int g = 0; g < n_out; ++g) {
            int w = weights[r][g];
            if (w < MacroGeometry::w_min || w > MacroGeometry::w_max) {
                throw ValidationError("weight [" + std::to_string(r) + "][" +
                                      std::to_string(g) + "] = " + std::to_string(w) +
                                      " outside 6-bit signed range");
            }
            std::uint8_t enc = encode_w(w);
            for (int b = 0; b < MacroGeometry::weight_bits; ++b) {
                image[r][6 * g + b] = (enc >> b) & 1;
            }
        }
    }
    return image;
}

std::vector<std::vector<int>> unpack_w_image(const WImage& image, int fan_in, int n_out) {
    std::vector<std::vector<int>> out(fan_in, std::vector<int>(n_out));
    for (int r = 0; r < fan_in; ++r) {
        for (int g = 0; g < n_out; ++g) {
            std::uint8_t enc = 0;
            for (int b = 0; b < MacroGeometry::weight_bits; ++b) {
                enc |= static_cast<std::uint8_t>(image[r][6 * g + b]) << b;
            }
            out[r][g] = decode_w(enc);
        }
    }
    return out;
}

VAllocation allocate_vmem(int n_contexts) {
    if (n_contexts < 1) throw ValidationError("need at least one V context");
    if (n_contexts > kMaxContexts) {
        throw CapacityError("requested " + std::to_string(n_contexts) +
                            " V contexts, macro holds 13; use " +
                            std::to_string(ceil_div(n_contexts, kMaxContexts)) +
                            " macros");
    }
    VAllocation alloc;
    for (int c = 0; c < n_contexts; ++c) {
        alloc.contexts.emplace_back(6 + 2 * c, 7 + 2 * c);
    }
    return alloc;
}

namespace {

// Shared by FC and Conv: one output tile of <=12 neurons, full fan-in.
MacroAllocation make_allocation(const LayerSpec& layer, int macro_id, int in_lo,
                                int in_hi, int out_lo, int out_hi, int n_contexts) {
    MacroAllocation a;
    a.macro_id = macro_id;
    a.input_offset = in_lo;
    a.n_inputs = in_hi - in_lo;

    std::vector<std::vector<int>> slice(a.n_inputs,
                                        std::vector<int>(out_hi - out_lo));
    for (int i = 0; i < a.n_inputs; ++i) {
        for (int o = out_lo; o < out_hi; ++o) {
            slice[i][o - out_lo] = layer.weights[o][in_lo + i];
        }
    }
    a.w_image = pack_w_image(slice);

    a.input_map.resize(a.n_inputs);
    for (int i = 0; i < a.n_inputs; ++i) a.input_map[i] = i;

    a.output_map.assign(kGroups, -1);
    for (int o = out_lo; o < out_hi; ++o) a.output_map[o - out_lo] = o;

    VAllocation v = allocate_vmem(n_contexts);
    a.v_contexts = std::move(v.contexts);
    a.reserved = v.reserved;
    return a;
}

}  // namespace

std::vector<MacroAllocation> map_fc(const LayerSpec& layer) {
    if (layer.kind != LayerSpec::Kind::FC) throw ValidationError("map_fc on non-FC layer");
    const int in_tiles = ceil_div(layer.in_dim, kMaxFanIn);
    const int out_tiles = ceil_div(layer.out_dim, kGroups);
    std::vector<MacroAllocation> allocs;
    int macro_id = 0;
    for (int ot = 0; ot < out_tiles; ++ot) {
        int out_lo = ot * kGroups;
        int out_hi = std::min(layer.out_dim, out_lo + kGroups);
        for (int it = 0; it < in_tiles; ++it) {
            int in_lo = it * kMaxFanIn;
            int in_hi = std::min(layer.in_dim, in_lo + kMaxFanIn);
            MacroAllocation a =
                make_allocation(layer, macro_id++, in_lo, in_hi, out_lo, out_hi, 1);
            if (in_tiles > 1) {
                a.partial_group = ot;
                a.is_owner = it == 0;
            }
            allocs.push_back(std::move(a));
        }
    }
    return allocs;
}

MappedLayerPlan map_conv(const LayerSpec& layer) {
    if (layer.kind != LayerSpec::Kind::Conv) throw ValidationError("map_conv on non-Conv layer");
    const int fan_in = layer.fan_in();
    if (fan_in > kMaxFanIn) {
        throw CapacityError("Conv fan-in " + std::to_string(fan_in) +
                            " exceeds 128; restrict kernel/channels instead of tiling");
    }
    MappedLayerPlan plan;
    plan.spec = layer;
    plan.rows_used = fan_in;

    const int positions = layer.out_h() * layer.out_w();
    const int contexts_per_macro = std::min(positions, kMaxContexts);
    const int out_tiles = ceil_div(layer.out_channels, kGroups);
    for (int ot = 0; ot < out_tiles; ++ot) {
        int out_lo = ot * kGroups;
        int out_hi = std::min(layer.out_channels, out_lo + kGroups);
        plan.allocations.push_back(make_allocation(layer, ot, 0, fan_in, out_lo,
                                                   out_hi, contexts_per_macro));
    }

    // Raster-scan positions, 13 contexts at a time.
    int pos = 0;
    while (pos < positions) {
        PixelBatch batch;
        for (int c = 0; c < kMaxContexts && pos < positions; ++c, ++pos) {
            batch.entries.push_back({c, pos / layer.out_w(), pos % layer.out_w()});
        }
        plan.schedule.batches.push_back(std::move(batch));
    }
    return plan;
}

MappedLayerPlan map_layer(const LayerSpec& layer) {
    layer.validate();
    if (layer.kind == LayerSpec::Kind::Conv) return map_conv(layer);
    MappedLayerPlan plan;
    plan.spec = layer;
    plan.allocations = map_fc(layer);
    plan.rows_used = std::min(layer.in_dim, kMaxFanIn);
    return plan;
}

std::string mapping_report(const std::vector<MappedLayerPlan>& plans) {
    std::ostringstream os;
    int total_macros = 0;
    for (size_t l = 0; l < plans.size(); ++l) {
        const MappedLayerPlan& p = plans[l];
        const LayerSpec& s = p.spec;
        os << "layer " << l + 1 << ": ";
        if (s.kind == LayerSpec::Kind::FC) {
            os << "FC " << s.in_dim << "->" << s.out_dim;
        } else {
            os << "Conv " << s.in_channels << "ch " << s.kernel_h << "x" << s.kernel_w
               << " -> " << s.out_channels << "ch " << s.out_h() << "x" << s.out_w();
        }
        os << " (" << to_string(s.neuron.kind) << ")\n";
        os << "  macros: " << p.allocations.size() << "\n";
        os << "  rows used: " << p.rows_used << "/" << MacroGeometry::w_rows << "\n";
        const MacroAllocation& last = p.allocations.back();
        int groups_used = 0;
        for (int g : last.output_map) groups_used += g >= 0;
        os << "  last macro uses " << groups_used << "/12 groups\n";
        if (s.kind == LayerSpec::Kind::Conv) {
            os << "  context batches: " << p.schedule.batches.size() << " (";
            for (size_t b = 0; b < p.schedule.batches.size(); ++b) {
                os << (b ? "+" : "") << p.schedule.batches[b].entries.size();
            }
            os << " positions)\n";
        }
        if (!p.allocations.empty() && p.allocations.front().partial_group >= 0) {
            os << "  input-tiled: host partial-sum merge across "
               << p.allocations.size() / ((s.out_dim + 11) / 12) << " macros per output tile\n";
        }
        total_macros += static_cast<int>(p.allocations.size());
    }
    os << "total macros: " << total_macros << "\n";
    return os.str();
}

}  // namespace impulse
