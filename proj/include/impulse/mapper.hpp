#ifndef IMPULSE_MAPPER_HPP_
#define IMPULSE_MAPPER_HPP_

#include <array>
#include <bitset>
#include <string>
#include <utility>
#include <vector>

#include "impulse/isa.hpp"

namespace impulse {

struct LayerSpec {
    enum class Kind : std::uint8_t { FC, Conv };
    Kind kind = Kind::FC;

    // FC
    int in_dim = 0;
    int out_dim = 0;

    // Conv (stride 1, no padding)
    int in_channels = 0, in_h = 0, in_w = 0;
    int kernel_h = 0, kernel_w = 0;
    int out_channels = 0;

    NeuronModel neuron;

    // Row-major [output][fan-in input].  Conv fan-in is ordered
    // (kernel row, kernel col, channel).
    std::vector<std::vector<int>> weights;

    int out_h() const { return in_h - kernel_h + 1; }
    int out_w() const { return in_w - kernel_w + 1; }
    int fan_in() const {
        return kind == Kind::FC ? in_dim : kernel_h * kernel_w * in_channels;
    }
    int n_outputs() const { return kind == Kind::FC ? out_dim : out_channels; }
    int input_size() const {
        return kind == Kind::FC ? in_dim : in_channels * in_h * in_w;
    }
    int output_size() const {
        return kind == Kind::FC ? out_dim : out_channels * out_h() * out_w();
    }
    void validate() const;
};

using WImage = std::array<std::bitset<MacroGeometry::w_cols>, MacroGeometry::w_rows>;

// One compiled placement of a layer tile on one macro.
struct MacroAllocation {
    int macro_id = 0;
    WImage w_image{};
    std::vector<int> input_map;   // local input index -> w_row
    std::vector<int> output_map;  // weight group -> global output index, -1 unused
    std::vector<std::pair<int, int>> v_contexts;  // (odd row, even row)
    ReservedRows reserved;

    int input_offset = 0;  // first global (flattened) input this macro consumes
    int n_inputs = 0;

    // FC input tiling: macros with the same partial group feed one
    // owner via host-mediated partial-sum merge.
    int partial_group = -1;
    bool is_owner = true;
};

// Which output coordinate each V context holds in each batch of a
// time-multiplexed Conv layer.
struct PixelBatch {
    struct Entry {
        int context;  // index into v_contexts
        int out_y, out_x;
    };
    std::vector<Entry> entries;
};
struct ConvSchedule {
    std::vector<PixelBatch> batches;
};

struct VAllocation {
    std::vector<std::pair<int, int>> contexts;
    ReservedRows reserved;
};

struct MappedLayerPlan {
    LayerSpec spec;
    std::vector<MacroAllocation> allocations;
    ConvSchedule schedule;  // empty for FC
    int rows_used = 0;      // weight rows occupied per macro
};

// weights indexed [input][output], fan_in x n_out.
WImage pack_w_image(const std::vector<std::vector<int>>& weights);
std::vector<std::vector<int>> unpack_w_image(const WImage& image, int fan_in, int n_out);

VAllocation allocate_vmem(int n_contexts);

std::vector<MacroAllocation> map_fc(const LayerSpec& layer);
MappedLayerPlan map_conv(const LayerSpec& layer);
MappedLayerPlan map_layer(const LayerSpec& layer);

std::string mapping_report(const std::vector<MappedLayerPlan>& plans);

}  // namespace impulse

#endif  // IMPULSE_MAPPER_HPP_
