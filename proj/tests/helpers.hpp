#ifndef IMPULSE_TESTS_HELPERS_HPP_
#define IMPULSE_TESTS_HELPERS_HPP_

#include <array>
#include <random>
#include <vector>

#include "impulse/isa.hpp"
#include "impulse/mapper.hpp"
#include "impulse/runtime.hpp"

namespace impulse::test {

// A macro with rows 6/7 registered as an odd/even context pair and the
// conventional reserved rows, matching what the loader produces.
inline MacroState make_state() {
    MacroState st;
    ReservedRows rr;
    st.v_row_parity[rr.thr_odd] = Parity::Odd;
    st.v_row_parity[rr.thr_even] = Parity::Even;
    st.v_row_parity[rr.leak_odd] = Parity::Odd;
    st.v_row_parity[rr.leak_even] = Parity::Even;
    st.v_row_parity[rr.reset_odd] = Parity::Odd;
    st.v_row_parity[rr.reset_even] = Parity::Even;
    for (int r = 6; r < 32; ++r) {
        st.v_row_parity[r] = r % 2 == 0 ? Parity::Odd : Parity::Even;
    }
    return st;
}

inline void set_slots(MacroState& st, int row, Parity p, const std::array<int, 6>& v) {
    for (int j = 0; j < 6; ++j) write_slot(st, row, SlotLayout{p, j}, v[j]);
}

inline std::array<int, 6> get_slots(const MacroState& st, int row, Parity p) {
    std::array<int, 6> v;
    for (int j = 0; j < 6; ++j) v[j] = read_slot(st, row, SlotLayout{p, j});
    return v;
}

// Weights for the six slots of one parity: slot j accumulates from
// weight group 2j (odd) or 2j+1 (even).
inline void set_parity_weights(MacroState& st, int w_row, Parity p,
                               const std::array<int, 6>& w) {
    for (int j = 0; j < 6; ++j) {
        write_weight(st, w_row, SlotLayout{p, j}.weight_group(), w[j]);
    }
}

inline LayerSpec random_fc_layer(std::mt19937& rng, int in_dim, int out_dim,
                                 NeuronModel::Kind kind) {
    std::uniform_int_distribution<int> wd(-32, 31);
    std::uniform_int_distribution<int> td(1, 128);
    std::uniform_int_distribution<int> ld(0, 8);
    LayerSpec layer;
    layer.kind = LayerSpec::Kind::FC;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.neuron.kind = kind;
    layer.neuron.threshold = td(rng);
    layer.neuron.leak = kind == NeuronModel::Kind::LIF ? ld(rng) : 0;
    layer.weights.assign(out_dim, std::vector<int>(in_dim));
    for (auto& row : layer.weights) {
        for (int& w : row) w = wd(rng);
    }
    return layer;
}

inline SpikeTrain random_train(std::mt19937& rng, int timesteps, int width,
                               double sparsity) {
    std::bernoulli_distribution spike(1.0 - sparsity);
    SpikeTrain train;
    train.timesteps = timesteps;
    train.frames.assign(timesteps, std::vector<std::uint8_t>(width, 0));
    for (auto& frame : train.frames) {
        for (auto& s : frame) s = spike(rng) ? 1 : 0;
    }
    return train;
}

}  // namespace impulse::test

#endif  // IMPULSE_TESTS_HELPERS_HPP_
