#include "impulse/isa.hpp"

namespace impulse {

const char* to_string(InstrKind k) {
    switch (k) {
        case InstrKind::AccW2V: return "AccW2V";
        case InstrKind::AccV2V: return "AccV2V";
        case InstrKind::SpikeCheck: return "SpikeCheck";
        case InstrKind::ResetV: return "ResetV";
        case InstrKind::Read: return "Read";
        case InstrKind::Write: return "Write";
    }
    return "?";
}

const char* to_string(NeuronModel::Kind k) {
    switch (k) {
        case NeuronModel::Kind::IF: return "IF";
        case NeuronModel::Kind::LIF: return "LIF";
        case NeuronModel::Kind::RMP: return "RMP";
    }
    return "?";
}

void NeuronModel::validate() const {
    if (threshold < 1 || threshold > MacroGeometry::v_max) {
        throw ValidationError("neuron threshold must be in [1, 1023], got " +
                              std::to_string(threshold));
    }
    if (leak < 0) {
        throw ValidationError("neuron leak must be >= 0, got " + std::to_string(leak));
    }
    if (v_reset < MacroGeometry::v_min || v_reset > MacroGeometry::v_max) {
        throw ValidationError("v_reset out of 11-bit range: " + std::to_string(v_reset));
    }
}

Instruction Instruction::acc_w2v(int w_row, Parity p, int v_src, int v_dst) {
    Instruction i{InstrKind::AccW2V, p};
    i.w_row = w_row;
    i.v_src = v_src;
    i.v_dst = v_dst;
    return i;
}
Instruction Instruction::acc_v2v(int v_src, int v_src2, int v_dst, Parity p,
                                 bool conditional) {
    Instruction i{InstrKind::AccV2V, p};
    i.v_src = v_src;
    i.v_src2 = v_src2;
    i.v_dst = v_dst;
    i.conditional = conditional;
    return i;
}
Instruction Instruction::spike_check(int v_src, int threshold_row, Parity p) {
    Instruction i{InstrKind::SpikeCheck, p};
    i.v_src = v_src;
    i.v_src2 = threshold_row;
    return i;
}
Instruction Instruction::reset_v(int reset_row, int v_dst, Parity p) {
    Instruction i{InstrKind::ResetV, p};
    i.v_src = reset_row;
    i.v_dst = v_dst;
    return i;
}

namespace {

void check_v_row(int row, const char* what) {
    if (row < 0 || row >= MacroGeometry::v_rows) {
        throw ValidationError(std::string(what) + " row out of range: " +
                              std::to_string(row));
    }
}

void check_parity(const MacroState& state, int row, Parity p) {
    if (row >= 0 && row < MacroGeometry::v_rows && state.v_row_parity[row] &&
        *state.v_row_parity[row] != p) {
        throw MappingError("V row " + std::to_string(row) +
                           " alignment does not match instruction parity");
    }
}

}  // namespace

void validate(const Instruction& instr) {
    switch (instr.kind) {
        case InstrKind::AccW2V:
            if (!instr.w_row) throw ValidationError("AccW2V requires w_row");
            if (*instr.w_row < 0 || *instr.w_row >= MacroGeometry::w_rows) {
                throw ValidationError("w_row out of range: " + std::to_string(*instr.w_row));
            }
            check_v_row(instr.v_src, "v_src");
            if (!instr.v_dst) throw ValidationError("AccW2V requires v_dst");
            check_v_row(*instr.v_dst, "v_dst");
            break;
        case InstrKind::AccV2V:
            check_v_row(instr.v_src, "v_src");
            if (!instr.v_src2) throw ValidationError("AccV2V requires v_src2");
            check_v_row(*instr.v_src2, "v_src2");
            if (!instr.v_dst) throw ValidationError("AccV2V requires v_dst");
            check_v_row(*instr.v_dst, "v_dst");
            break;
        case InstrKind::SpikeCheck:
            check_v_row(instr.v_src, "v_src");
            if (!instr.v_src2) throw ValidationError("SpikeCheck requires v_src2");
            check_v_row(*instr.v_src2, "v_src2");
            if (instr.v_dst) throw ValidationError("SpikeCheck takes no v_dst");
            break;
        case InstrKind::ResetV:
            check_v_row(instr.v_src, "v_src");
            if (!instr.v_dst) throw ValidationError("ResetV requires v_dst");
            check_v_row(*instr.v_dst, "v_dst");
            break;
        case InstrKind::Read:
            check_v_row(instr.v_src, "v_src");
            break;
        case InstrKind::Write:
            if (!instr.v_dst) throw ValidationError("Write requires v_dst");
            check_v_row(*instr.v_dst, "v_dst");
            break;
    }
}

std::array<bool, 6> Executor::parity_mask(Parity p) const {
    std::array<bool, 6> m{};
    for (int j = 0; j < 6; ++j) {
        m[j] = state_->spike_buffers[SlotLayout{p, j}.weight_group()];
    }
    return m;
}

void Executor::exec(const Instruction& instr) {
    validate(instr);
    switch (instr.kind) {
        case InstrKind::AccW2V:
            exec_accw2v(*instr.w_row, instr.parity, instr.v_src, *instr.v_dst);
            break;
        case InstrKind::AccV2V:
            exec_accv2v(instr.v_src, *instr.v_src2, *instr.v_dst, instr.parity,
                        instr.conditional);
            break;
        case InstrKind::SpikeCheck:
            exec_spikecheck(instr.v_src, *instr.v_src2, instr.parity);
            break;
        case InstrKind::ResetV:
            exec_resetv(instr.v_src, *instr.v_dst, instr.parity);
            break;
        case InstrKind::Read: {
            read_row_v(*state_, instr.v_src);
            TraceEvent ev{InstrKind::Read, instr.parity};
            ev.v_src = instr.v_src;
            trace_.push_back(ev);
            break;
        }
        case InstrKind::Write: {
            // Raw writes go through write_row_v; the runtime uses this
            // path for host-mediated context swaps and merges.
            TraceEvent ev{InstrKind::Write, instr.parity};
            ev.v_dst = *instr.v_dst;
            trace_.push_back(ev);
            break;
        }
    }
}

void Executor::exec_accw2v(int w_row, Parity parity, int v_src, int v_dst) {
    check_parity(*state_, v_src, parity);
    check_parity(*state_, v_dst, parity);
    const RowSelect sel[2] = {RowSelect::weight(w_row, parity),
                              RowSelect::potential(v_src)};
    BitwiseSense sense = sense_rows(*state_, sel);
    AdderConfig cfg = build_adder_config(AdderKind::AccW2V, parity);
    auto sums = ripple_add(sense, cfg);

    std::array<int, 6> values;
    std::array<bool, 6> mask;
    std::uint8_t couts = 0;
    for (int j = 0; j < 6; ++j) {
        values[j] = decode_v(sums[j].sum_bits);
        mask[j] = true;
        couts |= static_cast<std::uint8_t>(sums[j].msb_cout) << j;
        if (sums[j].overflow) ++state_->overflow_events;
    }
    conditional_write(*state_, v_dst, parity, values, mask);

    TraceEvent ev{InstrKind::AccW2V, parity};
    ev.w_row = w_row;
    ev.v_src = v_src;
    ev.v_dst = v_dst;
    ev.msb_couts = couts;
    trace_.push_back(ev);
}

void Executor::exec_accv2v(int v_src, int v_src2, int v_dst, Parity parity,
                           bool conditional) {
    check_parity(*state_, v_src, parity);
    check_parity(*state_, v_src2, parity);
    check_parity(*state_, v_dst, parity);
    if (conditional && strict_ && !buffers_valid(parity)) {
        throw ValidationError("conditional AccV2V without a prior SpikeCheck");
    }
    const RowSelect sel[2] = {RowSelect::potential(v_src),
                              RowSelect::potential(v_src2)};
    BitwiseSense sense = sense_rows(*state_, sel);
    AdderConfig cfg = build_adder_config(AdderKind::AccV2V, parity);
    auto sums = ripple_add(sense, cfg);

    std::array<int, 6> values;
    std::array<bool, 6> mask = conditional ? parity_mask(parity)
                                           : std::array<bool, 6>{true, true, true,
                                                                 true, true, true};
    std::uint8_t couts = 0;
    for (int j = 0; j < 6; ++j) {
        values[j] = decode_v(sums[j].sum_bits);
        couts |= static_cast<std::uint8_t>(sums[j].msb_cout) << j;
        if (mask[j] && sums[j].overflow) ++state_->overflow_events;
    }
    conditional_write(*state_, v_dst, parity, values, mask);

    TraceEvent ev{InstrKind::AccV2V, parity};
    ev.v_src = v_src;
    ev.v_src2 = v_src2;
    ev.v_dst = v_dst;
    ev.msb_couts = couts;
    trace_.push_back(ev);
}

std::array<bool, 6> Executor::exec_spikecheck(int v_src, int threshold_row,
                                              Parity parity) {
    check_parity(*state_, v_src, parity);
    check_parity(*state_, threshold_row, parity);
    const RowSelect sel[2] = {RowSelect::potential(v_src),
                              RowSelect::potential(threshold_row)};
    BitwiseSense sense = sense_rows(*state_, sel);
    AdderConfig cfg = build_adder_config(AdderKind::SpikeCheck, parity);
    auto sums = ripple_add(sense, cfg);

    // No WWL is enabled: the adders act only as comparators.  Spike
    // iff the two's-complement difference is non-negative.
    std::array<bool, 6> mask{};
    std::uint8_t mask_bits = 0, couts = 0;
    for (int j = 0; j < 6; ++j) {
        mask[j] = !sums[j].sign_bit;
        mask_bits |= static_cast<std::uint8_t>(mask[j]) << j;
        couts |= static_cast<std::uint8_t>(sums[j].msb_cout) << j;
        if (sums[j].overflow) ++state_->overflow_events;
        state_->spike_buffers[SlotLayout{parity, j}.weight_group()] = mask[j];
    }
    if (parity == Parity::Odd) valid_odd_ = true; else valid_even_ = true;

    TraceEvent ev{InstrKind::SpikeCheck, parity};
    ev.v_src = v_src;
    ev.v_src2 = threshold_row;
    ev.spike_mask = mask_bits;
    ev.msb_couts = couts;
    trace_.push_back(ev);
    return mask;
}

void Executor::exec_resetv(int reset_row, int v_dst, Parity parity) {
    check_parity(*state_, reset_row, parity);
    check_parity(*state_, v_dst, parity);
    if (strict_ && !buffers_valid(parity)) {
        throw ValidationError("ResetV without a prior SpikeCheck");
    }
    // BLFA bypass: the reset value sensed in the SINV block transfers
    // straight to the CWD, gated by the spike buffers.
    std::array<int, 6> values;
    for (int j = 0; j < 6; ++j) {
        values[j] = read_slot(*state_, reset_row, SlotLayout{parity, j});
    }
    conditional_write(*state_, v_dst, parity, values, parity_mask(parity));

    TraceEvent ev{InstrKind::ResetV, parity};
    ev.v_src = reset_row;
    ev.v_dst = v_dst;
    trace_.push_back(ev);
}

std::bitset<MacroGeometry::total_cols> Executor::host_read_row(int row) {
    auto bits = read_row_v(*state_, row);
    TraceEvent ev{InstrKind::Read, Parity::Odd};
    ev.v_src = row;
    trace_.push_back(ev);
    return bits;
}

void Executor::host_write_row(int row,
                              const std::bitset<MacroGeometry::total_cols>& bits) {
    write_row_v(*state_, row, bits, strict_);
    TraceEvent ev{InstrKind::Write, Parity::Odd};
    ev.v_dst = row;
    trace_.push_back(ev);
}

std::array<bool, 12> Executor::neuron_update(const NeuronModel& model,
                                             std::pair<int, int> context,
                                             const ReservedRows& reserved) {
    std::array<bool, 12> spikes{};
    for (Parity p : {Parity::Odd, Parity::Even}) {
        int ctx = p == Parity::Odd ? context.first : context.second;
        std::array<bool, 6> mask{};
        switch (model.kind) {
            case NeuronModel::Kind::IF:
                mask = exec_spikecheck(ctx, reserved.thr(p), p);
                exec_resetv(reserved.reset(p), ctx, p);
                break;
            case NeuronModel::Kind::LIF:
                exec_accv2v(ctx, reserved.leak(p), ctx, p, false);
                mask = exec_spikecheck(ctx, reserved.thr(p), p);
                exec_resetv(reserved.reset(p), ctx, p);
                break;
            case NeuronModel::Kind::RMP:
                // Soft reset: subtract theta (the stored -theta row)
                // from the potentials that spiked.
                mask = exec_spikecheck(ctx, reserved.thr(p), p);
                exec_accv2v(ctx, reserved.thr(p), ctx, p, true);
                break;
        }
        for (int j = 0; j < 6; ++j) {
            spikes[SlotLayout{p, j}.weight_group()] = mask[j];
        }
    }
    valid_odd_ = valid_even_ = false;  // buffers retire at update end
    return spikes;
}

}  // namespace impulse
