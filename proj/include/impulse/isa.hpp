#ifndef IMPULSE_ISA_HPP_
#define IMPULSE_ISA_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "impulse/macro_core.hpp"

namespace impulse {

enum class InstrKind : std::uint8_t { AccW2V, AccV2V, SpikeCheck, ResetV, Read, Write };

const char* to_string(InstrKind k);

struct Instruction {
    InstrKind kind;
    Parity parity = Parity::Odd;
    std::optional<int> w_row;
    int v_src = -1;
    std::optional<int> v_src2;
    std::optional<int> v_dst;
    bool conditional = false;  // use spike buffers as write mask

    static Instruction acc_w2v(int w_row, Parity p, int v_src, int v_dst);
    static Instruction acc_v2v(int v_src, int v_src2, int v_dst, Parity p,
                               bool conditional = false);
    static Instruction spike_check(int v_src, int threshold_row, Parity p);
    static Instruction reset_v(int reset_row, int v_dst, Parity p);
};

// One trace record per executed instruction; the energy model and the
// instruction-count contracts consume these.
struct TraceEvent {
    InstrKind kind;
    Parity parity;
    int w_row = -1;
    int v_src = -1;
    int v_src2 = -1;
    int v_dst = -1;
    std::uint8_t spike_mask = 0;  // SpikeCheck only, one bit per slot
    std::uint8_t msb_couts = 0;   // MSB carry-outs, one bit per slot
};

using Trace = std::vector<TraceEvent>;

struct NeuronModel {
    enum class Kind : std::uint8_t { IF, LIF, RMP };
    Kind kind = Kind::IF;
    int threshold = 1;  // [1, 1023]
    int leak = 0;       // subtractive, >= 0
    int v_reset = 0;

    void validate() const;
};

const char* to_string(NeuronModel::Kind k);

// Reserved V rows holding (-theta), (-lambda) and v_reset per parity.
struct ReservedRows {
    int thr_odd = 0, thr_even = 1;
    int leak_odd = 2, leak_even = 3;
    int reset_odd = 4, reset_even = 5;

    int thr(Parity p) const { return p == Parity::Odd ? thr_odd : thr_even; }
    int leak(Parity p) const { return p == Parity::Odd ? leak_odd : leak_even; }
    int reset(Parity p) const { return p == Parity::Odd ? reset_odd : reset_even; }
};

// Executes instructions against one macro.  Strictly sequential; one
// executor per macro, never shared across threads.
class Executor {
  public:
    explicit Executor(MacroState& state, bool strict = false)
        : state_(&state), strict_(strict) {}

    void exec(const Instruction& instr);

    void exec_accw2v(int w_row, Parity parity, int v_src, int v_dst);
    void exec_accv2v(int v_src, int v_src2, int v_dst, Parity parity, bool conditional);
    std::array<bool, 6> exec_spikecheck(int v_src, int threshold_row, Parity parity);
    void exec_resetv(int reset_row, int v_dst, Parity parity);

    // Runs the per-parity microsequence for both parities against one
    // V context and returns 12 spikes ordered by neuron index.
    std::array<bool, 12> neuron_update(const NeuronModel& model,
                                       std::pair<int, int> context,
                                       const ReservedRows& reserved);

    // Host-mediated plain accesses (context swaps, partial-sum merges).
    // Traced as Read/Write events.
    std::bitset<MacroGeometry::total_cols> host_read_row(int row);
    void host_write_row(int row, const std::bitset<MacroGeometry::total_cols>& bits);

    const Trace& trace() const { return trace_; }
    Trace take_trace() { return std::move(trace_); }
    void clear_trace() { trace_.clear(); }
    MacroState& state() { return *state_; }
    const MacroState& state() const { return *state_; }

  private:
    std::array<bool, 6> parity_mask(Parity p) const;
    bool buffers_valid(Parity p) const {
        return p == Parity::Odd ? valid_odd_ : valid_even_;
    }

    MacroState* state_;
    bool strict_;
    bool valid_odd_ = false, valid_even_ = false;
    Trace trace_;
};

void validate(const Instruction& instr);

}  // namespace impulse

#endif  // IMPULSE_ISA_HPP_
