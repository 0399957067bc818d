#ifndef IMPULSE_MACRO_CORE_HPP_
#define IMPULSE_MACRO_CORE_HPP_

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "impulse/geometry.hpp"

namespace impulse {

// Per-column bitwise sensing result.  RBL gives NOR/OR, RBLB gives
// NAND/AND of the cells on the enabled read wordlines.
struct BitwiseSense {
    std::bitset<MacroGeometry::total_cols> or_bits;
    std::bitset<MacroGeometry::total_cols> and_bits;
    std::array<std::uint8_t, MacroGeometry::total_cols> contributors{};

    bool or_bit(int col) const { return or_bits[col]; }
    bool and_bit(int col) const { return and_bits[col]; }
    bool nor_bit(int col) const { return !or_bits[col]; }
    bool nand_bit(int col) const { return !and_bits[col]; }
};

enum class ColMode : std::uint8_t { CF, CS, LSB, MSB };

struct ColumnConfig {
    ColMode mode = ColMode::CF;
    int group = -1;           // adder group this column belongs to, -1 = inactive
    bool forward_sign = false;  // second operand is the latched Wsign, not a sensed cell
};

enum class AdderKind : std::uint8_t { AccW2V, AccV2V, SpikeCheck };

struct AdderConfig {
    Parity parity;
    std::array<ColumnConfig, MacroGeometry::total_cols> cols;
};

struct SlotSum {
    std::uint16_t sum_bits = 0;  // 11-bit two's complement result
    bool msb_cout = false;
    bool sign_bit = false;  // sum bit 10
    bool overflow = false;  // operand signs agree, result sign differs
};

// Which row(s) a sense enables.  A weight-row selector carries the
// cycle parity that masks which 6-column groups contribute.
struct RowSelect {
    enum class Kind : std::uint8_t { Weight, Potential };
    Kind kind;
    int row;
    Parity parity = Parity::Odd;  // meaningful for Weight only

    static RowSelect weight(int row, Parity p) { return {Kind::Weight, row, p}; }
    static RowSelect potential(int row) { return {Kind::Potential, row}; }
};

// Bit-level contents of one macro.  Single source of truth for all
// instruction semantics.
struct MacroState {
    std::array<std::bitset<MacroGeometry::w_cols>, MacroGeometry::w_rows> w_mem{};
    std::array<std::bitset<MacroGeometry::total_cols>, MacroGeometry::v_rows> v_mem{};
    std::array<bool, 12> spike_buffers{};
    std::uint64_t overflow_events = 0;

    // Alignment registered per V row by the loader; used by the
    // strict-mode hole validator.  Unset rows are unchecked.
    std::array<std::optional<Parity>, MacroGeometry::v_rows> v_row_parity{};
};

BitwiseSense sense_rows(const MacroState& state, std::span<const RowSelect> rows);

AdderConfig build_adder_config(AdderKind kind, Parity parity);

std::array<SlotSum, MacroGeometry::slots_per_cycle> ripple_add(
    const BitwiseSense& sense, const AdderConfig& config);

// Writes the 11 value columns (hole forced 0) of each slot whose mask
// bit is set; masked-off slots keep their bitlines precharged.
void conditional_write(MacroState& state, int dst_row, Parity parity,
                       const std::array<int, 6>& slot_values,
                       const std::array<bool, 6>& mask);

std::bitset<MacroGeometry::total_cols> read_row_v(const MacroState& state, int row);
std::bitset<MacroGeometry::w_cols> read_row_w(const MacroState& state, int row);
void write_row_v(MacroState& state, int row,
                 const std::bitset<MacroGeometry::total_cols>& bits,
                 bool strict = false);
void write_row_w(MacroState& state, int row,
                 const std::bitset<MacroGeometry::w_cols>& bits);

// Slot-level accessors used by the loader, the runtime's host-merge
// path, and the tests.
int read_slot(const MacroState& state, int v_row, SlotLayout layout);
void write_slot(MacroState& state, int v_row, SlotLayout layout, int value);

int read_weight(const MacroState& state, int w_row, int group);
void write_weight(MacroState& state, int w_row, int group, int value);

}  // namespace impulse

#endif  // IMPULSE_MACRO_CORE_HPP_
