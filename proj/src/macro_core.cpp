#include "impulse/macro_core.hpp"

#include <string>

namespace impulse {

BitwiseSense sense_rows(const MacroState& state, std::span<const RowSelect> rows) {
    if (rows.size() > 2) {
        throw ValidationError("decoder constraint: at most 2 read wordlines may be enabled");
    }
    BitwiseSense s;
    s.and_bits.set();  // neutral for AND; cleared below where nothing contributes
    for (const RowSelect& sel : rows) {
        if (sel.kind == RowSelect::Kind::Weight) {
            if (sel.row < 0 || sel.row >= MacroGeometry::w_rows) {
                throw ValidationError("weight row out of range: " + std::to_string(sel.row));
            }
            const auto& bits = state.w_mem[sel.row];
            for (int col = 0; col < MacroGeometry::w_cols; ++col) {
                if (!group_on_parity(col / MacroGeometry::weight_bits, sel.parity)) continue;
                bool b = bits[col];
                s.or_bits[col] = s.or_bits[col] | b;
                s.and_bits[col] = s.and_bits[col] & b;
                ++s.contributors[col];
            }
        } else {
            if (sel.row < 0 || sel.row >= MacroGeometry::v_rows) {
                throw ValidationError("V row out of range: " + std::to_string(sel.row));
            }
            const auto& bits = state.v_mem[sel.row];
            for (int col = 0; col < MacroGeometry::total_cols; ++col) {
                bool b = bits[col];
                s.or_bits[col] = s.or_bits[col] | b;
                s.and_bits[col] = s.and_bits[col] & b;
                ++s.contributors[col];
            }
        }
    }
    // Precharged bitlines: a column with no enabled cell senses 0;
    // a single enabled cell gives or = and = cell bit.
    for (int col = 0; col < MacroGeometry::total_cols; ++col) {
        if (s.contributors[col] == 0) s.and_bits[col] = false;
    }
    return s;
}

AdderConfig build_adder_config(AdderKind kind, Parity parity) {
    AdderConfig cfg;
    cfg.parity = parity;
    const int first_base = parity == Parity::Odd ? 0 : 6;
    for (int g = 0; g < MacroGeometry::slots_per_cycle; ++g) {
        int base = first_base + MacroGeometry::slot_cols * g;
        for (int off = 0; off < MacroGeometry::slot_cols; ++off) {
            ColumnConfig& c = cfg.cols[base + off];
            c.group = g;
            if (off == 0) {
                c.mode = ColMode::LSB;
            } else if (off == 5) {
                c.mode = ColMode::CS;
            } else if (off == 11) {
                c.mode = ColMode::MSB;
            } else {
                c.mode = ColMode::CF;
            }
            // Above the hole the weight group of the opposite parity is
            // disabled, so for AccW2V the second operand is the latched
            // Wsign forwarded by the CS block.  For V+V adds both
            // operands are sensed and the CS column only skips carry.
            c.forward_sign = kind == AdderKind::AccW2V && off > 5;
        }
    }
    return cfg;
}

std::array<SlotSum, MacroGeometry::slots_per_cycle> ripple_add(
    const BitwiseSense& sense, const AdderConfig& config) {
    std::array<SlotSum, MacroGeometry::slots_per_cycle> out{};
    const int first_base = config.parity == Parity::Odd ? 0 : 6;
    for (int g = 0; g < MacroGeometry::slots_per_cycle; ++g) {
        int base = first_base + MacroGeometry::slot_cols * g;
        SlotSum& slot = out[g];
        bool carry = false;  // carry-in at the LSB column is 0
        bool wsign = false;
        bool a_msb = false, b_msb = false;
        int value_bit = 0;
        for (int off = 0; off < MacroGeometry::slot_cols; ++off) {
            int col = base + off;
            const ColumnConfig& c = config.cols[col];
            if (c.mode == ColMode::CS) {
                // Hole column: latch Wsign from the bitline, contribute
                // sum bit 0, pass the carry from bit 4 into bit 5.
                wsign = sense.or_bit(col);
                continue;
            }
            bool o, a;  // pairwise OR / AND of the two operand bits
            if (c.forward_sign) {
                bool x = sense.or_bit(col);  // single sensed cell
                o = x | wsign;
                a = x & wsign;
            } else {
                o = sense.or_bit(col);
                a = sense.and_bit(col);
            }
            bool x_xor_y = o & !a;
            bool sum = x_xor_y ^ carry;
            bool cout = a | (carry & o);
            slot.sum_bits |= static_cast<std::uint16_t>(sum) << value_bit;
            ++value_bit;
            carry = cout;
            if (c.mode == ColMode::MSB) {
                slot.msb_cout = cout;
                slot.sign_bit = sum;
                a_msb = a;   // both operand sign bits 1
                b_msb = o;   // at least one sign bit 1
            }
        }
        slot.overflow = (a_msb && !slot.sign_bit) || (!b_msb && slot.sign_bit);
    }
    return out;
}

void conditional_write(MacroState& state, int dst_row, Parity parity,
                       const std::array<int, 6>& slot_values,
                       const std::array<bool, 6>& mask) {
    if (dst_row < 0 || dst_row >= MacroGeometry::v_rows) {
        throw ValidationError("V row out of range: " + std::to_string(dst_row));
    }
    if (state.v_row_parity[dst_row] && *state.v_row_parity[dst_row] != parity) {
        throw MappingError("conditional_write parity mismatch on row " +
                           std::to_string(dst_row));
    }
    auto& bits = state.v_mem[dst_row];
    for (int j = 0; j < 6; ++j) {
        if (!mask[j]) continue;
        SlotLayout layout{parity, j};
        std::uint16_t enc = encode_v(slot_values[j]);
        for (int b = 0; b < MacroGeometry::v_bits; ++b) {
            bits[layout.bit_col(b)] = (enc >> b) & 1;
        }
        bits[layout.hole_col()] = false;
    }
}

std::bitset<MacroGeometry::total_cols> read_row_v(const MacroState& state, int row) {
    if (row < 0 || row >= MacroGeometry::v_rows) {
        throw ValidationError("V row out of range: " + std::to_string(row));
    }
    return state.v_mem[row];
}

std::bitset<MacroGeometry::w_cols> read_row_w(const MacroState& state, int row) {
    if (row < 0 || row >= MacroGeometry::w_rows) {
        throw ValidationError("weight row out of range: " + std::to_string(row));
    }
    return state.w_mem[row];
}

void write_row_v(MacroState& state, int row,
                 const std::bitset<MacroGeometry::total_cols>& bits, bool strict) {
    if (row < 0 || row >= MacroGeometry::v_rows) {
        throw ValidationError("V row out of range: " + std::to_string(row));
    }
    if (strict && state.v_row_parity[row]) {
        for (int j = 0; j < 6; ++j) {
            SlotLayout layout{*state.v_row_parity[row], j};
            if (bits[layout.hole_col()]) {
                throw MappingError("write_row would set hole column " +
                                   std::to_string(layout.hole_col()) + " on V row " +
                                   std::to_string(row));
            }
        }
    }
    state.v_mem[row] = bits;
}

void write_row_w(MacroState& state, int row,
                 const std::bitset<MacroGeometry::w_cols>& bits) {
    if (row < 0 || row >= MacroGeometry::w_rows) {
        throw ValidationError("weight row out of range: " + std::to_string(row));
    }
    state.w_mem[row] = bits;
}

int read_slot(const MacroState& state, int v_row, SlotLayout layout) {
    const auto& bits = state.v_mem[v_row];
    std::uint16_t enc = 0;
    for (int b = 0; b < MacroGeometry::v_bits; ++b) {
        enc |= static_cast<std::uint16_t>(bits[layout.bit_col(b)]) << b;
    }
    return decode_v(enc);
}

void write_slot(MacroState& state, int v_row, SlotLayout layout, int value) {
    auto& bits = state.v_mem[v_row];
    std::uint16_t enc = encode_v(value);
    for (int b = 0; b < MacroGeometry::v_bits; ++b) {
        bits[layout.bit_col(b)] = (enc >> b) & 1;
    }
    bits[layout.hole_col()] = false;
}

int read_weight(const MacroState& state, int w_row, int group) {
    const auto& bits = state.w_mem[w_row];
    std::uint8_t enc = 0;
    for (int b = 0; b < MacroGeometry::weight_bits; ++b) {
        enc |= static_cast<std::uint8_t>(bits[6 * group + b]) << b;
    }
    return decode_w(enc);
}

void write_weight(MacroState& state, int w_row, int group, int value) {
    auto& bits = state.w_mem[w_row];
    std::uint8_t enc = encode_w(value);
    for (int b = 0; b < MacroGeometry::weight_bits; ++b) {
        bits[6 * group + b] = (enc >> b) & 1;
    }
}

}  // namespace impulse
