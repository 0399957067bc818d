#ifndef IMPULSE_GEOMETRY_HPP_
#define IMPULSE_GEOMETRY_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace impulse {

// Fixed geometry of one macro: a 128x72 weight subarray fused with a
// 32x78 membrane-potential subarray over common bitlines.  The six
// columns beyond 72 carry only the last even-parity V slot.
struct MacroGeometry {
    static constexpr int w_rows = 128;
    static constexpr int w_cols = 72;
    static constexpr int v_rows = 32;
    static constexpr int total_cols = 78;
    static constexpr int weight_bits = 6;
    static constexpr int v_bits = 11;
    static constexpr int slot_cols = 12;
    static constexpr int slots_per_cycle = 6;
    static constexpr int weights_per_row = 12;

    static constexpr int v_min = -1024;
    static constexpr int v_max = 1023;
    static constexpr int w_min = -32;
    static constexpr int w_max = 31;
};

// Which interleaved half of a weight row (and which staggered V
// alignment) a cycle addresses.  Weight groups 0,2,4,... sit on the
// odd read wordline, groups 1,3,5,... on the even one.
enum class Parity : std::uint8_t { Odd, Even };

inline const char* to_string(Parity p) { return p == Parity::Odd ? "odd" : "even"; }

inline bool group_on_parity(int weight_group, Parity p) {
    return (weight_group % 2 == 0) == (p == Parity::Odd);
}

// Physical placement of one 11-bit membrane-potential slot.  Twelve
// contiguous columns: value bits 0-4, the forced-zero hole, value
// bits 5-10.  The hole lines up with the sign column of the weight
// group this slot accumulates from.
struct SlotLayout {
    Parity parity;
    int slot;  // 0..5

    int col_base() const {
        return parity == Parity::Odd ? 12 * slot : 6 + 12 * slot;
    }
    int hole_col() const { return col_base() + 5; }
    int bit_col(int bit) const {
        return bit < 5 ? col_base() + bit : col_base() + 1 + bit;
    }
    // The weight group whose sign column coincides with this slot's hole.
    int weight_group() const {
        return parity == Parity::Odd ? 2 * slot : 2 * slot + 1;
    }
};

inline SlotLayout slot_of_group(int weight_group) {
    return weight_group % 2 == 0
               ? SlotLayout{Parity::Odd, weight_group / 2}
               : SlotLayout{Parity::Even, weight_group / 2};
}

// Wrap to 11-bit two's complement, [-1024, 1023].
inline int wrap_v(long long x) {
    long long m = ((x + 1024) % 2048 + 2048) % 2048;
    return static_cast<int>(m - 1024);
}

// Wrap to 6-bit two's complement, [-32, 31].
inline int wrap_w(long long x) {
    long long m = ((x + 32) % 64 + 64) % 64;
    return static_cast<int>(m - 32);
}

inline std::uint16_t encode_v(int value) {
    return static_cast<std::uint16_t>(value & 0x7FF);
}
inline int decode_v(std::uint16_t bits) {
    bits &= 0x7FF;
    return bits & 0x400 ? static_cast<int>(bits) - 2048 : static_cast<int>(bits);
}

inline std::uint8_t encode_w(int value) {
    return static_cast<std::uint8_t>(value & 0x3F);
}
inline int decode_w(std::uint8_t bits) {
    bits &= 0x3F;
    return bits & 0x20 ? static_cast<int>(bits) - 64 : static_cast<int>(bits);
}

// Error taxonomy shared by the whole simulator.  The CLI maps these
// onto stable exit codes.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : SimError {  // malformed operands, schema violations
    using SimError::SimError;
};
struct MappingError : SimError {  // parity/hole/placement violations
    using SimError::SimError;
};
struct CapacityError : SimError {  // resource limits (contexts, fan-in)
    using SimError::SimError;
};
struct IoError : SimError {  // unreadable or unwritable files
    using SimError::SimError;
};

}  // namespace impulse

#endif  // IMPULSE_GEOMETRY_HPP_
