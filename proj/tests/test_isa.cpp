#include "doctest.h"

#include <random>

#include "impulse/isa.hpp"
#include "helpers.hpp"

using namespace impulse;
using test::get_slots;
using test::make_state;
using test::set_parity_weights;
using test::set_slots;

TEST_CASE("exec: Read leaves the state unchanged and traces one event") {
    MacroState st = make_state();
    set_slots(st, 6, Parity::Odd, {1, 2, 3, 4, 5, 6});
    MacroState before = st;
    Executor ex(st);
    Instruction rd{InstrKind::Read};
    rd.v_src = 6;
    ex.exec(rd);
    CHECK(st.v_mem == before.v_mem);
    CHECK(ex.trace().size() == 1);
    CHECK(ex.trace()[0].kind == InstrKind::Read);
}

TEST_CASE("exec: malformed AccW2V is rejected with the state unchanged") {
    MacroState st = make_state();
    set_slots(st, 6, Parity::Odd, {5, 0, 0, 0, 0, 0});
    MacroState before = st;
    Executor ex(st);
    Instruction bad{InstrKind::AccW2V, Parity::Odd};
    bad.v_src = 6;
    bad.v_dst = 6;  // no w_row
    CHECK_THROWS_AS(ex.exec(bad), ValidationError);
    CHECK(st.v_mem == before.v_mem);
    CHECK(ex.trace().empty());
}

TEST_CASE("exec: every instruction appends exactly one trace event") {
    std::mt19937 rng(3);
    MacroState st = make_state();
    Executor ex(st);
    ReservedRows rr;
    std::uniform_int_distribution<int> pick(0, 3);
    for (int n = 1; n <= 200; ++n) {
        Parity p = rng() & 1 ? Parity::Odd : Parity::Even;
        int ctx = p == Parity::Odd ? 6 : 7;
        switch (pick(rng)) {
            case 0: ex.exec_accw2v(static_cast<int>(rng() % 128), p, ctx, ctx); break;
            case 1: ex.exec_accv2v(ctx, rr.leak(p), ctx, p, false); break;
            case 2: ex.exec_spikecheck(ctx, rr.thr(p), p); break;
            case 3: ex.exec_resetv(rr.reset(p), ctx, p); break;
        }
        CHECK(ex.trace().size() == static_cast<size_t>(n));
    }
}

TEST_CASE("AccW2V: all-zero weight row is the identity") {
    MacroState st = make_state();
    std::array<int, 6> v{17, -300, 1023, -1024, 0, 511};
    set_slots(st, 6, Parity::Odd, v);
    Executor ex(st);
    ex.exec_accw2v(0, Parity::Odd, 6, 6);
    CHECK(get_slots(st, 6, Parity::Odd) == v);
}

TEST_CASE("AccW2V: per-slot example with wrap at both ends") {
    MacroState st = make_state();
    set_slots(st, 6, Parity::Odd, {5, -8, 0, 31, -1024, 1023});
    set_parity_weights(st, 0, Parity::Odd, {-3, 8, 0, -31, -1, 1});
    Executor ex(st);
    ex.exec_accw2v(0, Parity::Odd, 6, 6);
    CHECK(get_slots(st, 6, Parity::Odd) ==
          std::array<int, 6>{2, 0, 0, 0, 1023, -1024});
    CHECK(st.overflow_events == 2);  // the two wrapping slots
}

TEST_CASE("AccW2V: negated weight row is the inverse mod 2^11") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> vd(-1024, 1023);
    std::uniform_int_distribution<int> wd(-31, 31);  // -w must stay in range
    for (int trial = 0; trial < 100; ++trial) {
        std::array<int, 6> v, w, wn;
        for (int j = 0; j < 6; ++j) {
            v[j] = vd(rng);
            w[j] = wd(rng);
            wn[j] = -w[j];
        }
        MacroState st = make_state();
        set_slots(st, 6, Parity::Odd, v);
        set_parity_weights(st, 0, Parity::Odd, w);
        set_parity_weights(st, 1, Parity::Odd, wn);
        Executor ex(st);
        ex.exec_accw2v(0, Parity::Odd, 6, 6);
        ex.exec_accw2v(1, Parity::Odd, 6, 6);
        CHECK(get_slots(st, 6, Parity::Odd) == v);
    }
}

TEST_CASE("AccW2V: source and destination rows may differ") {
    MacroState st = make_state();
    set_slots(st, 6, Parity::Odd, {10, 0, 0, 0, 0, 0});
    set_parity_weights(st, 0, Parity::Odd, {7, 0, 0, 0, 0, 0});
    Executor ex(st);
    ex.exec_accw2v(0, Parity::Odd, 6, 8);
    CHECK(read_slot(st, 8, SlotLayout{Parity::Odd, 0}) == 17);
    CHECK(read_slot(st, 6, SlotLayout{Parity::Odd, 0}) == 10);  // source intact
}

TEST_CASE("AccW2V: parity mismatch between rows is a mapping violation") {
    MacroState st = make_state();
    Executor ex(st);
    CHECK_THROWS_AS(ex.exec_accw2v(0, Parity::Odd, 7, 7), MappingError);
}

TEST_CASE("AccV2V: zero source row copies, leak row subtracts") {
    MacroState st = make_state();
    ReservedRows rr;
    set_slots(st, 6, Parity::Odd, {10, -10, 0, 500, -1000, 3});
    Executor ex(st);
    // v_src2 all zeros -> copy
    ex.exec_accv2v(6, 8, 8, Parity::Odd, false);
    CHECK(get_slots(st, 8, Parity::Odd) ==
          std::array<int, 6>{10, -10, 0, 500, -1000, 3});
    // leak row storing -2
    set_slots(st, rr.leak_odd, Parity::Odd, {-2, -2, -2, -2, -2, -2});
    ex.exec_accv2v(6, rr.leak_odd, 6, Parity::Odd, false);
    CHECK(get_slots(st, 6, Parity::Odd) ==
          std::array<int, 6>{8, -12, -2, 498, -1002, 1});
}

TEST_CASE("AccV2V: conditional write changes only the masked slots") {
    MacroState st = make_state();
    ReservedRows rr;
    set_slots(st, 6, Parity::Odd, {100, 100, 100, 100, 100, 100});
    // Threshold 50 on even-indexed slots only: stagger potentials so the
    // mask comes out (1,0,1,0,1,0).
    set_slots(st, 8, Parity::Odd, {60, 40, 60, 40, 60, 40});
    set_slots(st, rr.thr_odd, Parity::Odd, {-50, -50, -50, -50, -50, -50});
    Executor ex(st);
    ex.exec_spikecheck(8, rr.thr_odd, Parity::Odd);
    auto before = st.v_mem[6];
    ex.exec_accv2v(6, rr.thr_odd, 6, Parity::Odd, true);
    auto after = get_slots(st, 6, Parity::Odd);
    CHECK(after == std::array<int, 6>{50, 100, 50, 100, 50, 100});
    // Bit-identical on the unmasked slots' columns.
    for (int j : {1, 3, 5}) {
        SlotLayout layout{Parity::Odd, j};
        for (int c = layout.col_base(); c < layout.col_base() + 12; ++c) {
            CHECK(st.v_mem[6][c] == before[c]);
        }
    }
}

TEST_CASE("SpikeCheck: sign semantics and purity") {
    MacroState st = make_state();
    ReservedRows rr;
    set_slots(st, 6, Parity::Odd, {5, -5, 3, 2, 1023, -500});
    set_slots(st, rr.thr_odd, Parity::Odd, {-3, -3, -3, -3, -3, -3});
    auto before = st.v_mem;
    Executor ex(st);
    auto mask = ex.exec_spikecheck(6, rr.thr_odd, Parity::Odd);
    CHECK(mask == std::array<bool, 6>{true, false, true, false, true, false});
    CHECK(st.v_mem == before);  // read-only
    // Buffers land on the odd-parity neuron indices.
    CHECK(st.spike_buffers[0]);
    CHECK(!st.spike_buffers[2]);
    CHECK(st.spike_buffers[4]);
}

TEST_CASE("ResetV: masks all-0 and all-1") {
    MacroState st = make_state();
    ReservedRows rr;
    set_slots(st, 6, Parity::Odd, {10, 20, 30, 40, 50, 60});
    set_slots(st, rr.thr_odd, Parity::Odd, {-1000, -1000, -1000, -1000, -1000, -1000});
    Executor ex(st);

    SUBCASE("no spikes: destination unchanged") {
        set_slots(st, rr.thr_odd, Parity::Odd, {-100, -100, -100, -100, -100, -100});
        ex.exec_spikecheck(6, rr.thr_odd, Parity::Odd);  // all below threshold
        auto before = st.v_mem[6];
        ex.exec_resetv(rr.reset_odd, 6, Parity::Odd);
        CHECK(st.v_mem[6] == before);
    }
    SUBCASE("all spike with zero reset row: all slots cleared") {
        set_slots(st, rr.thr_odd, Parity::Odd, {-1, -1, -1, -1, -1, -1});
        ex.exec_spikecheck(6, rr.thr_odd, Parity::Odd);
        ex.exec_resetv(rr.reset_odd, 6, Parity::Odd);
        CHECK(get_slots(st, 6, Parity::Odd) == std::array<int, 6>{0, 0, 0, 0, 0, 0});
    }
}

TEST_CASE("ResetV: strict mode requires a prior SpikeCheck") {
    MacroState st = make_state();
    ReservedRows rr;
    Executor ex(st, /*strict=*/true);
    CHECK_THROWS_AS(ex.exec_resetv(rr.reset_odd, 6, Parity::Odd), ValidationError);
}

namespace {

struct NeuronFixture {
    MacroState st = make_state();
    ReservedRows rr;

    void load(const NeuronModel& n, int v_odd0, int v_even0 = 0) {
        for (Parity p : {Parity::Odd, Parity::Even}) {
            for (int j = 0; j < 6; ++j) {
                SlotLayout layout{p, j};
                write_slot(st, rr.thr(p), layout, wrap_v(-n.threshold));
                write_slot(st, rr.leak(p), layout, wrap_v(-n.leak));
                write_slot(st, rr.reset(p), layout, n.v_reset);
            }
        }
        write_slot(st, 6, SlotLayout{Parity::Odd, 0}, v_odd0);
        write_slot(st, 7, SlotLayout{Parity::Even, 0}, v_even0);
    }
};

}  // namespace

TEST_CASE("neuron_update: RMP soft reset subtracts the threshold") {
    NeuronFixture f;
    NeuronModel n{NeuronModel::Kind::RMP, 4};
    f.load(n, 10);
    Executor ex(f.st);
    auto spikes = ex.neuron_update(n, {6, 7}, f.rr);
    CHECK(spikes[0]);
    CHECK(read_slot(f.st, 6, SlotLayout{Parity::Odd, 0}) == 6);
    CHECK(ex.trace().size() == 4);  // 2 instructions per parity
}

TEST_CASE("neuron_update: LIF leaks before the threshold check") {
    NeuronFixture f;
    NeuronModel n{NeuronModel::Kind::LIF, 4, 2};
    f.load(n, 3);
    Executor ex(f.st);
    auto spikes = ex.neuron_update(n, {6, 7}, f.rr);
    CHECK(!spikes[0]);
    CHECK(read_slot(f.st, 6, SlotLayout{Parity::Odd, 0}) == 1);
    CHECK(ex.trace().size() == 6);
}

TEST_CASE("neuron_update: IF and RMP diverge after one step") {
    NeuronModel base{NeuronModel::Kind::IF, 4};
    NeuronFixture f_if;
    f_if.load(base, 9);
    Executor ex_if(f_if.st);
    ex_if.neuron_update(base, {6, 7}, f_if.rr);
    CHECK(read_slot(f_if.st, 6, SlotLayout{Parity::Odd, 0}) == 0);
    CHECK(ex_if.trace().size() == 4);

    NeuronModel rmp{NeuronModel::Kind::RMP, 4};
    NeuronFixture f_rmp;
    f_rmp.load(rmp, 9);
    Executor ex_rmp(f_rmp.st);
    ex_rmp.neuron_update(rmp, {6, 7}, f_rmp.rr);
    CHECK(read_slot(f_rmp.st, 6, SlotLayout{Parity::Odd, 0}) == 5);
}

TEST_CASE("parity closure: odd + even AccW2V covers all 12 weights once") {
    MacroState st = make_state();
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> wd(-32, 31);
    std::array<int, 12> w;
    for (int g = 0; g < 12; ++g) {
        w[g] = wd(rng);
        write_weight(st, 0, g, w[g]);
    }
    Executor ex(st);
    ex.exec_accw2v(0, Parity::Odd, 6, 6);
    ex.exec_accw2v(0, Parity::Even, 7, 7);
    for (int g = 0; g < 12; ++g) {
        SlotLayout layout = slot_of_group(g);
        int row = g % 2 == 0 ? 6 : 7;
        CHECK(read_slot(st, row, layout) == w[g]);
    }
}

TEST_CASE("commutativity: AccW2V order does not change the final V") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> wd(-32, 31);
    MacroState st1 = make_state(), st2 = make_state();
    for (int r = 0; r < 8; ++r) {
        for (int g = 0; g < 12; ++g) {
            int w = wd(rng);
            write_weight(st1, r, g, w);
            write_weight(st2, r, g, w);
        }
    }
    Executor ex1(st1), ex2(st2);
    for (int r = 0; r < 8; ++r) {
        ex1.exec_accw2v(r, Parity::Odd, 6, 6);
        ex1.exec_accw2v(r, Parity::Even, 7, 7);
    }
    for (int r = 7; r >= 0; --r) {
        ex2.exec_accw2v(r, Parity::Even, 7, 7);
        ex2.exec_accw2v(r, Parity::Odd, 6, 6);
    }
    CHECK(st1.v_mem == st2.v_mem);
}

TEST_CASE("hole preservation under random instruction streams") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> pick(0, 3);
    std::uniform_int_distribution<int> wd(-32, 31);
    MacroState st = make_state();
    ReservedRows rr;
    for (int r = 0; r < 128; ++r) {
        for (int g = 0; g < 12; ++g) write_weight(st, r, g, wd(rng));
    }
    Executor ex(st);
    auto holes_clear = [&](int row, Parity p) {
        for (int j = 0; j < 6; ++j) {
            if (st.v_mem[row][SlotLayout{p, j}.hole_col()]) return false;
        }
        return true;
    };
    for (int step = 0; step < 500; ++step) {
        Parity p = rng() & 1 ? Parity::Odd : Parity::Even;
        int base = p == Parity::Odd ? 6 : 7;
        int ctx = base + 2 * static_cast<int>(rng() % 13);
        switch (pick(rng)) {
            case 0: ex.exec_accw2v(static_cast<int>(rng() % 128), p, ctx, ctx); break;
            case 1: ex.exec_accv2v(ctx, rr.leak(p), ctx, p, false); break;
            case 2: ex.exec_spikecheck(ctx, rr.thr(p), p); break;
            case 3: ex.exec_resetv(rr.reset(p), ctx, p); break;
        }
        REQUIRE(holes_clear(ctx, p));
    }
}
