#ifndef IMPULSE_ENERGY_HPP_
#define IMPULSE_ENERGY_HPP_

#include <array>
#include <string>
#include <vector>

#include "impulse/isa.hpp"

namespace impulse {

// Per-instruction energy/latency table.  Default energies derive from
// the measured point-D efficiencies via energy_pj = ops / (TOPS/W),
// with 6 eleven-bit ops per CIM instruction (one per slot per cycle).
struct EnergyTable {
    struct Entry {
        double energy_pj = 0.0;
        int cycles = 1;
        int ops = 0;  // 11-bit operations attributed per instruction
    };
    std::array<Entry, 6> entries{};  // indexed by InstrKind
    double clock_period_ns = 5.0;    // 200 MHz
    int ops_per_acc_instruction = 6;

    Entry& at(InstrKind k) { return entries[static_cast<int>(k)]; }
    const Entry& at(InstrKind k) const { return entries[static_cast<int>(k)]; }
};

EnergyTable default_table();

struct CostReport {
    struct KindRow {
        InstrKind kind;
        long long count = 0;
        double energy_pj = 0.0;
        long long cycles = 0;
    };
    std::vector<KindRow> breakdown;
    double total_energy_pj = 0.0;
    double total_delay_ns = 0.0;
    double edp_pj_ns = 0.0;
    long long total_ops = 0;
    double tops_per_w = 0.0;  // ops / pJ
};

CostReport account(const Trace& trace, const EnergyTable& table);

struct SweepPoint {
    double sparsity;
    double edp_pj_ns;      // per neuron per timestep
    double reduction_pct;  // vs the zero-sparsity baseline
};

// Runs the 128-input / 12-output IF template for one timestep at each
// sparsity point; k = round((1-s)*128) inputs spike.
std::vector<SweepPoint> edp_sweep(const std::vector<double>& sparsity_points,
                                  const EnergyTable& table);

std::string cost_report_csv(const CostReport& report);
std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace impulse

#endif  // IMPULSE_ENERGY_HPP_
