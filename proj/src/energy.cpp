#include "impulse/energy.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "impulse/runtime.hpp"

namespace impulse {

EnergyTable default_table() {
    // Operating point D: 200 MHz, 0.85 V.  Energies derive from the
    // measured TOPS/W per instruction kind (1 op = one 11-bit
    // operation, 6 ops per CIM instruction).
    EnergyTable t;
    t.clock_period_ns = 5.0;
    const double ops = t.ops_per_acc_instruction;
    t.at(InstrKind::AccW2V) = {ops / 0.99, 1, 6};
    t.at(InstrKind::AccV2V) = {ops / 1.18, 1, 6};
    t.at(InstrKind::ResetV) = {ops / 1.02, 1, 6};
    t.at(InstrKind::SpikeCheck) = {ops / 1.22, 1, 6};
    // Plain accesses stay at 0 pJ until configured from measurements.
    t.at(InstrKind::Read) = {0.0, 1, 0};
    t.at(InstrKind::Write) = {0.0, 1, 0};
    return t;
}

CostReport account(const Trace& trace, const EnergyTable& table) {
    std::array<long long, 6> counts{};
    for (const TraceEvent& ev : trace) ++counts[static_cast<int>(ev.kind)];

    CostReport report;
    for (int k = 0; k < 6; ++k) {
        if (!counts[k]) continue;
        InstrKind kind = static_cast<InstrKind>(k);
        const EnergyTable::Entry& e = table.at(kind);
        CostReport::KindRow row;
        row.kind = kind;
        row.count = counts[k];
        row.energy_pj = counts[k] * e.energy_pj;
        row.cycles = counts[k] * e.cycles;
        report.total_energy_pj += row.energy_pj;
        report.total_delay_ns += row.cycles * table.clock_period_ns;
        report.total_ops += counts[k] * e.ops;
        report.breakdown.push_back(row);
    }
    report.edp_pj_ns = report.total_energy_pj * report.total_delay_ns;
    report.tops_per_w = report.total_energy_pj > 0.0
                            ? report.total_ops / report.total_energy_pj
                            : 0.0;
    return report;
}

namespace {

// The sweep template: one macro, 128 inputs, 12 IF outputs.
LayerSpec sweep_template() {
    LayerSpec layer;
    layer.kind = LayerSpec::Kind::FC;
    layer.in_dim = 128;
    layer.out_dim = 12;
    layer.neuron = {NeuronModel::Kind::IF, 512, 0, 0};
    layer.weights.assign(12, std::vector<int>(128, 1));
    return layer;
}

double edp_at(int spiking_inputs, const EnergyTable& table) {
    Engine engine({sweep_template()}, {.parallel = false});
    SpikeTrain train;
    train.timesteps = 1;
    train.frames.emplace_back(128, 0);
    for (int i = 0; i < spiking_inputs; ++i) train.frames[0][i] = 1;
    InferenceResult res = engine.run_inference(train);
    CostReport report = account(res.trace, table);
    return report.edp_pj_ns / 12.0;  // per neuron per timestep
}

}  // namespace

std::vector<SweepPoint> edp_sweep(const std::vector<double>& sparsity_points,
                                  const EnergyTable& table) {
    if (sparsity_points.empty()) throw ValidationError("empty sparsity grid");
    for (double s : sparsity_points) {
        if (s < 0.0 || s > 1.0) {
            throw ValidationError("sparsity point outside [0,1]");
        }
    }
    const double baseline = edp_at(128, table);
    std::vector<SweepPoint> out(sparsity_points.size());
    const int n = static_cast<int>(sparsity_points.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        double s = sparsity_points[i];
        int k = static_cast<int>(std::lround((1.0 - s) * 128));
        double edp = edp_at(k, table);
        out[i] = {s, edp, 100.0 * (1.0 - edp / baseline)};
    }
    return out;
}

std::string cost_report_csv(const CostReport& report) {
    std::ostringstream os;
    os << "kind,count,energy_pj,cycles\n";
    os << std::fixed << std::setprecision(4);
    for (const auto& row : report.breakdown) {
        os << to_string(row.kind) << ',' << row.count << ',' << row.energy_pj << ','
           << row.cycles << '\n';
    }
    long long total_count = 0, total_cycles = 0;
    for (const auto& row : report.breakdown) {
        total_count += row.count;
        total_cycles += row.cycles;
    }
    os << "total," << total_count << ',' << report.total_energy_pj << ','
       << total_cycles << '\n';
    return os.str();
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream os;
    os << "sparsity,edp_pj_ns,reduction_pct\n";
    os << std::fixed << std::setprecision(4);
    for (const SweepPoint& p : points) {
        os << p.sparsity << ',' << p.edp_pj_ns << ',' << p.reduction_pct << '\n';
    }
    return os.str();
}

}  // namespace impulse
