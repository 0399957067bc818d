// impulse - command-line front end for the macro simulator.
//
//   impulse run   model.json spikes.tsv [-o out.tsv] [--report r.csv] ...
//   impulse sweep [--grid 0,0.25,...] [--at S] [-o sweep.csv]
//   impulse map   model.json
//   impulse selftest
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "impulse/energy.hpp"
#include "impulse/model_io.hpp"
#include "impulse/oracle.hpp"

using namespace impulse;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitIo = 4;

EnergyTable base_table() {
    if (const char* path = std::getenv("IMPULSE_ENERGY_TABLE")) {
        return load_energy_table(path);
    }
    return default_table();
}

int cmd_run(const std::string& model_path, const std::string& train_path,
            const std::string& out_path, const std::string& vmem_path,
            const std::string& report_path, const std::string& trace_path,
            bool oracle_check, bool serial, bool strict) {
    NetworkModel model = load_model(model_path);
    std::vector<LayerSpec> layers = model.layers;
    RunOptions opts;
    opts.strict = strict || model.strict_mode;
    opts.parallel = !serial;
    opts.record_vmem = !vmem_path.empty();
    Engine engine(layers, opts);
    SpikeTrain input =
        load_spike_train(train_path, model.timesteps, engine.input_width());
    InferenceResult res = engine.run_inference(input);

    if (oracle_check) {
        oracle::RefNetwork net(layers);
        oracle::RefResult ref = oracle::run(net, input);
        std::vector<std::vector<int>> final_v;
        for (size_t l = 0; l < layers.size(); ++l) {
            final_v.push_back(engine.read_potentials(static_cast<int>(l)));
        }
        if (auto div = oracle::compare(res.output, final_v, ref)) {
            std::fprintf(stderr,
                         "oracle divergence at t=%d layer=%d neuron=%d: %s\n",
                         div->t, div->layer, div->neuron, div->what.c_str());
            return 1;
        }
        std::printf("oracle check: ok\n");
    }

    if (!out_path.empty()) write_file(out_path, spike_train_tsv(res.output));
    if (!vmem_path.empty()) write_file(vmem_path, v_trace_csv(res.v_trace));

    EnergyTable table = model.energy_override ? *model.energy_override : base_table();
    CostReport cost = account(res.trace, table);
    if (!report_path.empty()) write_file(report_path, cost_report_csv(cost));
    if (!trace_path.empty()) write_file(trace_path, spike_trace_tsv(res.spike_trace));

    SparsityTable sparsity = compute_sparsity(res.stats);
    long long spikes_out = 0;
    for (const auto& frame : res.output.frames) {
        for (auto s : frame) spikes_out += s;
    }
    std::printf("timesteps:        %d\n", input.timesteps);
    std::printf("layers:           %zu\n", layers.size());
    std::printf("output spikes:    %lld\n", spikes_out);
    std::printf("input sparsity:   %.4f\n", sparsity.rows.empty()
                                                ? 0.0
                                                : sparsity.overall);
    for (int k = 0; k < 6; ++k) {
        auto kind = static_cast<InstrKind>(k);
        std::printf("%-10s        %lld\n", to_string(kind),
                    res.stats.instr_counts[k]);
    }
    std::printf("overflow events:  %lld\n", res.stats.overflow_events);
    std::printf("energy:           %.3f pJ\n", cost.total_energy_pj);
    std::printf("delay:            %.1f ns\n", cost.total_delay_ns);
    std::printf("EDP:              %.3f pJ*ns\n", cost.edp_pj_ns);
    if (cost.total_energy_pj > 0) {
        std::printf("efficiency:       %.3f TOPS/W\n", cost.tops_per_w);
    }
    return 0;
}

int cmd_sweep(const std::vector<double>& grid, double at, bool has_at,
              const std::string& out_path) {
    EnergyTable table = base_table();
    std::vector<double> points = grid;
    if (has_at) {
        points = {0.0, at};
    } else if (points.empty()) {
        points = {0.0, 0.25, 0.5, 0.75, 0.85, 1.0};
    }
    auto sweep = edp_sweep(points, table);
    if (has_at) {
        std::printf("EDP reduction at sparsity %.2f: %.2f%%\n", at,
                    sweep.back().reduction_pct);
    } else {
        std::printf("%-10s %-14s %s\n", "sparsity", "EDP (pJ*ns)", "reduction");
        for (const auto& p : sweep) {
            std::printf("%-10.2f %-14.3f %.2f%%\n", p.sparsity, p.edp_pj_ns,
                        p.reduction_pct);
        }
    }
    if (!out_path.empty()) write_file(out_path, sweep_csv(sweep));
    return 0;
}

int cmd_map(const std::string& model_path) {
    NetworkModel model = load_model(model_path);
    std::vector<MappedLayerPlan> plans;
    for (const auto& layer : model.layers) plans.push_back(map_layer(layer));
    std::fputs(mapping_report(plans).c_str(), stdout);
    return 0;
}

// Exhaustive adder and comparator checks, same contracts the test suite
// enforces, runnable in the field.
int cmd_selftest();

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bit-accurate simulator for a fused weight/V-membrane CIM macro"};
    app.require_subcommand(1);

    std::string model_path, train_path, out_path, vmem_path, report_path, trace_path;
    bool oracle_check = false, serial = false, strict = false;
    auto* run = app.add_subcommand("run", "run spiking inference on a model");
    run->add_option("model", model_path, "network model JSON")->required();
    run->add_option("spikes", train_path, "input spike train TSV")->required();
    run->add_option("-o,--output", out_path, "write output spike train TSV");
    run->add_option("--vmem-trace", vmem_path, "write membrane-potential trace CSV");
    run->add_option("--report", report_path, "write energy report CSV");
    run->add_option("--trace", trace_path, "write all-layer spike trace TSV");
    run->add_flag("--oracle-check", oracle_check,
                  "verify against the integer reference model");
    run->add_flag("--serial", serial, "disable multi-macro parallelism");
    run->add_flag("--strict", strict, "enable strict sequencing checks");

    std::vector<double> grid;
    double at = 0.85;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "energy-delay-product sparsity sweep");
    sweep->add_option("--grid", grid, "sparsity points in [0,1]")->delimiter(',');
    auto* at_opt = sweep->add_option("--at", at, "report reduction at one sparsity");
    sweep->add_option("-o,--output", sweep_out, "write sweep CSV");

    std::string map_model;
    auto* map = app.add_subcommand("map", "show how a model maps onto macros");
    map->add_option("model", map_model, "network model JSON")->required();

    auto* selftest = app.add_subcommand("selftest", "exhaustive datapath checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(model_path, train_path, out_path, vmem_path, report_path,
                           trace_path, oracle_check, serial, strict);
        }
        if (sweep->parsed()) {
            return cmd_sweep(grid, at, at_opt->count() > 0, sweep_out);
        }
        if (map->parsed()) return cmd_map(map_model);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return kExitCapacity;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return kExitIo;
    } catch (const SimError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

namespace {

int cmd_selftest() {
    // Adder: every (V, w) pair through the bit-serial datapath.
    long long add_bad = 0;
    for (int v = -1024; v <= 1023; ++v) {
        for (int w = -32; w <= 31; ++w) {
            MacroState st;
            ReservedRows rr;
            st.v_row_parity[rr.thr_odd] = Parity::Odd;
            st.v_row_parity[6] = Parity::Odd;
            write_slot(st, 6, SlotLayout{Parity::Odd, 0}, v);
            write_weight(st, 0, SlotLayout{Parity::Odd, 0}.weight_group(), w);
            Executor ex(st);
            ex.exec_accw2v(0, Parity::Odd, 6, 6);
            if (read_slot(st, 6, SlotLayout{Parity::Odd, 0}) != wrap_v(v + w)) {
                ++add_bad;
            }
        }
    }
    std::printf("adder:      %s (131072 cases, %lld bad)\n",
                add_bad ? "FAIL" : "ok", add_bad);

    // Comparator: V in [-1024, 1023], theta in [1, 512], in-contract only.
    long long cmp_bad = 0, cmp_cases = 0;
    for (int theta = 1; theta <= 512; ++theta) {
        for (int v = -1024; v <= 1023; ++v) {
            if (v - theta < -1024) continue;
            MacroState st;
            ReservedRows rr;
            st.v_row_parity[rr.thr_odd] = Parity::Odd;
            st.v_row_parity[6] = Parity::Odd;
            write_slot(st, 6, SlotLayout{Parity::Odd, 0}, v);
            write_slot(st, rr.thr_odd, SlotLayout{Parity::Odd, 0}, wrap_v(-theta));
            Executor ex(st);
            ++cmp_cases;
            if (ex.exec_spikecheck(6, rr.thr_odd, Parity::Odd)[0] != (v >= theta)) {
                ++cmp_bad;
            }
        }
    }
    std::printf("comparator: %s (%lld cases, %lld bad)\n", cmp_bad ? "FAIL" : "ok",
                cmp_cases, cmp_bad);
    return (add_bad || cmp_bad) ? 1 : 0;
}

}  // namespace
