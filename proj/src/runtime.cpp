#include "impulse/runtime.hpp"

#include <algorithm>
#include <sstream>

#ifdef IMPULSE_HAVE_OPENMP
#include <omp.h>
#endif

namespace impulse {

struct Engine::MacroInstance {
    MacroState state;
    Executor exec;
    // Saved context potentials for time-multiplexed Conv batches,
    // indexed [output position][weight group].
    std::vector<std::array<int, 12>> v_backing;

    explicit MacroInstance(bool strict) : exec(state, strict) {}
};

struct Engine::LayerRuntime {
    const MappedLayerPlan* plan;
    std::vector<std::unique_ptr<MacroInstance>> macros;
};

void Engine::init_macro(MacroInstance& m, const MacroAllocation& a,
                        const LayerSpec& spec) {
    MacroState& st = m.state;
    st = MacroState{};
    for (int r = 0; r < MacroGeometry::w_rows; ++r) st.w_mem[r] = a.w_image[r];

    st.v_row_parity[a.reserved.thr_odd] = Parity::Odd;
    st.v_row_parity[a.reserved.thr_even] = Parity::Even;
    st.v_row_parity[a.reserved.leak_odd] = Parity::Odd;
    st.v_row_parity[a.reserved.leak_even] = Parity::Even;
    st.v_row_parity[a.reserved.reset_odd] = Parity::Odd;
    st.v_row_parity[a.reserved.reset_even] = Parity::Even;
    for (auto [odd_row, even_row] : a.v_contexts) {
        st.v_row_parity[odd_row] = Parity::Odd;
        st.v_row_parity[even_row] = Parity::Even;
    }

    const NeuronModel& n = spec.neuron;
    for (Parity p : {Parity::Odd, Parity::Even}) {
        for (int j = 0; j < 6; ++j) {
            SlotLayout layout{p, j};
            write_slot(st, a.reserved.thr(p), layout, wrap_v(-n.threshold));
            write_slot(st, a.reserved.leak(p), layout, wrap_v(-n.leak));
            write_slot(st, a.reserved.reset(p), layout, n.v_reset);
        }
    }
}

Engine::Engine(std::vector<LayerSpec> layers, RunOptions opts) : opts_(opts) {
    if (layers.empty()) throw ValidationError("network has no layers");
    for (auto& l : layers) plans_.push_back(map_layer(l));
    for (auto& plan : plans_) {
        auto lr = std::make_unique<LayerRuntime>();
        lr->plan = &plan;
        for (const MacroAllocation& a : plan.allocations) {
            auto m = std::make_unique<MacroInstance>(opts_.strict);
            init_macro(*m, a, plan.spec);
            if (plan.schedule.batches.size() > 1) {
                m->v_backing.assign(
                    plan.spec.out_h() * plan.spec.out_w(),
                    std::array<int, 12>{});
            }
            lr->macros.push_back(std::move(m));
        }
        layers_.push_back(std::move(lr));
    }
    for (size_t l = 1; l < plans_.size(); ++l) {
        if (plans_[l].spec.input_size() != plans_[l - 1].spec.output_size()) {
            throw ValidationError("layer " + std::to_string(l + 1) + " input width " +
                                  std::to_string(plans_[l].spec.input_size()) +
                                  " does not match previous output width " +
                                  std::to_string(plans_[l - 1].spec.output_size()));
        }
    }
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

void Engine::reset() {
    for (auto& lr : layers_) {
        for (size_t i = 0; i < lr->macros.size(); ++i) {
            init_macro(*lr->macros[i], lr->plan->allocations[i], lr->plan->spec);
            lr->macros[i]->exec.clear_trace();
            if (!lr->macros[i]->v_backing.empty()) {
                std::fill(lr->macros[i]->v_backing.begin(),
                          lr->macros[i]->v_backing.end(), std::array<int, 12>{});
            }
        }
    }
}

int Engine::input_width() const { return plans_.front().spec.input_size(); }
int Engine::output_width() const { return plans_.back().spec.output_size(); }

std::vector<std::uint8_t> Engine::step_fc(LayerRuntime& lr,
                                          const std::vector<std::uint8_t>& in) {
    const MappedLayerPlan& plan = *lr.plan;
    std::vector<std::uint8_t> out(plan.spec.output_size(), 0);
    const int n_macros = static_cast<int>(lr.macros.size());

    // Accumulate phase: each macro only touches its own state.
#pragma omp parallel for schedule(dynamic) if (opts_.parallel)
    for (int mi = 0; mi < n_macros; ++mi) {
        const MacroAllocation& a = plan.allocations[mi];
        MacroInstance& m = *lr.macros[mi];
        auto [odd_row, even_row] = a.v_contexts[0];
        for (int i = 0; i < a.n_inputs; ++i) {
            if (!in[a.input_offset + i]) continue;
            m.exec.exec_accw2v(a.input_map[i], Parity::Odd, odd_row, odd_row);
            m.exec.exec_accw2v(a.input_map[i], Parity::Even, even_row, even_row);
        }
    }

    // Host-mediated partial-sum merge for input-tiled layers: donors
    // hand their per-timestep partials to the owner and restart at 0.
    for (int mi = 0; mi < n_macros; ++mi) {
        const MacroAllocation& a = plan.allocations[mi];
        if (a.partial_group < 0 || !a.is_owner) continue;
        MacroInstance& owner = *lr.macros[mi];
        auto [o_odd, o_even] = a.v_contexts[0];
        for (int di = 0; di < n_macros; ++di) {
            const MacroAllocation& d = plan.allocations[di];
            if (di == mi || d.partial_group != a.partial_group) continue;
            MacroInstance& donor = *lr.macros[di];
            auto [d_odd, d_even] = d.v_contexts[0];
            for (Parity p : {Parity::Odd, Parity::Even}) {
                int o_row = p == Parity::Odd ? o_odd : o_even;
                int d_row = p == Parity::Odd ? d_odd : d_even;
                donor.exec.host_read_row(d_row);
                owner.exec.host_read_row(o_row);
                for (int j = 0; j < 6; ++j) {
                    SlotLayout layout{p, j};
                    int sum = wrap_v(
                        static_cast<long long>(read_slot(owner.state, o_row, layout)) +
                        read_slot(donor.state, d_row, layout));
                    write_slot(owner.state, o_row, layout, sum);
                    write_slot(donor.state, d_row, layout, 0);
                }
                owner.exec.host_write_row(o_row, owner.state.v_mem[o_row]);
                donor.exec.host_write_row(d_row, donor.state.v_mem[d_row]);
            }
        }
    }

#pragma omp parallel for schedule(dynamic) if (opts_.parallel)
    for (int mi = 0; mi < n_macros; ++mi) {
        const MacroAllocation& a = plan.allocations[mi];
        if (!a.is_owner) continue;
        MacroInstance& m = *lr.macros[mi];
        auto spikes = m.exec.neuron_update(plan.spec.neuron, a.v_contexts[0], a.reserved);
        for (int g = 0; g < 12; ++g) {
            if (a.output_map[g] >= 0 && spikes[g]) out[a.output_map[g]] = 1;
        }
    }
    return out;
}

namespace {

// Flattened channel-major index (ch, y, x).
inline int plane_index(int ch, int y, int x, int h, int w) {
    return (ch * h + y) * w + x;
}

}  // namespace

std::vector<std::uint8_t> Engine::step_conv(LayerRuntime& lr,
                                            const std::vector<std::uint8_t>& in) {
    const MappedLayerPlan& plan = *lr.plan;
    const LayerSpec& s = plan.spec;
    std::vector<std::uint8_t> out(s.output_size(), 0);
    const int n_macros = static_cast<int>(lr.macros.size());
    const bool multiplexed = plan.schedule.batches.size() > 1;
    const int out_h = s.out_h(), out_w = s.out_w();

#pragma omp parallel for schedule(dynamic) if (opts_.parallel)
    for (int mi = 0; mi < n_macros; ++mi) {
        const MacroAllocation& a = plan.allocations[mi];
        MacroInstance& m = *lr.macros[mi];
        for (const PixelBatch& batch : plan.schedule.batches) {
            if (multiplexed) {
                // Swap the batch's potentials into the context rows.
                for (const auto& e : batch.entries) {
                    int pos = e.out_y * out_w + e.out_x;
                    auto [odd_row, even_row] = a.v_contexts[e.context];
                    for (int g = 0; g < 12; ++g) {
                        write_slot(m.state, g % 2 == 0 ? odd_row : even_row,
                                   slot_of_group(g), m.v_backing[pos][g]);
                    }
                    m.exec.host_write_row(odd_row, m.state.v_mem[odd_row]);
                    m.exec.host_write_row(even_row, m.state.v_mem[even_row]);
                }
            }
            for (const auto& e : batch.entries) {
                auto [odd_row, even_row] = a.v_contexts[e.context];
                for (int kr = 0; kr < s.kernel_h; ++kr) {
                    for (int kc = 0; kc < s.kernel_w; ++kc) {
                        for (int ch = 0; ch < s.in_channels; ++ch) {
                            int idx = plane_index(ch, e.out_y + kr, e.out_x + kc,
                                                  s.in_h, s.in_w);
                            if (!in[idx]) continue;
                            int w_row = (kr * s.kernel_w + kc) * s.in_channels + ch;
                            m.exec.exec_accw2v(w_row, Parity::Odd, odd_row, odd_row);
                            m.exec.exec_accw2v(w_row, Parity::Even, even_row, even_row);
                        }
                    }
                }
            }
            for (const auto& e : batch.entries) {
                auto spikes = m.exec.neuron_update(s.neuron, a.v_contexts[e.context],
                                                   a.reserved);
                for (int g = 0; g < 12; ++g) {
                    int oc = a.output_map[g];
                    if (oc >= 0 && spikes[g]) {
#pragma omp atomic write
                        out[plane_index(oc, e.out_y, e.out_x, out_h, out_w)] = 1;
                    }
                }
                if (multiplexed) {
                    int pos = e.out_y * out_w + e.out_x;
                    auto [odd_row, even_row] = a.v_contexts[e.context];
                    m.exec.host_read_row(odd_row);
                    m.exec.host_read_row(even_row);
                    for (int g = 0; g < 12; ++g) {
                        m.v_backing[pos][g] =
                            read_slot(m.state, g % 2 == 0 ? odd_row : even_row,
                                      slot_of_group(g));
                    }
                }
            }
        }
    }
    return out;
}

std::vector<std::uint8_t> Engine::step_layer(LayerRuntime& lr,
                                             const std::vector<std::uint8_t>& in) {
    if (static_cast<int>(in.size()) != lr.plan->spec.input_size()) {
        throw ValidationError("spike vector width " + std::to_string(in.size()) +
                              " does not match layer input " +
                              std::to_string(lr.plan->spec.input_size()));
    }
    return lr.plan->spec.kind == LayerSpec::Kind::FC ? step_fc(lr, in)
                                                     : step_conv(lr, in);
}

std::vector<std::uint8_t> Engine::run_timestep(const std::vector<std::uint8_t>& input) {
    std::vector<std::uint8_t> spikes = input;
    for (auto& lr : layers_) spikes = step_layer(*lr, spikes);
    return spikes;
}

std::vector<int> Engine::read_potentials(int layer) const {
    const LayerRuntime& lr = *layers_.at(layer);
    const MappedLayerPlan& plan = *lr.plan;
    std::vector<int> v(plan.spec.output_size(), 0);
    for (size_t mi = 0; mi < lr.macros.size(); ++mi) {
        const MacroAllocation& a = plan.allocations[mi];
        const MacroInstance& m = *lr.macros[mi];
        if (plan.spec.kind == LayerSpec::Kind::FC) {
            if (!a.is_owner) continue;
            auto [odd_row, even_row] = a.v_contexts[0];
            for (int g = 0; g < 12; ++g) {
                if (a.output_map[g] < 0) continue;
                v[a.output_map[g]] = read_slot(
                    m.state, g % 2 == 0 ? odd_row : even_row, slot_of_group(g));
            }
        } else {
            const int out_h = plan.spec.out_h(), out_w = plan.spec.out_w();
            const bool multiplexed = plan.schedule.batches.size() > 1;
            for (const PixelBatch& batch : plan.schedule.batches) {
                for (const auto& e : batch.entries) {
                    int pos = e.out_y * out_w + e.out_x;
                    auto [odd_row, even_row] = a.v_contexts[e.context];
                    for (int g = 0; g < 12; ++g) {
                        int oc = a.output_map[g];
                        if (oc < 0) continue;
                        int val = multiplexed
                                      ? m.v_backing[pos][g]
                                      : read_slot(m.state,
                                                  g % 2 == 0 ? odd_row : even_row,
                                                  slot_of_group(g));
                        v[plane_index(oc, e.out_y, e.out_x, out_h, out_w)] = val;
                    }
                }
            }
        }
    }
    return v;
}

InferenceResult Engine::run_inference(const SpikeTrain& input) {
    if (input.timesteps < 1 ||
        static_cast<int>(input.frames.size()) != input.timesteps) {
        throw ValidationError("spike train needs at least one timestep");
    }
    InferenceResult res;
    res.output.timesteps = input.timesteps;
    res.stats.widths.push_back(input_width());
    for (const auto& plan : plans_) res.stats.widths.push_back(plan.spec.output_size());
    res.stats.spike_counts.assign(layers_.size() + 1,
                                  std::vector<long long>(input.timesteps, 0));

    for (int t = 0; t < input.timesteps; ++t) {
        const auto& frame = input.frames[t];
        if (static_cast<int>(frame.size()) != input_width()) {
            throw ValidationError("input frame " + std::to_string(t) + " width " +
                                  std::to_string(frame.size()) + " != " +
                                  std::to_string(input_width()));
        }
        for (int n = 0; n < input_width(); ++n) {
            if (frame[n]) {
                res.spike_trace.push_back({t, 0, n});
                ++res.stats.spike_counts[0][t];
            }
        }
        std::vector<std::uint8_t> spikes = frame;
        for (size_t l = 0; l < layers_.size(); ++l) {
            spikes = step_layer(*layers_[l], spikes);
            int li = static_cast<int>(l) + 1;
            for (size_t n = 0; n < spikes.size(); ++n) {
                if (spikes[n]) {
                    res.spike_trace.push_back({t, li, static_cast<int>(n)});
                    ++res.stats.spike_counts[li][t];
                }
            }
            if (opts_.record_vmem) {
                std::vector<int> v = read_potentials(static_cast<int>(l));
                for (size_t n = 0; n < v.size(); ++n) {
                    res.v_trace.push_back({t, li, static_cast<int>(n), v[n]});
                }
            }
        }
        res.output.frames.push_back(std::move(spikes));
    }

    // Deterministic merge: traces ordered by layer then macro.
    for (auto& lr : layers_) {
        for (auto& m : lr->macros) {
            Trace tr = m->exec.take_trace();
            for (const TraceEvent& ev : tr) {
                ++res.stats.instr_counts[static_cast<int>(ev.kind)];
            }
            res.trace.insert(res.trace.end(), tr.begin(), tr.end());
            res.stats.overflow_events += m->state.overflow_events;
        }
    }
    return res;
}

SparsityTable compute_sparsity(const RunStats& stats) {
    SparsityTable table;
    long long total_spikes = 0, total_slots = 0;
    for (size_t l = 0; l < stats.spike_counts.size(); ++l) {
        int width = stats.widths[l];
        for (size_t t = 0; t < stats.spike_counts[l].size(); ++t) {
            long long n = stats.spike_counts[l][t];
            table.rows.push_back({static_cast<int>(l), static_cast<int>(t),
                                  1.0 - static_cast<double>(n) / width});
            total_spikes += n;
            total_slots += width;
        }
    }
    table.overall =
        total_slots ? 1.0 - static_cast<double>(total_spikes) / total_slots : 1.0;
    return table;
}

std::string spike_trace_tsv(const std::vector<SpikeEvent>& events) {
    std::ostringstream os;
    for (const SpikeEvent& e : events) {
        os << e.t << '\t' << e.layer << '\t' << e.neuron << '\n';
    }
    return os.str();
}

std::string v_trace_csv(const std::vector<VTraceEntry>& entries) {
    std::ostringstream os;
    os << "t,layer,neuron,v_value\n";
    for (const VTraceEntry& e : entries) {
        os << e.t << ',' << e.layer << ',' << e.neuron << ',' << e.value << '\n';
    }
    return os.str();
}

}  // namespace impulse
