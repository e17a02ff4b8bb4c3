#include "bti/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bti::reference {

namespace {

struct SegRates {
    double rc;
    double re;
    double duration_s;
    Phase phase;
};

// Flatten the element list into per-trap rate tables (field and temperature
// folded in once, reused each cycle).
std::vector<std::vector<SegRates>> rate_tables(const TrapEnsemble& e, const Waveform& w,
                                               const DeviceParams& device, double temperature_k) {
    std::vector<std::vector<SegRates>> tables(w.elements().size());
    for (std::size_t j = 0; j < w.elements().size(); ++j) {
        const WaveformElement& el = w.elements()[j];
        tables[j].reserve(el.cycle.size() * e.traps.size());
        for (const BiasSegment& seg : el.cycle) {
            const double xi = normalized_field_mvcm(seg.v_gs_v, device.v_t0_v, device.eot_nm);
            for (const Trap& trap : e.traps) {
                const RatePair rates =
                    effective_rates(trap, seg.phase, xi, temperature_k, e.reference_temperature_k);
                tables[j].push_back({std::isinf(rates.tau_c_s) ? 0.0 : 1.0 / rates.tau_c_s,
                                     std::isinf(rates.tau_e_s) ? 0.0 : 1.0 / rates.tau_e_s,
                                     seg.duration_s, seg.phase});
            }
        }
    }
    return tables;
}

template <class StepFn>
DegradationTrace run_expanded(const TrapEnsemble& ensemble, const Waveform& waveform,
                              const DeviceParams& device, double temperature_k,
                              const LogGrid& grid, std::uint64_t budget, const char* budget_what,
                              StepFn step) {
    validate(ensemble);
    validate(device);
    if (!(std::isfinite(temperature_k) && temperature_k > 0))
        throw domain_error("reference: temperature_k must be > 0");

    DegradationTrace trace;
    const auto& els = waveform.elements();
    if (els.empty()) {
        trace.samples.push_back(TraceSample{0.0, 0.0, 0.0, Phase::Stress});
        return trace;
    }
    validate(grid);
    if (grid.t_max_s > waveform.sample_axis_max_s() * (1.0 + 1e-9))
        throw domain_error("reference: sample grid extends beyond the waveform");

    const std::size_t n = ensemble.traps.size();
    const auto tables = rate_tables(ensemble, waveform, device, temperature_k);

    std::uint64_t spent = 0;
    std::vector<double> p(n, 0.0);
    const Phase first_phase =
        els.front().cycle.empty() ? Phase::Stress : els.front().cycle.front().phase;
    trace.samples.push_back(TraceSample{0.0, 0.0, 0.0, first_phase});

    auto readout = [&](double t_wall, double t_cum, Phase phase) {
        double dvt = 0.0;
        for (std::size_t i = 0; i < n; ++i) dvt += ensemble.traps[i].eta_v * p[i];
        trace.samples.push_back(TraceSample{t_wall, t_cum, -dvt, phase});
    };

    for (std::size_t j = 0; j < els.size(); ++j) {
        const WaveformElement& el = els[j];
        if (el.sample) readout(el.wall_start_s, el.stress_start_s, el.sample_phase);
        const std::size_t n_segs = el.cycle.size();
        for (std::uint64_t rep = 0; rep < el.repeats; ++rep) {
            for (std::size_t s = 0; s < n_segs; ++s) {
                for (std::size_t i = 0; i < n; ++i) {
                    const SegRates& sr = tables[j][s * n + i];
                    spent += step(p[i], sr);
                    if (spent > budget)
                        throw domain_error(std::string("reference: schedule exceeds ") +
                                           budget_what + " budget; use the fast simulator");
                }
            }
        }
    }
    if (!els.back().sample)
        readout(waveform.total_wall_s(), waveform.total_stress_s(), els.back().cycle.back().phase);
    validate(trace);
    return trace;
}

}

DegradationTrace simulate_expanded(const TrapEnsemble& ensemble, const Waveform& waveform,
                                   const DeviceParams& device, double temperature_k,
                                   const LogGrid& grid, std::uint64_t max_segments) {
    return run_expanded(ensemble, waveform, device, temperature_k, grid, max_segments, "segment",
                        [](double& p, const SegRates& sr) -> std::uint64_t {
                            const double r = sr.rc + sr.re;
                            if (r == 0.0 || sr.duration_s == 0.0) return 1;
                            const double p_inf = sr.rc > 0.0 ? sr.rc / r : 0.0;
                            p = p_inf + (p - p_inf) * std::exp(-sr.duration_s * r);
                            return 1;
                        });
}

DegradationTrace simulate_rk4(const TrapEnsemble& ensemble, const Waveform& waveform,
                              const DeviceParams& device, double temperature_k,
                              const LogGrid& grid, double step_fraction,
                              std::uint64_t max_steps) {
    if (!(step_fraction > 0 && step_fraction <= 1))
        throw domain_error("simulate_rk4: step_fraction must be in (0, 1]");
    return run_expanded(
        ensemble, waveform, device, temperature_k, grid, max_steps, "step",
        [step_fraction](double& p, const SegRates& sr) -> std::uint64_t {
            const double r = sr.rc + sr.re;
            if (r == 0.0 || sr.duration_s == 0.0) return 1;
            // dp/dt = rc - r * p, stepped at dt = tau_eff * step_fraction.
            const double dt_target = step_fraction / r;
            const auto n_steps = std::max<std::uint64_t>(
                1, static_cast<std::uint64_t>(std::ceil(sr.duration_s / dt_target - 1e-9)));
            const double dt = sr.duration_s / static_cast<double>(n_steps);
            auto f = [&](double y) { return sr.rc - r * y; };
            for (std::uint64_t k = 0; k < n_steps; ++k) {
                const double k1 = f(p);
                const double k2 = f(p + 0.5 * dt * k1);
                const double k3 = f(p + 0.5 * dt * k2);
                const double k4 = f(p + dt * k3);
                p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            return n_steps;
        });
}

}
