#include "bti/trapsim.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bti/rng.hpp"

namespace bti {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw domain_error(what);
}

double arrhenius(double tau_ref, double ea_ev, double temperature_k, double reference_k) {
    if (temperature_k == reference_k || ea_ev == 0.0) return tau_ref;
    return tau_ref * std::exp(ea_ev / constants::kBoltzmannEvPerK *
                              (1.0 / temperature_k - 1.0 / reference_k));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// One constant-bias interval as an affine update p' = a*p + b. ln_a carries
// the exact exponent so long cycle runs can be composed without log(product)
// cancellation.
struct AffineStep {
    double a = 1.0;
    double b = 0.0;
    double ln_a = 0.0;
};

AffineStep segment_affine(const Trap& trap, const BiasSegment& seg, double xi_mvcm,
                          double temperature_k, double reference_k) {
    const RatePair rates = effective_rates(trap, seg.phase, xi_mvcm, temperature_k, reference_k);
    const double rc = std::isinf(rates.tau_c_s) ? 0.0 : 1.0 / rates.tau_c_s;
    const double re = std::isinf(rates.tau_e_s) ? 0.0 : 1.0 / rates.tau_e_s;
    const double r = rc + re;
    if (r == 0.0 || seg.duration_s == 0.0) return {};
    AffineStep st;
    const double x = seg.duration_s * r;
    st.ln_a = -x;
    st.a = std::exp(-x);
    const double p_inf = rc > 0.0 ? rc / r : 0.0;
    st.b = p_inf == 0.0 ? 0.0 : -p_inf * std::expm1(-x);
    return st;
}

// Per-element context shared across traps: cached field per segment.
struct SegCtx {
    const BiasSegment* seg;
    double xi;
};

struct ElementCtx {
    std::vector<SegCtx> segs;
    std::uint64_t repeats;
    bool sample;
};

// Advance one trap across one element (repeats >= 1 identical cycles).
double advance_trap(double p, const Trap& trap, const ElementCtx& el, double temperature_k,
                    double reference_k) {
    double a = 1.0, b = 0.0, ln_a = 0.0;
    for (const SegCtx& sc : el.segs) {
        const AffineStep st = segment_affine(trap, *sc.seg, sc.xi, temperature_k, reference_k);
        a = st.a * a;
        b = st.a * b + st.b;
        ln_a += st.ln_a;
    }
    if (el.repeats == 1) return a * p + b;
    if (ln_a == 0.0) return p;  // frozen cycle: a == 1 forces b == 0
    // Geometric fixed point of p' = a*p + b iterated `repeats` times.
    const double one_minus_a = -std::expm1(ln_a);
    const double p_star = b / one_minus_a;
    const double a_n = std::exp(static_cast<double>(el.repeats) * ln_a);
    return p_star + a_n * (p - p_star);
}

}

double TrapEnsemble::total_eta_v() const {
    double s = 0.0;
    for (const Trap& t : traps) s += t.eta_v;
    return s;
}

void validate(const Trap& t) {
    require(std::isfinite(t.tau_c_ref_s) && t.tau_c_ref_s > 0, "Trap: tau_c_ref_s must be > 0");
    require(std::isfinite(t.tau_e_ref_s) && t.tau_e_ref_s > 0, "Trap: tau_e_ref_s must be > 0");
    require(std::isfinite(t.eta_v) && t.eta_v >= 0, "Trap: eta_v must be >= 0");
    require(std::isfinite(t.ea_capture_ev) && t.ea_capture_ev >= 0,
            "Trap: ea_capture_ev must be >= 0");
    require(std::isfinite(t.ea_emission_ev) && t.ea_emission_ev >= 0,
            "Trap: ea_emission_ev must be >= 0");
    require(std::isfinite(t.field_threshold_mvcm) && t.field_threshold_mvcm >= 0,
            "Trap: field_threshold_mvcm must be >= 0");
}

void validate(const TrapEnsemble& e) {
    require(!e.traps.empty(), "TrapEnsemble: at least one trap required");
    require(std::isfinite(e.reference_temperature_k) && e.reference_temperature_k > 0,
            "TrapEnsemble: reference_temperature_k must be > 0");
    require(std::isfinite(e.reference_field_mvcm), "TrapEnsemble: reference_field_mvcm must be finite");
    for (std::size_t i = 0; i < e.traps.size(); ++i) {
        try {
            validate(e.traps[i]);
        } catch (const domain_error& err) {
            throw domain_error("trap " + std::to_string(i) + ": " + err.what());
        }
    }
}

TrapEnsemble gen_ensemble(const EnsembleGenSpec& spec, std::uint64_t seed) {
    require(spec.n_traps >= 1, "EnsembleGenSpec: n_traps must be >= 1");
    require(spec.tau_c_min_s > 0 && spec.tau_c_max_s >= spec.tau_c_min_s,
            "EnsembleGenSpec: tau_c range must satisfy 0 < min <= max");
    require(spec.tau_e_min_s > 0 && spec.tau_e_max_s >= spec.tau_e_min_s,
            "EnsembleGenSpec: tau_e range must satisfy 0 < min <= max");
    require(std::isfinite(spec.total_eta_v) && spec.total_eta_v >= 0,
            "EnsembleGenSpec: total_eta_v must be >= 0");
    require(spec.field_threshold_min_mvcm >= 0 &&
                spec.field_threshold_max_mvcm >= spec.field_threshold_min_mvcm,
            "EnsembleGenSpec: field threshold range must satisfy 0 <= min <= max");
    require(spec.reference_temperature_k > 0, "EnsembleGenSpec: reference_temperature_k must be > 0");

    const CounterRng rng{seed};
    TrapEnsemble out;
    out.seed = seed;
    out.reference_temperature_k = spec.reference_temperature_k;
    out.reference_field_mvcm = spec.reference_field_mvcm;
    out.traps.resize(static_cast<std::size_t>(spec.n_traps));
    const double eta = spec.total_eta_v / spec.n_traps;
    for (std::size_t i = 0; i < out.traps.size(); ++i) {
        Trap& t = out.traps[i];
        const std::uint64_t base = 4 * static_cast<std::uint64_t>(i);
        t.tau_c_ref_s = rng.log_uniform(base + 0, spec.tau_c_min_s, spec.tau_c_max_s);
        t.tau_e_ref_s = rng.log_uniform(base + 1, spec.tau_e_min_s, spec.tau_e_max_s);
        t.field_threshold_mvcm =
            rng.uniform(base + 2, spec.field_threshold_min_mvcm, spec.field_threshold_max_mvcm);
        t.eta_v = eta;
        t.ea_capture_ev = spec.ea_capture_ev;
        t.ea_emission_ev = spec.ea_emission_ev;
    }
    validate(out);
    return out;
}

RatePair effective_rates(const Trap& trap, Phase phase, double xi_mvcm, double temperature_k,
                         double reference_temperature_k) {
    require(std::isfinite(temperature_k) && temperature_k > 0,
            "effective_rates: temperature_k must be > 0");
    switch (phase) {
        case Phase::Stress:
            if (std::fabs(xi_mvcm) >= trap.field_threshold_mvcm)
                return {arrhenius(trap.tau_c_ref_s, trap.ea_capture_ev, temperature_k,
                                  reference_temperature_k),
                        kInf};
            return {kInf, kInf};
        case Phase::Relax:
            return {kInf, arrhenius(trap.tau_e_ref_s, trap.ea_emission_ev, temperature_k,
                                    reference_temperature_k)};
        case Phase::Read:
            return {kInf, kInf};
    }
    return {kInf, kInf};
}

OccupancyState init_state(const TrapEnsemble& e) {
    OccupancyState st;
    st.p.assign(e.traps.size(), 0.0);
    return st;
}

OccupancyState step_segment(const OccupancyState& state, const TrapEnsemble& e,
                            const BiasSegment& seg, const DeviceParams& device,
                            double temperature_k) {
    require(state.p.size() == e.traps.size(), "step_segment: state/ensemble size mismatch");
    require(std::isfinite(seg.duration_s) && seg.duration_s >= 0,
            "step_segment: segment duration must be >= 0");
    const double xi = normalized_field_mvcm(seg.v_gs_v, device.v_t0_v, device.eot_nm);
    OccupancyState out = state;
    for (std::size_t i = 0; i < e.traps.size(); ++i) {
        const RatePair rates =
            effective_rates(e.traps[i], seg.phase, xi, temperature_k, e.reference_temperature_k);
        const double rc = std::isinf(rates.tau_c_s) ? 0.0 : 1.0 / rates.tau_c_s;
        const double re = std::isinf(rates.tau_e_s) ? 0.0 : 1.0 / rates.tau_e_s;
        const double r = rc + re;
        if (r == 0.0 || seg.duration_s == 0.0) continue;
        const double p_inf = rc > 0.0 ? rc / r : 0.0;
        out.p[i] = p_inf + (state.p[i] - p_inf) * std::exp(-seg.duration_s * r);
    }
    out.t_wall_s = state.t_wall_s + seg.duration_s;
    out.t_cum_stress_s = state.t_cum_stress_s + (seg.phase == Phase::Stress ? seg.duration_s : 0.0);
    return out;
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

DegradationTrace simulate(const TrapEnsemble& ensemble, const Waveform& waveform,
                          const DeviceParams& device, double temperature_k, const LogGrid& grid,
                          const SimOptions& opt) {
    validate(ensemble);
    validate(device);
    require(std::isfinite(temperature_k) && temperature_k > 0,
            "simulate: temperature_k must be > 0");

    DegradationTrace trace;
    trace.meta["temperature_k"] = fmt(temperature_k);
    trace.meta["reference_temperature_k"] = fmt(ensemble.reference_temperature_k);
    trace.meta["n_traps"] = std::to_string(ensemble.traps.size());
    trace.meta["waveform"] = waveform.descriptor();
    if (waveform.duty()) trace.meta["duty"] = fmt(*waveform.duty());
    if (waveform.relax_start_wall_s())
        trace.meta["relax_start_wall_s"] = fmt(*waveform.relax_start_wall_s());
    trace.meta["read_pulse_width_s"] = fmt(waveform.read_pulse_width_s());

    const auto& els = waveform.elements();
    if (els.empty()) {
        trace.samples.push_back(TraceSample{0.0, 0.0, 0.0, Phase::Stress});
        return trace;
    }

    validate(grid);
    require(grid.t_max_s <= waveform.sample_axis_max_s() * (1.0 + 1e-9),
            "simulate: sample grid extends beyond the waveform");

    // Shared per-element context (field per segment).
    std::vector<ElementCtx> ctx(els.size());
    for (std::size_t j = 0; j < els.size(); ++j) {
        ctx[j].repeats = els[j].repeats;
        ctx[j].sample = els[j].sample;
        ctx[j].segs.reserve(els[j].cycle.size());
        for (const BiasSegment& seg : els[j].cycle)
            ctx[j].segs.push_back(
                {&seg, normalized_field_mvcm(seg.v_gs_v, device.v_t0_v, device.eot_nm)});
    }

    std::size_t n_rows = 0;
    for (const WaveformElement& el : els) n_rows += el.sample ? 1 : 0;
    const bool tail_row = !els.back().sample;
    if (tail_row) ++n_rows;

    const std::size_t n = ensemble.traps.size();
    std::vector<double> contrib(n_rows * n);

    int threads = opt.threads;
#ifdef _OPENMP
    if (threads <= 0) threads = omp_get_max_threads();
#else
    threads = 1;
#endif

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (long long ii = 0; ii < static_cast<long long>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const Trap& trap = ensemble.traps[i];
        double p = 0.0;
        std::size_t row = 0;
        for (std::size_t j = 0; j < ctx.size(); ++j) {
            if (ctx[j].sample) contrib[row++ * n + i] = trap.eta_v * p;
            p = advance_trap(p, trap, ctx[j], temperature_k, ensemble.reference_temperature_k);
        }
        if (tail_row) contrib[row * n + i] = trap.eta_v * p;
    }

    // Assemble rows: initial state, one per spot read, optional end-of-run.
    const Phase first_phase =
        els.front().cycle.empty() ? Phase::Stress : els.front().cycle.front().phase;
    trace.samples.push_back(TraceSample{0.0, 0.0, 0.0, first_phase});
    std::size_t row = 0;
    for (const WaveformElement& el : els) {
        if (!el.sample) continue;
        trace.samples.push_back(TraceSample{el.wall_start_s, el.stress_start_s,
                                            -pairwise_sum(&contrib[row * n], n), el.sample_phase});
        ++row;
    }
    if (tail_row) {
        const Phase last_phase = els.back().cycle.back().phase;
        trace.samples.push_back(TraceSample{waveform.total_wall_s(), waveform.total_stress_s(),
                                            -pairwise_sum(&contrib[row * n], n), last_phase});
    }
    validate(trace);
    return trace;
}

}
