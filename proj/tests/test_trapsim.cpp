#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bti/reference.hpp"
#include "bti/rng.hpp"
#include "bti/trapsim.hpp"

using namespace bti;

namespace {

TrapEnsemble single_trap(double tau_c, double tau_e, double eta) {
    TrapEnsemble e;
    Trap t;
    t.tau_c_ref_s = tau_c;
    t.tau_e_ref_s = tau_e;
    t.eta_v = eta;
    t.field_threshold_mvcm = 0.0;
    e.traps.push_back(t);
    return e;
}

BiasSegment seg(Phase phase, double duration, double v) { return {duration, v, phase}; }

}

TEST_CASE("trap and ensemble validation") {
    Trap t;
    CHECK_NOTHROW(validate(t));
    SUBCASE("time constants must be positive") {
        t.tau_c_ref_s = 0.0;
        CHECK_THROWS_AS(validate(t), domain_error);
    }
    SUBCASE("eta must be non-negative") {
        t.eta_v = -0.1;
        CHECK_THROWS_AS(validate(t), domain_error);
    }
    SUBCASE("activation energies must be non-negative") {
        t.ea_emission_ev = -0.2;
        CHECK_THROWS_AS(validate(t), domain_error);
    }
    SUBCASE("ensemble errors name the offending trap") {
        TrapEnsemble e = single_trap(1.0, 1.0, 0.1);
        e.traps.push_back(Trap{});
        e.traps.push_back(Trap{});
        e.traps[2].tau_e_ref_s = -1.0;
        try {
            validate(e);
            FAIL("expected a domain_error");
        } catch (const domain_error& err) {
            CHECK(std::string(err.what()).find("trap 2:") != std::string::npos);
        }
    }
    SUBCASE("empty ensembles are rejected") {
        CHECK_THROWS_AS(validate(TrapEnsemble{}), domain_error);
    }
}

TEST_CASE("ensemble generation is a pure function of spec and seed") {
    EnsembleGenSpec spec;
    spec.n_traps = 16;
    spec.tau_c_min_s = 1e-2;
    spec.tau_c_max_s = 1e2;
    spec.tau_e_min_s = 1e-1;
    spec.tau_e_max_s = 1e1;
    spec.total_eta_v = 0.32;
    spec.field_threshold_min_mvcm = 1.0;
    spec.field_threshold_max_mvcm = 3.0;
    spec.ea_capture_ev = 0.15;
    spec.ea_emission_ev = 0.2;
    spec.reference_temperature_k = 333.0;
    spec.reference_field_mvcm = -1.0;

    const TrapEnsemble e1 = gen_ensemble(spec, 99);
    const TrapEnsemble e2 = gen_ensemble(spec, 99);
    const TrapEnsemble e3 = gen_ensemble(spec, 100);

    REQUIRE(e1.traps.size() == 16);
    CHECK(e1.seed == 99);
    CHECK(e1.reference_temperature_k == 333.0);
    CHECK(e1.reference_field_mvcm == -1.0);

    bool any_diff = false;
    for (std::size_t i = 0; i < e1.traps.size(); ++i) {
        CHECK(e1.traps[i].tau_c_ref_s == e2.traps[i].tau_c_ref_s);
        CHECK(e1.traps[i].tau_e_ref_s == e2.traps[i].tau_e_ref_s);
        CHECK(e1.traps[i].field_threshold_mvcm == e2.traps[i].field_threshold_mvcm);
        any_diff = any_diff || e1.traps[i].tau_c_ref_s != e3.traps[i].tau_c_ref_s;

        CHECK(e1.traps[i].eta_v == 0.32 / 16);
        CHECK(e1.traps[i].ea_capture_ev == 0.15);
        CHECK(e1.traps[i].ea_emission_ev == 0.2);
        CHECK(e1.traps[i].tau_c_ref_s >= 1e-2);
        CHECK(e1.traps[i].tau_c_ref_s <= 1e2);
        CHECK(e1.traps[i].tau_e_ref_s >= 1e-1);
        CHECK(e1.traps[i].tau_e_ref_s <= 1e1);
        CHECK(e1.traps[i].field_threshold_mvcm >= 1.0);
        CHECK(e1.traps[i].field_threshold_mvcm <= 3.0);
    }
    CHECK(any_diff);

    SUBCASE("documented counter layout: 4i, 4i+1, 4i+2") {
        const CounterRng rng{99};
        for (std::size_t i : {std::size_t{0}, std::size_t{5}, std::size_t{15}}) {
            const std::uint64_t base = 4 * static_cast<std::uint64_t>(i);
            CHECK(e1.traps[i].tau_c_ref_s == rng.log_uniform(base + 0, 1e-2, 1e2));
            CHECK(e1.traps[i].tau_e_ref_s == rng.log_uniform(base + 1, 1e-1, 1e1));
            CHECK(e1.traps[i].field_threshold_mvcm == rng.uniform(base + 2, 1.0, 3.0));
        }
    }
    SUBCASE("degenerate ranges collapse to the lower bound") {
        spec.tau_c_min_s = spec.tau_c_max_s = 5.0;
        const TrapEnsemble e = gen_ensemble(spec, 7);
        for (const Trap& t : e.traps) CHECK(t.tau_c_ref_s == 5.0);
    }
    SUBCASE("invalid recipes are rejected") {
        EnsembleGenSpec bad = spec;
        bad.n_traps = 0;
        CHECK_THROWS_AS(gen_ensemble(bad, 1), domain_error);
        bad = spec;
        bad.tau_c_min_s = 2.0;
        bad.tau_c_max_s = 1.0;
        CHECK_THROWS_AS(gen_ensemble(bad, 1), domain_error);
        bad = spec;
        bad.field_threshold_min_mvcm = -1.0;
        CHECK_THROWS_AS(gen_ensemble(bad, 1), domain_error);
    }
}

TEST_CASE("effective rates per phase") {
    Trap t;
    t.tau_c_ref_s = 2.0;
    t.tau_e_ref_s = 3.0;
    t.ea_capture_ev = 0.1;
    t.ea_emission_ev = 0.1;
    t.field_threshold_mvcm = 4.5;

    SUBCASE("stress above threshold captures, never emits") {
        const RatePair r = effective_rates(t, Phase::Stress, -5.0, 298.0, 298.0);
        CHECK(r.tau_c_s == 2.0);
        CHECK(std::isinf(r.tau_e_s));
    }
    SUBCASE("the threshold compares field magnitude, inclusively") {
        CHECK(effective_rates(t, Phase::Stress, 4.5, 298.0, 298.0).tau_c_s == 2.0);
        CHECK(effective_rates(t, Phase::Stress, -4.5, 298.0, 298.0).tau_c_s == 2.0);
    }
    SUBCASE("stress below threshold freezes the trap") {
        const RatePair r = effective_rates(t, Phase::Stress, -4.0, 298.0, 298.0);
        CHECK(std::isinf(r.tau_c_s));
        CHECK(std::isinf(r.tau_e_s));
    }
    SUBCASE("relax emits, never captures") {
        const RatePair r = effective_rates(t, Phase::Relax, 0.0, 298.0, 298.0);
        CHECK(std::isinf(r.tau_c_s));
        CHECK(r.tau_e_s == 3.0);
    }
    SUBCASE("reads freeze both transitions") {
        const RatePair r = effective_rates(t, Phase::Read, -5.0, 298.0, 298.0);
        CHECK(std::isinf(r.tau_c_s));
        CHECK(std::isinf(r.tau_e_s));
    }
    SUBCASE("matching temperatures leave the constants bit-identical") {
        CHECK(effective_rates(t, Phase::Stress, -5.0, 351.5, 351.5).tau_c_s == 2.0);
    }
    SUBCASE("zero activation energy removes the temperature dependence") {
        t.ea_capture_ev = 0.0;
        CHECK(effective_rates(t, Phase::Stress, -5.0, 398.0, 298.0).tau_c_s == 2.0);
    }
    SUBCASE("Arrhenius scaling toward higher temperature shortens tau") {
        // exp((0.1 eV / k_B)(1/398 - 1/298)) with tau_ref = 1.
        t.tau_c_ref_s = 1.0;
        const RatePair r = effective_rates(t, Phase::Stress, -5.0, 398.0, 298.0);
        CHECK(r.tau_c_s == doctest::Approx(0.3759024702549864).epsilon(1e-13));
    }
    SUBCASE("temperature must be positive") {
        CHECK_THROWS_AS(effective_rates(t, Phase::Stress, -5.0, 0.0, 298.0), domain_error);
    }
}

TEST_CASE("segment stepping follows the first-order solution") {
    const TrapEnsemble e = single_trap(1.0, 1.0, 0.1);
    const DeviceParams dev;  // v_t0 = -0.3, eot = 2.13
    OccupancyState st = init_state(e);
    REQUIRE(st.p.size() == 1);
    CHECK(st.p[0] == 0.0);

    // One capture time constant of stress: p = 1 - e^-1.
    st = step_segment(st, e, seg(Phase::Stress, 1.0, -1.2), dev, 298.0);
    CHECK(st.p[0] == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(st.t_wall_s == 1.0);
    CHECK(st.t_cum_stress_s == 1.0);

    // Two emission constants of relax: p decays by e^-2; no stress time.
    const double before_relax = st.p[0];
    st = step_segment(st, e, seg(Phase::Relax, 2.0, 0.0), dev, 298.0);
    CHECK(st.p[0] == doctest::Approx(before_relax * std::exp(-2.0)).epsilon(1e-15));
    CHECK(st.t_wall_s == 3.0);
    CHECK(st.t_cum_stress_s == 1.0);

    // Reads advance the wall clock only and leave occupancy bit-identical.
    const double before_read = st.p[0];
    st = step_segment(st, e, seg(Phase::Read, 0.5, -0.1), dev, 298.0);
    CHECK(st.p[0] == before_read);
    CHECK(st.t_wall_s == 3.5);
    CHECK(st.t_cum_stress_s == 1.0);

    SUBCASE("zero-duration segments are no-ops") {
        const OccupancyState same = step_segment(st, e, seg(Phase::Stress, 0.0, -1.2), dev, 298.0);
        CHECK(same.p[0] == st.p[0]);
        CHECK(same.t_wall_s == st.t_wall_s);
    }
    SUBCASE("temperature accelerates capture through Arrhenius") {
        OccupancyState hot = init_state(e);
        hot = step_segment(hot, e, seg(Phase::Stress, 1.0, -1.2), dev, 398.0);
        CHECK(hot.p[0] ==
              doctest::Approx(1.0 - std::exp(-1.0 / 0.3759024702549864)).epsilon(1e-12));
    }
    SUBCASE("occupancy saturates inside [0, 1]") {
        OccupancyState s2 = init_state(e);
        s2 = step_segment(s2, e, seg(Phase::Stress, 1e9, -1.2), dev, 298.0);
        CHECK(s2.p[0] <= 1.0);
        CHECK(s2.p[0] == doctest::Approx(1.0).epsilon(1e-12));
        s2 = step_segment(s2, e, seg(Phase::Relax, 1e9, 0.0), dev, 298.0);
        CHECK(s2.p[0] >= 0.0);
        CHECK(s2.p[0] == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("single-trap dc trace matches the closed form") {
    const TrapEnsemble e = single_trap(1.0, 1.0, 0.1);
    const DeviceParams dev;

    DcStressSpec spec;
    spec.v_stress_v = -1.2;
    spec.v_read_v = -0.1;
    spec.stress_duration_s = 10.0;
    spec.relax_duration_s = 0.0;
    spec.sample_grid = LogGrid{1e-3, 10.0, 3};
    const Waveform wf = build_dc_waveform(spec);

    const DegradationTrace tr = simulate(e, wf, dev, 298.0, spec.sample_grid);
    REQUIRE(tr.samples.size() > 2);
    CHECK(tr.samples.front().t_wall_s == 0.0);
    CHECK(tr.samples.front().delta_vt_v == 0.0);
    for (const TraceSample& s : tr.samples) {
        if (s.t_cum_stress_s == 0.0) continue;
        const double expect = -0.1 * -std::expm1(-s.t_cum_stress_s);
        CHECK(s.delta_vt_v == doctest::Approx(expect).epsilon(1e-12));
        CHECK(s.phase == Phase::Stress);
    }
    CHECK(tr.samples.back().t_cum_stress_s == 10.0);

    SUBCASE("trace metadata names the run") {
        CHECK(tr.meta_double("temperature_k") == 298.0);
        CHECK(tr.meta_double("n_traps") == 1.0);
        CHECK(tr.meta_double("reference_temperature_k") == 298.0);
        CHECK(tr.meta_str("waveform") != nullptr);
    }
}

TEST_CASE("analytic cycle composition matches the expanded reference") {
    EnsembleGenSpec gs;
    gs.n_traps = 30;
    gs.tau_c_min_s = 1e-3;
    gs.tau_c_max_s = 10.0;
    gs.tau_e_min_s = 1e-3;
    gs.tau_e_max_s = 10.0;
    gs.total_eta_v = 0.3;
    const TrapEnsemble e = gen_ensemble(gs, 4242);
    const DeviceParams dev;

    AcStressSpec spec;
    spec.v_stress_v = -1.2;
    spec.v_relax_v = 0.0;
    spec.frequency_hz = 1e3;
    spec.duty = 0.5;
    spec.target_cumulative_stress_s = 0.5;  // 1000 cycles
    spec.sample_grid = LogGrid{1e-3, 0.5, 3};

    for (AcPattern pat : {AcPattern::RelaxStressMeasure, AcPattern::StressRelaxMeasure}) {
        CAPTURE(to_string(pat));
        spec.pattern = pat;
        const Waveform wf = build_ac_waveform(spec);
        const DegradationTrace fast = simulate(e, wf, dev, 298.0, spec.sample_grid);
        const DegradationTrace ref =
            reference::simulate_expanded(e, wf, dev, 298.0, spec.sample_grid);
        REQUIRE(fast.samples.size() == ref.samples.size());
        for (std::size_t i = 0; i < fast.samples.size(); ++i) {
            CHECK(fast.samples[i].t_wall_s ==
                  doctest::Approx(ref.samples[i].t_wall_s).epsilon(1e-12));
            const double a = fast.samples[i].delta_vt_v;
            const double b = ref.samples[i].delta_vt_v;
            CHECK(std::fabs(a - b) <= 1e-12 * std::max(std::fabs(b), 1e-15));
        }
    }
}

TEST_CASE("rk4 reference integrator converges to the analytic solution") {
    const TrapEnsemble e = single_trap(1.0, 1.0, 0.1);
    const DeviceParams dev;

    DcStressSpec spec;
    spec.v_stress_v = -1.2;
    spec.v_read_v = -0.1;
    spec.stress_duration_s = 2.0;
    spec.sample_grid = LogGrid{0.1, 2.0, 2};
    const Waveform wf = build_dc_waveform(spec);

    const DegradationTrace rk4 =
        reference::simulate_rk4(e, wf, dev, 298.0, spec.sample_grid, 1e-3);
    for (const TraceSample& s : rk4.samples) {
        if (s.t_cum_stress_s == 0.0) continue;
        const double expect = -0.1 * -std::expm1(-s.t_cum_stress_s);
        CHECK(s.delta_vt_v == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("trace-level physical properties") {
    EnsembleGenSpec gs;
    gs.n_traps = 40;
    gs.tau_c_min_s = 1e-2;
    gs.tau_c_max_s = 1e2;
    gs.tau_e_min_s = 1e-1;
    gs.tau_e_max_s = 10.0;
    gs.total_eta_v = 0.25;
    gs.field_threshold_min_mvcm = 0.0;
    gs.field_threshold_max_mvcm = 6.0;  // some traps never see enough field
    const TrapEnsemble e = gen_ensemble(gs, 31337);
    const DeviceParams dev;

    DcStressSpec spec;
    spec.v_stress_v = -1.2;
    spec.v_read_v = -0.1;
    spec.stress_duration_s = 50.0;
    spec.relax_duration_s = 10.0;
    spec.sample_grid = LogGrid{1e-2, 50.0, 4};
    const Waveform wf = build_dc_waveform(spec);
    const DegradationTrace tr = simulate(e, wf, dev, 298.0, spec.sample_grid);

    const double bound = e.total_eta_v() * (1.0 + 1e-12);
    double prev_stress_mag = -1.0, prev_relax_mag = 2.0;
    std::size_t relax_rows = 0;
    for (const TraceSample& s : tr.samples) {
        CHECK(s.delta_vt_v <= 0.0);          // NBTI shifts are negative
        CHECK(std::fabs(s.delta_vt_v) <= bound);
        if (s.phase == Phase::Stress) {
            CHECK(std::fabs(s.delta_vt_v) >= prev_stress_mag - 1e-15);
            prev_stress_mag = std::fabs(s.delta_vt_v);
        } else if (s.phase == Phase::Relax) {
            CHECK(std::fabs(s.delta_vt_v) <= prev_relax_mag * (1.0 + 1e-12));
            prev_relax_mag = std::fabs(s.delta_vt_v);
            ++relax_rows;
        }
    }
    CHECK(relax_rows > 0);
}

TEST_CASE("thread count never changes the trace") {
    EnsembleGenSpec gs;
    gs.n_traps = 201;  // odd count exercises uneven partitioning
    gs.tau_c_min_s = 1e-4;
    gs.tau_c_max_s = 1.0;
    gs.tau_e_min_s = 1e-4;
    gs.tau_e_max_s = 1.0;
    gs.total_eta_v = 0.3;
    const TrapEnsemble e = gen_ensemble(gs, 555);
    const DeviceParams dev;

    AcStressSpec spec;
    spec.v_stress_v = -1.1;
    spec.v_relax_v = 0.0;
    spec.frequency_hz = 1e5;
    spec.duty = 0.25;
    spec.target_cumulative_stress_s = 1.0;
    spec.sample_grid = LogGrid{1e-3, 1.0, 4};
    const Waveform wf = build_ac_waveform(spec);

    const DegradationTrace serial = simulate(e, wf, dev, 353.0, spec.sample_grid, SimOptions{1});
    for (int threads : {2, 4, 8}) {
        const DegradationTrace par =
            simulate(e, wf, dev, 353.0, spec.sample_grid, SimOptions{threads});
        REQUIRE(par.samples.size() == serial.samples.size());
        for (std::size_t i = 0; i < serial.samples.size(); ++i) {
            CHECK(par.samples[i].delta_vt_v == serial.samples[i].delta_vt_v);
            CHECK(par.samples[i].t_wall_s == serial.samples[i].t_wall_s);
        }
    }
}

TEST_CASE("simulate edge cases") {
    const TrapEnsemble e = single_trap(1.0, 1.0, 0.1);
    const DeviceParams dev;

    SUBCASE("an empty waveform yields the single t = 0 row") {
        const DegradationTrace tr = simulate(e, Waveform{}, dev, 298.0, LogGrid{});
        REQUIRE(tr.samples.size() == 1);
        CHECK(tr.samples[0].t_wall_s == 0.0);
        CHECK(tr.samples[0].delta_vt_v == 0.0);
        CHECK(tr.meta_double("n_traps") == 1.0);
    }
    SUBCASE("a grid beyond the waveform is rejected") {
        DcStressSpec spec;
        spec.v_stress_v = -1.2;
        spec.v_read_v = -0.1;
        spec.stress_duration_s = 10.0;
        spec.sample_grid = LogGrid{1e-3, 10.0, 3};
        const Waveform wf = build_dc_waveform(spec);
        CHECK_THROWS_AS(simulate(e, wf, dev, 298.0, LogGrid{1e-3, 20.0, 3}), domain_error);
    }
    SUBCASE("temperature must be positive") {
        CHECK_THROWS_AS(simulate(e, Waveform{}, dev, -1.0, LogGrid{}), domain_error);
    }
}

TEST_CASE("pairwise summation") {
    SUBCASE("integers sum exactly") {
        for (std::size_t n : {std::size_t{1}, std::size_t{7}, std::size_t{8}, std::size_t{9},
                              std::size_t{64}, std::size_t{1000}}) {
            std::vector<double> ones(n, 1.0);
            CHECK(pairwise_sum(ones.data(), n) == static_cast<double>(n));
        }
        CHECK(pairwise_sum(nullptr, 0) == 0.0);
    }
    SUBCASE("close to a high-precision accumulation on random data") {
        const CounterRng rng{2718};
        std::vector<double> v(777);
        long double exact = 0.0L;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = rng.uniform(i, -1.0, 1.0);
            exact += static_cast<long double>(v[i]);
        }
        const double got = pairwise_sum(v.data(), v.size());
        CHECK(std::fabs(got - static_cast<double>(exact)) <= 1e-12);
    }
}
