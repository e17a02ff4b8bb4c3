#include <doctest.h>

#include <cmath>
#include <vector>

#include "bti/analysis.hpp"
#include "bti/models.hpp"

using namespace bti;

namespace {

// Stress-only trace sampled from |dVt| = c * t^alpha at `ppd` points per
// decade over [t_lo, t_hi] (the wall clock just mirrors the stress clock).
DegradationTrace powerlaw_trace(double c, double alpha, double t_lo, double t_hi, int ppd) {
    DegradationTrace tr;
    tr.samples.push_back({0.0, 0.0, 0.0, Phase::Stress});
    for (double t : LogGrid{t_lo, t_hi, ppd}.times())
        tr.samples.push_back({t, t, -c * std::pow(t, alpha), Phase::Stress});
    return tr;
}

}

TEST_CASE("ttf projection inverts a power-law trace") {
    // |dVt| = 0.02 t^0.2 crosses 0.1 V at t = 5^5 = 3125 s.
    const DegradationTrace tr = powerlaw_trace(0.02, 0.2, 1.0, 1e4, 10);
    const TtfReport rep = ttf_project(tr, 0.1);
    REQUIRE(rep.ttf_cum_stress_s.has_value());
    CHECK(rep.crossing_method == "log-linear");
    CHECK(*rep.ttf_cum_stress_s == doctest::Approx(3125.0).epsilon(0.01));
    CHECK(!rep.ttf_wall_s.has_value());
    CHECK(!rep.reference_ttf_s.has_value());
    CHECK(rep.tolerance_v == 0.1);

    SUBCASE("ttf grows with the tolerance") {
        const TtfReport lower = ttf_project(tr, 0.05);
        REQUIRE(lower.ttf_cum_stress_s.has_value());
        CHECK(*lower.ttf_cum_stress_s < *rep.ttf_cum_stress_s);
    }
    SUBCASE("a tolerance below the first sample reports first-sample") {
        const TtfReport rep2 = ttf_project(tr, 0.015);
        REQUIRE(rep2.ttf_cum_stress_s.has_value());
        CHECK(rep2.crossing_method == "first-sample");
        CHECK(*rep2.ttf_cum_stress_s == 1.0);
    }
    SUBCASE("a tolerance beyond the trace reports not-reached") {
        const TtfReport rep2 = ttf_project(tr, 1.0);
        CHECK(!rep2.ttf_cum_stress_s.has_value());
        CHECK(rep2.crossing_method == "not-reached");
    }
    SUBCASE("relax rows and zero-stress rows never count") {
        DegradationTrace noisy = tr;
        noisy.samples.insert(noisy.samples.begin(), {0.0, 0.0, -0.5, Phase::Stress});
        noisy.samples.push_back({2e4, 1e4, -0.9, Phase::Relax});
        const TtfReport rep2 = ttf_project(noisy, 0.1);
        REQUIRE(rep2.ttf_cum_stress_s.has_value());
        CHECK(*rep2.ttf_cum_stress_s == *rep.ttf_cum_stress_s);
    }
    SUBCASE("a duty annotation adds the wall-clock projection") {
        DegradationTrace ac = tr;
        ac.meta["duty"] = "0.5";
        const TtfReport rep2 = ttf_project(ac, 0.1);
        REQUIRE(rep2.ttf_wall_s.has_value());
        CHECK(*rep2.ttf_wall_s == *rep2.ttf_cum_stress_s / 0.5);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(ttf_project(tr, 0.0), domain_error);
        CHECK_THROWS_AS(ttf_project(DegradationTrace{}, 0.1), domain_error);
    }
}

TEST_CASE("ttf extension ratios") {
    const DegradationTrace ref = powerlaw_trace(0.02, 0.2, 1.0, 1e4, 10);

    SUBCASE("a trace against itself is exactly 1") {
        const TtfReport rep = ttf_extension(ref, ref, 0.1);
        REQUIRE(rep.extension_ratio.has_value());
        CHECK(*rep.extension_ratio == 1.0);
        CHECK(!rep.ratio_is_lower_bound);
        REQUIRE(rep.reference_ttf_s.has_value());
        CHECK(*rep.reference_ttf_s == *rep.ttf_cum_stress_s);
    }
    SUBCASE("a time-dilated subject scales the ratio") {
        DegradationTrace slow = ref;
        for (TraceSample& s : slow.samples) {
            s.t_wall_s *= 100.0;
            s.t_cum_stress_s *= 100.0;
        }
        const TtfReport rep = ttf_extension(slow, ref, 0.1);
        REQUIRE(rep.extension_ratio.has_value());
        CHECK(*rep.extension_ratio == doctest::Approx(100.0).epsilon(1e-12));
        CHECK(!rep.ratio_is_lower_bound);
    }
    SUBCASE("a subject that never crosses yields a lower bound") {
        DegradationTrace flat;
        flat.samples.push_back({0.0, 0.0, 0.0, Phase::Stress});
        for (double t : {1.0, 10.0, 100.0, 500.0})
            flat.samples.push_back({t, t, -0.05, Phase::Stress});
        const TtfReport rep = ttf_extension(flat, ref, 0.1);
        REQUIRE(rep.extension_ratio.has_value());
        CHECK(rep.ratio_is_lower_bound);
        REQUIRE(rep.reference_ttf_s.has_value());
        CHECK(*rep.extension_ratio == doctest::Approx(500.0 / *rep.reference_ttf_s).epsilon(1e-12));
        CHECK(!rep.ttf_cum_stress_s.has_value());
    }
    SUBCASE("a reference that never crosses has no baseline") {
        DegradationTrace flat;
        flat.samples.push_back({0.0, 0.0, 0.0, Phase::Stress});
        for (double t : {1.0, 10.0, 100.0})
            flat.samples.push_back({t, t, -0.01, Phase::Stress});
        CHECK_THROWS_AS(ttf_extension(ref, flat, 0.1), no_reference_crossing);
    }
}

TEST_CASE("peak metrics and recovery queries") {
    SUBCASE("monotone stress keeps the peak at the end") {
        const DegradationTrace tr = powerlaw_trace(0.02, 0.2, 1.0, 100.0, 5);
        const PeakMetrics pm = peak_metrics(tr);
        CHECK(pm.t_peak_cum_stress_s() == 100.0);
        CHECK(pm.peak_delta_vt_v() == tr.samples.back().delta_vt_v);
        CHECK(pm.stress_end_delta_vt_v() == tr.samples.back().delta_vt_v);
        CHECK(!pm.has_relax());
        CHECK_THROWS_AS(pm.recovered_fraction(1.0), domain_error);
    }
    SUBCASE("the first maximum wins; stress end is the last stress row") {
        DegradationTrace tr;
        tr.samples = {{1.0, 1.0, -0.1, Phase::Stress},
                      {2.0, 2.0, -0.3, Phase::Stress},
                      {3.0, 3.0, -0.3, Phase::Stress},
                      {4.0, 4.0, -0.2, Phase::Stress}};
        const PeakMetrics pm = peak_metrics(tr);
        CHECK(pm.t_peak_cum_stress_s() == 2.0);
        CHECK(pm.peak_delta_vt_v() == -0.3);
        CHECK(pm.stress_end_delta_vt_v() == -0.2);
    }
    SUBCASE("recovered fraction on an annotated relax tail") {
        DegradationTrace tr;
        tr.meta["relax_start_wall_s"] = "100";
        tr.meta["read_pulse_width_s"] = "0.001";
        tr.samples = {{0.0, 0.0, 0.0, Phase::Stress},
                      {50.0, 50.0, -0.1, Phase::Stress},
                      {100.0, 100.0, -0.2, Phase::Stress},
                      // relax row 0: wall = relax_start + 1
                      {101.0, 100.0, -0.1, Phase::Relax},
                      // relax row 1: wall = relax_start + 10 + one read width
                      {110.001, 100.0, -0.05, Phase::Relax}};
        const PeakMetrics pm = peak_metrics(tr);
        REQUIRE(pm.has_relax());
        CHECK(pm.stress_end_delta_vt_v() == -0.2);
        CHECK(pm.recovered_fraction(1.0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(pm.recovered_fraction(10.0) == doctest::Approx(0.75).epsilon(1e-12));
        // Log-linear midpoint of [1, 10] in relax time: magnitude 0.075.
        CHECK(pm.recovered_fraction(std::sqrt(10.0)) == doctest::Approx(0.625).epsilon(1e-12));

        SUBCASE("window edges tolerate 1e-9 slack, no more") {
            CHECK_NOTHROW(pm.recovered_fraction(1.0 * (1.0 - 1e-10)));
            CHECK_NOTHROW(pm.recovered_fraction(10.0 * (1.0 + 1e-10)));
            CHECK_THROWS_AS(pm.recovered_fraction(0.5), domain_error);
            CHECK_THROWS_AS(pm.recovered_fraction(20.0), domain_error);
            CHECK_THROWS_AS(pm.recovered_fraction(-1.0), domain_error);
        }
    }
    SUBCASE("unannotated traces fall back to wall time since the last stress row") {
        DegradationTrace tr;
        tr.samples = {{0.0, 0.0, 0.0, Phase::Stress},
                      {100.0, 100.0, -0.2, Phase::Stress},
                      {102.0, 100.0, -0.1, Phase::Relax},
                      {120.0, 100.0, -0.04, Phase::Relax}};
        const PeakMetrics pm = peak_metrics(tr);
        CHECK(pm.recovered_fraction(2.0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(pm.recovered_fraction(20.0) == doctest::Approx(0.8).epsilon(1e-12));
    }
    SUBCASE("a zero stress-end shift has no recovery denominator") {
        DegradationTrace tr;
        tr.samples = {{1.0, 1.0, 0.0, Phase::Stress}, {2.0, 1.0, 0.0, Phase::Relax}};
        const PeakMetrics pm = peak_metrics(tr);
        REQUIRE(pm.has_relax());
        CHECK_THROWS_AS(pm.recovered_fraction(1.0), domain_error);
    }
    SUBCASE("traces without stress rows are rejected") {
        DegradationTrace tr;
        tr.samples = {{1.0, 0.0, -0.1, Phase::Relax}};
        CHECK_THROWS_AS(peak_metrics(tr), domain_error);
        CHECK_THROWS_AS(peak_metrics(DegradationTrace{}), domain_error);
    }
}

TEST_CASE("ambient cdf summaries") {
    SUBCASE("type-7 quantiles on a known ladder") {
        const CdfSummary s = ambient_cdf({10, 9, 8, 7, 6, 5, 4, 3, 2, 1});
        CHECK(s.n == 10);
        CHECK(s.median_v == doctest::Approx(5.5).epsilon(1e-15));
        REQUIRE(s.quantiles.size() == 5);
        CHECK(s.quantiles[0].second == doctest::Approx(1.45).epsilon(1e-13));
        CHECK(s.quantiles[1].second == doctest::Approx(3.25).epsilon(1e-13));
        CHECK(s.quantiles[2].second == doctest::Approx(5.5).epsilon(1e-13));
        CHECK(s.quantiles[3].second == doctest::Approx(7.75).epsilon(1e-13));
        CHECK(s.quantiles[4].second == doctest::Approx(9.55).epsilon(1e-13));
        REQUIRE(s.cdf_points.size() == 10);
        CHECK(s.cdf_points.front().first == 1.0);
        CHECK(s.cdf_points.front().second == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(s.cdf_points.back().first == 10.0);
        CHECK(s.cdf_points.back().second == 1.0);
    }
    SUBCASE("a single sample is every quantile") {
        const CdfSummary s = ambient_cdf({0.45});
        CHECK(s.n == 1);
        CHECK(s.median_v == 0.45);
        for (const auto& q : s.quantiles) CHECK(q.second == 0.45);
        CHECK(s.cdf_points == std::vector<std::pair<double, double>>{{0.45, 1.0}});
    }
    SUBCASE("duplicates are ordinary samples") {
        const CdfSummary s = ambient_cdf({0.3, 0.3, 0.3});
        CHECK(s.median_v == 0.3);
    }
    SUBCASE("magnitudes by default, signs on request") {
        const CdfSummary mag = ambient_cdf({-0.5, 0.5});
        CHECK(mag.median_v == 0.5);
        const CdfSummary sgn = ambient_cdf({-0.5, 0.5}, true);
        CHECK(sgn.median_v == 0.0);
        CHECK(sgn.cdf_points.front().first == -0.5);
    }
    SUBCASE("empty and non-finite inputs are rejected") {
        CHECK_THROWS_AS(ambient_cdf({}), domain_error);
        CHECK_THROWS_AS(ambient_cdf({0.1, std::nan("")}), domain_error);
    }
}

TEST_CASE("interface-trap density from subthreshold swing") {
    const double ideal = constants::kLn10 * constants::kBoltzmannEvPerK * 300.0 * 1000.0;

    SUBCASE("pinned oracle at 150 mV/dec, 300 K, 1.5 uF/cm^2") {
        const DitEstimate d = dit_from_subthreshold(150.0, 300.0, 1.5e-6);
        CHECK(d.d_it_cm2_ev == doctest::Approx(1.4229603063770232e13).epsilon(1e-12));
        CHECK(d.ss_mv_per_dec == 150.0);
        CHECK(d.temperature_k == 300.0);
        CHECK(d.c_ox_f_cm2 == 1.5e-6);
        CHECK(d.method == "ss-based");
    }
    SUBCASE("an ideal switch has no interface traps") {
        CHECK(dit_from_subthreshold(ideal, 300.0, 1.5e-6).d_it_cm2_ev == 0.0);
    }
    SUBCASE("density is linear in the excess swing") {
        const double d1 = dit_from_subthreshold(ideal * 1.5, 300.0, 1.5e-6).d_it_cm2_ev;
        const double d2 = dit_from_subthreshold(ideal * 2.0, 300.0, 1.5e-6).d_it_cm2_ev;
        CHECK(2.0 * d1 == doctest::Approx(d2).epsilon(1e-12));
    }
    SUBCASE("swings below the thermionic limit are rejected") {
        CHECK_THROWS_AS(dit_from_subthreshold(ideal * 0.99, 300.0, 1.5e-6), domain_error);
    }
    SUBCASE("temperature and capacitance must be positive") {
        CHECK_THROWS_AS(dit_from_subthreshold(150.0, 0.0, 1.5e-6), domain_error);
        CHECK_THROWS_AS(dit_from_subthreshold(150.0, 300.0, 0.0), domain_error);
    }
}
