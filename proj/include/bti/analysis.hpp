#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bti/trace.hpp"

namespace bti {

/**
 * Time-to-failure projection. ttf lives on the cumulative-stress axis (the
 * axis AC and DC schedules share); ttf_wall_s = ttf / duty is filled in
 * additionally when the trace carries a duty annotation, since calendar
 * lifetime is what an operator schedules against.
 */
struct TtfReport {
    double tolerance_v = 0.0;
    std::optional<double> ttf_cum_stress_s;  // empty = tolerance never reached
    std::string crossing_method;             // "log-linear" | "first-sample" | "not-reached"
    std::optional<double> ttf_wall_s;
    std::optional<double> reference_ttf_s;
    std::optional<double> extension_ratio;
    bool ratio_is_lower_bound = false;  // subject never crossed; ratio uses its last sample
};

// First stress-phase sample with |dVt| >= tolerance; the crossing time is
// interpolated log-linearly in (log t_cum, |dVt|) against the previous
// stress sample (samples at t_cum = 0 cannot carry a positive crossing and
// are skipped).
TtfReport ttf_project(const DegradationTrace& trace, double tolerance_v);

// extension_ratio = ttf(subject) / ttf(reference). A subject that never
// crosses yields a lower bound from its last stress sample; a reference that
// never crosses has no baseline and throws no_reference_crossing.
TtfReport ttf_extension(const DegradationTrace& subject, const DegradationTrace& reference,
                        double tolerance_v);

/**
 * Peak degradation and post-stress recovery queries over one trace. The
 * relax-time axis is reconstructed from the trace annotations
 * (relax_start_wall_s, read_pulse_width_s) so spot-read overhead does not
 * count as recovery time; without them it falls back to wall time since the
 * last stress sample (approximate by the read width).
 */
class PeakMetrics {
public:
    explicit PeakMetrics(const DegradationTrace& trace);

    double t_peak_cum_stress_s() const { return t_peak_; }
    double peak_delta_vt_v() const { return peak_v_; }  // signed value at the peak
    double stress_end_delta_vt_v() const { return stress_end_v_; }
    bool has_relax() const { return !relax_.empty(); }

    // 1 - |dVt(t_relax)| / |dVt at stress end|, interpolated log-linearly
    // between relax samples. Throws if the trace has no relax phase or the
    // query lies outside the sampled relax window.
    double recovered_fraction(double t_relax_s) const;

private:
    double t_peak_ = 0.0;
    double peak_v_ = 0.0;
    double stress_end_v_ = 0.0;
    std::vector<std::pair<double, double>> relax_;  // (t_relax, |dVt|), increasing t
};

PeakMetrics peak_metrics(const DegradationTrace& trace);

// Empirical distribution of ambient-drift shifts.
struct CdfSummary {
    std::size_t n = 0;
    double median_v = 0.0;
    std::vector<std::pair<double, double>> quantiles;   // (p, value), type-7 convention
    std::vector<std::pair<double, double>> cdf_points;  // (value, rank/n), sorted
};

// Operates on magnitudes by default (drift sign conventions vary between
// setups); signed_values = true keeps signs.
CdfSummary ambient_cdf(const std::vector<double>& delta_vt_v, bool signed_values = false);

// Interface-trap density from subthreshold swing.
struct DitEstimate {
    double ss_mv_per_dec = 0.0;
    double temperature_k = 0.0;
    double c_ox_f_cm2 = 0.0;
    double d_it_cm2_ev = 0.0;
    std::string method = "ss-based";
};

// d_it = (c_ox/q) * (ss/ideal - 1) with ideal = ln(10) k_B T in mV/decade.
DitEstimate dit_from_subthreshold(double ss_mv_per_dec, double temperature_k, double c_ox_f_cm2);

}
