#include "bti/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "bti/models.hpp"

namespace bti {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw domain_error(what);
}

}

TtfReport ttf_project(const DegradationTrace& trace, double tolerance_v) {
    require(std::isfinite(tolerance_v) && tolerance_v > 0, "ttf_project: tolerance must be > 0");
    require(!trace.samples.empty(), "ttf_project: trace is empty");

    TtfReport rep;
    rep.tolerance_v = tolerance_v;
    rep.crossing_method = "not-reached";

    bool have_prev = false;
    double prev_t = 0.0, prev_v = 0.0;
    for (const TraceSample& s : trace.samples) {
        if (s.phase != Phase::Stress || s.t_cum_stress_s <= 0.0) continue;
        const double v = std::fabs(s.delta_vt_v);
        if (v >= tolerance_v) {
            if (have_prev && s.t_cum_stress_s > prev_t && v > prev_v) {
                const double f = (tolerance_v - prev_v) / (v - prev_v);
                rep.ttf_cum_stress_s = std::exp(
                    std::log(prev_t) + f * (std::log(s.t_cum_stress_s) - std::log(prev_t)));
                rep.crossing_method = "log-linear";
            } else {
                rep.ttf_cum_stress_s = s.t_cum_stress_s;
                rep.crossing_method = "first-sample";
            }
            break;
        }
        have_prev = true;
        prev_t = s.t_cum_stress_s;
        prev_v = v;
    }

    if (rep.ttf_cum_stress_s) {
        if (auto duty = trace.meta_double("duty"); duty && *duty > 0 && *duty < 1)
            rep.ttf_wall_s = *rep.ttf_cum_stress_s / *duty;
    }
    return rep;
}

TtfReport ttf_extension(const DegradationTrace& subject, const DegradationTrace& reference,
                        double tolerance_v) {
    const TtfReport ref = ttf_project(reference, tolerance_v);
    if (!ref.ttf_cum_stress_s)
        throw no_reference_crossing("ttf_extension: the reference trace never reaches |dVt| = " +
                                    std::to_string(tolerance_v) + " V, so there is no baseline");

    TtfReport rep = ttf_project(subject, tolerance_v);
    rep.reference_ttf_s = ref.ttf_cum_stress_s;
    if (rep.ttf_cum_stress_s) {
        rep.extension_ratio = *rep.ttf_cum_stress_s / *ref.ttf_cum_stress_s;
    } else {
        // Never crossed: every observed stress second is survival, so the
        // last stress sample gives a certified lower bound on the ratio.
        double last_stress_t = 0.0;
        for (const TraceSample& s : subject.samples)
            if (s.phase == Phase::Stress && s.t_cum_stress_s > last_stress_t)
                last_stress_t = s.t_cum_stress_s;
        require(last_stress_t > 0,
                "ttf_extension: subject trace has no stress samples to bound the ratio");
        rep.extension_ratio = last_stress_t / *ref.ttf_cum_stress_s;
        rep.ratio_is_lower_bound = true;
    }
    return rep;
}

PeakMetrics::PeakMetrics(const DegradationTrace& trace) {
    require(!trace.samples.empty(), "peak_metrics: trace is empty");

    bool saw_stress = false;
    const TraceSample* last_stress = nullptr;
    double peak_mag = -1.0;
    for (const TraceSample& s : trace.samples) {
        if (s.phase != Phase::Stress) continue;
        saw_stress = true;
        last_stress = &s;
        const double mag = std::fabs(s.delta_vt_v);
        if (mag > peak_mag) {  // strict: the first maximum wins
            peak_mag = mag;
            peak_v_ = s.delta_vt_v;
            t_peak_ = s.t_cum_stress_s;
        }
    }
    require(saw_stress, "peak_metrics: trace contains no stress-phase samples");
    stress_end_v_ = last_stress->delta_vt_v;

    // Relax rows, placed on a relax-time axis that excludes spot-read
    // overhead when the trace carries the annotations to reconstruct it.
    const auto relax_start = trace.meta_double("relax_start_wall_s");
    const auto read_width = trace.meta_double("read_pulse_width_s");
    std::size_t k = 0;
    for (const TraceSample& s : trace.samples) {
        if (s.phase != Phase::Relax) continue;
        double t_rel;
        if (relax_start && read_width)
            t_rel = s.t_wall_s - *relax_start - static_cast<double>(k) * *read_width;
        else
            t_rel = s.t_wall_s - last_stress->t_wall_s;
        ++k;
        if (t_rel <= 0) continue;  // the stress-end row itself, or clock noise
        relax_.emplace_back(t_rel, std::fabs(s.delta_vt_v));
    }
}

double PeakMetrics::recovered_fraction(double t_relax_s) const {
    require(!relax_.empty(),
            "recovered_fraction: trace has no relax-phase samples after stress");
    require(std::isfinite(t_relax_s) && t_relax_s > 0,
            "recovered_fraction: t_relax must be > 0");
    const double denom = std::fabs(stress_end_v_);
    require(denom > 0, "recovered_fraction: |dVt| at stress end is zero");

    const double lo = relax_.front().first;
    const double hi = relax_.back().first;
    require(t_relax_s >= lo * (1.0 - 1e-9) && t_relax_s <= hi * (1.0 + 1e-9),
            "recovered_fraction: t_relax outside the sampled relax window [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "] s");
    const double t = std::min(std::max(t_relax_s, lo), hi);

    auto it = std::lower_bound(relax_.begin(), relax_.end(), t,
                               [](const std::pair<double, double>& p, double v) {
                                   return p.first < v;
                               });
    double mag;
    if (it == relax_.begin() || it->first == t) {
        mag = it->second;
    } else {
        const auto& b = *it;
        const auto& a = *(it - 1);
        const double f = (std::log(t) - std::log(a.first)) / (std::log(b.first) - std::log(a.first));
        mag = a.second + f * (b.second - a.second);
    }
    return 1.0 - mag / denom;
}

PeakMetrics peak_metrics(const DegradationTrace& trace) { return PeakMetrics(trace); }

namespace {

// Type-7 quantile (the linear-interpolation convention spreadsheets and
// NumPy default to) on an ascending-sorted vector.
double quantile7(const std::vector<double>& sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - std::floor(h)) * (sorted[lo + 1] - sorted[lo]);
}

}

CdfSummary ambient_cdf(const std::vector<double>& delta_vt_v, bool signed_values) {
    require(!delta_vt_v.empty(), "ambient_cdf: no samples");
    std::vector<double> v;
    v.reserve(delta_vt_v.size());
    for (double x : delta_vt_v) {
        require(std::isfinite(x), "ambient_cdf: non-finite sample");
        v.push_back(signed_values ? x : std::fabs(x));
    }
    std::sort(v.begin(), v.end());

    CdfSummary out;
    out.n = v.size();
    out.cdf_points.reserve(v.size());
    const double n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out.cdf_points.emplace_back(v[i], static_cast<double>(i + 1) / n);
    for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) out.quantiles.emplace_back(p, quantile7(v, p));
    out.median_v = quantile7(v, 0.5);
    return out;
}

DitEstimate dit_from_subthreshold(double ss_mv_per_dec, double temperature_k, double c_ox_f_cm2) {
    require(std::isfinite(temperature_k) && temperature_k > 0,
            "dit_from_subthreshold: temperature must be > 0");
    require(std::isfinite(c_ox_f_cm2) && c_ox_f_cm2 > 0,
            "dit_from_subthreshold: c_ox must be > 0");
    const double ideal = constants::kLn10 * constants::kBoltzmannEvPerK * temperature_k * 1000.0;
    require(std::isfinite(ss_mv_per_dec) && ss_mv_per_dec >= ideal,
            "dit_from_subthreshold: swing " + std::to_string(ss_mv_per_dec) +
                " mV/dec is below the thermionic limit " + std::to_string(ideal) + " mV/dec");

    DitEstimate out;
    out.ss_mv_per_dec = ss_mv_per_dec;
    out.temperature_k = temperature_k;
    out.c_ox_f_cm2 = c_ox_f_cm2;
    out.d_it_cm2_ev =
        c_ox_f_cm2 / constants::kElementaryChargeC * (ss_mv_per_dec / ideal - 1.0);
    return out;
}

}
