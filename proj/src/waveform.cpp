#include "bti/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace bti {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw domain_error(what);
}

// Smallest whole-cycle count whose cumulative stress reaches `target`, with a
// guard against FP quotients that land a hair above an integer.
std::uint64_t ceil_cycles(double target, double per_cycle) {
    const double q = target / per_cycle;
    require(q < 9.0e15, "cycle count too large to represent exactly");
    double c = std::ceil(q - 1e-9);
    if (c < 1.0) c = 1.0;
    return static_cast<std::uint64_t>(c);
}

std::string describe(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Stress: return "stress";
        case Phase::Relax: return "relax";
        case Phase::Read: return "read";
    }
    return "?";
}

std::optional<Phase> phase_from_string(std::string_view s) {
    if (s == "stress") return Phase::Stress;
    if (s == "relax") return Phase::Relax;
    if (s == "read") return Phase::Read;
    return std::nullopt;
}

const char* to_string(AcPattern p) {
    return p == AcPattern::RelaxStressMeasure ? "relax-stress-measure" : "stress-relax-measure";
}

std::optional<AcPattern> pattern_from_string(std::string_view s) {
    if (s == "relax-stress-measure") return AcPattern::RelaxStressMeasure;
    if (s == "stress-relax-measure") return AcPattern::StressRelaxMeasure;
    return std::nullopt;
}

void validate(const LogGrid& g) {
    require(std::isfinite(g.t_min_s) && g.t_min_s > 0, "LogGrid: t_min_s must be > 0");
    require(std::isfinite(g.t_max_s) && g.t_max_s >= g.t_min_s, "LogGrid: t_max_s must be >= t_min_s");
    require(g.points_per_decade >= 1, "LogGrid: points_per_decade must be >= 1");
}

std::vector<double> LogGrid::times() const {
    validate(*this);
    std::vector<double> out;
    const double span = std::log10(t_max_s / t_min_s);
    const int n = static_cast<int>(std::floor(span * points_per_decade + 1e-9));
    out.reserve(static_cast<std::size_t>(n) + 2);
    for (int i = 0; i <= n; ++i)
        out.push_back(t_min_s * std::pow(10.0, static_cast<double>(i) / points_per_decade));
    if (out.back() < t_max_s * (1.0 - 1e-12)) out.push_back(t_max_s);
    return out;
}

Waveform build_dc_waveform(const DcStressSpec& spec) {
    require(std::isfinite(spec.stress_duration_s) && spec.stress_duration_s > 0,
            "DcStressSpec: stress_duration_s must be > 0");
    require(std::isfinite(spec.relax_duration_s) && spec.relax_duration_s >= 0,
            "DcStressSpec: relax_duration_s must be >= 0");
    require(std::isfinite(spec.read_pulse_width_s) && spec.read_pulse_width_s > 0,
            "DcStressSpec: read_pulse_width_s must be > 0");
    require(std::isfinite(spec.read_to_relax_delay_s) && spec.read_to_relax_delay_s >= 0,
            "DcStressSpec: read_to_relax_delay_s must be >= 0");
    require(std::isfinite(spec.v_stress_v) && std::isfinite(spec.v_read_v),
            "DcStressSpec: bias levels must be finite");
    require(spec.v_read_v != spec.v_stress_v,
            "DcStressSpec: v_read_v must differ from v_stress_v (phase is tied to level)");
    const bool has_relax = spec.relax_duration_s > 0;
    if (has_relax) {
        require(spec.v_stress_v != 0.0, "DcStressSpec: v_stress_v must differ from the 0 V relax level");
        require(spec.v_read_v != 0.0, "DcStressSpec: v_read_v must differ from the 0 V relax level");
        require(spec.read_to_relax_delay_s < spec.stress_duration_s,
                "DcStressSpec: read_to_relax_delay_s must be shorter than the stress window");
    }
    validate(spec.sample_grid);
    require(spec.sample_grid.t_max_s <= spec.stress_duration_s * (1.0 + 1e-12),
            "DcStressSpec: sample grid time " + describe(spec.sample_grid.t_max_s) +
                " s lies outside the " + describe(spec.stress_duration_s) + " s stress window");

    const double rw = spec.read_pulse_width_s;
    const double delay = has_relax ? spec.read_to_relax_delay_s : 0.0;
    const double last_read_pos = spec.stress_duration_s - delay;

    // Stress-phase reads, clamped so the turnaround hold stays at stress level.
    std::vector<double> stress_reads;
    for (double g : spec.sample_grid.times()) {
        double r = std::min(g, last_read_pos);
        if (stress_reads.empty() || r > stress_reads.back()) stress_reads.push_back(r);
    }

    Waveform wf;
    wf.read_pulse_width_s_ = rw;
    int nreads = 0;
    double pos = 0.0;

    auto put = [&wf](WaveformElement el) { wf.elements_.push_back(std::move(el)); };

    auto chunk = [&](double from, double to, double v, Phase ph, double wall, double stress) {
        if (to <= from) return;
        WaveformElement el;
        el.cycle = {BiasSegment{to - from, v, ph}};
        el.cycle_wall_s = to - from;
        el.cycle_stress_s = ph == Phase::Stress ? to - from : 0.0;
        el.wall_start_s = wall;
        el.stress_start_s = stress;
        put(std::move(el));
    };

    auto read_el = [&](double wall, double stress, Phase context) {
        WaveformElement el;
        el.cycle = {BiasSegment{rw, spec.v_read_v, Phase::Read}};
        el.cycle_wall_s = rw;
        el.sample = true;
        el.sample_phase = context;
        el.wall_start_s = wall;
        el.stress_start_s = stress;
        put(std::move(el));
    };

    for (double r : stress_reads) {
        chunk(pos, r, spec.v_stress_v, Phase::Stress, pos + nreads * rw, pos);
        read_el(r + nreads * rw, r, Phase::Stress);
        ++nreads;
        pos = r;
    }
    // Tail of the stress window (includes the controller hold before relax).
    chunk(pos, spec.stress_duration_s, spec.v_stress_v, Phase::Stress, pos + nreads * rw, pos);

    if (has_relax) {
        const double relax_base = spec.stress_duration_s + nreads * rw;
        wf.relax_start_wall_s_ = relax_base;
        std::vector<double> relax_reads;
        for (double g : spec.sample_grid.times()) {
            if (g > spec.relax_duration_s * (1.0 + 1e-12)) break;
            double r = std::min(g, spec.relax_duration_s);
            if (relax_reads.empty() || r > relax_reads.back()) relax_reads.push_back(r);
        }
        int nr = 0;
        double rpos = 0.0;
        for (double r : relax_reads) {
            chunk(rpos, r, 0.0, Phase::Relax, relax_base + rpos + nr * rw, spec.stress_duration_s);
            read_el(relax_base + r + nr * rw, spec.stress_duration_s, Phase::Relax);
            ++nr;
            rpos = r;
        }
        chunk(rpos, spec.relax_duration_s, 0.0, Phase::Relax, relax_base + rpos + nr * rw,
              spec.stress_duration_s);
        nreads += nr;
    }

    wf.total_stress_s_ = spec.stress_duration_s;
    wf.total_wall_s_ = spec.stress_duration_s + spec.relax_duration_s + nreads * rw;
    wf.sample_axis_max_s_ = spec.stress_duration_s;
    wf.descriptor_ = "dc v_stress=" + describe(spec.v_stress_v) +
                     " stress=" + describe(spec.stress_duration_s) +
                     " relax=" + describe(spec.relax_duration_s);
    return wf;
}

Waveform build_ac_waveform(const AcStressSpec& spec) {
    require(std::isfinite(spec.duty) && spec.duty > 0 && spec.duty < 1,
            "AcStressSpec: duty must lie in (0, 1)");
    require(std::isfinite(spec.frequency_hz) && spec.frequency_hz > 0,
            "AcStressSpec: frequency_hz must be > 0");
    require(std::isfinite(spec.target_cumulative_stress_s) && spec.target_cumulative_stress_s > 0,
            "AcStressSpec: target_cumulative_stress_s must be > 0");
    require(std::isfinite(spec.v_stress_v) && std::isfinite(spec.v_relax_v),
            "AcStressSpec: bias levels must be finite");
    require(spec.v_stress_v != spec.v_relax_v,
            "AcStressSpec: v_stress_v must differ from v_relax_v (phase is tied to level)");
    validate(spec.sample_grid);
    require(spec.sample_grid.t_max_s <= spec.target_cumulative_stress_s * (1.0 + 1e-9),
            "AcStressSpec: sample grid time " + describe(spec.sample_grid.t_max_s) +
                " s exceeds the target cumulative stress " +
                describe(spec.target_cumulative_stress_s) + " s");

    const double t_s = spec.duty / spec.frequency_hz;
    const double t_r = (1.0 - spec.duty) / spec.frequency_hz;
    const double period = t_s + t_r;
    const double rw = kAcReadPulseWidthS;
    const std::uint64_t n_total = ceil_cycles(spec.target_cumulative_stress_s, t_s);

    std::vector<std::uint64_t> read_cycles;
    for (double g : spec.sample_grid.times()) {
        std::uint64_t k = std::min(n_total, ceil_cycles(g, t_s));
        if (read_cycles.empty() || k > read_cycles.back()) read_cycles.push_back(k);
    }

    const BiasSegment stress_seg{t_s, spec.v_stress_v, Phase::Stress};
    const BiasSegment relax_seg{t_r, spec.v_relax_v, Phase::Relax};
    std::vector<BiasSegment> cycle;
    if (spec.pattern == AcPattern::RelaxStressMeasure)
        cycle = {relax_seg, stress_seg};
    else
        cycle = {stress_seg, relax_seg};

    Waveform wf;
    wf.read_pulse_width_s_ = rw;
    std::uint64_t prev = 0;
    int nreads = 0;
    for (std::uint64_t k : read_cycles) {
        if (k > prev) {
            WaveformElement block;
            block.cycle = cycle;
            block.repeats = k - prev;
            block.cycle_wall_s = period;
            block.cycle_stress_s = t_s;
            block.wall_start_s = static_cast<double>(prev) * period + nreads * rw;
            block.stress_start_s = static_cast<double>(prev) * t_s;
            wf.elements_.push_back(std::move(block));
        }
        WaveformElement el;
        el.cycle = {BiasSegment{rw, spec.v_relax_v, Phase::Read}};
        el.cycle_wall_s = rw;
        // AC reads sample the buildup curve on the cumulative-stress axis
        // regardless of which half-cycle precedes them.
        el.sample = true;
        el.sample_phase = Phase::Stress;
        el.wall_start_s = static_cast<double>(k) * period + nreads * rw;
        el.stress_start_s = static_cast<double>(k) * t_s;
        wf.elements_.push_back(std::move(el));
        ++nreads;
        prev = k;
    }
    if (prev < n_total) {
        WaveformElement block;
        block.cycle = cycle;
        block.repeats = n_total - prev;
        block.cycle_wall_s = period;
        block.cycle_stress_s = t_s;
        block.wall_start_s = static_cast<double>(prev) * period + nreads * rw;
        block.stress_start_s = static_cast<double>(prev) * t_s;
        wf.elements_.push_back(std::move(block));
    }

    wf.total_stress_s_ = static_cast<double>(n_total) * t_s;
    wf.total_wall_s_ = static_cast<double>(n_total) * period + nreads * rw;
    wf.sample_axis_max_s_ = wf.total_stress_s_;
    wf.duty_ = spec.duty;
    wf.descriptor_ = "ac f=" + describe(spec.frequency_hz) + " duty=" + describe(spec.duty) +
                     " pattern=" + to_string(spec.pattern) +
                     " target=" + describe(spec.target_cumulative_stress_s);
    return wf;
}

double Waveform::cumulative_stress_time(double t_wall_s) const {
    require(std::isfinite(t_wall_s) && t_wall_s >= 0,
            "cumulative_stress_time: t_wall must be >= 0");
    if (elements_.empty()) {
        require(t_wall_s == 0, "cumulative_stress_time: empty waveform has zero duration");
        return 0.0;
    }
    require(t_wall_s <= total_wall_s_ * (1.0 + 1e-12),
            "cumulative_stress_time: t_wall " + describe(t_wall_s) +
                " s exceeds the waveform duration " + describe(total_wall_s_) + " s");
    const double t = std::min(t_wall_s, total_wall_s_);

    // Last element whose wall_start <= t.
    auto it = std::upper_bound(elements_.begin(), elements_.end(), t,
                               [](double v, const WaveformElement& e) { return v < e.wall_start_s; });
    if (it == elements_.begin()) return 0.0;
    const WaveformElement& el = *(it - 1);

    const double local = t - el.wall_start_s;
    const double extent = static_cast<double>(el.repeats) * el.cycle_wall_s;
    if (local >= extent)
        return el.stress_start_s + static_cast<double>(el.repeats) * el.cycle_stress_s;

    double k = std::floor(local / el.cycle_wall_s);
    if (k > static_cast<double>(el.repeats) - 1.0) k = static_cast<double>(el.repeats) - 1.0;
    double rem = local - k * el.cycle_wall_s;
    if (rem < 0 && k > 0) {
        k -= 1.0;
        rem = local - k * el.cycle_wall_s;
    } else if (rem >= el.cycle_wall_s && k + 1.0 <= static_cast<double>(el.repeats) - 1.0) {
        k += 1.0;
        rem = local - k * el.cycle_wall_s;
    }
    if (rem < 0) rem = 0;

    double stress = el.stress_start_s + k * el.cycle_stress_s;
    for (const BiasSegment& seg : el.cycle) {
        if (rem <= 0) break;
        const double d = std::min(rem, seg.duration_s);
        if (seg.phase == Phase::Stress) stress += d;
        rem -= seg.duration_s;
    }
    return stress;
}

}
