#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bti/errors.hpp"

namespace bti {

enum class Phase { Stress, Relax, Read };

const char* to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

// One constant-bias interval of a gate waveform.
struct BiasSegment {
    double duration_s = 0.0;
    double v_gs_v = 0.0;
    Phase phase = Phase::Stress;
};

// Log-spaced sampling grid, inclusive of both endpoints.
struct LogGrid {
    double t_min_s = 1e-3;
    double t_max_s = 1e3;
    int points_per_decade = 10;

    std::vector<double> times() const;
};

void validate(const LogGrid& g);

// DC stress/relax schedule with non-perturbing spot reads. Reads are inserted
// at the sample-grid times, interpreted per phase: once on the stress-elapsed
// clock and (when relax_duration > 0) once more on the relax-elapsed clock,
// clipped to the relax window. Relaxation is at zero gate bias. The last
// read_to_relax_delay_s of the stress window model the controller turnaround
// and stay at stress level, so reads are clamped to end no later than
// stress_duration - delay; the total time at stress level is exactly
// stress_duration.
struct DcStressSpec {
    double v_stress_v = -1.2;
    double v_read_v = -0.1;
    double stress_duration_s = 1e3;
    double relax_duration_s = 0.0;
    double read_pulse_width_s = 1e-3;
    double read_to_relax_delay_s = 1e-3;
    LogGrid sample_grid;
};

enum class AcPattern { RelaxStressMeasure, StressRelaxMeasure };

const char* to_string(AcPattern p);
std::optional<AcPattern> pattern_from_string(std::string_view s);

// Periodic unipolar gate-pulse schedule, represented analytically as a cycle
// template plus repeat counts (never materialized per cycle). Spot reads land
// at the first whole-cycle boundary whose cumulative stress reaches each
// sample-grid time; the grid is on the cumulative-stress axis. The pattern
// fixes the measurement point: relax-stress-measure reads after the stress
// half, stress-relax-measure after the relax half.
struct AcStressSpec {
    double v_stress_v = -1.2;
    double v_relax_v = 0.0;
    double frequency_hz = 1e6;
    double duty = 0.5;
    AcPattern pattern = AcPattern::RelaxStressMeasure;
    double target_cumulative_stress_s = 1.0;
    LogGrid sample_grid;
};

// Width of the spot read inserted into AC schedules (AC reads carry no
// configurable width; the read does not perturb occupancy).
inline constexpr double kAcReadPulseWidthS = 1e-3;

/**
 * One run of identical cycles inside a waveform. `sample` elements mark the
 * spot-read positions; the simulator records a trace row at the element
 * start, tagged `sample_phase` (the curve the row belongs to: DC relax reads
 * sample the recovery curve, everything else the buildup curve).
 *
 * wall_start_s / stress_start_s are closed-form offsets assigned by the
 * builders (never running sums), so cumulative bookkeeping cannot drift even
 * over 1e9+ repeats.
 */
struct WaveformElement {
    std::vector<BiasSegment> cycle;
    std::uint64_t repeats = 1;
    bool sample = false;
    Phase sample_phase = Phase::Stress;
    double wall_start_s = 0.0;
    double stress_start_s = 0.0;
    double cycle_wall_s = 0.0;    // wall-clock duration of one cycle
    double cycle_stress_s = 0.0;  // stress time contributed by one cycle
};

class Waveform {
public:
    Waveform() = default;

    const std::vector<WaveformElement>& elements() const { return elements_; }
    double total_wall_s() const { return total_wall_s_; }
    double total_stress_s() const { return total_stress_s_; }

    // Largest sample-grid time this waveform can honor (stress window for DC,
    // reachable cumulative stress for AC).
    double sample_axis_max_s() const { return sample_axis_max_s_; }

    std::optional<double> duty() const { return duty_; }
    const std::string& descriptor() const { return descriptor_; }

    // Annotations consumed by analysis (relax-time reconstruction).
    std::optional<double> relax_start_wall_s() const { return relax_start_wall_s_; }
    double read_pulse_width_s() const { return read_pulse_width_s_; }

    // Stress time accumulated by wall-clock time t (read time never counts).
    // Closed-form per element; monotone non-decreasing in t.
    double cumulative_stress_time(double t_wall_s) const;

private:
    friend Waveform build_dc_waveform(const DcStressSpec& spec);
    friend Waveform build_ac_waveform(const AcStressSpec& spec);

    std::vector<WaveformElement> elements_;
    double total_wall_s_ = 0.0;
    double total_stress_s_ = 0.0;
    double sample_axis_max_s_ = 0.0;
    std::optional<double> duty_;
    std::optional<double> relax_start_wall_s_;
    double read_pulse_width_s_ = 1e-3;
    std::string descriptor_ = "empty";
};

Waveform build_dc_waveform(const DcStressSpec& spec);
Waveform build_ac_waveform(const AcStressSpec& spec);

}
