#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bti/waveform.hpp"

namespace bti {

// One spot measurement. delta_vt_v is the signed threshold shift; phase tags
// the curve the row belongs to (stress buildup vs relax recovery).
struct TraceSample {
    double t_wall_s = 0.0;
    double t_cum_stress_s = 0.0;
    double delta_vt_v = 0.0;
    Phase phase = Phase::Stress;
};

// Sampled degradation history plus provenance. meta is echoed verbatim into
// the CSV comment header (and parsed back), keys sorted.
struct DegradationTrace {
    std::vector<TraceSample> samples;
    std::map<std::string, std::string> meta;

    std::optional<double> meta_double(const std::string& key) const;
    const std::string* meta_str(const std::string& key) const;
};

// Enforces monotone wall clock / non-decreasing cumulative stress.
void validate(const DegradationTrace& t);

}
