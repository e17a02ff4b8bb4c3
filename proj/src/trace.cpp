#include "bti/trace.hpp"

#include <cmath>
#include <cstdlib>

namespace bti {

std::optional<double> DegradationTrace::meta_double(const std::string& key) const {
    auto it = meta.find(key);
    if (it == meta.end()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str()) return std::nullopt;
    return v;
}

const std::string* DegradationTrace::meta_str(const std::string& key) const {
    auto it = meta.find(key);
    return it == meta.end() ? nullptr : &it->second;
}

void validate(const DegradationTrace& t) {
    double prev_wall = -1.0;
    double prev_cum = -1.0;
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        const TraceSample& s = t.samples[i];
        if (!std::isfinite(s.t_wall_s) || !std::isfinite(s.t_cum_stress_s) ||
            !std::isfinite(s.delta_vt_v))
            throw domain_error("trace: non-finite value at row " + std::to_string(i));
        if (s.t_wall_s < 0 || s.t_cum_stress_s < 0)
            throw domain_error("trace: negative time at row " + std::to_string(i));
        if (i > 0 && !(s.t_wall_s > prev_wall))
            throw domain_error("trace: wall clock must increase strictly (row " +
                               std::to_string(i) + ")");
        if (i > 0 && s.t_cum_stress_s < prev_cum)
            throw domain_error("trace: cumulative stress must be non-decreasing (row " +
                               std::to_string(i) + ")");
        prev_wall = s.t_wall_s;
        prev_cum = s.t_cum_stress_s;
    }
}

}
