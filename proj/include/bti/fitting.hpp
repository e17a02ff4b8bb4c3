#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bti/models.hpp"

namespace bti {

// One (field, time, shift) measurement for the power-law fit.
struct FieldTimeSample {
    double xi_mvcm = 0.0;
    double t_s = 0.0;
    double delta_vt_v = 0.0;  // signed or magnitude; the fit uses |delta_vt|
};

// One point of a duty-cycle sweep at a shared cumulative stress time.
struct DutySample {
    double duty = 0.0;
    double delta_vt_mag_v = 0.0;
    double t_stress_cumulative_s = 0.0;  // 0 = unspecified; all must agree
};

// One point of a recovery curve: xi_ratio = t_relax / t_stress, fraction =
// |dVt(t_relax)| / |dVt at stress end| in (0, 1].
struct RelaxSample {
    double xi_ratio = 0.0;
    double fraction = 1.0;
};

template <class Model>
struct FitResult {
    Model params{};
    double residual_rms = 0.0;  // volts, or dimensionless for the relax fit
    std::size_t n_points = 0;
    bool converged = false;
    std::string search_trace_summary;
};

/**
 * Ordinary least squares on log|dVt| = log c0 + m log|xi| + alpha log t.
 * Inputs are sorted internally, so the result is bit-identical under row
 * permutation. Requires >= 3 distinct |xi| and >= 3 distinct t values and
 * strictly positive |xi|, t, |dVt|; residual_rms is reported in volts
 * (magnitude space).
 */
FitResult<PowerLawModel> fit_powerlaw(std::vector<FieldTimeSample> samples);

/**
 * Fits |dVt|(D) = a ln(1 + b D/(1-D)). For each b on a log grid [1e-4, 1e6]
 * (25 points/decade) the optimal a is closed-form; the best grid b is then
 * refined by golden-section search on log b to 1e-6 relative width. Ties
 * break toward smaller b. Deterministic.
 */
FitResult<DutyCycleLogModel> fit_dutycycle(std::vector<DutySample> samples);

/**
 * Fits r(xi) = 1/(1 + b_r xi^beta) through the transformed relation
 * ln(1/r - 1) = ln b_r + beta ln xi: beta on a [0.05, 1] grid (step 0.01)
 * with closed-form ln b_r per beta, golden-section refinement on beta.
 * residual_rms is reported in fraction space. Deterministic.
 */
FitResult<UniversalRelaxModel> fit_universal_relax(std::vector<RelaxSample> samples);

}
