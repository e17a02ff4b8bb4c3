#include "bti/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <tuple>

#include "bti/errors.hpp"

namespace bti {

namespace {

constexpr double kGolden = 0.6180339887498949;  // 1/phi

std::string fmtg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::size_t count_distinct(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

// Golden-section minimization of f on [lo, hi], shrinking until
// hi - lo <= tol. Ties and flat stretches resolve deterministically (pure
// function of the bracket).
template <class F>
double golden_min(F f, double lo, double hi, double tol) {
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

// Relative spread of the grid objective; "flat" means the search cannot
// distinguish candidates beyond ~5%.
bool flat_objective(double j_min, double j_max) {
    return j_max - j_min <= 0.05 * std::max(j_min, 1e-300);
}

}

FitResult<PowerLawModel> fit_powerlaw(std::vector<FieldTimeSample> samples) {
    if (samples.size() < 3)
        throw fit_error("fit_powerlaw: needs at least 3 samples, got " +
                        std::to_string(samples.size()));

    // Reject rows the log transform cannot represent, listing them by their
    // position in the caller's order (before the determinism sort).
    std::string bad;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const FieldTimeSample& s = samples[i];
        const bool ok = std::isfinite(s.xi_mvcm) && std::isfinite(s.t_s) &&
                        std::isfinite(s.delta_vt_v) && std::fabs(s.xi_mvcm) > 0 && s.t_s > 0 &&
                        std::fabs(s.delta_vt_v) > 0;
        if (!ok) bad += (bad.empty() ? "" : ", ") + std::to_string(i);
    }
    if (!bad.empty())
        throw fit_error("fit_powerlaw: rows [" + bad +
                        "] have nonpositive |delta_vt|, t, or |xi| (log fit undefined)");

    std::sort(samples.begin(), samples.end(), [](const FieldTimeSample& a, const FieldTimeSample& b) {
        return std::tie(a.xi_mvcm, a.t_s, a.delta_vt_v) < std::tie(b.xi_mvcm, b.t_s, b.delta_vt_v);
    });

    std::vector<double> xi_mags, times;
    xi_mags.reserve(samples.size());
    times.reserve(samples.size());
    for (const FieldTimeSample& s : samples) {
        xi_mags.push_back(std::fabs(s.xi_mvcm));
        times.push_back(s.t_s);
    }
    const std::size_t n_xi = count_distinct(xi_mags);
    const std::size_t n_t = count_distinct(times);
    if (n_xi < 3)
        throw fit_error("fit_powerlaw: design is rank-deficient on the field axis (" +
                        std::to_string(n_xi) + " distinct |xi|, need 3)");
    if (n_t < 3)
        throw fit_error("fit_powerlaw: design is rank-deficient on the time axis (" +
                        std::to_string(n_t) + " distinct t, need 3)");

    // Centered OLS: y = log|dVt|, u = log|xi|, w = log t.
    const double n = static_cast<double>(samples.size());
    double su = 0, sw = 0, sy = 0;
    for (const FieldTimeSample& s : samples) {
        su += std::log(std::fabs(s.xi_mvcm));
        sw += std::log(s.t_s);
        sy += std::log(std::fabs(s.delta_vt_v));
    }
    const double mu = su / n, mw = sw / n, my = sy / n;
    double suu = 0, sww = 0, suw = 0, suy = 0, swy = 0;
    for (const FieldTimeSample& s : samples) {
        const double u = std::log(std::fabs(s.xi_mvcm)) - mu;
        const double w = std::log(s.t_s) - mw;
        const double y = std::log(std::fabs(s.delta_vt_v)) - my;
        suu += u * u;
        sww += w * w;
        suw += u * w;
        suy += u * y;
        swy += w * y;
    }
    const double det = suu * sww - suw * suw;
    if (!(det > 1e-12 * suu * sww))
        throw fit_error("fit_powerlaw: log|xi| and log t are collinear across samples; "
                        "they must vary independently");

    FitResult<PowerLawModel> out;
    out.params.m = (suy * sww - swy * suw) / det;
    out.params.alpha = (swy * suu - suy * suw) / det;
    out.params.c0 = std::exp(my - out.params.m * mu - out.params.alpha * mw);
    out.n_points = samples.size();
    out.converged = true;

    double sse = 0;
    for (const FieldTimeSample& s : samples) {
        const double pred = out.params.c0 * std::pow(std::fabs(s.xi_mvcm), out.params.m) *
                            std::pow(s.t_s, out.params.alpha);
        const double r = std::fabs(s.delta_vt_v) - pred;
        sse += r * r;
    }
    out.residual_rms = std::sqrt(sse / n);
    out.search_trace_summary = "closed-form least squares in log space (" +
                               std::to_string(samples.size()) + " rows, " + std::to_string(n_xi) +
                               " fields x " + std::to_string(n_t) + " times)";
    return out;
}

FitResult<DutyCycleLogModel> fit_dutycycle(std::vector<DutySample> samples) {
    if (samples.size() < 3)
        throw fit_error("fit_dutycycle: needs at least 3 samples, got " +
                        std::to_string(samples.size()));
    double shared_t = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const DutySample& s = samples[i];
        if (!(std::isfinite(s.duty) && s.duty >= 0 && s.duty < 1))
            throw fit_error("fit_dutycycle: row " + std::to_string(i) +
                            " has duty outside [0, 1)");
        if (!std::isfinite(s.delta_vt_mag_v) || s.delta_vt_mag_v < 0)
            throw fit_error("fit_dutycycle: row " + std::to_string(i) +
                            " has a negative or non-finite magnitude");
        if (s.t_stress_cumulative_s != 0.0) {
            if (shared_t == 0.0)
                shared_t = s.t_stress_cumulative_s;
            else if (s.t_stress_cumulative_s != shared_t)
                throw fit_error("fit_dutycycle: samples mix cumulative stress times " +
                                fmtg(shared_t) + " and " + fmtg(s.t_stress_cumulative_s) +
                                "; one sweep shares one time");
        }
    }

    std::vector<double> duties;
    for (const DutySample& s : samples) duties.push_back(s.duty);
    const std::size_t n_d = count_distinct(duties);
    if (n_d < 3)
        throw fit_error("fit_dutycycle: needs >= 3 distinct duty values, got " +
                        std::to_string(n_d));

    std::sort(samples.begin(), samples.end(), [](const DutySample& a, const DutySample& b) {
        return std::tie(a.duty, a.delta_vt_mag_v) < std::tie(b.duty, b.delta_vt_mag_v);
    });

    FitResult<DutyCycleLogModel> out;
    out.n_points = samples.size();

    bool all_zero = true;
    for (const DutySample& s : samples) all_zero = all_zero && s.delta_vt_mag_v == 0.0;
    if (all_zero) {
        out.params.a = 0.0;
        out.params.b = 1e-4;
        out.residual_rms = 0.0;
        out.converged = true;
        out.search_trace_summary =
            "all magnitudes zero: a = 0 exactly, b unidentifiable (reported at grid minimum)";
        return out;
    }

    // Closed-form a and magnitude-space objective for a candidate b.
    auto profile = [&samples](double b, double* a_out) {
        double sgg = 0, syg = 0;
        for (const DutySample& s : samples) {
            const double g = std::log1p(b * s.duty / (1.0 - s.duty));
            sgg += g * g;
            syg += s.delta_vt_mag_v * g;
        }
        const double a = sgg > 0 ? syg / sgg : 0.0;
        double j = 0;
        for (const DutySample& s : samples) {
            const double g = std::log1p(b * s.duty / (1.0 - s.duty));
            const double r = s.delta_vt_mag_v - a * g;
            j += r * r;
        }
        if (a_out) *a_out = a;
        return j;
    };

    // Stage 1: log-spaced grid over [1e-4, 1e6], 25 points per decade.
    constexpr int kGridN = 251;
    int best = 0;
    double best_j = 0, j_min = 0, j_max = 0;
    for (int j = 0; j < kGridN; ++j) {
        const double b = std::pow(10.0, -4.0 + static_cast<double>(j) / 25.0);
        const double obj = profile(b, nullptr);
        if (j == 0 || obj < best_j) {
            best_j = obj;
            best = j;
        }
        j_min = j == 0 ? obj : std::min(j_min, obj);
        j_max = j == 0 ? obj : std::max(j_max, obj);
    }

    // Stage 2: golden-section on log10 b between the neighbors of the best
    // grid point, to 1e-6 relative width in b.
    const double lo = -4.0 + static_cast<double>(std::max(0, best - 1)) / 25.0;
    const double hi = -4.0 + static_cast<double>(std::min(kGridN - 1, best + 1)) / 25.0;
    // Width 1e-6/ln10 on the log10 axis is exactly 1e-6 relative width in b.
    const double log_b = golden_min(
        [&profile](double lb) { return profile(std::pow(10.0, lb), nullptr); }, lo, hi,
        1e-6 / constants::kLn10);

    out.params.b = std::pow(10.0, log_b);
    const double j_final = profile(out.params.b, &out.params.a);
    if (out.params.a < 0) out.params.a = 0;  // negative amplitudes are non-physical
    out.residual_rms = std::sqrt(j_final / static_cast<double>(samples.size()));
    out.converged = true;
    std::ostringstream note;
    note << "grid best b = " << fmtg(std::pow(10.0, -4.0 + static_cast<double>(best) / 25.0))
         << ", refined to " << fmtg(out.params.b);
    if (flat_objective(j_min, j_max)) note << "; objective is flat across the b grid";
    out.search_trace_summary = note.str();
    return out;
}

FitResult<UniversalRelaxModel> fit_universal_relax(std::vector<RelaxSample> samples) {
    if (samples.size() < 3)
        throw fit_error("fit_universal_relax: needs at least 3 samples, got " +
                        std::to_string(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const RelaxSample& s = samples[i];
        if (!(std::isfinite(s.fraction) && s.fraction > 0 && s.fraction <= 1))
            throw fit_error("fit_universal_relax: row " + std::to_string(i) +
                            " has fraction outside (0, 1]");
        if (!(std::isfinite(s.xi_ratio) && s.xi_ratio >= 0))
            throw fit_error("fit_universal_relax: row " + std::to_string(i) +
                            " has a negative or non-finite xi_ratio");
    }

    std::sort(samples.begin(), samples.end(), [](const RelaxSample& a, const RelaxSample& b) {
        return std::tie(a.xi_ratio, a.fraction) < std::tie(b.xi_ratio, b.fraction);
    });

    FitResult<UniversalRelaxModel> out;
    out.n_points = samples.size();

    // Transformed points: z = ln(1/r - 1) = ln b_r + beta ln xi. Rows with
    // r = 1 (nothing relaxed) or xi = 0 carry no slope information.
    std::vector<double> lx, z;
    for (const RelaxSample& s : samples) {
        if (s.fraction < 1.0 && s.xi_ratio > 0) {
            lx.push_back(std::log(s.xi_ratio));
            z.push_back(std::log(1.0 / s.fraction - 1.0));
        }
    }
    if (lx.empty()) {
        out.params.b_r = 1e-4;
        out.params.beta = 0.05;
        out.converged = true;
        out.search_trace_summary =
            "no relaxation observed (all fractions 1): parameters unidentifiable, "
            "reported at grid minima";
        double sse = 0;
        for (const RelaxSample& s : samples) {
            const double r = s.fraction - universal_relax_eval(out.params, s.xi_ratio, 1.0);
            sse += r * r;
        }
        out.residual_rms = std::sqrt(sse / static_cast<double>(samples.size()));
        return out;
    }

    const double nz = static_cast<double>(lx.size());
    auto profile = [&](double beta, double* ln_br_out) {
        double s = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) s += z[i] - beta * lx[i];
        const double ln_br = s / nz;
        double j = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const double r = z[i] - ln_br - beta * lx[i];
            j += r * r;
        }
        if (ln_br_out) *ln_br_out = ln_br;
        return j;
    };

    // Stage 1: beta grid [0.05, 1.00], step 0.01.
    int best = 0;
    double best_j = 0, j_min = 0, j_max = 0;
    for (int i = 0; i <= 95; ++i) {
        const double beta = 0.05 + static_cast<double>(i) / 100.0;
        const double obj = profile(beta, nullptr);
        if (i == 0 || obj < best_j) {
            best_j = obj;
            best = i;
        }
        j_min = i == 0 ? obj : std::min(j_min, obj);
        j_max = i == 0 ? obj : std::max(j_max, obj);
    }

    // Stage 2: golden-section between the neighbors of the best grid beta.
    const double lo = 0.05 + static_cast<double>(std::max(0, best - 1)) / 100.0;
    const double hi = 0.05 + static_cast<double>(std::min(95, best + 1)) / 100.0;
    const double beta =
        golden_min([&profile](double b) { return profile(b, nullptr); }, lo, hi, 1e-6 * hi);

    double ln_br = 0;
    profile(beta, &ln_br);
    out.params.beta = beta;
    out.params.b_r = std::exp(ln_br);
    out.converged = true;

    double sse = 0;
    for (const RelaxSample& s : samples) {
        const double r = s.fraction - universal_relax_eval(out.params, s.xi_ratio, 1.0);
        sse += r * r;
    }
    out.residual_rms = std::sqrt(sse / static_cast<double>(samples.size()));
    std::ostringstream note;
    note << "grid best beta = " << fmtg(0.05 + static_cast<double>(best) / 100.0)
         << ", refined to " << fmtg(beta) << " over " << lx.size() << " transformable rows";
    if (flat_objective(j_min, j_max)) note << "; objective is flat across the beta grid";
    out.search_trace_summary = note.str();
    return out;
}

}
