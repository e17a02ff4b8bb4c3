// Kernel benchmark: naive per-cycle serial integration vs the analytic
// cycle-composition kernel (serial and threaded). Prints one line per case;
// run from anywhere, no inputs.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "bti/reference.hpp"
#include "bti/trapsim.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_rel_diff(const bti::DegradationTrace& a, const bti::DegradationTrace& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.samples.size() && i < b.samples.size(); ++i) {
        const double va = a.samples[i].delta_vt_v;
        const double vb = b.samples[i].delta_vt_v;
        const double scale = std::max(std::fabs(va), std::fabs(vb));
        if (scale > 0) worst = std::max(worst, std::fabs(va - vb) / scale);
    }
    return worst;
}

}

int main() {
    bti::EnsembleGenSpec spec;
    spec.n_traps = 2000;
    spec.tau_c_min_s = 1e-4;
    spec.tau_c_max_s = 1e2;
    spec.tau_e_min_s = 1e-4;
    spec.tau_e_max_s = 1e2;
    spec.total_eta_v = 0.3;
    spec.reference_temperature_k = 298.0;
    const bti::TrapEnsemble ensemble = bti::gen_ensemble(spec, 7);

    bti::DeviceParams device;
    const double temperature = 298.0;

    // Case A: 1e4 cycles, feasible for the naive path.
    bti::AcStressSpec small;
    small.frequency_hz = 1e3;
    small.duty = 0.5;
    small.target_cumulative_stress_s = 5.0;  // 10^4 cycles at 0.5 ms stress each
    small.sample_grid = {1e-3, 5.0, 5};
    const bti::Waveform wf_small = bti::build_ac_waveform(small);

    // Case B: 5e8 cycles, analytic path only.
    bti::AcStressSpec big;
    big.frequency_hz = 1e7;
    big.duty = 0.5;
    big.target_cumulative_stress_s = 25.0;  // 5 * 10^8 cycles at 50 ns stress each
    big.sample_grid = {1e-3, 25.0, 5};
    const bti::Waveform wf_big = bti::build_ac_waveform(big);

    int max_threads = 1;
#ifdef _OPENMP
    max_threads = omp_get_max_threads();
#endif

    std::printf("%-38s %10s %12s\n", "case", "time [s]", "rows");

    auto t0 = Clock::now();
    const bti::DegradationTrace naive = bti::reference::simulate_expanded(
        ensemble, wf_small, device, temperature, small.sample_grid);
    const double t_naive = seconds_since(t0);
    std::printf("%-38s %10.3f %12zu\n", "naive per-cycle serial, 1e4 cycles", t_naive,
                naive.samples.size());

    t0 = Clock::now();
    bti::SimOptions serial_opt;
    serial_opt.threads = 1;
    const bti::DegradationTrace fast1 =
        bti::simulate(ensemble, wf_small, device, temperature, small.sample_grid, serial_opt);
    const double t_fast1 = seconds_since(t0);
    std::printf("%-38s %10.3f %12zu\n", "analytic serial, 1e4 cycles", t_fast1,
                fast1.samples.size());

    std::printf("  -> speedup vs naive: %.0fx, max rel diff %.2e\n",
                t_fast1 > 0 ? t_naive / t_fast1 : 0.0, max_rel_diff(naive, fast1));

    t0 = Clock::now();
    const bti::DegradationTrace big1 =
        bti::simulate(ensemble, wf_big, device, temperature, big.sample_grid, serial_opt);
    const double t_big1 = seconds_since(t0);
    std::printf("%-38s %10.3f %12zu\n", "analytic serial, 5e8 cycles", t_big1,
                big1.samples.size());

    t0 = Clock::now();
    bti::SimOptions omp_opt;
    omp_opt.threads = max_threads;
    const bti::DegradationTrace bign =
        bti::simulate(ensemble, wf_big, device, temperature, big.sample_grid, omp_opt);
    const double t_bign = seconds_since(t0);
    std::printf("%-38s %10.3f %12zu  (%d threads)\n", "analytic threaded, 5e8 cycles", t_bign,
                bign.samples.size(), max_threads);

    double worst = 0.0;
    for (std::size_t i = 0; i < big1.samples.size(); ++i)
        worst = std::max(worst,
                         std::fabs(big1.samples[i].delta_vt_v - bign.samples[i].delta_vt_v));
    std::printf("  -> threaded vs serial abs diff: %.1e (must be 0)\n", worst);
    return worst == 0.0 ? 0 : 1;
}
