#pragma once

#include "bti/trapsim.hpp"

namespace bti::reference {

/**
 * Serial oracle: expands every cycle and applies the per-segment closed-form
 * update one interval at a time (no affine composition, no fixed point, no
 * threads). Cost is linear in total cycle count, so it throws when the
 * schedule would expand past max_segments. Used to validate the fast kernel.
 */
DegradationTrace simulate_expanded(const TrapEnsemble& ensemble, const Waveform& waveform,
                                   const DeviceParams& device, double temperature_k,
                                   const LogGrid& grid,
                                   std::uint64_t max_segments = 200'000'000ULL);

/**
 * Brute-force oracle independent of the exponential solution: integrates
 * dp/dt = (1 - p)/tau_c - p/tau_e with classic fourth-order Runge-Kutta at a
 * fixed step of tau_eff * step_fraction inside each constant-bias interval.
 * Serial, expands cycles like simulate_expanded, throws past max_steps.
 */
DegradationTrace simulate_rk4(const TrapEnsemble& ensemble, const Waveform& waveform,
                              const DeviceParams& device, double temperature_k,
                              const LogGrid& grid, double step_fraction = 1e-4,
                              std::uint64_t max_steps = 2'000'000'000ULL);

}
