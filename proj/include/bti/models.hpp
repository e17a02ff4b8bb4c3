#pragma once

#include "bti/errors.hpp"

namespace bti {

namespace constants {
// Elementary charge [C] and Boltzmann constant [eV/K], fixed so every build
// produces bit-identical numbers.
inline constexpr double kElementaryChargeC = 1.602176634e-19;
inline constexpr double kBoltzmannEvPerK = 8.617333e-5;
inline constexpr double kLn10 = 2.302585092994046;
}

// Static device parameters shared by the simulator and the analysis helpers.
struct DeviceParams {
    double eot_nm = 2.13;        // equivalent oxide thickness
    double v_t0_v = -0.3;        // pre-stress threshold voltage
    double c_ox_f_cm2 = 1.5e-6;  // areal gate capacitance
    double temperature_k = 298.0;
};

// Empirical stress dependence |dVt| = c0 * |xi|^m * t^alpha; evaluation
// reports the signed (negative) threshold shift.
struct PowerLawModel {
    double c0 = 0.0;     // V at unit field and unit time
    double m = 1.0;      // field exponent
    double alpha = 0.2;  // time exponent
};

// Duty-cycle dependence |dVt|(D) = a * ln(1 + b * D/(1-D)) at fixed
// cumulative stress (natural log).
struct DutyCycleLogModel {
    double a = 0.0;  // amplitude, V
    double b = 1.0;  // emission/capture time-constant ratio
};

// Physical parameters behind DutyCycleLogModel. d_ot is the oxide trap
// density per cm^3 per eV: together with the characteristic trapping depth
// x_o it forms an areal density, so `a` comes out in volts.
struct TrapPhysicalParams {
    double d_ot;         // cm^-3 eV^-1
    double x_o_cm;       // characteristic trap depth, cm
    double c_ox_f_cm2;   // F/cm^2
    double e_window_ev;  // Fermi-level excursion E_F - E_F0, eV
    double tau_oc_s;     // characteristic capture constant
    double tau_oe_s;     // characteristic emission constant
};

// Recovery fraction r(xi) = 1 / (1 + b_r * xi^beta), xi = t_relax/t_stress.
struct UniversalRelaxModel {
    double b_r = 1.0;
    double beta = 0.5;
};

void validate(const DeviceParams& d);
void validate(const PowerLawModel& m);
void validate(const DutyCycleLogModel& m);
void validate(const TrapPhysicalParams& p);
void validate(const UniversalRelaxModel& m);

// Oxide-field overdrive (v_gs - v_t) / eot expressed in MV/cm.
double normalized_field_mvcm(double v_gs_v, double v_t_v, double eot_nm);

// Signed threshold shift at field |xi| [MV/cm] and stress time t [s]; t > 0.
double powerlaw_eval(const PowerLawModel& m, double xi_mvcm, double t_s);

// D/(1-D); duty in [0, 1).
double stress_relax_ratio(double duty);

// |dVt| at duty D in [0, 1) for fixed cumulative stress.
double dutycycle_eval(const DutyCycleLogModel& m, double duty);

// a = q * d_ot * x_o * e_window / c_ox, b = tau_oe / tau_oc.
DutyCycleLogModel dutycycle_from_physical(const TrapPhysicalParams& p);

// Fraction of the stress-end shift still present after t_relax following
// t_stress; 1 at t_relax = 0, decreasing in t_relax.
double universal_relax_eval(const UniversalRelaxModel& m, double t_relax_s, double t_stress_s);

}
