#include "bti/models.hpp"

#include <cmath>
#include <string>

namespace bti {

namespace {

bool finite(double x) { return std::isfinite(x); }

void require(bool ok, const std::string& what) {
    if (!ok) throw domain_error(what);
}

}

void validate(const DeviceParams& d) {
    require(finite(d.eot_nm) && d.eot_nm > 0, "DeviceParams: eot_nm must be > 0");
    require(finite(d.v_t0_v), "DeviceParams: v_t0_v must be finite");
    require(finite(d.c_ox_f_cm2) && d.c_ox_f_cm2 > 0, "DeviceParams: c_ox_f_cm2 must be > 0");
    require(finite(d.temperature_k) && d.temperature_k > 0, "DeviceParams: temperature_k must be > 0");
}

void validate(const PowerLawModel& m) {
    require(finite(m.c0) && m.c0 >= 0, "PowerLawModel: c0 must be >= 0");
    require(finite(m.m) && m.m > 0, "PowerLawModel: m must be > 0");
    require(finite(m.alpha) && m.alpha > 0 && m.alpha < 1, "PowerLawModel: alpha must lie in (0, 1)");
}

void validate(const DutyCycleLogModel& m) {
    require(finite(m.a) && m.a >= 0, "DutyCycleLogModel: a must be >= 0");
    require(finite(m.b) && m.b > 0, "DutyCycleLogModel: b must be > 0");
}

void validate(const TrapPhysicalParams& p) {
    require(finite(p.d_ot) && p.d_ot > 0, "TrapPhysicalParams: d_ot must be > 0");
    require(finite(p.x_o_cm) && p.x_o_cm > 0, "TrapPhysicalParams: x_o_cm must be > 0");
    require(finite(p.c_ox_f_cm2) && p.c_ox_f_cm2 > 0, "TrapPhysicalParams: c_ox_f_cm2 must be > 0");
    require(finite(p.e_window_ev) && p.e_window_ev > 0, "TrapPhysicalParams: e_window_ev must be > 0");
    require(finite(p.tau_oc_s) && p.tau_oc_s > 0, "TrapPhysicalParams: tau_oc_s must be > 0");
    require(finite(p.tau_oe_s) && p.tau_oe_s > 0, "TrapPhysicalParams: tau_oe_s must be > 0");
}

void validate(const UniversalRelaxModel& m) {
    require(finite(m.b_r) && m.b_r > 0, "UniversalRelaxModel: b_r must be > 0");
    require(finite(m.beta) && m.beta > 0 && m.beta <= 1, "UniversalRelaxModel: beta must lie in (0, 1]");
}

double normalized_field_mvcm(double v_gs_v, double v_t_v, double eot_nm) {
    require(finite(eot_nm) && eot_nm > 0, "normalized_field: eot_nm must be > 0");
    // V/nm -> MV/cm: 1 V/nm = 1e7 V/cm = 10 MV/cm.
    return (v_gs_v - v_t_v) / eot_nm * 10.0;
}

double powerlaw_eval(const PowerLawModel& m, double xi_mvcm, double t_s) {
    require(finite(t_s) && t_s > 0, "powerlaw_eval: t_s must be > 0");
    require(finite(xi_mvcm), "powerlaw_eval: xi must be finite");
    return -(m.c0 * std::pow(std::fabs(xi_mvcm), m.m) * std::pow(t_s, m.alpha));
}

double stress_relax_ratio(double duty) {
    require(finite(duty) && duty >= 0 && duty < 1, "stress_relax_ratio: duty must lie in [0, 1)");
    return duty / (1.0 - duty);
}

double dutycycle_eval(const DutyCycleLogModel& m, double duty) {
    return m.a * std::log1p(m.b * stress_relax_ratio(duty));
}

DutyCycleLogModel dutycycle_from_physical(const TrapPhysicalParams& p) {
    validate(p);
    DutyCycleLogModel out;
    out.a = constants::kElementaryChargeC * p.d_ot * p.x_o_cm * p.e_window_ev / p.c_ox_f_cm2;
    out.b = p.tau_oe_s / p.tau_oc_s;
    return out;
}

double universal_relax_eval(const UniversalRelaxModel& m, double t_relax_s, double t_stress_s) {
    require(finite(t_stress_s) && t_stress_s > 0, "universal_relax_eval: t_stress must be > 0");
    require(finite(t_relax_s) && t_relax_s >= 0, "universal_relax_eval: t_relax must be >= 0");
    const double xi = t_relax_s / t_stress_s;
    return 1.0 / (1.0 + m.b_r * std::pow(xi, m.beta));
}

}
