#pragma once

#include <map>
#include <string>
#include <vector>

#include "bti/analysis.hpp"
#include "bti/fitting.hpp"
#include "bti/trace.hpp"
#include "bti/trapsim.hpp"

namespace bti {

// 17 significant digits: enough for bit-exact double round trips.
std::string format_g17(double v);

/**
 * CSV conventions shared by every file this tool reads or writes:
 * `# key = value` comment lines first (sorted by key on write), then the
 * header row, then data. Stripping the comments leaves plain CSV. Writers
 * never emit timestamps, so identical inputs produce byte-identical files.
 */

// Trace files: header `t_wall_s,t_cum_stress_s,delta_vt_v,phase`.
void write_trace_csv(const std::string& path, const DegradationTrace& trace,
                     const std::map<std::string, std::string>& extra_meta = {});
DegradationTrace read_trace_csv(const std::string& path);

// Ensemble files: header
// `tau_c_ref_s,tau_e_ref_s,eta_v,ea_capture_ev,ea_emission_ev,field_threshold_mvcm`;
// ensemble-level fields travel in the meta comments.
void write_ensemble_csv(const std::string& path, const TrapEnsemble& ensemble,
                        const std::map<std::string, std::string>& extra_meta = {});
TrapEnsemble read_ensemble_csv(const std::string& path);

// Fit inputs, columns located by name; unknown extra columns produce
// warnings, missing ones a config_error listing them, zero data rows a
// fit_error.
std::vector<FieldTimeSample> read_powerlaw_csv(const std::string& path,
                                               std::vector<std::string>* warnings = nullptr);
std::vector<DutySample> read_duty_csv(const std::string& path,
                                      std::vector<std::string>* warnings = nullptr);
std::vector<RelaxSample> read_relax_csv(const std::string& path,
                                        std::vector<std::string>* warnings = nullptr);

// Ambient-shift samples: single required column `delta_vt_v`.
std::vector<double> read_values_csv(const std::string& path,
                                    std::vector<std::string>* warnings = nullptr);

// CDF output: header `value_v,fraction`.
void write_cdf_csv(const std::string& path, const CdfSummary& summary,
                   const std::map<std::string, std::string>& extra_meta = {});

}
