#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bti/analysis.hpp"
#include "bti/config.hpp"
#include "bti/csv_io.hpp"
#include "bti/errors.hpp"
#include "bti/fitting.hpp"
#include "bti/trapsim.hpp"
#include "bti/version.hpp"

namespace {

using nlohmann::json;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw bti::config_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw bti::config_error("write to '" + path + "' failed");
}

json ttf_to_json(const bti::TtfReport& rep) {
    json j;
    j["tolerance"] = rep.tolerance_v;
    j["ttf"] = rep.ttf_cum_stress_s ? json(*rep.ttf_cum_stress_s) : json(nullptr);
    j["crossing_method"] = rep.crossing_method;
    if (rep.ttf_wall_s) j["ttf_wall"] = *rep.ttf_wall_s;
    if (rep.reference_ttf_s) j["reference_ttf"] = *rep.reference_ttf_s;
    if (rep.extension_ratio) j["extension_ratio"] = *rep.extension_ratio;
    j["ratio_is_lower_bound"] = rep.ratio_is_lower_bound;
    j["tool_version"] = bti::kToolVersion;
    return j;
}

void print_ttf(const bti::TtfReport& rep) {
    std::cout << "tolerance_v = " << bti::format_g17(rep.tolerance_v) << "\n";
    if (rep.ttf_cum_stress_s)
        std::cout << "ttf_cum_stress_s = " << bti::format_g17(*rep.ttf_cum_stress_s) << "\n";
    else
        std::cout << "ttf_cum_stress_s = not-reached\n";
    std::cout << "crossing_method = " << rep.crossing_method << "\n";
    if (rep.ttf_wall_s)
        std::cout << "ttf_wall_s = " << bti::format_g17(*rep.ttf_wall_s) << "\n";
    if (rep.reference_ttf_s)
        std::cout << "reference_ttf_s = " << bti::format_g17(*rep.reference_ttf_s) << "\n";
    if (rep.extension_ratio)
        std::cout << "extension_ratio = " << bti::format_g17(*rep.extension_ratio)
                  << (rep.ratio_is_lower_bound ? " (lower bound: subject never crossed)" : "")
                  << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"btikit: BTI aging simulation, model fitting, and lifetime analysis"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out;
    bool sim_lenient = false;
    int sim_threads = -1;
    CLI::App* sim = app.add_subcommand("simulate", "Run a stress schedule over a trap ensemble");
    sim->add_option("--config", sim_config, "Run configuration file")->required();
    sim->add_option("--out", sim_out, "Output trace CSV")->required();
    sim->add_option("--threads", sim_threads, "Worker threads (0 = library default)");
    sim->add_flag("--lenient", sim_lenient, "Downgrade unknown config keys to warnings");

    // gen-ensemble
    std::string gen_config, gen_out;
    bool gen_lenient = false;
    std::uint64_t gen_seed = 0;
    bool gen_seed_set = false;
    CLI::App* gen = app.add_subcommand("gen-ensemble", "Sample a trap ensemble to CSV");
    gen->add_option("--config", gen_config, "Config with an [ensemble] generation recipe")
        ->required();
    gen->add_option("--seed", gen_seed, "Sampling seed (overrides the config's seed)")
        ->each([&gen_seed_set](const std::string&) { gen_seed_set = true; });
    gen->add_option("--out", gen_out, "Output ensemble CSV")->required();
    gen->add_flag("--lenient", gen_lenient, "Downgrade unknown config keys to warnings");

    // fit powerlaw|duty|relax
    std::string fit_in, fit_out;
    CLI::App* fit = app.add_subcommand("fit", "Fit an empirical model to sampled data");
    fit->require_subcommand(1);
    CLI::App* fit_pl = fit->add_subcommand("powerlaw", "|dVt| = c0 |xi|^m t^alpha");
    CLI::App* fit_duty = fit->add_subcommand("duty", "|dVt|(D) = a ln(1 + b D/(1-D))");
    CLI::App* fit_relax = fit->add_subcommand("relax", "r(xi) = 1/(1 + b_r xi^beta)");
    for (CLI::App* f : {fit_pl, fit_duty, fit_relax}) {
        f->add_option("--in", fit_in, "Input CSV")->required();
        f->add_option("--out", fit_out, "Output parameter JSON")->required();
    }

    // ttf
    std::string ttf_trace, ttf_reference, ttf_json;
    double ttf_tol_mv = 0.0;
    CLI::App* ttf = app.add_subcommand("ttf", "Project time-to-failure from a trace");
    ttf->add_option("--trace", ttf_trace, "Trace CSV to project")->required();
    ttf->add_option("--reference", ttf_reference, "Reference trace CSV for the extension ratio");
    ttf->add_option("--tolerance-mv", ttf_tol_mv, "Failure tolerance |dVt| in mV")->required();
    ttf->add_option("--json", ttf_json, "Also write the report as JSON");

    // cdf
    std::string cdf_in, cdf_out, cdf_baseline, cdf_json;
    bool cdf_signed = false;
    CLI::App* cdf = app.add_subcommand("cdf", "Empirical CDF of ambient-drift shifts");
    cdf->add_option("--in", cdf_in, "Input CSV with a delta_vt_v column")->required();
    cdf->add_option("--out", cdf_out, "Output CDF CSV (value_v,fraction)")->required();
    cdf->add_option("--baseline", cdf_baseline,
                    "Baseline CSV; reports improvement_ratio = median(baseline)/median(in)");
    cdf->add_flag("--signed", cdf_signed, "Keep signs (default: magnitudes)");
    cdf->add_option("--json", cdf_json, "Also write the summary as JSON");

    // dit
    double dit_ss = 0.0, dit_temp = 0.0, dit_cox = 0.0;
    std::string dit_json;
    CLI::App* dit = app.add_subcommand("dit", "Interface-trap density from subthreshold swing");
    dit->add_option("--ss-mv-dec", dit_ss, "Subthreshold swing, mV/decade")->required();
    dit->add_option("--temp-k", dit_temp, "Temperature, K")->required();
    dit->add_option("--cox-f-cm2", dit_cox, "Gate capacitance, F/cm^2")->required();
    dit->add_option("--json", dit_json, "Also write the estimate as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? 0 : 2;
    }

    if (*sim) {
        std::vector<std::string> warnings;
        const bti::ParsedConfig cfg = bti::parse_config_file(sim_config);
        const bti::RunConfig rc = bti::extract_run_config(cfg, {sim_lenient}, &warnings);
        print_warnings(warnings);
        const bti::Waveform wf = rc.build_waveform();
        const bti::TrapEnsemble ensemble = bti::load_ensemble(rc);
        const bti::LogGrid grid = rc.dc ? rc.dc->sample_grid : rc.ac->sample_grid;
        bti::SimOptions opt;
        opt.threads = sim_threads >= 0 ? sim_threads : rc.threads;
        const bti::DegradationTrace trace =
            bti::simulate(ensemble, wf, rc.device, rc.device.temperature_k, grid, opt);
        bti::write_trace_csv(sim_out, trace,
                             {{"tool_version", bti::kToolVersion},
                              {"config_hash", rc.config_hash},
                              {"seed", std::to_string(ensemble.seed)}});
        std::cout << "seed = " << ensemble.seed << "\n"
                  << "config_hash = " << rc.config_hash << "\n"
                  << "n_traps = " << ensemble.traps.size() << "\n"
                  << "rows = " << trace.samples.size() << "\n"
                  << "final_delta_vt_v = " << bti::format_g17(trace.samples.back().delta_vt_v)
                  << "\n";
    } else if (*gen) {
        std::vector<std::string> warnings;
        const bti::ParsedConfig cfg = bti::parse_config_file(gen_config);
        const bti::GenEnsembleConfig gc = bti::extract_gen_config(cfg, {gen_lenient}, &warnings);
        print_warnings(warnings);
        const std::uint64_t seed = gen_seed_set ? gen_seed : gc.seed;
        const bti::TrapEnsemble ensemble = bti::gen_ensemble(gc.gen, seed);
        bti::write_ensemble_csv(gen_out, ensemble,
                                {{"tool_version", bti::kToolVersion},
                                 {"config_hash", gc.config_hash}});
        std::cout << "seed = " << seed << "\n"
                  << "config_hash = " << gc.config_hash << "\n"
                  << "n_traps = " << ensemble.traps.size() << "\n"
                  << "total_eta_v = " << bti::format_g17(ensemble.total_eta_v()) << "\n";
    } else if (*fit_pl || *fit_duty || *fit_relax) {
        std::vector<std::string> warnings;
        json j;
        if (*fit_pl) {
            const auto samples = bti::read_powerlaw_csv(fit_in, &warnings);
            print_warnings(warnings);
            const auto res = bti::fit_powerlaw(samples);
            j["model"] = "powerlaw";
            j["params"] = {{"c0", res.params.c0}, {"m", res.params.m}, {"alpha", res.params.alpha}};
            j["residual_rms"] = res.residual_rms;
            j["n_points"] = res.n_points;
            j["converged"] = res.converged;
            j["search_trace_summary"] = res.search_trace_summary;
            std::cout << "c0 = " << bti::format_g17(res.params.c0) << "\n"
                      << "m = " << bti::format_g17(res.params.m) << "\n"
                      << "alpha = " << bti::format_g17(res.params.alpha) << "\n";
            std::cout << "residual_rms = " << bti::format_g17(res.residual_rms) << " V over "
                      << res.n_points << " points\n";
        } else if (*fit_duty) {
            const auto samples = bti::read_duty_csv(fit_in, &warnings);
            print_warnings(warnings);
            const auto res = bti::fit_dutycycle(samples);
            j["model"] = "duty";
            j["params"] = {{"a", res.params.a}, {"b", res.params.b}};
            j["residual_rms"] = res.residual_rms;
            j["n_points"] = res.n_points;
            j["converged"] = res.converged;
            j["search_trace_summary"] = res.search_trace_summary;
            std::cout << "a = " << bti::format_g17(res.params.a) << "\n"
                      << "b = " << bti::format_g17(res.params.b) << "\n"
                      << "residual_rms = " << bti::format_g17(res.residual_rms) << " V over "
                      << res.n_points << " points\n";
        } else {
            const auto samples = bti::read_relax_csv(fit_in, &warnings);
            print_warnings(warnings);
            const auto res = bti::fit_universal_relax(samples);
            j["model"] = "relax";
            j["params"] = {{"b_r", res.params.b_r}, {"beta", res.params.beta}};
            j["residual_rms"] = res.residual_rms;
            j["n_points"] = res.n_points;
            j["converged"] = res.converged;
            j["search_trace_summary"] = res.search_trace_summary;
            std::cout << "b_r = " << bti::format_g17(res.params.b_r) << "\n"
                      << "beta = " << bti::format_g17(res.params.beta) << "\n"
                      << "residual_rms = " << bti::format_g17(res.residual_rms) << " over "
                      << res.n_points << " points\n";
        }
        j["tool_version"] = bti::kToolVersion;
        j["input"] = fit_in;
        write_json_file(fit_out, j);
    } else if (*ttf) {
        const bti::DegradationTrace trace = bti::read_trace_csv(ttf_trace);
        const double tol_v = ttf_tol_mv / 1000.0;
        bti::TtfReport rep;
        if (!ttf_reference.empty()) {
            const bti::DegradationTrace ref = bti::read_trace_csv(ttf_reference);
            rep = bti::ttf_extension(trace, ref, tol_v);
        } else {
            rep = bti::ttf_project(trace, tol_v);
        }
        print_ttf(rep);
        if (!ttf_json.empty()) write_json_file(ttf_json, ttf_to_json(rep));
    } else if (*cdf) {
        std::vector<std::string> warnings;
        const std::vector<double> values = bti::read_values_csv(cdf_in, &warnings);
        print_warnings(warnings);
        const bti::CdfSummary summary = bti::ambient_cdf(values, cdf_signed);
        bti::write_cdf_csv(cdf_out, summary, {{"tool_version", bti::kToolVersion}});
        std::cout << "n = " << summary.n << "\n"
                  << "median_v = " << bti::format_g17(summary.median_v) << "\n";
        for (const auto& [p, v] : summary.quantiles)
            std::cout << "quantile_" << p << " = " << bti::format_g17(v) << "\n";
        json j;
        j["n"] = summary.n;
        j["median"] = summary.median_v;
        j["quantiles"] = json::array();
        for (const auto& [p, v] : summary.quantiles) j["quantiles"].push_back({p, v});
        j["cdf_points"] = json::array();
        for (const auto& [v, f] : summary.cdf_points) j["cdf_points"].push_back({v, f});
        if (!cdf_baseline.empty()) {
            std::vector<std::string> bwarn;
            const auto base = bti::ambient_cdf(bti::read_values_csv(cdf_baseline, &bwarn),
                                               cdf_signed);
            print_warnings(bwarn);
            if (summary.median_v == 0)
                throw bti::domain_error("cdf: median of --in is zero; improvement ratio undefined");
            const double ratio = base.median_v / summary.median_v;
            std::cout << "baseline_median_v = " << bti::format_g17(base.median_v) << "\n"
                      << "improvement_ratio = " << bti::format_g17(ratio) << "\n";
            j["baseline_median"] = base.median_v;
            j["improvement_ratio"] = ratio;
        }
        j["tool_version"] = bti::kToolVersion;
        if (!cdf_json.empty()) write_json_file(cdf_json, j);
    } else if (*dit) {
        const bti::DitEstimate est = bti::dit_from_subthreshold(dit_ss, dit_temp, dit_cox);
        std::cout << "ss_mv_per_dec = " << bti::format_g17(est.ss_mv_per_dec) << "\n"
                  << "temperature_k = " << bti::format_g17(est.temperature_k) << "\n"
                  << "c_ox_f_cm2 = " << bti::format_g17(est.c_ox_f_cm2) << "\n"
                  << "d_it_cm2_ev = " << bti::format_g17(est.d_it_cm2_ev) << "\n"
                  << "method = " << est.method << "\n";
        if (!dit_json.empty()) {
            json j;
            j["ss"] = est.ss_mv_per_dec;
            j["temperature"] = est.temperature_k;
            j["c_ox"] = est.c_ox_f_cm2;
            j["d_it"] = est.d_it_cm2_ev;
            j["method"] = est.method;
            j["tool_version"] = bti::kToolVersion;
            write_json_file(dit_json, j);
        }
    }
    return 0;
}

}

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bti::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const bti::fit_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const bti::no_reference_crossing& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const bti::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
