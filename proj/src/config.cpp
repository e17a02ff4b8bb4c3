#include "bti/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "bti/csv_io.hpp"
#include "bti/errors.hpp"

namespace bti {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Grammar: every key the six sections accept. The waveform section is
// kind-aware (see check_waveform_keys).
const std::map<std::string, std::set<std::string>>& grammar() {
    static const std::map<std::string, std::set<std::string>> g = {
        {"device", {"eot_nm", "v_t0_v", "c_ox_f_cm2", "temperature_k"}},
        {"waveform",
         {"kind", "v_stress_v", "v_read_v", "stress_duration_s", "relax_duration_s",
          "read_pulse_width_s", "read_to_relax_delay_s", "v_relax_v", "frequency_hz", "duty",
          "pattern", "target_cumulative_stress_s", "grid_t_min_s", "grid_t_max_s",
          "grid_points_per_decade"}},
        {"ensemble",
         {"file", "n_traps", "tau_c_min_s", "tau_c_max_s", "tau_e_min_s", "tau_e_max_s",
          "total_eta_v", "field_threshold_min_mvcm", "field_threshold_max_mvcm", "ea_capture_ev",
          "ea_emission_ev", "reference_temperature_k", "reference_field_mvcm", "seed"}},
        {"simulate", {"threads"}},
        {"fit", {"kind"}},        // reserved; the fit subcommand is flag-driven
        {"ttf", {"tolerance_mv"}}  // reserved; the ttf subcommand is flag-driven
    };
    return g;
}

const std::set<std::string> kDcOnly = {"v_read_v", "stress_duration_s", "relax_duration_s",
                                       "read_pulse_width_s", "read_to_relax_delay_s"};
const std::set<std::string> kAcOnly = {"v_relax_v", "frequency_hz", "duty", "pattern",
                                       "target_cumulative_stress_s"};

void complain(const ConfigOptions& opt, std::vector<std::string>* warnings,
              const std::string& msg, int line) {
    if (!opt.lenient) throw config_error(msg, line);
    if (warnings)
        warnings->push_back(msg + (line >= 0 ? " (line " + std::to_string(line) + ")" : ""));
}

// Validates every section/key in the file against the grammar.
void check_grammar(const ParsedConfig& cfg, const ConfigOptions& opt,
                   std::vector<std::string>* warnings) {
    for (const auto& [section, keys] : cfg.sections) {
        auto git = grammar().find(section);
        if (git == grammar().end()) {
            int line = -1;
            if (auto it = cfg.section_lines.find(section); it != cfg.section_lines.end())
                line = it->second;
            complain(opt, warnings, cfg.path + ": unknown section [" + section + "]", line);
            continue;
        }
        for (const auto& [key, entry] : keys)
            if (!git->second.count(key))
                complain(opt, warnings,
                         cfg.path + ": unknown key '" + key + "' in [" + section + "]",
                         entry.line);
    }
}

// Kind-aware pass over [waveform]: DC keys in an AC schedule (or vice versa)
// are configuration mistakes even though the grammar knows the names.
void check_waveform_keys(const ParsedConfig& cfg, bool is_dc, const ConfigOptions& opt,
                         std::vector<std::string>* warnings) {
    auto sit = cfg.sections.find("waveform");
    if (sit == cfg.sections.end()) return;
    const auto& wrong = is_dc ? kAcOnly : kDcOnly;
    const char* kind = is_dc ? "dc" : "ac";
    for (const auto& [key, entry] : sit->second)
        if (wrong.count(key))
            complain(opt, warnings,
                     cfg.path + ": key '" + key + "' does not apply to kind = " + std::string(kind),
                     entry.line);
}

double to_double(const ConfigEntry& e, const std::string& where) {
    char* end = nullptr;
    const std::string v = e.value;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error("expected a number for " + where + ", got '" + v + "'", e.line);
    return x;
}

long long to_int(const ConfigEntry& e, const std::string& where) {
    char* end = nullptr;
    const std::string v = e.value;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error("expected an integer for " + where + ", got '" + v + "'", e.line);
    return x;
}

std::uint64_t to_uint64(const ConfigEntry& e, const std::string& where) {
    char* end = nullptr;
    const std::string v = e.value;
    if (!v.empty() && v[0] == '-')
        throw config_error("expected a non-negative integer for " + where + ", got '" + v + "'",
                           e.line);
    const std::uint64_t x = std::strtoull(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size())
        throw config_error("expected a non-negative integer for " + where + ", got '" + v + "'",
                           e.line);
    return x;
}

// Small helpers binding section/key lookups with defaults.
struct Section {
    const ParsedConfig& cfg;
    std::string name;

    const ConfigEntry* find(const std::string& key) const { return cfg.find(name, key); }

    const ConfigEntry& need(const std::string& key) const {
        const ConfigEntry* e = find(key);
        if (!e)
            throw config_error(cfg.path + ": [" + name + "] is missing required key '" + key + "'",
                               cfg.section_lines.count(name) ? cfg.section_lines.at(name) : -1);
        return *e;
    }

    double num(const std::string& key, double fallback) const {
        const ConfigEntry* e = find(key);
        return e ? to_double(*e, "[" + name + "] " + key) : fallback;
    }

    double num_req(const std::string& key) const {
        return to_double(need(key), "[" + name + "] " + key);
    }
};

}

const ConfigEntry* ParsedConfig::find(const std::string& section, const std::string& key) const {
    auto sit = sections.find(section);
    if (sit == sections.end()) return nullptr;
    auto kit = sit->second.find(key);
    return kit == sit->second.end() ? nullptr : &kit->second;
}

ParsedConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();

    ParsedConfig cfg;
    cfg.path = path;
    const std::size_t slash = path.find_last_of('/');
    cfg.dir = slash == std::string::npos ? std::string(".") : path.substr(0, slash);

    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char hex[24];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    cfg.hash_hex = hex;

    std::istringstream stream(bytes);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3)
                throw config_error(path + ": malformed section header '" + t + "'", lineno);
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw config_error(path + ": empty section name", lineno);
            if (!cfg.section_lines.count(section)) cfg.section_lines[section] = lineno;
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ": expected 'key = value', got '" + t + "'", lineno);
        if (section.empty())
            throw config_error(path + ": key outside any [section]", lineno);
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty()) throw config_error(path + ": empty key", lineno);
        auto [it, inserted] = cfg.sections[section].emplace(key, ConfigEntry{value, lineno});
        if (!inserted)
            throw config_error(path + ": duplicate key '" + key + "' in [" + section +
                                   "] (first defined on line " + std::to_string(it->second.line) +
                                   ")",
                               lineno);
    }
    return cfg;
}

Waveform RunConfig::build_waveform() const {
    if (dc) return build_dc_waveform(*dc);
    if (ac) return build_ac_waveform(*ac);
    throw domain_error("RunConfig: no waveform configured");
}

RunConfig extract_run_config(const ParsedConfig& cfg, const ConfigOptions& opt,
                             std::vector<std::string>* warnings) {
    check_grammar(cfg, opt, warnings);
    for (const char* s : {"device", "waveform", "ensemble"})
        if (!cfg.has_section(s))
            throw config_error(cfg.path + ": missing required section [" + std::string(s) + "]");

    RunConfig rc;
    rc.config_hash = cfg.hash_hex;

    const Section dev{cfg, "device"};
    rc.device.eot_nm = dev.num("eot_nm", rc.device.eot_nm);
    rc.device.v_t0_v = dev.num("v_t0_v", rc.device.v_t0_v);
    rc.device.c_ox_f_cm2 = dev.num("c_ox_f_cm2", rc.device.c_ox_f_cm2);
    rc.device.temperature_k = dev.num("temperature_k", rc.device.temperature_k);

    const Section wf{cfg, "waveform"};
    const ConfigEntry& kind = wf.need("kind");
    LogGrid grid;
    grid.t_min_s = wf.num_req("grid_t_min_s");
    grid.t_max_s = wf.num_req("grid_t_max_s");
    grid.points_per_decade = static_cast<int>(to_int(wf.need("grid_points_per_decade"),
                                                     "[waveform] grid_points_per_decade"));
    if (kind.value == "dc") {
        check_waveform_keys(cfg, true, opt, warnings);
        DcStressSpec spec;
        spec.v_stress_v = wf.num("v_stress_v", spec.v_stress_v);
        spec.v_read_v = wf.num("v_read_v", spec.v_read_v);
        spec.stress_duration_s = wf.num_req("stress_duration_s");
        spec.relax_duration_s = wf.num("relax_duration_s", spec.relax_duration_s);
        spec.read_pulse_width_s = wf.num("read_pulse_width_s", spec.read_pulse_width_s);
        spec.read_to_relax_delay_s = wf.num("read_to_relax_delay_s", spec.read_to_relax_delay_s);
        spec.sample_grid = grid;
        rc.dc = spec;
    } else if (kind.value == "ac") {
        check_waveform_keys(cfg, false, opt, warnings);
        AcStressSpec spec;
        spec.v_stress_v = wf.num("v_stress_v", spec.v_stress_v);
        spec.v_relax_v = wf.num("v_relax_v", spec.v_relax_v);
        spec.frequency_hz = wf.num_req("frequency_hz");
        spec.duty = wf.num_req("duty");
        spec.target_cumulative_stress_s = wf.num_req("target_cumulative_stress_s");
        if (const ConfigEntry* p = wf.find("pattern")) {
            const auto pat = pattern_from_string(p->value);
            if (!pat)
                throw config_error(cfg.path + ": unknown pattern '" + p->value +
                                       "' (expected relax-stress-measure or stress-relax-measure)",
                                   p->line);
            spec.pattern = *pat;
        }
        spec.sample_grid = grid;
        rc.ac = spec;
    } else {
        throw config_error(cfg.path + ": [waveform] kind must be 'dc' or 'ac', got '" +
                               kind.value + "'",
                           kind.line);
    }

    const Section ens{cfg, "ensemble"};
    if (const ConfigEntry* file = ens.find("file")) {
        for (const auto& [key, entry] : cfg.sections.at("ensemble"))
            if (key != "file")
                throw config_error(cfg.path + ": [ensemble] mixes 'file' with generation key '" +
                                       key + "'; use one or the other",
                                   entry.line);
        if (file->value.empty())
            throw config_error(cfg.path + ": [ensemble] file path is empty", file->line);
        rc.ensemble_file =
            file->value.front() == '/' ? file->value : cfg.dir + "/" + file->value;
    } else {
        rc.gen.n_traps = static_cast<int>(to_int(ens.need("n_traps"), "[ensemble] n_traps"));
        rc.gen.tau_c_min_s = ens.num_req("tau_c_min_s");
        rc.gen.tau_c_max_s = ens.num_req("tau_c_max_s");
        rc.gen.tau_e_min_s = ens.num_req("tau_e_min_s");
        rc.gen.tau_e_max_s = ens.num_req("tau_e_max_s");
        rc.gen.total_eta_v = ens.num_req("total_eta_v");
        rc.gen.field_threshold_min_mvcm =
            ens.num("field_threshold_min_mvcm", rc.gen.field_threshold_min_mvcm);
        rc.gen.field_threshold_max_mvcm =
            ens.num("field_threshold_max_mvcm", rc.gen.field_threshold_max_mvcm);
        rc.gen.ea_capture_ev = ens.num("ea_capture_ev", rc.gen.ea_capture_ev);
        rc.gen.ea_emission_ev = ens.num("ea_emission_ev", rc.gen.ea_emission_ev);
        rc.gen.reference_temperature_k =
            ens.num("reference_temperature_k", rc.gen.reference_temperature_k);
        rc.gen.reference_field_mvcm = ens.num("reference_field_mvcm", rc.gen.reference_field_mvcm);
        if (const ConfigEntry* s = ens.find("seed"))
            rc.seed = to_uint64(*s, "[ensemble] seed");
    }

    if (cfg.has_section("simulate")) {
        const Section sim{cfg, "simulate"};
        if (const ConfigEntry* t = sim.find("threads"))
            rc.threads = static_cast<int>(to_int(*t, "[simulate] threads"));
    }
    return rc;
}

GenEnsembleConfig extract_gen_config(const ParsedConfig& cfg, const ConfigOptions& opt,
                                     std::vector<std::string>* warnings) {
    check_grammar(cfg, opt, warnings);
    if (!cfg.has_section("ensemble"))
        throw config_error(cfg.path + ": missing required section [ensemble]");
    const Section ens{cfg, "ensemble"};
    if (const ConfigEntry* f = ens.find("file"))
        throw config_error(cfg.path +
                               ": [ensemble] references a file; gen-ensemble needs the generation "
                               "keys (n_traps, ranges, total_eta_v)",
                           f->line);

    GenEnsembleConfig out;
    out.config_hash = cfg.hash_hex;
    out.gen.n_traps = static_cast<int>(to_int(ens.need("n_traps"), "[ensemble] n_traps"));
    out.gen.tau_c_min_s = ens.num_req("tau_c_min_s");
    out.gen.tau_c_max_s = ens.num_req("tau_c_max_s");
    out.gen.tau_e_min_s = ens.num_req("tau_e_min_s");
    out.gen.tau_e_max_s = ens.num_req("tau_e_max_s");
    out.gen.total_eta_v = ens.num_req("total_eta_v");
    out.gen.field_threshold_min_mvcm =
        ens.num("field_threshold_min_mvcm", out.gen.field_threshold_min_mvcm);
    out.gen.field_threshold_max_mvcm =
        ens.num("field_threshold_max_mvcm", out.gen.field_threshold_max_mvcm);
    out.gen.ea_capture_ev = ens.num("ea_capture_ev", out.gen.ea_capture_ev);
    out.gen.ea_emission_ev = ens.num("ea_emission_ev", out.gen.ea_emission_ev);
    out.gen.reference_temperature_k =
        ens.num("reference_temperature_k", out.gen.reference_temperature_k);
    out.gen.reference_field_mvcm = ens.num("reference_field_mvcm", out.gen.reference_field_mvcm);
    if (const ConfigEntry* s = ens.find("seed")) out.seed = to_uint64(*s, "[ensemble] seed");
    return out;
}

TrapEnsemble load_ensemble(const RunConfig& rc) {
    if (!rc.ensemble_file.empty()) return read_ensemble_csv(rc.ensemble_file);
    return gen_ensemble(rc.gen, rc.seed);
}

}
