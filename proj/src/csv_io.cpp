#include "bti/csv_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bti/errors.hpp"

namespace bti {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t c = line.find(',', pos);
        if (c == std::string::npos) {
            out.push_back(trim(line.substr(pos)));
            break;
        }
        out.push_back(trim(line.substr(pos, c - pos)));
        pos = c + 1;
    }
    return out;
}

double parse_double(const std::string& tok, const std::string& path, int line) {
    const std::string t = trim(tok);
    if (t.empty()) throw config_error(path + ": empty numeric field", line);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw config_error(path + ": cannot parse '" + t + "' as a number", line);
    return v;
}

// A CSV file split into meta comments, header names, and raw data rows.
struct RawCsv {
    std::map<std::string, std::string> meta;
    std::vector<std::string> header;
    std::vector<std::pair<int, std::vector<std::string>>> rows;  // (line number, fields)
    std::string path;
};

RawCsv read_raw_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open '" + path + "' for reading");
    RawCsv out;
    out.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            const std::size_t eq = t.find('=');
            if (eq != std::string::npos) {
                const std::string key = trim(t.substr(1, eq - 1));
                if (!key.empty()) out.meta[key] = trim(t.substr(eq + 1));
            }
            continue;
        }
        if (out.header.empty())
            out.header = split_csv(t);
        else
            out.rows.emplace_back(lineno, split_csv(t));
    }
    if (out.header.empty()) throw config_error(path + ": no header row found");
    return out;
}

void require_header(const RawCsv& csv, const std::string& expected) {
    std::string got;
    for (std::size_t i = 0; i < csv.header.size(); ++i)
        got += (i ? "," : "") + csv.header[i];
    if (got != expected)
        throw config_error(csv.path + ": expected header '" + expected + "', got '" + got + "'");
}

// Column lookup by name for the tolerant-by-name fit inputs.
std::vector<std::size_t> locate_columns(const RawCsv& csv, const std::vector<std::string>& names,
                                        std::vector<std::string>* warnings) {
    std::vector<std::size_t> idx(names.size());
    std::string missing;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::size_t found = csv.header.size();
        for (std::size_t j = 0; j < csv.header.size(); ++j)
            if (csv.header[j] == names[i]) {
                found = j;
                break;
            }
        if (found == csv.header.size())
            missing += (missing.empty() ? "" : ", ") + names[i];
        idx[i] = found;
    }
    if (!missing.empty())
        throw config_error(csv.path + ": missing required column(s): " + missing);
    if (warnings) {
        for (const std::string& h : csv.header) {
            bool known = false;
            for (const std::string& n : names) known = known || h == n;
            if (!known) warnings->push_back(csv.path + ": ignoring extra column '" + h + "'");
        }
    }
    return idx;
}

void check_width(const RawCsv& csv, const std::pair<int, std::vector<std::string>>& row) {
    if (row.second.size() != csv.header.size())
        throw config_error(csv.path + ": row has " + std::to_string(row.second.size()) +
                               " fields, header has " + std::to_string(csv.header.size()),
                           row.first);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    return out;
}

void write_meta(std::ofstream& out, const std::map<std::string, std::string>& meta) {
    for (const auto& [k, v] : meta) out << "# " << k << " = " << v << "\n";
}

}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(const std::string& path, const DegradationTrace& trace,
                     const std::map<std::string, std::string>& extra_meta) {
    std::ofstream out = open_out(path);
    std::map<std::string, std::string> meta = trace.meta;
    for (const auto& [k, v] : extra_meta) meta[k] = v;
    write_meta(out, meta);
    out << "t_wall_s,t_cum_stress_s,delta_vt_v,phase\n";
    for (const TraceSample& s : trace.samples)
        out << format_g17(s.t_wall_s) << ',' << format_g17(s.t_cum_stress_s) << ','
            << format_g17(s.delta_vt_v) << ',' << to_string(s.phase) << '\n';
    if (!out) throw config_error("write to '" + path + "' failed");
}

DegradationTrace read_trace_csv(const std::string& path) {
    const RawCsv csv = read_raw_csv(path);
    require_header(csv, "t_wall_s,t_cum_stress_s,delta_vt_v,phase");
    DegradationTrace trace;
    trace.meta = csv.meta;
    trace.samples.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        check_width(csv, row);
        TraceSample s;
        s.t_wall_s = parse_double(row.second[0], path, row.first);
        s.t_cum_stress_s = parse_double(row.second[1], path, row.first);
        s.delta_vt_v = parse_double(row.second[2], path, row.first);
        const auto ph = phase_from_string(row.second[3]);
        if (!ph)
            throw config_error(path + ": unknown phase '" + row.second[3] + "'", row.first);
        s.phase = *ph;
        trace.samples.push_back(s);
    }
    validate(trace);
    return trace;
}

void write_ensemble_csv(const std::string& path, const TrapEnsemble& ensemble,
                        const std::map<std::string, std::string>& extra_meta) {
    std::ofstream out = open_out(path);
    std::map<std::string, std::string> meta = extra_meta;
    meta["reference_temperature_k"] = format_g17(ensemble.reference_temperature_k);
    meta["reference_field_mvcm"] = format_g17(ensemble.reference_field_mvcm);
    meta["seed"] = std::to_string(ensemble.seed);
    write_meta(out, meta);
    out << "tau_c_ref_s,tau_e_ref_s,eta_v,ea_capture_ev,ea_emission_ev,field_threshold_mvcm\n";
    for (const Trap& t : ensemble.traps)
        out << format_g17(t.tau_c_ref_s) << ',' << format_g17(t.tau_e_ref_s) << ','
            << format_g17(t.eta_v) << ',' << format_g17(t.ea_capture_ev) << ','
            << format_g17(t.ea_emission_ev) << ',' << format_g17(t.field_threshold_mvcm) << '\n';
    if (!out) throw config_error("write to '" + path + "' failed");
}

TrapEnsemble read_ensemble_csv(const std::string& path) {
    const RawCsv csv = read_raw_csv(path);
    require_header(csv, "tau_c_ref_s,tau_e_ref_s,eta_v,ea_capture_ev,ea_emission_ev,"
                        "field_threshold_mvcm");
    TrapEnsemble e;
    if (auto it = csv.meta.find("reference_temperature_k"); it != csv.meta.end())
        e.reference_temperature_k = parse_double(it->second, path, -1);
    if (auto it = csv.meta.find("reference_field_mvcm"); it != csv.meta.end())
        e.reference_field_mvcm = parse_double(it->second, path, -1);
    if (auto it = csv.meta.find("seed"); it != csv.meta.end())
        e.seed = std::strtoull(it->second.c_str(), nullptr, 10);
    e.traps.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        check_width(csv, row);
        Trap t;
        t.tau_c_ref_s = parse_double(row.second[0], path, row.first);
        t.tau_e_ref_s = parse_double(row.second[1], path, row.first);
        t.eta_v = parse_double(row.second[2], path, row.first);
        t.ea_capture_ev = parse_double(row.second[3], path, row.first);
        t.ea_emission_ev = parse_double(row.second[4], path, row.first);
        t.field_threshold_mvcm = parse_double(row.second[5], path, row.first);
        e.traps.push_back(t);
    }
    validate(e);
    return e;
}

std::vector<FieldTimeSample> read_powerlaw_csv(const std::string& path,
                                               std::vector<std::string>* warnings) {
    const RawCsv csv = read_raw_csv(path);
    const auto idx = locate_columns(csv, {"xi_mvcm", "t_s", "delta_vt_v"}, warnings);
    if (csv.rows.empty()) throw fit_error(path + ": no data rows");
    std::vector<FieldTimeSample> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        check_width(csv, row);
        out.push_back(FieldTimeSample{parse_double(row.second[idx[0]], path, row.first),
                                      parse_double(row.second[idx[1]], path, row.first),
                                      parse_double(row.second[idx[2]], path, row.first)});
    }
    return out;
}

std::vector<DutySample> read_duty_csv(const std::string& path,
                                      std::vector<std::string>* warnings) {
    const RawCsv csv = read_raw_csv(path);
    const auto idx = locate_columns(csv, {"duty", "delta_vt_v"}, warnings);
    if (csv.rows.empty()) throw fit_error(path + ": no data rows");
    std::vector<DutySample> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        check_width(csv, row);
        DutySample s;
        s.duty = parse_double(row.second[idx[0]], path, row.first);
        s.delta_vt_mag_v = std::fabs(parse_double(row.second[idx[1]], path, row.first));
        out.push_back(s);
    }
    return out;
}

std::vector<RelaxSample> read_relax_csv(const std::string& path,
                                        std::vector<std::string>* warnings) {
    const RawCsv csv = read_raw_csv(path);
    const auto idx = locate_columns(csv, {"xi_ratio", "fraction"}, warnings);
    if (csv.rows.empty()) throw fit_error(path + ": no data rows");
    std::vector<RelaxSample> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        check_width(csv, row);
        out.push_back(RelaxSample{parse_double(row.second[idx[0]], path, row.first),
                                  parse_double(row.second[idx[1]], path, row.first)});
    }
    return out;
}

std::vector<double> read_values_csv(const std::string& path, std::vector<std::string>* warnings) {
    const RawCsv csv = read_raw_csv(path);
    const auto idx = locate_columns(csv, {"delta_vt_v"}, warnings);
    if (csv.rows.empty()) throw fit_error(path + ": no data rows");
    std::vector<double> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        check_width(csv, row);
        out.push_back(parse_double(row.second[idx[0]], path, row.first));
    }
    return out;
}

void write_cdf_csv(const std::string& path, const CdfSummary& summary,
                   const std::map<std::string, std::string>& extra_meta) {
    std::ofstream out = open_out(path);
    std::map<std::string, std::string> meta = extra_meta;
    meta["n"] = std::to_string(summary.n);
    meta["median_v"] = format_g17(summary.median_v);
    for (const auto& [p, v] : summary.quantiles) {
        char key[24];
        std::snprintf(key, sizeof key, "quantile_%g", p);
        meta[key] = format_g17(v);
    }
    write_meta(out, meta);
    out << "value_v,fraction\n";
    for (const auto& [v, f] : summary.cdf_points)
        out << format_g17(v) << ',' << format_g17(f) << '\n';
    if (!out) throw config_error("write to '" + path + "' failed");
}

}
