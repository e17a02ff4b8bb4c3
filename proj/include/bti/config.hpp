#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bti/trapsim.hpp"
#include "bti/waveform.hpp"

namespace bti {

// One `key = value` with the line it came from (for error messages).
struct ConfigEntry {
    std::string value;
    int line = -1;
};

/**
 * INI-style run configuration: `[section]` headers, `key = value` lines,
 * `#`/`;` comment lines. Sections: device, waveform, ensemble, simulate,
 * fit, ttf. Unknown sections or keys are errors in strict mode (default),
 * warnings with --lenient. The raw file bytes are hashed (FNV-1a, 64-bit)
 * and the hash echoed into every output the run produces.
 */
struct ParsedConfig {
    std::string path;
    std::string dir;  // directory of `path`, for resolving relative file refs
    std::string hash_hex;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections;
    std::map<std::string, int> section_lines;

    bool has_section(const std::string& s) const { return sections.count(s) != 0; }
    const ConfigEntry* find(const std::string& section, const std::string& key) const;
};

ParsedConfig parse_config_file(const std::string& path);

struct ConfigOptions {
    bool lenient = false;  // downgrade unknown sections/keys to warnings
};

// Fully-typed inputs for one simulation run.
struct RunConfig {
    DeviceParams device;
    std::optional<DcStressSpec> dc;  // exactly one of dc/ac is set
    std::optional<AcStressSpec> ac;
    std::string ensemble_file;  // resolved path; empty = generate from `gen`
    EnsembleGenSpec gen;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string config_hash;

    Waveform build_waveform() const;
};

// Validates the whole file against the grammar, then extracts the sections
// `simulate` needs (device, waveform, ensemble). Grammar violations are
// config_error with line numbers (or warnings when lenient).
RunConfig extract_run_config(const ParsedConfig& cfg, const ConfigOptions& opt,
                             std::vector<std::string>* warnings);

// The [ensemble] generation recipe for `gen-ensemble` (a `file =` reference
// is rejected: there is nothing to generate).
struct GenEnsembleConfig {
    EnsembleGenSpec gen;
    std::uint64_t seed = 0;
    std::string config_hash;
};

GenEnsembleConfig extract_gen_config(const ParsedConfig& cfg, const ConfigOptions& opt,
                                     std::vector<std::string>* warnings);

// Reads the ensemble file named by the config, or generates one from the
// inline recipe with the config's seed.
TrapEnsemble load_ensemble(const RunConfig& rc);

}
