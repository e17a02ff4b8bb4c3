#pragma once

#include <stdexcept>
#include <string>

namespace bti {

// Input or state outside a documented contract (bad spec values, out-of-range
// queries, non-physical parameters). The CLI maps this to exit code 3.
class domain_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config-file or input-file syntax/schema problem. line() < 0 means the error
// is not tied to a specific line. CLI exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg, int line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Fit precondition violation (too few points, degenerate design, bad values).
// CLI exit code 4.
class fit_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ttf_extension was asked for a ratio against a reference trace that never
// crosses the failure tolerance. CLI exit code 5.
class no_reference_crossing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}
