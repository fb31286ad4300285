#pragma once

#include <stdexcept>
#include <string>

namespace qksvm {

/// Bad argument values or mismatched shapes at a call site.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid configuration (out-of-range settings, unknown names, bad specs).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input data that cannot be processed (unsatisfiable splits, single-class sets).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File and parse failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qksvm
