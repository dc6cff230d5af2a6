#pragma once

#include <stdexcept>
#include <string>

namespace spikeforge {

/// An encoded weight table that fails structural validation.
struct CorruptTableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Weight access to a connection that does not exist in the table.
struct NoSuchConnectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File-level failures (missing file, malformed line, bad magic).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spikeforge
