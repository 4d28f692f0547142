#pragma once

#include <stdexcept>
#include <string>

namespace hb {

/// Malformed input files (structure, hopping config, manifests).
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Inconsistent configuration (overlapping hopping rules, missing on-site entries).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The lattice drawing is not a valid planar embedding.
struct EmbeddingError : std::runtime_error {
    explicit EmbeddingError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure (degenerate spectra, bad KPM bounds, centering of empty spectra).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested problem size exceeds a configured limit.
struct SizeError : std::runtime_error {
    explicit SizeError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hb
