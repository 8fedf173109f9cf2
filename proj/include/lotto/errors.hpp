#pragma once

#include <stdexcept>
#include <string>

namespace lotto {

/// Fatal problem with a configuration or input file (bad schema, bad
/// probabilities, unresolvable game). Aborts the current command.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A required column was missing or the input header is unusable.
struct SchemaError : ValidationError {
    explicit SchemaError(const std::string& what) : ValidationError(what) {}
};

/// A claim could not be mapped to any prize table.
struct ResolutionError : ValidationError {
    explicit ResolutionError(const std::string& what) : ValidationError(what) {}
};

/// A resolved prize table has no prize above the recording threshold, so
/// a recorded win could never be simulated from it.
struct UnusableTableError : ValidationError {
    explicit UnusableTableError(const std::string& what) : ValidationError(what) {}
};

/// The ticket-purchase simulation exceeded the configured hard cap.
struct CapExceededError : std::runtime_error {
    explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lotto
