#pragma once

#include <stdexcept>
#include <string>

namespace phasemeter {

// Invalid inputs, mismatched scales, malformed configs.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation could not meet its accuracy contract (mass deficit,
// truncation leak, unitarity drift, tail-bound violation).
struct AccuracyError : std::runtime_error {
    explicit AccuracyError(const std::string& msg) : std::runtime_error(msg) {}
};

// File / serialization problems.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace phasemeter
