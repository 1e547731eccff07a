#pragma once

#include <stdexcept>
#include <string>

namespace trajbench {

// Tensor shape / dimension mismatches.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Violated preconditions (missing gradient, out-of-range index, ...).
class ContractError : public std::logic_error {
public:
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

// Invalid object state, e.g. backward called twice on the same root.
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

// Non-finite values produced by a numeric operation.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration (unknown dataset id, inconsistent window lengths, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input files; carries a human-readable location.
class IngestError : public std::runtime_error {
public:
    explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

// A feature that cannot be normalized (zero variance, nonpositive on log scale).
class DegenerateFeatureError : public std::runtime_error {
public:
    explicit DegenerateFeatureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trajbench
