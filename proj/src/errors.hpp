#pragma once

#include <stdexcept>
#include <string>

namespace dpci {

// Bad experiment/model configuration (file contents, schema, value ranges).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: non-positive-definite factorization, rank deficiency,
// singular information matrix.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

class FactorizationError : public NumericError {
public:
    FactorizationError(const std::string& msg, std::size_t pivot)
        : NumericError(msg), pivot_index(pivot) {}
    std::size_t pivot_index;
};

class RankDeficiencyError : public NumericError {
public:
    explicit RankDeficiencyError(const std::string& msg) : NumericError(msg) {}
};

// Experiment-level failure (e.g. too many failed trials).
class ExperimentError : public std::runtime_error {
public:
    explicit ExperimentError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dpci
