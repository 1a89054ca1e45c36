#pragma once

#include <stdexcept>
#include <string>

namespace antigone {

/// Base for every error raised by the library. The CLI maps the concrete
/// subclasses onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (bad grid, bad fractions, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed input data: parse failures, shape mismatches, empty groups.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown during training (non-finite loss or gradient).
class TrainingError : public Error {
public:
    TrainingError(const std::string& what, int epoch, long batch)
        : Error(what + " (epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) + ")"),
          epoch_(epoch), batch_(batch) {}

    int epoch() const noexcept { return epoch_; }
    long batch() const noexcept { return batch_; }

private:
    int epoch_;
    long batch_;
};

/// No labeller candidate could be scored for some target class.
class SelectionError : public Error {
public:
    SelectionError(const std::string& what, int target_class)
        : Error(what), target_class_(target_class) {}

    int target_class() const noexcept { return target_class_; }

private:
    int target_class_;
};

}  // namespace antigone
