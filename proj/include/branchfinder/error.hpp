#pragma once

#include <stdexcept>
#include <string>

namespace branchfinder {

enum class ErrorKind {
    invalid_input,
    invalid_config,
    domain_error,
    io_error,
    parse_error,
    insufficient_data,
    training_diverged,
    numerical_failure,
    no_progress,
    unsupported_size,
    missing_truth,
};

/// Maps an error kind to its stable machine-readable name (snake_case).
inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid_input";
        case ErrorKind::invalid_config: return "invalid_config";
        case ErrorKind::domain_error: return "domain_error";
        case ErrorKind::io_error: return "io_error";
        case ErrorKind::parse_error: return "parse_error";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::training_diverged: return "training_diverged";
        case ErrorKind::numerical_failure: return "numerical_failure";
        case ErrorKind::no_progress: return "no_progress";
        case ErrorKind::unsupported_size: return "unsupported_size";
        case ErrorKind::missing_truth: return "missing_truth";
    }
    return "unknown";
}

/// Exception carrying a typed error kind. The CLI prints
/// "error_kind=<name>: <message>" on stderr and exits nonzero.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace branchfinder
