#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace optocav {

/// Machine-readable failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
    validation,      // bad input, mode-count mismatch, malformed constraint
    capacity,        // basis larger than the configured hard limit
    pole,            // closed-form denominator inside the pole guard
    singularity,     // pinched or higher-order poles in a loop integral
    strong_mixing,   // dressed-state tracking ambiguous (resonance)
    degenerate,      // on-shell intermediate state in a perturbative sum
    convergence,     // fit or cutoff study failed its tolerance
    io,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::pole: return "pole";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::strong_mixing: return "strong_mixing";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by the pole guard; carries the offending denominator.
class PoleError : public Error {
public:
    PoleError(const std::string& where, double denominator)
        : Error(ErrorKind::pole,
                where + ": denominator " + std::to_string(denominator) + " inside pole guard"),
          denominator_(denominator) {}

    double denominator() const noexcept { return denominator_; }

private:
    double denominator_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition)
        fail(ErrorKind::validation, message);
}

} // namespace optocav
