#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cvqkd {

/// Argument outside the domain of a formula (negative altitude, T = 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to meet its tolerance. Carries the best
/// estimate reached so callers can decide whether it is usable.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double best_estimate = 0.0, double error_bound = 0.0)
        : std::runtime_error(what), best_estimate_(best_estimate), error_bound_(error_bound) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double best_estimate_;
    double error_bound_;
};

/// Finite-size security is only established for heterodyne detection.
class UnsupportedProtocol : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scenario configuration problem; lists every offending key.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> problems)
        : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "invalid scenario:";
        for (const auto& p : items) {
            out += "\n  ";
            out += p;
        }
        return out;
    }

    std::vector<std::string> problems_;
};

namespace detail {

inline void require(bool ok, const char* message) {
    if (!ok) throw DomainError(message);
}

}  // namespace detail
}  // namespace cvqkd
