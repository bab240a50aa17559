#pragma once

#include <stdexcept>
#include <string>

namespace saddleflow {

/// Input matrix is numerically rank deficient (or otherwise unusable).
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

/// A stage value or state component became non-finite during integration.
class NumericalBlowupError : public std::runtime_error {
public:
    NumericalBlowupError(const std::string& what, double at_time)
        : std::runtime_error(what), at_time_(at_time) {}

    double at_time() const { return at_time_; }

private:
    double at_time_;
};

/// An analysis quantity was requested under parameters that violate the
/// hypothesis it needs (e.g. a negative quadratic weight in an energy).
class HypothesisViolationError : public std::runtime_error {
public:
    explicit HypothesisViolationError(const std::string& what) : std::runtime_error(what) {}
};

/// A schedule family combination the analytic rules cannot handle and for
/// which the numerical fallback was disabled.
class UnsupportedScheduleError : public std::runtime_error {
public:
    explicit UnsupportedScheduleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace saddleflow
