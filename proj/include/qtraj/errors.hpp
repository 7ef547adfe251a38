#pragma once

#include <stdexcept>
#include <string>

namespace qtraj {

/// Invalid parameters or a violated precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested update is incompatible with the current state, e.g. a photocount on a
/// state that cannot scatter.
class ContradictionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A jump probability reached 1; the caller has to shrink the step.
class StepSizeError : public std::range_error {
public:
    StepSizeError(const std::string& what, double probability)
        : std::range_error(what), probability_(probability) {}

    double probability() const noexcept { return probability_; }

private:
    double probability_;
};

}  // namespace qtraj
