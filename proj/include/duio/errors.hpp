#pragma once

#include <stdexcept>
#include <string>

namespace duio {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A subspace handed to decompose()/friend_of() was not invariant at the
// working tolerance. Usually indicates a numerical-rank misjudgment upstream.
struct NotInvariant : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StabilizationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct JointConditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalBlowup : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace duio
