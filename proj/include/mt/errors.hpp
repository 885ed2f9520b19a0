#pragma once

#include <stdexcept>
#include <string>

namespace mt {

/// Incompatible shapes between operands.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Index outside the valid range of a tensor axis.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A dense materialization would exceed the configured entry cap.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix expected to be symmetric positive definite failed a pivot.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    explicit NotPositiveDefiniteError(const std::string& what, int pivot = -1)
        : std::runtime_error(what), pivot_index(pivot) {}
    int pivot_index;
};

/// Rank-one Cholesky extension hit a nonpositive Schur complement.
class DegenerateAppendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time integration produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, long step)
        : std::runtime_error(what), step_index(step) {}
    long step_index;
};

}  // namespace mt
