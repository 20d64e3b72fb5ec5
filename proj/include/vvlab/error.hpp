#pragma once

#include <stdexcept>
#include <string>

namespace vvlab {

/// Violated precondition or malformed input. Maps to CLI exit code 2.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver failed to converge or left its admissible region.
/// Maps to CLI exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw PreconditionError(what);
}

}  // namespace vvlab
