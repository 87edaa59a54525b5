#pragma once

#include <stdexcept>
#include <string>

namespace strutforge {

// Bad problem data: malformed input, broken preconditions, degenerate geometry.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The LP engine stalled or could not certify its own answer. Distinct from
// an Infeasible outcome, which is a valid result.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A computed object violates an invariant the library promised to maintain
// (e.g. a strut net whose nodes do not balance).
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace strutforge
