#pragma once

#include <stdexcept>
#include <string>

namespace negprob {

// Bad caller input: unknown atoms, malformed documents, out-of-range args.
struct input_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The empirical model signals: the same event is pinned to two different
// probabilities across contexts.
struct signaling_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside the LP (iteration cap, unbounded phase).
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace negprob
