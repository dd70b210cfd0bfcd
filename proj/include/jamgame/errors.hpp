#pragma once

#include <stdexcept>
#include <string>

namespace jamgame {

// Bad numeric inputs: negative budgets, empty grids, malformed distributions.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Vectors that should describe the same frame have different lengths.
struct AlignmentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A request whose enumeration or state count exceeds a configured cap.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

// No finite power achieves the target (all-zero channel, unreachable budget).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Jamming a frame whose every block has zero gain.
struct DegenerateChannelError : InfeasibleError {
  using InfeasibleError::InfeasibleError;
};

// A sampled curve was asked for values past its last sample.
struct CurveRangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// A discretized evaluator could not meet its requested error bound.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace jamgame
