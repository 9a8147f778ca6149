#pragma once

#include <stdexcept>
#include <string>

namespace vikit {

// Mismatched vector/matrix shapes in any public entry point.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Bad solver or experiment configuration. Message names the offending field.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Projection subproblem failed (infeasible set, singular system, iteration cap).
struct ProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Backtracking exhausted its budget without meeting the acceptance test.
struct LineSearchError : std::runtime_error {
  LineSearchError(const std::string& msg, int tried)
      : std::runtime_error(msg), backtracks_tried(tried) {}
  int backtracks_tried;
};

// Power iteration failed to settle; carries the best estimate so far.
struct SpectralNormError : std::runtime_error {
  SpectralNormError(const std::string& msg, double best)
      : std::runtime_error(msg), best_estimate(best) {}
  double best_estimate;
};

// Malformed or unreadable input file.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vikit
