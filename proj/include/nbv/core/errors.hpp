#pragma once

#include <stdexcept>
#include <string>

namespace nbv {

// Base for all toolkit errors; subclasses give callers a typed handle and the
// CLI a stable exit-code mapping.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File missing / unreadable / unwritable.
struct IoError : Error {
  using Error::Error;
};

// Malformed input file; message carries the 1-based line number where known.
struct ParseError : Error {
  using Error::Error;
};

// Caller violated an operation's contract (bad argument, wrong state).
struct InvalidInput : Error {
  using Error::Error;
};

// A geometric/structural precondition does not hold (e.g. mesh not watertight).
struct ContractViolation : Error {
  using Error::Error;
};

// Stochastic procedure exhausted its draw budget (e.g. rejection sampling
// starved by a near-zero acceptance rate).
struct SamplingError : Error {
  using Error::Error;
};

// Bad experiment configuration; message names the offending field path.
struct ConfigError : Error {
  using Error::Error;
};

// A least-squares design is rank-deficient or too ill-conditioned to solve
// (e.g. projection directions that do not span the basis).
struct RankDeficiencyError : Error {
  using Error::Error;
};

}  // namespace nbv
