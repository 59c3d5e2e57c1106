#pragma once

#include <stdexcept>
#include <string>

namespace realopt {

// Base for every error the engine raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-domain configuration / parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The lattice cannot match the requested moments with probabilities in (0,1).
class CalibrationInfeasible : public Error {
 public:
  using Error::Error;
};

// The indifference oracle failed to bracket the optimal hedge.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

// Perpetual threshold is infinite (non-positive shortfall).
class DivergentThreshold : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace realopt
