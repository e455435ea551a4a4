#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace roughstat {

/// Sequence indices and prefix lengths. Indices start at 1.
using Index = std::int64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid protocol, parameters or prefix budget.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Minimal roughness could not be estimated (no finite deviation).
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// No Cauchy candidate index had a finite value.
class CandidateError : public Error {
 public:
  using Error::Error;
};

/// Band construction found no anchor at stage 1.
class NotCauchyError : public Error {
 public:
  using Error::Error;
};

/// No checkpoint satisfied the threshold condition for the first stage.
class ThresholdError : public Error {
 public:
  using Error::Error;
};

}  // namespace roughstat
