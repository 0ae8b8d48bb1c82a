#pragma once

#include <stdexcept>
#include <string>

namespace lyubich {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficients do not describe a coprime rational map of degree >= 2.
class InvalidMap : public Error {
 public:
  using Error::Error;
};

class RootFindingFailure : public Error {
 public:
  using Error::Error;
};

/// The requested root has a finite backward orbit, so the preimage measures are undefined.
class ExceptionalRoot : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class IncompatibleTable : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class CoverFailure : public Error {
 public:
  using Error::Error;
};

class EigSolverFailure : public Error {
 public:
  using Error::Error;
};

class NoVanishingTail : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lyubich
