#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dtafopt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hermitian symmetry violated beyond tolerance.
struct InvalidMatrix : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Argument outside its mathematical domain (band width, lag, ...).
struct DomainError : Error {
  using Error::Error;
};

// Inconsistent user configuration. Maps to CLI exit code 3.
struct ConfigError : Error {
  using Error::Error;
};

// Design pipeline failure (initial relaxation unsolvable). Exit code 2.
struct DesignError : Error {
  using Error::Error;
};

// Conic solver found neither a solution nor a certificate. Exit code 4.
struct SolverStall : Error {
  using Error::Error;
};

struct MalformedProblem : Error {
  using Error::Error;
};

}  // namespace dtafopt
