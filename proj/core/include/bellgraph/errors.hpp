#pragma once

#include <stdexcept>
#include <string>

namespace bellgraph {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments, dimension mismatches, unparsable files.
class InputError : public Error {
 public:
  using Error::Error;
};

// A configured size or enumeration limit was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double primal_residual,
              double dual_residual, double gap)
      : Error(what),
        iterations(iterations),
        primal_residual(primal_residual),
        dual_residual(dual_residual),
        gap(gap) {}

  int iterations;
  double primal_residual;
  double dual_residual;
  double gap;
};

class CertificateMalformed : public Error {
 public:
  CertificateMalformed(const std::string& what, int row, int col)
      : Error(what), row(row), col(col) {}

  int row;
  int col;
};

class NotPsd : public Error {
 public:
  NotPsd(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue(min_eigenvalue) {}

  double min_eigenvalue;
};

// Self-testing preconditions (structural conditions, projector ranks, C1).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The candidate realization does not reproduce the unique optimizer.
class NotAnOptimizer : public Error {
 public:
  using Error::Error;
};

}  // namespace bellgraph
