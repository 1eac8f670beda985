#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qre {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be (strictly) positive definite was not.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, double offending)
      : Error(what), offending_eigenvalue(offending) {}
  double offending_eigenvalue;
};

/// The underlying eigensolver failed to converge.
class EigenFailure : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap. Carries the best iterate seen.
class IterationCapExceeded : public Error {
 public:
  IterationCapExceeded(const std::string& what, std::vector<double> best,
                       double value, int iterations)
      : Error(what),
        best_iterate(std::move(best)),
        best_value(value),
        iterations(iterations) {}
  std::vector<double> best_iterate;
  double best_value;
  int iterations;
};

/// Backtracking line search shrank the step below representable size.
class LineSearchStall : public Error {
 public:
  LineSearchStall(const std::string& what, double step, int iteration)
      : Error(what), step(step), iteration(iteration) {}
  double step;
  int iteration;
};

/// Relaxation was requested for a problem that is not infeasible.
class NotInfeasible : public Error {
 public:
  using Error::Error;
};

class MissingReliability : public Error {
 public:
  using Error::Error;
};

class KTooSmall : public Error {
 public:
  KTooSmall(const std::string& what, double k, double lower_bound)
      : Error(what), k(k), lower_bound(lower_bound) {}
  double k;
  double lower_bound;
};

class ProjectionNonConvergence : public Error {
 public:
  ProjectionNonConvergence(const std::string& what, int iterations,
                           double last_change)
      : Error(what), iterations(iterations), last_change(last_change) {}
  int iterations;
  double last_change;
};

/// The dual exponent has an eigenvalue too large to exponentiate safely.
class OverflowRisk : public Error {
 public:
  OverflowRisk(const std::string& what, double max_eigenvalue)
      : Error(what), max_eigenvalue(max_eigenvalue) {}
  double max_eigenvalue;
};

/// Dual iterates diverged: the constraint set has no full-rank solution.
class NoFullRankSolution : public Error {
 public:
  using Error::Error;
};

class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidPovm : public Error {
 public:
  using Error::Error;
};

}  // namespace qre
