#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "swe/types.hpp"

namespace swe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shapes, grids or time levels do not line up.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& what, Index level) : Error(what), level_(level) {}
  Index level() const { return level_; }

 private:
  Index level_;
};

/// Water depth 1 + eta - beta became non-positive.
class DryingError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Dynamic CFL bound exceeded.
class StabilityError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Non-finite values appeared.
class DivergenceError : public SolverError {
 public:
  using SolverError::SolverError;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class DegenerateDirectionError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& what, Field direction, double curvature)
      : Error(what), direction_(std::move(direction)), curvature_(curvature) {}
  const Field& direction() const { return direction_; }
  double curvature() const { return curvature_; }

 private:
  Field direction_;
  double curvature_;
};

class CgNonConvergenceError : public Error {
 public:
  CgNonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const { return history_; }

 private:
  std::vector<double> history_;
};

class OracleError : public Error {
 public:
  OracleError(const std::string& what, Index station, Index sample)
      : Error(what), station_(station), sample_(sample) {}
  Index station() const { return station_; }
  Index sample() const { return sample_; }

 private:
  Index station_;
  Index sample_;
};

}  // namespace swe
