#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <utility>

namespace rccm {

// Bad caller input: shape, symmetry, or parameter-range violations.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iteration budget exhausted. Carries the last iterate and its residual so
// callers can inspect or resume.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::MatrixXd last_iterate,
                   double residual, int iterations)
      : std::runtime_error(what + " (residual " + std::to_string(residual) +
                           " after " + std::to_string(iterations) + " iterations)"),
        last_iterate_(std::move(last_iterate)),
        residual_(residual),
        iterations_(iterations) {}

  const Eigen::MatrixXd& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::MatrixXd last_iterate_;
  double residual_;
  int iterations_;
};

// A mixture component's responsibility mass collapsed below the usable floor.
class EmptyClusterError : public std::runtime_error {
 public:
  EmptyClusterError(int cluster, int iteration)
      : std::runtime_error("cluster " + std::to_string(cluster) +
                           " became empty at iteration " + std::to_string(iteration)),
        cluster_(cluster),
        iteration_(iteration) {}

  int cluster() const { return cluster_; }
  int iteration() const { return iteration_; }

 private:
  int cluster_;
  int iteration_;
};

// A data column with zero variance cannot be scaled.
class DegenerateColumnError : public InvalidInputError {
 public:
  DegenerateColumnError(int subject, int column)
      : InvalidInputError("subject " + std::to_string(subject) + " column " +
                          std::to_string(column) + " has zero variance"),
        subject_(subject),
        column_(column) {}

  int subject() const { return subject_; }
  int column() const { return column_; }

 private:
  int subject_;
  int column_;
};

// Arithmetic broke down (non-finite values, impossible normalization).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rccm
