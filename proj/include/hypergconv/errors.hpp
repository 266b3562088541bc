#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hgc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector lengths or manifold dimensions do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inputs violate the hyperboloid invariants (point off the sheet, tangent
/// not orthogonal to its base, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Tangent norm or radius beyond kRMax.
class RangeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Query after the oracle budget is spent, or another protocol misuse.
class StateError : public Error {
 public:
  using Error::Error;
};

/// A solver invariant that the caller promised (exact f*, radius) is false.
class CertificateError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver did not reach its tolerance; carries the best iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best, double residual)
      : Error(what), best_(std::move(best)), residual_(residual) {}
  const std::vector<double>& best() const { return best_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> best_;
  double residual_;
};

}  // namespace hgc
