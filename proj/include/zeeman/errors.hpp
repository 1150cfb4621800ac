#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zeeman {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside an operation's mathematical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  ResourceError(const std::string& what, std::size_t required_bytes)
      : Error(what), required_bytes_(required_bytes) {}
  std::size_t required_bytes() const noexcept { return required_bytes_; }

 private:
  std::size_t required_bytes_;
};

/// The number of eigenvalues found inside Γ_N differs from the shell dimension.
class ClusterSeparationError : public Error {
 public:
  ClusterSeparationError(std::size_t found, std::size_t expected);
  std::size_t found() const noexcept { return found_; }
  std::size_t expected() const noexcept { return expected_; }

 private:
  std::size_t found_;
  std::size_t expected_;
};

class SubclusterOverlapError : public Error {
 public:
  SubclusterOverlapError(double scaled_shift, double distance, double radius);
  double scaled_shift() const noexcept { return scaled_shift_; }
  double distance() const noexcept { return distance_; }

 private:
  double scaled_shift_;
  double distance_;
};

/// |x| = 0 where the Kepler vector field is singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// ω₄ = 1: the north pole of S³ is the image of collisions.
class NorthPoleError : public Error {
 public:
  using Error::Error;
};

class NumericalCollisionError : public Error {
 public:
  using Error::Error;
};

/// Orbit parametrization undefined for |ℓ| = 0.
class CollisionOrbitError : public Error {
 public:
  using Error::Error;
};

class AccuracyError : public Error {
 public:
  using Error::Error;
};

class BasisConstructionError : public Error {
 public:
  BasisConstructionError(const std::string& what, double deviation)
      : Error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

}  // namespace zeeman
