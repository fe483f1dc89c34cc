#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lklab {

/// Ambient coordinate vector. Every chart used here has at most 8 real
/// coordinates (S3 x S3 in R^8), so storage stays on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// A point in chart coordinates. For embedded manifolds (spheres and their
/// products) there is a single chart and `x` holds the ambient coordinates.
/// For CP2 `chart` selects the affine chart Z_chart != 0.
struct Point {
  int chart = 0;
  Vec x;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition (degree overflow, singular solve, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A loop came within the guard distance of the chain's zero set.
class DegenerateStart : public Error {
 public:
  using Error::Error;
};

/// Too many resampled starts in a Monte Carlo average.
class DegenerateOverflow : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double last, double previous)
      : Error(what), last_(last), previous_(previous) {}
  double last() const { return last_; }
  double previous() const { return previous_; }

 private:
  double last_;
  double previous_;
};

/// Step size underflow during integration. Carries the last accepted state.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t, Point last)
      : Error(what), t_(t), last_(std::move(last)) {}
  double time() const { return t_; }
  const Point& last_state() const { return last_; }

 private:
  double t_;
  Point last_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lklab
