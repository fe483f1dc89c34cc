#pragma once

#include <array>
#include <functional>
#include <limits>
#include <vector>

#include "lklab/geometry.hpp"
#include "lklab/vector_field.hpp"

namespace lklab {

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double first_step = 0.0;  // 0 selects automatically
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 200'000'000;
};

/// One accepted step of the adaptive integrator with lazily built dense
/// output. The interpolant lives in the chart of `start`.
class DenseStep {
 public:
  double t0 = 0.0;
  double t1 = 0.0;
  Point start;  // state at t0 (reprojected)
  Point end;    // state at t1 (reprojected, possibly in another chart)

  /// Interpolated state at t in [t0, t1], reprojected onto the manifold.
  Point at(double t) const;
  /// Raw interpolant without reprojection.
  Vec raw(double t) const;

 private:
  friend class Dop853;
  void build() const;

  const Manifold* manifold_ = nullptr;
  const VectorField* field_ = nullptr;
  Vec y_new_;  // unprojected end state
  Vec f_new_;
  mutable std::array<Vec, 16> k_;
  mutable bool built_ = false;
  mutable std::array<Vec, 7> F_;
};

struct TrajectorySample {
  double t;
  Point x;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<DenseStep> steps;  // kept when requested
  double t_end = 0.0;
  double tol = 0.0;
  std::size_t evaluations = 0;

  const Point& start() const { return samples.front().x; }
  const Point& end() const { return samples.back().x; }
  /// Dense evaluation; needs the stored steps.
  Point at(double t) const;
};

/// Explicit Runge-Kutta 8(5,3) of Dormand and Prince with 7th order dense
/// output and per-step reprojection onto the manifold.
class Dop853 {
 public:
  Dop853(const Manifold& M, const VectorField& X, const IntegratorOptions& opt);

  /// Integrate from (0, x0) to t_end > 0. The observer sees each accepted
  /// step and may return false to stop early. Returns the final state.
  /// Throws IntegrationError on step size underflow.
  Point run(const Point& x0, double t_end, const std::function<bool(const DenseStep&)>& observer);
  std::size_t evaluations() const { return nfev_; }

 private:
  Vec f(double t, const Point& p);
  double initial_step(double t0, const Point& p, const Vec& f0, double t_end);

  const Manifold& M_;
  const VectorField& X_;
  IntegratorOptions opt_;
  std::size_t nfev_ = 0;
};

Trajectory integrate(const Manifold& M, const VectorField& X, const Point& x0, double t_end,
                     const IntegratorOptions& opt = {}, bool keep_steps = true);

/// (1/t) * integral_0^t f(phi_s(x0)) ds, Gauss-Legendre on each step's dense output.
double time_average(const Manifold& M, const ScalarFunction& f, const VectorField& X, const Point& x0,
                    double t_end, const IntegratorOptions& opt = {});

}  // namespace lklab
