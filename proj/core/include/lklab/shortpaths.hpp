#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lklab/flow.hpp"
#include "lklab/geometry.hpp"

namespace lklab {

struct Ball {
  Point center;
  double radius = 0.0;
  Point basepoint;
};

struct CoveringOptions {
  double tie_guard = 1e-9;        // n(x) requires dist(x, center) < radius - tie_guard
  double net_spacing = 0.85;      // greedy net spacing as a fraction of the radius
  std::size_t candidates = 20000; // random points offered to the greedy net
  std::size_t probes = 20000;     // fresh points used to patch coverage holes
  double basepoint_guard = 1e-3;  // basepoints need |f| >= guard for the active chain
  std::size_t max_basepoint_tries = 1000000;
};

/// Chooses one path sigma(p, q) for every ordered pair of points.
///
/// Geodesic systems use the minimizing geodesic (with the manifold's
/// cut-locus tie-break). Covering systems route p -> u_{n(p)} -> u_{n(q)} -> q
/// through basepoints u_j of a finite cover by geodesic balls, where n(x) is
/// the smallest index j with dist(x, c_j) < r - tie_guard, or the nearest
/// center when no ball qualifies.
class ShortPathSystem {
 public:
  enum class Kind { Geodesic, Covering };

  static ShortPathSystem geodesic(const Manifold& M);
  /// Throws DomainError when the radius is not below the injectivity radius.
  /// `chain_abs`, when given, returns |f| and keeps basepoints off the chain.
  static ShortPathSystem covering(const Manifold& M, std::uint64_t seed, double radius,
                                  const std::function<double(const Point&)>& chain_abs = {},
                                  const CoveringOptions& opt = {});

  Kind kind() const { return kind_; }
  const Manifold& manifold() const { return M_; }
  const std::vector<Ball>& balls() const { return balls_; }
  double radius() const { return radius_; }

  Path path(const Point& p, const Point& q) const;
  /// n(x); -1 for geodesic systems.
  int assign(const Point& x) const;
  /// gamma_kj between basepoints.
  Path connector(int k, int j) const;

 private:
  ShortPathSystem(Kind k, Manifold M) : kind_(k), M_(std::move(M)) {}

  Kind kind_;
  Manifold M_;
  std::vector<Ball> balls_;
  double radius_ = 0.0;
  double tie_guard_ = 0.0;
};

/// Flow segment of length t from x closed up by sigma(phi_t(x), x).
struct ClosedLoop {
  const Trajectory* flow = nullptr;
  Path closure;
  Point basepoint;
  double t = 0.0;
};

ClosedLoop close_loop(const Trajectory& traj, const ShortPathSystem& sys);

}  // namespace lklab
