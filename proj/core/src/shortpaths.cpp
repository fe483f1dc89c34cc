#include "lklab/shortpaths.hpp"

#include <cmath>
#include <limits>

namespace lklab {

ShortPathSystem ShortPathSystem::geodesic(const Manifold& M) { return ShortPathSystem(Kind::Geodesic, M); }

ShortPathSystem ShortPathSystem::covering(const Manifold& M, std::uint64_t seed, double radius,
                                          const std::function<double(const Point&)>& chain_abs,
                                          const CoveringOptions& opt) {
  if (!(radius > 0.0) || !(radius < M.injectivity_radius()))
    throw DomainError("covering_system: radius " + std::to_string(radius) + " is not below the injectivity radius " +
                      std::to_string(M.injectivity_radius()) + " of " + M.name());
  ShortPathSystem sys(Kind::Covering, M);
  sys.radius_ = radius;
  sys.tie_guard_ = opt.tie_guard;
  std::mt19937_64 rng(seed);

  auto nearest = [&](const Point& x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : sys.balls_) best = std::min(best, M.distance(x, b.center));
    return best;
  };
  const double spacing = opt.net_spacing * radius;
  for (std::size_t i = 0; i < opt.candidates; ++i) {
    Point x = M.sample_uniform(rng);
    if (sys.balls_.empty() || nearest(x) >= spacing) sys.balls_.push_back({x, radius, x});
  }
  for (std::size_t i = 0; i < opt.probes; ++i) {
    Point x = M.sample_uniform(rng);
    if (nearest(x) >= radius - opt.tie_guard) sys.balls_.push_back({x, radius, x});
  }
  for (auto& b : sys.balls_) {
    bool found = false;
    for (std::size_t tries = 0; tries < opt.max_basepoint_tries; ++tries) {
      Point u = M.sample_uniform(rng);
      if (M.distance(u, b.center) >= radius) continue;
      if (chain_abs && chain_abs(u) < opt.basepoint_guard) continue;
      b.basepoint = u;
      found = true;
      break;
    }
    if (!found) throw DomainError("covering_system: no admissible basepoint found in a ball");
  }
  return sys;
}

int ShortPathSystem::assign(const Point& x) const {
  if (kind_ == Kind::Geodesic) return -1;
  int nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < balls_.size(); ++j) {
    double d = M_.distance(x, balls_[j].center);
    if (d < radius_ - tie_guard_) return static_cast<int>(j);
    if (d < best) {
      best = d;
      nearest = static_cast<int>(j);
    }
  }
  return nearest;
}

Path ShortPathSystem::connector(int k, int j) const {
  return M_.geodesic(balls_.at(k).basepoint, balls_.at(j).basepoint);
}

Path ShortPathSystem::path(const Point& p, const Point& q) const {
  if (kind_ == Kind::Geodesic) return M_.geodesic(p, q);
  const int np = assign(p), nq = assign(q);
  Path out = M_.geodesic(p, balls_[np].basepoint);
  if (np != nq) out.append(connector(np, nq));
  out.append(M_.geodesic(balls_[nq].basepoint, q));
  return out;
}

ClosedLoop close_loop(const Trajectory& traj, const ShortPathSystem& sys) {
  ClosedLoop loop;
  loop.flow = &traj;
  loop.basepoint = traj.start();
  loop.t = traj.t_end;
  loop.closure = sys.path(traj.end(), traj.start());
  return loop;
}

}  // namespace lklab
