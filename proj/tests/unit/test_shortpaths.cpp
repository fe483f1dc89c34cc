#include <doctest.h>

#include <cmath>

#include "lklab/fields.hpp"
#include "lklab/flow.hpp"
#include "lklab/models.hpp"
#include "lklab/shortpaths.hpp"
#include "support.hpp"

using namespace lklab;

TEST_CASE("geodesic system") {
  Manifold M = Manifold::sphere3xsphere3();
  ShortPathSystem sys = ShortPathSystem::geodesic(M);
  CHECK(sys.kind() == ShortPathSystem::Kind::Geodesic);
  std::mt19937_64 rng(1);
  Point p = M.sample_uniform(rng);
  CHECK(sys.path(p, p).length() == doctest::Approx(0.0));
  CHECK(sys.assign(p) == -1);
  for (int i = 0; i < 200; ++i) {
    Point a = M.sample_uniform(rng), b = M.sample_uniform(rng);
    Path s = sys.path(a, b);
    CHECK(s.length() <= kPi * std::sqrt(2.0) + 1e-12);
    CHECK((s.start().x - a.x).norm() < 1e-12);
    CHECK((s.end().x - b.x).norm() < 1e-12);
  }
  CHECK(M.diameter() == doctest::Approx(kPi * std::sqrt(2.0)));
}

TEST_CASE("closing a trajectory") {
  Manifold M = Manifold::sphere3xsphere3();
  ShortPathSystem sys = ShortPathSystem::geodesic(M);
  std::mt19937_64 rng(2);
  Point p = M.sample_uniform(rng);
  Trajectory tr = integrate(M, hopf_pair_field(1.0, 0.4), p, 7.0);
  ClosedLoop loop = close_loop(tr, sys);
  CHECK(loop.t == 7.0);
  CHECK((loop.closure.start().x - tr.end().x).norm() < 1e-12);
  CHECK((loop.closure.end().x - p.x).norm() < 1e-12);
  CHECK(loop.closure.length() <= M.diameter() + 1e-12);
}

TEST_CASE("covering system") {
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  auto chain_abs = [chain](const Point& x) { return std::abs(chain.f(x)); };
  ShortPathSystem sys = ShortPathSystem::covering(M, 11, 2.0, chain_abs);
  CHECK(sys.kind() == ShortPathSystem::Kind::Covering);
  REQUIRE(!sys.balls().empty());

  for (const Ball& b : sys.balls()) {
    CHECK(b.radius == 2.0);
    CHECK(M.distance(b.center, b.basepoint) < b.radius);
    CHECK(chain_abs(b.basepoint) >= 1e-3);
  }

  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    Point a = M.sample_uniform(rng), b = M.sample_uniform(rng);
    int na = sys.assign(a);
    REQUIRE(na >= 0);
    REQUIRE(na < static_cast<int>(sys.balls().size()));
    CHECK(M.distance(a, sys.balls()[na].center) < 2.0);
    // n(x) is the first ball that contains x.
    for (int j = 0; j < na; ++j) CHECK(M.distance(a, sys.balls()[j].center) >= 2.0 - 1e-9);
    Path s = sys.path(a, b);
    CHECK((s.start().x - a.x).norm() < 1e-10);
    CHECK((s.end().x - b.x).norm() < 1e-10);
    Path self = sys.path(a, a);
    CHECK((self.start().x - a.x).norm() < 1e-10);
    CHECK((self.end().x - a.x).norm() < 1e-10);
  }

  // Connectors join the basepoints.
  if (sys.balls().size() > 1) {
    Path c = sys.connector(0, 1);
    CHECK((c.start().x - sys.balls()[0].basepoint.x).norm() < 1e-10);
    CHECK((c.end().x - sys.balls()[1].basepoint.x).norm() < 1e-10);
  }
}

TEST_CASE("covering systems are deterministic for a seed") {
  Manifold M = Manifold::sphere3();
  ShortPathSystem a = ShortPathSystem::covering(M, 5, 1.0);
  ShortPathSystem b = ShortPathSystem::covering(M, 5, 1.0);
  REQUIRE(a.balls().size() == b.balls().size());
  for (std::size_t i = 0; i < a.balls().size(); ++i) {
    CHECK((a.balls()[i].center.x - b.balls()[i].center.x).norm() == 0.0);
    CHECK((a.balls()[i].basepoint.x - b.balls()[i].basepoint.x).norm() == 0.0);
  }
  std::mt19937_64 rng(6);
  Point p = M.sample_uniform(rng), q = M.sample_uniform(rng);
  CHECK(a.path(p, q).length() == b.path(p, q).length());
}

TEST_CASE("covering radius must stay below the injectivity radius") {
  Manifold S = Manifold::sphere3();
  CHECK(S.injectivity_radius() == doctest::Approx(kPi));
  CHECK_THROWS_AS(ShortPathSystem::covering(S, 1, kPi), DomainError);
  CHECK_THROWS_AS(ShortPathSystem::covering(S, 1, 4.0), DomainError);
  CHECK_THROWS_AS(ShortPathSystem::covering(Manifold::sphere3xsphere3(), 1, kPi), DomainError);
}
