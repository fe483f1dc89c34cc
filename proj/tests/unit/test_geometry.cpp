#include <doctest.h>

#include <cmath>

#include "lklab/fields.hpp"
#include "lklab/geometry.hpp"
#include "lklab/models.hpp"
#include "lklab/ruelle.hpp"
#include "support.hpp"

using namespace lklab;
using testsupport::chart_point;

TEST_CASE("dx ^ dy on T2 evaluated on the coordinate frame is 1") {
  Alt dx = basis_form(2, 0b01), dy = basis_form(2, 0b10);
  std::vector<Vec> frame{Vec::Unit(2, 0), Vec::Unit(2, 1)};
  CHECK(eval_on(wedge(dx, dy), frame) == doctest::Approx(1.0));
  CHECK(eval_on(wedge(dy, dx), frame) == doctest::Approx(-1.0));
}

TEST_CASE("odd forms square to zero and the wedge is graded commutative") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Alt a = testsupport::random_alt(6, 1, rng);
    Alt c = testsupport::random_alt(6, 3, rng);
    CHECK(max_abs(wedge(a, a)) < 1e-14);
    CHECK(max_abs(wedge(c, c)) < 1e-14);
    for (int k = 0; k <= 3; ++k)
      for (int l = 0; l + k <= 6; ++l) {
        Alt u = testsupport::random_alt(6, k, rng), v = testsupport::random_alt(6, l, rng);
        double s = ((k * l) % 2) ? -1.0 : 1.0;
        CHECK(max_abs(wedge(u, v) - wedge(v, u) * s) < 1e-12);
      }
  }
}

TEST_CASE("(dz + x dy) ^ (dx ^ dy) on R3 is dx dy dz") {
  FormField a;
  a.degree = 1;
  a.dim = a.ambient = 3;
  a.eval = [](const Point& p) {
    Alt r(3, 1);
    r[1] = p.x[0];
    r[2] = 1.0;
    return r;
  };
  FormField b = constant_form(3, basis_form(3, 0b011), "dx^dy");
  FormField w = wedge(a, b);
  for (double x : {-2.0, 0.3, 5.0}) {
    Point p = chart_point({x, 0.7, -0.1});
    CHECK(w.on(p, {Vec::Unit(3, 0), Vec::Unit(3, 1), Vec::Unit(3, 2)}) == doctest::Approx(1.0));
  }
}

TEST_CASE("wedge rejects degree overflow") {
  CHECK_THROWS_AS(wedge(basis_form(3, 0b011), basis_form(3, 0b110)), DomainError);
  FormField a = constant_form(3, basis_form(3, 0b011), "a");
  CHECK_THROWS_AS(wedge(a, a), DomainError);
}

TEST_CASE("interior product") {
  Alt dxdy = basis_form(2, 0b11);
  Alt r = interior(Vec::Unit(2, 0), dxdy);
  CHECK(r[0] == doctest::Approx(0.0));
  CHECK(r[1] == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  for (int k = 2; k <= 5; ++k) {
    Alt a = testsupport::random_alt(5, k, rng);
    Vec X = testsupport::random_vec(5, rng);
    CHECK(max_abs(interior(X, interior(X, a))) < 1e-13);
  }
  CHECK_THROWS_AS(interior(Vec::Unit(2, 0), Alt(2, 0)), DomainError);
}

TEST_CASE("form evaluation is alternating and multilinear") {
  Manifold M = Manifold::cp2();
  FormField omega = models::cp2_kahler_form();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Point p = M.sample_uniform(rng);
    Vec u = testsupport::random_vec(4, rng), v = testsupport::random_vec(4, rng), w = testsupport::random_vec(4, rng);
    double s = 1.7;
    CHECK(omega.on(p, {u, v}) == doctest::Approx(-omega.on(p, {v, u})).epsilon(1e-10));
    CHECK(std::abs(omega.on(p, {s * u + w, v}) - s * omega.on(p, {u, v}) - omega.on(p, {w, v})) < 1e-10);
    CHECK(std::abs(omega.on(p, {u, u})) < 1e-12);
  }
}

TEST_CASE("numeric d") {
  FormField xdy;
  xdy.degree = 1;
  xdy.dim = xdy.ambient = 2;
  xdy.eval = [](const Point& p) {
    Alt r(2, 1);
    r[1] = p.x[0];
    return r;
  };
  Point p = chart_point({0.4, -1.3});
  Alt d = numeric_d(xdy, 1e-4)(p);
  CHECK(std::abs(d[0] - 1.0) < 1e-8);

  // d(df) = 0 for f = sin(x) e^y.
  FormField df;
  df.degree = 1;
  df.dim = df.ambient = 2;
  df.eval = [](const Point& q) {
    Alt r(2, 1);
    r[0] = std::cos(q.x[0]) * std::exp(q.x[1]);
    r[1] = std::sin(q.x[0]) * std::exp(q.x[1]);
    return r;
  };
  CHECK(std::abs(numeric_d(df, 1e-4)(p)[0]) < 1e-7);

  // Standard contact form on S3 against its hand-computed derivative 2(dx0 dy0 + dx1 dy1).
  Manifold S = Manifold::sphere3();
  FormField lambda = models::s3_contact_form();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    Point q = S.sample_uniform(rng);
    Alt hand(4, 2);
    hand.at(0b0011) = 2.0;
    hand.at(0b1100) = 2.0;
    CHECK(max_abs(numeric_d(lambda, 1e-4)(q) - hand) < 1e-7);
    CHECK(max_abs(lambda.d_eval(q) - hand) < 1e-14);
  }
}

TEST_CASE("closed-form d agrees with central differences to second order") {
  FormField a = models::expression_one_form("a", {"x", "y", "z"}, {"sin(y*z)", "exp(0.5*x)*cos(z)", "x*y^3"});
  std::mt19937_64 rng(13);
  for (int i = 0; i < 5; ++i) {
    Point p = chart_point({0.0, 0.0, 0.0});
    p.x = testsupport::random_vec(3, rng);
    double e1 = max_abs(numeric_d(a, 1e-2)(p) - a.d_eval(p));
    double e2 = max_abs(numeric_d(a, 1e-3)(p) - a.d_eval(p));
    CHECK(std::log10(e1 / e2) >= 1.8);
    CHECK(max_abs(numeric_d_richardson(a, 1e-4)(p) - a.d_eval(p)) < 1e-8);
  }
  // Quadratic components: differences are exact up to rounding.
  FormField b = models::s3xs3_primitive(1.0, 0.5);
  Manifold M = Manifold::sphere3xsphere3();
  for (int i = 0; i < 5; ++i) {
    Point p = M.sample_uniform(rng);
    CHECK(max_abs(numeric_d(b, 1e-3)(p) - b.d_eval(p)) < 1e-9);
  }
}

TEST_CASE("volume forms are +1 on oriented orthonormal frames") {
  std::mt19937_64 rng(17);
  for (const Manifold& M : {Manifold::sphere3(), Manifold::sphere3xsphere3(), Manifold::cp2(), Manifold::torus(3),
                            Manifold::sphere2xsphere2()}) {
    FormField mu = M.volume_form();
    for (int i = 0; i < 20; ++i) {
      Point p = M.sample_uniform(rng);
      Mat E = M.tangent_basis(p);
      REQUIRE(E.cols() == M.dim());
      CHECK(mu.on(p, frame_vectors(E)) == doctest::Approx(1.0).epsilon(1e-10));
      Mat G = E.transpose() * M.metric(p) * E;
      CHECK((G - Mat::Identity(M.dim(), M.dim())).norm() < 1e-10);
    }
  }
}

TEST_CASE("dimensions and volumes") {
  CHECK(Manifold::sphere3().dim() == 3);
  CHECK(Manifold::sphere3xsphere3().dim() == 6);
  CHECK(Manifold::cp2().dim() == 4);
  CHECK(Manifold::torus(5).dim() == 5);
  CHECK(Manifold::sphere2xsphere2().dim() == 4);
  CHECK(Manifold::sphere3().total_volume() == doctest::Approx(kVolS3));
  CHECK(Manifold::sphere3xsphere3().total_volume() == doctest::Approx(kVolS3 * kVolS3));
  CHECK(Manifold::cp2().total_volume() == doctest::Approx(kPi * kPi / 2.0));
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(Manifold::euclidean(3).sample_uniform(rng), DomainError);
}

TEST_CASE("points on S3 are normalized") {
  Manifold S = Manifold::sphere3();
  Vec x(4);
  x << 3.0, -1.0, 0.5, 2.0;
  CHECK(std::abs(S.point(x).x.norm() - 1.0) < 1e-12);
}

TEST_CASE("Monte Carlo mass of the volume form matches the total volume") {
  for (const Manifold& M : {Manifold::sphere3(), Manifold::cp2()}) {
    IntegralReport r = integrate_top_form(M, M.volume_form(), 2000, 5, 1);
    CHECK(r.value == doctest::Approx(M.total_volume()).epsilon(1e-12));
  }
}

TEST_CASE("geodesics") {
  Manifold S = Manifold::sphere3();
  Point p = S.point(Vec::Unit(4, 0)), q = S.point(Vec::Unit(4, 1));
  CHECK(S.geodesic(p, p).length() == doctest::Approx(0.0));
  Path g = S.geodesic(p, q);
  CHECK(g.length() == doctest::Approx(kPi / 2));
  CHECK((g.end().x - q.x).norm() < 1e-12);

  Manifold M = Manifold::sphere3xsphere3();
  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    Point a = M.sample_uniform(rng), b = M.sample_uniform(rng);
    double L1 = std::acos(std::clamp(a.x.head(4).dot(b.x.head(4)), -1.0, 1.0));
    double L2 = std::acos(std::clamp(a.x.tail(4).dot(b.x.tail(4)), -1.0, 1.0));
    Path path = M.geodesic(a, b);
    CHECK(path.length() == doctest::Approx(std::hypot(L1, L2)).epsilon(1e-9));
    Point mid = path.segments.front().at(0.5);
    CHECK(std::abs(M.distance(a, mid) - M.distance(mid, b)) < 1e-9);
  }

  for (const Manifold& N : {Manifold::cp2(), Manifold::sphere2xsphere2(), Manifold::torus(3)}) {
    for (int i = 0; i < 30; ++i) {
      Point a = N.sample_uniform(rng), b = N.sample_uniform(rng);
      Path path = N.geodesic(a, b);
      Point mid = path.segments.front().at(0.5);
      if (path.segments.size() == 1) CHECK(std::abs(N.distance(a, mid) - N.distance(mid, b)) < 1e-9);
      CHECK(path.length() == doctest::Approx(N.distance(a, b)).epsilon(1e-9));
    }
  }
}

TEST_CASE("antipodal geodesics are tie-broken deterministically and flagged") {
  Manifold S = Manifold::sphere3();
  Point p = S.point(Vec::Unit(4, 2));
  Point q = S.point(-Vec::Unit(4, 2));
  Path a = S.geodesic(p, q), b = S.geodesic(p, q);
  CHECK(a.cut_locus);
  CHECK(a.length() == doctest::Approx(kPi));
  CHECK((a.segments.front().at(0.5).x - b.segments.front().at(0.5).x).norm() == 0.0);
  CHECK((a.end().x - q.x).norm() < 1e-12);
}

TEST_CASE("CP2 chart transitions are involutive") {
  Manifold C = Manifold::cp2();
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    Point p = C.sample_uniform(rng);
    for (int c = 0; c < 3; ++c) {
      Eigen::Vector3cd Z = C.homogeneous(p);
      if (std::abs(Z[c]) < 0.05) continue;
      Point q = C.to_chart(C.to_chart(p, c), p.chart);
      CHECK((q.x - p.x).norm() < 1e-12);
    }
    Vec x = p.x;
    CHECK(std::max(std::abs(cz(x, 0)), std::abs(cz(x, 1))) <= 2.0 + 1e-12);
  }
  // A coordinate beyond modulus 2 forces a chart switch.
  Point far = C.point(testsupport::chart_point({3.0, 0.0, 0.1, 0.0}).x, 0);
  CHECK(far.chart != 0);
}

TEST_CASE("Hopf rotations preserve the volume form") {
  Manifold M = Manifold::sphere3xsphere3();
  FormField mu = M.volume_form();
  std::mt19937_64 rng(29);
  const double a = 1.3, b = -0.4, t = 0.9;
  auto rotate = [&](const Vec& v) {
    Vec r = v;
    for (int k = 0; k < 2; ++k) set_cz(r, k, std::polar(1.0, a * t) * cz(v, k));
    for (int k = 2; k < 4; ++k) set_cz(r, k, std::polar(1.0, b * t) * cz(v, k));
    return r;
  };
  for (int i = 0; i < 20; ++i) {
    Point p = M.sample_uniform(rng);
    Point q = hopf_pair_flow(a, b, p, t);
    auto E = frame_vectors(M.tangent_basis(p));
    std::vector<Vec> RE;
    for (const auto& e : E) RE.push_back(rotate(e));
    CHECK(std::abs(mu.on(q, RE) - mu.on(p, E)) < 1e-10);
  }
}
