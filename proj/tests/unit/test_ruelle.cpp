#include <doctest.h>

#include <cmath>

#include "lklab/fields.hpp"
#include "lklab/linking.hpp"
#include "lklab/models.hpp"
#include "lklab/ruelle.hpp"
#include "support.hpp"

using namespace lklab;

namespace {

FormField scaled(double s, const FormField& a) { return s * a; }

// Two-form on T4 given componentwise.
FormField torus_two_form(std::string name, std::function<void(const Vec&, Alt&)> fill) {
  FormField f;
  f.degree = 2;
  f.dim = f.ambient = 4;
  f.name = std::move(name);
  f.eval = [fill](const Point& p) {
    Alt r(4, 2);
    fill(p.x, r);
    return r;
  };
  return f;
}

}  // namespace

TEST_CASE("zero primitive integrates to zero") {
  FormField zero = constant_form(6, Alt(8, 4), "0");
  zero.ambient = 8;
  CHECK(hopf_integral_submanifold(zero, models::s3xs3_cycle()).value == 0.0);
}

TEST_CASE("Hopf integral on S3 x S3 equals 2 (a - b) pi^3") {
  Manifold M = Manifold::sphere3xsphere3();
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{3.0, 1.0}, std::pair{0.0, 2.0}, std::pair{0.5, 0.5}}) {
    FormField alpha = models::s3xs3_primitive(a, b);
    CHECK(primitive_residual(M, hopf_pair_field(a, b), alpha, random_probes(M, 100, 3)) < 1e-8);
    IntegralReport r = hopf_integral_submanifold(alpha, models::s3xs3_cycle());
    CHECK(std::abs(r.value - models::s3xs3_target(a, b)) < 1e-6);
    CHECK(r.method == "gauss-legendre");
  }
}

TEST_CASE("contact S3: integral over a Hopf fiber matches the linking rate") {
  Manifold S = Manifold::sphere3();
  FormField lambda = models::s3_contact_form();
  IntegralReport h = hopf_integral_submanifold(lambda, models::s3_fiber_cycle());
  CHECK(h.value == doctest::Approx(2 * kPi).epsilon(1e-10));

  // lambda ^ d lambda has mass 4 pi^2; Hopf fibers link once per period 2 pi.
  IntegralReport mass = integrate_top_form(S, models::s3_contact_volume(), 1000, 2);
  CHECK(mass.value == doctest::Approx(models::kContactVolumeS3).epsilon(1e-10));

  ShortPathSystem geo = ShortPathSystem::geodesic(S);
  Vec x(4);
  x << 0.6, 0.3, 0.5, -0.55;
  LinkingEstimate e = asymptotic_lk(S, hopf_field(), S.point(x), models::s3_fiber_chain(), geo, 1000.0);
  CHECK(std::abs(models::kContactVolumeS3 * e.value - h.value) / h.value < 0.01);
}

TEST_CASE("CP2 signed leaf sum equals the flux through the Seifert chain") {
  Manifold C = Manifold::cp2();
  auto A = models::cp2_default_hamiltonian();
  VectorField X = models::cp2_field(A);
  FormField alpha = models::cp2_primitive(A);
  MeasuredFoliation F = models::cp2_leaves();
  REQUIRE(F.leaves.size() == 2);
  CHECK(F.leaves[0].weight == -F.leaves[1].weight);

  IntegralReport flux = integrate_over_cycle(interior_product(X, C.volume_form()), models::cp2_seifert_chain());
  IntegralReport leaf = hopf_integral_foliation(C, X, F, alpha);
  CHECK(std::abs(leaf.value - flux.value) < 1e-6);
  CHECK(leaf.method == "leaf-quadrature");

  SUBCASE("H + const leaves the value unchanged") {
    ScalarFunction H = models::cp2_moment_map(A);
    ScalarFunction Hc{"H+0.7", [H](const Point& p) { return H(p) + 0.7; }, {}};
    FormField shifted = multiply(Hc, models::cp2_kahler_form());
    IntegralReport r = hopf_integral_foliation(C, X, F, shifted);
    CHECK(std::abs(r.value - leaf.value) < 1e-6);
    IntegralReport plus = ruelle_sullivan_eval(C, F, alpha + scaled(-2.0, models::cp2_kahler_form()));
    CHECK(std::abs(plus.value - leaf.value) < 1e-6);
  }

  SUBCASE("a non-primitive is rejected") {
    CHECK_THROWS_AS(hopf_integral_foliation(C, X, F, 2.0 * alpha), DomainError);
  }

  SUBCASE("zero field") {
    FormField zero = constant_form(4, Alt(4, 2), "0");
    CHECK(hopf_integral_foliation(C, zero_field(4), F, zero).value == 0.0);
  }
}

TEST_CASE("a bump concentrated on L_1 sees only that leaf") {
  Manifold C = Manifold::cp2();
  MeasuredFoliation F = models::cp2_leaves();
  // phi = |Z0 + Z1|^2 / |Z|^2 vanishes identically on L_-1.
  ScalarFunction phi{"phi", [C](const Point& p) {
                       Eigen::Vector3cd Z = C.homogeneous(p);
                       return std::norm(Z[0] + Z[1]) / Z.squaredNorm();
                     },
                     {}};
  FormField omega = multiply(phi, models::cp2_kahler_form());
  IntegralReport sum = ruelle_sullivan_eval(C, F, omega);
  double w1 = 0.0, on_l1 = 0.0;
  for (const auto& l : F.leaves) {
    IntegralReport r = integrate_over_cycle(omega, l.leaf);
    if (l.leaf.name.rfind("leaf(1.", 0) == 0) {
      w1 = l.weight;
      on_l1 = r.value;
    } else {
      CHECK(std::abs(r.value) < 1e-12);
    }
  }
  REQUIRE(w1 != 0.0);
  CHECK(std::abs(on_l1) > 0.1);
  CHECK(sum.value == doctest::Approx(w1 * on_l1).epsilon(1e-12));
}

TEST_CASE("exact forms pair to zero with closed payloads") {
  Manifold T = Manifold::torus(4);
  FormField nu = torus_two_form("nu", [](const Vec& x, Alt& r) {
    r.at(0b0011) = 1.0;
    r.at(0b1100) = 0.3 * std::cos(x[2]);
    r.at(0b1001) = 0.8;
  });
  // d(sin(x1 + x2) dx3)
  FormField exact = torus_two_form("exact", [](const Vec& x, Alt& r) {
    r.at(0b0101) = std::cos(x[0] + x[1]);
    r.at(0b0110) = std::cos(x[0] + x[1]);
  });
  RuelleOptions opt;
  opt.mc_samples = 20000;
  IntegralReport r = ruelle_sullivan_eval(T, MeasuredFoliation::smooth_form(nu), exact, opt);
  CHECK(r.method == "monte-carlo");
  CHECK(r.error > 0.0);
  CHECK(std::abs(r.value) < 3 * r.error);
  // The integrand is not pointwise zero.
  std::mt19937_64 rng(4);
  Point p = T.sample_uniform(rng);
  CHECK(std::abs(wedge(exact, nu)(p)[0]) > 1e-3);

  // Primitive-choice invariance: add the closed form 0.5 dx1 ^ dx3.
  FormField base = torus_two_form("b", [](const Vec& x, Alt& r) { r.at(0b0011) = std::sin(x[2] + x[3]); });
  FormField moved = base + constant_form(4, 0.5 * basis_form(4, 0b0101), "c");
  IntegralReport r1 = ruelle_sullivan_eval(T, MeasuredFoliation::smooth_form(nu), base, opt);
  IntegralReport r2 = ruelle_sullivan_eval(T, MeasuredFoliation::smooth_form(nu), moved, opt);
  CHECK(std::abs(r1.value - r2.value) < 3 * (r1.error + r2.error));

  FormField not_closed = torus_two_form("nc", [](const Vec& x, Alt& r) { r.at(0b0011) = std::cos(x[2]); });
  CHECK_THROWS_AS(ruelle_sullivan_eval(T, MeasuredFoliation::smooth_form(not_closed), exact, opt), DomainError);
}

TEST_CASE("report serialization") {
  IntegralReport q = hopf_integral_submanifold(models::s3_contact_form(), models::s3_fiber_cycle());
  auto j = q.to_json();
  for (const char* k : {"value", "tolerance", "method", "samples", "refinement"}) CHECK(j.contains(k));
  CHECK(!j["refinement"].empty());
  IntegralReport m = integrate_top_form(Manifold::sphere3(), Manifold::sphere3().volume_form(), 100, 1);
  auto jm = m.to_json();
  CHECK(jm.contains("stderr"));
  CHECK(jm["samples"] == 100);
}

TEST_CASE("quadrature failures") {
  // A curve in R2 with a violently oscillating integrand and too few levels.
  ParametricCycle N;
  N.name = "segment";
  N.k = 1;
  N.lower = Vec::Constant(1, 0.0);
  N.upper = Vec::Constant(1, 1.0);
  N.embed = [](const Vec& u) { return testsupport::chart_point({u[0], 0.0}); };
  N.base_nodes = {2};
  FormField wiggle;
  wiggle.degree = 1;
  wiggle.dim = wiggle.ambient = 2;
  wiggle.eval = [](const Point& p) {
    Alt r(2, 1);
    r[0] = std::sin(400.0 * p.x[0]);
    return r;
  };
  QuadratureOptions opt;
  opt.max_levels = 2;
  CHECK_THROWS_AS(integrate_over_cycle(wiggle, N, opt), QuadratureError);

  // Degenerate parameterization.
  ParametricCycle flat = N;
  flat.embed = [](const Vec&) { return testsupport::chart_point({0.3, 0.0}); };
  CHECK_THROWS_AS(integrate_over_cycle(wiggle, flat), DomainError);

  // Leaves truncated with too large a tail.
  MeasuredFoliation F = models::cp2_leaves();
  F.leaves[0].tail_estimate = 1e-3;
  FormField zero = constant_form(4, Alt(4, 2), "0");
  CHECK_THROWS_AS(ruelle_sullivan_eval(Manifold::cp2(), F, zero), QuadratureError);
}
