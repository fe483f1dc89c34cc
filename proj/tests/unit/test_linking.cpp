#include <doctest.h>

#include <cmath>

#include "lklab/fields.hpp"
#include "lklab/linking.hpp"
#include "lklab/models.hpp"
#include "support.hpp"

using namespace lklab;
using testsupport::s3s3;

namespace {

Point generic_start() { return s3s3({0.8, 0.1}, {0.3, -0.5}, {0.2, 0.6}, {-0.7, 0.25}); }

}  // namespace

TEST_CASE("a single positive crossing over one period") {
  PhaseChain chain = models::s3xs3_chain();
  Point p = s3s3(1.0, 0.0, std::polar(1.0, 0.3), 0.0);
  auto curve = [&](double s) { return hopf_pair_flow(1.0, 0.0, p, s); };
  std::vector<CrossingEvent> ev;
  CHECK(crossings_on_curve(curve, 0.0, 2 * kPi, chain, 16, &ev) == 1);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].sign == 1);
  CHECK(ev[0].s == doctest::Approx(0.3).epsilon(1e-9));

  // Running the other way crosses negatively.
  auto back = [&](double s) { return hopf_pair_flow(-1.0, 0.0, p, s); };
  CHECK(crossings_on_curve(back, 0.0, 2 * kPi, chain, 16) == -1);
}

TEST_CASE("curves through the zero set are degenerate") {
  PhaseChain chain = models::s3xs3_chain();
  // w orthogonal to z: f vanishes at the start.
  Point p = s3s3(1.0, 0.0, 0.0, 1.0);
  auto curve = [&](double s) { return hopf_pair_flow(1.0, 0.0, p, s); };
  CHECK_THROWS_AS(crossings_on_curve(curve, 0.0, 1.0, chain, 4), DegenerateStart);
}

TEST_CASE("asymptotic linking numbers of Hopf pairs") {
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  ShortPathSystem sys = ShortPathSystem::geodesic(M);
  Point p = generic_start();

  LinkingEstimate e = asymptotic_lk(M, hopf_pair_field(1.0, 0.0), p, chain, sys, 1000.0);
  CHECK(std::abs(e.value - 1.0 / (2 * kPi)) < 2e-3);
  CHECK(e.horizon_t == 1000.0);
  CHECK(e.value == doctest::Approx((e.crossings_flow + e.crossings_closure) / 1000.0));

  LinkingEstimate two = asymptotic_lk(M, hopf_pair_field(2.0, 0.0), p, chain, sys, 1000.0);
  CHECK(std::abs(two.value - 1.0 / kPi) < 2e-3);

  LinkingEstimate neg = asymptotic_lk(M, hopf_pair_field(0.0, 1.0), p, chain, sys, 1000.0);
  CHECK(neg.value < 0.0);
  CHECK(std::abs(neg.value + 1.0 / (2 * kPi)) < 2e-3);

  LinkingEstimate zero = asymptotic_lk(M, hopf_pair_field(1.5, 1.5), p, chain, sys, 300.0);
  CHECK(zero.value == 0.0);
}

TEST_CASE("reversing the chain orientation negates crossings exactly") {
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  ShortPathSystem sys = ShortPathSystem::geodesic(M);
  Point p = generic_start();
  for (auto [a, b] : {std::pair{1.0, 0.0}, std::pair{3.0, 1.0}, std::pair{0.0, 2.0}}) {
    LinkingEstimate e = asymptotic_lk(M, hopf_pair_field(a, b), p, chain, sys, 200.0);
    LinkingEstimate r = asymptotic_lk(M, hopf_pair_field(a, b), p, chain.reversed(), sys, 200.0);
    CHECK(r.crossings_flow == -e.crossings_flow);
    CHECK(r.crossings_closure == -e.crossings_closure);
    CHECK(r.value == -e.value);
  }
}

TEST_CASE("average linking") {
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  ShortPathSystem geo = ShortPathSystem::geodesic(M);
  auto chain_abs = [chain](const Point& x) { return std::abs(chain.f(x)); };
  ShortPathSystem cov = ShortPathSystem::covering(M, 11, 2.0, chain_abs);

  AverageOptions opt;
  opt.t_end = 100.0;
  opt.n_samples = 200;
  opt.seed = 3;
  opt.checkpoints = {25.0, 50.0};
  AverageResult r = average_lk(M, hopf_pair_field(1.0, 0.0), chain, {&geo, &cov}, opt);
  REQUIRE(r.per_system.size() == 2);
  REQUIRE(r.records.size() == 200);
  CHECK(r.volume == doctest::Approx(kVolS3 * kVolS3));
  const double target = models::s3xs3_target(1.0, 0.0);
  for (const auto& e : r.per_system) {
    CHECK(e.samples == 200);
    CHECK(std::abs(e.value - target) / target < 0.1);
  }
  REQUIRE(r.checkpoints[0].size() == 2);
  CHECK(r.checkpoints[0][0].horizon_t == 25.0);

  SUBCASE("standard error is the sample standard deviation over sqrt(n), scaled by the volume") {
    for (std::size_t s = 0; s < 2; ++s) {
      double mean = 0.0, sq = 0.0;
      for (const auto& rec : r.records) mean += rec.value[s];
      mean /= r.records.size();
      for (const auto& rec : r.records) sq += (rec.value[s] - mean) * (rec.value[s] - mean);
      double se = r.volume * std::sqrt(sq / (r.records.size() - 1) / r.records.size());
      CHECK(r.per_system[s].std_error == doctest::Approx(se).epsilon(1e-10));
      CHECK(r.per_system[s].value == doctest::Approx(r.volume * mean).epsilon(1e-12));
    }
  }

  SUBCASE("records add up") {
    for (const auto& rec : r.records)
      for (std::size_t s = 0; s < 2; ++s)
        CHECK(rec.value[s] == doctest::Approx((rec.flow + rec.closure[s]) / 100.0));
  }

  SUBCASE("bit-identical across worker counts") {
    opt.workers = 1;
    AverageResult one = average_lk(M, hopf_pair_field(1.0, 0.0), chain, {&geo, &cov}, opt);
    opt.workers = 3;
    AverageResult three = average_lk(M, hopf_pair_field(1.0, 0.0), chain, {&geo, &cov}, opt);
    for (std::size_t s = 0; s < 2; ++s) {
      CHECK(one.per_system[s].value == three.per_system[s].value);
      CHECK(one.per_system[s].std_error == three.per_system[s].std_error);
      CHECK(one.per_system[s].value == r.per_system[s].value);
    }
  }
}

TEST_CASE("a = b averages to exactly zero and a < b is negative") {
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  ShortPathSystem geo = ShortPathSystem::geodesic(M);
  LinkingEstimate z = average_lk(M, hopf_pair_field(1.0, 1.0), chain, geo, 100.0, 100, 5);
  CHECK(z.value == 0.0);
  LinkingEstimate n = average_lk(M, hopf_pair_field(1.0, 3.0), chain, geo, 100.0, 100, 5);
  CHECK(n.value < 0.0);
  LinkingEstimate p = average_lk(M, hopf_pair_field(1.0, 3.0), chain.reversed(), geo, 100.0, 100, 5);
  CHECK(p.value == -n.value);
}

TEST_CASE("degenerate starts overflow") {
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain flat;
  flat.name = "tiny";
  flat.f = [](const Point&) { return cplx(1e-9, 0.0); };
  ShortPathSystem geo = ShortPathSystem::geodesic(M);
  CHECK_THROWS_AS(average_lk(M, hopf_pair_field(1.0, 0.0), flat, geo, 10.0, 20, 1), DegenerateOverflow);
}
