// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance [--only 1,2,...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lklab/experiments.hpp"
#include "lklab/fields.hpp"
#include "lklab/godbillon.hpp"
#include "lklab/hodge.hpp"
#include "lklab/linking.hpp"
#include "lklab/models.hpp"
#include "lklab/parallel.hpp"

using namespace lklab;
namespace ex = lklab::experiments;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ex::RunResult run_experiment(const json& j) {
  ex::Config cfg = ex::parse_config(j);
  return ex::run(cfg, [](const std::string& stage, std::size_t done, std::size_t total) {
    static auto last = std::chrono::steady_clock::now();
    if (seconds_since(last) < 10.0) return;
    last = std::chrono::steady_clock::now();
    std::cerr << "  .. " << stage << " " << done << "/" << total << "\n";
  });
}

const ex::Comparison& comparison(const ex::RunResult& r, const std::string& name) {
  for (const auto& c : r.comparisons)
    if (c.name == name) return c;
  throw std::runtime_error("missing comparison " + name);
}

// ---- 1: individual asymptotic linking numbers

void criterion1(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  VectorField X = hopf_pair_field(1.0, 0.0);
  auto chain_abs = [chain](const Point& x) { return std::abs(chain.f(x)); };
  ShortPathSystem geo = ShortPathSystem::geodesic(M);
  ShortPathSystem cov = ShortPathSystem::covering(M, 11, 2.0, chain_abs);
  const double target = 1.0 / (2.0 * kPi);
  double worst = 0.0;
  int done = 0;
  for (std::uint64_t i = 0; done < 20; ++i) {
    auto rng = stream_rng(2024, i);
    Point x0 = M.sample_uniform(rng);
    if (std::abs(chain.f(x0)) < 1e-3) continue;
    try {
      for (const ShortPathSystem* sys : {&geo, &cov}) {
        LinkingEstimate e = asymptotic_lk(M, X, x0, chain, *sys, 1000.0);
        worst = std::max(worst, std::abs(e.value - target));
      }
      ++done;
    } catch (const DegenerateStart&) {
    }
  }
  const double secs = seconds_since(t0);
  o.detail << "20 starts x {geodesic, covering}, max |lk/t - 1/(2 pi)| = " << worst << " (tol 2e-3), " << secs << " s";
  o.require(worst < 2e-3, "deviation");
  o.require(secs < 60.0, "runtime above one minute");
}

// ---- 2 and 4: averages on S3 x S3

const std::vector<std::pair<double, double>> kPairs{{1.0, 0.0}, {3.0, 1.0}, {0.0, 2.0}};

// Shared by criteria 2 and 4 when both run in one process.
const std::map<std::pair<double, double>, ex::RunResult>& s3xs3_runs() {
  static std::map<std::pair<double, double>, ex::RunResult> out;
  if (!out.empty()) return out;
  for (auto [a, b] : kPairs) {
    std::cerr << "  s3xs3-linking a=" << a << " b=" << b << "\n";
    out[{a, b}] = run_experiment({{"schema_version", 1},
                                  {"experiment", "s3xs3-linking"},
                                  {"seed", 1},
                                  {"params",
                                   {{"a", a},
                                    {"b", b},
                                    {"t_end", 1000.0},
                                    {"n_samples", 10000},
                                    {"systems", {"geodesic", "covering"}},
                                    {"covering_radius", 2.0},
                                    {"tolerance_rel", 0.02}}}});
  }
  return out;
}

void criterion2(Outcome& o) {
  const auto& runs = s3xs3_runs();
  for (auto [a, b] : kPairs) {
    const auto& r = runs.at({a, b});
    for (const char* sys : {"geodesic", "covering"}) {
      const auto& c = comparison(r, std::string("average_lk[") + sys + "]");
      double rel = std::abs(c.estimate - c.target) / std::abs(c.target);
      o.detail << " (" << a << "," << b << ")" << sys << " " << c.estimate << " vs " << c.target << " rel " << rel << ";";
      o.require(rel < 0.02, "relative error");
    }
    const auto& h = comparison(r, "hopf_integral_submanifold");
    o.detail << " hopf " << std::abs(h.estimate - h.target) << ";";
    o.require(std::abs(h.estimate - h.target) < 1e-6, "hopf integral");
  }
}

void criterion4(Outcome& o) {
  const auto& runs = s3xs3_runs();
  for (auto [a, b] : kPairs) {
    const auto& r = runs.at({a, b});
    const auto& g = comparison(r, "average_lk[geodesic]");
    const auto& c = comparison(r, "average_lk[covering]");
    const double se_g = g.extra.at("stderr"), se_c = c.extra.at("stderr");
    const double diff = std::abs(g.estimate - c.estimate), allowed = 2.0 * (se_g + se_c);
    o.detail << " (" << a << "," << b << ") |" << g.estimate << " - " << c.estimate << "| = " << diff << " vs 2(se) = "
             << allowed << ";";
    o.require(diff <= allowed, "systems disagree");
  }
}

// ---- 3: signs and exact reversal

void criterion3(Outcome& o) {
  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  auto chain_abs = [chain](const Point& x) { return std::abs(chain.f(x)); };
  ShortPathSystem geo = ShortPathSystem::geodesic(M);
  ShortPathSystem cov = ShortPathSystem::covering(M, 11, 2.0, chain_abs);
  AverageOptions opt;
  opt.t_end = 200.0;
  opt.n_samples = 1000;
  opt.seed = 3;
  for (auto [a, b] : std::vector<std::pair<double, double>>{{0.0, 1.0}, {1.0, 3.0}, {0.0, 2.0}, {3.0, 1.0}, {1.0, 0.0}}) {
    VectorField X = hopf_pair_field(a, b);
    AverageResult fwd = average_lk(M, X, chain, {&geo, &cov}, opt);
    AverageResult rev = average_lk(M, X, chain.reversed(), {&geo, &cov}, opt);
    bool exact = fwd.records.size() == rev.records.size();
    for (std::size_t i = 0; exact && i < fwd.records.size(); ++i) {
      exact = rev.records[i].flow == -fwd.records[i].flow;
      for (std::size_t s = 0; s < 2; ++s) exact = exact && rev.records[i].closure[s] == -fwd.records[i].closure[s];
    }
    for (std::size_t s = 0; s < 2; ++s) {
      exact = exact && rev.per_system[s].value == -fwd.per_system[s].value;
      if (a < b) o.require(fwd.per_system[s].value < 0.0, "a < b gives a non-negative estimate");
    }
    o.detail << " (" << a << "," << b << ") " << fwd.per_system[0].value << "/" << fwd.per_system[1].value
             << (exact ? " reversed exactly;" : " NOT reversed exactly;");
    o.require(exact, "reversal");
  }
}

// ---- 5: CP2 flux

void criterion5(Outcome& o) {
  auto r = run_experiment({{"schema_version", 1},
                           {"experiment", "cp2-flux"},
                           {"params", {{"t_end", 200.0}, {"n_samples", 4000}, {"tolerance_rel", 0.05}}}});
  const auto& c = comparison(r, "average_lk[geodesic]");
  double rel = std::abs(c.estimate - c.target) / std::abs(c.target);
  o.detail << "crossing estimate " << c.estimate << " vs flux " << c.target << ", rel " << rel << " (tol 0.05)";
  o.require(rel < 0.05, "relative error");
  const auto& leaf = comparison(r, "leaf_sum");
  o.detail << "; leaf sum - flux = " << leaf.estimate - leaf.target;
}

// ---- 6: Hodge theory on tori

void criterion6(Outcome& o) {
  double fundl = 0.0, lap = 0.0, hg = 0.0;
  for (int n : {2, 3})
    for (int band : {1, 2, 4, 8}) {
      std::vector<double> f(100), l(100), h(100);
      parallel_for(100, [&](std::size_t i) {
        auto rng = stream_rng(77 + n * 100 + band, i);
        auto a = hodge::FourierForm::random(n, static_cast<int>(i) % (n + 1), band, rng);
        f[i] = hodge::fundl_residual(a);
        auto G = hodge::greens_operator(a);
        l[i] = hodge::coeff_distance(hodge::laplacian(G), a - hodge::harmonic_projection(a));
        h[i] = hodge::harmonic_projection(G).max_abs();
      });
      for (int i = 0; i < 100; ++i) {
        fundl = std::max(fundl, f[i]);
        lap = std::max(lap, l[i]);
        hg = std::max(hg, h[i]);
      }
    }
  o.detail << "T2/T3 bands 1..8, 100 forms each: fundl " << fundl << " (1e-10), |Delta G - Id + H| " << lap
           << ", |H G| " << hg << " (1e-13)";
  o.require(fundl < 1e-10, "fundl");
  o.require(lap < 1e-13 && hg < 1e-13, "Green identities");
}

// ---- 7: symplectic and contact identities

void criterion7(Outcome& o) {
  auto r = run_experiment({{"schema_version", 1},
                           {"experiment", "identity-suite"},
                           {"params", {{"points", 1000}, {"tolerance", 1e-8}}}});
  for (const auto& c : r.comparisons) {
    o.detail << " " << c.name << " " << c.estimate << ";";
    o.require(c.estimate < 1e-8, c.name);
  }
  o.require(r.comparisons.size() == 3, "three identities");
}

// ---- 8: Godbillon-Vey property suite

void criterion8(Outcome& o) {
  auto r = run_experiment({{"schema_version", 1}, {"experiment", "gv-family"}, {"params", {{"probes", 1000}}}});
  for (const auto& c : r.comparisons) {
    o.detail << " " << c.name << " " << c.estimate << (c.pass ? "" : "(!)") << ";";
    o.require(c.pass, c.name);
  }

  namespace gv = godbillon;
  auto five = gv::FoliationFamily::from_strings(
      "h du", {"x1", "x2", "x3", "x4", "x5"},
      {"exp(0.3*sin(x5 + t*x3) + 0.2*cos(x1) + 0.25*sin(x4 - t*x2))*0.4*cos(x1 + t*x2)",
       "exp(0.3*sin(x5 + t*x3) + 0.2*cos(x1) + 0.25*sin(x4 - t*x2))*0.4*t*cos(x1 + t*x2)", "0", "0",
       "exp(0.3*sin(x5 + t*x3) + 0.2*cos(x1) + 0.25*sin(x4 - t*x2))"},
      {"0", "0", "0", "0", "1"}, false, Vec::Constant(5, -1.0), Vec::Constant(5, 1.0));
  auto probes5 = gv::family_probes(five, 1000, 5);
  double c5 = gv::closedness_residual(five, gv::tgv_integrand(five, 0.6), probes5);
  double g5 = gv::closedness_residual(five, gv::gv_integrand(five, 0.6), probes5);
  o.detail << " 5D gv/tgv closedness " << g5 << "/" << c5 << ";";
  o.require(c5 < 1e-7 && g5 < 1e-7, "5D closedness");

  auto expfam = gv::FoliationFamily::from_strings("exp(tz)dx", {"x", "y", "z", "w"}, {"exp(t*z)", "0", "0", "0"},
                                                  {"1", "0", "0", "0"}, false, Vec::Constant(4, -1.0),
                                                  Vec::Constant(4, 1.0));
  double alt = gv::eq_alt_residual(expfam, 0.8, gv::family_probes(expfam, 1000, 6));
  o.detail << " exp(tz)dx eq_alt " << alt << ";";
  o.require(alt < 1e-5, "closed-form family identity");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (default all)")->delimiter(',')->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  std::set<int> selected(only.begin(), only.end());
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::map<int, std::function<void(Outcome&)>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8}};

  bool all = true;
  for (int k : selected) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      criteria.at(k)(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [error: " << e.what() << "]";
    }
    std::printf("%s criterion %d: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", k, o.detail.str().c_str(),
                seconds_since(t0));
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
