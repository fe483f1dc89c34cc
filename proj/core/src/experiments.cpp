#include "lklab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "lklab/fields.hpp"
#include "lklab/godbillon.hpp"
#include "lklab/hodge.hpp"
#include "lklab/linking.hpp"
#include "lklab/models.hpp"
#include "lklab/parallel.hpp"
#include "lklab/ruelle.hpp"

namespace lklab::experiments {

using nlohmann::json;

namespace {

json default_gv_family() {
  const std::string h = "exp(0.3*sin(x3 + t*cos(x4)) + 0.2*cos(x2))";
  const std::string c = "0.4*cos(x2 + t*sin(x3))";
  return {{"name", "t4-conformal-levels"},
          {"coordinates", {"x1", "x2", "x3", "x4"}},
          {"domain", "torus"},
          {"alpha", {h, h + "*" + c, h + "*" + c + "*t*cos(x3)", "0"}},
          {"transversal", {"1", "0.5", "0", "0"}}};
}

std::vector<ExperimentInfo> build_registry() {
  std::vector<ExperimentInfo> r;
  r.push_back({"s3xs3-linking",
               "Average asymptotic linking of a H1 + b H2 on S3 x S3 with N = {<z, w> = 0} against 2 (a - b) pi^3",
               {
                   {"a", 1.0, "rotation speed on the first factor"},
                   {"b", 0.0, "rotation speed on the second factor"},
                   {"t_end", 1000.0, "flow horizon"},
                   {"n_samples", 10000, "uniform starting points"},
                   {"systems", json::array({"geodesic", "covering"}), "short-path systems: geodesic, covering"},
                   {"covering_radius", 2.0, "ball radius of the covering system (below pi)"},
                   {"covering_seed", 11, "seed of the covering net"},
                   {"checkpoints", 8, "horizons t_end / 2^k, k < checkpoints, for running averages"},
                   {"tolerance_rel", 0.02, "relative tolerance against the closed form"},
                   {"tolerance_abs", 0.5, "absolute tolerance used when the closed form is 0"},
                   {"hopf_tolerance", 1e-6, "quadrature of the primitive over N against the closed form"},
                   {"reverse_orientation", false, "reverse the chain orientation"},
               }});
  r.push_back({"cp2-flux",
               "Average crossings of a Hamiltonian circle action on CP2 against the flux of i_X mu through the Seifert chain",
               {
                   {"t_end", 200.0, "flow horizon"},
                   {"n_samples", 4000, "uniform starting points"},
                   {"checkpoints", 8, "horizons t_end / 2^k, k < checkpoints, for running averages"},
                   {"tolerance_rel", 0.05, "relative tolerance of the crossing average against the flux"},
                   {"leaf_tolerance", 1e-8, "flux against the signed leaf sum of the primitive"},
                   {"primitive_tolerance", 1e-8, "d(H omega) = i_X mu on probe points"},
                   {"probes", 200, "probe points for residual checks"},
               }});
  r.push_back({"hodge-selftest",
               "Fourier Hodge theory on T^2 and T^3: linking-form identity, Green's operator identities, kernel growth",
               {
                   {"band", 8, "Fourier band |k|_inf <= band"},
                   {"dims", json::array({2, 3}), "torus dimensions"},
                   {"forms", 100, "random forms per dimension, cycling through the degrees"},
                   {"tolerance", 1e-10, "fundl residual bound"},
                   {"identity_tolerance", 1e-13, "Delta G = Id - H and H G = 0, coefficientwise"},
                   {"growth", true, "fit the log-log growth of the linking kernel near the diagonal"},
                   {"growth_tolerance", 0.2, "slope against 1 - n"},
               }});
  r.push_back({"gv-family",
               "Godbillon-Vey and TGV forms of a foliation family, the derived field and the Hopf-type integral",
               {
                   {"family", default_gv_family(), "coordinates, alpha, transversal, domain (torus|box), lower, upper"},
                   {"t", 0.7, "family parameter"},
                   {"probes", 200, "probe points"},
                   {"mc_samples", 50000, "Monte Carlo samples of the Hopf-type integral"},
                   {"rescale", "exp(0.4*cos(x1 + x4) + 0.1*t*sin(x2))", "nowhere vanishing f for alpha -> f alpha"},
                   {"shift", 0.2, "c in the closed form c (dx1 ^ dx2 + dx3 ^ dx4) added to the primitive"},
                   {"nodes", 8, "initial trapezoid nodes per axis"},
                   {"integrability_tolerance", 1e-8, "|alpha ^ d alpha|"},
                   {"closed_tolerance", 1e-7, "|d(beta ^ d beta)| and |d(beta_dot ^ beta ^ d beta)|"},
                   {"dbeta_tolerance", 1e-9, "|d beta ^ d beta|"},
                   {"tdot_tolerance", 1e-6, "jets against central differences in t"},
                   {"eq_alt_tolerance", 1e-5, "identity residual"},
                   {"rescale_tolerance", 1e-6, "TGV integral under alpha -> f alpha"},
                   {"divergence_tolerance", 1e-7, "|d(i_X mu)|"},
                   {"stderr_factor", 3.0, "Monte Carlo comparisons within this many standard errors"},
               }});
  r.push_back({"identity-suite",
               "Pointwise symplectic and contact identities at random points",
               {
                   {"points", 1000, "random points per identity"},
                   {"tolerance", 1e-8, "residual bound"},
               }});
  return r;
}

bool type_matches(const json& def, const json& v) {
  if (def.is_boolean()) return v.is_boolean();
  if (def.is_number_integer()) return v.is_number_integer();
  if (def.is_number()) return v.is_number();
  if (def.is_string()) return v.is_string();
  if (def.is_array()) return v.is_array();
  if (def.is_object()) return v.is_object();
  return false;
}

std::string type_name(const json& def) {
  if (def.is_boolean()) return "boolean";
  if (def.is_number_integer()) return "integer";
  if (def.is_number()) return "number";
  if (def.is_string()) return "string";
  if (def.is_array()) return "array";
  return "object";
}

Comparison compare(std::string name, double estimate, double target, double tolerance) {
  Comparison c;
  c.name = std::move(name);
  c.estimate = estimate;
  c.target = target;
  c.tolerance = tolerance;
  c.pass = std::isfinite(estimate) && std::abs(estimate - target) <= tolerance;
  return c;
}

// A residual compared against 0.
Comparison bound(std::string name, double residual, double tolerance) {
  return compare(std::move(name), residual, 0.0, tolerance);
}

std::vector<double> checkpoint_times(double t_end, int k) {
  std::vector<double> t;
  for (int i = k - 1; i >= 1; --i) t.push_back(t_end / std::pow(2.0, i));
  return t;
}

AverageOptions average_options(const Config& cfg, double t_end, std::size_t n, int checkpoints,
                               const Progress& progress, const std::string& stage) {
  AverageOptions o;
  o.t_end = t_end;
  o.n_samples = n;
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  o.checkpoints = checkpoint_times(t_end, checkpoints);
  if (progress) o.progress = [progress, stage](std::size_t d, std::size_t t) { progress(stage, d, t); };
  return o;
}

void add_running(RunResult& r, const AverageResult& res, const std::vector<std::string>& labels,
                 const std::vector<double>& cps, double t_end) {
  for (std::size_t s = 0; s < res.per_system.size(); ++s) {
    Series S;
    S.label = labels[s];
    for (std::size_t c = 0; c < cps.size(); ++c) {
      S.t.push_back(cps[c]);
      S.value.push_back(res.checkpoints[s][c].value);
    }
    S.t.push_back(t_end);
    S.value.push_back(res.per_system[s].value);
    r.running.push_back(std::move(S));
  }
}

json estimate_json(const LinkingEstimate& e) {
  return {{"value", e.value},
          {"stderr", e.std_error},
          {"samples", e.samples},
          {"horizon", e.horizon_t},
          {"crossings_flow", e.crossings_flow},
          {"crossings_closure", e.crossings_closure},
          {"mean_abs_closure", e.mean_abs_closure}};
}

RunResult run_s3xs3(const Config& cfg, const Progress& progress) {
  const json& p = cfg.params;
  const double a = p["a"], b = p["b"], t_end = p["t_end"];
  const auto n = p["n_samples"].get<std::size_t>();
  const int ncp = p["checkpoints"];
  if (!(t_end > 0.0) || n == 0 || ncp < 1) throw ConfigError("s3xs3-linking: t_end, n_samples and checkpoints must be positive");

  Manifold M = Manifold::sphere3xsphere3();
  PhaseChain chain = models::s3xs3_chain();
  if (p["reverse_orientation"].get<bool>()) chain = chain.reversed();
  VectorField X = hopf_pair_field(a, b);

  std::vector<ShortPathSystem> owned;
  std::vector<std::string> labels;
  for (const auto& s : p["systems"]) {
    if (!s.is_string()) throw ConfigError("s3xs3-linking: systems must be strings");
    const std::string name = s;
    if (name == "geodesic") {
      owned.push_back(ShortPathSystem::geodesic(M));
    } else if (name == "covering") {
      auto f = chain.f;
      owned.push_back(ShortPathSystem::covering(M, p["covering_seed"].get<std::uint64_t>(), p["covering_radius"],
                                                [f](const Point& x) { return std::abs(f(x)); }));
    } else {
      throw ConfigError("s3xs3-linking: unknown short-path system '" + name + "'");
    }
    labels.push_back(name);
  }
  if (owned.empty()) throw ConfigError("s3xs3-linking: at least one short-path system is needed");
  std::vector<const ShortPathSystem*> systems;
  for (const auto& s : owned) systems.push_back(&s);

  AverageOptions o = average_options(cfg, t_end, n, ncp, progress, "trajectories");
  AverageResult res = average_lk(M, X, chain, systems, o);

  RunResult r;
  r.experiment = "s3xs3-linking";
  const double sign = chain.orientation_sign;
  const double target = sign * models::s3xs3_target(a, b);
  const double tol = target != 0.0 ? p["tolerance_rel"].get<double>() * std::abs(target) : p["tolerance_abs"].get<double>();
  for (std::size_t s = 0; s < systems.size(); ++s) {
    Comparison c = compare("average_lk[" + labels[s] + "]", res.per_system[s].value, target, tol);
    c.extra = estimate_json(res.per_system[s]);
    r.comparisons.push_back(c);
  }

  if (progress) progress("hopf integral", 0, 1);
  FormField alpha = models::s3xs3_primitive(a, b);
  ParametricCycle N = models::s3xs3_cycle();
  N.orientation *= chain.orientation_sign;
  QuadratureOptions q;
  q.workers = cfg.workers;
  IntegralReport H = hopf_integral_submanifold(alpha, N, q);
  Comparison hc = compare("hopf_integral_submanifold", H.value, target, p["hopf_tolerance"]);
  hc.extra = H.to_json();
  r.comparisons.push_back(hc);

  if (systems.size() >= 2) {
    const auto& e1 = res.per_system[0];
    const auto& e2 = res.per_system[1];
    Comparison c = compare("short_path_independence[" + labels[0] + "," + labels[1] + "]", e1.value, e2.value,
                           2.0 * (e1.std_error + e2.std_error));
    r.comparisons.push_back(c);
  }

  r.details = {{"volume", res.volume}, {"degenerate_resampled", res.degenerate}, {"closed_form", target}};
  r.csv_header = {"sample", "attempts", "flow"};
  for (const auto& l : labels) {
    r.csv_header.push_back("closure_" + l);
    r.csv_header.push_back("lk_" + l);
  }
  for (const auto& rec : res.records) {
    std::vector<double> row{static_cast<double>(rec.index), static_cast<double>(rec.attempts),
                            static_cast<double>(rec.flow)};
    for (std::size_t s = 0; s < systems.size(); ++s) {
      row.push_back(static_cast<double>(rec.closure[s]));
      row.push_back(rec.value[s]);
    }
    r.csv_rows.push_back(std::move(row));
  }
  add_running(r, res, labels, o.checkpoints, t_end);
  r.plot_target = target;
  return r;
}

RunResult run_cp2(const Config& cfg, const Progress& progress) {
  const json& p = cfg.params;
  const double t_end = p["t_end"];
  const auto n = p["n_samples"].get<std::size_t>();
  const int ncp = p["checkpoints"];
  if (!(t_end > 0.0) || n == 0 || ncp < 1) throw ConfigError("cp2-flux: t_end, n_samples and checkpoints must be positive");

  Manifold M = Manifold::cp2();
  auto A = models::cp2_default_hamiltonian();
  VectorField X = models::cp2_field(A);
  PhaseChain chain = models::cp2_chain();

  RunResult r;
  r.experiment = "cp2-flux";
  if (progress) progress("quadrature", 0, 1);
  QuadratureOptions q;
  q.workers = cfg.workers;
  IntegralReport flux = integrate_over_cycle(interior_product(X, M.volume_form()), models::cp2_seifert_chain(), q);

  RuelleOptions ro;
  ro.seed = cfg.seed;
  ro.workers = cfg.workers;
  ro.quad = q;
  ro.probes = p["probes"];
  ro.primitive_tol = p["primitive_tolerance"];
  FormField alpha = models::cp2_primitive(A);
  auto probes = random_probes(M, p["probes"].get<std::size_t>(), cfg.seed ^ 0x5bd1e995ULL);
  const double prim = primitive_residual(M, X, alpha, probes);
  IntegralReport leaves = hopf_integral_foliation(M, X, models::cp2_leaves(), alpha, ro);

  auto sys = ShortPathSystem::geodesic(M);
  AverageOptions o = average_options(cfg, t_end, n, ncp, progress, "trajectories");
  AverageResult res = average_lk(M, X, chain, {&sys}, o);
  const auto& e = res.per_system[0];

  Comparison c = compare("average_lk[geodesic]", e.value, flux.value, p["tolerance_rel"].get<double>() * std::abs(flux.value));
  c.extra = estimate_json(e);
  r.comparisons.push_back(c);
  Comparison lc = compare("leaf_sum", leaves.value, flux.value, p["leaf_tolerance"]);
  lc.extra = leaves.to_json();
  r.comparisons.push_back(lc);
  r.comparisons.push_back(bound("primitive_residual", prim, p["primitive_tolerance"]));

  r.details = {{"flux", flux.to_json()}, {"volume", res.volume}, {"degenerate_resampled", res.degenerate}};
  r.csv_header = {"sample", "attempts", "flow", "closure", "lk"};
  for (const auto& rec : res.records)
    r.csv_rows.push_back({static_cast<double>(rec.index), static_cast<double>(rec.attempts),
                          static_cast<double>(rec.flow), static_cast<double>(rec.closure[0]), rec.value[0]});
  add_running(r, res, {"geodesic"}, o.checkpoints, t_end);
  r.plot_target = flux.value;
  return r;
}

RunResult run_hodge(const Config& cfg, const Progress& progress) {
  const json& p = cfg.params;
  const int band = p["band"];
  const int forms = p["forms"];
  if (band < 1 || forms < 1) throw ConfigError("hodge-selftest: band and forms must be positive");
  RunResult r;
  r.experiment = "hodge-selftest";
  r.csv_header = {"n", "degree", "form", "fundl", "laplacian_green", "harmonic_green"};
  for (const auto& dj : p["dims"]) {
    if (!dj.is_number_integer()) throw ConfigError("hodge-selftest: dims must be integers");
    const int n = dj;
    if (n < 1 || n > 4) throw ConfigError("hodge-selftest: dims must lie in 1..4");
    std::vector<std::array<double, 3>> res(forms);
    parallel_for(
        static_cast<std::size_t>(forms),
        [&](std::size_t i) {
          auto rng = stream_rng(cfg.seed, static_cast<std::uint64_t>(n) * 1000003ULL + i);
          const int deg = static_cast<int>(i % static_cast<std::size_t>(n + 1));
          auto a = hodge::FourierForm::random(n, deg, band, rng);
          auto G = hodge::greens_operator(a);
          res[i][0] = hodge::fundl_residual(a);
          res[i][1] = hodge::coeff_distance(hodge::laplacian(G), a - hodge::harmonic_projection(a));
          res[i][2] = hodge::harmonic_projection(G).max_abs();
        },
        cfg.workers);
    double m[3] = {0, 0, 0};
    for (int i = 0; i < forms; ++i) {
      for (int k = 0; k < 3; ++k) m[k] = std::max(m[k], res[i][k]);
      r.csv_rows.push_back({static_cast<double>(n), static_cast<double>(i % (n + 1)), static_cast<double>(i), res[i][0],
                            res[i][1], res[i][2]});
    }
    const std::string tag = "[T" + std::to_string(n) + "]";
    r.comparisons.push_back(bound("fundl_residual" + tag, m[0], p["tolerance"]));
    r.comparisons.push_back(bound("laplacian_green" + tag, m[1], p["identity_tolerance"]));
    r.comparisons.push_back(bound("harmonic_green" + tag, m[2], p["identity_tolerance"]));
    if (progress) progress("forms", static_cast<std::size_t>(n), 0);

    if (p["growth"].get<bool>() && (n == 2 || n == 3)) {
      // T^2 uses the max over the sphere; on T^3 the cube-truncated kernel
      // has Gibbs spikes and the sphere mean is the stable statistic.
      hodge::GrowthFit fit =
          n == 2 ? hodge::kernel_growth(hodge::linking_kernel(2, 0, 64), 0.1, 0.6, 12, 60, cfg.seed)
                 : hodge::kernel_growth(hodge::linking_kernel(3, 0, 24), 0.4, 1.2, 12, 60, cfg.seed,
                                        hodge::SphereStatistic::Mean);
      Comparison c = compare("kernel_growth_slope" + tag, fit.slope, 1.0 - n, p["growth_tolerance"]);
      c.extra = {{"radii", fit.radii}, {"values", fit.values}};
      r.comparisons.push_back(c);
    }
  }
  return r;
}

RunResult run_gv(const Config& cfg, const Progress& progress) {
  namespace gv = godbillon;
  const json& p = cfg.params;
  gv::FoliationFamily fam = gv::FoliationFamily::from_json(p["family"]);
  const double t = p["t"];
  const auto nprobe = p["probes"].get<std::size_t>();
  const double k = p["stderr_factor"];
  auto probes = gv::family_probes(fam, nprobe, cfg.seed);
  Manifold M = fam.manifold();

  RunResult r;
  r.experiment = "gv-family";
  auto stage = [&](const std::string& s) {
    if (progress) progress(s, 0, 1);
  };

  stage("residuals");
  gv::Residual integ = gv::integrability_residual(fam, t, probes);
  r.comparisons.push_back(bound("integrability", integ.max, p["integrability_tolerance"]));
  gv::beta_from_alpha(fam, t, probes);
  r.comparisons.push_back(bound("gv_closedness", gv::closedness_residual(fam, gv::gv_integrand(fam, t), probes),
                                p["closed_tolerance"]));
  if (fam.n() >= 4) {
    // The TGV form is a top form in dimension four, closed for free.
    if (fam.n() >= 5)
      r.comparisons.push_back(bound("tgv_closedness",
                                    gv::closedness_residual(fam, gv::tgv_integrand(fam, t), probes),
                                    p["closed_tolerance"]));
    r.comparisons.push_back(bound("dbeta_square", gv::dbeta_square_residual(fam, t, probes), p["dbeta_tolerance"]));
    r.comparisons.push_back(bound("eq_alt_residual", gv::eq_alt_residual(fam, t, probes), p["eq_alt_tolerance"]));
  }
  r.comparisons.push_back(bound("tdot_central_difference", gv::tdot_residual(fam, t, probes), p["tdot_tolerance"]));

  auto [X, G] = gv::derived_field_and_foliation(fam, t, M.volume_form());
  std::vector<Point> field_probes = probes;
  r.comparisons.push_back(
      bound("divergence", divergence_residual(M, X, M.volume_form(), field_probes), p["divergence_tolerance"]));

  if (fam.periodic && fam.n() == 4) {
    stage("tgv integral");
    IntegralReport I = gv::tgv_integral(fam, t, p["nodes"], 1e-10, 32, cfg.workers);
    IntegralReport If = gv::tgv_integral(fam.rescaled(p["rescale"]), t, p["nodes"], 1e-10, 32, cfg.workers);
    Comparison c = compare("tgv_rescale_invariance", I.value, If.value, p["rescale_tolerance"]);
    c.extra = {{"tgv", I.to_json()}, {"tgv_rescaled", If.to_json()}};
    r.comparisons.insert(r.comparisons.begin(), c);

    stage("hopf-type integral");
    RuelleOptions ro;
    ro.mc_samples = p["mc_samples"];
    ro.seed = cfg.seed;
    ro.workers = cfg.workers;
    FormField prim = gv::field_primitive(fam, t);
    IntegralReport H = hopf_integral_foliation(M, X, G, prim, ro);
    Comparison hc = compare("hopf_vs_tgv", H.value, I.value, k * H.error);
    hc.extra = H.to_json();
    r.comparisons.push_back(hc);

    // A closed constant 2-form; dx1 ^ dx2 alone can be annihilated by d beta.
    Alt c2(fam.n(), 2);
    c2.at(0b0011u) = p["shift"].get<double>();
    c2.at(0b1100u) = p["shift"].get<double>();
    FormField shifted = prim + constant_form(fam.n(), c2, "c (dx1^dx2 + dx3^dx4)");
    IntegralReport Hs = hopf_integral_foliation(M, X, G, shifted, ro);
    Comparison sc = compare("primitive_shift", Hs.value, H.value, k * std::hypot(H.error, Hs.error));
    sc.extra = Hs.to_json();
    r.comparisons.push_back(sc);
  }

  r.csv_header = {"probe"};
  for (const auto& c : fam.coordinates) r.csv_header.push_back(c);
  for (const char* h : {"integrability", "dbeta_square", "eq_alt", "divergence", "tdot"}) r.csv_header.push_back(h);
  for (std::size_t i = 0; i < probes.size(); ++i) {
    std::vector<Point> one{probes[i]};
    std::vector<double> row{static_cast<double>(i)};
    for (int j = 0; j < fam.n(); ++j) row.push_back(probes[i].x[j]);
    row.push_back(gv::integrability_residual(fam, t, one).max);
    row.push_back(gv::dbeta_square_residual(fam, t, one));
    row.push_back(fam.n() >= 4 ? gv::eq_alt_residual(fam, t, one) : 0.0);
    row.push_back(divergence_residual(M, X, M.volume_form(), one));
    row.push_back(gv::tdot_residual(fam, t, one));
    r.csv_rows.push_back(std::move(row));
  }
  r.details = {{"family", fam.name}, {"t", t}, {"min_abs_alpha_V", gv::min_abs_alpha_V(fam, t, probes)}};
  return r;
}

std::vector<Point> box_probes(int n, std::size_t count, std::uint64_t seed) {
  std::vector<Point> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto rng = stream_rng(seed, i);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    out[i].x = Vec(n);
    for (int k = 0; k < n; ++k) out[i].x[k] = U(rng);
  }
  return out;
}

RunResult run_identities(const Config& cfg, const Progress& progress) {
  const json& p = cfg.params;
  const auto npts = p["points"].get<std::size_t>();
  const double tol = p["tolerance"];
  RunResult r;
  r.experiment = "identity-suite";
  r.csv_header = {"identity", "point", "residual"};

  struct Case {
    std::string name;
    Manifold M;
    FormField lhs, rhs;
    std::vector<Point> probes;
  };
  std::vector<Case> cases;
  {
    Manifold M = Manifold::cp2();
    auto A = models::cp2_default_hamiltonian();
    FormField omega = models::cp2_kahler_form();
    ScalarFunction H = models::cp2_moment_map(A);
    VectorField X = hamiltonian_field(M, H, omega);
    cases.push_back({"symplectic[CP2]", M, numeric_d_richardson(multiply(H, 2.0 * omega)),
                     interior_product(X, wedge(omega, omega)), random_probes(M, npts, cfg.seed)});
  }
  {
    Manifold M = Manifold::sphere2xsphere2();
    FormField omega = models::s2xs2_symplectic_form();
    ScalarFunction H = models::s2xs2_hamiltonian(1.0, 0.7, 0.5);
    VectorField X = hamiltonian_field(M, H, omega);
    cases.push_back({"symplectic[S2xS2]", M, numeric_d_richardson(multiply(H, 2.0 * omega)),
                     interior_product(X, wedge(omega, omega)), random_probes(M, npts, cfg.seed + 1)});
  }
  {
    Manifold M = Manifold::euclidean(5);
    FormField alpha = models::r5_contact_form();
    FormField da = exterior_d(alpha);
    cases.push_back({"contact[R5]", M, numeric_d_richardson(wedge(alpha, da)), wedge(da, da),
                     box_probes(5, npts, cfg.seed + 2)});
  }
  for (std::size_t c = 0; c < cases.size(); ++c) {
    if (progress) progress(cases[c].name, c, cases.size());
    std::vector<double> res(npts);
    parallel_for(
        npts,
        [&](std::size_t i) {
          res[i] = form_difference(cases[c].M, cases[c].lhs, cases[c].rhs, {cases[c].probes[i]});
        },
        cfg.workers);
    double m = 0.0;
    for (std::size_t i = 0; i < npts; ++i) {
      m = std::max(m, res[i]);
      r.csv_rows.push_back({static_cast<double>(c), static_cast<double>(i), res[i]});
    }
    r.comparisons.push_back(bound(cases[c].name, m, tol));
  }
  r.details = {{"identities", {"symplectic[CP2]", "symplectic[S2xS2]", "contact[R5]"}}};
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = build_registry();
  return r;
}

const ExperimentInfo& find(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

json schema_reference() {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["top_level"] = {
      {"schema_version", "integer, must equal " + std::to_string(kSchemaVersion)},
      {"experiment", "string, one of the experiments below"},
      {"seed", "unsigned integer, default 1"},
      {"workers", "integer, 0 uses LKLAB_WORKERS or the hardware concurrency"},
      {"params", "object, experiment parameters"},
      {"output", "object {dir: string '.', csv: true, summary: true, plot: true}"}};
  json ex = json::object();
  for (const auto& e : registry()) {
    json ps = json::object();
    for (const auto& p : e.params)
      ps[p.name] = {{"type", type_name(p.default_value)}, {"default", p.default_value}, {"help", p.help}};
    ex[e.name] = {{"summary", e.summary}, {"params", ps}};
  }
  j["experiments"] = ex;
  return j;
}

Config parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> top = {"schema_version", "experiment", "seed", "workers", "params", "output"};
  for (const auto& [k, v] : j.items())
    if (std::find(top.begin(), top.end(), k) == top.end()) throw ConfigError("unknown top-level key '" + k + "'");
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw ConfigError("schema_version must be " + std::to_string(kSchemaVersion));
  if (!j.contains("experiment") || !j["experiment"].is_string()) throw ConfigError("'experiment' must be a string");

  Config c;
  c.experiment = j["experiment"];
  const ExperimentInfo& info = find(c.experiment);
  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("'seed' must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("workers")) {
    if (!j["workers"].is_number_integer() || j["workers"].get<int>() < 0)
      throw ConfigError("'workers' must be a non-negative integer");
    c.workers = j["workers"];
  }

  c.params = json::object();
  for (const auto& p : info.params) c.params[p.name] = p.default_value;
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ConfigError("'params' must be an object");
    for (const auto& [k, v] : j["params"].items()) {
      auto it = std::find_if(info.params.begin(), info.params.end(), [&](const ParamSpec& s) { return s.name == k; });
      if (it == info.params.end()) throw ConfigError(c.experiment + ": unknown parameter '" + k + "'");
      if (!type_matches(it->default_value, v))
        throw ConfigError(c.experiment + ": parameter '" + k + "' must be of type " + type_name(it->default_value));
      c.params[k] = v;
    }
  }
  for (const auto& [k, v] : c.params.items()) {
    if (k.find("tolerance") != std::string::npos || k == "stderr_factor") {
      if (!(v.get<double>() > 0.0)) throw ConfigError(c.experiment + ": '" + k + "' must be positive");
    }
    if (v.is_number_integer() && v.get<long long>() < 0)
      throw ConfigError(c.experiment + ": '" + k + "' must not be negative");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) throw ConfigError("'output' must be an object");
    for (const auto& [k, v] : o.items()) {
      if (k == "dir") {
        if (!v.is_string()) throw ConfigError("output.dir must be a string");
        c.out_dir = v;
      } else if (k == "csv" || k == "summary" || k == "plot") {
        if (!v.is_boolean()) throw ConfigError("output." + k + " must be a boolean");
        (k == "csv" ? c.write_csv : k == "summary" ? c.write_summary : c.write_plot) = v.get<bool>();
      } else {
        throw ConfigError("unknown output key '" + k + "'");
      }
    }
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

bool RunResult::pass() const {
  if (comparisons.empty()) return false;
  for (const auto& c : comparisons)
    if (!c.pass) return false;
  return true;
}

json RunResult::summary(const Config& cfg) const {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = experiment;
  j["seed"] = cfg.seed;
  j["params"] = cfg.params;
  const Comparison& head = comparisons.front();
  j["estimate"] = head.estimate;
  j["target"] = head.target;
  j["tolerance"] = head.tolerance;
  j["pass"] = pass();
  json cs = json::array();
  for (const auto& c : comparisons)
    cs.push_back({{"name", c.name},
                  {"estimate", c.estimate},
                  {"target", c.target},
                  {"tolerance", c.tolerance},
                  {"pass", c.pass},
                  {"extra", c.extra}});
  j["comparisons"] = cs;
  j["details"] = details;
  return j;
}

RunResult run(const Config& cfg, const Progress& progress) {
  if (cfg.experiment == "s3xs3-linking") return run_s3xs3(cfg, progress);
  if (cfg.experiment == "cp2-flux") return run_cp2(cfg, progress);
  if (cfg.experiment == "hodge-selftest") return run_hodge(cfg, progress);
  if (cfg.experiment == "gv-family") return run_gv(cfg, progress);
  if (cfg.experiment == "identity-suite") return run_identities(cfg, progress);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

std::vector<std::string> write_artifacts(const RunResult& r, const Config& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::vector<std::string> written;
  if (cfg.write_csv) {
    fs::path path = fs::path(cfg.out_dir) / "samples.csv";
    std::ofstream out(path);
    for (std::size_t i = 0; i < r.csv_header.size(); ++i) out << (i ? "," : "") << r.csv_header[i];
    out << "\n";
    for (const auto& row : r.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
      out << "\n";
    }
    written.push_back(path.string());
  }
  if (cfg.write_summary) {
    fs::path path = fs::path(cfg.out_dir) / "summary.json";
    std::ofstream(path) << r.summary(cfg).dump(2) << "\n";
    written.push_back(path.string());
  }
  if (cfg.write_plot && !r.running.empty()) {
    fs::path path = fs::path(cfg.out_dir) / "running_average.svg";
    std::ofstream(path) << render_svg(r.running, r.plot_target, r.experiment + ": running averages");
    written.push_back(path.string());
  }
  return written;
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, double target, const std::string& title) {
  const double W = 720, H = 440, L = 80, R = 150, T = 40, B = 50;
  double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
  double vmin = target, vmax = target;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      tmin = std::min(tmin, s.t[i]);
      tmax = std::max(tmax, s.t[i]);
      vmin = std::min(vmin, s.value[i]);
      vmax = std::max(vmax, s.value[i]);
    }
  if (!(tmin > 0.0) || !(tmax > tmin)) {
    tmin = 1.0;
    tmax = 10.0;
  }
  const double pad = 0.08 * std::max(vmax - vmin, 1e-9 + 1e-3 * std::abs(vmax));
  vmin -= pad;
  vmax += pad;
  auto X = [&](double t) { return L + (std::log(t) - std::log(tmin)) / (std::log(tmax) - std::log(tmin)) * (W - L - R); };
  auto Y = [&](double v) { return T + (vmax - v) / (vmax - vmin) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os << std::setprecision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title) << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    double v = vmin + (vmax - vmin) * i / 4.0;
    os << "<text x=\"" << L - 6 << "\" y=\"" << Y(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << v << "</text>\n";
    double t = std::exp(std::log(tmin) + (std::log(tmax) - std::log(tmin)) * i / 4.0);
    os << "<text x=\"" << X(t) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">" << t << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">t (log scale)</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Y(target) << "\" x2=\"" << W - R << "\" y2=\"" << Y(target)
     << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
  os << "<text x=\"" << W - R + 6 << "\" y=\"" << Y(target) + 4 << "\" font-size=\"11\" fill=\"gray\">target</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* col = colors[s % 5];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[s].t.size(); ++i) os << X(series[s].t[i]) << "," << Y(series[s].value[i]) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 6 << "\" y=\"" << T + 16 * (s + 1) << "\" font-size=\"12\" fill=\"" << col << "\">"
       << xml_escape(series[s].label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kSchema;
  if (dynamic_cast<const DegenerateOverflow*>(&e)) return kDegenerate;
  if (dynamic_cast<const QuadratureError*>(&e)) return kQuadrature;
  if (dynamic_cast<const IntegrationError*>(&e)) return kIntegration;
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return kSchema;
  return kOther;
}

}  // namespace lklab::experiments
