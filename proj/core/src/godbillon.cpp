#include "lklab/godbillon.hpp"

#include <cmath>
#include <sstream>

#include "lklab/fields.hpp"
#include "lklab/parallel.hpp"
#include "lklab/quadrature.hpp"

namespace lklab::godbillon {

namespace {

using JAlt = AltTensor<Jet>;

std::string describe(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

Alt value(const JAlt& a) {
  Alt r(a.dim(), a.degree());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i].value();
  return r;
}

JAlt partial(const JAlt& a, int v) {
  JAlt r(a.dim(), a.degree());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i].partial(v);
  return r;
}

JAlt dx(const JAlt& a) {
  std::vector<JAlt> parts;
  parts.reserve(a.dim());
  for (int i = 0; i < a.dim(); ++i) parts.push_back(partial(a, i));
  return d_from_partials(parts);
}

// theta with omega = alpha ^ theta, by i_V omega / alpha(V).
JAlt divide(const JAlt& omega, const std::vector<Jet>& V, const Jet& inv_aV) {
  return interior(V, omega) * inv_aV;
}

bool fits(int n, int degree) { return degree <= n; }

std::vector<std::string> sources(const std::vector<Expr>& es) {
  std::vector<std::string> r;
  for (const auto& e : es) r.push_back(e.source());
  return r;
}

FormField chart_form(const FoliationFamily& fam, int degree, std::string name, std::function<Alt(const Point&)> eval,
                     std::function<Alt(const Point&)> d_eval = {}) {
  FormField f;
  f.degree = degree;
  f.dim = fam.n();
  f.ambient = fam.n();
  f.name = std::move(name);
  f.eval = std::move(eval);
  f.d_eval = std::move(d_eval);
  return f;
}

}  // namespace

Manifold FoliationFamily::manifold() const { return periodic ? Manifold::torus(n()) : Manifold::euclidean(n()); }

FoliationFamily FoliationFamily::from_strings(std::string name, std::vector<std::string> coordinates,
                                              const std::vector<std::string>& alpha,
                                              const std::vector<std::string>& transversal, bool periodic, Vec lower,
                                              Vec upper) {
  const int n = static_cast<int>(coordinates.size());
  if (n < 3 || n > alt::kMaxDim - 1) throw ConfigError("foliation family '" + name + "': bad number of coordinates");
  if (static_cast<int>(alpha.size()) != n || static_cast<int>(transversal.size()) != n)
    throw ConfigError("foliation family '" + name + "': alpha and transversal need one entry per coordinate");
  for (const auto& c : coordinates)
    if (c == "t") throw ConfigError("foliation family '" + name + "': 't' is reserved for the family parameter");
  FoliationFamily f;
  f.name = std::move(name);
  f.coordinates = std::move(coordinates);
  f.periodic = periodic;
  std::vector<std::string> with_t = f.coordinates;
  with_t.push_back("t");
  for (const auto& s : alpha) f.alpha.push_back(Expr::parse(s, with_t));
  for (const auto& s : transversal) f.transversal.push_back(Expr::parse(s, f.coordinates));
  if (periodic) {
    f.lower = Vec::Zero(n);
    f.upper = Vec::Constant(n, 2.0 * kPi);
  } else {
    if (lower.size() != n || upper.size() != n)
      throw ConfigError("foliation family '" + f.name + "': a box domain needs lower and upper corners");
    for (int i = 0; i < n; ++i)
      if (!(lower[i] < upper[i])) throw ConfigError("foliation family '" + f.name + "': empty box");
    f.lower = std::move(lower);
    f.upper = std::move(upper);
  }
  return f;
}

FoliationFamily FoliationFamily::from_json(const nlohmann::json& j) {
  try {
    const std::string domain = j.value("domain", "torus");
    if (domain != "torus" && domain != "box") throw ConfigError("foliation family: domain must be 'torus' or 'box'");
    Vec lo, hi;
    if (domain == "box") {
      auto l = j.at("lower").get<std::vector<double>>();
      auto u = j.at("upper").get<std::vector<double>>();
      lo = Eigen::Map<const Eigen::VectorXd>(l.data(), l.size());
      hi = Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
    }
    return from_strings(j.value("name", "family"), j.at("coordinates").get<std::vector<std::string>>(),
                        j.at("alpha").get<std::vector<std::string>>(),
                        j.at("transversal").get<std::vector<std::string>>(), domain == "torus", lo, hi);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("foliation family: ") + e.what());
  }
}

FoliationFamily FoliationFamily::rescaled(const std::string& f) const {
  std::vector<std::string> a;
  for (const auto& e : alpha) a.push_back("(" + f + ")*(" + e.source() + ")");
  return from_strings(name + "*f", coordinates, a, sources(transversal), periodic, lower, upper);
}

FoliationFamily FoliationFamily::with_transversal(const std::vector<std::string>& V) const {
  return from_strings(name, coordinates, sources(alpha), V, periodic, lower, upper);
}

PointData evaluate(const FoliationFamily& fam, const Vec& x, double t, int order) {
  const int n = fam.n();
  if (x.size() != n) throw DomainError("godbillon::evaluate: point has the wrong dimension");
  if (order < 2) throw DomainError("godbillon::evaluate: order must be at least 2");
  auto sp = JetSpace::get(n + 1, order);
  std::vector<Jet> vars;
  for (int i = 0; i < n; ++i) vars.push_back(Jet::variable(sp, i, x[i]));
  vars.push_back(Jet::variable(sp, n, t));
  std::vector<Jet> xvars(vars.begin(), vars.end() - 1);

  JAlt alpha(n, 1);
  for (int i = 0; i < n; ++i) alpha[i] = fam.alpha[i].eval(vars);
  std::vector<Jet> V;
  for (int i = 0; i < n; ++i) V.push_back(fam.transversal[i].eval(xvars));
  Jet aV = interior(V, alpha)[0];

  PointData r;
  r.alpha_V = aV.value();
  if (std::abs(r.alpha_V) < 1e-12)
    throw DomainError("godbillon: transversal is tangent to the foliation at " + describe(x));
  Jet inv = 1.0 / aV;

  JAlt dalpha = dx(alpha);
  JAlt beta = divide(dalpha, V, inv);
  JAlt dbeta = dx(beta);
  JAlt alpha_dot = partial(alpha, n);
  JAlt beta_dot = partial(beta, n);
  r.alpha = value(alpha);
  r.alpha_dot = value(alpha_dot);
  r.dalpha = value(dalpha);
  r.beta = value(beta);
  r.beta_dot = value(beta_dot);
  r.dbeta = value(dbeta);

  JAlt gv, tgv;
  if (fits(n, 3)) {
    gv = wedge(beta, dbeta);
    r.gv = value(gv);
  }
  if (fits(n, 4)) {
    tgv = wedge(beta_dot, gv);
    r.tgv = value(tgv);
  }
  if (order < 3) return r;

  JAlt gamma = divide(dbeta, V, inv);
  r.gamma = value(gamma);
  if (fits(n, 3)) {
    JAlt dgamma = dx(gamma);
    r.dgamma = value(dgamma);
    JAlt delta = divide(dgamma - wedge(beta, gamma), V, inv);
    r.delta = value(delta);
    if (fits(n, 4)) {
      r.d_gv = value(dx(gv));
      JAlt adbg = wedge(wedge(alpha_dot, beta), gamma);
      JAlt rhs = dx(adbg) - wedge(wedge(wedge(alpha_dot, beta), alpha), delta);
      r.alt_rhs = value(rhs);
    }
  }
  if (fits(n, 3)) {
    JAlt ff = dx(wedge(beta_dot, beta));
    r.field_form = value(ff);
    if (order >= 4 && fits(n, 4)) r.d_field_form = value(dx(ff));
  }
  return r;
}

std::vector<Point> family_probes(const FoliationFamily& fam, std::size_t n, std::uint64_t seed) {
  std::vector<Point> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = stream_rng(seed, i);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Vec x(fam.n());
    for (int k = 0; k < fam.n(); ++k) x[k] = fam.lower[k] + U(rng) * (fam.upper[k] - fam.lower[k]);
    out[i].x = x;
  }
  return out;
}

Residual integrability_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes) {
  Residual r;
  if (fam.n() < 3) return r;
  for (const auto& p : probes) {
    PointData d = evaluate(fam, p.x, t, 2);
    double v = max_abs(wedge(d.alpha, d.dalpha));
    if (v > r.max || r.where.x.size() == 0) {
      r.max = std::max(r.max, v);
      r.where = p;
    }
  }
  return r;
}

double min_abs_alpha_V(const FoliationFamily& fam, double t, const std::vector<Point>& probes) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : probes) m = std::min(m, std::abs(evaluate(fam, p.x, t, 2).alpha_V));
  return m;
}

FormField beta_from_alpha(const FoliationFamily& fam, double t, const std::vector<Point>& probes, double tol) {
  for (const auto& p : probes) {
    PointData d = evaluate(fam, p.x, t, 2);
    double res = max_abs(d.dalpha - wedge(d.alpha, d.beta));
    if (!(res < tol)) {
      std::ostringstream os;
      os << "beta_from_alpha: |d alpha - alpha ^ beta| = " << res << " at " << describe(p.x)
         << " (integrability or transversality fails)";
      throw DomainError(os.str());
    }
  }
  return chart_form(
      fam, 1, "beta", [fam, t](const Point& p) { return evaluate(fam, p.x, t, 2).beta; },
      [fam, t](const Point& p) { return evaluate(fam, p.x, t, 2).dbeta; });
}

FormField gv_integrand(const FoliationFamily& fam, double t) {
  if (fam.n() < 3) throw DomainError("gv_integrand: needs at least three coordinates");
  std::function<Alt(const Point&)> d_eval;
  if (fam.n() >= 4) d_eval = [fam, t](const Point& p) { return evaluate(fam, p.x, t, 3).d_gv; };
  return chart_form(
      fam, 3, "beta^dbeta", [fam, t](const Point& p) { return evaluate(fam, p.x, t, 2).gv; }, d_eval);
}

FormField tgv_integrand(const FoliationFamily& fam, double t) {
  if (fam.n() < 4) throw DomainError("tgv_integrand: needs at least four coordinates");
  return chart_form(fam, 4, "beta_dot^beta^dbeta", [fam, t](const Point& p) { return evaluate(fam, p.x, t, 2).tgv; });
}

FormField dbeta_form(const FoliationFamily& fam, double t) {
  return chart_form(
      fam, 2, "dbeta", [fam, t](const Point& p) { return evaluate(fam, p.x, t, 2).dbeta; },
      [fam](const Point&) { return Alt(fam.n(), 3); });
}

FormField field_primitive(const FoliationFamily& fam, double t) {
  return chart_form(
      fam, 2, "beta_dot^beta",
      [fam, t](const Point& p) {
        PointData d = evaluate(fam, p.x, t, 2);
        return wedge(d.beta_dot, d.beta);
      },
      [fam, t](const Point& p) { return evaluate(fam, p.x, t, 3).field_form; });
}

double closedness_residual(const FoliationFamily& fam, const FormField& a, const std::vector<Point>& probes) {
  if (a.degree >= fam.n()) return 0.0;
  FormField da = numeric_d_richardson(a);
  double m = 0.0;
  for (const auto& p : probes) m = std::max(m, max_abs(da(p)));
  return m;
}

double dbeta_square_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes) {
  if (fam.n() < 4) return 0.0;
  double m = 0.0;
  for (const auto& p : probes) {
    PointData d = evaluate(fam, p.x, t, 2);
    m = std::max(m, max_abs(wedge(d.dbeta, d.dbeta)));
  }
  return m;
}

double tdot_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes, double dt) {
  double m = 0.0;
  for (const auto& p : probes) {
    auto central = [&](double h) {
      return (evaluate(fam, p.x, t + h, 2).beta - evaluate(fam, p.x, t - h, 2).beta) * (0.5 / h);
    };
    Alt coarse = central(dt), fine = central(dt / 10.0);
    Alt rich = (fine * 100.0 - coarse) * (1.0 / 99.0);
    m = std::max(m, max_abs(rich - evaluate(fam, p.x, t, 2).beta_dot));
  }
  return m;
}

double eq_alt_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes, double relation_tol) {
  double m = 0.0;
  for (const auto& p : probes) {
    PointData d = evaluate(fam, p.x, t, 3);
    double rel = max_abs(d.dbeta - wedge(d.alpha, d.gamma));
    if (fam.n() >= 3) rel = std::max(rel, max_abs(d.dgamma - wedge(d.beta, d.gamma) - wedge(d.alpha, d.delta)));
    if (!(rel < relation_tol)) {
      std::ostringstream os;
      os << "eq_alt_residual: division step fails by " << rel << " at " << describe(p.x);
      throw DomainError(os.str());
    }
    if (fam.n() >= 4) m = std::max(m, max_abs(d.tgv - d.alt_rhs));
  }
  return m;
}

std::pair<VectorField, MeasuredFoliation> derived_field_and_foliation(const FoliationFamily& fam, double t,
                                                                      const FormField& mu) {
  const int n = fam.n();
  if (mu.degree != n || mu.ambient != n) throw DomainError("derived_field: mu must be a top-degree form on the chart");
  VectorField X;
  X.name = "X[" + fam.name + "]";
  X.ambient = n;
  X.eval = [fam, t, mu, n](const Point& p, double) {
    Alt m = mu(p);
    Alt eta = evaluate(fam, p.x, t, 3).field_form;
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Unit(n, i);
      Alt col = interior(e, m);
      for (int r = 0; r < n; ++r) A(r, i) = col[r];
    }
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) b[r] = eta[r];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
      throw DomainError("derived_field: volume form is degenerate at " + describe(p.x));
    Eigen::VectorXd x = lu.solve(b);
    return Vec(x);
  };
  return {X, MeasuredFoliation::exact_form(dbeta_form(fam, t), "(G, dbeta)")};
}

IntegralReport tgv_integral(const FoliationFamily& fam, double t, int nodes, double tol, int max_nodes, int workers) {
  if (!fam.periodic) throw DomainError("tgv_integral: needs a periodic domain");
  if (fam.n() != 4) throw DomainError("tgv_integral: needs a four-dimensional torus");
  IntegralReport rep;
  rep.method = "trapezoid";
  double previous = 0.0;
  for (int m = nodes; m <= max_nodes; m *= 2) {
    const double h = 2.0 * kPi / m;
    std::vector<double> slab(static_cast<std::size_t>(m) * m);
    parallel_for(
        slab.size(),
        [&](std::size_t ij) {
          std::vector<double> vals;
          vals.reserve(static_cast<std::size_t>(m) * m);
          Vec x(4);
          x[0] = h * static_cast<double>(ij / m);
          x[1] = h * static_cast<double>(ij % m);
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) {
              x[2] = h * k;
              x[3] = h * l;
              vals.push_back(evaluate(fam, x, t, 2).tgv[0]);
            }
          slab[ij] = pairwise_sum(vals);
        },
        workers);
    const double value = pairwise_sum(slab) * std::pow(h, 4);
    rep.trace.emplace_back(static_cast<std::size_t>(m), value);
    rep.samples += static_cast<std::size_t>(m) * m * m * m;
    rep.value = value;
    if (rep.trace.size() >= 2) {
      rep.error = std::abs(value - previous);
      if (rep.error < tol * std::max(1.0, std::abs(value))) return rep;
    }
    previous = value;
  }
  throw QuadratureError("tgv_integral: trapezoid rule did not settle", rep.value, previous);
}

}  // namespace lklab::godbillon
