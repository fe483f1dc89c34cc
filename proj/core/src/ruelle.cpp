#include "lklab/ruelle.hpp"

#include <cmath>
#include <sstream>

#include "lklab/fields.hpp"
#include "lklab/parallel.hpp"
#include "lklab/quadrature.hpp"

namespace lklab {

namespace {

std::string describe(const Point& p) {
  std::ostringstream os;
  os << "chart " << p.chart << " (";
  for (int i = 0; i < p.x.size(); ++i) os << (i ? ", " : "") << p.x[i];
  os << ")";
  return os.str();
}

// Components of the ambient form A on the frame columns, as a form on R^m.
Alt pullback(const Alt& A, const Mat& E) {
  const int m = static_cast<int>(E.cols());
  Alt r(m, A.degree());
  for (unsigned mask : alt::masks(m, A.degree())) {
    std::vector<Vec> cols;
    for (int j = 0; j < m; ++j)
      if (mask & (1u << j)) cols.emplace_back(E.col(j));
    r.at(mask) = eval_on(A, cols);
  }
  return r;
}

}  // namespace

nlohmann::json IntegralReport::to_json() const {
  nlohmann::json j;
  j["value"] = value;
  j[method == "monte-carlo" ? "stderr" : "tolerance"] = error;
  j["method"] = method;
  j["samples"] = samples;
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& [nodes, v] : trace) tr.push_back({{"nodes", nodes}, {"value", v}});
  j["refinement"] = tr;
  return j;
}

Mat cycle_jacobian(const ParametricCycle& N, const Vec& u, double h) {
  if (N.jacobian) return N.jacobian(u);
  const Point p = N.embed(u);
  Mat J(p.x.size(), N.k);
  for (int j = 0; j < N.k; ++j) {
    Vec up = u, um = u;
    up[j] += h;
    um[j] -= h;
    Point a = N.embed(up), b = N.embed(um);
    if (a.chart != p.chart || b.chart != p.chart)
      throw DomainError("cycle_jacobian: chart switch inside the difference stencil of " + N.name);
    J.col(j) = (a.x - b.x) / (2.0 * h);
  }
  return J;
}

IntegralReport integrate_over_cycle(const FormField& a, const ParametricCycle& N, const QuadratureOptions& opt) {
  if (a.degree != N.k)
    throw DomainError("integrate_over_cycle: form degree " + std::to_string(a.degree) + " does not match cycle dimension " +
                      std::to_string(N.k));
  const int k = N.k;
  std::vector<int> base = N.base_nodes;
  if (base.empty()) base.assign(k, 8);
  double box = 1.0;
  for (int d = 0; d < k; ++d) box *= 0.5 * (N.upper[d] - N.lower[d]);

  IntegralReport rep;
  rep.method = "gauss-legendre";
  double previous = 0.0;
  for (int level = 0; level < opt.max_levels; ++level) {
    std::vector<const GaussRule*> rules(k);
    std::size_t inner = 1;
    for (int d = 0; d < k; ++d) {
      rules[d] = &gauss_legendre(base[d] << level);
      if (d > 0) inner *= rules[d]->x.size();
    }
    const std::size_t outer = rules[0]->x.size();
    std::vector<double> partial(outer);
    parallel_for(
        outer,
        [&](std::size_t i0) {
          std::vector<double> terms(inner);
          Vec u(k);
          for (std::size_t flat = 0; flat < inner; ++flat) {
            std::size_t rem = flat;
            double w = rules[0]->w[i0];
            u[0] = N.lower[0] + 0.5 * (N.upper[0] - N.lower[0]) * (rules[0]->x[i0] + 1.0);
            for (int d = k - 1; d >= 1; --d) {
              const std::size_t nd = rules[d]->x.size();
              const std::size_t id = rem % nd;
              rem /= nd;
              u[d] = N.lower[d] + 0.5 * (N.upper[d] - N.lower[d]) * (rules[d]->x[id] + 1.0);
              w *= rules[d]->w[id];
            }
            const Point p = N.embed(u);
            const Mat J = cycle_jacobian(N, u);
            if (k > 0 && opt.immersion_tol > 0.0) {
              Eigen::JacobiSVD<Mat> svd(J);
              if (!(svd.singularValues()[k - 1] > opt.immersion_tol))
                throw DomainError("integrate_over_cycle: " + N.name + " is not immersed at " + describe(p));
            }
            std::vector<Vec> cols;
            for (int j = 0; j < k; ++j) cols.emplace_back(J.col(j));
            terms[flat] = w * eval_on(a(p), cols);
          }
          partial[i0] = pairwise_sum(terms);
        },
        opt.workers);
    const double value = N.orientation * box * pairwise_sum(partial);
    rep.trace.emplace_back(outer * inner, value);
    rep.samples = outer * inner;
    if (level > 0) {
      const double change = std::abs(value - previous);
      if (change <= opt.rtol * std::abs(value) || change <= opt.atol) {
        rep.value = value;
        rep.error = change;
        return rep;
      }
    }
    previous = value;
  }
  const auto& tr = rep.trace;
  const double last = tr.back().second;
  const double prev = tr.size() > 1 ? tr[tr.size() - 2].second : last;
  std::ostringstream os;
  os.precision(17);
  os << "quadrature over " << N.name << " did not converge after " << opt.max_levels << " levels: last " << last
     << ", previous " << prev;
  throw QuadratureError(os.str(), last, prev);
}

IntegralReport hopf_integral_submanifold(const FormField& alpha, const ParametricCycle& N,
                                         const QuadratureOptions& opt) {
  return integrate_over_cycle(alpha, N, opt);
}

namespace {

// Minimum-norm tangent vectors n1, n2 with df(n1) = 1 and df(n2) = i.
std::pair<Vec, Vec> chain_normals(const Manifold& M, const PhaseChain& chain, const Point& p) {
  const Mat E = M.tangent_basis(p);
  const int m = static_cast<int>(E.cols());
  const double h = 1e-6;
  Mat D(2, m);
  for (int j = 0; j < m; ++j) {
    Point a = p, b = p;
    a.x += h * E.col(j);
    b.x -= h * E.col(j);
    M.normalize(a);
    M.normalize(b);
    const cplx df = (chain.f(a) - chain.f(b)) / (2.0 * h);
    D(0, j) = df.real();
    D(1, j) = df.imag();
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(D);
  Vec e1 = Vec::Zero(2), e2 = Vec::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  return {Vec(E * cod.solve(e1)), Vec(E * cod.solve(e2))};
}

int sign_of(double s, const char* what, const Point& p) {
  if (!(std::abs(s) > 1e-10)) throw DomainError(std::string(what) + ": cycle is not transverse to the chain at " + describe(p));
  return s > 0.0 ? 1 : -1;
}

}  // namespace

int boundary_orientation(const Manifold& M, const PhaseChain& chain, const ParametricCycle& N, const Vec& u) {
  const Point p = N.embed(u);
  auto [n1, n2] = chain_normals(M, chain, p);
  std::vector<Vec> vs{n1, n2};
  const Mat J = cycle_jacobian(N, u);
  for (int j = 0; j < N.k; ++j) vs.emplace_back(J.col(j));
  return sign_of(M.volume_form().on(p, vs), "boundary_orientation", p);
}

int chain_orientation(const Manifold& M, const PhaseChain& chain, const ParametricCycle& S, const Vec& u) {
  const Point p = S.embed(u);
  auto normals = chain_normals(M, chain, p);
  std::vector<Vec> vs{normals.second};
  const Mat J = cycle_jacobian(S, u);
  for (int j = 0; j < S.k; ++j) vs.emplace_back(J.col(j));
  return sign_of(M.volume_form().on(p, vs), "chain_orientation", p);
}

MeasuredFoliation MeasuredFoliation::smooth_form(FormField nu, std::string name) {
  MeasuredFoliation F;
  F.kind = Kind::SmoothForm;
  F.nu = std::move(nu);
  F.name = std::move(name);
  return F;
}

MeasuredFoliation MeasuredFoliation::exact_form(FormField nu, std::string name) {
  MeasuredFoliation F = smooth_form(std::move(nu), std::move(name));
  F.kind = Kind::ExactForm;
  return F;
}

MeasuredFoliation MeasuredFoliation::signed_leaves(std::vector<SignedLeaf> leaves, std::string name) {
  MeasuredFoliation F;
  F.kind = Kind::SignedLeafSum;
  F.leaves = std::move(leaves);
  F.name = std::move(name);
  return F;
}

std::vector<Point> random_probes(const Manifold& M, std::size_t n, std::uint64_t seed) {
  std::vector<Point> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = stream_rng(seed, i);
    out.push_back(M.sample_uniform(rng));
  }
  return out;
}

IntegralReport integrate_top_form(const Manifold& M, const FormField& top, std::size_t samples, std::uint64_t seed,
                                  int workers) {
  if (top.degree != M.dim()) throw DomainError("integrate_top_form: " + top.name + " is not of top degree");
  if (samples < 2) throw DomainError("integrate_top_form: need at least two samples");
  const FormField mu = M.volume_form();
  std::vector<double> v(samples);
  parallel_for(
      samples,
      [&](std::size_t i) {
        auto rng = stream_rng(seed, i);
        const Point p = M.sample_uniform(rng);
        const auto E = frame_vectors(M.tangent_basis(p));
        v[i] = top.on(p, E) / mu.on(p, E);
      },
      workers);
  const double mean = pairwise_sum(v) / samples;
  std::vector<double> sq(samples);
  for (std::size_t i = 0; i < samples; ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  const double var = pairwise_sum(sq) / (samples - 1);
  IntegralReport rep;
  rep.method = "monte-carlo";
  rep.samples = samples;
  rep.value = M.total_volume() * mean;
  rep.error = M.total_volume() * std::sqrt(var / samples);
  return rep;
}

double closedness_residual(const Manifold& M, const FormField& a, const std::vector<Point>& probes) {
  if (a.degree >= M.dim()) return 0.0;
  const FormField da = numeric_d_richardson(a);
  double worst = 0.0;
  for (const auto& p : probes) worst = std::max(worst, max_abs(pullback(da(p), M.tangent_basis(p))));
  return worst;
}

double form_difference(const Manifold& M, const FormField& a, const FormField& b, const std::vector<Point>& probes) {
  if (a.degree != b.degree) throw DomainError("form_difference: degrees differ");
  double worst = 0.0;
  for (const auto& p : probes) worst = std::max(worst, max_abs(pullback(a(p) - b(p), M.tangent_basis(p))));
  return worst;
}

double primitive_residual(const Manifold& M, const VectorField& X, const FormField& alpha,
                          const std::vector<Point>& probes) {
  if (alpha.degree != M.dim() - 2) throw DomainError("primitive_residual: primitive must have degree n-2");
  return form_difference(M, exterior_d(alpha), interior_product(X, M.volume_form()), probes);
}

IntegralReport ruelle_sullivan_eval(const Manifold& M, const MeasuredFoliation& F, const FormField& omega,
                                    const RuelleOptions& opt) {
  if (omega.degree != M.dim() - 2) throw DomainError("ruelle_sullivan_eval: omega must have degree n-2");
  if (F.kind == MeasuredFoliation::Kind::SignedLeafSum) {
    IntegralReport rep;
    rep.method = "leaf-quadrature";
    for (const auto& leaf : F.leaves) {
      if (leaf.tail_estimate > opt.max_tail) {
        std::ostringstream os;
        os << "leaf " << leaf.leaf.name << " truncated with tail estimate " << leaf.tail_estimate << " above "
           << opt.max_tail;
        throw QuadratureError(os.str(), leaf.tail_estimate, opt.max_tail);
      }
      QuadratureOptions q = opt.quad;
      if (q.workers == 0) q.workers = opt.workers;
      IntegralReport r = integrate_over_cycle(omega, leaf.leaf, q);
      rep.value += leaf.weight * r.value;
      rep.error += std::abs(leaf.weight) * (r.error + leaf.tail_estimate);
      rep.samples += r.samples;
      for (const auto& t : r.trace) rep.trace.push_back(t);
    }
    return rep;
  }
  if (F.nu.degree != 2) throw DomainError("ruelle_sullivan_eval: transverse measure must be a 2-form");
  const double res = closedness_residual(M, F.nu, random_probes(M, opt.probes, opt.seed ^ 0x9e3779b97f4a7c15ULL));
  if (res > opt.closed_tol) {
    std::ostringstream os;
    os << "ruelle_sullivan_eval: transverse measure " << F.nu.name << " is not closed (residual " << res << ")";
    throw DomainError(os.str());
  }
  return integrate_top_form(M, wedge(omega, F.nu), opt.mc_samples, opt.seed, opt.workers);
}

IntegralReport hopf_integral_foliation(const Manifold& M, const VectorField& X, const MeasuredFoliation& F,
                                       const FormField& alpha, const RuelleOptions& opt) {
  const double res = primitive_residual(M, X, alpha, random_probes(M, opt.probes, opt.seed + 1));
  if (!(res <= opt.primitive_tol)) {
    std::ostringstream os;
    os << "hopf_integral_foliation: " << alpha.name << " is not a primitive of i_X mu (residual " << res << ")";
    throw DomainError(os.str());
  }
  return ruelle_sullivan_eval(M, F, alpha, opt);
}

}  // namespace lklab
