#include "lklab/fields.hpp"

#include <sstream>

namespace lklab {

namespace {

std::string describe(const Point& p) {
  std::ostringstream os;
  os << "chart " << p.chart << " (";
  for (int i = 0; i < p.x.size(); ++i) os << (i ? ", " : "") << p.x[i];
  os << ")";
  return os.str();
}

}  // namespace

std::vector<Vec> frame_vectors(const Mat& E) {
  std::vector<Vec> v;
  v.reserve(E.cols());
  for (int j = 0; j < E.cols(); ++j) v.emplace_back(E.col(j));
  return v;
}

VectorField hopf_pair_field(double a, double b) {
  VectorField X;
  X.name = "hopf_pair(" + std::to_string(a) + "," + std::to_string(b) + ")";
  X.ambient = 8;
  X.eval = [a, b](const Point& p, double) {
    const Vec& x = p.x;
    Vec v(8);
    v << -a * x[1], a * x[0], -a * x[3], a * x[2], -b * x[5], b * x[4], -b * x[7], b * x[6];
    return v;
  };
  return X;
}

Point hopf_pair_flow(double a, double b, const Point& p, double t) {
  Point q = p;
  const cplx ea = std::polar(1.0, a * t), eb = std::polar(1.0, b * t);
  for (int k = 0; k < 2; ++k) set_cz(q.x, k, ea * cz(p.x, k));
  for (int k = 2; k < 4; ++k) set_cz(q.x, k, eb * cz(p.x, k));
  return q;
}

VectorField hopf_field() {
  VectorField X;
  X.name = "hopf";
  X.ambient = 4;
  X.eval = [](const Point& p, double) {
    const Vec& x = p.x;
    Vec v(4);
    v << -x[1], x[0], -x[3], x[2];
    return v;
  };
  return X;
}

VectorField hamiltonian_field(const Manifold& M, const ScalarFunction& H, const FormField& omega) {
  FormField dH = differential(H, M.dim(), M.ambient_dim());
  VectorField X;
  X.name = "X_" + H.name;
  X.ambient = M.ambient_dim();
  auto om = omega.eval;
  auto dh = dH.eval;
  X.eval = [M, om, dh](const Point& p, double) {
    Mat E = M.tangent_basis(p);
    const int m = static_cast<int>(E.cols());
    Alt w = om(p);
    Alt g = dh(p);
    Mat Om(m, m);
    Vec rhs(m);
    for (int i = 0; i < m; ++i) {
      Alt wi = interior(Vec(E.col(i)), w);
      for (int j = 0; j < m; ++j) Om(i, j) = eval_on(wi, std::vector<Vec>{Vec(E.col(j))});
    }
    for (int j = 0; j < m; ++j) rhs[j] = eval_on(g, std::vector<Vec>{Vec(E.col(j))});
    Eigen::JacobiSVD<Mat> svd(Om.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    if (s[m - 1] <= 0.0 || s[0] / s[m - 1] > 1e12)
      throw DomainError("hamiltonian_field: symplectic form is singular at " + describe(p));
    Vec c = svd.solve(rhs);
    return Vec(E * c);
  };
  return X;
}

double contact_volume(const Manifold& M, const FormField& alpha, const Point& p) {
  FormField da = exterior_d(alpha);
  Alt a = alpha(p);
  Alt w = da(p);
  Alt top = a;
  const int n = (M.dim() - 1) / 2;
  for (int i = 0; i < n; ++i) top = wedge(top, w);
  return eval_on(top, frame_vectors(M.tangent_basis(p)));
}

VectorField reeb_field(const Manifold& M, const FormField& alpha) {
  if (M.dim() % 2 == 0) throw DomainError("reeb_field: contact manifolds are odd-dimensional");
  FormField da = exterior_d(alpha);
  VectorField X;
  X.name = "reeb(" + alpha.name + ")";
  X.ambient = M.ambient_dim();
  auto ea = alpha.eval;
  auto ed = da.eval;
  X.eval = [M, ea, ed, alpha](const Point& p, double) {
    if (std::abs(contact_volume(M, alpha, p)) < 1e-12)
      throw DomainError("reeb_field: contact condition fails at " + describe(p));
    Mat E = M.tangent_basis(p);
    const int m = static_cast<int>(E.cols());
    Alt a = ea(p);
    Alt w = ed(p);
    Mat A(m + 1, m);
    Vec rhs = Vec::Zero(m + 1);
    rhs[0] = 1.0;
    for (int i = 0; i < m; ++i) {
      Vec ei = E.col(i);
      A(0, i) = eval_on(a, std::vector<Vec>{ei});
      Alt wi = interior(ei, w);
      for (int j = 0; j < m; ++j) A(1 + j, i) = eval_on(wi, std::vector<Vec>{Vec(E.col(j))});
    }
    Vec c = A.colPivHouseholderQr().solve(rhs);
    return Vec(E * c);
  };
  return X;
}

double divergence_residual(const Manifold& M, const VectorField& X, const FormField& mu,
                           const std::vector<Point>& probes, double h) {
  FormField eta = interior_product(X, mu);
  FormField deta = numeric_d_richardson(eta, h);
  double worst = 0.0;
  for (const auto& p : probes) {
    double v = eval_on(deta(p), frame_vectors(M.tangent_basis(p)));
    worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace lklab
