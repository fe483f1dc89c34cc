#include "lklab/models.hpp"

#include <cmath>

#include "lklab/expr.hpp"
#include "lklab/jet.hpp"

namespace lklab::models {

namespace {

Vec to_real(const Eigen::Matrix<cplx, Eigen::Dynamic, 1>& z) {
  Vec x(2 * z.size());
  for (int k = 0; k < z.size(); ++k) set_cz(x, k, z[k]);
  return x;
}

Vec param(std::initializer_list<double> v) {
  Vec x(static_cast<int>(v.size()));
  int i = 0;
  for (double d : v) x[i++] = d;
  return x;
}

Alt block_top(int ambient, int offset, int m) {
  Alt t(ambient, m);
  t.at(((1u << m) - 1u) << offset) = 1.0;
  return t;
}

// i_r of the top form of a block with r the block's position vector.
FormField block_volume(int block, int m, int ambient, const std::string& name) {
  const int o = m * block;
  const Alt top = block_top(ambient, o, m);
  FormField f;
  f.degree = m - 1;
  f.dim = ambient - (ambient / m);
  f.ambient = ambient;
  f.name = name;
  f.eval = [top, o, m, ambient](const Point& p) {
    Vec r = Vec::Zero(ambient);
    r.segment(o, m) = p.x.segment(o, m);
    return interior(r, top);
  };
  f.d_eval = [top, m](const Point&) { return top * static_cast<double>(m); };
  return f;
}

int best_chart(const Eigen::Vector3cd& Z) {
  int j = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(Z[i]) > std::abs(Z[j])) j = i;
  return j;
}

// Chart Jacobian of u -> [Z(u)] in the chart where |Z_j| is largest.
Mat cp2_chart_jacobian(const Eigen::Vector3cd& Z, const std::vector<Eigen::Vector3cd>& dZ) {
  const int j = best_chart(Z);
  Mat J(4, static_cast<int>(dZ.size()));
  for (std::size_t c = 0; c < dZ.size(); ++c) {
    Eigen::Vector2cd col;
    int k = 0;
    for (int i = 0; i < 3; ++i)
      if (i != j) col[k++] = (dZ[c][i] * Z[j] - Z[i] * dZ[c][j]) / (Z[j] * Z[j]);
    J.col(static_cast<int>(c)) = to_real(col);
  }
  return J;
}

// Affine lift with Z_chart = 1.
Eigen::Vector3cd affine_lift(const Point& p) {
  Eigen::Vector3cd Z;
  int k = 0;
  for (int j = 0; j < 3; ++j) Z[j] = (j == p.chart) ? cplx(1.0, 0.0) : cz(p.x, k++);
  return Z;
}

}  // namespace

// ---------------------------------------------------------------- S3 x S3

FormField s3_lambda(int block, int ambient) {
  const int o = 4 * block;
  FormField f;
  f.degree = 1;
  f.dim = ambient == 4 ? 3 : 6;
  f.ambient = ambient;
  f.name = "lambda" + std::to_string(block + 1);
  f.eval = [o, ambient](const Point& p) {
    Alt a(ambient, 1);
    a.at(1u << o) = -p.x[o + 1];
    a.at(1u << (o + 1)) = p.x[o];
    a.at(1u << (o + 2)) = -p.x[o + 3];
    a.at(1u << (o + 3)) = p.x[o + 2];
    return a;
  };
  Alt d(ambient, 2);
  d.at((1u << o) | (1u << (o + 1))) = 2.0;
  d.at((1u << (o + 2)) | (1u << (o + 3))) = 2.0;
  f.d_eval = [d](const Point&) { return d; };
  return f;
}

FormField s3_block_volume(int block, int ambient) {
  FormField f = block_volume(block, 4, ambient, "mu" + std::to_string(block + 1));
  f.dim = ambient == 4 ? 3 : 6;
  return f;
}

PhaseChain s3xs3_chain() {
  PhaseChain c;
  c.name = "<z,w>";
  c.f = [](const Point& p) {
    return cz(p.x, 0) * std::conj(cz(p.x, 2)) + cz(p.x, 1) * std::conj(cz(p.x, 3));
  };
  return c;
}

FormField s3xs3_primitive(double a, double b) {
  FormField alpha = (0.5 * a) * wedge(s3_lambda(0), s3_block_volume(1)) +
                    (0.5 * b) * wedge(s3_block_volume(0), s3_lambda(1));
  alpha.name = "hopf_pair_primitive";
  return alpha;
}

ParametricCycle s3xs3_cycle() {
  ParametricCycle N;
  N.name = "z_perp_w";
  N.k = 4;
  N.lower = param({0.0, 0.0, 0.0, 0.0});
  N.upper = param({kPi / 2, 2 * kPi, 2 * kPi, 2 * kPi});
  auto zw = [](const Vec& u) {
    const cplx I(0.0, 1.0);
    Eigen::Matrix<cplx, 4, 1> v;
    v[0] = std::cos(u[0]) * std::exp(I * u[1]);
    v[1] = std::sin(u[0]) * std::exp(I * u[2]);
    const cplx e = std::exp(I * u[3]);
    v[2] = e * std::conj(v[1]);
    v[3] = -e * std::conj(v[0]);
    return v;
  };
  N.embed = [zw](const Vec& u) {
    Point p;
    p.x = to_real(zw(u));
    return p;
  };
  N.jacobian = [zw](const Vec& u) {
    const cplx I(0.0, 1.0);
    const auto v = zw(u);
    const cplx e = std::exp(I * u[3]);
    Mat J(8, 4);
    // z-derivatives for eta, xi1, xi2; w follows as e (conj dz1, -conj dz0).
    Eigen::Matrix<cplx, 2, 3> dz;
    dz(0, 0) = -std::sin(u[0]) * std::exp(I * u[1]);
    dz(1, 0) = std::cos(u[0]) * std::exp(I * u[2]);
    dz(0, 1) = I * v[0];
    dz(1, 1) = 0.0;
    dz(0, 2) = 0.0;
    dz(1, 2) = I * v[1];
    for (int c = 0; c < 3; ++c) {
      Eigen::Matrix<cplx, 4, 1> col;
      col << dz(0, c), dz(1, c), e * std::conj(dz(1, c)), -e * std::conj(dz(0, c));
      J.col(c) = to_real(col);
    }
    Eigen::Matrix<cplx, 4, 1> col;
    col << 0.0, 0.0, I * v[2], I * v[3];
    J.col(3) = to_real(col);
    return J;
  };
  N.base_nodes = {8, 8, 8, 8};
  N.orientation = boundary_orientation(Manifold::sphere3xsphere3(), s3xs3_chain(), N, param({0.7, 0.3, 1.1, 2.0}));
  return N;
}

double s3xs3_target(double a, double b) { return 2.0 * (a - b) * kPi * kPi * kPi; }

// ---------------------------------------------------------------- contact S3

FormField s3_contact_form() {
  FormField f = s3_lambda(0, 4);
  f.name = "lambda";
  return f;
}

FormField s3_contact_volume() {
  FormField lam = s3_contact_form();
  FormField dlam = constant_form(3, lam.d_eval(Point{0, Vec::Zero(4)}), "dlambda");
  FormField v = wedge(lam, dlam);
  v.name = "lambda^dlambda";
  return v;
}

PhaseChain s3_fiber_chain() {
  PhaseChain c;
  c.name = "z1";
  c.f = [](const Point& p) { return cz(p.x, 1); };
  return c;
}

ParametricCycle s3_fiber_cycle() {
  ParametricCycle N;
  N.name = "hopf_fiber";
  N.k = 1;
  N.lower = param({0.0});
  N.upper = param({2 * kPi});
  N.embed = [](const Vec& u) {
    Point p;
    p.x = Vec::Zero(4);
    p.x[0] = std::cos(u[0]);
    p.x[1] = std::sin(u[0]);
    return p;
  };
  N.jacobian = [](const Vec& u) {
    Mat J = Mat::Zero(4, 1);
    J(0, 0) = -std::sin(u[0]);
    J(1, 0) = std::cos(u[0]);
    return J;
  };
  N.base_nodes = {16};
  N.orientation = boundary_orientation(Manifold::sphere3(), s3_fiber_chain(), N, param({0.4}));
  return N;
}

// ---------------------------------------------------------------- CP2

Eigen::Matrix3cd cp2_default_hamiltonian() {
  const cplx I(0.0, 1.0);
  Eigen::Matrix3cd A;
  A << 0.3, 0.5 - 0.2 * I, 0.1 * I,
       0.5 + 0.2 * I, -0.4, 0.25 + 0.15 * I,
       -0.1 * I, 0.25 - 0.15 * I, 1.7;
  return A;
}

VectorField cp2_field(const Eigen::Matrix3cd& A) {
  VectorField X;
  X.name = "cp2_unitary";
  X.ambient = 4;
  X.eval = [A](const Point& p, double) {
    const cplx I(0.0, 1.0);
    const Eigen::Vector3cd Z = affine_lift(p);
    const Eigen::Vector3cd dZ = I * (A * Z);
    Eigen::Vector2cd w;
    int k = 0;
    for (int j = 0; j < 3; ++j)
      if (j != p.chart) {
        w[k] = dZ[j] - Z[j] * dZ[p.chart];
        ++k;
      }
    return to_real(w);
  };
  return X;
}

Point cp2_flow(const Eigen::Matrix3cd& A, const Point& p, double t) {
  static const Manifold M = Manifold::cp2();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(A);
  const cplx I(0.0, 1.0);
  Eigen::Vector3cd phase;
  for (int j = 0; j < 3; ++j) phase[j] = std::exp(I * es.eigenvalues()[j] * t);
  const Eigen::Matrix3cd U = es.eigenvectors();
  Eigen::Vector3cd Z = U * phase.asDiagonal() * U.adjoint() * M.homogeneous(p);
  return M.from_homogeneous(Z);
}

FormField cp2_kahler_form() {
  FormField f;
  f.degree = 2;
  f.dim = 4;
  f.ambient = 4;
  f.name = "omega_FS";
  f.eval = [](const Point& p) {
    const Eigen::Vector2cd z(cz(p.x, 0), cz(p.x, 1));
    const double s = 1.0 + z.squaredNorm();
    Alt w(4, 2);
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        const int ka = a / 2, kb = b / 2;
        const cplx ca = (a % 2) ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
        const cplx cb = (b % 2) ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
        const cplx h = ((ka == kb ? s : 0.0) - z[ka] * std::conj(z[kb])) / (s * s);
        w.at((1u << a) | (1u << b)) = (std::conj(ca) * h * cb).imag();
      }
    return w;
  };
  f.d_eval = [](const Point&) { return Alt(4, 3); };
  return f;
}

ScalarFunction cp2_moment_map(const Eigen::Matrix3cd& A) {
  ScalarFunction H;
  H.name = "moment";
  H.f = [A](const Point& p) {
    const Eigen::Vector3cd Z = affine_lift(p);
    return -0.5 * Z.dot(A * Z).real() / Z.squaredNorm();
  };
  H.grad = [A](const Point& p) {
    const Eigen::Vector3cd Z = affine_lift(p);
    const double n2 = Z.squaredNorm();
    const double q = Z.dot(A * Z).real();
    const Eigen::Vector3cd AZ = A * Z;
    Vec g(4);
    int k = 0;
    for (int j = 0; j < 3; ++j) {
      if (j == p.chart) continue;
      for (int part = 0; part < 2; ++part) {
        const cplx d = part ? cplx(0.0, 1.0) : cplx(1.0, 0.0);
        // Z^H A dZ + dZ^H A Z = 2 Re(conj(AZ_j) d), and d|Z|^2 = 2 Re(conj(Z_j) d).
        const double dq = 2.0 * (std::conj(AZ[j]) * d).real();
        const double dn = 2.0 * (std::conj(Z[j]) * d).real();
        g[2 * k + part] = -0.5 * (dq / n2 - q * dn / (n2 * n2));
      }
      ++k;
    }
    return g;
  };
  return H;
}

FormField cp2_primitive(const Eigen::Matrix3cd& A) {
  FormField a = multiply(cp2_moment_map(A), cp2_kahler_form());
  a.name = "H*omega";
  return a;
}

PhaseChain cp2_chain() {
  PhaseChain c;
  c.name = "(Z0-Z1)conj(Z0+Z1)";
  c.f = [](const Point& p) {
    const Eigen::Vector3cd Z = affine_lift(p);
    return (Z[0] - Z[1]) * std::conj(Z[0] + Z[1]) / Z.squaredNorm();
  };
  return c;
}

ParametricCycle cp2_leaf(cplx c) {
  static const Manifold M = Manifold::cp2();
  const double kappa = std::sqrt(1.0 + std::norm(c));
  auto Z = [c, kappa](const Vec& u) {
    return Eigen::Vector3cd(std::cos(u[0]), c * std::cos(u[0]), kappa * std::sin(u[0]) * std::polar(1.0, u[1]));
  };
  ParametricCycle L;
  L.name = "leaf(" + std::to_string(c.real()) + "," + std::to_string(c.imag()) + ")";
  L.k = 2;
  L.lower = param({0.0, 0.0});
  L.upper = param({kPi / 2, 2 * kPi});
  L.embed = [Z](const Vec& u) { return M.from_homogeneous(Z(u)); };
  L.jacobian = [Z, c, kappa](const Vec& u) {
    const cplx e = std::polar(1.0, u[1]);
    std::vector<Eigen::Vector3cd> dZ{
        Eigen::Vector3cd(-std::sin(u[0]), -c * std::sin(u[0]), kappa * std::cos(u[0]) * e),
        Eigen::Vector3cd(0.0, 0.0, cplx(0.0, 1.0) * kappa * std::sin(u[0]) * e)};
    return cp2_chart_jacobian(Z(u), dZ);
  };
  L.base_nodes = {16, 8};
  return L;
}

ParametricCycle cp2_seifert_chain() {
  static const Manifold M = Manifold::cp2();
  auto Z = [](const Vec& u) {
    const double kappa = std::sqrt(1.0 + u[0] * u[0]);
    return Eigen::Vector3cd(std::cos(u[1]), u[0] * std::cos(u[1]), kappa * std::sin(u[1]) * std::polar(1.0, u[2]));
  };
  ParametricCycle S;
  S.name = "seifert_chain";
  S.k = 3;
  S.lower = param({-1.0, 0.0, 0.0});
  S.upper = param({1.0, kPi / 2, 2 * kPi});
  S.embed = [Z](const Vec& u) { return M.from_homogeneous(Z(u)); };
  S.jacobian = [Z](const Vec& u) {
    const double kappa = std::sqrt(1.0 + u[0] * u[0]);
    const cplx e = std::polar(1.0, u[2]);
    const double sp = std::sin(u[1]), cp = std::cos(u[1]);
    std::vector<Eigen::Vector3cd> dZ{Eigen::Vector3cd(0.0, cp, (u[0] / kappa) * sp * e),
                                     Eigen::Vector3cd(-sp, -u[0] * sp, kappa * cp * e),
                                     Eigen::Vector3cd(0.0, 0.0, cplx(0.0, 1.0) * kappa * sp * e)};
    return cp2_chart_jacobian(Z(u), dZ);
  };
  S.base_nodes = {8, 16, 8};
  S.orientation = chain_orientation(M, cp2_chain(), S, param({0.3, 0.6, 1.0}));
  return S;
}

MeasuredFoliation cp2_leaves() {
  static const Manifold M = Manifold::cp2();
  std::vector<SignedLeaf> leaves;
  for (double c : {1.0, -1.0}) {
    SignedLeaf s;
    s.leaf = cp2_leaf(c);
    s.weight = boundary_orientation(M, cp2_chain(), s.leaf, param({0.6, 1.0}));
    s.tail_estimate = 0.0;  // the parameterization covers the leaf closure
    leaves.push_back(std::move(s));
  }
  return MeasuredFoliation::signed_leaves(std::move(leaves), "L1-L-1");
}

// ---------------------------------------------------------------- S2 x S2

FormField s2xs2_symplectic_form() {
  FormField f = block_volume(0, 3, 6, "omega1") + block_volume(1, 3, 6, "omega2");
  f.dim = 4;
  f.name = "omega";
  return f;
}

ScalarFunction s2xs2_hamiltonian(double c1, double c2, double c3) {
  ScalarFunction H;
  H.name = "height";
  H.f = [=](const Point& p) { return c1 * p.x[2] + c2 * p.x[5] + c3 * p.x[0] * p.x[3]; };
  H.grad = [=](const Point& p) {
    Vec g = Vec::Zero(6);
    g[0] = c3 * p.x[3];
    g[3] = c3 * p.x[0];
    g[2] = c1;
    g[5] = c2;
    return g;
  };
  return H;
}

ParametricCycle s2xs2_null_torus() {
  ParametricCycle T;
  T.name = "null_torus";
  T.k = 2;
  T.lower = param({0.0, 0.0});
  T.upper = param({2 * kPi, 2 * kPi});
  T.embed = [](const Vec& u) {
    const double th = 0.6 * std::sin(u[0]);
    Point p;
    p.x = Vec(6);
    p.x << std::cos(u[0]), std::sin(u[0]), 0.0, std::cos(th) * std::cos(u[1]), std::cos(th) * std::sin(u[1]),
        std::sin(th);
    return p;
  };
  T.jacobian = [](const Vec& u) {
    const double th = 0.6 * std::sin(u[0]), dth = 0.6 * std::cos(u[0]);
    Mat J(6, 2);
    J.col(0) << -std::sin(u[0]), std::cos(u[0]), 0.0, -std::sin(th) * dth * std::cos(u[1]),
        -std::sin(th) * dth * std::sin(u[1]), std::cos(th) * dth;
    J.col(1) << 0.0, 0.0, 0.0, -std::cos(th) * std::sin(u[1]), std::cos(th) * std::cos(u[1]), 0.0;
    return J;
  };
  T.base_nodes = {16, 16};
  return T;
}

FormField expression_one_form(std::string name, const std::vector<std::string>& coordinates,
                              const std::vector<std::string>& coeffs) {
  const int n = static_cast<int>(coordinates.size());
  if (static_cast<int>(coeffs.size()) != n) throw ConfigError("expression_one_form: one coefficient per coordinate");
  std::vector<Expr> c;
  for (const auto& s : coeffs) c.push_back(Expr::parse(s, coordinates));
  FormField a;
  a.degree = 1;
  a.dim = n;
  a.ambient = n;
  a.name = std::move(name);
  a.eval = [c, n](const Point& p) {
    std::vector<double> x(p.x.data(), p.x.data() + n);
    Alt r(n, 1);
    for (int i = 0; i < n; ++i) r[i] = c[i].eval(x);
    return r;
  };
  a.d_eval = [c, n](const Point& p) {
    auto sp = JetSpace::get(n, 1);
    std::vector<Jet> x;
    for (int i = 0; i < n; ++i) x.push_back(Jet::variable(sp, i, p.x[i]));
    Alt r(n, 2);
    for (int i = 0; i < n; ++i) {
      Jet ci = c[i].eval(x);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        // d(c_i dx_i) = sum_j d_j c_i dx_j ^ dx_i
        double v = ci.partial(j).value();
        unsigned m = (1u << i) | (1u << j);
        r.at(m) += (j < i ? v : -v);
      }
    }
    return r;
  };
  return a;
}

FormField r5_contact_form() {
  return expression_one_form("contact-R5", {"x1", "y1", "x2", "y2", "z"},
                             {"0", "x1", "0.2*sin(y1)", "x2", "1"});
}

}  // namespace lklab::models
