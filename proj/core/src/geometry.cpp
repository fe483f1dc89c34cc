#include "lklab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lklab {

// ---------------------------------------------------------------- forms

FormField constant_form(int dim, const Alt& value, std::string name) {
  FormField f;
  f.degree = value.degree();
  f.dim = dim;
  f.ambient = value.dim();
  f.name = std::move(name);
  f.eval = [value](const Point&) { return value; };
  Alt zero(value.dim(), std::min(value.degree() + 1, value.dim()));
  if (value.degree() + 1 <= value.dim()) f.d_eval = [zero](const Point&) { return zero; };
  return f;
}

FormField wedge(const FormField& a, const FormField& b) {
  if (a.ambient != b.ambient) throw DomainError("wedge: forms live in different charts");
  if (a.degree + b.degree > a.dim)
    throw DomainError("wedge: degree overflow (" + std::to_string(a.degree) + " + " + std::to_string(b.degree) +
                      " > " + std::to_string(a.dim) + ")");
  FormField r;
  r.degree = a.degree + b.degree;
  r.dim = a.dim;
  r.ambient = a.ambient;
  r.name = "(" + a.name + ")^(" + b.name + ")";
  auto ea = a.eval, eb = b.eval;
  r.eval = [ea, eb](const Point& p) { return wedge(ea(p), eb(p)); };
  if (a.has_d() && b.has_d() && r.degree + 1 <= r.ambient) {
    auto da = a.d_eval, db = b.d_eval;
    const double sign = (a.degree % 2 == 0) ? 1.0 : -1.0;
    r.d_eval = [ea, eb, da, db, sign](const Point& p) {
      return wedge(da(p), eb(p)) + sign * wedge(ea(p), db(p));
    };
  }
  return r;
}

FormField interior_product(const VectorField& X, const FormField& a) {
  if (a.degree == 0) throw DomainError("interior_product: cannot contract a 0-form");
  FormField r;
  r.degree = a.degree - 1;
  r.dim = a.dim;
  r.ambient = a.ambient;
  r.name = "i_" + X.name + "(" + a.name + ")";
  auto ea = a.eval;
  auto ex = X.eval;
  r.eval = [ea, ex](const Point& p) { return interior(ex(p, 0.0), ea(p)); };
  return r;
}

FormField operator+(const FormField& a, const FormField& b) {
  if (a.degree != b.degree || a.ambient != b.ambient) throw DomainError("form sum: shape mismatch");
  FormField r = a;
  r.name = a.name + "+" + b.name;
  auto ea = a.eval, eb = b.eval;
  r.eval = [ea, eb](const Point& p) { return ea(p) + eb(p); };
  r.d_eval = nullptr;
  if (a.has_d() && b.has_d()) {
    auto da = a.d_eval, db = b.d_eval;
    r.d_eval = [da, db](const Point& p) { return da(p) + db(p); };
  }
  return r;
}

FormField operator*(double s, const FormField& a) {
  FormField r = a;
  auto ea = a.eval;
  r.eval = [ea, s](const Point& p) { return ea(p) * s; };
  if (a.has_d()) {
    auto da = a.d_eval;
    r.d_eval = [da, s](const Point& p) { return da(p) * s; };
  }
  return r;
}

namespace {

Alt central_d(const std::function<Alt(const Point&)>& ea, const Point& p, double h) {
  const int n = static_cast<int>(p.x.size());
  std::vector<Alt> partials;
  partials.reserve(n);
  for (int i = 0; i < n; ++i) {
    Point pp = p, pm = p;
    pp.x[i] += h;
    pm.x[i] -= h;
    partials.push_back((ea(pp) - ea(pm)) * (0.5 / h));
  }
  return d_from_partials(partials);
}

}  // namespace

FormField numeric_d(const FormField& a, double h) {
  if (a.degree + 1 > a.ambient) throw DomainError("numeric_d: degree overflow");
  FormField r;
  r.degree = a.degree + 1;
  r.dim = a.dim;
  r.ambient = a.ambient;
  r.name = "d(" + a.name + ")";
  auto ea = a.eval;
  r.eval = [ea, h](const Point& p) { return central_d(ea, p, h); };
  return r;
}

FormField numeric_d_richardson(const FormField& a, double h) {
  if (a.degree + 1 > a.ambient) throw DomainError("numeric_d: degree overflow");
  FormField r;
  r.degree = a.degree + 1;
  r.dim = a.dim;
  r.ambient = a.ambient;
  r.name = "d(" + a.name + ")";
  auto ea = a.eval;
  r.eval = [ea, h](const Point& p) {
    Alt coarse = central_d(ea, p, h);
    Alt fine = central_d(ea, p, h / 10.0);
    return (fine * 100.0 - coarse) * (1.0 / 99.0);
  };
  return r;
}

FormField exterior_d(const FormField& a, double h) {
  if (!a.has_d()) return numeric_d_richardson(a, h);
  FormField r;
  r.degree = a.degree + 1;
  r.dim = a.dim;
  r.ambient = a.ambient;
  r.name = "d(" + a.name + ")";
  r.eval = a.d_eval;
  return r;
}

FormField differential(const ScalarFunction& H, int dim, int ambient, double h) {
  FormField r;
  r.degree = 1;
  r.dim = dim;
  r.ambient = ambient;
  r.name = "d" + H.name;
  auto f = H.f;
  auto g = H.grad;
  r.eval = [f, g, h, ambient](const Point& p) {
    Alt out(ambient, 1);
    if (g) {
      Vec v = g(p);
      for (int i = 0; i < ambient; ++i) out[i] = v[i];
      return out;
    }
    for (int i = 0; i < ambient; ++i) {
      Point pp = p, pm = p, pp2 = p, pm2 = p;
      pp.x[i] += h;
      pm.x[i] -= h;
      pp2.x[i] += 2 * h;
      pm2.x[i] -= 2 * h;
      out[i] = (8.0 * (f(pp) - f(pm)) - (f(pp2) - f(pm2))) / (12.0 * h);
    }
    return out;
  };
  if (ambient >= 2) {
    Alt zero(ambient, 2);
    r.d_eval = [zero](const Point&) { return zero; };
  }
  return r;
}

FormField multiply(const ScalarFunction& H, const FormField& a) {
  FormField r = a;
  r.name = H.name + "*" + a.name;
  auto f = H.f;
  auto ea = a.eval;
  r.eval = [f, ea](const Point& p) { return ea(p) * f(p); };
  r.d_eval = nullptr;
  if (a.has_d() && a.degree + 1 <= a.ambient) {
    auto dH = differential(H, a.dim, a.ambient).eval;
    auto da = a.d_eval;
    r.d_eval = [f, ea, da, dH](const Point& p) { return wedge(dH(p), ea(p)) + da(p) * f(p); };
  }
  return r;
}

// ---------------------------------------------------------------- paths

double Path::length() const {
  double s = 0.0;
  for (const auto& seg : segments) s += seg.length;
  return s;
}

void Path::append(const Path& other) {
  segments.insert(segments.end(), other.segments.begin(), other.segments.end());
  cut_locus = cut_locus || other.cut_locus;
}

Vec smallest_orthogonal_direction(const Vec& p) {
  const int m = static_cast<int>(p.size());
  for (int i = 0; i < m; ++i) {
    Vec e = Vec::Zero(m);
    e[i] = 1.0;
    Vec v = e - p[i] * p;
    double n = v.norm();
    if (n > 1e-8) return Vec(-v / n);
  }
  throw DomainError("smallest_orthogonal_direction: degenerate input");
}

Mat sphere_tangent_basis(const Vec& p) {
  const int m = static_cast<int>(p.size());
  Mat A = Mat::Identity(m, m);
  A.col(0) = p;
  Eigen::HouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ() * Mat::Identity(m, m);
  if (Q.col(0).dot(p) < 0) Q.col(0) = -Q.col(0);
  if (Q.determinant() < 0) Q.col(m - 1) = -Q.col(m - 1);
  return Q.rightCols(m - 1);
}

namespace {

double sphere_angle(const Vec& p, const Vec& q) { return 2.0 * std::atan2((q - p).norm(), (q + p).norm()); }

struct Arc {
  Vec p, u;
  double theta = 0.0;
  bool tie = false;
  Vec at(double s) const {
    if (theta == 0.0) return p;
    return std::cos(s * theta) * p + std::sin(s * theta) * u;
  }
};

Arc make_arc(const Vec& p, const Vec& q) {
  Arc a;
  a.p = p;
  a.theta = sphere_angle(p, q);
  Vec u = q - p.dot(q) * p;
  double n = u.norm();
  if (n < 1e-14) {
    if (p.dot(q) > 0) {
      a.theta = 0.0;
      a.u = Vec::Zero(p.size());
    } else {
      a.u = smallest_orthogonal_direction(p);
      a.theta = kPi;
      a.tie = true;
    }
  } else {
    a.u = u / n;
  }
  return a;
}

Vec wrap_diff(const Vec& d, bool* tie) {
  Vec r = d;
  for (int i = 0; i < r.size(); ++i) {
    double v = std::fmod(r[i] + kPi, 2.0 * kPi);
    if (v < 0) v += 2.0 * kPi;
    r[i] = v - kPi;  // in [-pi, pi)
    if (tie && std::abs(std::abs(r[i]) - kPi) < 1e-15) *tie = true;
  }
  return r;
}

Vec normal_block(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vec v(m);
  for (;;) {
    for (int i = 0; i < m; ++i) v[i] = N(rng);
    double n = v.norm();
    if (n > 1e-300) return v / n;
  }
}

}  // namespace

Path sphere_geodesic(const Vec& p, const Vec& q, bool* tie) {
  Arc a = make_arc(p, q);
  if (tie) *tie = a.tie;
  Path path;
  path.cut_locus = a.tie;
  Vec qq = q;
  path.segments.push_back({a.theta, [a, qq](double s) {
                             Point pt;
                             pt.x = (s >= 1.0) ? qq : a.at(s);
                             return pt;
                           }});
  return path;
}

// ---------------------------------------------------------------- manifolds

Manifold Manifold::sphere3() { return Manifold(ManifoldKind::Sphere3, 3, 4, "S3"); }
Manifold Manifold::sphere3xsphere3() { return Manifold(ManifoldKind::Sphere3xSphere3, 6, 8, "S3xS3"); }
Manifold Manifold::cp2() { return Manifold(ManifoldKind::CP2, 4, 4, "CP2"); }
Manifold Manifold::torus(int n) {
  if (n < 1 || n > alt::kMaxDim) throw DomainError("torus: dimension out of range");
  return Manifold(ManifoldKind::Torus, n, n, "T" + std::to_string(n));
}
Manifold Manifold::sphere2xsphere2() { return Manifold(ManifoldKind::Sphere2xSphere2, 4, 6, "S2xS2"); }
Manifold Manifold::euclidean(int n) {
  if (n < 1 || n > alt::kMaxDim) throw DomainError("euclidean: dimension out of range");
  return Manifold(ManifoldKind::Euclidean, n, n, "R" + std::to_string(n));
}

Point Manifold::point(const Vec& x, int chart) const {
  if (x.size() != ambient_) throw DomainError("point: wrong coordinate count for " + name_);
  Point p{chart, x};
  normalize(p);
  return p;
}

void Manifold::normalize(Point& p) const {
  switch (kind_) {
    case ManifoldKind::Sphere3: p.x /= p.x.norm(); break;
    case ManifoldKind::Sphere3xSphere3:
      p.x.head(4) /= p.x.head(4).norm();
      p.x.tail(4) /= p.x.tail(4).norm();
      break;
    case ManifoldKind::Sphere2xSphere2:
      p.x.head(3) /= p.x.head(3).norm();
      p.x.tail(3) /= p.x.tail(3).norm();
      break;
    case ManifoldKind::CP2: {
      double m = std::max(std::abs(cz(p.x, 0)), std::abs(cz(p.x, 1)));
      if (m > 2.0) p = from_homogeneous(homogeneous(p));
      break;
    }
    default: break;
  }
}

Eigen::Vector3cd Manifold::homogeneous(const Point& p) const {
  if (kind_ != ManifoldKind::CP2) throw DomainError("homogeneous: not CP2");
  Eigen::Vector3cd Z;
  int k = 0;
  for (int j = 0; j < 3; ++j) Z[j] = (j == p.chart) ? cplx(1.0, 0.0) : cz(p.x, k++);
  return Z / Z.norm();
}

Point Manifold::from_homogeneous(const Eigen::Vector3cd& Z) const {
  int j = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(Z[i]) > std::abs(Z[j])) j = i;
  if (std::abs(Z[j]) == 0.0) throw DomainError("from_homogeneous: zero vector");
  return to_chart_from(Z, j);
}

Point Manifold::to_chart(const Point& p, int chart) const {
  Eigen::Vector3cd Z = homogeneous(p);
  if (std::abs(Z[chart]) < 1e-300) throw DomainError("to_chart: point outside chart " + std::to_string(chart));
  return to_chart_from(Z, chart);
}

Point Manifold::to_chart_from(const Eigen::Vector3cd& Z, int chart) {
  Point p;
  p.chart = chart;
  p.x = Vec::Zero(4);
  int k = 0;
  for (int i = 0; i < 3; ++i)
    if (i != chart) set_cz(p.x, k++, Z[i] / Z[chart]);
  return p;
}

namespace {

// Fubini-Study Hermitian matrix h_jk in an affine chart.
Eigen::Matrix2cd fs_hermitian(const Vec& x) {
  Eigen::Vector2cd z(cz(x, 0), cz(x, 1));
  double s = 1.0 + z.squaredNorm();
  Eigen::Matrix2cd h;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) h(j, k) = ((j == k ? s : 0.0) - z[j] * std::conj(z[k])) / (s * s);
  return h;
}

Eigen::Vector2cd as_complex(const Vec& v) { return {cplx(v[0], v[1]), cplx(v[2], v[3])}; }

}  // namespace

Mat Manifold::metric(const Point& p) const {
  if (kind_ != ManifoldKind::CP2) return Mat::Identity(ambient_, ambient_);
  Eigen::Matrix2cd h = fs_hermitian(p.x);
  Mat G(4, 4);
  for (int a = 0; a < 4; ++a) {
    Vec ea = Vec::Zero(4);
    ea[a] = 1.0;
    for (int b = 0; b < 4; ++b) {
      Vec eb = Vec::Zero(4);
      eb[b] = 1.0;
      G(a, b) = (as_complex(ea).adjoint() * h * as_complex(eb))(0, 0).real();
    }
  }
  return G;
}

double Manifold::inner(const Point& p, const Vec& u, const Vec& v) const {
  if (kind_ != ManifoldKind::CP2) return u.dot(v);
  return (as_complex(u).adjoint() * fs_hermitian(p.x) * as_complex(v))(0, 0).real();
}

Vec Manifold::project_tangent(const Point& p, const Vec& v) const {
  switch (kind_) {
    case ManifoldKind::Sphere3: return v - v.dot(p.x) * p.x;
    case ManifoldKind::Sphere3xSphere3: {
      Vec r = v;
      r.head(4) -= v.head(4).dot(p.x.head(4)) * p.x.head(4);
      r.tail(4) -= v.tail(4).dot(p.x.tail(4)) * p.x.tail(4);
      return r;
    }
    case ManifoldKind::Sphere2xSphere2: {
      Vec r = v;
      r.head(3) -= v.head(3).dot(p.x.head(3)) * p.x.head(3);
      r.tail(3) -= v.tail(3).dot(p.x.tail(3)) * p.x.tail(3);
      return r;
    }
    default: return v;
  }
}

Mat Manifold::tangent_basis(const Point& p) const {
  switch (kind_) {
    case ManifoldKind::Sphere3: return sphere_tangent_basis(p.x);
    case ManifoldKind::Sphere3xSphere3:
    case ManifoldKind::Sphere2xSphere2: {
      const int m = ambient_ / 2;
      Mat E = Mat::Zero(ambient_, dim_);
      E.block(0, 0, m, m - 1) = sphere_tangent_basis(p.x.head(m));
      E.block(m, m - 1, m, m - 1) = sphere_tangent_basis(p.x.tail(m));
      return E;
    }
    case ManifoldKind::CP2: {
      Mat G = metric(p);
      Eigen::LLT<Mat> llt(G);
      Mat Lt = llt.matrixU();  // G = Lt^T Lt
      return Lt.inverse();     // E^T G E = I, upper triangular with positive diagonal
    }
    default: return Mat::Identity(ambient_, ambient_);
  }
}

FormField Manifold::volume_form() const {
  FormField f;
  f.degree = dim_;
  f.dim = dim_;
  f.ambient = ambient_;
  f.name = "vol_" + name_;
  const int amb = ambient_;
  switch (kind_) {
    case ManifoldKind::Sphere3:
      f.eval = [](const Point& p) {
        Alt top(4, 4);
        top[0] = 1.0;
        return interior(p.x, top);
      };
      break;
    case ManifoldKind::Sphere3xSphere3:
    case ManifoldKind::Sphere2xSphere2: {
      const int m = amb / 2;
      f.eval = [m, amb](const Point& p) {
        unsigned lo = (1u << m) - 1u, hi = lo << m;
        Alt ta(amb, m), tb(amb, m);
        ta.at(lo) = 1.0;
        tb.at(hi) = 1.0;
        Vec r1 = Vec::Zero(amb), r2 = Vec::Zero(amb);
        r1.head(m) = p.x.head(m);
        r2.tail(m) = p.x.tail(m);
        return wedge(interior(r1, ta), interior(r2, tb));
      };
      break;
    }
    case ManifoldKind::CP2:
      f.eval = [](const Point& p) {
        Alt top(4, 4);
        double s = 1.0 + p.x.squaredNorm();
        top[0] = 1.0 / (s * s * s);
        return top;
      };
      break;
    default:
      f.eval = [amb](const Point&) {
        Alt top(amb, amb);
        top[0] = 1.0;
        return top;
      };
      break;
  }
  return f;
}

double Manifold::total_volume() const {
  switch (kind_) {
    case ManifoldKind::Sphere3: return kVolS3;
    case ManifoldKind::Sphere3xSphere3: return kVolS3 * kVolS3;
    case ManifoldKind::CP2: return kPi * kPi / 2.0;
    case ManifoldKind::Torus: return std::pow(2.0 * kPi, dim_);
    case ManifoldKind::Sphere2xSphere2: return 16.0 * kPi * kPi;
    default: throw DomainError("total_volume: " + name_ + " is not compact");
  }
}

double Manifold::injectivity_radius() const {
  switch (kind_) {
    case ManifoldKind::CP2: return kPi / 2.0;
    case ManifoldKind::Euclidean: return std::numeric_limits<double>::infinity();
    default: return kPi;
  }
}

double Manifold::diameter() const {
  switch (kind_) {
    case ManifoldKind::Sphere3: return kPi;
    case ManifoldKind::Sphere3xSphere3:
    case ManifoldKind::Sphere2xSphere2: return kPi * std::sqrt(2.0);
    case ManifoldKind::CP2: return kPi / 2.0;
    case ManifoldKind::Torus: return kPi * std::sqrt(static_cast<double>(dim_));
    default: return std::numeric_limits<double>::infinity();
  }
}

namespace {

// Unit lift of q with the phase chosen so that <P, Q'> is real and >= 0.
Eigen::Vector3cd aligned_lift(const Eigen::Vector3cd& P, Eigen::Vector3cd Q, bool* tie) {
  cplx ip = P.adjoint() * Q;
  if (std::abs(ip) < 1e-14) {
    if (tie) *tie = true;
    // cut locus: every phase is minimizing; pick the lexicographically
    // smallest real representation (first nonzero coordinate real negative)
    for (int k = 0; k < 3; ++k) {
      if (std::abs(Q[k]) > 1e-12) {
        Q *= -std::conj(Q[k]) / std::abs(Q[k]);
        break;
      }
    }
    return Q;
  }
  if (tie) *tie = false;
  return Q * (std::conj(ip) / std::abs(ip));
}

Vec to_real(const Eigen::Vector3cd& Z) {
  Vec v(6);
  for (int k = 0; k < 3; ++k) set_cz(v, k, Z[k]);
  return v;
}

Eigen::Vector3cd to_complex3(const Vec& v) { return {cz(v, 0), cz(v, 1), cz(v, 2)}; }

}  // namespace

double Manifold::distance(const Point& p, const Point& q) const {
  switch (kind_) {
    case ManifoldKind::Sphere3: return sphere_angle(p.x, q.x);
    case ManifoldKind::Sphere3xSphere3:
    case ManifoldKind::Sphere2xSphere2: {
      const int m = ambient_ / 2;
      double a = sphere_angle(p.x.head(m), q.x.head(m));
      double b = sphere_angle(p.x.tail(m), q.x.tail(m));
      return std::sqrt(a * a + b * b);
    }
    case ManifoldKind::CP2: {
      Eigen::Vector3cd P = homogeneous(p);
      Eigen::Vector3cd Q = aligned_lift(P, homogeneous(q), nullptr);
      return 2.0 * std::atan2((Q - P).norm(), (Q + P).norm());
    }
    case ManifoldKind::Torus: return wrap_diff(q.x - p.x, nullptr).norm();
    default: return (q.x - p.x).norm();
  }
}

Path Manifold::geodesic(const Point& p, const Point& q) const {
  Path path;
  switch (kind_) {
    case ManifoldKind::Sphere3: return sphere_geodesic(p.x, q.x, nullptr);
    case ManifoldKind::Sphere3xSphere3:
    case ManifoldKind::Sphere2xSphere2: {
      const int m = ambient_ / 2;
      Arc a = make_arc(p.x.head(m), q.x.head(m));
      Arc b = make_arc(p.x.tail(m), q.x.tail(m));
      path.cut_locus = a.tie || b.tie;
      const int amb = ambient_;
      Vec qx = q.x;
      path.segments.push_back({std::hypot(a.theta, b.theta), [a, b, m, amb, qx](double s) {
                                 Point pt;
                                 if (s >= 1.0) {
                                   pt.x = qx;
                                   return pt;
                                 }
                                 pt.x = Vec(amb);
                                 pt.x.head(m) = a.at(s);
                                 pt.x.tail(m) = b.at(s);
                                 return pt;
                               }});
      return path;
    }
    case ManifoldKind::CP2: {
      Eigen::Vector3cd P = homogeneous(p);
      bool tie = false;
      Eigen::Vector3cd Q = aligned_lift(P, homogeneous(q), &tie);
      Arc a = make_arc(to_real(P), to_real(Q));
      path.cut_locus = tie || a.tie;
      Manifold self = *this;
      Point qq = q;
      path.segments.push_back({a.theta, [a, self, qq](double s) {
                                 if (s >= 1.0) return qq;
                                 return self.from_homogeneous(to_complex3(a.at(s)));
                               }});
      return path;
    }
    case ManifoldKind::Torus: {
      bool tie = false;
      Vec d = wrap_diff(q.x - p.x, &tie);
      path.cut_locus = tie;
      Vec px = p.x, qx = q.x;
      path.segments.push_back({d.norm(), [px, d, qx](double s) {
                                 Point pt;
                                 pt.x = (s >= 1.0) ? Vec(px + d) : Vec(px + s * d);
                                 return pt;
                               }});
      (void)qx;
      return path;
    }
    default: {
      Vec px = p.x, qx = q.x;
      path.segments.push_back({(qx - px).norm(), [px, qx](double s) {
                                 Point pt;
                                 pt.x = (s >= 1.0) ? qx : Vec(px + s * (qx - px));
                                 return pt;
                               }});
      return path;
    }
  }
}

Point Manifold::sample_uniform(std::mt19937_64& rng) const {
  Point p;
  switch (kind_) {
    case ManifoldKind::Sphere3: p.x = normal_block(rng, 4); break;
    case ManifoldKind::Sphere3xSphere3:
    case ManifoldKind::Sphere2xSphere2: {
      const int m = ambient_ / 2;
      p.x = Vec(ambient_);
      p.x.head(m) = normal_block(rng, m);
      p.x.tail(m) = normal_block(rng, m);
      break;
    }
    case ManifoldKind::CP2: return from_homogeneous(to_complex3(normal_block(rng, 6)));
    case ManifoldKind::Torus: {
      std::uniform_real_distribution<double> U(0.0, 2.0 * kPi);
      p.x = Vec(dim_);
      for (int i = 0; i < dim_; ++i) p.x[i] = U(rng);
      break;
    }
    default: throw DomainError("sample_uniform: " + name_ + " has infinite volume");
  }
  return p;
}

}  // namespace lklab
