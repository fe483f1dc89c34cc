#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lklab/alt_tensor.hpp"
#include "lklab/types.hpp"
#include "lklab/vector_field.hpp"

namespace lklab {

/// vol(S^3) for the unit round sphere.
inline constexpr double kVolS3 = 2.0 * kPi * kPi;

enum class ManifoldKind { Sphere3, Sphere3xSphere3, CP2, Torus, Sphere2xSphere2, Euclidean };

/// A differential form of degree k given by its ambient components at each
/// point. Embedded manifolds use the ambient coordinates of their embedding,
/// CP2 uses the real coordinates (Re w0, Im w0, Re w1, Im w1) of the active
/// affine chart. Forms are extended to a neighbourhood, so d of the ambient
/// form restricts to d of the form on the manifold.
struct FormField {
  int degree = 0;
  int dim = 0;      // dimension of the manifold the form lives on
  int ambient = 0;  // number of chart coordinates
  std::string name;
  std::function<Alt(const Point&)> eval;
  std::function<Alt(const Point&)> d_eval;  // closed-form exterior derivative, optional

  Alt operator()(const Point& p) const { return eval(p); }
  bool has_d() const { return static_cast<bool>(d_eval); }
  /// a(v_1, ..., v_k) with ambient vectors.
  double on(const Point& p, const std::vector<Vec>& vs) const { return eval_on(eval(p), vs); }
};

FormField constant_form(int dim, const Alt& value, std::string name);
FormField wedge(const FormField& a, const FormField& b);
FormField interior_product(const VectorField& X, const FormField& a);
FormField operator+(const FormField& a, const FormField& b);
FormField operator*(double s, const FormField& a);
/// Central differences in chart coordinates.
FormField numeric_d(const FormField& a, double h = 1e-4);
/// Richardson extrapolation of numeric_d between h and h/10.
FormField numeric_d_richardson(const FormField& a, double h = 1e-4);
/// d_eval when available, otherwise numeric_d_richardson.
FormField exterior_d(const FormField& a, double h = 1e-4);

struct ScalarFunction {
  std::string name;
  std::function<double(const Point&)> f;
  std::function<Vec(const Point&)> grad;  // ambient gradient, optional

  double operator()(const Point& p) const { return f(p); }
};
/// df as a 1-form, using grad when present and central differences otherwise.
FormField differential(const ScalarFunction& H, int dim, int ambient, double h = 1e-5);
/// H a, with d(H a) = dH ^ a + H da when a carries its exterior derivative.
FormField multiply(const ScalarFunction& H, const FormField& a);

/// Piecewise smooth path; each segment is parameterized over [0, 1].
struct PathSegment {
  double length = 0.0;
  std::function<Point(double)> at;
};

struct Path {
  std::vector<PathSegment> segments;
  bool cut_locus = false;  // a tie-break was applied somewhere along the path

  double length() const;
  Point start() const { return segments.front().at(0.0); }
  Point end() const { return segments.back().at(1.0); }
  void append(const Path& other);
};

class Manifold {
 public:
  static Manifold sphere3();
  static Manifold sphere3xsphere3();
  static Manifold cp2();
  static Manifold torus(int n);
  static Manifold sphere2xsphere2();
  static Manifold euclidean(int n);

  ManifoldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_; }
  const std::string& name() const { return name_; }

  /// Reproject onto the manifold and switch CP2 charts when a coordinate
  /// exceeds 2 in modulus.
  void normalize(Point& p) const;
  Point point(const Vec& x, int chart = 0) const;

  /// Columns form an oriented orthonormal basis of the tangent space.
  Mat tangent_basis(const Point& p) const;
  /// Gram matrix of the metric in chart coordinates.
  Mat metric(const Point& p) const;
  double inner(const Point& p, const Vec& u, const Vec& v) const;
  /// Orthogonal projection onto the tangent space (identity for charts).
  Vec project_tangent(const Point& p, const Vec& v) const;

  FormField volume_form() const;
  double total_volume() const;
  double injectivity_radius() const;
  double diameter() const;

  double distance(const Point& p, const Point& q) const;
  Path geodesic(const Point& p, const Point& q) const;
  Point sample_uniform(std::mt19937_64& rng) const;

  // CP2 helpers. Charts j = 0, 1, 2 correspond to Z_j = 1.
  Eigen::Vector3cd homogeneous(const Point& p) const;
  Point from_homogeneous(const Eigen::Vector3cd& Z) const;
  Point to_chart(const Point& p, int chart) const;

 private:
  Manifold(ManifoldKind k, int dim, int ambient, std::string name)
      : kind_(k), dim_(dim), ambient_(ambient), name_(std::move(name)) {}
  static Point to_chart_from(const Eigen::Vector3cd& Z, int chart);

  ManifoldKind kind_;
  int dim_;
  int ambient_;
  std::string name_;
};

/// Geodesic on the unit sphere S^{m-1} inside R^m, flagging the antipodal tie-break.
Path sphere_geodesic(const Vec& p, const Vec& q, bool* tie);
/// Lexicographically smallest unit vector orthogonal to unit p.
Vec smallest_orthogonal_direction(const Vec& p);
/// Oriented orthonormal basis of T_p S^{m-1}: det[p, e_1, ..., e_{m-1}] = +1.
Mat sphere_tangent_basis(const Vec& p);

/// Complex helpers for coordinates stored as (Re, Im) pairs.
inline cplx cz(const Vec& x, int k) { return {x[2 * k], x[2 * k + 1]}; }
inline void set_cz(Vec& x, int k, cplx z) {
  x[2 * k] = z.real();
  x[2 * k + 1] = z.imag();
}

}  // namespace lklab
