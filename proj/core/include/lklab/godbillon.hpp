#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lklab/expr.hpp"
#include "lklab/geometry.hpp"
#include "lklab/ruelle.hpp"

// Godbillon-Vey and time-dependent Godbillon-Vey forms of a family of
// codimension-one foliations ker alpha(t) on a coordinate chart or torus.
//
// Starting from d alpha = alpha ^ beta, successive differentiation gives
//   d beta  = alpha ^ gamma
//   d gamma = beta ^ gamma + alpha ^ delta
// and each division omega = alpha ^ theta is solved by theta = i_V omega / alpha(V)
// for a transversal V that does not depend on t. All derivatives, including
// d/dt, come from truncated Taylor jets of the coefficient expressions.
namespace lklab::godbillon {

struct FoliationFamily {
  std::string name;
  std::vector<std::string> coordinates;  // chart variables; "t" is the family parameter
  std::vector<Expr> alpha;               // coefficient of d x_i, in (coordinates..., t)
  std::vector<Expr> transversal;         // V^i, in the coordinates only
  bool periodic = false;                 // torus R^n / (2 pi Z)^n, else the box [lower, upper]
  Vec lower, upper;

  int n() const { return static_cast<int>(coordinates.size()); }
  Manifold manifold() const;

  /// Builds a family from expression strings. Throws ConfigError on parse errors.
  static FoliationFamily from_strings(std::string name, std::vector<std::string> coordinates,
                                      const std::vector<std::string>& alpha, const std::vector<std::string>& transversal,
                                      bool periodic, Vec lower = {}, Vec upper = {});
  /// {"name", "coordinates", "alpha", "transversal", "domain": "torus"|"box", "lower", "upper"}.
  static FoliationFamily from_json(const nlohmann::json& j);
  /// f alpha with f given as an expression in (coordinates..., t).
  FoliationFamily rescaled(const std::string& f) const;
  /// Same family with another transversal.
  FoliationFamily with_transversal(const std::vector<std::string>& V) const;
};

/// Everything at one point (x, t), as plain alternating tensors on R^n.
/// Forms whose degree exceeds n are left empty (degree 0, dimension 0).
struct PointData {
  Alt alpha, alpha_dot, dalpha, beta, beta_dot, dbeta, gamma, dgamma, delta;
  double alpha_V = 0.0;
  Alt gv;         // beta ^ d beta
  Alt d_gv;       // d(beta ^ d beta) from the jets
  Alt tgv;        // beta_dot ^ beta ^ d beta
  Alt alt_rhs;    // d(alpha_dot ^ beta ^ gamma) - alpha_dot ^ beta ^ alpha ^ delta
  Alt field_form; // d(beta_dot ^ beta)
  Alt d_field_form;
};

/// Jets of the given order at (x, t). Order 2 gives alpha .. tgv, order 3
/// adds gamma, delta and the closedness terms, order 4 adds d of the field form.
PointData evaluate(const FoliationFamily& fam, const Vec& x, double t, int order = 4);

std::vector<Point> family_probes(const FoliationFamily& fam, std::size_t n, std::uint64_t seed);

struct Residual {
  double max = 0.0;
  Point where;
};

/// |alpha ^ d alpha| (integrability) and min |alpha(V)| over the probes.
Residual integrability_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes);
double min_abs_alpha_V(const FoliationFamily& fam, double t, const std::vector<Point>& probes);

/// beta with a check |d alpha - alpha ^ beta| < tol on the probes; throws DomainError otherwise.
FormField beta_from_alpha(const FoliationFamily& fam, double t, const std::vector<Point>& probes, double tol = 1e-8);
FormField gv_integrand(const FoliationFamily& fam, double t);
FormField tgv_integrand(const FoliationFamily& fam, double t);
FormField dbeta_form(const FoliationFamily& fam, double t);
/// beta_dot ^ beta, a primitive of i_X mu for the derived field.
FormField field_primitive(const FoliationFamily& fam, double t);

/// max over probes of |d a| with d by Richardson differences (a from the jets).
double closedness_residual(const FoliationFamily& fam, const FormField& a, const std::vector<Point>& probes);
/// max |d beta ^ d beta|.
double dbeta_square_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes);
/// max |beta_dot(jets) - central difference in t of beta| with Richardson between dt and dt/10.
double tdot_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes, double dt = 1e-4);

/// Identity residual |beta_dot ^ beta ^ d beta - d(alpha_dot ^ beta ^ gamma) + alpha_dot ^ beta ^ alpha ^ delta|.
/// Throws DomainError when a defining relation for gamma or delta fails by more than relation_tol.
double eq_alt_residual(const FoliationFamily& fam, double t, const std::vector<Point>& probes,
                       double relation_tol = 1e-6);

/// X with i_X mu = d(beta_dot ^ beta), and the measured foliation (G, d beta).
std::pair<VectorField, MeasuredFoliation> derived_field_and_foliation(const FoliationFamily& fam, double t,
                                                                      const FormField& mu);

/// Integral of the TGV form over the periodic domain by the tensor trapezoid
/// rule, doubling nodes from `nodes` until two levels agree within tol.
IntegralReport tgv_integral(const FoliationFamily& fam, double t, int nodes = 8, double tol = 1e-10, int max_nodes = 32,
                            int workers = 0);

}  // namespace lklab::godbillon
