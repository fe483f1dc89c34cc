#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lklab/geometry.hpp"
#include "lklab/linking.hpp"

namespace lklab {

/// A compact parameterized k-dimensional cycle u -> embed(u) over the box
/// [lower, upper]. `jacobian` returns the chart Jacobian (ambient x k) in the
/// chart of embed(u); central differences are used when it is absent.
struct ParametricCycle {
  std::string name;
  int k = 0;
  Vec lower, upper;
  std::function<Point(const Vec&)> embed;
  std::function<Mat(const Vec&)> jacobian;
  int orientation = 1;
  std::vector<int> base_nodes;  // Gauss-Legendre nodes per direction at level 0
};

Mat cycle_jacobian(const ParametricCycle& N, const Vec& u, double h = 1e-5);

struct QuadratureOptions {
  int max_levels = 6;
  double rtol = 1e-8;
  double atol = 1e-13;
  double immersion_tol = 1e-8;  // smallest singular value of the Jacobian
  int workers = 0;
};

struct IntegralReport {
  double value = 0.0;
  double error = 0.0;  // standard error (Monte Carlo) or last refinement change (quadrature)
  std::string method;
  std::size_t samples = 0;
  std::vector<std::pair<std::size_t, double>> trace;  // (nodes, value) per refinement level

  nlohmann::json to_json() const;
};

/// Tensor Gauss-Legendre quadrature of the pullback of a k-form over a
/// k-cycle, doubling the nodes per direction until two levels agree to
/// rtol (relative) or atol. Throws QuadratureError with the last two values
/// after max_levels, DomainError when the cycle is not immersed at a node.
IntegralReport integrate_over_cycle(const FormField& a, const ParametricCycle& N, const QuadratureOptions& opt = {});

/// H(X, N) = integral over N of a primitive alpha of i_X mu.
IntegralReport hopf_integral_submanifold(const FormField& alpha, const ParametricCycle& N,
                                         const QuadratureOptions& opt = {});

/// Orientation sign making N the boundary of the chain's Seifert chain:
/// +1 when mu(n1, n2, T_1..T_k) > 0 for normals with df(n1) = 1, df(n2) = i.
/// With this orientation vol * mean lk equals the integral of a primitive over N.
int boundary_orientation(const Manifold& M, const PhaseChain& chain, const ParametricCycle& N, const Vec& u);

/// Orientation sign of a codimension-one piece S of the Seifert chain such
/// that a curve crossing S with arg f increasing meets it positively:
/// +1 when mu(n2, T_1..T_k) > 0 for the normal with df(n2) = i.
int chain_orientation(const Manifold& M, const PhaseChain& chain, const ParametricCycle& S, const Vec& u);

struct SignedLeaf {
  ParametricCycle leaf;
  double weight = 1.0;
  double tail_estimate = 0.0;  // bound on the integrand mass cut off by the parameterization
};

struct MeasuredFoliation {
  enum class Kind { SmoothForm, SignedLeafSum, ExactForm };
  Kind kind = Kind::SmoothForm;
  std::string name;
  FormField nu;                   // transverse measure as a closed 2-form (SmoothForm, ExactForm)
  std::vector<SignedLeaf> leaves; // SignedLeafSum

  static MeasuredFoliation smooth_form(FormField nu, std::string name = "smooth");
  static MeasuredFoliation exact_form(FormField nu, std::string name = "exact");
  static MeasuredFoliation signed_leaves(std::vector<SignedLeaf> leaves, std::string name = "leaves");
};

struct RuelleOptions {
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 7;
  QuadratureOptions quad;
  double max_tail = 1e-9;
  double closed_tol = 1e-8;
  double primitive_tol = 1e-8;
  std::size_t probes = 200;
  int workers = 0;
};

/// Monte Carlo estimate of the integral over M of a top-degree form.
IntegralReport integrate_top_form(const Manifold& M, const FormField& top, std::size_t samples, std::uint64_t seed,
                                  int workers = 0);

/// C(F, nu)(omega): integral of omega ^ nu over M for form payloads (Monte
/// Carlo with standard error), or the weighted sum of leaf integrals.
IntegralReport ruelle_sullivan_eval(const Manifold& M, const MeasuredFoliation& F, const FormField& omega,
                                    const RuelleOptions& opt = {});

/// H(X, F, nu) = C(F, nu)(alpha) after checking d alpha = i_X mu on probes.
IntegralReport hopf_integral_foliation(const Manifold& M, const VectorField& X, const MeasuredFoliation& F,
                                       const FormField& alpha, const RuelleOptions& opt = {});

/// max |d alpha - i_X mu| over probes and all (n-1)-subsets of the tangent frame.
double primitive_residual(const Manifold& M, const VectorField& X, const FormField& alpha,
                          const std::vector<Point>& probes);
/// max |d a| over probes and all (k+1)-subsets of the tangent frame, by
/// Richardson-extrapolated differences.
double closedness_residual(const Manifold& M, const FormField& a, const std::vector<Point>& probes);
/// max over probes and frame subsets of |a - b|.
double form_difference(const Manifold& M, const FormField& a, const FormField& b, const std::vector<Point>& probes);

std::vector<Point> random_probes(const Manifold& M, std::size_t n, std::uint64_t seed);

}  // namespace lklab
