#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lklab/geometry.hpp"
#include "lklab/linking.hpp"
#include "lklab/ruelle.hpp"

// Worked examples: Hopf pairs on S3 x S3, the contact S3, a Hamiltonian
// circle action on CP2 and the symplectic S2 x S2.
namespace lklab::models {

// ---- S3 x S3, coordinates (z0, z1, w0, w1) as (Re, Im) pairs.

/// lambda = x0 dy0 - y0 dx0 + x1 dy1 - y1 dx1 on block 0 (z) or 1 (w) of R^8.
FormField s3_lambda(int block, int ambient = 8);
/// The round volume form of the S3 factor, i_x(dx0 dy0 dx1 dy1) on the block.
FormField s3_block_volume(int block, int ambient = 8);
/// f = <z, w> = z0 conj(w0) + z1 conj(w1); N = {z orthogonal to w}.
PhaseChain s3xs3_chain();
/// alpha = (a/2) lambda_1 ^ mu_2 + (b/2) mu_1 ^ lambda_2 with d alpha = i_{aH1+bH2}(mu_1 ^ mu_2).
FormField s3xs3_primitive(double a, double b);
/// N parameterized by (eta, xi1, xi2, theta): z = (cos eta e^{i xi1}, sin eta e^{i xi2}),
/// w = e^{i theta}(conj z1, -conj z0); oriented as the boundary of the Seifert chain.
ParametricCycle s3xs3_cycle();
/// vol * lk = 2 (a - b) pi^3.
double s3xs3_target(double a, double b);

// ---- contact S3

FormField s3_contact_form();
/// lambda ^ d lambda = 2 x round volume, total mass 4 pi^2.
FormField s3_contact_volume();
inline constexpr double kContactVolumeS3 = 4.0 * kPi * kPi;
/// f = z1; N is the Hopf fiber {z1 = 0}.
PhaseChain s3_fiber_chain();
ParametricCycle s3_fiber_cycle();

// ---- CP2, chart coordinates (Re w0, Im w0, Re w1, Im w1) with w = Z / Z_chart.

/// A fixed generic Hermitian matrix.
Eigen::Matrix3cd cp2_default_hamiltonian();
/// X generated by Z' = i A Z.
VectorField cp2_field(const Eigen::Matrix3cd& A);
/// [exp(i A t) Z].
Point cp2_flow(const Eigen::Matrix3cd& A, const Point& p, double t);
/// Fubini-Study Kahler form, omega(u, v) = Im(u^H h v); omega^2 / 2 is the volume form.
FormField cp2_kahler_form();
/// H = -<A Z, Z> / (2 |Z|^2), with dH = i_X omega.
ScalarFunction cp2_moment_map(const Eigen::Matrix3cd& A);
/// alpha = H omega, a primitive of i_X(omega^2 / 2).
FormField cp2_primitive(const Eigen::Matrix3cd& A);
/// f = (Z0 - Z1) conj(Z0 + Z1) on the unit lift; zero set L_1 u L_-1 where
/// L_c = {Z1 = c Z0}, Seifert chain {Z1 = s Z0, s in [-1, 1]}.
PhaseChain cp2_chain();
/// Closure of L_c parameterized by (psi, phi) in [0, pi/2] x [0, 2 pi]:
/// Z = (cos psi, c cos psi, sqrt(1 + |c|^2) sin psi e^{i phi}), complex orientation.
ParametricCycle cp2_leaf(cplx c);
/// The Seifert 3-chain parameterized by (s, psi, phi), oriented for positive crossings.
ParametricCycle cp2_seifert_chain();
/// L_1 - L_-1 as a signed leaf sum; weights from the boundary orientation rule.
MeasuredFoliation cp2_leaves();

// ---- S2 x S2, coordinates (p1, p2) in R^3 x R^3.

/// omega_1 + omega_2 with omega_j(u, v) = det[p_j, u_j, v_j]; omega^2 / 2 is the volume form.
FormField s2xs2_symplectic_form();
/// H = c1 z1 + c2 z2 + c3 x1 x2 with closed-form gradient.
ScalarFunction s2xs2_hamiltonian(double c1, double c2, double c3);
/// A null-homologous torus: (s, u) -> ((cos s, sin s, 0), latitude 0.6 sin s, longitude u).
ParametricCycle s2xs2_null_torus();

// ---- chart forms from expressions

/// sum_i c_i(x) dx_i on R^n with the coefficients parsed from `coeffs`.
/// d_eval differentiates the coefficients with first-order jets.
FormField expression_one_form(std::string name, const std::vector<std::string>& coordinates,
                              const std::vector<std::string>& coeffs);
/// dz + x1 dy1 + x2 dy2 + 0.2 sin(y1) dx2 on R^5 with coordinates (x1, y1, x2, y2, z).
FormField r5_contact_form();

}  // namespace lklab::models
