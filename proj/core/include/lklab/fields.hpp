#pragma once

#include <vector>

#include "lklab/geometry.hpp"
#include "lklab/vector_field.hpp"

namespace lklab {

/// a H1 + b H2 on S3 x S3: (z, w) -> (i a z, i b w). Coordinates are
/// (Re z0, Im z0, Re z1, Im z1, Re w0, Im w0, Re w1, Im w1).
VectorField hopf_pair_field(double a, double b);
/// Closed-form flow (z, w) -> (e^{iat} z, e^{ibt} w).
Point hopf_pair_flow(double a, double b, const Point& p, double t);

/// Hopf field z -> i z on S3 (also the Reeb field of the standard contact form).
VectorField hopf_field();

/// X_H with dH = i_{X_H} omega. This sign convention is the one used
/// throughout; many texts use dH = -i_X omega instead.
/// Solved per point on an oriented orthonormal tangent frame; throws
/// DomainError naming the point when omega is numerically singular
/// (condition number above 1e12).
VectorField hamiltonian_field(const Manifold& M, const ScalarFunction& H, const FormField& omega);

/// Reeb field of a contact form: alpha(X) = 1 and i_X d alpha = 0. Uses the
/// closed-form d of alpha when present. Throws DomainError where
/// alpha ^ (d alpha)^n vanishes.
VectorField reeb_field(const Manifold& M, const FormField& alpha);

/// alpha ^ (d alpha)^n evaluated on the oriented orthonormal frame at p.
double contact_volume(const Manifold& M, const FormField& alpha, const Point& p);

/// max over probes of |d(i_X mu)| on the tangent frame, with d taken by
/// Richardson-extrapolated central differences.
double divergence_residual(const Manifold& M, const VectorField& X, const FormField& mu,
                           const std::vector<Point>& probes, double h = 1e-4);

/// Tangent frame columns as a list of ambient vectors.
std::vector<Vec> frame_vectors(const Mat& E);

}  // namespace lklab
