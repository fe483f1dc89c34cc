#pragma once

#include <functional>
#include <vector>

namespace lklab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached n-point rule computed by Newton iteration on P_n.
const GaussRule& gauss_legendre(int n);

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n);

/// Deterministic pairwise summation.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace lklab
