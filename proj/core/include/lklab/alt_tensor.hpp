#pragma once

// Pointwise alternating tensors in at most 8 ambient coordinates.
// A k-form at a point is stored by its components on dx_I for increasing
// index sets I, encoded as bitmasks.

#include <bit>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lklab/types.hpp"

namespace lklab {

namespace alt {

inline constexpr int kMaxDim = 8;

int binomial(int n, int k);
/// Bitmasks of popcount `degree` in `dim` bits, ascending.
const std::vector<unsigned>& masks(int dim, int degree);
/// Position of `mask` inside masks(dim, popcount(mask)).
int rank(int dim, unsigned mask);

/// Sign of dx_I ^ dx_J relative to dx_{I|J}; I and J disjoint.
inline int wedge_sign(unsigned I, unsigned J) {
  int swaps = 0;
  while (J) {
    int j = std::countr_zero(J);
    J &= J - 1;
    swaps += std::popcount(I >> (j + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

/// Sign for moving dx_i to the front of dx_I (i not in I).
inline int front_sign(int i, unsigned I) {
  return (std::popcount(I & ((1u << i) - 1u)) & 1) ? -1 : 1;
}

/// Sign of the permutation taking (I, complement of I) to increasing order.
inline int complement_sign(int dim, unsigned I) {
  unsigned full = (dim >= 32) ? ~0u : ((1u << dim) - 1u);
  return wedge_sign(I, full & ~I);
}

}  // namespace alt

template <class T>
class AltTensor {
 public:
  AltTensor() = default;
  AltTensor(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || dim > alt::kMaxDim) throw DomainError("AltTensor: ambient dimension out of range");
    if (degree < 0 || degree > dim) throw DomainError("AltTensor: degree exceeds dimension");
    c_.assign(alt::binomial(dim, degree), T(0.0));
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return c_.size(); }

  unsigned mask(std::size_t i) const { return alt::masks(dim_, degree_)[i]; }
  T& operator[](std::size_t i) { return c_[i]; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  T& at(unsigned m) { return c_[alt::rank(dim_, m)]; }
  const T& at(unsigned m) const { return c_[alt::rank(dim_, m)]; }

  AltTensor& operator+=(const AltTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  AltTensor& operator-=(const AltTensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  template <class S>
  AltTensor& operator*=(const S& s) {
    for (auto& v : c_) v = v * s;
    return *this;
  }
  friend AltTensor operator+(AltTensor a, const AltTensor& b) { return a += b; }
  friend AltTensor operator-(AltTensor a, const AltTensor& b) { return a -= b; }
  friend AltTensor operator-(AltTensor a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  template <class S>
  friend AltTensor operator*(AltTensor a, const S& s) { return a *= s; }
  template <class S>
  friend AltTensor operator*(const S& s, AltTensor a) { return a *= s; }

  std::vector<T>& coeffs() { return c_; }
  const std::vector<T>& coeffs() const { return c_; }

 private:
  void check_same(const AltTensor& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_) throw DomainError("AltTensor: shape mismatch");
  }
  int dim_ = 0;
  int degree_ = 0;
  std::vector<T> c_{T(0.0)};
};

using Alt = AltTensor<double>;

template <class T>
AltTensor<T> wedge(const AltTensor<T>& a, const AltTensor<T>& b) {
  if (a.dim() != b.dim()) throw DomainError("wedge: ambient dimension mismatch");
  if (a.degree() + b.degree() > a.dim()) throw DomainError("wedge: degree overflow");
  AltTensor<T> r(a.dim(), a.degree() + b.degree());
  for (std::size_t i = 0; i < a.size(); ++i) {
    unsigned I = a.mask(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      unsigned J = b.mask(j);
      if (I & J) continue;
      T term = a[i] * b[j];
      if (alt::wedge_sign(I, J) > 0)
        r.at(I | J) += term;
      else
        r.at(I | J) -= term;
    }
  }
  return r;
}

/// i_v a, with v given by its ambient components.
template <class T, class V>
AltTensor<T> interior(const V& v, const AltTensor<T>& a) {
  if (a.degree() == 0) throw DomainError("interior product of a 0-form");
  AltTensor<T> r(a.dim(), a.degree() - 1);
  for (std::size_t n = 0; n < a.size(); ++n) {
    unsigned I = a.mask(n);
    for (unsigned J = I; J; J &= J - 1) {
      int i = std::countr_zero(J);
      T term = a[n] * v[i];
      if (alt::front_sign(i, I) > 0)
        r.at(I & ~(1u << i)) += term;
      else
        r.at(I & ~(1u << i)) -= term;
    }
  }
  return r;
}

/// a(v_1, ..., v_k) for ambient vectors.
template <class T, class VecList>
T eval_on(const AltTensor<T>& a, const VecList& vs) {
  if (static_cast<int>(vs.size()) != a.degree()) throw DomainError("apply: wrong number of vectors");
  AltTensor<T> cur = a;
  for (const auto& v : vs) {
    if (cur.degree() == 0) break;
    cur = interior(v, cur);
  }
  return cur[0];
}

/// Assemble d from the ambient partial derivatives of the components:
/// da = sum_i dx_i ^ d_i a.
template <class T>
AltTensor<T> d_from_partials(const std::vector<AltTensor<T>>& partials) {
  const int n = partials.front().dim();
  const int k = partials.front().degree();
  AltTensor<T> r(n, k + 1);
  for (int i = 0; i < n; ++i) {
    const auto& p = partials[i];
    for (std::size_t m = 0; m < p.size(); ++m) {
      unsigned I = p.mask(m);
      if (I & (1u << i)) continue;
      if (alt::front_sign(i, I) > 0)
        r.at(I | (1u << i)) += p[m];
      else
        r.at(I | (1u << i)) -= p[m];
    }
  }
  return r;
}

inline double max_abs(const Alt& a) {
  double m = 0.0;
  for (double v : a.coeffs()) m = std::max(m, std::abs(v));
  return m;
}

/// Basis monomial dx_I.
inline Alt basis_form(int dim, unsigned I) {
  Alt r(dim, std::popcount(I));
  r.at(I) = 1.0;
  return r;
}

}  // namespace lklab
