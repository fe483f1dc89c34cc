#pragma once

// Truncated multivariate Taylor polynomials ("jets") for exact derivatives of
// expression-defined forms. A jet expands a function around a base point in
// nvars variables up to a total degree; the valid degree drops by one with
// every partial derivative, so truncation error never leaks silently.

#include <climits>
#include <cstdint>
#include <memory>
#include <vector>

namespace lklab {

class JetSpace {
 public:
  static std::shared_ptr<const JetSpace> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  std::size_t size() const { return exps_.size(); }
  /// Number of monomials of total degree <= d.
  std::size_t count_upto(int d) const { return count_upto_[d]; }
  int degree(std::size_t m) const { return deg_[m]; }
  int exponent(std::size_t m, int v) const { return exps_[m][v]; }
  /// Index of monomial m * x_v, or -1 when that exceeds the order.
  int raise(std::size_t m, int v) const { return raise_[m * nvars_ + v]; }
  int index_of(const std::vector<int>& exps) const;

  struct Triple {
    std::uint32_t a, b, r;
  };
  /// Products a*b -> r sorted by degree of r; products_upto(d) bounds the prefix.
  const std::vector<Triple>& products() const { return products_; }
  std::size_t products_upto(int d) const { return products_upto_[d]; }

  JetSpace(int nvars, int order);

 private:
  int nvars_;
  int order_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> deg_;
  std::vector<std::size_t> count_upto_;
  std::vector<int> raise_;
  std::vector<Triple> products_;
  std::vector<std::size_t> products_upto_;
};

class Jet {
 public:
  Jet(double c = 0.0) : c_{c} {}  // NOLINT: implicit constant promotion is intended

  static Jet constant(std::shared_ptr<const JetSpace> sp, double value);
  static Jet variable(std::shared_ptr<const JetSpace> sp, int v, double value);

  double value() const { return c_[0]; }
  /// Valid truncation order (INT_MAX for a pure constant).
  int order() const { return sp_ ? order_ : INT_MAX; }
  const std::shared_ptr<const JetSpace>& space() const { return sp_; }
  /// Raw Taylor coefficient of monomial m.
  double coeff(std::size_t m) const { return m < c_.size() ? c_[m] : 0.0; }
  /// Mixed partial derivative at the base point, exponents per variable.
  double derivative(const std::vector<int>& exps) const;

  /// d/dx_v; the valid order drops by one.
  Jet partial(int v) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator-=(double s) { c_[0] -= s; return *this; }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator/=(double s) { return *this *= (1.0 / s); }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a /= s; }
  friend Jet operator/(double s, const Jet& a) { return reciprocal(a) * s; }
  friend Jet operator-(Jet a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }

  friend Jet reciprocal(const Jet& a);
  friend Jet exp(const Jet& a);
  friend Jet log(const Jet& a);
  friend Jet sin(const Jet& a);
  friend Jet cos(const Jet& a);
  friend Jet sqrt(const Jet& a);
  friend Jet pow(const Jet& a, double p);
  friend Jet tanh(const Jet& a);
  friend Jet sinh(const Jet& a);
  friend Jet cosh(const Jet& a);

 private:
  /// phi(a) from the derivatives phi^(n)(a0), n = 0..order.
  static Jet compose(const Jet& a, const std::vector<double>& derivs);
  void adopt(const Jet& o);

  std::shared_ptr<const JetSpace> sp_;
  int order_ = 0;
  std::vector<double> c_;
};

}  // namespace lklab
