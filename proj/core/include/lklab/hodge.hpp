#pragma once

#include <complex>
#include <random>
#include <vector>

#include "lklab/alt_tensor.hpp"
#include "lklab/types.hpp"

// Hodge theory on the flat torus T^n = R^n / (2 pi Z)^n with band-limited
// Fourier series. Sign conventions, fixed once here:
//   d      : e^{ikx} a  ->  e^{ikx} sum_j i k_j dx_j ^ a
//   d*     : -sum_j i_{d/dx_j} d/dx_j, so Delta = d d* + d* d has multiplier |k|^2
//   *      : dx_I -> s dx_{I^c} with dx_I ^ dx_{I^c} = s dx_1 ^ ... ^ dx_n
//   L      : (-1)^{(n-s) s} *_y d_y g with s the y-degree of *_y d_y g
namespace lklab::hodge {

using CAlt = AltTensor<cplx>;

class FourierForm {
 public:
  FourierForm() = default;
  FourierForm(int n, int degree, int band);

  int n() const { return n_; }
  int degree() const { return degree_; }
  int band() const { return band_; }
  std::size_t modes() const { return c_.size(); }

  std::vector<int> wavevector(std::size_t mode) const;
  std::size_t mode_index(const std::vector<int>& k) const;
  std::size_t zero_mode() const;

  CAlt& operator[](std::size_t mode) { return c_[mode]; }
  const CAlt& operator[](std::size_t mode) const { return c_[mode]; }
  cplx coeff(const std::vector<int>& k, unsigned mask) const { return c_[mode_index(k)].at(mask); }

  /// Real value at x.
  Alt eval(const Vec& x) const;
  /// max |c(-k, I) - conj c(k, I)|.
  double reality_defect() const;
  double max_abs() const;

  FourierForm& operator+=(const FourierForm& o);
  FourierForm& operator-=(const FourierForm& o);
  friend FourierForm operator+(FourierForm a, const FourierForm& b) { return a += b; }
  friend FourierForm operator-(FourierForm a, const FourierForm& b) { return a -= b; }
  friend FourierForm operator*(double s, FourierForm a) {
    for (auto& c : a.c_) c *= cplx(s, 0.0);
    return a;
  }

  /// Real random form with standard normal coefficients up to |k|_inf <= band.
  static FourierForm random(int n, int degree, int band, std::mt19937_64& rng);
  /// A single real mode: coeff * e^{ikx} dx_I + conjugate.
  static FourierForm mode(int n, int band, const std::vector<int>& k, unsigned mask, cplx coeff);

 private:
  int n_ = 0;
  int degree_ = 0;
  int band_ = 0;
  std::vector<CAlt> c_;
};

FourierForm d(const FourierForm& a);
FourierForm codifferential(const FourierForm& a);
FourierForm hodge_star(const FourierForm& a);
FourierForm laplacian(const FourierForm& a);
/// Keeps the k = 0 coefficients; harmonic forms on a flat torus are constant.
FourierForm harmonic_projection(const FourierForm& a);
/// Divides k != 0 coefficients by |k|^2 and drops the zero mode.
FourierForm greens_operator(const FourierForm& a);
/// max coefficientwise |a - b|.
double coeff_distance(const FourierForm& a, const FourierForm& b);

/// Double form sum_k sum c(k, I, J) e^{ik(x - y)} dx_I dy_J with the x and
/// y differentials kept in separate factors. Stored sparsely.
struct DoubleFormKernel {
  struct Entry {
    std::size_t mode;
    unsigned I, J;
    cplx c;
  };
  int n = 0;
  int band = 0;
  std::vector<Entry> entries;

  /// Real components [I][J] over all masks (2^n x 2^n).
  Eigen::MatrixXd eval(const Vec& x, const Vec& y) const;
  /// Frobenius norm of the components with x-degree != dx or y-degree != dy.
  double off_bigrading_norm(int dx, int dy) const;
};

/// Green's kernel on s-forms: sum_{k != 0} e^{ik(x-y)} / ((2 pi)^n |k|^2) sum_I dx_I dy_I.
DoubleFormKernel greens_kernel(int n, int s, int band);
/// Linking form L paired against (p+1)-forms, x-degree p, y-degree n - p - 1.
DoubleFormKernel linking_kernel(int n, int p, int band);

/// x -> integral over y of L(x, y) ^ beta(y), in Fourier coefficients.
FourierForm pair_kernel(const DoubleFormKernel& L, const FourierForm& beta, int x_degree);

/// Coefficientwise norm of int_y L ^ da - (a - H a + dh) with h = -G d* a.
double fundl_residual(const FourierForm& a);

struct GrowthFit {
  double slope = 0.0;
  std::vector<double> radii;
  std::vector<double> values;  // statistic of |L(x, y)| over y on the sphere of radius r
};
/// Max over the sphere, or the mean, which is far less sensitive to the
/// Gibbs ripples of the cube-truncated kernel in three dimensions.
enum class SphereStatistic { Max, Mean };
/// Log-log slope of r -> |L(x, x + r u)| over sampled unit directions u.
GrowthFit kernel_growth(const DoubleFormKernel& L, double r_min, double r_max, int radii, int directions,
                        std::uint64_t seed, SphereStatistic stat = SphereStatistic::Max);

}  // namespace lklab::hodge
