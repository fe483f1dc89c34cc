#include "lklab/hodge.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "lklab/parallel.hpp"

namespace lklab::hodge {

namespace {

const cplx kI(0.0, 1.0);

std::size_t power(int base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

double norm2(const std::vector<int>& k) {
  double s = 0.0;
  for (int v : k) s += static_cast<double>(v) * v;
  return s;
}

unsigned full_mask(int n) { return (1u << n) - 1u; }

}  // namespace

FourierForm::FourierForm(int n, int degree, int band) : n_(n), degree_(degree), band_(band) {
  if (n < 1 || n > 4) throw DomainError("FourierForm: torus dimension must be in 1..4");
  if (degree < 0 || degree > n) throw DomainError("FourierForm: degree out of range");
  if (band < 0) throw DomainError("FourierForm: negative band limit");
  c_.assign(power(2 * band + 1, n), CAlt(n, degree));
}

std::vector<int> FourierForm::wavevector(std::size_t mode) const {
  std::vector<int> k(n_);
  const int w = 2 * band_ + 1;
  for (int j = n_ - 1; j >= 0; --j) {
    k[j] = static_cast<int>(mode % w) - band_;
    mode /= w;
  }
  return k;
}

std::size_t FourierForm::mode_index(const std::vector<int>& k) const {
  std::size_t m = 0;
  const int w = 2 * band_ + 1;
  for (int j = 0; j < n_; ++j) {
    if (std::abs(k[j]) > band_) throw DomainError("FourierForm: wavevector outside the band");
    m = m * w + static_cast<std::size_t>(k[j] + band_);
  }
  return m;
}

std::size_t FourierForm::zero_mode() const { return mode_index(std::vector<int>(n_, 0)); }

Alt FourierForm::eval(const Vec& x) const {
  Alt r(n_, degree_);
  for (std::size_t m = 0; m < c_.size(); ++m) {
    const auto k = wavevector(m);
    double phase = 0.0;
    for (int j = 0; j < n_; ++j) phase += k[j] * x[j];
    const cplx e = std::polar(1.0, phase);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += (c_[m][i] * e).real();
  }
  return r;
}

double FourierForm::reality_defect() const {
  double worst = 0.0;
  for (std::size_t m = 0; m < c_.size(); ++m) {
    auto k = wavevector(m);
    for (auto& v : k) v = -v;
    const CAlt& o = c_[mode_index(k)];
    for (std::size_t i = 0; i < o.size(); ++i) worst = std::max(worst, std::abs(o[i] - std::conj(c_[m][i])));
  }
  return worst;
}

double FourierForm::max_abs() const {
  double worst = 0.0;
  for (const auto& a : c_)
    for (const auto& v : a.coeffs()) worst = std::max(worst, std::abs(v));
  return worst;
}

FourierForm& FourierForm::operator+=(const FourierForm& o) {
  if (o.n_ != n_ || o.degree_ != degree_ || o.band_ != band_) throw DomainError("FourierForm: shape mismatch");
  for (std::size_t m = 0; m < c_.size(); ++m) c_[m] += o.c_[m];
  return *this;
}

FourierForm& FourierForm::operator-=(const FourierForm& o) {
  if (o.n_ != n_ || o.degree_ != degree_ || o.band_ != band_) throw DomainError("FourierForm: shape mismatch");
  for (std::size_t m = 0; m < c_.size(); ++m) c_[m] -= o.c_[m];
  return *this;
}

FourierForm FourierForm::random(int n, int degree, int band, std::mt19937_64& rng) {
  FourierForm a(n, degree, band);
  std::normal_distribution<double> N(0.0, 1.0);
  const std::size_t z = a.zero_mode();
  // Modes are symmetric about the zero mode: index(-k) = total - 1 - index(k).
  const std::size_t total = a.modes();
  for (std::size_t m = 0; m <= z; ++m) {
    for (std::size_t i = 0; i < a.c_[m].size(); ++i) {
      if (m == z) {
        a.c_[m][i] = cplx(N(rng), 0.0);
      } else {
        const cplx v(N(rng), N(rng));
        a.c_[m][i] = v;
        a.c_[total - 1 - m][i] = std::conj(v);
      }
    }
  }
  return a;
}

FourierForm FourierForm::mode(int n, int band, const std::vector<int>& k, unsigned mask, cplx coeff) {
  FourierForm a(n, std::popcount(mask), band);
  std::vector<int> mk = k;
  for (auto& v : mk) v = -v;
  a.c_[a.mode_index(k)].at(mask) += coeff;
  a.c_[a.mode_index(mk)].at(mask) += std::conj(coeff);
  return a;
}

FourierForm d(const FourierForm& a) {
  if (a.degree() == a.n()) throw DomainError("d: form already has top degree");
  FourierForm r(a.n(), a.degree() + 1, a.band());
  for (std::size_t m = 0; m < a.modes(); ++m) {
    const auto k = a.wavevector(m);
    for (std::size_t i = 0; i < a[m].size(); ++i) {
      const unsigned I = a[m].mask(i);
      for (int j = 0; j < a.n(); ++j) {
        if (I & (1u << j)) continue;
        r[m].at(I | (1u << j)) += cplx(alt::front_sign(j, I), 0.0) * kI * static_cast<double>(k[j]) * a[m][i];
      }
    }
  }
  return r;
}

FourierForm codifferential(const FourierForm& a) {
  if (a.degree() == 0) throw DomainError("codifferential: form has degree 0");
  FourierForm r(a.n(), a.degree() - 1, a.band());
  for (std::size_t m = 0; m < a.modes(); ++m) {
    const auto k = a.wavevector(m);
    for (std::size_t i = 0; i < a[m].size(); ++i) {
      const unsigned I = a[m].mask(i);
      for (int j = 0; j < a.n(); ++j) {
        if (!(I & (1u << j))) continue;
        const unsigned rest = I & ~(1u << j);
        r[m].at(rest) -= cplx(alt::front_sign(j, rest), 0.0) * kI * static_cast<double>(k[j]) * a[m][i];
      }
    }
  }
  return r;
}

FourierForm hodge_star(const FourierForm& a) {
  const int n = a.n();
  FourierForm r(n, n - a.degree(), a.band());
  for (std::size_t m = 0; m < a.modes(); ++m)
    for (std::size_t i = 0; i < a[m].size(); ++i) {
      const unsigned I = a[m].mask(i);
      r[m].at(full_mask(n) & ~I) = static_cast<double>(alt::complement_sign(n, I)) * a[m][i];
    }
  return r;
}

FourierForm laplacian(const FourierForm& a) {
  FourierForm r = a;
  for (std::size_t m = 0; m < a.modes(); ++m) r[m] *= cplx(norm2(a.wavevector(m)), 0.0);
  return r;
}

FourierForm harmonic_projection(const FourierForm& a) {
  FourierForm r(a.n(), a.degree(), a.band());
  const std::size_t z = a.zero_mode();
  r[z] = a[z];
  return r;
}

FourierForm greens_operator(const FourierForm& a) {
  FourierForm r(a.n(), a.degree(), a.band());
  for (std::size_t m = 0; m < a.modes(); ++m) {
    const double k2 = norm2(a.wavevector(m));
    if (k2 == 0.0) continue;
    r[m] = a[m];
    r[m] *= cplx(1.0 / k2, 0.0);
  }
  return r;
}

double coeff_distance(const FourierForm& a, const FourierForm& b) { return (a - b).max_abs(); }

// ---------------------------------------------------------------- double forms

Eigen::MatrixXd DoubleFormKernel::eval(const Vec& x, const Vec& y) const {
  const int w = 2 * band + 1;
  // Per-axis tables of e^{i k_j (x_j - y_j)}.
  std::vector<std::vector<cplx>> axis(n, std::vector<cplx>(w));
  for (int j = 0; j < n; ++j)
    for (int k = -band; k <= band; ++k) axis[j][k + band] = std::polar(1.0, k * (x[j] - y[j]));
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& e : entries) {
    std::size_t m = e.mode;
    cplx ph(1.0, 0.0);
    for (int j = n - 1; j >= 0; --j) {
      ph *= axis[j][m % w];
      m /= w;
    }
    out(e.I, e.J) += (e.c * ph).real();
  }
  return out;
}

double DoubleFormKernel::off_bigrading_norm(int dx, int dy) const {
  double s = 0.0;
  for (const auto& e : entries)
    if (std::popcount(e.I) != dx || std::popcount(e.J) != dy) s += std::norm(e.c);
  return std::sqrt(s);
}

DoubleFormKernel greens_kernel(int n, int s, int band) {
  FourierForm shape(n, s, band);
  DoubleFormKernel g;
  g.n = n;
  g.band = band;
  const double vol = std::pow(2.0 * kPi, n);
  for (std::size_t m = 0; m < shape.modes(); ++m) {
    const double k2 = norm2(shape.wavevector(m));
    if (k2 == 0.0) continue;
    for (unsigned I : alt::masks(n, s)) g.entries.push_back({m, I, I, cplx(1.0 / (vol * k2), 0.0)});
  }
  return g;
}

DoubleFormKernel linking_kernel(int n, int p, int band) {
  if (band < 1) throw DomainError("linking_kernel: band limit must be at least 1");
  if (p < 0 || p >= n) throw DomainError("linking_kernel: x-degree must lie in [0, n)");
  const DoubleFormKernel g = greens_kernel(n, p, band);
  FourierForm shape(n, p, band);
  const int s = n - p - 1;
  const double eps = ((n - s) * s) % 2 ? -1.0 : 1.0;
  std::map<std::tuple<std::size_t, unsigned, unsigned>, cplx> acc;
  for (const auto& e : g.entries) {
    const auto k = shape.wavevector(e.mode);
    for (int j = 0; j < n; ++j) {
      if (e.J & (1u << j)) continue;
      // d_y of e^{-iky} dy_J, then *_y.
      const unsigned Jd = e.J | (1u << j);
      const cplx dy = -kI * static_cast<double>(k[j]) * static_cast<double>(alt::front_sign(j, e.J));
      const unsigned Js = full_mask(n) & ~Jd;
      acc[{e.mode, e.I, Js}] += eps * static_cast<double>(alt::complement_sign(n, Jd)) * dy * e.c;
    }
  }
  DoubleFormKernel L;
  L.n = n;
  L.band = band;
  for (const auto& [key, c] : acc) L.entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
  return L;
}

FourierForm pair_kernel(const DoubleFormKernel& L, const FourierForm& beta, int x_degree) {
  if (beta.band() != L.band || beta.n() != L.n) throw DomainError("pair_kernel: shape mismatch");
  FourierForm r(L.n, x_degree, L.band);
  const double vol = std::pow(2.0 * kPi, L.n);
  const unsigned full = full_mask(L.n);
  for (const auto& e : L.entries) {
    if (std::popcount(e.I) != x_degree) throw DomainError("pair_kernel: kernel x-degree mismatch");
    const unsigned K = full & ~e.J;
    if (std::popcount(K) != beta.degree()) throw DomainError("pair_kernel: y-degrees do not add up to n");
    r[e.mode].at(e.I) += vol * static_cast<double>(alt::wedge_sign(e.J, K)) * e.c * beta[e.mode].at(K);
  }
  return r;
}

double fundl_residual(const FourierForm& a) {
  const int n = a.n(), p = a.degree();
  FourierForm rhs = a - harmonic_projection(a);
  if (p > 0) rhs += d(-1.0 * greens_operator(codifferential(a)));
  if (p == n) return rhs.max_abs();
  const FourierForm lhs = pair_kernel(linking_kernel(n, p, a.band()), d(a), p);
  return coeff_distance(lhs, rhs);
}

GrowthFit kernel_growth(const DoubleFormKernel& L, double r_min, double r_max, int radii, int directions,
                        std::uint64_t seed, SphereStatistic stat) {
  if (radii < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw DomainError("kernel_growth: bad radius range");
  std::vector<Vec> dirs;
  for (int i = 0; i < directions; ++i) {
    auto rng = stream_rng(seed, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> N(0.0, 1.0);
    Vec u(L.n);
    for (int j = 0; j < L.n; ++j) u[j] = N(rng);
    dirs.push_back(u / u.norm());
  }
  GrowthFit fit;
  fit.radii.resize(radii);
  fit.values.resize(radii);
  const Vec x = Vec::Zero(L.n);
  parallel_for(static_cast<std::size_t>(radii), [&](std::size_t i) {
    const double r = r_min * std::pow(r_max / r_min, static_cast<double>(i) / (radii - 1));
    double best = 0.0, sum = 0.0;
    for (const auto& u : dirs) {
      const double v = L.eval(x, Vec(x + r * u)).norm();
      best = std::max(best, v);
      sum += v;
    }
    fit.radii[i] = r;
    fit.values[i] = stat == SphereStatistic::Max ? best : sum / dirs.size();
  });
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < radii; ++i) {
    const double lx = std::log(fit.radii[i]), ly = std::log(fit.values[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  fit.slope = (radii * sxy - sx * sy) / (radii * sxx - sx * sx);
  return fit;
}

}  // namespace lklab::hodge
