#include "lklab/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "lklab/types.hpp"

namespace lklab {

namespace {

void enumerate(int nvars, int remaining, int v, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (v == nvars) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    cur[v] = e;
    enumerate(nvars, remaining - e, v + 1, cur, out);
  }
  cur[v] = 0;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

JetSpace::JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || order < 0) throw DomainError("JetSpace: bad shape");
  std::vector<std::vector<int>> all;
  std::vector<int> cur(nvars, 0);
  enumerate(nvars, order, 0, cur, all);
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int e : a) da += e;
    for (int e : b) db += e;
    return da < db;
  });
  exps_ = all;
  for (const auto& e : exps_) {
    int d = 0;
    for (int x : e) d += x;
    deg_.push_back(d);
  }
  count_upto_.assign(order + 1, 0);
  for (int d = 0; d <= order; ++d)
    count_upto_[d] = static_cast<std::size_t>(std::count_if(deg_.begin(), deg_.end(), [d](int x) { return x <= d; }));

  std::map<std::vector<int>, int> index;
  for (std::size_t i = 0; i < exps_.size(); ++i) index[exps_[i]] = static_cast<int>(i);
  raise_.assign(exps_.size() * nvars, -1);
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    for (int v = 0; v < nvars; ++v) {
      auto e = exps_[i];
      e[v] += 1;
      auto it = index.find(e);
      if (it != index.end()) raise_[i * nvars + v] = it->second;
    }
  }
  for (std::size_t a = 0; a < exps_.size(); ++a) {
    for (std::size_t b = 0; b < exps_.size(); ++b) {
      if (deg_[a] + deg_[b] > order) continue;
      std::vector<int> e(nvars);
      for (int v = 0; v < nvars; ++v) e[v] = exps_[a][v] + exps_[b][v];
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(index.at(e))});
    }
  }
  std::stable_sort(products_.begin(), products_.end(),
                   [this](const Triple& x, const Triple& y) { return deg_[x.r] < deg_[y.r]; });
  products_upto_.assign(order + 1, 0);
  for (int d = 0; d <= order; ++d)
    products_upto_[d] = static_cast<std::size_t>(
        std::count_if(products_.begin(), products_.end(), [&](const Triple& t) { return deg_[t.r] <= d; }));
}

std::shared_ptr<const JetSpace> JetSpace::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nvars, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto sp = std::make_shared<const JetSpace>(nvars, order);
  cache[key] = sp;
  return sp;
}

int JetSpace::index_of(const std::vector<int>& exps) const {
  for (std::size_t i = 0; i < exps_.size(); ++i)
    if (exps_[i] == exps) return static_cast<int>(i);
  return -1;
}

Jet Jet::constant(std::shared_ptr<const JetSpace> sp, double value) {
  Jet j;
  j.c_.assign(sp->size(), 0.0);
  j.c_[0] = value;
  j.order_ = sp->order();
  j.sp_ = std::move(sp);
  return j;
}

Jet Jet::variable(std::shared_ptr<const JetSpace> sp, int v, double value) {
  Jet j = constant(sp, value);
  if (sp->order() >= 1) j.c_[sp->raise(0, v)] = 1.0;
  return j;
}

double Jet::derivative(const std::vector<int>& exps) const {
  int total = 0;
  double w = 1.0;
  for (int e : exps) {
    total += e;
    w *= factorial(e);
  }
  if (total == 0) return c_[0];
  if (!sp_) return 0.0;
  if (total > order_) throw DomainError("Jet::derivative: order exceeds the valid truncation");
  int idx = sp_->index_of(exps);
  return idx < 0 ? 0.0 : w * c_[idx];
}

Jet Jet::partial(int v) const {
  if (!sp_) return Jet(0.0);
  if (order_ == 0) throw DomainError("Jet::partial: no derivative information left");
  Jet r = constant(sp_, 0.0);
  r.order_ = order_ - 1;
  const std::size_t n = sp_->count_upto(r.order_);
  for (std::size_t m = 0; m < n; ++m) {
    int up = sp_->raise(m, v);
    if (up >= 0) r.c_[m] = (sp_->exponent(m, v) + 1) * c_[up];
  }
  return r;
}

void Jet::adopt(const Jet& o) {
  if (sp_ || !o.sp_) return;
  double v = c_[0];
  sp_ = o.sp_;
  order_ = o.order_;
  c_.assign(sp_->size(), 0.0);
  c_[0] = v;
}

Jet& Jet::operator+=(const Jet& o) {
  adopt(o);
  if (o.sp_) {
    if (o.sp_ != sp_) throw DomainError("Jet: mixing jet spaces");
    order_ = std::min(order_, o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  } else {
    c_[0] += o.c_[0];
  }
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  adopt(o);
  if (o.sp_) {
    if (o.sp_ != sp_) throw DomainError("Jet: mixing jet spaces");
    order_ = std::min(order_, o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  } else {
    c_[0] -= o.c_[0];
  }
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  if (!a.sp_) return b * a.c_[0];
  if (!b.sp_) return a * b.c_[0];
  if (a.sp_ != b.sp_) throw DomainError("Jet: mixing jet spaces");
  Jet r = Jet::constant(a.sp_, 0.0);
  r.order_ = std::min(a.order_, b.order_);
  const auto& prods = a.sp_->products();
  const std::size_t n = a.sp_->products_upto(r.order_);
  const double* ca = a.c_.data();
  const double* cb = b.c_.data();
  double* cr = r.c_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = prods[i];
    cr[t.r] += ca[t.a] * cb[t.b];
  }
  // coefficients above the valid order are meaningless; keep them zero
  for (std::size_t m = a.sp_->count_upto(r.order_); m < r.c_.size(); ++m) r.c_[m] = 0.0;
  return r;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

Jet Jet::compose(const Jet& a, const std::vector<double>& derivs) {
  if (!a.sp_) return Jet(derivs[0]);
  Jet g = a;
  g.c_[0] = 0.0;
  Jet r = constant(a.sp_, derivs[0]);
  r.order_ = a.order_;
  Jet power = constant(a.sp_, 1.0);
  double fact = 1.0;
  for (int n = 1; n <= a.order_ && n < static_cast<int>(derivs.size()); ++n) {
    power = power * g;
    fact *= n;
    r += power * (derivs[n] / fact);
  }
  return r;
}

namespace {
int order_of(const Jet& a) { return a.space() ? a.order() : 0; }
}  // namespace

Jet reciprocal(const Jet& a) {
  double x = a.value();
  if (x == 0.0) throw DomainError("Jet: division by zero");
  std::vector<double> d(order_of(a) + 1);
  double f = 1.0 / x;
  for (std::size_t n = 0; n < d.size(); ++n) {
    d[n] = f;
    f *= -static_cast<double>(n + 1) / x;
  }
  return Jet::compose(a, d);
}

Jet exp(const Jet& a) {
  std::vector<double> d(order_of(a) + 1, std::exp(a.value()));
  return Jet::compose(a, d);
}

Jet log(const Jet& a) {
  double x = a.value();
  if (x <= 0.0) throw DomainError("Jet: log of non-positive value");
  std::vector<double> d(order_of(a) + 1);
  d[0] = std::log(x);
  double f = 1.0 / x;
  for (std::size_t n = 1; n < d.size(); ++n) {
    d[n] = f;
    f *= -static_cast<double>(n) / x;
  }
  return Jet::compose(a, d);
}

Jet sin(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  std::vector<double> d(order_of(a) + 1);
  const double cyc[4] = {s, c, -s, -c};
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = cyc[n % 4];
  return Jet::compose(a, d);
}

Jet cos(const Jet& a) {
  double s = std::sin(a.value()), c = std::cos(a.value());
  std::vector<double> d(order_of(a) + 1);
  const double cyc[4] = {c, -s, -c, s};
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = cyc[n % 4];
  return Jet::compose(a, d);
}

Jet pow(const Jet& a, double p) {
  double x = a.value();
  std::vector<double> d(order_of(a) + 1);
  double coef = 1.0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    double e = p - static_cast<double>(n);
    d[n] = coef == 0.0 ? 0.0 : coef * std::pow(x, e);
    coef *= e;
  }
  return Jet::compose(a, d);
}

Jet sqrt(const Jet& a) {
  if (a.value() <= 0.0 && a.space()) throw DomainError("Jet: sqrt at non-positive value");
  return pow(a, 0.5);
}

Jet sinh(const Jet& a) {
  double s = std::sinh(a.value()), c = std::cosh(a.value());
  std::vector<double> d(order_of(a) + 1);
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = (n % 2 == 0) ? s : c;
  return Jet::compose(a, d);
}

Jet cosh(const Jet& a) {
  double s = std::sinh(a.value()), c = std::cosh(a.value());
  std::vector<double> d(order_of(a) + 1);
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = (n % 2 == 0) ? c : s;
  return Jet::compose(a, d);
}

Jet tanh(const Jet& a) { return sinh(a) / cosh(a); }

}  // namespace lklab
