#include "lklab/flow.hpp"

#include <algorithm>
#include <cmath>

#include "dop853_tableau.inc"
#include "lklab/quadrature.hpp"

namespace lklab {

namespace {

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kErrorExponent = -1.0 / 8.0;

double rms(const Vec& v) { return v.norm() / std::sqrt(static_cast<double>(v.size())); }

}  // namespace

// ---------------------------------------------------------------- dense output

void DenseStep::build() const {
  if (built_) return;
  const double h = t1 - t0;
  auto& K = k_;
  const Vec& y_old = start.x;
  for (int s = dop853::kStages + 1; s < dop853::kStagesExtended; ++s) {
    Vec dy = Vec::Zero(y_old.size());
    for (int j = 0; j < s; ++j)
      if (dop853::A[s][j] != 0.0) dy += dop853::A[s][j] * K[j];
    Point p{start.chart, y_old + h * dy};
    K[s] = field_->eval(p, t0 + dop853::C[s] * h);
  }
  const Vec delta = y_new_ - y_old;
  F_[0] = delta;
  F_[1] = h * K[0] - delta;
  F_[2] = 2.0 * delta - h * (f_new_ + K[0]);
  for (int r = 0; r < 4; ++r) {
    Vec acc = Vec::Zero(y_old.size());
    for (int s = 0; s < dop853::kStagesExtended; ++s)
      if (dop853::D[r][s] != 0.0) acc += dop853::D[r][s] * K[s];
    F_[3 + r] = h * acc;
  }
  built_ = true;
}

Vec DenseStep::raw(double t) const {
  if (t <= t0) return start.x;
  if (t >= t1) return y_new_;
  build();
  const double x = (t - t0) / (t1 - t0);
  Vec y = Vec::Zero(start.x.size());
  for (int i = 0; i < 7; ++i) {
    y += F_[6 - i];
    y *= (i % 2 == 0) ? x : (1.0 - x);
  }
  return y + start.x;
}

Point DenseStep::at(double t) const {
  if (t >= t1) return end;
  Point p{start.chart, raw(t)};
  manifold_->normalize(p);
  return p;
}

Point Trajectory::at(double t) const {
  if (steps.empty()) {
    if (samples.size() == 1) return samples.front().x;
    throw DomainError("Trajectory::at: dense steps were not kept");
  }
  if (t <= steps.front().t0) return steps.front().start;
  auto it = std::lower_bound(steps.begin(), steps.end(), t, [](const DenseStep& s, double v) { return s.t1 < v; });
  if (it == steps.end()) return steps.back().end;
  return it->at(t);
}

// ---------------------------------------------------------------- integrator

Dop853::Dop853(const Manifold& M, const VectorField& X, const IntegratorOptions& opt) : M_(M), X_(X), opt_(opt) {
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw DomainError("integrator tolerances must be positive");
}

Vec Dop853::f(double t, const Point& p) {
  ++nfev_;
  return X_.eval(p, t);
}

double Dop853::initial_step(double t0, const Point& p, const Vec& f0, double t_end) {
  const Vec& y0 = p.x;
  Vec scale = (opt_.atol + y0.array().abs() * opt_.rtol).matrix();
  double d0 = rms((y0.array() / scale.array()).matrix());
  double d1 = rms((f0.array() / scale.array()).matrix());
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_end - t0);
  Point p1{p.chart, y0 + h0 * f0};
  Vec f1 = f(t0 + h0, p1);
  double d2 = rms(((f1 - f0).array() / scale.array()).matrix()) / h0;
  double h1 = (d1 <= 1e-15 && d2 <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                            : std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  return std::min(100.0 * h0, h1);
}

Point Dop853::run(const Point& x0, double t_end, const std::function<bool(const DenseStep&)>& observer) {
  if (!(t_end >= 0.0)) throw DomainError("integrate: t_end must be non-negative");
  Point cur = x0;
  M_.normalize(cur);
  if (t_end == 0.0) return cur;

  double t = 0.0;
  Vec fcur = f(t, cur);
  double h_abs = opt_.first_step > 0.0 ? opt_.first_step : initial_step(t, cur, fcur, t_end);
  h_abs = std::min(h_abs, opt_.max_step);

  DenseStep step;
  step.manifold_ = &M_;
  step.field_ = &X_;
  const int n = static_cast<int>(cur.x.size());
  std::size_t count = 0;

  while (t < t_end) {
    if (++count > opt_.max_steps) throw IntegrationError("integrate: step budget exhausted", t, cur);
    const double min_step = 10.0 * std::abs(std::nextafter(t, t_end + 1.0) - t);
    bool rejected = false;
    for (;;) {
      if (h_abs < min_step) throw IntegrationError("integrate: step size underflow", t, cur);
      double t_new = std::min(t + h_abs, t_end);
      double h = t_new - t;

      auto& K = step.k_;
      K[0] = fcur;
      for (int s = 1; s < dop853::kStages; ++s) {
        Vec dy = Vec::Zero(n);
        for (int j = 0; j < s; ++j)
          if (dop853::A[s][j] != 0.0) dy += dop853::A[s][j] * K[j];
        K[s] = f(t + dop853::C[s] * h, Point{cur.chart, cur.x + h * dy});
      }
      Vec acc = Vec::Zero(n);
      for (int j = 0; j < dop853::kStages; ++j) acc += dop853::B[j] * K[j];
      Vec y_new = cur.x + h * acc;
      Vec f_new = f(t_new, Point{cur.chart, y_new});
      K[dop853::kStages] = f_new;

      Vec scale = (opt_.atol + cur.x.array().abs().max(y_new.array().abs()) * opt_.rtol).matrix();
      Vec e5 = Vec::Zero(n), e3 = Vec::Zero(n);
      for (int j = 0; j <= dop853::kStages; ++j) {
        e5 += dop853::E5[j] * K[j];
        e3 += dop853::E3[j] * K[j];
      }
      double n5 = (e5.array() / scale.array()).matrix().squaredNorm();
      double n3 = (e3.array() / scale.array()).matrix().squaredNorm();
      double err = 0.0;
      if (!y_new.allFinite() || !f_new.allFinite()) {
        err = std::numeric_limits<double>::infinity();
      } else if (n5 > 0.0 || n3 > 0.0) {
        err = h * n5 / std::sqrt((n5 + 0.01 * n3) * n);
      }

      if (err < 1.0) {
        double factor = (err == 0.0) ? kMaxFactor : std::min(kMaxFactor, kSafety * std::pow(err, kErrorExponent));
        if (rejected) factor = std::min(1.0, factor);
        h_abs = std::min(h_abs * factor, opt_.max_step);

        step.t0 = t;
        step.t1 = t_new;
        step.start = cur;
        step.y_new_ = y_new;
        step.f_new_ = f_new;
        step.built_ = false;
        Point next{cur.chart, y_new};
        M_.normalize(next);
        step.end = next;
        // FSAL; a chart switch changes coordinates, so the derivative is recomputed
        fcur = (next.chart == cur.chart) ? f_new : f(t_new, next);
        t = t_new;
        cur = next;
        break;
      }
      h_abs *= std::max(kMinFactor, kSafety * std::pow(err, kErrorExponent));
      rejected = true;
    }
    if (observer && !observer(step)) break;
  }
  return cur;
}

Trajectory integrate(const Manifold& M, const VectorField& X, const Point& x0, double t_end,
                     const IntegratorOptions& opt, bool keep_steps) {
  Trajectory tr;
  tr.t_end = t_end;
  tr.tol = opt.rtol;
  Point start = x0;
  M.normalize(start);
  tr.samples.push_back({0.0, start});
  Dop853 rk(M, X, opt);
  rk.run(start, t_end, [&](const DenseStep& s) {
    tr.samples.push_back({s.t1, s.end});
    if (keep_steps) tr.steps.push_back(s);
    return true;
  });
  tr.evaluations = rk.evaluations();
  return tr;
}

double time_average(const Manifold& M, const ScalarFunction& f, const VectorField& X, const Point& x0,
                    double t_end, const IntegratorOptions& opt) {
  if (!(t_end > 0.0)) throw DomainError("time_average: t_end must be positive");
  const GaussRule& g = gauss_legendre(8);
  std::vector<double> pieces;
  Dop853 rk(M, X, opt);
  rk.run(x0, t_end, [&](const DenseStep& s) {
    const double mid = 0.5 * (s.t0 + s.t1), half = 0.5 * (s.t1 - s.t0);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) acc += g.w[i] * f(s.at(mid + half * g.x[i]));
    pieces.push_back(acc * half);
    return true;
  });
  return pairwise_sum(pieces) / t_end;
}

}  // namespace lklab
