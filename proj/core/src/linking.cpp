#include "lklab/linking.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "lklab/parallel.hpp"
#include "lklab/quadrature.hpp"

namespace lklab {

namespace {

constexpr int kMaxDepth = 60;

class CurveCounter {
 public:
  CurveCounter(const std::function<Point(double)>& c, const PhaseChain& chain, std::vector<CrossingEvent>* events,
               double tol)
      : c_(c), chain_(chain), events_(events), tol_(tol) {}

  cplx f(double s) const {
    cplx v = chain_.f(c_(s));
    if (!(std::abs(v) >= chain_.guard)) {
      std::ostringstream os;
      os << "degenerate start, resample: |f| = " << std::abs(v) << " below guard " << chain_.guard << " on chain "
         << chain_.name;
      throw DegenerateStart(os.str());
    }
    return v;
  }

  long long piece(double sa, cplx fa, double sb, cplx fb, int depth) const {
    const double m = std::min(std::abs(fa), std::abs(fb));
    if (std::abs(fb - fa) > 0.5 * m) {
      if (depth >= kMaxDepth || sb - sa <= 0.0) throw DegenerateStart("degenerate start, resample: phase of f unresolved");
      const double sm = 0.5 * (sa + sb);
      const cplx fm = f(sm);
      return piece(sa, fa, sm, fm, depth + 1) + piece(sm, fm, sb, fb, depth + 1);
    }
    int sign = 0;
    if (fa.imag() < 0.0 && fb.imag() >= 0.0)
      sign = 1;
    else if (fa.imag() >= 0.0 && fb.imag() < 0.0)
      sign = -1;
    if (sign == 0 || fa.real() <= 0.0) return 0;
    if (events_) {
      double lo = sa, hi = sb;
      while (hi - lo > tol_) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const bool before = sign > 0 ? f(mid).imag() < 0.0 : f(mid).imag() >= 0.0;
        (before ? lo : hi) = mid;
      }
      events_->push_back({hi, sign});
    }
    return sign;
  }

 private:
  const std::function<Point(double)>& c_;
  const PhaseChain& chain_;
  std::vector<CrossingEvent>* events_;
  double tol_;
};

}  // namespace

long long crossings_on_curve(const std::function<Point(double)>& c, double a, double b, const PhaseChain& chain,
                             int pieces, std::vector<CrossingEvent>* events, double event_tol) {
  CurveCounter counter(c, chain, events, event_tol);
  pieces = std::max(pieces, 1);
  long long total = 0;
  double sa = a;
  cplx fa = counter.f(a);
  for (int i = 1; i <= pieces; ++i) {
    const double sb = (i == pieces) ? b : a + (b - a) * i / pieces;
    const cplx fb = counter.f(sb);
    total += counter.piece(sa, fa, sb, fb, 0);
    sa = sb;
    fa = fb;
  }
  return total;
}

long long crossings_on_path(const Path& path, const PhaseChain& chain) {
  long long total = 0;
  for (const auto& seg : path.segments) {
    if (seg.length == 0.0) continue;
    const int pieces = std::max(4, static_cast<int>(std::ceil(seg.length / 0.05)));
    total += crossings_on_curve(seg.at, 0.0, 1.0, chain, pieces);
  }
  return total;
}

CrossingCount signed_crossings(const ClosedLoop& loop, const PhaseChain& chain) {
  CrossingCount cc;
  if (loop.flow) {
    if (loop.flow->steps.empty() && loop.flow->samples.size() > 1)
      throw DomainError("signed_crossings: trajectory was integrated without dense steps");
    for (const auto& st : loop.flow->steps) {
      std::function<Point(double)> c = [&st](double s) { return st.at(s); };
      cc.flow += crossings_on_curve(c, st.t0, st.t1, chain, 2);
    }
  }
  cc.closure = crossings_on_path(loop.closure, chain);
  cc.flow *= chain.orientation_sign;
  cc.closure *= chain.orientation_sign;
  return cc;
}

namespace {

struct Trace {
  Point end;
  long long flow = 0;
  std::vector<CrossingEvent> events;
  std::vector<Point> at_checkpoint;
};

Trace trace_flow(const Manifold& M, const VectorField& X, const Point& x0, const PhaseChain& chain, double t_end,
                 const std::vector<double>& checkpoints, const LinkingOptions& opt) {
  if (!(std::abs(chain.f(x0)) >= opt.start_guard))
    throw DegenerateStart("degenerate start, resample: start point lies on or near the chain boundary");
  Trace tr;
  const bool want_events = opt.localize_events || !checkpoints.empty();
  std::size_t next_cp = 0;
  Dop853 rk(M, X, opt.integrator);
  tr.end = rk.run(x0, t_end, [&](const DenseStep& st) {
    std::function<Point(double)> c = [&st](double s) { return st.at(s); };
    tr.flow += crossings_on_curve(c, st.t0, st.t1, chain, 2, want_events ? &tr.events : nullptr);
    while (next_cp < checkpoints.size() && checkpoints[next_cp] <= st.t1) {
      tr.at_checkpoint.push_back(st.at(checkpoints[next_cp]));
      ++next_cp;
    }
    return true;
  });
  if (t_end == 0.0) tr.end = x0;
  while (tr.at_checkpoint.size() < checkpoints.size()) tr.at_checkpoint.push_back(tr.end);
  return tr;
}

LinkingEstimate summarize(const std::vector<double>& values, double volume, double t) {
  LinkingEstimate e;
  e.samples = values.size();
  e.horizon_t = t;
  if (values.empty()) return e;
  const double mean = pairwise_sum(values) / values.size();
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = values.size() > 1 ? pairwise_sum(sq) / (values.size() - 1) : 0.0;
  e.value = volume * mean;
  e.std_error = volume * std::sqrt(var / values.size());
  return e;
}

}  // namespace

LinkingEstimate asymptotic_lk(const Manifold& M, const VectorField& X, const Point& x0, const PhaseChain& chain,
                              const ShortPathSystem& sys, double t_end, const LinkingOptions& opt) {
  if (!(t_end > 0.0)) throw DomainError("asymptotic_lk: t_end must be positive");
  Point start = x0;
  M.normalize(start);
  Trace tr = trace_flow(M, X, start, chain, t_end, {}, opt);
  long long closure = crossings_on_path(sys.path(tr.end, start), chain);
  LinkingEstimate e;
  e.samples = 1;
  e.horizon_t = t_end;
  e.crossings_flow = chain.orientation_sign * tr.flow;
  e.crossings_closure = chain.orientation_sign * closure;
  e.mean_abs_closure = std::abs(static_cast<double>(closure));
  e.value = static_cast<double>(e.crossings_flow + e.crossings_closure) / t_end;
  return e;
}

AverageResult average_lk(const Manifold& M, const VectorField& X, const PhaseChain& chain,
                         const std::vector<const ShortPathSystem*>& systems, const AverageOptions& opt) {
  if (opt.n_samples < 1) throw DomainError("average_lk: need at least one sample");
  if (!(opt.t_end > 0.0)) throw DomainError("average_lk: t_end must be positive");
  if (systems.empty()) throw DomainError("average_lk: no short-path system given");
  std::vector<double> cps = opt.checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::remove_if(cps.begin(), cps.end(), [&](double c) { return !(c > 0.0) || c > opt.t_end; }), cps.end());

  const std::size_t n = opt.n_samples;
  const std::size_t ns = systems.size();
  const std::size_t max_attempts = 1000;
  std::vector<SampleRecord> records(n);
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> degenerate{0};
  const std::size_t allowed = static_cast<std::size_t>(std::floor(opt.max_degenerate_fraction * n));

  parallel_for(
      n,
      [&](std::size_t i) {
        SampleRecord rec;
        rec.index = i;
        for (std::size_t attempt = 0;; ++attempt) {
          if (attempt >= max_attempts) throw DegenerateOverflow("average_lk: sample keeps hitting the chain");
          auto rng = stream_rng(opt.seed, i, attempt);
          Point x0 = M.sample_uniform(rng);
          try {
            Trace tr = trace_flow(M, X, x0, chain, opt.t_end, cps, opt.linking);
            rec.start = x0;
            rec.attempts = attempt + 1;
            rec.flow = chain.orientation_sign * tr.flow;
            rec.closure.assign(ns, 0);
            rec.value.assign(ns, 0.0);
            rec.checkpoint_value.assign(ns, std::vector<double>(cps.size(), 0.0));
            for (std::size_t s = 0; s < ns; ++s) {
              rec.closure[s] = chain.orientation_sign * crossings_on_path(systems[s]->path(tr.end, x0), chain);
              rec.value[s] = static_cast<double>(rec.flow + rec.closure[s]) / opt.t_end;
              for (std::size_t c = 0; c < cps.size(); ++c) {
                long long flow_c = 0;
                for (const auto& ev : tr.events)
                  if (ev.s <= cps[c]) flow_c += ev.sign;
                long long clo = crossings_on_path(systems[s]->path(tr.at_checkpoint[c], x0), chain);
                rec.checkpoint_value[s][c] = static_cast<double>(chain.orientation_sign * (flow_c + clo)) / cps[c];
              }
            }
            break;
          } catch (const DegenerateStart&) {
            if (degenerate.fetch_add(1) + 1 > allowed)
              throw DegenerateOverflow("average_lk: more than " + std::to_string(100.0 * opt.max_degenerate_fraction) +
                                       "% of samples were degenerate");
          }
        }
        records[i] = std::move(rec);
        std::size_t d = done.fetch_add(1) + 1;
        if (opt.progress) opt.progress(d, n);
      },
      opt.workers);

  AverageResult res;
  res.volume = opt.volume > 0.0 ? opt.volume : M.total_volume();
  res.degenerate = degenerate.load();
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<double> v(n), absclo(n);
    long long flow = 0, clo = 0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = records[i].value[s];
      absclo[i] = std::abs(static_cast<double>(records[i].closure[s]));
      flow += records[i].flow;
      clo += records[i].closure[s];
    }
    LinkingEstimate e = summarize(v, res.volume, opt.t_end);
    e.crossings_flow = flow;
    e.crossings_closure = clo;
    e.mean_abs_closure = pairwise_sum(absclo) / n;
    res.per_system.push_back(e);
    std::vector<LinkingEstimate> cpe;
    for (std::size_t c = 0; c < cps.size(); ++c) {
      std::vector<double> vc(n);
      for (std::size_t i = 0; i < n; ++i) vc[i] = records[i].checkpoint_value[s][c];
      cpe.push_back(summarize(vc, res.volume, cps[c]));
    }
    res.checkpoints.push_back(cpe);
  }
  res.records = std::move(records);
  return res;
}

LinkingEstimate average_lk(const Manifold& M, const VectorField& X, const PhaseChain& chain,
                           const ShortPathSystem& sys, double t_end, std::size_t n_samples, std::uint64_t seed) {
  AverageOptions opt;
  opt.t_end = t_end;
  opt.n_samples = n_samples;
  opt.seed = seed;
  return average_lk(M, X, chain, {&sys}, opt).per_system.front();
}

}  // namespace lklab
