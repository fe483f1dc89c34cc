#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lklab/flow.hpp"
#include "lklab/geometry.hpp"
#include "lklab/shortpaths.hpp"

namespace lklab {

/// Codimension-two N = f^{-1}(0) with Seifert chain f^{-1}([0, inf)).
/// A crossing of the chain counts +1 when arg f increases through 0.
struct PhaseChain {
  std::string name;
  std::function<cplx(const Point&)> f;
  int orientation_sign = 1;
  double guard = 1e-8;  // |f| below this along a loop is a degenerate start

  PhaseChain reversed() const {
    PhaseChain c = *this;
    c.orientation_sign = -orientation_sign;
    return c;
  }
};

struct CrossingEvent {
  double s;  // curve parameter (flow time on the flow part)
  int sign;
};

struct CrossingCount {
  long long flow = 0;
  long long closure = 0;
  long long total() const { return flow + closure; }
};

/// Signed crossings of the curve s -> c(s), s in [a, b], with the chain
/// (orientation_sign not applied). The interval is split into `pieces`
/// and then bisected adaptively until f moves by at most half its modulus
/// on each piece; events are localized to `event_tol` when requested.
/// Throws DegenerateStart when |f| drops below chain.guard.
long long crossings_on_curve(const std::function<Point(double)>& c, double a, double b, const PhaseChain& chain,
                             int pieces, std::vector<CrossingEvent>* events = nullptr, double event_tol = 1e-10);
long long crossings_on_path(const Path& path, const PhaseChain& chain);

/// Crossings of a closed loop: flow part from the trajectory's dense steps
/// plus the closure path; orientation_sign applied to both.
CrossingCount signed_crossings(const ClosedLoop& loop, const PhaseChain& chain);

struct LinkingEstimate {
  double value = 0.0;
  double horizon_t = 0.0;
  std::size_t samples = 0;
  double std_error = 0.0;
  long long crossings_flow = 0;
  long long crossings_closure = 0;
  double mean_abs_closure = 0.0;  // mean |closure crossings| per sample
};

struct LinkingOptions {
  IntegratorOptions integrator;
  double start_guard = 1e-6;  // |f(x0)| below this rejects the start
  bool localize_events = true;
};

/// lk(gamma(x, t), N) / t for the loop closed by `sys`.
LinkingEstimate asymptotic_lk(const Manifold& M, const VectorField& X, const Point& x0, const PhaseChain& chain,
                              const ShortPathSystem& sys, double t_end, const LinkingOptions& opt = {});

struct SampleRecord {
  std::size_t index = 0;
  std::size_t attempts = 1;
  Point start;
  long long flow = 0;
  std::vector<long long> closure;       // per short-path system
  std::vector<double> value;            // per system, (flow + closure) / t
  std::vector<std::vector<double>> checkpoint_value;  // [system][checkpoint]
};

struct AverageOptions {
  double t_end = 1000.0;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 1;
  std::vector<double> checkpoints;  // extra horizons < t_end for running averages
  double max_degenerate_fraction = 0.01;
  double volume = 0.0;  // total mass of the invariant measure; 0 uses vol(M)
  LinkingOptions linking;
  int workers = 0;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct AverageResult {
  std::vector<LinkingEstimate> per_system;
  std::vector<std::vector<LinkingEstimate>> checkpoints;  // [system][checkpoint]
  std::vector<SampleRecord> records;
  std::size_t degenerate = 0;
  double volume = 0.0;
};

/// vol(M) times the Monte Carlo mean of lk(x, N) over uniformly distributed
/// starts, sharing each trajectory between the given short-path systems.
/// Degenerate starts are resampled; more than max_degenerate_fraction of
/// them raises DegenerateOverflow. Results are bit-reproducible for a seed
/// regardless of the worker count.
AverageResult average_lk(const Manifold& M, const VectorField& X, const PhaseChain& chain,
                         const std::vector<const ShortPathSystem*>& systems, const AverageOptions& opt);

LinkingEstimate average_lk(const Manifold& M, const VectorField& X, const PhaseChain& chain,
                           const ShortPathSystem& sys, double t_end, std::size_t n_samples, std::uint64_t seed);

}  // namespace lklab
