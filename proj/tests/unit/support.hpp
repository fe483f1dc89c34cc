#pragma once

#include <random>
#include <vector>

#include "lklab/geometry.hpp"

namespace testsupport {

inline lklab::Vec random_vec(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  lklab::Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = N(rng);
  return v;
}

inline lklab::Alt random_alt(int n, int k, std::mt19937_64& rng) {
  lklab::Alt a(n, k);
  std::normal_distribution<double> N;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = N(rng);
  return a;
}

inline lklab::Point chart_point(std::initializer_list<double> v) {
  lklab::Point p;
  p.x = lklab::Vec(static_cast<int>(v.size()));
  int i = 0;
  for (double d : v) p.x[i++] = d;
  return p;
}

/// Point on S3 x S3 from complex coordinates (z0, z1, w0, w1), normalized per factor.
inline lklab::Point s3s3(lklab::cplx z0, lklab::cplx z1, lklab::cplx w0, lklab::cplx w1) {
  lklab::Vec x(8);
  lklab::set_cz(x, 0, z0);
  lklab::set_cz(x, 1, z1);
  lklab::set_cz(x, 2, w0);
  lklab::set_cz(x, 3, w1);
  return lklab::Manifold::sphere3xsphere3().point(x);
}

}  // namespace testsupport
