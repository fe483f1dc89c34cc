#pragma once

#include <functional>
#include <string>

#include "lklab/types.hpp"

namespace lklab {

/// A vector field given by its chart (or ambient) velocity components.
/// Fields on embedded manifolds are defined on a neighbourhood in the ambient
/// space so that finite differences and exterior derivatives make sense.
struct VectorField {
  std::string name;
  int ambient = 0;
  bool time_dependent = false;
  std::function<Vec(const Point&, double)> eval;

  Vec operator()(const Point& p, double t = 0.0) const { return eval(p, t); }
};

inline VectorField zero_field(int ambient) {
  return {"zero", ambient, false, [ambient](const Point&, double) { return Vec::Zero(ambient).eval(); }};
}

inline VectorField reversed(const VectorField& X) {
  VectorField r = X;
  r.name = "-" + X.name;
  auto f = X.eval;
  r.eval = [f](const Point& p, double t) { return Vec(-f(p, t)); };
  return r;
}

}  // namespace lklab
