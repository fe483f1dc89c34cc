#include "lklab/alt_tensor.hpp"

#include <array>

namespace lklab::alt {

namespace {

struct Tables {
  // by_degree[dim][k] lists masks; rank_of[dim][mask] is the position.
  std::array<std::array<std::vector<unsigned>, kMaxDim + 1>, kMaxDim + 1> by_degree;
  std::array<std::array<int, 1u << kMaxDim>, kMaxDim + 1> rank_of{};

  Tables() {
    for (int dim = 0; dim <= kMaxDim; ++dim) {
      for (unsigned m = 0; m < (1u << dim); ++m) {
        auto& list = by_degree[dim][std::popcount(m)];
        rank_of[dim][m] = static_cast<int>(list.size());
        list.push_back(m);
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

const std::vector<unsigned>& masks(int dim, int degree) { return tables().by_degree[dim][degree]; }

int rank(int dim, unsigned mask) { return tables().rank_of[dim][mask]; }

}  // namespace lklab::alt
