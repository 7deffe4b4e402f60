#pragma once

#include <cstdint>
#include <random>

#include "fewphoton/types.hpp"

namespace testing {

inline fewphoton::Matrix random_matrix(Eigen::Index n, std::uint32_t seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  fewphoton::Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {dist(rng), dist(rng)};
  }
  return m;
}

inline double max_abs(const fewphoton::Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
