#pragma once

#include <cmath>
#include <vector>

#include <doctest.h>

#include "wou/common.hpp"

namespace wou::test {

/// |estimate - target| <= k standard errors (plus a hair for exact estimates).
inline void check_within_sigmas(const Estimate& e, double target, double k = 4.0) {
  INFO("estimate " << e.value << " +- " << e.std_error << ", target " << target);
  CHECK(std::abs(e.value - target) <= k * e.std_error + 1e-12);
}

inline std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[j]);
  return out;
}

}  // namespace wou::test
