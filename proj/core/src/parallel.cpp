// SPDX-License-Identifier: MIT
#include "favard/parallel.hpp"

#include <cstdlib>
#include <string>

namespace favard {

int default_workers() {
  const char* env = std::getenv("FAVARD_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    int w = std::stoi(env);
    return w > 0 ? w : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace favard
