#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace big {

/// Worker cap from BIG_THREADS (default 1). Read once per process.
inline int worker_threads() {
  static const int n = [] {
    const char* env = std::getenv("BIG_THREADS");
    if (env == nullptr) return 1;
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
      return 1;
    }
  }();
  return n;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks write disjoint
/// outputs only, so results do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const auto threads = static_cast<std::size_t>(worker_threads());
  if (threads <= 1 || n < 256) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + threads - 1) / threads;
  std::vector<std::jthread> pool;
  for (std::size_t b = 0; b < n; b += chunk) {
    const std::size_t e = std::min(n, b + chunk);
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
}

}  // namespace big
