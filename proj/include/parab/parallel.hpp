#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace parab {

inline int thread_count() {
  if (const char* env = std::getenv("PARAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// static block split over [0, n); bodies must write disjoint outputs
template <typename F>
void parallel_for(long long n, F&& body) {
  const int nt = std::min<long long>(thread_count(), n > 0 ? n : 1);
  if (nt <= 1) {
    for (long long k = 0; k < n; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nt);
  const long long chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    const long long lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (long long k = lo; k < hi; ++k) body(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace parab
