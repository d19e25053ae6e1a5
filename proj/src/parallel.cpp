// SPDX-License-Identifier: Apache-2.0
#include "modcalc/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace modcalc {

namespace {
std::atomic<int> g_cap{0};

int hardware_default() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}
}  // namespace

void set_max_workers(int n) { g_cap.store(n < 0 ? 0 : n); }

int max_workers() {
  const int cap = g_cap.load();
  return cap > 0 ? cap : hardware_default();
}

void parallel_for(Index n, const std::function<void(Index, Index)>& body) {
  if (n <= 0) return;
  const int workers =
      static_cast<int>(std::min<Index>(max_workers(), n));
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_lock;
  const Index chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    const Index begin = static_cast<Index>(t) * chunk;
    const Index end = std::min<Index>(begin + chunk, n);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> guard(error_lock);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace modcalc
