#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nomocou {

// Worker bound shared by all data-parallel loops; 0 means hardware concurrency.
inline std::atomic<int>& job_limit() {
  static std::atomic<int> jobs{0};
  return jobs;
}

inline int effective_jobs() {
  const int j = job_limit().load();
  if (j > 0) return j;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Set inside worker threads so nested loops run serially instead of
// multiplying the thread count.
inline bool& inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}

// Runs f(i) for i in [0, count). Items are claimed dynamically; callers write
// results into per-index slots so the outcome does not depend on scheduling.
template <class F>
void parallel_for(int count, F&& f) {
  const int workers = inside_parallel_region() ? 1 : std::min(effective_jobs(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    inside_parallel_region() = true;
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nomocou
