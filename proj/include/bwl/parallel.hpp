#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bwl {

/// Runs fn(i) for i in [0, count) on up to `jobs` threads (strided). The first
/// exception thrown by any call is rethrown after all threads have joined.
template <class Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), 1,
                                                      std::max<std::size_t>(count, 1));
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&](std::size_t begin) {
    try {
      for (std::size_t i = begin; i < count; i += workers) fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work, w);
  work(0);
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

/// BWL_JOBS if set to a positive integer, else 1.
inline int default_jobs() {
  if (const char* env = std::getenv("BWL_JOBS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace bwl
