#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rdfr {

// Runs fn(i) for i in [0, count) on up to `workers` threads. If any call
// throws, the exception of the lowest failing index is rethrown after all
// threads have joined, so failures are reported deterministically.
template <typename Fn>
void parallelFor(std::size_t count, std::size_t workers, Fn&& fn) {
  if (count == 0) return;
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex errorMutex;
  std::size_t errorIndex = count;
  std::exception_ptr error;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(errorMutex);
        if (i < errorIndex) {
          errorIndex = i;
          error = std::current_exception();
        }
      }
    }
  };
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(body);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace rdfr
