#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace lrdx {

// out[i] = fn(i) on up to `workers` threads. Output order is the index order,
// so results do not depend on the worker count.
template <class T, class F>
std::vector<T> parallel_map(std::int64_t count, int workers, F&& fn) {
  std::vector<T> out(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
  if (workers <= 1 || count < 2) {
    for (std::int64_t i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

template <class T>
struct Accepted {
  std::vector<T> values;
  std::int64_t tries = 0;
};

// Runs attempts 0,1,2,... (each attempt owns its own stream) and keeps the
// first `target` successes in attempt order.
template <class T, class F>
Accepted<T> collect_accepted(std::int64_t target, int workers, F&& fn, std::int64_t max_tries = INT64_MAX) {
  Accepted<T> acc;
  const std::int64_t batch = std::max<std::int64_t>(256, target / 4);
  std::int64_t start = 0;
  while (static_cast<std::int64_t>(acc.values.size()) < target) {
    if (start >= max_tries) break;
    const std::int64_t len = std::min(batch, max_tries - start);
    auto results = parallel_map<std::optional<T>>(len, workers, [&](std::int64_t i) { return fn(start + i); });
    for (std::int64_t i = 0; i < len; ++i) {
      auto& r = results[static_cast<std::size_t>(i)];
      if (!r) continue;
      acc.values.push_back(std::move(*r));
      if (static_cast<std::int64_t>(acc.values.size()) == target) {
        acc.tries = start + i + 1;
        return acc;
      }
    }
    start += len;
  }
  acc.tries = start;
  return acc;
}

}  // namespace lrdx
