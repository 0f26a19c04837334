#include "psdb/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace psdb {

unsigned worker_count() {
  if (const char* env = std::getenv("PSDB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> run_trials(std::int64_t trials, Seed seed,
                               const std::function<double(std::int64_t, Rng&)>& f) {
  std::vector<double> out(static_cast<std::size_t>(std::max<std::int64_t>(trials, 0)));
  const unsigned workers =
      static_cast<unsigned>(std::min<std::int64_t>(worker_count(), std::max<std::int64_t>(trials, 1)));

  auto body = [&](std::int64_t t) {
    Rng rng(seed, static_cast<std::uint64_t>(t));
    out[static_cast<std::size_t>(t)] = f(t, rng);
  };

  if (workers <= 1) {
    for (std::int64_t t = 0; t < trials; ++t) body(t);
    return out;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::int64_t t; (t = next.fetch_add(1)) < trials;) {
        try {
          body(t);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(trials);
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace psdb
