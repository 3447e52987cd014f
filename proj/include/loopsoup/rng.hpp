#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

namespace loopsoup {

using Engine = std::mt19937_64;

/// Independent stream for replica `replica` of master seed `seed`.
Engine make_stream(std::uint64_t seed, std::uint64_t replica = 0);

/// Decorrelated child seed, e.g. for the two sides of a two-sample test.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

/// 0 means one worker per hardware thread.
unsigned resolve_workers(unsigned workers);

/// Runs fn(index, engine) for every replica index and returns the results
/// in index order. Each replica owns make_stream(seed, index), so the output
/// does not depend on the worker count.
template <class T, class Fn>
std::vector<T> map_replicas(std::size_t count, std::uint64_t seed,
                            unsigned workers, Fn &&fn) {
  std::vector<T> out(count);
  const unsigned w = std::min<unsigned>(resolve_workers(workers),
                                        static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&](unsigned worker) {
    try {
      for (std::size_t i = worker; i < count; i += w) {
        Engine rng = make_stream(seed, i);
        out[i] = fn(i, rng);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure)
        failure = std::current_exception();
    }
  };
  if (w <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t)
      pool.emplace_back(body, t);
    for (auto &t : pool)
      t.join();
  }
  if (failure)
    std::rethrow_exception(failure);
  return out;
}

} // namespace loopsoup
