#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace mfg {

/// Fork-join helper over a fixed contiguous partition of an index range.
///
/// The partition depends only on (n, workers), never on scheduling, so every
/// output element is produced by exactly one task with the same arithmetic
/// regardless of how many workers actually run. Results are therefore bitwise
/// reproducible across worker counts.
class ThreadPool {
public:
  explicit ThreadPool(int workers = 1) : workers_(workers < 1 ? 1 : workers) {}

  int workers() const { return workers_; }

  /// Run fn(begin, end) over [0, n) split into at most workers() ranges.
  template <typename Fn>
  void for_ranges(std::size_t n, Fn&& fn) const {
    if (n == 0) return;
    const std::size_t parts =
        std::min<std::size_t>(static_cast<std::size_t>(workers_), n);
    if (parts <= 1) {
      fn(std::size_t{0}, n);
      return;
    }
    const std::size_t base = n / parts;
    const std::size_t rem = n % parts;
    std::vector<std::thread> threads;
    threads.reserve(parts - 1);
    std::vector<std::exception_ptr> errors(parts);
    std::size_t begin = 0;
    for (std::size_t p = 0; p < parts; ++p) {
      const std::size_t len = base + (p < rem ? 1 : 0);
      const std::size_t end = begin + len;
      if (p + 1 == parts) {
        try {
          fn(begin, end);
        } catch (...) {
          errors[p] = std::current_exception();
        }
      } else {
        threads.emplace_back([&fn, begin, end, err = &errors[p]]() {
          try {
            fn(begin, end);
          } catch (...) {
            *err = std::current_exception();
          }
        });
      }
      begin = end;
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

private:
  int workers_;
};

}  // namespace mfg
