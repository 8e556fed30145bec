#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

#include "srcf/numeric.hpp"

namespace srcf {

struct ExecutionOptions {
  unsigned threads = 1;
  // Combine partial results in a fixed pairwise tree so output does not depend on threads.
  bool deterministic = true;
};

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are claimed
// dynamically; callers write results into per-item slots.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Fixed-shape pairwise reduction: ((x0 + x1) + (x2 + x3)) + ...
inline CompensatedSum pairwise_sum(std::vector<CompensatedSum> parts) {
  if (parts.empty()) return {};
  while (parts.size() > 1) {
    std::vector<CompensatedSum> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      CompensatedSum s = parts[i];
      s.add(parts[i + 1]);
      next.push_back(s);
    }
    if (parts.size() % 2) next.push_back(parts.back());
    parts.swap(next);
  }
  return parts.front();
}

}  // namespace srcf
