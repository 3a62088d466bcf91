#pragma once

#include <cstddef>
#include <cstdint>

namespace qghjm {

/// Serial is the reference implementation every parallel kernel is tested
/// against; both must produce bit-identical results.
enum class Execution { Serial, Parallel };

/// Calls fn(i) for i in [0, n). Parallel execution uses OpenMP with dynamic
/// scheduling; fn must write only to slot i of its outputs and not throw.
template <class Fn>
void for_each_index(std::size_t n, Execution ex, Fn&& fn) {
  if (ex == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

/// 0 leaves the OpenMP default in place.
void set_thread_count(int n);
int thread_count();

}  // namespace qghjm
