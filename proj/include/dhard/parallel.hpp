#pragma once

#include <cstddef>
#include <functional>

namespace dhard {

/// Runs body(index, worker) for every index in [0, count) on up to `workers`
/// threads. Indices are handed out in increasing order; `worker` is in
/// [0, workers) and identifies per-thread scratch state. The first exception
/// thrown by a body is rethrown after all threads join.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t, unsigned)> &body);

/// Effective worker count: 0 means hardware concurrency.
unsigned resolve_workers(unsigned requested);

} // namespace dhard
