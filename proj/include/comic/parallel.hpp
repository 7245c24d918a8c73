#pragma once

#include <cstddef>
#include <functional>

namespace comic {

/// Worker cap: set_worker_count() if called, else COMIC_THREADS, else the
/// hardware concurrency. Always >= 1.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs fn(0..n-1) across workers. Each index is handled by exactly one
/// worker, so results written to per-index slots are order-independent.
/// Nested calls run serially. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace comic
