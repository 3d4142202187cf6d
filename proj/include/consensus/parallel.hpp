#pragma once

#include <cstddef>
#include <functional>

namespace consensus::parallel {

// Worker cap: CONSENSUS_THREADS env var if set, else hardware concurrency.
// set_threads() overrides both (tests use it to prove bitwise thread-independence).
int thread_count();
void set_threads(int n);

// Static row partition across workers. `fn(i)` must write only to slots owned
// by row i, so the result is bitwise independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace consensus::parallel
