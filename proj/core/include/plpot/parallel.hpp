#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace plpot {

// Global worker count for coarse-grained sweeps (potential center sweeps,
// parameter grids, seeded families). Solves themselves run single threaded.
int thread_count();
void set_thread_count(int n);  // n < 1 resets to the PLPOT_THREADS/env default

// Runs fn(chunk_index, begin, end) over a static partition of [0, n) into
// one chunk per worker. Chunk boundaries depend only on n and the worker
// count, never on scheduling.
void parallel_chunks(std::size_t n,
                     const std::function<void(int, std::size_t, std::size_t)>& fn);

// Deterministic map-reduce: results are combined in chunk order regardless
// of which thread finished first.
template <class T, class Map, class Combine>
T parallel_reduce(std::size_t n, T init, Map map_chunk, Combine combine) {
  const int workers = thread_count();
  std::vector<T> partial(static_cast<std::size_t>(workers), init);
  parallel_chunks(n, [&](int c, std::size_t b, std::size_t e) {
    partial[static_cast<std::size_t>(c)] = map_chunk(b, e);
  });
  T acc = init;
  for (const T& p : partial) acc = combine(acc, p);
  return acc;
}

}  // namespace plpot
