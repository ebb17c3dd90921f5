#include "plpot/parallel.hpp"

#include <atomic>
#include <cstdlib>

namespace plpot {

namespace {

int default_threads() {
  if (const char* env = std::getenv("PLPOT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

std::atomic<int> g_threads{0};  // 0 = not yet resolved

}  // namespace

int thread_count() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n < 1) {
    n = default_threads();
    g_threads.store(n, std::memory_order_relaxed);
  }
  return n;
}

void set_thread_count(int n) {
  g_threads.store(n >= 1 ? n : default_threads(), std::memory_order_relaxed);
}

void parallel_chunks(std::size_t n,
                     const std::function<void(int, std::size_t, std::size_t)>& fn) {
  const int workers = thread_count();
  if (workers <= 1 || n <= 1) {
    fn(0, 0, n);
    return;
  }
  const std::size_t w = static_cast<std::size_t>(workers);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t c = 0; c < w; ++c) {
    const std::size_t b = n * c / w;
    const std::size_t e = n * (c + 1) / w;
    pool.emplace_back([&fn, c, b, e] { fn(static_cast<int>(c), b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace plpot
