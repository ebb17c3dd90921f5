#pragma once

#include <mutex>

namespace plpot {

// FFTW's planner is not thread safe; every translation unit that creates or
// destroys plans must serialize on this one lock.
inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace plpot
