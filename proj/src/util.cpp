#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include "sheq/parallel.hpp"

namespace sheq {

unsigned worker_count() {
  if (const char* env = std::getenv("SHEQ_THREADS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<unsigned>(n);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace sheq
