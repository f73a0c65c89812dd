#include "micellar/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace micellar {

int worker_count() {
  static const int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("MICELLAR_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && v >= 1) hw = static_cast<int>(std::min<long>(v, 256));
    }
    return hw;
  }();
  return n;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body) {
  const int nw = worker_count();
  if (nw <= 1 || n < 2 * nw) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (int w = 0; w < nw; ++w) {
    // fixed static partition: chunk boundaries depend only on (n, nw)
    const std::int64_t lo = n * w / nw, hi = n * (w + 1) / nw;
    pool.emplace_back([lo, hi, &body] {
      for (std::int64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace micellar
