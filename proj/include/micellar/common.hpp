#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace micellar {

// configuration / input problems -> CLI exit 2
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// runtime invariant violations (positivity, NaN, mismatched lattices) -> CLI exit 3
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& msg) : std::runtime_error(msg) {}
};

// grid cannot resolve the equilibrium density / spectrum
class ResolutionError : public InvariantError {
 public:
  explicit ResolutionError(const std::string& msg) : InvariantError(msg) {}
};

// explicit substep violated its Courant bound
class StepRejection : public InvariantError {
 public:
  StepRejection(const std::string& msg, double suggested)
      : InvariantError(msg), suggested_dt(suggested) {}
  double suggested_dt;
};

// worker cap from MICELLAR_THREADS (>=1); defaults to hardware concurrency
int worker_count();

// static-partition parallel map over [0, n); body(i) must be independent per i.
// Serial when worker_count()==1 or n small. Reductions stay serial elsewhere so
// results are bitwise reproducible for any thread count.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

}  // namespace micellar
