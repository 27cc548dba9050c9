#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace khora {

// Structural-validation failures (bad complexes, broken diagrams, malformed
// fixtures). The CLI maps these to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Refusals on resource grounds (budget exceeded). CLI exit code 2.
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Worker count used by parallel_for. Resolution order: set_thread_count()
// if called with n >= 1, else the KHORA_THREADS environment variable,
// else std::thread::hardware_concurrency().
int thread_count();
void set_thread_count(int n);

// Runs fn(0..n-1) on the resolved number of workers. Blocks until done.
// Callers get determinism by writing results into index-addressed slots;
// the iteration order itself is unspecified.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// fmt-free %zu-safe helper used all over the error paths.
std::string cat();
template <class T, class... Ts>
std::string cat(const T& t, const Ts&... ts) {
  if constexpr (std::is_arithmetic_v<T>)
    return std::to_string(t) + cat(ts...);
  else
    return std::string(t) + cat(ts...);
}

}  // namespace khora
