#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace curvemax {

// Error taxonomy. Every failure surfaced by the library is one of these.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ReachError : std::domain_error {
  using std::domain_error::domain_error;
};
struct GridMismatchError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsupportedError : std::logic_error {
  using std::logic_error::logic_error;
};
struct DataError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Closed interval [lo, hi]; lo == hi is a single point.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double length() const { return hi - lo; }
};

/// Process-wide worker count used by parallel_for. Defaults to 1.
void set_thread_count(unsigned n);
[[nodiscard]] unsigned thread_count();

/// Shortest round-trip decimal form, locale independent.
[[nodiscard]] std::string format_number(double v);

/// Runs body(begin, end) over a static partition of [0, n). Chunk boundaries
/// depend only on n and the thread count, and callers write disjoint output
/// slots, so results never depend on scheduling.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace curvemax
