#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace gfdyn {

// Additive recurrence on the plastic number (the "R2" sequence) with a
// seed-derived Cranley-Patterson shift. Deterministic for a given seed.
class LowDiscrepancy2D {
 public:
  explicit LowDiscrepancy2D(std::uint64_t seed = 0);
  std::array<double, 2> operator()(std::size_t n) const;

 private:
  double shift_[2];
};

// Runs body(i) for i in [0, count) on up to `threads` workers. Work is
// handed out in index order; callers write only to slot i so results do
// not depend on the worker count.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

unsigned resolve_threads(unsigned requested);

// Least squares slope and intercept of y against x.
struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double rms_residual = 0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gfdyn
