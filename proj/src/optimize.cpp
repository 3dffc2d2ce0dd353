#include "feedsim/optimize.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace feedsim {

namespace {

// Classic golden-section bracket shrink; evaluates interior points only.
GoldenResult golden(const std::function<double(double)>& f, double lo,
                    double hi, double x_tol, int max_iterations, bool maximize) {
  if (!(hi >= lo))
    throw std::invalid_argument(
        fmt::format("bad search bracket [{}, {}]", lo, hi));
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;  // 0.618...
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while (b - a > x_tol && it < max_iterations) {
    const bool pick_left = maximize ? fc > fd : fc < fd;
    if (pick_left) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  const double x = 0.5 * (a + b);
  return {x, f(x), it};
}

}  // namespace

GoldenResult golden_section_max(const std::function<double(double)>& f,
                                double lo, double hi, double x_tol,
                                int max_iterations) {
  return golden(f, lo, hi, x_tol, max_iterations, true);
}

GoldenResult golden_section_min(const std::function<double(double)>& f,
                                double lo, double hi, double x_tol,
                                int max_iterations) {
  return golden(f, lo, hi, x_tol, max_iterations, false);
}

}  // namespace feedsim
