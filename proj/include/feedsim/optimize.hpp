#pragma once

#include <functional>

namespace feedsim {

struct GoldenResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Stops when the bracket width falls below x_tol.
GoldenResult golden_section_max(const std::function<double(double)>& f,
                                double lo, double hi, double x_tol = 1e-10,
                                int max_iterations = 500);

/// Same search for a minimum.
GoldenResult golden_section_min(const std::function<double(double)>& f,
                                double lo, double hi, double x_tol = 1e-10,
                                int max_iterations = 500);

}  // namespace feedsim
