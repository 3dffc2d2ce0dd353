#include "feedsim/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "feedsim/optimize.hpp"

namespace feedsim {

PriceFunction PriceFunction::linear(double c1) {
  if (c1 < 0.0)
    throw std::invalid_argument(
        fmt::format("linear price coefficient must be >= 0, got {}", c1));
  PriceFunction p;
  p.kind_ = Kind::linear;
  p.coefficient_ = c1;
  return p;
}

PriceFunction PriceFunction::quadratic(double c2) {
  if (c2 < 0.0)
    throw std::invalid_argument(
        fmt::format("quadratic price coefficient must be >= 0, got {}", c2));
  PriceFunction p;
  p.kind_ = Kind::quadratic;
  p.coefficient_ = c2;
  return p;
}

PriceFunction PriceFunction::custom(
    std::vector<std::pair<double, double>> table) {
  if (table.size() < 2)
    throw std::invalid_argument("a tabulated price needs at least two points");
  std::sort(table.begin(), table.end());
  if (table.front().first != 0.0 || table.front().second != 0.0)
    throw std::invalid_argument("a tabulated price must start at (0, 0)");
  for (std::size_t i = 1; i < table.size(); ++i) {
    if (table[i].first <= table[i - 1].first)
      throw std::invalid_argument("tabulated rates must strictly increase");
    if (table[i].second < table[i - 1].second)
      throw std::invalid_argument("a price must be nondecreasing");
  }
  PriceFunction p;
  p.kind_ = Kind::custom;
  p.table_ = std::move(table);
  return p;
}

double PriceFunction::operator()(double alpha) const {
  if (alpha < 0.0)
    throw std::domain_error(fmt::format("rate must be >= 0, got {}", alpha));
  switch (kind_) {
    case Kind::linear:
      return coefficient_ * alpha;
    case Kind::quadratic:
      return coefficient_ * alpha * alpha;
    case Kind::custom: {
      if (alpha <= table_.front().first) return table_.front().second;
      if (alpha >= table_.back().first) return table_.back().second;
      auto hi = std::upper_bound(
          table_.begin(), table_.end(), std::make_pair(alpha, 0.0),
          [](const auto& a, const auto& b) { return a.first < b.first; });
      auto lo = hi - 1;
      const double w = (alpha - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return 0.0;
}

double PriceFunction::derivative(double alpha) const {
  switch (kind_) {
    case Kind::linear:
      return coefficient_;
    case Kind::quadratic:
      return 2.0 * coefficient_ * alpha;
    case Kind::custom: {
      const double h = 1e-6 * std::max(1.0, std::abs(alpha));
      const double lo = std::max(0.0, alpha - h);
      return ((*this)(alpha + h) - (*this)(lo)) / (alpha + h - lo);
    }
  }
  return 0.0;
}

double sender_utility(double alpha_i, double alpha_rest,
                      const PriceFunction& price) {
  if (alpha_i < 0.0 || alpha_rest < 0.0)
    throw std::domain_error(
        fmt::format("rates must be >= 0, got alpha={} rest={}", alpha_i,
                    alpha_rest));
  if (alpha_i == 0.0 && alpha_rest == 0.0)
    throw std::domain_error("utility is undefined with no traffic at all");
  const double influence = alpha_i * alpha_rest / (alpha_rest + alpha_i);
  return influence - price(alpha_i);
}

double sender_utility_fixed_B(double alpha_i, double B,
                              const PriceFunction& price) {
  if (!(B > 0.0))
    throw std::domain_error(fmt::format("bandwidth must be > 0, got {}", B));
  if (alpha_i < 0.0 || alpha_i > B)
    throw std::domain_error(
        fmt::format("rate must lie in [0, {}], got {}", B, alpha_i));
  return alpha_i * (B - alpha_i) / B - price(alpha_i);
}

PriceFunction calibrate_price(int n, double B, PriceFunction::Kind kind) {
  if (n < 2)
    throw std::invalid_argument(
        fmt::format("calibration needs at least two senders, got {}", n));
  if (!(B > 0.0))
    throw std::domain_error(fmt::format("bandwidth must be > 0, got {}", B));
  switch (kind) {
    case PriceFunction::Kind::linear:
      return PriceFunction::linear(1.0 - 2.0 / n);
    case PriceFunction::Kind::quadratic:
      return PriceFunction::quadratic((n - 2.0) / (2.0 * B));
    case PriceFunction::Kind::custom:
      throw std::invalid_argument("only linear and quadratic prices calibrate");
  }
  throw std::invalid_argument("unknown price kind");
}

BestResponse best_response(double B, const PriceFunction& price, double tol) {
  if (!(B > 0.0))
    throw std::domain_error(fmt::format("bandwidth must be > 0, got {}", B));
  if (!(tol > 0.0))
    throw std::domain_error(fmt::format("tolerance must be > 0, got {}", tol));
  auto utility = [&](double a) { return sender_utility_fixed_B(a, B, price); };

  double lo = 0.0, hi = B;
  int scanned = 0;
  if (price.kind() == PriceFunction::Kind::custom) {
    // no shape assumed: locate the best grid cell, then refine inside it
    const int cells = 512;
    int best = 0;
    double best_u = utility(0.0);
    for (int k = 1; k <= cells; ++k) {
      const double u = utility(B * k / cells);
      ++scanned;
      if (u > best_u) {
        best_u = u;
        best = k;
      }
    }
    lo = B * std::max(0, best - 1) / cells;
    hi = B * std::min(cells, best + 1) / cells;
  }
  const GoldenResult g = golden_section_max(utility, lo, hi, tol);
  return {g.x, g.fx, g.iterations + scanned};
}

double foc_residual(double alpha, double B, const PriceFunction& price) {
  if (!(B > 0.0))
    throw std::domain_error(fmt::format("bandwidth must be > 0, got {}", B));
  return 1.0 - 2.0 * alpha / B - price.derivative(alpha);
}

}  // namespace feedsim
