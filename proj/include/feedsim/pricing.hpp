#pragma once

#include <string>
#include <vector>

namespace feedsim {

/// Price paid by a sender for transmitting at rate alpha. Linear and
/// quadratic families are closed-form; custom prices are tabulated points
/// with linear interpolation. Prices start at zero and never decrease.
class PriceFunction {
 public:
  enum class Kind { linear, quadratic, custom };

  static PriceFunction linear(double c1);
  static PriceFunction quadratic(double c2);
  static PriceFunction custom(std::vector<std::pair<double, double>> table);

  Kind kind() const { return kind_; }
  double coefficient() const { return coefficient_; }

  /// Price at rate alpha (interpolated for tabulated prices).
  double operator()(double alpha) const;

  /// Marginal price; exact for linear/quadratic, secant-based for tables.
  double derivative(double alpha) const;

 private:
  PriceFunction() = default;
  Kind kind_ = Kind::linear;
  double coefficient_ = 0.0;
  std::vector<std::pair<double, double>> table_;
};

struct PricingGame {
  int n = 0;      // number of senders, >= 2
  double B = 0.0; // total feed bandwidth, > 0
};

struct BestResponse {
  double alpha = 0.0;
  double utility = 0.0;
  int iterations = 0;
};

/// A sender's payoff when the others transmit at total rate alpha_rest:
/// influence alpha_i * alpha_rest / (alpha_rest + alpha_i) minus the price.
double sender_utility(double alpha_i, double alpha_rest,
                      const PriceFunction& price);

/// Payoff when the feed total is held fixed at B:
/// alpha_i * (B - alpha_i) / B minus the price. Requires 0 <= alpha_i <= B.
double sender_utility_fixed_B(double alpha_i, double B,
                              const PriceFunction& price);

/// Price coefficient that makes the symmetric split alpha = B/n a first-order
/// optimum of the fixed-total payoff: c1 = 1 - 2/n (linear) or
/// c2 = (n - 2) / (2B) (quadratic). Requires n >= 2.
PriceFunction calibrate_price(int n, double B, PriceFunction::Kind kind);

/// Maximizes the fixed-total payoff over [0, B]. Calibrated families use
/// golden-section search; tabulated prices are scanned on a grid first since
/// no shape is assumed.
BestResponse best_response(double B, const PriceFunction& price,
                           double tol = 1e-6);

/// Residual of the first-order condition 1 - 2*alpha/B - price'(alpha) at
/// alpha; zero at a calibrated optimum.
double foc_residual(double alpha, double B, const PriceFunction& price);

}  // namespace feedsim
