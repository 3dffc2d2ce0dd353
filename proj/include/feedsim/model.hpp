#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace feedsim {

using RngEngine = std::mt19937_64;

/// Binary state of the world.
enum class WorldState : int { zero = 0, one = 1 };

inline int state_value(WorldState s) { return static_cast<int>(s); }

/// Bernoulli signal quality: a signal matches the true state with probability
/// p_hi, and the same signal value has likelihood p_lo under the other state.
/// Informativeness requires 0 < p_lo < p_hi < 1 (strict, up to a small guard).
struct SignalModel {
  double p_hi = 0.0;
  double p_lo = 0.0;

  SignalModel() = default;
  SignalModel(double hi, double lo);
};

/// Log-likelihood ratio contributed by each signal value, in nats.
struct LlrWeights {
  double lambda_hi = 0.0;  // weight of signal 1: log(p_hi / p_lo) > 0
  double lambda_lo = 0.0;  // weight of signal 0: log((1-p_hi) / (1-p_lo)) < 0
};

struct Sender {
  int id = 0;          // 1-based, contiguous within a population
  double rate = 0.0;   // Poisson transmission rate, > 0
  SignalModel signal_model;
  int signal = 0;      // realized once at construction, in {0,1}
};

/// Immutable roster of senders plus the realized state of the world.
class Population {
 public:
  Population() = default;
  Population(std::vector<Sender> senders, WorldState theta);

  const std::vector<Sender>& senders() const { return senders_; }
  WorldState theta() const { return theta_; }
  int size() const { return static_cast<int>(senders_.size()); }
  bool empty() const { return senders_.empty(); }

  /// Sum of transmission rates.
  double alpha_bar() const { return alpha_bar_; }

  /// Sender with the given 1-based id.
  const Sender& sender(int id) const;

 private:
  std::vector<Sender> senders_;
  WorldState theta_ = WorldState::one;
  double alpha_bar_ = 0.0;
};

/// Log-likelihood weights for the two signal values.
LlrWeights llr_weights(const SignalModel& model);

/// Realized log-likelihood contribution of a sender's signal.
double signal_llr(const Sender& sender);

/// Draws a signal that equals the true state with probability p_hi.
int sample_signal(const SignalModel& model, WorldState theta, RngEngine& rng);

/// Relative entropy between the signal distributions in the two states:
/// p_hi*log(p_hi/p_lo) + (1-p_hi)*log((1-p_hi)/(1-p_lo)). Always positive,
/// and equal to the expected signal llr under the true state.
double kl_binary(const SignalModel& model);

/// Builds a population with signals drawn from the given models. `models`
/// may hold one entry per sender or a single entry shared by all.
Population make_population(const std::vector<double>& rates,
                           const std::vector<SignalModel>& models,
                           WorldState theta, RngEngine& rng);

/// Builds a population with explicitly fixed signals.
Population make_population_with_signals(const std::vector<double>& rates,
                                        const std::vector<SignalModel>& models,
                                        const std::vector<int>& signals,
                                        WorldState theta);

}  // namespace feedsim
