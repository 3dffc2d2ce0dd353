#include "feedsim/model.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace feedsim {

namespace {

constexpr double kProbEps = 1e-12;

void check_probability(double p, const char* name) {
  if (!(p > kProbEps && p < 1.0 - kProbEps))
    throw std::invalid_argument(
        fmt::format("{} must lie strictly inside (0, 1), got {}", name, p));
}

}  // namespace

SignalModel::SignalModel(double hi, double lo) : p_hi(hi), p_lo(lo) {
  check_probability(hi, "p_hi");
  check_probability(lo, "p_lo");
  if (!(lo < hi - kProbEps))
    throw std::invalid_argument(
        fmt::format("signal model needs p_lo < p_hi, got p_hi={} p_lo={}", hi, lo));
}

Population::Population(std::vector<Sender> senders, WorldState theta)
    : senders_(std::move(senders)), theta_(theta) {
  for (std::size_t i = 0; i < senders_.size(); ++i) {
    const Sender& s = senders_[i];
    if (s.id != static_cast<int>(i) + 1)
      throw std::invalid_argument(
          fmt::format("sender ids must be contiguous from 1, got {} at slot {}",
                      s.id, i + 1));
    if (!(s.rate > 0.0))
      throw std::invalid_argument(
          fmt::format("sender {} needs a positive rate, got {}", s.id, s.rate));
    if (s.signal != 0 && s.signal != 1)
      throw std::invalid_argument(
          fmt::format("sender {} signal must be 0 or 1, got {}", s.id, s.signal));
    // re-validate in case the aggregate was built by hand
    SignalModel checked(s.signal_model.p_hi, s.signal_model.p_lo);
    alpha_bar_ += s.rate;
  }
}

const Sender& Population::sender(int id) const {
  if (id < 1 || id > size())
    throw std::out_of_range(fmt::format("no sender with id {}", id));
  return senders_[static_cast<std::size_t>(id) - 1];
}

LlrWeights llr_weights(const SignalModel& model) {
  SignalModel checked(model.p_hi, model.p_lo);
  return {std::log(model.p_hi / model.p_lo),
          std::log((1.0 - model.p_hi) / (1.0 - model.p_lo))};
}

double signal_llr(const Sender& sender) {
  const LlrWeights w = llr_weights(sender.signal_model);
  return sender.signal == 1 ? w.lambda_hi : w.lambda_lo;
}

int sample_signal(const SignalModel& model, WorldState theta, RngEngine& rng) {
  SignalModel checked(model.p_hi, model.p_lo);
  std::bernoulli_distribution match(model.p_hi);
  const int truth = state_value(theta);
  return match(rng) ? truth : 1 - truth;
}

double kl_binary(const SignalModel& model) {
  const LlrWeights w = llr_weights(model);
  return model.p_hi * w.lambda_hi + (1.0 - model.p_hi) * w.lambda_lo;
}

namespace {

std::vector<SignalModel> broadcast_models(const std::vector<SignalModel>& models,
                                          std::size_t n) {
  if (models.size() == n) return models;
  if (models.size() == 1) return std::vector<SignalModel>(n, models[0]);
  throw std::invalid_argument(
      fmt::format("expected 1 or {} signal models, got {}", n, models.size()));
}

}  // namespace

Population make_population(const std::vector<double>& rates,
                           const std::vector<SignalModel>& models,
                           WorldState theta, RngEngine& rng) {
  const auto per_sender = broadcast_models(models, rates.size());
  std::vector<Sender> senders;
  senders.reserve(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    Sender s;
    s.id = static_cast<int>(i) + 1;
    s.rate = rates[i];
    s.signal_model = per_sender[i];
    s.signal = sample_signal(per_sender[i], theta, rng);
    senders.push_back(s);
  }
  return Population(std::move(senders), theta);
}

Population make_population_with_signals(const std::vector<double>& rates,
                                        const std::vector<SignalModel>& models,
                                        const std::vector<int>& signals,
                                        WorldState theta) {
  if (signals.size() != rates.size())
    throw std::invalid_argument(
        fmt::format("expected {} signals, got {}", rates.size(), signals.size()));
  const auto per_sender = broadcast_models(models, rates.size());
  std::vector<Sender> senders;
  senders.reserve(rates.size());
  for (std::size_t i = 0; i < rates.size(); ++i) {
    senders.push_back(Sender{static_cast<int>(i) + 1, rates[i], per_sender[i],
                             signals[i]});
  }
  return Population(std::move(senders), theta);
}

}  // namespace feedsim
