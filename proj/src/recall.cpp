#include "feedsim/recall.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace feedsim {

RecallState::RecallState(int num_senders) {
  if (num_senders < 0)
    throw std::invalid_argument(
        fmt::format("sender count must be >= 0, got {}", num_senders));
  counts_.assign(static_cast<std::size_t>(num_senders), 0);
}

std::int64_t RecallState::count_for(int source_id) const {
  if (source_id < 1 || static_cast<std::size_t>(source_id) > counts_.size())
    return 0;
  return counts_[static_cast<std::size_t>(source_id) - 1];
}

RecallState RecallState::recorded(int source_id) const {
  if (source_id < 1)
    throw std::invalid_argument(
        fmt::format("source id must be >= 1, got {}", source_id));
  RecallState next(*this);
  if (static_cast<std::size_t>(source_id) > next.counts_.size())
    next.counts_.resize(static_cast<std::size_t>(source_id), 0);
  ++next.counts_[static_cast<std::size_t>(source_id) - 1];
  ++next.total_;
  return next;
}

double recall_probability(double m, double t_other, double r) {
  if (m < 0.0 || t_other < 0.0)
    throw std::domain_error(
        fmt::format("message counts must be >= 0, got m={} t_other={}", m, t_other));
  if (r < 0.0)
    throw std::domain_error(fmt::format("interference must be >= 0, got {}", r));
  const double denom = m + r * t_other;
  if (denom == 0.0) return 0.0;  // nothing seen from anyone yet
  return m / denom;
}

double asymptotic_recall(double alpha_i, double alpha_bar, double r) {
  if (!(alpha_i > 0.0))
    throw std::domain_error(
        fmt::format("sender rate must be > 0, got {}", alpha_i));
  if (alpha_i > alpha_bar)
    throw std::domain_error(fmt::format(
        "sender rate {} exceeds the total rate {}", alpha_i, alpha_bar));
  if (r < 0.0)
    throw std::domain_error(fmt::format("interference must be >= 0, got {}", r));
  return alpha_i / (alpha_i + r * (alpha_bar - alpha_i));
}

bool sample_recall(const RecallState& state, int source_id, double r,
                   RngEngine& rng) {
  const double p = recall_probability(
      static_cast<double>(state.count_for(source_id)),
      static_cast<double>(state.total() - state.count_for(source_id)), r);
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  std::bernoulli_distribution recalled(p);
  return recalled(rng);
}

RecallState record_message(const RecallState& state, int source_id) {
  return state.recorded(source_id);
}

}  // namespace feedsim
