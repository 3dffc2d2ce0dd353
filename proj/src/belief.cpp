#include "feedsim/belief.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "feedsim/io.hpp"
#include "feedsim/recall.hpp"

namespace feedsim {

namespace {

std::vector<double> per_sender_llrs(const Population& population) {
  std::vector<double> llrs;
  llrs.reserve(population.senders().size());
  for (const Sender& s : population.senders()) llrs.push_back(signal_llr(s));
  return llrs;
}

double influence_factor(double alpha_i, double alpha_bar, double r) {
  // 1 - asymptotic recall: the long-run share of a sender's messages that
  // still move the belief.
  return 1.0 - alpha_i / (alpha_i + r * (alpha_bar - alpha_i));
}

void check_interference(double r) {
  if (r < 0.0)
    throw std::domain_error(fmt::format("interference must be >= 0, got {}", r));
}

}  // namespace

double bayesian_phi(const Feed& feed, const Population& population) {
  const auto llrs = per_sender_llrs(population);
  std::vector<bool> seen(llrs.size(), false);
  double phi = 0.0;
  for (const Message& m : feed.messages) {
    const std::size_t idx = static_cast<std::size_t>(m.source_id) - 1;
    if (idx >= seen.size())
      throw std::invalid_argument(
          fmt::format("feed references unknown sender {}", m.source_id));
    if (!seen[idx]) {
      seen[idx] = true;
      phi += llrs[idx];
    }
  }
  return phi;
}

BeliefTrajectory bayesian_trajectory(const Feed& feed,
                                     const Population& population) {
  const auto llrs = per_sender_llrs(population);
  std::vector<bool> seen(llrs.size(), false);
  BeliefTrajectory traj;
  traj.points.reserve(feed.messages.size());
  double phi = 0.0;
  for (const Message& m : feed.messages) {
    const std::size_t idx = static_cast<std::size_t>(m.source_id) - 1;
    if (idx >= seen.size())
      throw std::invalid_argument(
          fmt::format("feed references unknown sender {}", m.source_id));
    if (!seen[idx]) {
      seen[idx] = true;
      phi += llrs[idx];
    }
    traj.points.push_back({m.time, phi});
  }
  traj.final_phi = phi;
  return traj;
}

double expected_bayesian_phi(const Population& population, double t) {
  if (t < 0.0)
    throw std::domain_error(fmt::format("time must be >= 0, got {}", t));
  double total = 0.0;
  for (const Sender& s : population.senders())
    total += signal_llr(s) * (1.0 - std::exp(-s.rate * t));
  return total;
}

double bayesian_limit(const Population& population) {
  double total = 0.0;
  for (const Sender& s : population.senders()) total += signal_llr(s);
  return total;
}

BeliefTrajectory simulate_nonbayesian(const Feed& feed,
                                      const Population& population, double r,
                                      RngEngine& rng) {
  check_interference(r);
  const auto llrs = per_sender_llrs(population);
  RecallState state(population.size());
  BeliefTrajectory traj;
  traj.points.reserve(feed.messages.size());
  double phi = 0.0;
  for (const Message& m : feed.messages) {
    const std::size_t idx = static_cast<std::size_t>(m.source_id) - 1;
    if (idx >= llrs.size())
      throw std::invalid_argument(
          fmt::format("feed references unknown sender {}", m.source_id));
    if (!sample_recall(state, m.source_id, r, rng)) phi += llrs[idx];
    state = record_message(state, m.source_id);
    traj.points.push_back({m.time, phi});
  }
  traj.final_phi = phi;
  return traj;
}

RateSummary nonbayesian_rate(const Population& population, double r) {
  check_interference(r);
  RateSummary summary;
  const double alpha_bar = population.alpha_bar();
  summary.per_sender_terms.reserve(population.senders().size());
  for (const Sender& s : population.senders()) {
    const double term =
        s.rate * signal_llr(s) * influence_factor(s.rate, alpha_bar, r);
    summary.per_sender_terms.push_back(term);
    summary.rate += term;
  }
  return summary;
}

double sender_influence(int sender_id, const Population& population, double r) {
  check_interference(r);
  const Sender& s = population.sender(sender_id);
  return s.rate * influence_factor(s.rate, population.alpha_bar(), r);
}

namespace {

struct MislearningTerms {
  std::vector<double> lambda_hi;
  std::vector<double> lambda_lo;
  std::vector<double> weight;  // alpha_i * (1 - asymptotic recall)
  std::vector<double> p_match; // probability the signal matches the state
};

MislearningTerms prepare_terms(const std::vector<SignalModel>& signal_models,
                               const std::vector<double>& rates, double r) {
  if (signal_models.size() != rates.size())
    throw std::invalid_argument(
        fmt::format("expected {} signal models, got {}", rates.size(),
                    signal_models.size()));
  if (rates.empty())
    throw std::invalid_argument("mislearning needs at least one sender");
  check_interference(r);
  double alpha_bar = 0.0;
  for (double a : rates) {
    if (!(a > 0.0))
      throw std::domain_error(fmt::format("rates must be > 0, got {}", a));
    alpha_bar += a;
  }
  MislearningTerms t;
  const std::size_t n = rates.size();
  t.lambda_hi.resize(n);
  t.lambda_lo.resize(n);
  t.weight.resize(n);
  t.p_match.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const LlrWeights w = llr_weights(signal_models[i]);
    t.lambda_hi[i] = w.lambda_hi;
    t.lambda_lo[i] = w.lambda_lo;
    t.weight[i] = rates[i] * influence_factor(rates[i], alpha_bar, r);
    t.p_match[i] = signal_models[i].p_hi;
  }
  return t;
}

// Direction the belief settles for one signal vector: the sign of the
// long-run drift, falling back to the sign of the total llr when the drift
// vanishes (a lone sender, or exactly cancelling weights). 0 means tied.
int settle_direction(double drift, double llr_sum) {
  if (drift > 0.0) return 1;
  if (drift < 0.0) return -1;
  if (llr_sum > 0.0) return 1;
  if (llr_sum < 0.0) return -1;
  return 0;
}

}  // namespace

MislearningResult mislearning_probability(
    const std::vector<SignalModel>& signal_models,
    const std::vector<double>& rates, double r) {
  const std::size_t n = rates.size();
  if (n > 20)
    throw std::invalid_argument(fmt::format(
        "exact enumeration supports at most 20 senders, got {}; use the Monte "
        "Carlo version",
        n));
  const MislearningTerms t = prepare_terms(signal_models, rates, r);

  MislearningResult result;
  const std::uint64_t vectors = 1ull << n;
  for (int truth = 0; truth <= 1; ++truth) {
    for (std::uint64_t mask = 0; mask < vectors; ++mask) {
      double drift = 0.0, llr_sum = 0.0, prob = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const int signal = (mask >> i) & 1u;
        const double llr = signal == 1 ? t.lambda_hi[i] : t.lambda_lo[i];
        drift += t.weight[i] * llr;
        llr_sum += llr;
        prob *= signal == truth ? t.p_match[i] : 1.0 - t.p_match[i];
      }
      const int dir = settle_direction(drift, llr_sum);
      const int truth_dir = truth == 1 ? 1 : -1;
      if (dir == 0)
        result.p_tie += 0.5 * prob;
      else if (dir == truth_dir)
        result.p_correct += 0.5 * prob;
      else
        result.p_wrong += 0.5 * prob;
    }
  }
  return result;
}

MislearningEstimate mislearning_probability_mc(
    const std::vector<SignalModel>& signal_models,
    const std::vector<double>& rates, double r, std::int64_t draws,
    RngEngine& rng) {
  if (draws <= 0)
    throw std::invalid_argument(fmt::format("draw count must be > 0, got {}", draws));
  const MislearningTerms t = prepare_terms(signal_models, rates, r);
  const std::size_t n = rates.size();

  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::int64_t wrong = 0, correct = 0, tie = 0;
  for (std::int64_t d = 0; d < draws; ++d) {
    const int truth = coin(rng) ? 1 : 0;
    double drift = 0.0, llr_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int signal = unif(rng) < t.p_match[i] ? truth : 1 - truth;
      const double llr = signal == 1 ? t.lambda_hi[i] : t.lambda_lo[i];
      drift += t.weight[i] * llr;
      llr_sum += llr;
    }
    const int dir = settle_direction(drift, llr_sum);
    const int truth_dir = truth == 1 ? 1 : -1;
    if (dir == 0)
      ++tie;
    else if (dir == truth_dir)
      ++correct;
    else
      ++wrong;
  }

  MislearningEstimate est;
  est.draws = draws;
  const double m = static_cast<double>(draws);
  est.value.p_wrong = wrong / m;
  est.value.p_correct = correct / m;
  est.value.p_tie = tie / m;
  auto se = [m](double p) { return std::sqrt(p * (1.0 - p) / m); };
  est.se_wrong = se(est.value.p_wrong);
  est.se_correct = se(est.value.p_correct);
  est.se_tie = se(est.value.p_tie);
  return est;
}

void write_trajectory_csv(const BeliefTrajectory& trajectory,
                          const std::string& path, const std::string& header) {
  std::string out;
  if (!header.empty()) out += header + "\n";
  out += "time,phi,mu1\n";
  for (const TrajectoryPoint& p : trajectory.points) {
    const double mu1 = 1.0 / (1.0 + std::exp(-p.phi));
    out += fmt::format("{},{},{}\n", format_number(p.time),
                       format_number(p.phi), format_number(mu1));
  }
  write_text_file(path, out);
}

}  // namespace feedsim
