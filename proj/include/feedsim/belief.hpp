#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feedsim/model.hpp"
#include "feedsim/poisson_feed.hpp"

namespace feedsim {

struct TrajectoryPoint {
  double time = 0.0;
  double phi = 0.0;  // log belief ratio log(mu(1)/mu(0))
};

/// Log belief ratio sampled at every arrival, starting from a flat prior.
struct BeliefTrajectory {
  std::vector<TrajectoryPoint> points;
  double final_phi = 0.0;
};

/// Long-run drift of the log belief ratio and its per-sender terms.
struct RateSummary {
  double rate = 0.0;
  std::vector<double> per_sender_terms;
};

struct MislearningResult {
  double p_wrong = 0.0;
  double p_correct = 0.0;
  double p_tie = 0.0;
};

struct MislearningEstimate {
  MislearningResult value;
  double se_wrong = 0.0;
  double se_correct = 0.0;
  double se_tie = 0.0;
  std::int64_t draws = 0;
};

/// Log belief ratio of a perfect-recall observer at the feed's horizon: each
/// sender that appears at least once contributes its signal llr exactly once.
double bayesian_phi(const Feed& feed, const Population& population);

/// Perfect-recall trajectory: phi jumps by a sender's llr at its first
/// arrival and ignores repeats.
BeliefTrajectory bayesian_trajectory(const Feed& feed,
                                     const Population& population);

/// Expected perfect-recall phi at time t given the realized signals:
/// sum_i llr_i * (1 - exp(-alpha_i * t)).
double expected_bayesian_phi(const Population& population, double t);

/// Limit of the perfect-recall phi: the sum of all signal llrs.
double bayesian_limit(const Population& population);

/// Walks the feed applying the recall rule: a message's llr is added only
/// when its source is not recalled, and every message is recorded afterward.
BeliefTrajectory simulate_nonbayesian(const Feed& feed,
                                      const Population& population, double r,
                                      RngEngine& rng);

/// Long-run drift of the imperfect-recall phi:
/// sum_i alpha_i * llr_i * (1 - alpha_i / (alpha_i + r*(alpha_bar - alpha_i))).
RateSummary nonbayesian_rate(const Population& population, double r);

/// Weight a sender's signal receives in the long-run drift:
/// alpha_i * (1 - alpha_i / (alpha_i + r*(alpha_bar - alpha_i))).
double sender_influence(int sender_id, const Population& population, double r);

/// Probability that the long-run drift points away from the truth, under a
/// uniform prior over the two states and signals drawn per sender model.
/// Exact enumeration over all signal vectors; requires n <= 20. Zero-drift
/// vectors are classified by the sign of the total signal llr (the direction
/// a bounded belief settles); p_tie is the mass left unclassified.
MislearningResult mislearning_probability(
    const std::vector<SignalModel>& signal_models,
    const std::vector<double>& rates, double r);

/// Monte Carlo version of the same quantity for large populations.
MislearningEstimate mislearning_probability_mc(
    const std::vector<SignalModel>& signal_models,
    const std::vector<double>& rates, double r, std::int64_t draws,
    RngEngine& rng);

/// Writes columns time, phi, mu1 where mu1 = 1/(1+exp(-phi)).
void write_trajectory_csv(const BeliefTrajectory& trajectory,
                          const std::string& path,
                          const std::string& header = "");

}  // namespace feedsim
