#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "feedsim/model.hpp"

namespace feedsim {

/// Per-size feed budget B_n together with the nominal mean sender rate, so
/// that the nominal total rate at size n is n * alpha_bar.
struct BandwidthSchedule {
  std::function<double(double)> bandwidth;
  double alpha_bar = 1.0;
};

/// Generates a population of any requested size; alpha_bar is the limiting
/// mean rate of the generated senders.
struct PopulationSequence {
  std::function<Population(int)> generate;
  double alpha_bar = 1.0;
};

struct DiagnosticRow {
  int n = 0;
  double bandwidth = 0.0;       // B_n
  double keep_prob = 0.0;       // p_n = B_n / alpha_bar_n
  double bayes_rate = 0.0;      // per-capita, thinned, at the row's horizon
  double nonbayes_rate = 0.0;   // per-capita, thinned
  std::string verdict;
};

struct DiagnosticTable {
  std::vector<DiagnosticRow> rows;
  std::string verdict;
};

/// Expected perfect-recall phi at time t with signals averaged out under the
/// true state: sum_i kl_i * (1 - exp(-alpha_i * t)).
double expected_bayesian_phi_marginal(const Population& population, double t);

/// Thinning probability p_n = B_n / (n * alpha_bar); requires B_n below the
/// nominal total rate.
double thinning_prob(const BandwidthSchedule& schedule, int n);

/// Population with every rate scaled so the total equals exactly B; requires
/// B below the population's total rate. Returns the scaled population and
/// the keep probability used.
std::pair<Population, double> thin_population(const Population& population,
                                              double B);

/// Per-capita expected perfect-recall phi at time t, signals averaged out.
double bayesian_rate_per_capita(const Population& population, double t);

/// Limiting per-capita information of the perfect-recall observer:
/// (1/n) sum_i kl_i.
double bayesian_benchmark(const Population& population);

/// Per-capita rate-weighted information (1/n) sum_i alpha_i * kl_i, the
/// drift scale of the imperfect-recall observer.
double nonbayesian_benchmark(const Population& population);

/// Signal-averaged long-run drift under imperfect recall:
/// sum_i alpha_i * kl_i * (1 - alpha_i / (alpha_i + r*(alpha_bar - alpha_i))).
double nonbayesian_rate_marginal(const Population& population, double r);

/// Evaluates the thinned learning rates along a grid of population sizes and
/// classifies the budget schedule. The total thinned drift p_n * sum_i
/// alpha_i * kl_i must diverge for learning: successive ratios at or above
/// `divergence_ratio` give verdict "learning" (with a sub-exponential note
/// when the per-capita rate still vanishes); otherwise "stalled".
DiagnosticTable bandwidth_learning_diagnostic(
    const PopulationSequence& sequence, const BandwidthSchedule& schedule,
    const std::vector<int>& n_grid, double divergence_ratio = 1.5);

/// Writes columns n, B_n, p_n, bayes_rate, nonbayes_rate, verdict.
void write_diagnostic_csv(const DiagnosticTable& table, const std::string& path,
                          const std::string& header = "");

/// Sequence of identical-sender populations (exact, no sampling).
PopulationSequence homogeneous_sequence(double alpha, const SignalModel& model,
                                        WorldState theta = WorldState::one);

/// Sequence of populations with rates and signal qualities drawn uniformly
/// from the given ranges, deterministically per size from `seed`.
PopulationSequence iid_sequence(double rate_lo, double rate_hi, double p_hi_lo,
                                double p_hi_hi, double p_lo_lo, double p_lo_hi,
                                std::uint64_t seed,
                                WorldState theta = WorldState::one);

BandwidthSchedule constant_bandwidth(double B, double alpha_bar);
BandwidthSchedule linear_bandwidth(double B_bar, double alpha_bar);
BandwidthSchedule sqrt_bandwidth(double scale, double alpha_bar);

}  // namespace feedsim
