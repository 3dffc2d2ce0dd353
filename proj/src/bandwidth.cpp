#include "feedsim/bandwidth.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "feedsim/io.hpp"
#include "feedsim/parallel.hpp"

namespace feedsim {

double expected_bayesian_phi_marginal(const Population& population, double t) {
  if (t < 0.0)
    throw std::domain_error(fmt::format("time must be >= 0, got {}", t));
  double total = 0.0;
  for (const Sender& s : population.senders())
    total += kl_binary(s.signal_model) * (1.0 - std::exp(-s.rate * t));
  return total;
}

double thinning_prob(const BandwidthSchedule& schedule, int n) {
  if (n < 1)
    throw std::invalid_argument(fmt::format("population size must be >= 1, got {}", n));
  const double B = schedule.bandwidth(static_cast<double>(n));
  const double total_rate = n * schedule.alpha_bar;
  if (!(B > 0.0))
    throw std::domain_error(fmt::format("bandwidth must be > 0, got {}", B));
  if (!(B < total_rate))
    throw std::domain_error(
        fmt::format("bandwidth {} must stay below the total rate {}", B,
                    total_rate));
  return B / total_rate;
}

std::pair<Population, double> thin_population(const Population& population,
                                              double B) {
  const double total = population.alpha_bar();
  if (!(B > 0.0))
    throw std::domain_error(fmt::format("bandwidth must be > 0, got {}", B));
  if (!(B < total))
    throw std::domain_error(fmt::format(
        "bandwidth {} must stay below the population rate {}", B, total));
  const double p = B / total;
  std::vector<Sender> scaled = population.senders();
  for (Sender& s : scaled) s.rate *= p;
  return {Population(std::move(scaled), population.theta()), p};
}

double bayesian_rate_per_capita(const Population& population, double t) {
  if (population.empty())
    throw std::invalid_argument("per-capita rate needs a nonempty population");
  return expected_bayesian_phi_marginal(population, t) / population.size();
}

double bayesian_benchmark(const Population& population) {
  if (population.empty())
    throw std::invalid_argument("benchmark needs a nonempty population");
  double total = 0.0;
  for (const Sender& s : population.senders()) total += kl_binary(s.signal_model);
  return total / population.size();
}

double nonbayesian_benchmark(const Population& population) {
  if (population.empty())
    throw std::invalid_argument("benchmark needs a nonempty population");
  double total = 0.0;
  for (const Sender& s : population.senders())
    total += s.rate * kl_binary(s.signal_model);
  return total / population.size();
}

double nonbayesian_rate_marginal(const Population& population, double r) {
  if (r < 0.0)
    throw std::domain_error(fmt::format("interference must be >= 0, got {}", r));
  const double alpha_bar = population.alpha_bar();
  double total = 0.0;
  for (const Sender& s : population.senders()) {
    const double keep = 1.0 - s.rate / (s.rate + r * (alpha_bar - s.rate));
    total += s.rate * kl_binary(s.signal_model) * keep;
  }
  return total;
}

DiagnosticTable bandwidth_learning_diagnostic(
    const PopulationSequence& sequence, const BandwidthSchedule& schedule,
    const std::vector<int>& n_grid, double divergence_ratio) {
  if (n_grid.size() < 2)
    throw std::invalid_argument("the diagnostic needs at least two grid sizes");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("grid sizes must strictly increase");

  DiagnosticTable table;
  table.rows.resize(n_grid.size());
  std::vector<double> total_rate(n_grid.size(), 0.0);
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    const int n = n_grid[i];
    const Population pop = sequence.generate(n);
    if (pop.size() != n)
      throw std::runtime_error(
          fmt::format("sequence produced {} senders, expected {}", pop.size(), n));
    const double B = schedule.bandwidth(static_cast<double>(n));
    auto [thinned, p] = thin_population(pop, B);
    // horizon that grows just fast enough for the thinned streams to saturate
    const double t = (n / B) * std::log(n + 1.0);
    DiagnosticRow& row = table.rows[i];
    row.n = n;
    row.bandwidth = B;
    row.keep_prob = p;
    row.bayes_rate = bayesian_rate_per_capita(thinned, t);
    row.nonbayes_rate = p * nonbayesian_benchmark(pop);
    total_rate[i] = row.nonbayes_rate * n;
  }

  bool diverges = true;
  for (std::size_t i = 1; i < total_rate.size(); ++i)
    if (!(total_rate[i] >= divergence_ratio * total_rate[i - 1]))
      diverges = false;
  if (!diverges) {
    table.verdict = "stalled";
  } else {
    // per-capita rate vanishing means the budget grows sublinearly
    const double first = table.rows.front().nonbayes_rate;
    const double last = table.rows.back().nonbayes_rate;
    table.verdict =
        last >= 0.5 * first ? "learning" : "learning (sub-exponential in n)";
  }
  for (DiagnosticRow& row : table.rows) row.verdict = table.verdict;
  return table;
}

void write_diagnostic_csv(const DiagnosticTable& table, const std::string& path,
                          const std::string& header) {
  std::string out;
  if (!header.empty()) out += header + "\n";
  out += "n,B_n,p_n,bayes_rate,nonbayes_rate,verdict\n";
  for (const DiagnosticRow& row : table.rows)
    out += fmt::format("{},{},{},{},{},{}\n", row.n,
                       format_number(row.bandwidth),
                       format_number(row.keep_prob),
                       format_number(row.bayes_rate),
                       format_number(row.nonbayes_rate), row.verdict);
  write_text_file(path, out);
}

PopulationSequence homogeneous_sequence(double alpha, const SignalModel& model,
                                        WorldState theta) {
  SignalModel checked(model.p_hi, model.p_lo);
  PopulationSequence seq;
  seq.alpha_bar = alpha;
  seq.generate = [alpha, checked, theta](int n) {
    std::vector<Sender> senders;
    senders.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
      senders.push_back(Sender{i, alpha, checked, state_value(theta)});
    return Population(std::move(senders), theta);
  };
  return seq;
}

PopulationSequence iid_sequence(double rate_lo, double rate_hi, double p_hi_lo,
                                double p_hi_hi, double p_lo_lo, double p_lo_hi,
                                std::uint64_t seed, WorldState theta) {
  if (!(rate_lo > 0.0) || !(rate_hi >= rate_lo))
    throw std::invalid_argument(
        fmt::format("bad rate range [{}, {}]", rate_lo, rate_hi));
  if (!(p_lo_hi < p_hi_lo))
    throw std::invalid_argument(
        "p_lo range must sit strictly below the p_hi range");
  PopulationSequence seq;
  seq.alpha_bar = 0.5 * (rate_lo + rate_hi);
  seq.generate = [=](int n) {
    RngEngine rng(mix_seed(seed, static_cast<std::uint64_t>(n)));
    std::uniform_real_distribution<double> rate(rate_lo, rate_hi);
    std::uniform_real_distribution<double> hi(p_hi_lo, p_hi_hi);
    std::uniform_real_distribution<double> lo(p_lo_lo, p_lo_hi);
    std::vector<double> rates;
    std::vector<SignalModel> models;
    rates.reserve(static_cast<std::size_t>(n));
    models.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      rates.push_back(rate(rng));
      models.emplace_back(hi(rng), lo(rng));
    }
    return make_population(rates, models, theta, rng);
  };
  return seq;
}

BandwidthSchedule constant_bandwidth(double B, double alpha_bar) {
  return {[B](double) { return B; }, alpha_bar};
}

BandwidthSchedule linear_bandwidth(double B_bar, double alpha_bar) {
  return {[B_bar](double n) { return B_bar * n; }, alpha_bar};
}

BandwidthSchedule sqrt_bandwidth(double scale, double alpha_bar) {
  return {[scale](double n) { return scale * std::sqrt(n); }, alpha_bar};
}

}  // namespace feedsim
