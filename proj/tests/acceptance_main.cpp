// Acceptance suite: one line per criterion, nonzero exit on any failure.
// The first argument (or FEEDSIM_BIN) locates the command-line binary used by
// the determinism criterion.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "feedsim/bandwidth.hpp"
#include "feedsim/belief.hpp"
#include "feedsim/experiment.hpp"
#include "feedsim/parallel.hpp"
#include "feedsim/pricing.hpp"
#include "feedsim/recall.hpp"

using namespace feedsim;
namespace fs = std::filesystem;

namespace {

std::string g_binary;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Population reference_population() {
  return make_population_with_signals({2.0, 1.0, 1.0}, {SignalModel(0.75, 0.25)},
                                      {1, 1, 0}, WorldState::one);
}

Outcome ergodic_recall() {
  const Population pop = reference_population();
  const double r = 0.5;
  const double horizon = 500.0;
  const int reps = 100;
  std::int64_t queries = 0, recalled = 0;
  for (int rep = 0; rep < reps; ++rep) {
    RngEngine rng(mix_seed(4242, static_cast<std::uint64_t>(rep)));
    const Feed feed = sample_feed(pop, horizon, rng);
    RecallState state(pop.size());
    for (const Message& m : feed.messages) {
      if (m.source_id == 1 && state.count_for(1) >= 1) {
        ++queries;
        recalled += sample_recall(state, 1, r, rng) ? 1 : 0;
      }
      state = record_message(state, m.source_id);
    }
  }
  const double freq = static_cast<double>(recalled) / queries;
  const double target = asymptotic_recall(2.0, 4.0, r);  // 2/3
  const bool pass = std::fabs(freq - target) <= 0.02;
  return {pass, fmt::format("recall frequency {:.4f} vs limit {:.4f} +-0.02 "
                            "over {} queries",
                            freq, target, queries)};
}

Outcome drift_rate() {
  const Population pop = reference_population();
  const double r = 0.5;
  const double horizon = 500.0;
  const int reps = 200;
  double sum = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    RngEngine rng(mix_seed(515, static_cast<std::uint64_t>(rep)));
    const Feed feed = sample_feed(pop, horizon, rng);
    const BeliefTrajectory traj = simulate_nonbayesian(feed, pop, r, rng);
    sum += traj.final_phi / horizon;
  }
  const double mean = sum / reps;
  const double target = nonbayesian_rate(pop, r).rate;
  const double rel = std::fabs(mean - target) / target;
  return {rel <= 0.05,
          fmt::format("mean drift {:.6f} vs analytic {:.6f} (relative error "
                      "{:.4f}, allowed 0.05)",
                      mean, target, rel)};
}

Outcome saturation() {
  const Population pop = reference_population();
  const int reps = 10000;
  std::string detail;
  for (const double t : {0.5, 1.0, 2.0}) {
    double sum = 0.0, sum2 = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      RngEngine rng(mix_seed(808 + static_cast<std::uint64_t>(t * 100), rep));
      const Feed feed = sample_feed(pop, t, rng);
      const double phi = bayesian_phi(feed, pop);
      sum += phi;
      sum2 += phi * phi;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
    const double expected = expected_bayesian_phi(pop, t);
    if (std::fabs(mean - expected) > 3.0 * se)
      return {false, fmt::format("t={}: mean {:.5f} vs {:.5f} exceeds 3 SE "
                                 "({:.5f})",
                                 t, mean, expected, se)};
    detail += fmt::format("t={} ok; ", t);
  }
  double sum = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    RngEngine rng(mix_seed(909, rep));
    sum += bayesian_phi(sample_feed(pop, 50.0, rng), pop);
  }
  const double mean = sum / reps;
  const double limit = bayesian_limit(pop);
  if (std::fabs(mean - limit) > 1e-3)
    return {false, fmt::format("t=50 mean {:.6f} vs limit {:.6f} off by more "
                               "than 1e-3",
                               mean, limit)};
  return {true, detail + fmt::format("t=50 within 1e-3 of {:.4f}", limit)};
}

Outcome perfect_recall_reduction() {
  RngEngine rng(31337);
  std::uniform_real_distribution<double> rate(0.3, 2.5);
  std::uniform_real_distribution<double> quality(0.55, 0.95);
  int points = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<double> rates;
    std::vector<SignalModel> models;
    for (int i = 0; i < n; ++i) {
      rates.push_back(rate(rng));
      const double hi = quality(rng);
      models.emplace_back(hi, 1.0 - hi);
    }
    const Population pop = make_population(rates, models, WorldState::one, rng);
    const Feed feed = sample_feed(pop, 5.0, rng);
    RngEngine walk(mix_seed(11, trial));
    const BeliefTrajectory nb = simulate_nonbayesian(feed, pop, 0.0, walk);
    const BeliefTrajectory b = bayesian_trajectory(feed, pop);
    if (nb.points.size() != b.points.size())
      return {false, fmt::format("trial {}: point counts differ", trial)};
    for (std::size_t i = 0; i < nb.points.size(); ++i) {
      if (nb.points[i].phi != b.points[i].phi ||
          nb.points[i].time != b.points[i].time)
        return {false,
                fmt::format("trial {}: trajectories diverge at point {}", trial, i)};
      ++points;
    }
    if (nb.final_phi != b.final_phi)
      return {false, fmt::format("trial {}: final beliefs differ", trial)};
  }
  return {true, fmt::format("50 feeds, {} points identical bit for bit", points)};
}

Outcome mislearning_brute_force() {
  RngEngine rng(606);
  std::uniform_real_distribution<double> quality(0.6, 0.9);
  std::uniform_real_distribution<double> rate(0.5, 3.0);
  std::uniform_real_distribution<double> interference(0.2, 1.5);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);  // 2..10
    std::vector<SignalModel> models;
    std::vector<double> rates;
    for (int i = 0; i < n; ++i) {
      const double hi = quality(rng);
      models.emplace_back(hi, 1.0 - hi);
      rates.push_back(rate(rng));
    }
    const double r = interference(rng);
    const MislearningResult exact = mislearning_probability(models, rates, r);
    RngEngine mc_rng(mix_seed(707, trial));
    const MislearningEstimate mc =
        mislearning_probability_mc(models, rates, r, 100000, mc_rng);
    const double slack_wrong = 3.0 * std::max(mc.se_wrong, 1e-6);
    const double slack_tie = 3.0 * std::max(mc.se_tie, 1e-6);
    if (std::fabs(mc.value.p_wrong - exact.p_wrong) > slack_wrong)
      return {false,
              fmt::format("trial {} (n={}): p_wrong {:.5f} vs exact {:.5f} "
                          "exceeds 3 SE",
                          trial, n, mc.value.p_wrong, exact.p_wrong)};
    if (std::fabs(mc.value.p_tie - exact.p_tie) > slack_tie)
      return {false, fmt::format("trial {} (n={}): tie mass off", trial, n)};
  }
  const double hi = 0.85;
  const MislearningResult solo =
      mislearning_probability({SignalModel(hi, 1.0 - hi)}, {1.3}, 0.9);
  if (std::fabs(solo.p_wrong - (1.0 - hi)) > 1e-12)
    return {false, fmt::format("sole sender: p_wrong {:.12f} vs {:.12f}",
                               solo.p_wrong, 1.0 - hi)};
  return {true, "6 random populations within 3 SE of 1e5-draw estimates; "
                "sole-sender case analytic"};
}

Outcome interference_recovery() {
  const double r_true = 0.16;
  const int reps = 100;
  const int boot_reps = 1000;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads > 8) threads = 8;

  std::vector<int> covered(reps, 0);
  std::vector<double> widths(reps, 0.0);
  parallel_for(reps, threads, [&](std::int64_t rep) {
    GenerateConfig cfg;
    cfg.num_participants = 1000;
    cfg.r_model.r0 = r_true;
    cfg.r_model.sigma_eps = 3.3;
    cfg.seed = mix_seed(1, static_cast<std::uint64_t>(rep));
    const Dataset ds = generate_dataset(cfg);
    std::vector<EstimationRow> rows;
    for (const EstimationRow& row : ds.rows)
      if (row.known_question) rows.push_back(row);
    const BootstrapResult ci = bootstrap_ci(
        rows,
        [](const std::vector<EstimationRow>& sample) {
          return fit_r(sample).coefficients[0];
        },
        boot_reps, 0.95, mix_seed(777, static_cast<std::uint64_t>(rep)), 1);
    covered[rep] = (ci.lo <= r_true && r_true <= ci.hi) ? 1 : 0;
    widths[rep] = ci.hi - ci.lo;
  });
  int hits = 0;
  double width = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    hits += covered[rep];
    width += widths[rep];
  }
  width /= reps;
  if (hits < 93)
    return {false, fmt::format("interval covered the truth {}/100 times "
                               "(need >= 93); mean width {:.3f}",
                               hits, width)};

  GenerateConfig clean;
  clean.num_participants = 1000;
  clean.r_model.r0 = r_true;
  clean.r_model.sigma_eps = 0.0;
  clean.seed = 9999;
  const Dataset ds = generate_dataset(clean);
  std::vector<EstimationRow> rows;
  for (const EstimationRow& row : ds.rows)
    if (row.known_question) rows.push_back(row);
  const FitResult fit = fit_r(rows);
  if (std::fabs(fit.coefficients[0] - r_true) > 1e-6)
    return {false, fmt::format("noiseless estimate {:.8f} misses {:.2f} by "
                               "more than 1e-6",
                               fit.coefficients[0], r_true)};
  return {true, fmt::format("coverage {}/100, mean interval width {:.3f}; "
                            "noiseless estimate within 1e-6",
                            hits, width)};
}

Outcome overcount_shape() {
  const double r = 0.16;
  std::vector<double> curve;
  for (int alpha = 1; alpha <= 6; ++alpha)
    curve.push_back(overcount_mean(alpha, alpha + 7.0, r));
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (!(curve[i] > curve[i - 1]))
      return {false, fmt::format("curve not increasing at alpha {}", i + 1)};
  for (std::size_t i = 2; i < curve.size(); ++i)
    if (!(curve[i] - curve[i - 1] < curve[i - 1] - curve[i - 2]))
      return {false, fmt::format("curve not concave at alpha {}", i + 1)};
  if (std::fabs(curve.back() - 0.94) > 0.3)
    return {false, fmt::format("value at six repetitions {:.4f} vs 0.94 +-0.3",
                               curve.back())};
  return {true, fmt::format("increasing, concave, value {:.4f} at six "
                            "repetitions (target 0.94 +-0.3)",
                            curve.back())};
}

Outcome pricing_calibration() {
  const std::vector<std::pair<int, double>> games = {{4, 8.0}, {10, 5.0}, {50, 50.0}};
  double worst_err = 0.0, worst_foc = 0.0;
  for (const auto& [n, B] : games) {
    for (const auto kind :
         {PriceFunction::Kind::linear, PriceFunction::Kind::quadratic}) {
      const PriceFunction price = calibrate_price(n, B, kind);
      const BestResponse best = best_response(B, price, 1e-10);
      const double err = std::fabs(best.alpha - B / n);
      const double foc = std::fabs(foc_residual(best.alpha, B, price));
      worst_err = std::max(worst_err, err);
      worst_foc = std::max(worst_foc, foc);
      if (err > 1e-6)
        return {false, fmt::format("n={} B={}: best response off by {:.2e}", n,
                                   B, err)};
      if (foc >= 1e-8)
        return {false,
                fmt::format("n={} B={}: residual {:.2e} not below 1e-8", n, B, foc)};
    }
  }
  return {true, fmt::format("six games: worst error {:.1e} (limit 1e-6), "
                            "worst residual {:.1e} (limit 1e-8)",
                            worst_err, worst_foc)};
}

Outcome bandwidth_diagnostics() {
  const SignalModel model(0.9, 0.5);
  const std::vector<int> grid = {10, 100, 1000, 10000};

  const DiagnosticTable stalled = bandwidth_learning_diagnostic(
      homogeneous_sequence(1.0, model), constant_bandwidth(5.0, 1.0), grid);
  if (stalled.verdict != "stalled")
    return {false, fmt::format("constant budget classified '{}'", stalled.verdict)};

  const double B_bar = 0.5;
  const DiagnosticTable linear = bandwidth_learning_diagnostic(
      homogeneous_sequence(1.0, model), linear_bandwidth(B_bar, 1.0), grid);
  const double target = B_bar * kl_binary(model);
  for (const DiagnosticRow& row : linear.rows)
    if (std::fabs(row.nonbayes_rate - target) > 1e-9)
      return {false, fmt::format("n={}: per-capita rate {:.12f} vs {:.12f} "
                                 "beyond 1e-9",
                                 row.n, row.nonbayes_rate, target)};

  // thin-then-sample against sampling at the thinned rates
  const Population pop = reference_population();
  const double horizon = 10.0;
  const double keep = 0.4;
  const auto [thinned, p] = thin_population(pop, keep * pop.alpha_bar());
  const int reps = 4000;
  double sa = 0.0, sa2 = 0.0, sa4 = 0.0, sb = 0.0, sb2 = 0.0, sb4 = 0.0;
  RngEngine rng_a(2024), rng_b(4048);
  for (int rep = 0; rep < reps; ++rep) {
    const Feed full = sample_feed(pop, horizon, rng_a);
    const double ca =
        static_cast<double>(thin_feed(full, keep, rng_a).messages.size());
    const double cb =
        static_cast<double>(sample_feed(thinned, horizon, rng_b).messages.size());
    sa += ca;
    sa2 += ca * ca;
    sb += cb;
    sb2 += cb * cb;
  }
  const double mean_a = sa / reps, mean_b = sb / reps;
  const double var_a = sa2 / reps - mean_a * mean_a;
  const double var_b = sb2 / reps - mean_b * mean_b;
  // recompute fourth central moments for the variance standard errors
  rng_a.seed(2024);
  rng_b.seed(4048);
  for (int rep = 0; rep < reps; ++rep) {
    const Feed full = sample_feed(pop, horizon, rng_a);
    const double ca =
        static_cast<double>(thin_feed(full, keep, rng_a).messages.size());
    const double cb =
        static_cast<double>(sample_feed(thinned, horizon, rng_b).messages.size());
    sa4 += std::pow(ca - mean_a, 4);
    sb4 += std::pow(cb - mean_b, 4);
  }
  const double se_mean =
      std::sqrt(var_a / reps + var_b / reps);
  const double se_var = std::sqrt((sa4 / reps - var_a * var_a) / reps +
                                  (sb4 / reps - var_b * var_b) / reps);
  if (std::fabs(mean_a - mean_b) > 3.0 * se_mean)
    return {false, fmt::format("thinned count means {:.3f} vs {:.3f} exceed 3 "
                               "SE ({:.3f})",
                               mean_a, mean_b, se_mean)};
  if (std::fabs(var_a - var_b) > 3.0 * se_var)
    return {false, fmt::format("thinned count variances {:.3f} vs {:.3f} "
                               "exceed 3 SE ({:.3f})",
                               var_a, var_b, se_var)};
  return {true, fmt::format("stalled/learning verdicts correct; per-capita "
                            "rate within 1e-9; thinned counts agree (means "
                            "{:.2f}/{:.2f}, variances {:.2f}/{:.2f})",
                            mean_a, mean_b, var_a, var_b)};
}

int run_command(const std::string& args) {
  const std::string cmd = fmt::format("{} {} > /dev/null 2>&1", g_binary, args);
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_directory_bytes(const fs::path& a, const fs::path& b,
                          std::string* why) {
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(a))
    names.push_back(entry.path().filename());
  std::sort(names.begin(), names.end());
  std::size_t b_count = 0;
  for (const auto& entry : fs::directory_iterator(b)) {
    (void)entry;
    ++b_count;
  }
  if (b_count != names.size()) {
    *why = fmt::format("{} vs {} file counts differ", a.string(), b.string());
    return false;
  }
  for (const fs::path& name : names) {
    std::ifstream fa(a / name, std::ios::binary);
    std::ifstream fb(b / name, std::ios::binary);
    std::string ba((std::istreambuf_iterator<char>(fa)),
                   std::istreambuf_iterator<char>());
    std::string bb((std::istreambuf_iterator<char>(fb)),
                   std::istreambuf_iterator<char>());
    if (ba != bb) {
      *why = fmt::format("{} differs between runs", name.string());
      return false;
    }
  }
  return true;
}

Outcome cli_determinism() {
  if (g_binary.empty())
    return {false, "no command-line binary supplied (argument or FEEDSIM_BIN)"};

  const fs::path root = fs::temp_directory_path() / "feedsim_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);

  const auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(root / name);
    out << text;
    return (root / name).string();
  };

  struct Job {
    const char* command;
    std::string config;
  };
  const std::vector<Job> jobs = {
      {"simulate", write("simulate.ini",
                         "[population]\n"
                         "rates = 2.0, 1.0, 1.0\n"
                         "p_high = 0.75\np_low = 0.25\n"
                         "theta = 1\nsignals = 1, 1, 0\n"
                         "[simulate]\nr = 0.5\nhorizon = 4.0\nreplicates = 6\n")},
      {"sweep", write("sweep.ini",
                      "[grid]\nr = 0.0, 0.5, 1.0\nn = 2, 3\nhi_alpha = 2.0\n"
                      "[sweep]\nalpha = 1.0\np_high = 0.8\np_low = 0.2\n")},
      {"experiment", write("experiment.ini",
                           "[generate]\nparticipants = 60\nr0 = 0.16\n"
                           "sigma_eps = 1.0\n[bootstrap]\nreps = 50\n")},
      {"pricing", write("pricing.ini",
                        "[pricing]\nn = 4, 10\nB = 8.0, 5.0\n")},
      {"bandwidth", write("bandwidth.ini",
                          "[bandwidth]\nschedule = sqrt\nscale = 1.6\n"
                          "n_grid = 10, 100, 1000\nalpha = 1.0\n"
                          "p_high = 0.9\np_low = 0.5\n")},
  };

  for (const Job& job : jobs) {
    const fs::path a = root / fmt::format("{}_a", job.command);
    const fs::path b = root / fmt::format("{}_b", job.command);
    const fs::path c = root / fmt::format("{}_c", job.command);
    for (const auto& [dir, threads] :
         std::vector<std::pair<fs::path, int>>{{a, 1}, {b, 1}, {c, 4}}) {
      const int code = run_command(
          fmt::format("{} --config {} --out {} --seed 7 --threads {}",
                      job.command, job.config, dir.string(), threads));
      if (code != 0)
        return {false, fmt::format("{} exited with code {}", job.command, code)};
    }
    std::string why;
    if (!same_directory_bytes(a, b, &why))
      return {false, fmt::format("{}: rerun differs ({})", job.command, why)};
    if (!same_directory_bytes(a, c, &why))
      return {false,
              fmt::format("{}: thread count changed output ({})", job.command, why)};
  }

  const std::string bad =
      write("bad.ini", "[population]\nrates = 1.0\nmystery = 3\n");
  const int bad_code = run_command(fmt::format(
      "simulate --config {} --out {}", bad, (root / "bad_out").string()));
  if (bad_code != 2)
    return {false,
            fmt::format("invalid config exited with {} instead of 2", bad_code)};

  fs::remove_all(root);
  return {true, "five commands byte-identical across reruns and thread counts "
                "1/4; invalid config exits 2"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double limit_seconds;  // 0 means no stated limit
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    g_binary = argv[1];
  } else if (const char* env = std::getenv("FEEDSIM_BIN")) {
    g_binary = env;
  }

  const std::vector<Criterion> criteria = {
      {"ergodic recall frequency", ergodic_recall, 10.0},
      {"long-run belief drift", drift_rate, 30.0},
      {"perfect-recall saturation", saturation, 20.0},
      {"zero-interference reduction", perfect_recall_reduction, 0.0},
      {"mislearning enumeration vs monte carlo", mislearning_brute_force, 0.0},
      {"interference recovery with bootstrap coverage", interference_recovery,
       120.0},
      {"overcount curve shape", overcount_shape, 0.0},
      {"calibrated pricing best responses", pricing_calibration, 0.0},
      {"bandwidth thinning diagnostics", bandwidth_diagnostics, 0.0},
      {"command-line determinism", cli_determinism, 0.0},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (outcome.pass && c.limit_seconds > 0.0 && elapsed > c.limit_seconds) {
      outcome.pass = false;
      outcome.detail += fmt::format("; runtime {:.1f}s exceeds {:.0f}s budget",
                                    elapsed, c.limit_seconds);
    }
    if (!outcome.pass) ++failures;
    fmt::print("[{:2d}/10] {} {} ({}; {:.1f}s)\n", i + 1,
               outcome.pass ? "PASS" : "FAIL", c.name, outcome.detail, elapsed);
  }
  fmt::print("acceptance: {}/10 criteria pass\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
