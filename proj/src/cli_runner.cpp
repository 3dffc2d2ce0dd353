#include "feedsim/cli_runner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "feedsim/bandwidth.hpp"
#include "feedsim/belief.hpp"
#include "feedsim/config.hpp"
#include "feedsim/experiment.hpp"
#include "feedsim/io.hpp"
#include "feedsim/model.hpp"
#include "feedsim/parallel.hpp"
#include "feedsim/poisson_feed.hpp"
#include "feedsim/pricing.hpp"

namespace feedsim {

namespace {

using nlohmann::json;

struct RunContext {
  Config config;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir;
  std::string header;  // "# feedsim <version> seed=<seed> config=<hash>"
  std::uint64_t config_hash = 0;
};

RunContext load_context(const RunOptions& options) {
  RunContext ctx;
  ctx.config = Config::parse_file(options.config_path);
  ctx.seed = options.seed ? *options.seed
                          : ctx.config.get_u64("run", "seed", 0);
  ctx.threads = options.threads
                    ? *options.threads
                    : static_cast<int>(ctx.config.get_int("run", "threads", 1));
  if (ctx.threads < 1) {
    throw ConfigError("run.threads: must be at least 1");
  }
  ctx.out_dir = options.out_dir;
  ctx.config_hash = fnv1a64(ctx.config.raw());
  ctx.header = output_header(ctx.seed, ctx.config_hash);
  return ctx;
}

std::string out_path(const RunContext& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

json base_json(const RunContext& ctx) {
  json j;
  j["version"] = kVersion;
  j["seed"] = ctx.seed;
  j["config_hash"] = fmt::format("{:016x}", ctx.config_hash);
  return j;
}

void write_json(const RunContext& ctx, const std::string& name, const json& j) {
  write_text_file(out_path(ctx, name), j.dump(2) + "\n");
}

std::vector<SignalModel> read_models(const Config& config,
                                     const std::string& section,
                                     std::size_t n_senders) {
  const std::vector<double> p_hi = config.get_double_list(section, "p_high");
  const std::vector<double> p_lo = config.get_double_list(section, "p_low");
  if (p_hi.size() != p_lo.size()) {
    throw ConfigError(fmt::format(
        "{0}.p_high and {0}.p_low must have the same length", section));
  }
  if (p_hi.size() != 1 && p_hi.size() != n_senders) {
    throw ConfigError(
        fmt::format("{}.p_high: expected 1 or {} entries, got {}", section,
                    n_senders, p_hi.size()));
  }
  std::vector<SignalModel> models;
  models.reserve(p_hi.size());
  for (std::size_t i = 0; i < p_hi.size(); ++i) {
    try {
      models.emplace_back(p_hi[i], p_lo[i]);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("{}: {}", section, e.what()));
    }
  }
  return models;
}

WorldState read_theta(const Config& config, const std::string& section) {
  const std::int64_t theta = config.get_int(section, "theta", 1);
  if (theta != 0 && theta != 1) {
    throw ConfigError(fmt::format("{}.theta: must be 0 or 1", section));
  }
  return theta == 1 ? WorldState::one : WorldState::zero;
}

OvercountForm read_form(const Config& config, const std::string& section) {
  const std::string form =
      config.get_string(section, "form", "all_messages");
  if (form == "all_messages") return OvercountForm::all_messages;
  if (form == "repeats_only") return OvercountForm::repeats_only;
  throw ConfigError(fmt::format(
      "{}.form: expected all_messages or repeats_only, got '{}'", section,
      form));
}

}  // namespace

void run_simulate(const RunOptions& options) {
  const RunContext ctx = load_context(options);
  ctx.config.require_known({
      {"run", {"seed", "threads"}},
      {"population", {"rates", "p_high", "p_low", "theta", "signals"}},
      {"simulate", {"r", "horizon", "replicates"}},
  });

  const std::vector<double> rates =
      ctx.config.get_double_list("population", "rates");
  const std::vector<SignalModel> models =
      read_models(ctx.config, "population", rates.size());
  const WorldState theta = read_theta(ctx.config, "population");

  Population population;
  if (ctx.config.has("population", "signals")) {
    const std::vector<std::int64_t> raw =
        ctx.config.get_int_list("population", "signals");
    std::vector<int> signals(raw.begin(), raw.end());
    population = make_population_with_signals(rates, models, signals, theta);
  } else {
    RngEngine signal_rng(mix_seed(ctx.seed, 1));
    population = make_population(rates, models, theta, signal_rng);
  }

  const double r = ctx.config.get_double("simulate", "r");
  const double horizon = ctx.config.get_double("simulate", "horizon");
  const std::int64_t replicates = ctx.config.get_int("simulate", "replicates");
  if (r < 0) throw ConfigError("simulate.r: must be >= 0");
  if (horizon <= 0) throw ConfigError("simulate.horizon: must be > 0");
  if (replicates < 1) throw ConfigError("simulate.replicates: must be >= 1");

  std::vector<std::string> chunks(replicates);
  std::vector<double> final_phi(replicates, 0.0);
  parallel_for(replicates, ctx.threads, [&](std::int64_t i) {
    RngEngine rng(ctx.seed + static_cast<std::uint64_t>(i));
    const Feed feed = sample_feed(population, horizon, rng);
    const BeliefTrajectory traj = simulate_nonbayesian(feed, population, r, rng);
    final_phi[i] = traj.final_phi;
    std::string chunk;
    for (const TrajectoryPoint& p : traj.points) {
      const double mu1 = 1.0 / (1.0 + std::exp(-p.phi));
      chunk += fmt::format("{},{},{},{}\n", i, format_number(p.time),
                           format_number(p.phi), format_number(mu1));
    }
    chunks[i] = std::move(chunk);
  });

  std::string csv = ctx.header + "\n" + "replicate,time,phi,mu1\n";
  for (const std::string& chunk : chunks) csv += chunk;
  write_text_file(out_path(ctx, "trajectories.csv"), csv);

  const RateSummary analytic = nonbayesian_rate(population, r);
  double mean_rate = 0.0;
  for (double phi : final_phi) mean_rate += phi / horizon;
  mean_rate /= static_cast<double>(replicates);
  double var_rate = 0.0;
  for (double phi : final_phi) {
    const double d = phi / horizon - mean_rate;
    var_rate += d * d;
  }
  const double se_rate =
      replicates > 1 ? std::sqrt(var_rate / (replicates - 1.0) /
                                 static_cast<double>(replicates))
                     : 0.0;

  json j = base_json(ctx);
  j["r"] = r;
  j["horizon"] = horizon;
  j["replicates"] = replicates;
  j["theta"] = state_value(population.theta());
  j["analytic_rate"] = analytic.rate;
  j["per_sender_terms"] = analytic.per_sender_terms;
  j["empirical_rate_mean"] = mean_rate;
  j["empirical_rate_se"] = se_rate;
  if (analytic.rate != 0.0) {
    j["relative_error"] = (mean_rate - analytic.rate) / analytic.rate;
  } else {
    j["relative_error"] = nullptr;
  }
  j["replicate_final_phi"] = final_phi;
  write_json(ctx, "rate_summary.json", j);

  fmt::print("simulate: {} replicates, analytic rate {}, empirical mean {}\n",
             replicates, format_number(analytic.rate),
             format_number(mean_rate));
}

void run_sweep(const RunOptions& options) {
  const RunContext ctx = load_context(options);
  ctx.config.require_known({
      {"run", {"seed", "threads"}},
      {"grid", {"r", "n", "hi_alpha"}},
      {"sweep", {"alpha", "p_high", "p_low", "mc_draws", "mc_threshold"}},
  });

  const std::vector<double> r_values = ctx.config.get_double_list("grid", "r");
  const std::vector<std::int64_t> n_values =
      ctx.config.get_int_list("grid", "n");
  const std::vector<double> hi_values =
      ctx.config.get_double_list("grid", "hi_alpha");
  const double alpha = ctx.config.get_double("sweep", "alpha", 1.0);
  const double p_hi = ctx.config.get_double("sweep", "p_high", 0.75);
  const double p_lo = ctx.config.get_double("sweep", "p_low", 0.25);
  const std::int64_t mc_draws =
      ctx.config.get_int("sweep", "mc_draws", 100000);
  const std::int64_t mc_threshold =
      ctx.config.get_int("sweep", "mc_threshold", 20);
  for (double r : r_values) {
    if (r < 0) throw ConfigError("grid.r: entries must be >= 0");
  }
  for (std::int64_t n : n_values) {
    if (n < 1) throw ConfigError("grid.n: entries must be >= 1");
  }
  for (double hi : hi_values) {
    if (hi <= 0) throw ConfigError("grid.hi_alpha: entries must be > 0");
  }
  if (alpha <= 0) throw ConfigError("sweep.alpha: must be > 0");
  if (mc_draws < 1) throw ConfigError("sweep.mc_draws: must be >= 1");
  SignalModel model;
  try {
    model = SignalModel(p_hi, p_lo);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("sweep: {}", e.what()));
  }

  struct Row {
    double r = 0.0;
    std::int64_t n = 0;
    double hi_alpha = 0.0;
    double rate_marginal = 0.0;
    double influence_hi = 0.0;
    MislearningResult mis;
  };
  const std::int64_t total =
      static_cast<std::int64_t>(r_values.size()) *
      static_cast<std::int64_t>(n_values.size()) *
      static_cast<std::int64_t>(hi_values.size());
  std::vector<Row> rows(total);

  parallel_for(total, ctx.threads, [&](std::int64_t idx) {
    const std::int64_t per_r = static_cast<std::int64_t>(n_values.size()) *
                               static_cast<std::int64_t>(hi_values.size());
    const double r = r_values[idx / per_r];
    const std::int64_t rest = idx % per_r;
    const std::int64_t n = n_values[rest / hi_values.size()];
    const double hi = hi_values[rest % hi_values.size()];

    std::vector<double> rates(static_cast<std::size_t>(n), alpha);
    rates[0] = hi;
    const std::vector<int> signals(static_cast<std::size_t>(n), 1);
    const Population population = make_population_with_signals(
        rates, {model}, signals, WorldState::one);

    Row row;
    row.r = r;
    row.n = n;
    row.hi_alpha = hi;
    row.rate_marginal = nonbayesian_rate_marginal(population, r);
    row.influence_hi = sender_influence(1, population, r);
    const std::vector<SignalModel> models(static_cast<std::size_t>(n), model);
    if (n <= mc_threshold) {
      row.mis = mislearning_probability(models, rates, r);
    } else {
      RngEngine rng(mix_seed(ctx.seed, static_cast<std::uint64_t>(idx)));
      row.mis = mislearning_probability_mc(models, rates, r, mc_draws, rng).value;
    }
    rows[idx] = row;
  });

  std::string csv = ctx.header + "\n" +
                    "r,n,alpha,hi_alpha,rate_marginal,influence_hi,"
                    "p_wrong,p_correct,p_tie\n";
  for (const Row& row : rows) {
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", format_number(row.r),
                       row.n, format_number(alpha),
                       format_number(row.hi_alpha),
                       format_number(row.rate_marginal),
                       format_number(row.influence_hi),
                       format_number(row.mis.p_wrong),
                       format_number(row.mis.p_correct),
                       format_number(row.mis.p_tie));
  }
  write_text_file(out_path(ctx, "sweep.csv"), csv);

  // Rate should not fall as interference grows: check each (n, hi) series
  // along ascending r.
  std::vector<double> sorted_r = r_values;
  std::sort(sorted_r.begin(), sorted_r.end());
  std::map<std::pair<std::int64_t, double>, std::map<double, double>> series;
  for (const Row& row : rows) {
    series[{row.n, row.hi_alpha}][row.r] = row.rate_marginal;
  }
  int violations = 0;
  for (const auto& [key, by_r] : series) {
    (void)key;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [r, rate] : by_r) {
      (void)r;
      if (rate < prev - 1e-12) ++violations;
      prev = rate;
    }
  }

  json j = base_json(ctx);
  j["rows"] = total;
  j["axis_sizes"] = {{"r", r_values.size()},
                     {"n", n_values.size()},
                     {"hi_alpha", hi_values.size()}};
  j["rate_monotone_in_r"] = violations == 0;
  j["monotone_violations"] = violations;
  write_json(ctx, "sweep_summary.json", j);

  fmt::print("sweep: {} rows, rate monotone in r: {}\n", total,
             violations == 0 ? "yes" : "no");
}

void run_experiment(const RunOptions& options) {
  const RunContext ctx = load_context(options);
  ctx.config.require_known({
      {"run", {"seed", "threads"}},
      {"generate",
       {"participants", "r0", "r_same_color", "r_unknown_question",
        "r_recognition", "sigma_eps", "share_same_color", "eta_sigma",
        "method", "form"}},
      {"fit",
       {"covariates", "feeds", "filter", "max_abs_error", "form", "r_max",
        "step_tol"}},
      {"bootstrap", {"reps", "level"}},
  });

  GenerateConfig gen;
  gen.num_participants =
      static_cast<int>(ctx.config.get_int("generate", "participants"));
  gen.r_model.r0 = ctx.config.get_double("generate", "r0");
  gen.r_model.r_same_color =
      ctx.config.get_double("generate", "r_same_color", 0.0);
  gen.r_model.r_unknown_question =
      ctx.config.get_double("generate", "r_unknown_question", 0.0);
  gen.r_model.r_recognition =
      ctx.config.get_double("generate", "r_recognition", -1.0);
  gen.r_model.sigma_eps = ctx.config.get_double("generate", "sigma_eps", 0.0);
  gen.share_same_color =
      ctx.config.get_double("generate", "share_same_color", 0.5);
  gen.eta_sigma = ctx.config.get_double("generate", "eta_sigma", 0.0);
  gen.form = read_form(ctx.config, "generate");
  const std::string method =
      ctx.config.get_string("generate", "method", "formula");
  if (method == "formula") {
    gen.method = GenerationMethod::formula;
  } else if (method == "recall_sim") {
    gen.method = GenerationMethod::recall_sim;
  } else {
    throw ConfigError(fmt::format(
        "generate.method: expected formula or recall_sim, got '{}'", method));
  }
  gen.seed = ctx.seed;
  if (gen.num_participants < 1) {
    throw ConfigError("generate.participants: must be >= 1");
  }

  const Dataset dataset = generate_dataset(gen);

  std::vector<std::int64_t> feeds = {2, 3};
  if (ctx.config.has("fit", "feeds")) {
    feeds = ctx.config.get_int_list("fit", "feeds");
  }
  for (std::int64_t f : feeds) {
    if (f < 1 || f > 3) throw ConfigError("fit.feeds: entries must be in 1..3");
  }
  std::vector<Covariate> covariates;
  if (ctx.config.has("fit", "covariates")) {
    for (const std::string& name :
         ctx.config.get_string_list("fit", "covariates")) {
      if (name == "same_color") {
        covariates.push_back(Covariate::same_color);
      } else if (name == "unknown_question") {
        covariates.push_back(Covariate::unknown_question);
      } else {
        throw ConfigError(fmt::format(
            "fit.covariates: expected same_color or unknown_question, got '{}'",
            name));
      }
    }
  }
  FitOptions fit_options;
  fit_options.form = read_form(ctx.config, "fit");
  fit_options.r_max = ctx.config.get_double("fit", "r_max", 10.0);
  fit_options.step_tol = ctx.config.get_double("fit", "step_tol", 1e-7);
  const bool filter = ctx.config.get_bool("fit", "filter", true);
  const double max_abs_error =
      ctx.config.get_double("fit", "max_abs_error", 5.0);
  const int reps = static_cast<int>(ctx.config.get_int("bootstrap", "reps", 400));
  const double level = ctx.config.get_double("bootstrap", "level", 0.95);
  if (reps < 1) throw ConfigError("bootstrap.reps: must be >= 1");
  if (level <= 0 || level >= 1) {
    throw ConfigError("bootstrap.level: must be in (0, 1)");
  }

  std::vector<EstimationRow> selected;
  for (const EstimationRow& row : dataset.rows) {
    if (std::find(feeds.begin(), feeds.end(), row.feed) != feeds.end()) {
      selected.push_back(row);
    }
  }
  const std::vector<EstimationRow> kept =
      filter ? filter_dataset(selected, max_abs_error) : selected;

  const FitResult fit = fit_r(kept, covariates, fit_options);
  const auto statistic = [&](const std::vector<EstimationRow>& rows) {
    return fit_r(rows, covariates, fit_options).coefficients[0];
  };
  const BootstrapResult ci = bootstrap_ci(kept, statistic, reps, level,
                                          mix_seed(ctx.seed, 2), ctx.threads);
  const double r_hat = fit.coefficients[0];
  const std::vector<CurvePoint> curve =
      overcount_curve(kept, r_hat, reps, level, mix_seed(ctx.seed, 3));
  const std::vector<RecallTriple> triples =
      recognition_triples(dataset.participants);
  const RecallCurveFit recognition =
      fit_recall_curve(triples, fit_options.r_max);

  write_dataset_csv(dataset.rows, out_path(ctx, "dataset.csv"), ctx.header);

  std::string curve_csv =
      ctx.header + "\n" + "alpha,count,mean_y,ci_lo,ci_hi,model\n";
  for (const CurvePoint& p : curve) {
    curve_csv += fmt::format("{},{},{},{},{},{}\n", p.alpha, p.count,
                             format_number(p.mean_y), format_number(p.ci_lo),
                             format_number(p.ci_hi), format_number(p.model));
  }
  write_text_file(out_path(ctx, "overcount_curve.csv"), curve_csv);

  json j = base_json(ctx);
  j["participants"] = dataset.participants.size();
  j["rows_total"] = dataset.rows.size();
  j["rows_selected"] = selected.size();
  j["rows_kept"] = kept.size();
  j["rows_dropped"] = selected.size() - kept.size();
  j["feeds"] = feeds;
  json names = json::array();
  names.push_back("r0");
  for (Covariate c : covariates) {
    names.push_back(c == Covariate::same_color ? "same_color"
                                               : "unknown_question");
  }
  json coef;
  for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
    coef[names[i].get<std::string>()] = fit.coefficients[i];
  }
  j["coefficients"] = coef;
  j["sigma_eps"] = fit.sigma_eps;
  j["log_likelihood"] = fit.log_likelihood;
  j["converged"] = fit.converged;
  j["sweeps"] = fit.sweeps;
  j["ci"] = {{"statistic", "r0"}, {"lo", ci.lo},      {"hi", ci.hi},
             {"point", ci.point}, {"reps", ci.reps},  {"level", ci.level}};
  j["recognition"] = {{"r", recognition.r},
                      {"log_likelihood", recognition.log_likelihood},
                      {"boundary_warning", recognition.boundary_warning},
                      {"triples", triples.size()}};
  write_json(ctx, "estimates.json", j);

  fmt::print("experiment: {} participants, r0 {} [{}, {}], {} rows dropped\n",
             dataset.participants.size(), format_number(r_hat),
             format_number(ci.lo), format_number(ci.hi),
             selected.size() - kept.size());
}

void run_pricing(const RunOptions& options) {
  const RunContext ctx = load_context(options);
  ctx.config.require_known({
      {"run", {"seed", "threads"}},
      {"pricing", {"n", "B", "kinds", "tol", "foc_tol"}},
  });

  const std::vector<std::int64_t> n_values =
      ctx.config.get_int_list("pricing", "n");
  const std::vector<double> B_values = ctx.config.get_double_list("pricing", "B");
  if (n_values.size() != B_values.size()) {
    throw ConfigError("pricing.n and pricing.B must have the same length");
  }
  std::vector<std::string> kinds = {"linear", "quadratic"};
  if (ctx.config.has("pricing", "kinds")) {
    kinds = ctx.config.get_string_list("pricing", "kinds");
  }
  const double tol = ctx.config.get_double("pricing", "tol", 1e-6);
  const double foc_tol = ctx.config.get_double("pricing", "foc_tol", 1e-6);

  std::string csv =
      ctx.header + "\n" +
      "kind,n,B,coefficient,best_response,target,abs_error,foc_residual,pass\n";
  int passed = 0;
  int total = 0;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    const int n = static_cast<int>(n_values[i]);
    const double B = B_values[i];
    for (const std::string& kind_name : kinds) {
      PriceFunction::Kind kind;
      if (kind_name == "linear") {
        kind = PriceFunction::Kind::linear;
      } else if (kind_name == "quadratic") {
        kind = PriceFunction::Kind::quadratic;
      } else {
        throw ConfigError(fmt::format(
            "pricing.kinds: expected linear or quadratic, got '{}'", kind_name));
      }
      const PriceFunction price = [&] {
        try {
          return calibrate_price(n, B, kind);
        } catch (const std::exception& e) {
          throw ConfigError(fmt::format("pricing: {}", e.what()));
        }
      }();
      const BestResponse best = best_response(B, price, std::min(tol, 1e-9));
      const double target = B / n;
      const double abs_error = std::fabs(best.alpha - target);
      const double foc = foc_residual(best.alpha, B, price);
      const bool pass = abs_error <= tol && std::fabs(foc) <= foc_tol;
      ++total;
      if (pass) ++passed;
      csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", kind_name, n,
                         format_number(B), format_number(price.coefficient()),
                         format_number(best.alpha), format_number(target),
                         format_number(abs_error), format_number(foc),
                         pass ? 1 : 0);
      fmt::print("pricing: {:9} n={:<3} B={:<6} c={:<12} alpha*={:<12} {}\n",
                 kind_name, n, format_number(B),
                 format_number(price.coefficient()), format_number(best.alpha),
                 pass ? "pass" : "FAIL");
    }
  }
  write_text_file(out_path(ctx, "pricing.csv"), csv);
  fmt::print("pricing: {}/{} rows pass\n", passed, total);
}

void run_bandwidth(const RunOptions& options) {
  const RunContext ctx = load_context(options);
  ctx.config.require_known({
      {"run", {"seed", "threads"}},
      {"bandwidth",
       {"schedule", "B", "B_bar", "scale", "n_grid", "alpha", "p_high",
        "p_low", "divergence_ratio"}},
  });

  const double alpha = ctx.config.get_double("bandwidth", "alpha", 1.0);
  const double p_hi = ctx.config.get_double("bandwidth", "p_high", 0.75);
  const double p_lo = ctx.config.get_double("bandwidth", "p_low", 0.25);
  if (alpha <= 0) throw ConfigError("bandwidth.alpha: must be > 0");
  SignalModel model;
  try {
    model = SignalModel(p_hi, p_lo);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("bandwidth: {}", e.what()));
  }

  const std::string schedule_name =
      ctx.config.get_string("bandwidth", "schedule");
  BandwidthSchedule schedule;
  if (schedule_name == "constant") {
    schedule = constant_bandwidth(ctx.config.get_double("bandwidth", "B"), alpha);
  } else if (schedule_name == "linear") {
    schedule =
        linear_bandwidth(ctx.config.get_double("bandwidth", "B_bar"), alpha);
  } else if (schedule_name == "sqrt") {
    schedule =
        sqrt_bandwidth(ctx.config.get_double("bandwidth", "scale"), alpha);
  } else {
    throw ConfigError(fmt::format(
        "bandwidth.schedule: expected constant, linear, or sqrt, got '{}'",
        schedule_name));
  }

  std::vector<std::int64_t> grid_raw = {10, 100, 1000, 10000};
  if (ctx.config.has("bandwidth", "n_grid")) {
    grid_raw = ctx.config.get_int_list("bandwidth", "n_grid");
  }
  std::vector<int> n_grid;
  for (std::int64_t n : grid_raw) {
    if (n < 1) throw ConfigError("bandwidth.n_grid: entries must be >= 1");
    n_grid.push_back(static_cast<int>(n));
  }
  const double ratio =
      ctx.config.get_double("bandwidth", "divergence_ratio", 1.5);

  const PopulationSequence sequence = homogeneous_sequence(alpha, model);
  DiagnosticTable table;
  try {
    table = bandwidth_learning_diagnostic(sequence, schedule, n_grid, ratio);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::logic_error& e) {
    throw ConfigError(fmt::format("bandwidth: {}", e.what()));
  }

  write_diagnostic_csv(table, out_path(ctx, "bandwidth.csv"), ctx.header);

  json j = base_json(ctx);
  j["schedule"] = schedule_name;
  j["alpha"] = alpha;
  j["kl"] = kl_binary(model);
  j["rows"] = table.rows.size();
  j["verdict"] = table.verdict;
  if (!table.rows.empty()) {
    const DiagnosticRow& last = table.rows.back();
    j["final"] = {{"n", last.n},
                  {"bandwidth", last.bandwidth},
                  {"keep_prob", last.keep_prob},
                  {"bayes_rate", last.bayes_rate},
                  {"nonbayes_rate", last.nonbayes_rate}};
  }
  write_json(ctx, "bandwidth_summary.json", j);

  fmt::print("bandwidth: schedule {}, verdict {}\n", schedule_name,
             table.verdict);
}

}  // namespace feedsim
