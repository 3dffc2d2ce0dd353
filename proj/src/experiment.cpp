#include "feedsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "feedsim/io.hpp"
#include "feedsim/optimize.hpp"
#include "feedsim/parallel.hpp"
#include "feedsim/recall.hpp"

namespace feedsim {

double RModel::row_r(bool same_color, bool known_question) const {
  double r = r0;
  if (same_color) r += r_same_color;
  if (!known_question) r += r_unknown_question;
  return r < 0.0 ? 0.0 : r;
}

double overcount_mean(double alpha, double alpha_bar, double r,
                      OvercountForm form) {
  if (!(alpha >= 1.0))
    throw std::domain_error(
        fmt::format("repetition count must be >= 1, got {}", alpha));
  if (!(alpha <= alpha_bar))
    throw std::domain_error(fmt::format(
        "repetitions {} cannot exceed the message total {}", alpha, alpha_bar));
  if (r < 0.0)
    throw std::domain_error(fmt::format("interference must be >= 0, got {}", r));
  const double p_r = alpha / (alpha + r * (alpha_bar - alpha));
  const double repeats = form == OvercountForm::all_messages ? alpha : alpha - 1.0;
  return repeats * (1.0 - p_r);
}

namespace {

constexpr double kQuantileGuard = 1e-12;

double clamped_normal_pair_scale(double sigma_eps) {
  // Y1 and Y0 each carry half the variance so their difference has sd sigma.
  return sigma_eps / std::sqrt(2.0);
}

std::int64_t nonneg_round(double x) {
  const std::int64_t v = std::llround(x);
  return v < 0 ? 0 : v;
}

}  // namespace

Dataset generate_dataset(const GenerateConfig& config) {
  if (config.num_participants < 1)
    throw std::invalid_argument(
        fmt::format("participant count must be >= 1, got {}",
                    config.num_participants));
  if (!(config.share_same_color >= 0.0 && config.share_same_color <= 1.0))
    throw std::invalid_argument(
        fmt::format("share_same_color must lie in [0, 1], got {}",
                    config.share_same_color));
  if (config.r_model.sigma_eps < 0.0 || config.eta_sigma < 0.0)
    throw std::invalid_argument("noise scales must be >= 0");

  RngEngine rng(config.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution same_coin(config.share_same_color);
  std::uniform_int_distribution<int> alpha_draw(1, 6);
  const double answer_scale = clamped_normal_pair_scale(config.r_model.sigma_eps);

  Dataset data;
  data.participants.reserve(static_cast<std::size_t>(config.num_participants));
  data.rows.reserve(static_cast<std::size_t>(config.num_participants) * 3);

  for (int k = 0; k < config.num_participants; ++k) {
    ParticipantRecord person;
    person.id = k + 1;
    person.own_color = coin(rng);
    const bool show_picture = coin(rng);  // randomized once per participant

    for (int j = 1; j <= 3; ++j) {
      FeedSpec spec;
      spec.feed_index = j;
      spec.n_total = coin(rng) ? 10 : 8;
      spec.alpha = alpha_draw(rng);
      spec.show_picture = show_picture;
      spec.same_color = same_coin(rng);
      // side split: the high sender's side, drawn uniformly and redrawn when
      // it comes up empty (the high sender has to sit somewhere)
      std::uniform_int_distribution<int> side(0, spec.n_total);
      do {
        spec.n1 = side(rng);
      } while (spec.n1 == 0);
      spec.n0 = spec.n_total - spec.n1;

      const bool known_question = j >= 2;
      const double r_row = config.r_model.row_r(spec.same_color, known_question);
      const int alpha_bar = spec.alpha_bar();

      double overcount = 0.0;
      if (config.method == GenerationMethod::formula) {
        overcount = overcount_mean(spec.alpha, alpha_bar, r_row, config.form);
      } else {
        // sample per-message recall of the repeated sender against the full
        // feed history: alpha of its own messages among alpha_bar in total
        RecallState state(spec.n_total);
        for (int rep = 0; rep < spec.alpha; ++rep)
          state = record_message(state, 1);
        for (int other = 2; other <= spec.n_total; ++other)
          state = record_message(state, other);
        const int queries =
            config.form == OvercountForm::all_messages ? spec.alpha
                                                       : spec.alpha - 1;
        int missed = 0;
        for (int q = 0; q < queries; ++q)
          if (!sample_recall(state, 1, r_row, rng)) ++missed;
        overcount = static_cast<double>(missed);
      }

      std::normal_distribution<double> answer_noise(0.0, 1.0);
      const double eps1 =
          answer_scale > 0.0 ? answer_scale * answer_noise(rng) : 0.0;
      const double eps0 =
          answer_scale > 0.0 ? answer_scale * answer_noise(rng) : 0.0;
      const double eta =
          config.eta_sigma > 0.0 ? config.eta_sigma * answer_noise(rng) : 0.0;

      const double y1 = spec.n1 + overcount + eta + eps1;
      const double y0 = spec.n0 + eta + eps0;

      EstimationRow row;
      row.participant = person.id;
      row.feed = j;
      row.n_total = spec.n_total;
      row.n1 = spec.n1;
      row.n0 = spec.n0;
      row.alpha = spec.alpha;
      row.alpha_bar = alpha_bar;
      row.y1 = y1;
      row.y0 = y0;
      row.y = (y1 - y0) - (spec.n1 - spec.n0);
      row.same_color = spec.same_color;
      row.known_question = known_question;
      data.rows.push_back(row);

      person.feeds.push_back(spec);
      person.y1_answers.push_back(nonneg_round(y1));
      person.y0_answers.push_back(nonneg_round(y0));
      if (spec.alpha >= 2) {
        const double p_notice =
            recall_probability(spec.alpha, alpha_bar - spec.alpha, r_row);
        std::bernoulli_distribution noticed(p_notice);
        person.noticed_repetition.push_back(noticed(rng));
      } else {
        person.noticed_repetition.push_back(false);
      }
    }

    // end-of-study name recognition, asked about the final feed
    const FeedSpec& last = person.feeds.back();
    const double r_recog = config.r_model.recognition_r();
    const double p_high = recall_probability(
        last.alpha, last.alpha_bar() - last.alpha, r_recog);
    const double p_single =
        recall_probability(1.0, last.alpha_bar() - 1.0, r_recog);
    std::bernoulli_distribution high(p_high);
    std::bernoulli_distribution single(p_single);
    person.recognized_high = high(rng);
    person.recognized_low_same = last.n1 >= 2 ? single(rng) : false;
    person.recognized_low_other = last.n0 >= 1 ? single(rng) : false;
    person.recognized_absent_a = false;
    person.recognized_absent_b = false;

    data.participants.push_back(std::move(person));
  }
  return data;
}

std::vector<EstimationRow> filter_dataset(const std::vector<EstimationRow>& rows,
                                          double max_abs_error) {
  if (!(max_abs_error >= 0.0))
    throw std::invalid_argument(
        fmt::format("error bound must be >= 0, got {}", max_abs_error));
  std::vector<EstimationRow> kept;
  kept.reserve(rows.size());
  for (const EstimationRow& row : rows) {
    if (row.known_question &&
        (std::abs(row.y1 - row.n1) > max_abs_error ||
         std::abs(row.y0 - row.n0) > max_abs_error))
      continue;
    kept.push_back(row);
  }
  return kept;
}

namespace {

// Rows collapse into design cells keyed by everything the model mean can
// depend on; the sum of squares then costs O(cells) per candidate.
struct Cell {
  int alpha = 0;
  int alpha_bar = 0;
  bool same_color = false;
  bool known_question = false;
  double n = 0.0;
  double sum_y = 0.0;
  double sum_y2 = 0.0;
};

std::vector<Cell> build_cells(const std::vector<EstimationRow>& rows) {
  std::map<std::tuple<int, int, bool, bool>, Cell> cells;
  for (const EstimationRow& row : rows) {
    Cell& c = cells[{row.alpha, row.alpha_bar, row.same_color,
                     row.known_question}];
    c.alpha = row.alpha;
    c.alpha_bar = row.alpha_bar;
    c.same_color = row.same_color;
    c.known_question = row.known_question;
    c.n += 1.0;
    c.sum_y += row.y;
    c.sum_y2 += row.y * row.y;
  }
  std::vector<Cell> out;
  out.reserve(cells.size());
  for (auto& [key, cell] : cells) out.push_back(cell);
  return out;
}

double cell_r(const Cell& cell, const std::vector<double>& params,
              const std::vector<Covariate>& covariates) {
  double r = params[0];
  for (std::size_t j = 0; j < covariates.size(); ++j) {
    const bool x = covariates[j] == Covariate::same_color
                       ? cell.same_color
                       : !cell.known_question;
    if (x) r += params[j + 1];
  }
  return r < 0.0 ? 0.0 : r;
}

double cells_ssr(const std::vector<Cell>& cells,
                 const std::vector<double>& params,
                 const std::vector<Covariate>& covariates, OvercountForm form) {
  double ssr = 0.0;
  for (const Cell& cell : cells) {
    const double mu =
        overcount_mean(cell.alpha, cell.alpha_bar, cell_r(cell, params, covariates),
                       form);
    ssr += cell.sum_y2 - 2.0 * mu * cell.sum_y + cell.n * mu * mu;
  }
  return ssr;
}

void check_identifiable(const std::vector<EstimationRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("no rows to fit");
  const int first = rows.front().alpha;
  for (const EstimationRow& row : rows)
    if (row.alpha != first) return;
  throw std::invalid_argument(
      "all rows share one repetition count; the interference strength is not "
      "identified");
}

}  // namespace

FitResult fit_r(const std::vector<EstimationRow>& rows,
                const std::vector<Covariate>& covariates,
                const FitOptions& options) {
  check_identifiable(rows);
  const std::vector<Cell> cells = build_cells(rows);
  const std::size_t dim = 1 + covariates.size();

  std::vector<double> params(dim, 0.0);
  params[0] = std::min(0.1, options.r_max);
  std::vector<double> lo(dim, -options.r_max), hi(dim, options.r_max);
  lo[0] = 0.0;  // the baseline is a strength, boxed at zero

  FitResult result;
  const double x_tol = std::min(1e-10, options.step_tol * 1e-3);
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double before = params[c];
      auto profile = [&](double v) {
        std::vector<double> trial = params;
        trial[c] = v;
        return cells_ssr(cells, trial, covariates, options.form);
      };
      params[c] = golden_section_min(profile, lo[c], hi[c], x_tol).x;
      max_step = std::max(max_step, std::abs(params[c] - before));
    }
    result.sweeps = sweep + 1;
    result.final_step = max_step;
    if (max_step < options.step_tol) {
      result.converged = true;
      break;
    }
  }

  const double n = static_cast<double>(rows.size());
  const double ssr =
      std::max(0.0, cells_ssr(cells, params, covariates, options.form));
  result.coefficients = params;
  result.sigma_eps = std::sqrt(ssr / n);
  const double var = std::max(ssr / n, 1e-300);
  result.log_likelihood =
      -0.5 * n * (std::log(2.0 * M_PI * var) + 1.0);
  return result;
}

namespace {

double percentile(std::vector<double> sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) throw std::invalid_argument("no samples for a percentile");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = p * (n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const double w = h - lo;
  if (lo + 1 >= n) return sorted.back();
  return sorted[lo] * (1.0 - w) + sorted[lo + 1] * w;
}

}  // namespace

BootstrapResult bootstrap_ci(
    const std::vector<EstimationRow>& rows,
    const std::function<double(const std::vector<EstimationRow>&)>& statistic,
    int reps, double level, std::uint64_t seed, int threads) {
  if (reps < 2)
    throw std::invalid_argument(fmt::format("need >= 2 replicates, got {}", reps));
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument(fmt::format("level must lie in (0, 1), got {}", level));

  // clusters in first-appearance order
  std::vector<int> cluster_ids;
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto [it, inserted] = members.try_emplace(rows[i].participant);
    if (inserted) cluster_ids.push_back(rows[i].participant);
    it->second.push_back(i);
  }
  if (cluster_ids.size() < 2)
    throw std::invalid_argument(
        "clustered resampling needs at least two participants");

  std::vector<double> stats(static_cast<std::size_t>(reps), 0.0);
  const std::size_t k = cluster_ids.size();
  parallel_for(reps, threads, [&](std::int64_t rep) {
    RngEngine rng(mix_seed(seed, static_cast<std::uint64_t>(rep)));
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::vector<EstimationRow> resampled;
    resampled.reserve(rows.size());
    for (std::size_t c = 0; c < k; ++c) {
      const int id = cluster_ids[pick(rng)];
      for (std::size_t idx : members.at(id)) resampled.push_back(rows[idx]);
    }
    stats[static_cast<std::size_t>(rep)] = statistic(resampled);
  });

  std::sort(stats.begin(), stats.end());
  BootstrapResult out;
  out.point = statistic(rows);
  out.reps = reps;
  out.level = level;
  const double tail = 0.5 * (1.0 - level);
  out.lo = percentile(stats, tail);
  out.hi = percentile(stats, 1.0 - tail + kQuantileGuard);
  return out;
}

RecallCurveFit fit_recall_curve(const std::vector<RecallTriple>& triples,
                                double r_max) {
  if (triples.empty())
    throw std::invalid_argument("no recognition outcomes to fit");
  for (const RecallTriple& t : triples) {
    if (t.alpha < 1 || t.alpha_bar < t.alpha)
      throw std::invalid_argument(
          fmt::format("bad recognition triple alpha={} alpha_bar={}", t.alpha,
                      t.alpha_bar));
  }
  auto log_lik = [&](double r) {
    double total = 0.0;
    for (const RecallTriple& t : triples) {
      double p = recall_probability(t.alpha, t.alpha_bar - t.alpha, r);
      p = std::min(1.0 - 1e-12, std::max(1e-12, p));
      total += t.remembered ? std::log(p) : std::log1p(-p);
    }
    return total;
  };

  bool all_yes = true, all_no = true;
  for (const RecallTriple& t : triples) {
    all_yes = all_yes && t.remembered;
    all_no = all_no && !t.remembered;
  }
  RecallCurveFit fit;
  if (all_yes || all_no) {
    fit.r = all_yes ? 0.0 : r_max;  // likelihood is monotone; report the edge
    fit.boundary_warning = true;
    fit.log_likelihood = log_lik(fit.r);
    return fit;
  }
  const GoldenResult g = golden_section_max(log_lik, 0.0, r_max, 1e-10);
  fit.r = g.x;
  fit.log_likelihood = g.fx;
  return fit;
}

std::vector<RecallTriple> recognition_triples(
    const std::vector<ParticipantRecord>& participants) {
  std::vector<RecallTriple> triples;
  for (const ParticipantRecord& person : participants) {
    if (person.feeds.empty()) continue;
    const FeedSpec& last = person.feeds.back();
    triples.push_back({last.alpha, last.alpha_bar(), person.recognized_high});
    if (last.n1 >= 2)
      triples.push_back({1, last.alpha_bar(), person.recognized_low_same});
    if (last.n0 >= 1)
      triples.push_back({1, last.alpha_bar(), person.recognized_low_other});
  }
  return triples;
}

std::vector<CurvePoint> overcount_curve(const std::vector<EstimationRow>& rows,
                                        double r, int reps, double level,
                                        std::uint64_t seed) {
  if (r < 0.0)
    throw std::domain_error(fmt::format("interference must be >= 0, got {}", r));
  std::map<int, std::vector<EstimationRow>> groups;
  for (const EstimationRow& row : rows) groups[row.alpha].push_back(row);

  auto mean_y = [](const std::vector<EstimationRow>& subset) {
    double total = 0.0;
    for (const EstimationRow& row : subset) total += row.y;
    return total / static_cast<double>(subset.size());
  };

  std::vector<CurvePoint> curve;
  for (auto& [alpha, subset] : groups) {
    CurvePoint point;
    point.alpha = alpha;
    point.count = static_cast<std::int64_t>(subset.size());
    point.mean_y = mean_y(subset);
    double model = 0.0;
    for (const EstimationRow& row : subset)
      model += overcount_mean(row.alpha, row.alpha_bar, r);
    point.model = model / static_cast<double>(subset.size());

    std::vector<int> distinct;
    for (const EstimationRow& row : subset)
      if (distinct.empty() || distinct.back() != row.participant)
        distinct.push_back(row.participant);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() >= 2) {
      const BootstrapResult ci = bootstrap_ci(
          subset, mean_y, reps, level,
          mix_seed(seed, static_cast<std::uint64_t>(alpha)));
      point.ci_lo = ci.lo;
      point.ci_hi = ci.hi;
    } else {
      point.ci_lo = point.ci_hi = point.mean_y;
    }
    curve.push_back(point);
  }
  return curve;
}

PosteriorSummary posterior_sample(const std::vector<EstimationRow>& rows,
                                  const std::vector<Covariate>& covariates,
                                  const PosteriorOptions& options) {
  if (options.draws < 10)
    throw std::invalid_argument("posterior sampling needs at least 10 draws");
  check_identifiable(rows);
  const std::vector<Cell> cells = build_cells(rows);
  const std::size_t dim = 1 + covariates.size();
  const double n = static_cast<double>(rows.size());

  const FitResult start = fit_r(rows, covariates);
  std::vector<double> coefs = start.coefficients;
  double log_sigma = std::log(std::max(start.sigma_eps, 1e-3));

  auto log_post = [&](const std::vector<double>& c, double ls) {
    if (c[0] < 0.0 || c[0] > 10.0) return -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < c.size(); ++j)
      if (std::abs(c[j]) > 10.0)
        return -std::numeric_limits<double>::infinity();
    if (ls < -20.0 || ls > 20.0)
      return -std::numeric_limits<double>::infinity();
    const double sigma2 = std::exp(2.0 * ls);
    const double ssr = cells_ssr(cells, c, covariates, OvercountForm::all_messages);
    return -n * ls - 0.5 * ssr / sigma2;  // flat priors on coefs and log sigma
  };

  RngEngine rng(options.seed);
  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  double current = log_post(coefs, log_sigma);
  const int burn = options.draws / 2;
  std::vector<std::vector<double>> kept;
  kept.reserve(static_cast<std::size_t>(options.draws - burn));
  int accepted = 0;
  for (int d = 0; d < options.draws; ++d) {
    std::vector<double> prop = coefs;
    for (double& c : prop) c += options.coef_scale * step(rng);
    const double prop_ls = log_sigma + options.sigma_scale * step(rng);
    const double cand = log_post(prop, prop_ls);
    if (std::log(unif(rng)) < cand - current) {
      coefs = prop;
      log_sigma = prop_ls;
      current = cand;
      ++accepted;
    }
    if (d >= burn) {
      std::vector<double> sample = coefs;
      sample.push_back(std::exp(log_sigma));
      kept.push_back(std::move(sample));
    }
  }

  PosteriorSummary summary;
  const std::size_t width = dim + 1;
  summary.mean.assign(width, 0.0);
  summary.sd.assign(width, 0.0);
  summary.lo.assign(width, 0.0);
  summary.hi.assign(width, 0.0);
  summary.acceptance_rate = accepted / static_cast<double>(options.draws);
  for (std::size_t c = 0; c < width; ++c) {
    std::vector<double> column;
    column.reserve(kept.size());
    for (const auto& sample : kept) column.push_back(sample[c]);
    const double mean =
        std::accumulate(column.begin(), column.end(), 0.0) / column.size();
    double var = 0.0;
    for (double v : column) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(1, column.size() - 1);
    summary.mean[c] = mean;
    summary.sd[c] = std::sqrt(var);
    std::sort(column.begin(), column.end());
    summary.lo[c] = percentile(column, 0.025);
    summary.hi[c] = percentile(column, 0.975);
  }
  return summary;
}

void write_dataset_csv(const std::vector<EstimationRow>& rows,
                       const std::string& path, const std::string& header) {
  std::string out;
  if (!header.empty()) out += header + "\n";
  out +=
      "participant,feed,n_total,n1,n0,alpha,alpha_bar,Y1,Y0,Y,same_color,"
      "known_question\n";
  for (const EstimationRow& row : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", row.participant,
                       row.feed, row.n_total, row.n1, row.n0, row.alpha,
                       row.alpha_bar, format_number(row.y1),
                       format_number(row.y0), format_number(row.y),
                       row.same_color ? 1 : 0, row.known_question ? 1 : 0);
  write_text_file(path, out);
}

}  // namespace feedsim
