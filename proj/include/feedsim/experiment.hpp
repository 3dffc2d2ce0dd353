#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "feedsim/model.hpp"

namespace feedsim {

/// Which messages of the repeated sender count toward the overcount: all of
/// them (the default mean alpha * (1 - p_r)) or only the repeats beyond the
/// first ((alpha - 1) * (1 - p_r)), kept as a robustness variant.
enum class OvercountForm { all_messages, repeats_only };

/// How synthetic answers are produced: from the mean formula plus Gaussian
/// noise, or by sampling per-message recall of the repeated sender.
enum class GenerationMethod { formula, recall_sim };

/// One synthetic feed shown to a participant. The repeated ("high") sender
/// posts alpha identical messages; every other sender posts once, so the
/// total message count is (n_total - 1) + alpha.
struct FeedSpec {
  int feed_index = 0;   // 1..3; the question is revealed only from feed 2 on
  int n_total = 0;      // senders, one of {8, 10}
  int n1 = 0;           // senders on the high sender's side (incl. the high sender)
  int n0 = 0;           // senders on the other side
  int alpha = 0;        // repetitions of the high sender, 1..6
  bool show_picture = false;
  bool same_color = false;  // participant's own color matches the high sender's
  int alpha_bar() const { return n_total - 1 + alpha; }
};

/// A participant's three feeds with raw integer answers, plus end-of-study
/// name-recognition outcomes for feed 3: the high sender, one same-side and
/// one other-side single-post sender, and two names never shown.
struct ParticipantRecord {
  int id = 0;
  bool own_color = false;  // the color the participant perceives
  std::vector<FeedSpec> feeds;
  std::vector<std::int64_t> y1_answers;  // per feed, >= 0
  std::vector<std::int64_t> y0_answers;
  std::vector<bool> noticed_repetition;
  bool recognized_high = false;
  bool recognized_low_same = false;
  bool recognized_low_other = false;
  bool recognized_absent_a = false;
  bool recognized_absent_b = false;
};

/// One estimation row. Y differences out the known side sizes:
/// Y = (Y1 - Y0) - (n1 - n0); its mean is the expected overcount.
struct EstimationRow {
  int participant = 0;
  int feed = 0;
  int n_total = 0;
  int n1 = 0;
  int n0 = 0;
  int alpha = 0;
  int alpha_bar = 0;
  double y1 = 0.0;
  double y0 = 0.0;
  double y = 0.0;
  bool same_color = false;
  bool known_question = false;  // feeds 2 and 3
};

/// Interference strength written as a baseline plus covariate shifts, with
/// the per-row value floored at zero. sigma_eps is the noise scale of Y.
struct RModel {
  double r0 = 0.0;
  double r_same_color = 0.0;
  double r_unknown_question = 0.0;  // added on feed 1, where the question is unknown
  double r_recognition = -1.0;      // recall strength for name recognition; < 0 means r0
  double sigma_eps = 0.0;

  double row_r(bool same_color, bool known_question) const;
  double recognition_r() const { return r_recognition < 0 ? r0 : r_recognition; }
};

struct GenerateConfig {
  int num_participants = 0;
  RModel r_model;
  std::uint64_t seed = 0;
  double share_same_color = 0.5;
  double eta_sigma = 0.0;  // participant-level common error; cancels in Y
  OvercountForm form = OvercountForm::all_messages;
  GenerationMethod method = GenerationMethod::formula;
};

struct Dataset {
  std::vector<EstimationRow> rows;
  std::vector<ParticipantRecord> participants;
};

/// Covariates the interference fit can include.
enum class Covariate { same_color, unknown_question };

struct FitOptions {
  OvercountForm form = OvercountForm::all_messages;
  double r_max = 10.0;
  double step_tol = 1e-7;
  int max_sweeps = 300;
};

/// Fitted coefficients: index 0 is the baseline r0, then one entry per
/// requested covariate in order.
struct FitResult {
  std::vector<double> coefficients;
  double sigma_eps = 0.0;
  double log_likelihood = 0.0;
  int sweeps = 0;
  bool converged = false;
  double final_step = 0.0;
};

struct BootstrapResult {
  double lo = 0.0;
  double hi = 0.0;
  double point = 0.0;  // statistic on the original rows
  int reps = 0;
  double level = 0.0;
};

struct RecallTriple {
  int alpha = 0;
  int alpha_bar = 0;
  bool remembered = false;
};

struct RecallCurveFit {
  double r = 0.0;
  double log_likelihood = 0.0;
  bool boundary_warning = false;  // all outcomes identical
};

struct CurvePoint {
  int alpha = 0;
  std::int64_t count = 0;
  double mean_y = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double model = 0.0;  // mean predicted overcount across the group's rows
};

struct PosteriorOptions {
  int draws = 10000;  // half are discarded as burn-in
  double coef_scale = 0.02;
  double sigma_scale = 0.05;
  std::uint64_t seed = 0;
};

struct PosteriorSummary {
  std::vector<double> mean;       // coefficients then sigma
  std::vector<double> sd;
  std::vector<double> lo;         // central 95% interval
  std::vector<double> hi;
  double acceptance_rate = 0.0;
};

/// Expected overcount of the repeated sender: alpha * (1 - p_r) with
/// p_r = alpha / (alpha + r * (alpha_bar - alpha)).
double overcount_mean(double alpha, double alpha_bar, double r,
                      OvercountForm form = OvercountForm::all_messages);

/// Synthesizes participants and estimation rows: three feeds each, feed
/// sizes in {8, 10}, repetitions uniform on {1..6}, side split uniform on
/// {1..n} for the high sender's side. Deterministic given the seed.
Dataset generate_dataset(const GenerateConfig& config);

/// Drops rows from feeds 2-3 whose raw answers miss the true side size by
/// more than max_abs_error; feed-1 rows are never dropped.
std::vector<EstimationRow> filter_dataset(const std::vector<EstimationRow>& rows,
                                          double max_abs_error = 5.0);

/// Gaussian maximum likelihood for the interference coefficients: coordinate
/// descent with golden-section line searches, stopping when no coordinate
/// moves by more than step_tol. Requires at least two distinct alpha values.
FitResult fit_r(const std::vector<EstimationRow>& rows,
                const std::vector<Covariate>& covariates = {},
                const FitOptions& options = {});

/// Percentile bootstrap clustered by participant. Statistic evaluations use
/// derived per-replicate seeds, so results are independent of thread count.
BootstrapResult bootstrap_ci(
    const std::vector<EstimationRow>& rows,
    const std::function<double(const std::vector<EstimationRow>&)>& statistic,
    int reps = 2000, double level = 0.95, std::uint64_t seed = 0,
    int threads = 1);

/// Bernoulli maximum likelihood for the recall curve
/// p = alpha / (alpha + r * (alpha_bar - alpha)) over name-recognition data.
RecallCurveFit fit_recall_curve(const std::vector<RecallTriple>& triples,
                                double r_max = 10.0);

/// Name-recognition outcomes pooled across participants (high sender and the
/// single-post senders actually shown; absent names carry no rate and are
/// excluded).
std::vector<RecallTriple> recognition_triples(
    const std::vector<ParticipantRecord>& participants);

/// Mean Y by repetition count with clustered bootstrap intervals and the
/// model-predicted overcount at interference strength r.
std::vector<CurvePoint> overcount_curve(const std::vector<EstimationRow>& rows,
                                        double r, int reps = 2000,
                                        double level = 0.95,
                                        std::uint64_t seed = 0);

/// Random-walk Metropolis over (coefficients, log sigma) with flat priors;
/// a cross-check on the likelihood fit, not the primary estimator.
PosteriorSummary posterior_sample(const std::vector<EstimationRow>& rows,
                                  const std::vector<Covariate>& covariates,
                                  const PosteriorOptions& options);

/// Writes columns participant, feed, n_total, n1, n0, alpha, alpha_bar,
/// Y1, Y0, Y, same_color, known_question.
void write_dataset_csv(const std::vector<EstimationRow>& rows,
                       const std::string& path, const std::string& header = "");

}  // namespace feedsim
