#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "feedsim/bandwidth.hpp"
#include "feedsim/belief.hpp"
#include "feedsim/experiment.hpp"
#include "feedsim/io.hpp"
#include "feedsim/model.hpp"
#include "feedsim/poisson_feed.hpp"
#include "feedsim/pricing.hpp"
#include "feedsim/recall.hpp"

namespace py = pybind11;
using namespace feedsim;

namespace {

Population build_population(const std::vector<double>& rates,
                            const std::vector<double>& p_hi,
                            const std::vector<double>& p_lo, int theta,
                            const std::optional<std::vector<int>>& signals,
                            std::uint64_t seed) {
  if (p_hi.size() != p_lo.size()) {
    throw std::invalid_argument("p_high and p_low must have the same length");
  }
  std::vector<SignalModel> models;
  models.reserve(p_hi.size());
  for (std::size_t i = 0; i < p_hi.size(); ++i) {
    models.emplace_back(p_hi[i], p_lo[i]);
  }
  const WorldState state = theta == 1 ? WorldState::one : WorldState::zero;
  if (theta != 0 && theta != 1) {
    throw std::invalid_argument("theta must be 0 or 1");
  }
  if (signals) {
    return make_population_with_signals(rates, models, *signals, state);
  }
  RngEngine rng(seed);
  return make_population(rates, models, state, rng);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Learning from Poisson message feeds under imperfect recall: "
      "simulation, asymptotics, and estimation.";
  m.attr("__version__") = kVersion;

  py::enum_<WorldState>(m, "WorldState")
      .value("zero", WorldState::zero)
      .value("one", WorldState::one);

  py::class_<SignalModel>(m, "SignalModel")
      .def(py::init<double, double>(), py::arg("p_hi"), py::arg("p_lo"))
      .def_readonly("p_hi", &SignalModel::p_hi)
      .def_readonly("p_lo", &SignalModel::p_lo)
      .def("__repr__", [](const SignalModel& s) {
        return "SignalModel(p_hi=" + std::to_string(s.p_hi) +
               ", p_lo=" + std::to_string(s.p_lo) + ")";
      });

  py::class_<LlrWeights>(m, "LlrWeights")
      .def_readonly("lambda_hi", &LlrWeights::lambda_hi)
      .def_readonly("lambda_lo", &LlrWeights::lambda_lo);

  m.def("llr_weights", &llr_weights, py::arg("model"));
  m.def("kl_binary", &kl_binary, py::arg("model"));

  py::class_<Sender>(m, "Sender")
      .def_readonly("id", &Sender::id)
      .def_readonly("rate", &Sender::rate)
      .def_readonly("signal_model", &Sender::signal_model)
      .def_readonly("signal", &Sender::signal);

  py::class_<Population>(m, "Population")
      .def_property_readonly("size", &Population::size)
      .def_property_readonly("alpha_bar", &Population::alpha_bar)
      .def_property_readonly(
          "theta", [](const Population& p) { return state_value(p.theta()); })
      .def_property_readonly("senders",
                             [](const Population& p) { return p.senders(); })
      .def("sender", &Population::sender, py::arg("id"));

  m.def(
      "population",
      [](const std::vector<double>& rates, double p_hi, double p_lo, int theta,
         const std::optional<std::vector<int>>& signals, std::uint64_t seed) {
        return build_population(rates, {p_hi}, {p_lo}, theta, signals, seed);
      },
      py::arg("rates"), py::arg("p_high") = 0.75, py::arg("p_low") = 0.25,
      py::arg("theta") = 1, py::arg("signals") = std::nullopt,
      py::arg("seed") = 0,
      "Population with one shared signal quality; signals are drawn from "
      "the seed unless given explicitly.");
  m.def(
      "population",
      [](const std::vector<double>& rates, const std::vector<double>& p_hi,
         const std::vector<double>& p_lo, int theta,
         const std::optional<std::vector<int>>& signals, std::uint64_t seed) {
        return build_population(rates, p_hi, p_lo, theta, signals, seed);
      },
      py::arg("rates"), py::arg("p_high"), py::arg("p_low"),
      py::arg("theta") = 1, py::arg("signals") = std::nullopt,
      py::arg("seed") = 0, "Population with per-sender signal qualities.");

  py::class_<Message>(m, "Message")
      .def_readonly("time", &Message::time)
      .def_readonly("source_id", &Message::source_id)
      .def_readonly("content", &Message::content);

  py::class_<Feed>(m, "Feed")
      .def_readonly("messages", &Feed::messages)
      .def_readonly("horizon", &Feed::horizon)
      .def("__len__", [](const Feed& f) { return f.messages.size(); });

  m.def(
      "sample_feed",
      [](const Population& population, double horizon, std::uint64_t seed) {
        RngEngine rng(seed);
        return sample_feed(population, horizon, rng);
      },
      py::arg("population"), py::arg("horizon"), py::arg("seed") = 0);
  m.def(
      "thin_feed",
      [](const Feed& feed, double keep_prob, std::uint64_t seed) {
        RngEngine rng(seed);
        return thin_feed(feed, keep_prob, rng);
      },
      py::arg("feed"), py::arg("keep_prob"), py::arg("seed") = 0);

  py::class_<RecallState>(m, "RecallState")
      .def(py::init<int>(), py::arg("num_senders"))
      .def("count_for", &RecallState::count_for, py::arg("source_id"))
      .def_property_readonly("total", &RecallState::total)
      .def("recorded", &RecallState::recorded, py::arg("source_id"));

  m.def("recall_probability", &recall_probability, py::arg("m"),
        py::arg("t_other"), py::arg("r"));
  m.def("asymptotic_recall", &asymptotic_recall, py::arg("alpha_i"),
        py::arg("alpha_bar"), py::arg("r"));

  py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
      .def_readonly("time", &TrajectoryPoint::time)
      .def_readonly("phi", &TrajectoryPoint::phi);

  py::class_<BeliefTrajectory>(m, "BeliefTrajectory")
      .def_readonly("points", &BeliefTrajectory::points)
      .def_readonly("final_phi", &BeliefTrajectory::final_phi);

  py::class_<RateSummary>(m, "RateSummary")
      .def_readonly("rate", &RateSummary::rate)
      .def_readonly("per_sender_terms", &RateSummary::per_sender_terms);

  m.def("bayesian_phi", &bayesian_phi, py::arg("feed"), py::arg("population"));
  m.def("bayesian_trajectory", &bayesian_trajectory, py::arg("feed"),
        py::arg("population"));
  m.def("expected_bayesian_phi", &expected_bayesian_phi, py::arg("population"),
        py::arg("t"));
  m.def("bayesian_limit", &bayesian_limit, py::arg("population"));
  m.def(
      "simulate_nonbayesian",
      [](const Feed& feed, const Population& population, double r,
         std::uint64_t seed) {
        RngEngine rng(seed);
        return simulate_nonbayesian(feed, population, r, rng);
      },
      py::arg("feed"), py::arg("population"), py::arg("r"), py::arg("seed") = 0);
  m.def("nonbayesian_rate", &nonbayesian_rate, py::arg("population"),
        py::arg("r"));
  m.def("sender_influence", &sender_influence, py::arg("sender_id"),
        py::arg("population"), py::arg("r"));

  py::class_<MislearningResult>(m, "MislearningResult")
      .def_readonly("p_wrong", &MislearningResult::p_wrong)
      .def_readonly("p_correct", &MislearningResult::p_correct)
      .def_readonly("p_tie", &MislearningResult::p_tie);

  py::class_<MislearningEstimate>(m, "MislearningEstimate")
      .def_readonly("value", &MislearningEstimate::value)
      .def_readonly("se_wrong", &MislearningEstimate::se_wrong)
      .def_readonly("se_correct", &MislearningEstimate::se_correct)
      .def_readonly("se_tie", &MislearningEstimate::se_tie)
      .def_readonly("draws", &MislearningEstimate::draws);

  m.def("mislearning_probability", &mislearning_probability,
        py::arg("signal_models"), py::arg("rates"), py::arg("r"));
  m.def(
      "mislearning_probability_mc",
      [](const std::vector<SignalModel>& models,
         const std::vector<double>& rates, double r, std::int64_t draws,
         std::uint64_t seed) {
        RngEngine rng(seed);
        return mislearning_probability_mc(models, rates, r, draws, rng);
      },
      py::arg("signal_models"), py::arg("rates"), py::arg("r"),
      py::arg("draws"), py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());

  py::enum_<OvercountForm>(m, "OvercountForm")
      .value("all_messages", OvercountForm::all_messages)
      .value("repeats_only", OvercountForm::repeats_only);

  py::enum_<GenerationMethod>(m, "GenerationMethod")
      .value("formula", GenerationMethod::formula)
      .value("recall_sim", GenerationMethod::recall_sim);

  py::enum_<Covariate>(m, "Covariate")
      .value("same_color", Covariate::same_color)
      .value("unknown_question", Covariate::unknown_question);

  py::class_<FeedSpec>(m, "FeedSpec")
      .def_readonly("feed_index", &FeedSpec::feed_index)
      .def_readonly("n_total", &FeedSpec::n_total)
      .def_readonly("n1", &FeedSpec::n1)
      .def_readonly("n0", &FeedSpec::n0)
      .def_readonly("alpha", &FeedSpec::alpha)
      .def_readonly("show_picture", &FeedSpec::show_picture)
      .def_readonly("same_color", &FeedSpec::same_color)
      .def_property_readonly("alpha_bar", &FeedSpec::alpha_bar);

  py::class_<ParticipantRecord>(m, "ParticipantRecord")
      .def_readonly("id", &ParticipantRecord::id)
      .def_readonly("own_color", &ParticipantRecord::own_color)
      .def_readonly("feeds", &ParticipantRecord::feeds)
      .def_readonly("y1_answers", &ParticipantRecord::y1_answers)
      .def_readonly("y0_answers", &ParticipantRecord::y0_answers)
      .def_readonly("noticed_repetition", &ParticipantRecord::noticed_repetition)
      .def_readonly("recognized_high", &ParticipantRecord::recognized_high)
      .def_readonly("recognized_low_same", &ParticipantRecord::recognized_low_same)
      .def_readonly("recognized_low_other",
                    &ParticipantRecord::recognized_low_other)
      .def_readonly("recognized_absent_a", &ParticipantRecord::recognized_absent_a)
      .def_readonly("recognized_absent_b",
                    &ParticipantRecord::recognized_absent_b);

  py::class_<EstimationRow>(m, "EstimationRow")
      .def_readonly("participant", &EstimationRow::participant)
      .def_readonly("feed", &EstimationRow::feed)
      .def_readonly("n_total", &EstimationRow::n_total)
      .def_readonly("n1", &EstimationRow::n1)
      .def_readonly("n0", &EstimationRow::n0)
      .def_readonly("alpha", &EstimationRow::alpha)
      .def_readonly("alpha_bar", &EstimationRow::alpha_bar)
      .def_readonly("y1", &EstimationRow::y1)
      .def_readonly("y0", &EstimationRow::y0)
      .def_readonly("y", &EstimationRow::y)
      .def_readonly("same_color", &EstimationRow::same_color)
      .def_readonly("known_question", &EstimationRow::known_question);

  py::class_<RModel>(m, "RModel")
      .def(py::init<>())
      .def_readwrite("r0", &RModel::r0)
      .def_readwrite("r_same_color", &RModel::r_same_color)
      .def_readwrite("r_unknown_question", &RModel::r_unknown_question)
      .def_readwrite("r_recognition", &RModel::r_recognition)
      .def_readwrite("sigma_eps", &RModel::sigma_eps)
      .def("row_r", &RModel::row_r, py::arg("same_color"),
           py::arg("known_question"));

  py::class_<GenerateConfig>(m, "GenerateConfig")
      .def(py::init<>())
      .def_readwrite("num_participants", &GenerateConfig::num_participants)
      .def_readwrite("r_model", &GenerateConfig::r_model)
      .def_readwrite("seed", &GenerateConfig::seed)
      .def_readwrite("share_same_color", &GenerateConfig::share_same_color)
      .def_readwrite("eta_sigma", &GenerateConfig::eta_sigma)
      .def_readwrite("form", &GenerateConfig::form)
      .def_readwrite("method", &GenerateConfig::method);

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("rows", &Dataset::rows)
      .def_readonly("participants", &Dataset::participants);

  py::class_<FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("form", &FitOptions::form)
      .def_readwrite("r_max", &FitOptions::r_max)
      .def_readwrite("step_tol", &FitOptions::step_tol)
      .def_readwrite("max_sweeps", &FitOptions::max_sweeps);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("coefficients", &FitResult::coefficients)
      .def_readonly("sigma_eps", &FitResult::sigma_eps)
      .def_readonly("log_likelihood", &FitResult::log_likelihood)
      .def_readonly("sweeps", &FitResult::sweeps)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("final_step", &FitResult::final_step);

  py::class_<BootstrapResult>(m, "BootstrapResult")
      .def_readonly("lo", &BootstrapResult::lo)
      .def_readonly("hi", &BootstrapResult::hi)
      .def_readonly("point", &BootstrapResult::point)
      .def_readonly("reps", &BootstrapResult::reps)
      .def_readonly("level", &BootstrapResult::level);

  py::class_<RecallTriple>(m, "RecallTriple")
      .def(py::init<>())
      .def_readwrite("alpha", &RecallTriple::alpha)
      .def_readwrite("alpha_bar", &RecallTriple::alpha_bar)
      .def_readwrite("remembered", &RecallTriple::remembered);

  py::class_<RecallCurveFit>(m, "RecallCurveFit")
      .def_readonly("r", &RecallCurveFit::r)
      .def_readonly("log_likelihood", &RecallCurveFit::log_likelihood)
      .def_readonly("boundary_warning", &RecallCurveFit::boundary_warning);

  py::class_<CurvePoint>(m, "CurvePoint")
      .def_readonly("alpha", &CurvePoint::alpha)
      .def_readonly("count", &CurvePoint::count)
      .def_readonly("mean_y", &CurvePoint::mean_y)
      .def_readonly("ci_lo", &CurvePoint::ci_lo)
      .def_readonly("ci_hi", &CurvePoint::ci_hi)
      .def_readonly("model", &CurvePoint::model);

  py::class_<PosteriorOptions>(m, "PosteriorOptions")
      .def(py::init<>())
      .def_readwrite("draws", &PosteriorOptions::draws)
      .def_readwrite("coef_scale", &PosteriorOptions::coef_scale)
      .def_readwrite("sigma_scale", &PosteriorOptions::sigma_scale)
      .def_readwrite("seed", &PosteriorOptions::seed);

  py::class_<PosteriorSummary>(m, "PosteriorSummary")
      .def_readonly("mean", &PosteriorSummary::mean)
      .def_readonly("sd", &PosteriorSummary::sd)
      .def_readonly("lo", &PosteriorSummary::lo)
      .def_readonly("hi", &PosteriorSummary::hi)
      .def_readonly("acceptance_rate", &PosteriorSummary::acceptance_rate);

  m.def("overcount_mean", &overcount_mean, py::arg("alpha"),
        py::arg("alpha_bar"), py::arg("r"),
        py::arg("form") = OvercountForm::all_messages);
  m.def("generate_dataset", &generate_dataset, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("filter_dataset", &filter_dataset, py::arg("rows"),
        py::arg("max_abs_error") = 5.0);
  m.def("fit_r", &fit_r, py::arg("rows"),
        py::arg("covariates") = std::vector<Covariate>{},
        py::arg("options") = FitOptions{},
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "bootstrap_r0",
      [](const std::vector<EstimationRow>& rows,
         const std::vector<Covariate>& covariates, const FitOptions& options,
         int reps, double level, std::uint64_t seed, int threads) {
        const auto statistic = [&](const std::vector<EstimationRow>& subset) {
          return fit_r(subset, covariates, options).coefficients[0];
        };
        return bootstrap_ci(rows, statistic, reps, level, seed, threads);
      },
      py::arg("rows"), py::arg("covariates") = std::vector<Covariate>{},
      py::arg("options") = FitOptions{}, py::arg("reps") = 2000,
      py::arg("level") = 0.95, py::arg("seed") = 0, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>(),
      "Percentile bootstrap interval for the baseline coefficient, "
      "clustered by participant.");
  m.def("fit_recall_curve", &fit_recall_curve, py::arg("triples"),
        py::arg("r_max") = 10.0);
  m.def("recognition_triples", &recognition_triples, py::arg("participants"));
  m.def("overcount_curve", &overcount_curve, py::arg("rows"), py::arg("r"),
        py::arg("reps") = 2000, py::arg("level") = 0.95, py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());
  m.def("posterior_sample", &posterior_sample, py::arg("rows"),
        py::arg("covariates"), py::arg("options"),
        py::call_guard<py::gil_scoped_release>());

  py::enum_<PriceFunction::Kind>(m, "PriceKind")
      .value("linear", PriceFunction::Kind::linear)
      .value("quadratic", PriceFunction::Kind::quadratic)
      .value("custom", PriceFunction::Kind::custom);

  py::class_<PriceFunction>(m, "PriceFunction")
      .def_static("linear", &PriceFunction::linear, py::arg("c1"))
      .def_static("quadratic", &PriceFunction::quadratic, py::arg("c2"))
      .def_static("custom", &PriceFunction::custom, py::arg("table"))
      .def_property_readonly("kind", &PriceFunction::kind)
      .def_property_readonly("coefficient", &PriceFunction::coefficient)
      .def("__call__", &PriceFunction::operator(), py::arg("alpha"))
      .def("derivative", &PriceFunction::derivative, py::arg("alpha"));

  py::class_<BestResponse>(m, "BestResponse")
      .def_readonly("alpha", &BestResponse::alpha)
      .def_readonly("utility", &BestResponse::utility)
      .def_readonly("iterations", &BestResponse::iterations);

  m.def("sender_utility", &sender_utility, py::arg("alpha_i"),
        py::arg("alpha_rest"), py::arg("price"));
  m.def("sender_utility_fixed_B", &sender_utility_fixed_B, py::arg("alpha_i"),
        py::arg("B"), py::arg("price"));
  m.def("calibrate_price", &calibrate_price, py::arg("n"), py::arg("B"),
        py::arg("kind"));
  m.def("best_response", &best_response, py::arg("B"), py::arg("price"),
        py::arg("tol") = 1e-6);
  m.def("foc_residual", &foc_residual, py::arg("alpha"), py::arg("B"),
        py::arg("price"));

  py::class_<BandwidthSchedule>(m, "BandwidthSchedule")
      .def(py::init([](const std::function<double(double)>& bandwidth,
                       double alpha_bar) {
             return BandwidthSchedule{bandwidth, alpha_bar};
           }),
           py::arg("bandwidth"), py::arg("alpha_bar"))
      .def_readonly("alpha_bar", &BandwidthSchedule::alpha_bar)
      .def("bandwidth",
           [](const BandwidthSchedule& s, double n) { return s.bandwidth(n); },
           py::arg("n"));

  py::class_<PopulationSequence>(m, "PopulationSequence")
      .def_readonly("alpha_bar", &PopulationSequence::alpha_bar)
      .def("generate",
           [](const PopulationSequence& s, int n) { return s.generate(n); },
           py::arg("n"));

  py::class_<DiagnosticRow>(m, "DiagnosticRow")
      .def_readonly("n", &DiagnosticRow::n)
      .def_readonly("bandwidth", &DiagnosticRow::bandwidth)
      .def_readonly("keep_prob", &DiagnosticRow::keep_prob)
      .def_readonly("bayes_rate", &DiagnosticRow::bayes_rate)
      .def_readonly("nonbayes_rate", &DiagnosticRow::nonbayes_rate)
      .def_readonly("verdict", &DiagnosticRow::verdict);

  py::class_<DiagnosticTable>(m, "DiagnosticTable")
      .def_readonly("rows", &DiagnosticTable::rows)
      .def_readonly("verdict", &DiagnosticTable::verdict);

  m.def("expected_bayesian_phi_marginal", &expected_bayesian_phi_marginal,
        py::arg("population"), py::arg("t"));
  m.def("thinning_prob", &thinning_prob, py::arg("schedule"), py::arg("n"));
  m.def("thin_population", &thin_population, py::arg("population"),
        py::arg("B"));
  m.def("bayesian_rate_per_capita", &bayesian_rate_per_capita,
        py::arg("population"), py::arg("t"));
  m.def("bayesian_benchmark", &bayesian_benchmark, py::arg("population"));
  m.def("nonbayesian_benchmark", &nonbayesian_benchmark, py::arg("population"));
  m.def("nonbayesian_rate_marginal", &nonbayesian_rate_marginal,
        py::arg("population"), py::arg("r"));
  m.def("bandwidth_learning_diagnostic", &bandwidth_learning_diagnostic,
        py::arg("sequence"), py::arg("schedule"), py::arg("n_grid"),
        py::arg("divergence_ratio") = 1.5);
  m.def("homogeneous_sequence", &homogeneous_sequence, py::arg("alpha"),
        py::arg("model"), py::arg("theta") = WorldState::one);
  m.def("iid_sequence", &iid_sequence, py::arg("rate_lo"), py::arg("rate_hi"),
        py::arg("p_hi_lo"), py::arg("p_hi_hi"), py::arg("p_lo_lo"),
        py::arg("p_lo_hi"), py::arg("seed"),
        py::arg("theta") = WorldState::one);
  m.def("constant_bandwidth", &constant_bandwidth, py::arg("B"),
        py::arg("alpha_bar"));
  m.def("linear_bandwidth", &linear_bandwidth, py::arg("B_bar"),
        py::arg("alpha_bar"));
  m.def("sqrt_bandwidth", &sqrt_bandwidth, py::arg("scale"),
        py::arg("alpha_bar"));
}
