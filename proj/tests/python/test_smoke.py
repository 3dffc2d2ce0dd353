import math

import pytest

import feedsim as fs


def test_version():
    assert fs.__version__ == "0.1.0"


def test_llr_weights_and_kl():
    m = fs.SignalModel(0.75, 0.25)
    w = fs.llr_weights(m)
    assert w.lambda_hi == pytest.approx(math.log(3.0), abs=1e-15)
    assert w.lambda_lo == pytest.approx(-math.log(3.0), abs=1e-15)
    assert fs.kl_binary(m) == pytest.approx(0.5493061443340549, abs=1e-15)
    with pytest.raises(ValueError):
        fs.SignalModel(0.25, 0.75)


def test_recall_probability():
    assert fs.recall_probability(3, 5, 2.0) == pytest.approx(3.0 / 13.0)
    assert fs.recall_probability(0, 0, 1.0) == 0.0
    assert fs.asymptotic_recall(2.0, 4.0, 0.5) == pytest.approx(2.0 / 3.0)


def test_population_and_rates():
    pop = fs.population([2.0, 1.0, 1.0], 0.75, 0.25, theta=1, signals=[1, 1, 0])
    assert pop.alpha_bar == pytest.approx(4.0)
    summary = fs.nonbayesian_rate(pop, 0.5)
    assert summary.rate == pytest.approx(0.7324081924454065, abs=1e-12)
    assert len(summary.per_sender_terms) == 3
    # interference off: drift equals the full-information limit scale
    assert fs.nonbayesian_rate(pop, 0.0).rate == pytest.approx(0.0)


def test_feed_simulation_deterministic():
    pop = fs.population([2.0, 1.0, 1.0], 0.75, 0.25, theta=1, signals=[1, 1, 0])
    feed_a = fs.sample_feed(pop, 50.0, seed=7)
    feed_b = fs.sample_feed(pop, 50.0, seed=7)
    assert [m.time for m in feed_a.messages] == [m.time for m in feed_b.messages]
    traj_a = fs.simulate_nonbayesian(feed_a, pop, 0.5, seed=3)
    traj_b = fs.simulate_nonbayesian(feed_b, pop, 0.5, seed=3)
    assert traj_a.final_phi == traj_b.final_phi
    assert len(traj_a.points) == len(feed_a.messages)


def test_mislearning():
    models = [fs.SignalModel(0.8, 0.2)] * 3
    res = fs.mislearning_probability(models, [1.0, 1.0, 1.0], 1.0)
    assert res.p_wrong == pytest.approx(0.104, abs=1e-12)
    assert res.p_wrong + res.p_correct + res.p_tie == pytest.approx(1.0)


def test_overcount_mean():
    assert fs.overcount_mean(6, 13, 0.16) == pytest.approx(
        0.9438202247191011, abs=1e-12
    )


def test_dataset_fit_recovery():
    cfg = fs.GenerateConfig()
    cfg.num_participants = 400
    cfg.r_model.r0 = 0.16
    cfg.r_model.sigma_eps = 0.0
    cfg.seed = 11
    ds = fs.generate_dataset(cfg)
    rows = [row for row in ds.rows if row.known_question]
    fit = fs.fit_r(rows, [], fs.FitOptions())
    assert fit.converged
    assert fit.coefficients[0] == pytest.approx(0.16, abs=1e-6)


def test_bootstrap_thread_stable():
    cfg = fs.GenerateConfig()
    cfg.num_participants = 120
    cfg.r_model.r0 = 0.2
    cfg.r_model.sigma_eps = 1.0
    cfg.seed = 5
    rows = [row for row in fs.generate_dataset(cfg).rows if row.known_question]
    a = fs.bootstrap_r0(rows, [], fs.FitOptions(), reps=80, level=0.9, seed=21,
                        threads=1)
    b = fs.bootstrap_r0(rows, [], fs.FitOptions(), reps=80, level=0.9, seed=21,
                        threads=4)
    assert (a.lo, a.hi, a.point) == (b.lo, b.hi, b.point)
    assert a.lo < 0.2 < a.hi


def test_pricing_best_response():
    price = fs.calibrate_price(10, 5.0, fs.PriceKind.linear)
    best = fs.best_response(5.0, price, 1e-10)
    assert best.alpha == pytest.approx(0.5, abs=1e-6)
    assert abs(fs.foc_residual(best.alpha, 5.0, price)) < 1e-8


def test_bandwidth_verdicts():
    model = fs.SignalModel(0.9, 0.5)
    seq = fs.homogeneous_sequence(1.0, model)
    grid = [10, 100, 1000, 10000]
    stalled = fs.bandwidth_learning_diagnostic(
        seq, fs.constant_bandwidth(5.0, 1.0), grid, 1.5
    )
    assert stalled.verdict == "stalled"
    sqrt = fs.bandwidth_learning_diagnostic(
        seq, fs.sqrt_bandwidth(1.6, 1.0), grid, 1.5
    )
    assert sqrt.verdict == "learning (sub-exponential in n)"
    assert len(sqrt.rows) == 4
    assert sqrt.rows[-1].bayes_rate == pytest.approx(fs.kl_binary(model), abs=0.05)
