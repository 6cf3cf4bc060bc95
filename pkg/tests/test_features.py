"""Feature models and the institution's best response."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from qualdyn import (
    BetaScore,
    ConfigurationError,
    DomainError,
    EconomyConfig,
    EmpiricalScore,
    GaussianHalfspace,
    GroupScores,
    GroupSpec,
    ParameterError,
    QualificationState,
    ScoreModel,
    Uniform01,
    UniformThreshold,
    coate_loury_threshold,
    decoupled_best_response,
    gaussian_tiebreak,
    institution_best_response,
    normalized_angle,
)
from qualdyn import features


def uniform_reference():
    economy = EconomyConfig(wage=0.6)
    groups = (
        GroupSpec(id="a1", proportion=0.5, cost=Uniform01()),
        GroupSpec(id="a2", proportion=0.5, cost=Uniform01()),
    )
    model = UniformThreshold((("a1", 0.4), ("a2", 0.8)))
    return economy, groups, model


def test_uniform_threshold_rates_by_hand():
    model = UniformThreshold((("a", 0.4),))
    # theta below h: everyone qualified is accepted, some unqualified too.
    tpr, fpr = model.tpr_fpr("a", 0.2)
    assert tpr == pytest.approx(1.0)
    assert fpr == pytest.approx(0.5)
    # theta above h: no false positives, qualified mass thinned linearly.
    tpr, fpr = model.tpr_fpr("a", 0.7)
    assert tpr == pytest.approx(0.5)
    assert fpr == 0.0
    # exactly at h: the clean separation point.
    assert model.tpr_fpr("a", 0.4) == (pytest.approx(1.0), pytest.approx(0.0))


def test_uniform_threshold_validation():
    with pytest.raises(ParameterError):
        UniformThreshold((("a", 0.0),))
    with pytest.raises(ParameterError):
        UniformThreshold((("a", 1.0),))
    with pytest.raises(ParameterError):
        UniformThreshold(())
    model = UniformThreshold((("b", 0.5), ("a", 0.3)))
    assert model.group_ids == ("a", "b")  # sorted for determinism
    with pytest.raises(ConfigurationError):
        model.threshold("missing")


def test_beta_score_matches_reference_distribution():
    dist = BetaScore(alpha=5.0, beta=2.0)
    xs = np.linspace(0.0, 1.0, 23)
    np.testing.assert_allclose(dist.cdf(xs), stats.beta.cdf(xs, 5, 2), atol=1e-12)
    interior = xs[1:-1]
    np.testing.assert_allclose(dist.pdf(interior), stats.beta.pdf(interior, 5, 2), rtol=1e-10)
    # out-of-range points carry no density and clamp the CDF
    assert dist.pdf(-0.5) == 0.0
    assert dist.pdf(1.5) == 0.0
    assert dist.cdf(-0.5) == 0.0
    assert dist.cdf(1.5) == 1.0
    with pytest.raises(ParameterError):
        BetaScore(alpha=0.0, beta=2.0)


def test_empirical_score_interpolates_and_validates():
    dist = EmpiricalScore(knots=((0.0, 0.0), (0.5, 0.2), (1.0, 1.0)))
    assert dist.cdf(0.25) == pytest.approx(0.1)
    assert dist.cdf(0.75) == pytest.approx(0.6)
    assert dist.cdf(-1.0) == 0.0
    assert dist.cdf(2.0) == 1.0
    with pytest.raises(ParameterError):
        EmpiricalScore(knots=((0.0, 0.0),))
    with pytest.raises(ParameterError):
        EmpiricalScore(knots=((0.1, 0.0), (1.0, 1.0)))  # first knot not (0, 0)
    with pytest.raises(ParameterError):
        EmpiricalScore(knots=((0.0, 0.0), (1.0, 0.9)))  # last knot not (1, 1)
    with pytest.raises(ParameterError):
        EmpiricalScore(knots=((0.0, 0.0), (0.5, 0.8), (0.5, 0.9), (1.0, 1.0)))
    with pytest.raises(ParameterError):
        EmpiricalScore(knots=((0.0, 0.0), (0.4, 0.7), (0.6, 0.5), (1.0, 1.0)))


def test_halfspace_geometry():
    model = GaussianHalfspace((("g1", (2.0, 0.0)), ("g2", (0.0, 3.0))))
    # input vectors are normalized on construction
    np.testing.assert_allclose(model.vector("g1"), [1.0, 0.0])
    np.testing.assert_allclose(model.vector("g2"), [0.0, 1.0])
    assert model.pair_angle == pytest.approx(0.5)
    np.testing.assert_allclose(model.midpoint, [math.sqrt(0.5), math.sqrt(0.5)])
    np.testing.assert_allclose(model.arc_point(0.0), [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(model.arc_point(1.0), [0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(model.arc_point(0.5), model.midpoint, atol=1e-12)
    for t in (0.0, 0.25, 0.5, 0.8, 1.0):
        assert model.arc_fraction(model.arc_point(t)) == pytest.approx(t, abs=1e-12)


def test_halfspace_rates_are_angles():
    model = GaussianHalfspace((("g1", (1.0, 0.0)), ("g2", (0.0, 1.0))))
    tpr, fpr = model.tpr_fpr("g1", (1.0, 0.0))
    assert (tpr, fpr) == (pytest.approx(1.0), pytest.approx(0.0))
    tpr, fpr = model.tpr_fpr("g2", (1.0, 0.0))
    assert (tpr, fpr) == (pytest.approx(0.5), pytest.approx(0.5))
    diag = (math.sqrt(0.5), math.sqrt(0.5))
    assert model.tpr_fpr("g1", diag)[1] == pytest.approx(0.25)


def test_halfspace_rejects_bad_theta_and_degenerate_pairs():
    model = GaussianHalfspace((("g1", (1.0, 0.0)), ("g2", (0.0, 1.0))))
    with pytest.raises(DomainError):
        model.tpr_fpr("g1", (0.5, 0.5))  # not a unit vector
    with pytest.raises(DomainError):
        model.tpr_fpr("g1", (1.0, 0.0, 0.0))  # wrong dimension
    with pytest.raises(DomainError):
        model.arc_point(1.5)
    with pytest.raises(ParameterError):
        GaussianHalfspace((("g1", (1.0, 0.0)), ("g2", (1.0, 0.0))))
    with pytest.raises(ParameterError):
        GaussianHalfspace((("g1", (1.0, 0.0)), ("g2", (-1.0, 0.0))))
    with pytest.raises(ParameterError):
        GaussianHalfspace((("g1", (1.0, 0.0)),))


def test_score_model_rates_are_survival_functions():
    model = ScoreModel(
        (("g", GroupScores(y1=BetaScore(5.0, 2.0), y0=BetaScore(2.0, 5.0))),)
    )
    tpr, fpr = model.tpr_fpr("g", 0.5)
    assert tpr == pytest.approx(1.0 - stats.beta.cdf(0.5, 5, 2), abs=1e-12)
    assert fpr == pytest.approx(1.0 - stats.beta.cdf(0.5, 2, 5), abs=1e-12)
    with pytest.raises(ConfigurationError):
        model.scores("other")


def test_score_model_likelihood_ratio_decreasing():
    model = ScoreModel(
        (("g", GroupScores(y1=BetaScore(5.0, 2.0), y0=BetaScore(2.0, 5.0))),)
    )
    xs = np.linspace(0.05, 0.95, 61)
    phi = model.likelihood_ratio("g", xs)
    # f0/f1 = ((1-x)/x)^3 for this pair, strictly decreasing
    np.testing.assert_allclose(phi, ((1.0 - xs) / xs) ** 3, rtol=1e-9)
    assert np.all(np.diff(phi) < 0)


def test_best_response_recovers_both_separating_cuts():
    economy, groups, model = uniform_reference()
    low = QualificationState(ids=("a1", "a2"), rates=(0.6, 0.3))
    high = QualificationState(ids=("a1", "a2"), rates=(0.2, 0.6))
    assert institution_best_response(model, economy, groups, low) == pytest.approx(
        0.4, abs=1e-9
    )
    assert institution_best_response(model, economy, groups, high) == pytest.approx(
        0.8, abs=1e-9
    )


def test_best_response_rejects_everyone_without_qualified_mass():
    economy, groups, model = uniform_reference()
    empty = QualificationState(ids=("a1", "a2"), rates=(0.0, 0.0))
    assert institution_best_response(model, economy, groups, empty) == pytest.approx(1.0)


def test_best_response_checks_group_alignment():
    economy, groups, model = uniform_reference()
    wrong = QualificationState(ids=("a1", "zz"), rates=(0.5, 0.5))
    with pytest.raises(ConfigurationError):
        institution_best_response(model, economy, groups, wrong)


def test_halfspace_best_response_picks_heavier_boundary():
    economy = EconomyConfig(wage=0.8, payoff_tp=2.0, cost_fp=1.0)
    groups = (
        GroupSpec(id="g1", proportion=0.5, cost=Uniform01()),
        GroupSpec(id="g2", proportion=0.5, cost=Uniform01()),
    )
    model = GaussianHalfspace((("g1", (1.0, 0.0)), ("g2", (0.0, 1.0))))
    state = QualificationState(ids=("g1", "g2"), rates=(0.8, 0.0))
    theta = institution_best_response(model, economy, groups, state)
    np.testing.assert_allclose(theta, model.vector("g1"), atol=1e-12)
    state = QualificationState(ids=("g1", "g2"), rates=(0.1, 0.7))
    theta = institution_best_response(model, economy, groups, state)
    np.testing.assert_allclose(theta, model.vector("g2"), atol=1e-12)


def test_halfspace_tie_goes_to_midpoint():
    economy = EconomyConfig(wage=0.8, payoff_tp=2.0, cost_fp=1.0)
    groups = (
        GroupSpec(id="g1", proportion=0.5, cost=Uniform01()),
        GroupSpec(id="g2", proportion=0.5, cost=Uniform01()),
    )
    model = GaussianHalfspace((("g1", (1.0, 0.0)), ("g2", (0.0, 1.0))))
    state = QualificationState(ids=("g1", "g2"), rates=(0.4, 0.4))
    theta = institution_best_response(model, economy, groups, state)
    np.testing.assert_allclose(theta, model.midpoint, atol=1e-12)
    np.testing.assert_allclose(gaussian_tiebreak(model, state), model.midpoint)


def test_decoupled_best_response_scalar_and_halfspace():
    economy = EconomyConfig(wage=0.6)
    group = GroupSpec(id="a", proportion=1.0, cost=Uniform01())
    model = UniformThreshold((("a", 0.5),))
    # separating cut is optimal for any positive qualification mass
    assert decoupled_best_response(model, economy, group, 0.6) == pytest.approx(
        0.5, abs=1e-9
    )
    halfspace = GaussianHalfspace((("a", (1.0, 0.0)), ("b", (0.0, 1.0))))
    np.testing.assert_allclose(
        decoupled_best_response(halfspace, economy, group, 0.6), [1.0, 0.0]
    )


def test_analytic_threshold_matches_odds_condition():
    model = ScoreModel(
        (("g", GroupScores(y1=BetaScore(5.0, 2.0), y0=BetaScore(2.0, 5.0))),)
    )
    economy = EconomyConfig(wage=1.0, payoff_tp=1.0, cost_fp=1.0)
    # phi(x) = ((1-x)/x)^3 and even odds, so the cut sits exactly at 0.5
    state = QualificationState(ids=("g",), rates=(0.5,))
    assert coate_loury_threshold(model, economy, state) == pytest.approx(0.5, abs=1e-9)
    # more qualified mass lowers the bar
    richer = QualificationState(ids=("g",), rates=(0.8,))
    assert coate_loury_threshold(model, economy, richer) < 0.5
    # no qualified mass: accept no one
    empty = QualificationState(ids=("g",), rates=(0.0,))
    assert coate_loury_threshold(model, economy, empty) == 1.0
    with pytest.raises(ConfigurationError):
        two = QualificationState(ids=("a", "b"), rates=(0.5, 0.5))
        coate_loury_threshold(model, economy, two)


def test_analytic_threshold_warns_on_nonmonotone_ratio():
    # y0 humped relative to y1 makes f0/f1 rise then fall
    model = ScoreModel(
        (("g", GroupScores(y1=BetaScore(2.0, 2.0), y0=BetaScore(5.0, 5.0))),)
    )
    economy = EconomyConfig(wage=1.0)
    state = QualificationState(ids=("g",), rates=(0.5,))
    with pytest.warns(UserWarning):
        theta = coate_loury_threshold(model, economy, state)
    assert 0.0 <= theta <= 1.0


def test_feature_config_round_trips():
    models = [
        UniformThreshold((("a", 0.4), ("b", 0.8))),
        GaussianHalfspace((("a", (1.0, 0.0)), ("b", (0.0, 1.0)))),
        ScoreModel(
            (
                ("a", GroupScores(y1=BetaScore(5.0, 2.0), y0=BetaScore(2.0, 5.0))),
                (
                    "b",
                    GroupScores(
                        y1=EmpiricalScore(((0.0, 0.0), (0.5, 0.1), (1.0, 1.0))),
                        y0=EmpiricalScore(((0.0, 0.0), (0.5, 0.9), (1.0, 1.0))),
                    ),
                ),
            )
        ),
    ]
    for model in models:
        rebuilt = features.from_config(model.to_config(), ("a", "b"))
        assert rebuilt == model
        assert rebuilt.to_config() == model.to_config()


def test_feature_config_errors_name_the_path():
    with pytest.raises(ConfigurationError, match="features.variant"):
        features.from_config({}, ("a",))
    with pytest.raises(ConfigurationError, match="features.variant"):
        features.from_config({"variant": "nope"}, ("a",))
    with pytest.raises(ConfigurationError, match="features.thresholds"):
        features.from_config({"variant": "uniform_threshold"}, ("a",))
    with pytest.raises(ConfigurationError, match="do not match"):
        features.from_config(
            {"variant": "uniform_threshold", "thresholds": {"zz": 0.5}}, ("a",)
        )
    with pytest.raises(ConfigurationError, match="unknown field"):
        features.from_config(
            {"variant": "uniform_threshold", "thresholds": {"a": 0.5}, "bogus": 1},
            ("a",),
        )
    with pytest.raises(ConfigurationError, match="y1 and y0"):
        features.from_config(
            {"variant": "score", "groups": {"a": {"y1": {"alpha": 2, "beta": 2}}}},
            ("a",),
        )
    with pytest.raises(ConfigurationError, match="groups.a.y1"):
        features.from_config(
            {
                "variant": "score",
                "groups": {"a": {"y1": {"alpha": -2, "beta": 2}, "y0": {"alpha": 2, "beta": 2}}},
            },
            ("a",),
        )


@settings(max_examples=60, deadline=None)
@given(
    h=st.floats(min_value=0.05, max_value=0.95),
    theta=st.floats(min_value=0.0, max_value=1.0),
)
def test_threshold_rates_stay_in_unit_square(h, theta):
    model = UniformThreshold((("a", h),))
    tpr, fpr = model.tpr_fpr("a", theta)
    assert 0.0 <= tpr <= 1.0
    assert 0.0 <= fpr <= 1.0


@settings(max_examples=40, deadline=None)
@given(
    alpha=st.floats(min_value=0.5, max_value=8.0),
    beta=st.floats(min_value=0.5, max_value=8.0),
)
def test_score_rates_decrease_with_the_cut(alpha, beta):
    model = ScoreModel(
        (("g", GroupScores(y1=BetaScore(alpha, beta), y0=BetaScore(beta, alpha))),)
    )
    thetas = np.linspace(0.0, 1.0, 33)
    tpr, fpr = model.rates_grid("g", thetas)
    assert np.all(np.diff(tpr) <= 1e-12)
    assert np.all(np.diff(fpr) <= 1e-12)
    assert np.all((tpr >= -1e-12) & (tpr <= 1.0 + 1e-12))


def test_normalized_angle_endpoints():
    assert normalized_angle(np.array([1.0, 0.0]), np.array([1.0, 0.0])) == 0.0
    assert normalized_angle(np.array([1.0, 0.0]), np.array([-1.0, 0.0])) == 1.0
    assert normalized_angle(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == pytest.approx(0.5)
