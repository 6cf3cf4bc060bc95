import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qualdyn import (
    ConfigurationError,
    EconomyConfig,
    GroupSpec,
    ParameterError,
    QualificationState,
    Uniform01,
    balance,
    evaluate_metrics,
    institutional_utility,
    normalize_groups,
    response_rate,
)


class _FixedRates:
    """Feature-map stub returning preset (tpr, fpr) per group."""

    def __init__(self, rates):
        self._rates = rates

    def tpr_fpr(self, group, theta):
        return self._rates[group]


def test_state_of_sorts_ids():
    state = QualificationState.of({"z": 0.2, "a": 0.7})
    assert state.ids == ("a", "z")
    assert state.rates == (0.7, 0.2)
    assert state.rate("z") == 0.2
    assert state.as_mapping() == {"a": 0.7, "z": 0.2}


def test_state_rejects_unsorted_ids():
    with pytest.raises(ParameterError):
        QualificationState(ids=("b", "a"), rates=(0.1, 0.2))


def test_state_rejects_out_of_range_rates():
    with pytest.raises(ParameterError):
        QualificationState.of({"a": 1.2})
    with pytest.raises(ParameterError):
        QualificationState.of({"a": -0.01})


def test_state_unknown_group():
    state = QualificationState.of({"a": 0.5})
    with pytest.raises(ConfigurationError):
        state.rate("missing")


def test_sup_distance():
    s1 = QualificationState.of({"a": 0.1, "b": 0.9})
    s2 = QualificationState.of({"a": 0.4, "b": 0.8})
    assert s1.sup_distance(s2) == pytest.approx(0.3)
    assert s2.sup_distance(s1) == pytest.approx(0.3)
    assert s1.sup_distance(s1) == 0.0
    with pytest.raises(ConfigurationError):
        s1.sup_distance(QualificationState.of({"a": 0.1, "c": 0.9}))


def test_normalize_groups_sorts_and_validates():
    groups = normalize_groups(
        [
            GroupSpec(id="b", proportion=0.25, cost=Uniform01()),
            GroupSpec(id="a", proportion=0.75, cost=Uniform01()),
        ]
    )
    assert [g.id for g in groups] == ["a", "b"]

    with pytest.raises(ConfigurationError):
        normalize_groups(
            [
                GroupSpec(id="a", proportion=0.5, cost=Uniform01()),
                GroupSpec(id="a", proportion=0.5, cost=Uniform01()),
            ]
        )
    with pytest.raises(ConfigurationError):
        normalize_groups(
            [
                GroupSpec(id="a", proportion=0.5, cost=Uniform01()),
                GroupSpec(id="b", proportion=0.6, cost=Uniform01()),
            ]
        )
    with pytest.raises(ConfigurationError):
        normalize_groups([])


def test_group_spec_validation():
    with pytest.raises(ParameterError):
        GroupSpec(id="", proportion=1.0, cost=Uniform01())
    with pytest.raises(ParameterError):
        GroupSpec(id="a", proportion=0.0, cost=Uniform01())
    with pytest.raises(ParameterError):
        GroupSpec(id="a", proportion=1.5, cost=Uniform01())


def test_economy_validation():
    econ = EconomyConfig(wage=0.6)
    assert econ.payoff_tp == 1.0 and econ.cost_fp == 1.0
    assert EconomyConfig(wage=1.0, payoff_tp=3.0, cost_fp=2.0).ratio == pytest.approx(1.5)
    with pytest.raises(ParameterError):
        EconomyConfig(wage=0.0)
    with pytest.raises(ParameterError):
        EconomyConfig(wage=1.0, payoff_tp=-1.0)


def test_balance_is_max_gap():
    assert balance(QualificationState.of({"a": 0.2, "b": 0.6, "c": 0.5})) == pytest.approx(0.4)
    assert balance(QualificationState.of({"a": 0.3})) == 0.0


def test_response_rate_floors_negative_margin():
    cost = Uniform01()
    assert response_rate(cost, wage=0.6, tpr=1.0, fpr=0.0) == pytest.approx(0.6)
    assert response_rate(cost, wage=0.6, tpr=0.2, fpr=0.7) == 0.0


def test_institutional_utility_hand_value():
    econ = EconomyConfig(wage=1.0, payoff_tp=2.0, cost_fp=1.0)
    groups = (
        GroupSpec(id="a", proportion=0.5, cost=Uniform01()),
        GroupSpec(id="b", proportion=0.5, cost=Uniform01()),
    )
    state = QualificationState.of({"a": 0.6, "b": 0.2})
    model = _FixedRates({"a": (0.9, 0.1), "b": (0.5, 0.3)})
    util = institutional_utility(econ, groups, model, 0.5, state)
    want = 0.5 * (2.0 * 0.9 * 0.6 - 1.0 * 0.1 * 0.4) + 0.5 * (2.0 * 0.5 * 0.2 - 1.0 * 0.3 * 0.8)
    assert util == pytest.approx(want)


def test_utility_requires_matching_group_index():
    econ = EconomyConfig(wage=1.0)
    groups = (GroupSpec(id="a", proportion=1.0, cost=Uniform01()),)
    state = QualificationState.of({"b": 0.5})
    with pytest.raises(ConfigurationError):
        institutional_utility(econ, groups, _FixedRates({"b": (1.0, 0.0)}), 0.5, state)


def test_evaluate_metrics_fields():
    econ = EconomyConfig(wage=0.6)
    groups = (
        GroupSpec(id="a", proportion=0.5, cost=Uniform01()),
        GroupSpec(id="b", proportion=0.5, cost=Uniform01()),
    )
    state = QualificationState.of({"a": 0.6, "b": 0.3})
    model = _FixedRates({"a": (1.0, 0.0), "b": (0.5, 0.0)})
    metrics = evaluate_metrics(econ, groups, model, 0.4, state)
    assert metrics.qualification_rates == {"a": 0.6, "b": 0.3}
    assert metrics.balance == pytest.approx(0.3)
    assert metrics.institutional_utility == pytest.approx(0.5 * 0.6 + 0.5 * 0.5 * 0.3)


@given(
    st.dictionaries(
        st.sampled_from(["a", "b", "c", "d"]),
        st.floats(0.0, 1.0, allow_nan=False),
        min_size=1,
        max_size=4,
    )
)
def test_balance_matches_direct_formula(rates):
    state = QualificationState.of(rates)
    vals = list(rates.values())
    assert balance(state) == pytest.approx(max(vals) - min(vals))


@given(
    st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=2, max_size=2),
    st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=2, max_size=2),
)
def test_sup_distance_is_symmetric_and_exact(r1, r2):
    s1 = QualificationState.of({"a": r1[0], "b": r1[1]})
    s2 = QualificationState.of({"a": r2[0], "b": r2[1]})
    d = s1.sup_distance(s2)
    assert d == pytest.approx(s2.sup_distance(s1))
    assert d >= 0.0
    assert math.isclose(d, max(abs(r1[0] - r2[0]), abs(r1[1] - r2[1])), abs_tol=1e-15)
