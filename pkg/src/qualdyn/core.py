"""Shared domain types for the qualification-dynamics engine.

An economy couples an institution (payoffs for true/false positives) with
one or more population groups. Each group carries a qualification rate:
the fraction of its members currently holding the positive label. These
types are plain immutable value objects; every operation on them is a
pure function, so the whole module is safe to use concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol

from .errors import ConfigurationError, ParameterError

# Default tolerance for comparing rates and probabilities. Exact float
# equality is never used for model quantities.
RATE_TOL = 1e-9

# Group proportions must sum to one within this slack.
PROPORTION_TOL = 1e-12


class CostDistribution(Protocol):
    """The slice of a cost model the core types need: a CDF."""

    def cdf(self, x: float) -> float: ...


class FeatureMap(Protocol):
    """Anything that can report per-group classification rates at a parameter."""

    def tpr_fpr(self, group: str, theta) -> tuple[float, float]: ...


@dataclass(frozen=True)
class EconomyConfig:
    """Institution-side payoffs and the individual-side wage.

    wage is what an individual gains from a positive assessment; payoff_tp
    and cost_fp are the institution's gain per accepted qualified member
    and loss per accepted unqualified member. All three must be positive.
    """

    wage: float
    payoff_tp: float = 1.0
    cost_fp: float = 1.0

    def __post_init__(self) -> None:
        for name in ("wage", "payoff_tp", "cost_fp"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0):
                raise ParameterError(f"{name} must be a positive real, got {value!r}")

    @property
    def ratio(self) -> float:
        """payoff_tp / cost_fp; the institution's acceptance-appetite ratio."""
        return self.payoff_tp / self.cost_fp


@dataclass(frozen=True)
class GroupSpec:
    """One population group: an opaque id, its population share, and its cost CDF."""

    id: str
    proportion: float
    cost: CostDistribution

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ParameterError(f"group id must be a nonempty string, got {self.id!r}")
        if not 0.0 < self.proportion <= 1.0:
            raise ParameterError(
                f"group {self.id!r}: proportion must lie in (0, 1], got {self.proportion}"
            )


def normalize_groups(groups: Iterable[GroupSpec]) -> tuple[GroupSpec, ...]:
    """Sort groups into canonical (lexicographic) order and validate the set.

    Canonical ordering is what makes vector states and trace files
    deterministic. Proportions must sum to 1 within PROPORTION_TOL and ids
    must be unique.
    """
    ordered = tuple(sorted(groups, key=lambda g: g.id))
    if not ordered:
        raise ConfigurationError("at least one group is required")
    ids = [g.id for g in ordered]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"duplicate group ids: {ids}")
    total = sum(g.proportion for g in ordered)
    if abs(total - 1.0) > PROPORTION_TOL:
        raise ConfigurationError(
            f"group proportions must sum to 1 (tolerance {PROPORTION_TOL}); got {total!r}"
        )
    return ordered


@dataclass(frozen=True)
class QualificationState:
    """Per-group qualification rates, held in canonical group order.

    Construct via QualificationState.of({"a1": 0.6, "a2": 0.3}); entries are
    validated to lie in [0, 1].
    """

    ids: tuple[str, ...]
    rates: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.rates):
            raise ParameterError("ids and rates must have equal length")
        if tuple(sorted(self.ids)) != self.ids:
            raise ParameterError("ids must be in canonical sorted order; use .of()")
        for gid, rate in zip(self.ids, self.rates):
            if not (isinstance(rate, (int, float)) and 0.0 <= rate <= 1.0):
                raise ParameterError(f"rate for group {gid!r} outside [0, 1]: {rate!r}")

    @classmethod
    def of(cls, rates: Mapping[str, float]) -> "QualificationState":
        ids = tuple(sorted(rates))
        return cls(ids=ids, rates=tuple(float(rates[g]) for g in ids))

    def rate(self, group: str) -> float:
        try:
            return self.rates[self.ids.index(group)]
        except ValueError:
            raise ConfigurationError(f"no such group in state: {group!r}") from None

    def as_mapping(self) -> dict[str, float]:
        return dict(zip(self.ids, self.rates))

    def sup_distance(self, other: "QualificationState") -> float:
        if self.ids != other.ids:
            raise ConfigurationError(
                f"states indexed by different groups: {self.ids} vs {other.ids}"
            )
        return max(abs(a - b) for a, b in zip(self.rates, other.rates))

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class Metrics:
    """Societal metrics at one (theta, state) point."""

    qualification_rates: Mapping[str, float]
    balance: float
    institutional_utility: float


def _check_group_index(groups: tuple[GroupSpec, ...], state: QualificationState) -> None:
    group_ids = tuple(g.id for g in groups)
    if group_ids != state.ids:
        raise ConfigurationError(
            f"state groups {state.ids} do not match economy groups {group_ids}"
        )


def institutional_utility(
    economy: EconomyConfig,
    groups: tuple[GroupSpec, ...],
    model: FeatureMap,
    theta,
    state: QualificationState,
) -> float:
    """Expected institution payoff at assessment parameter theta.

    Sums, over groups, payoff_tp * TPR_a * pi_a * n_a minus
    cost_fp * FPR_a * (1 - pi_a) * n_a. Linear in each rate with theta held
    fixed.
    """
    _check_group_index(groups, state)
    total = 0.0
    for g, pi in zip(groups, state.rates):
        tpr, fpr = model.tpr_fpr(g.id, theta)
        total += g.proportion * (
            economy.payoff_tp * tpr * pi - economy.cost_fp * fpr * (1.0 - pi)
        )
    return total


def balance(state: QualificationState) -> float:
    """Largest pairwise gap in qualification rates; 0 means fully balanced."""
    if len(state) == 0:
        raise ConfigurationError("balance of an empty state is undefined")
    return max(state.rates) - min(state.rates)


def response_rate(cost: CostDistribution, wage: float, tpr: float, fpr: float) -> float:
    """Fraction of a group that invests when assessed at rates (tpr, fpr).

    The individual's expected benefit is wage * (tpr - fpr); everyone whose
    private cost falls below it invests, so the new rate is the cost CDF at
    that benefit. A negative net benefit is clamped to 0 before the CDF:
    costs are strictly positive, so nobody invests at a loss.
    """
    benefit = wage * (tpr - fpr)
    if benefit < 0.0:
        benefit = 0.0
    return min(1.0, max(0.0, cost.cdf(benefit)))


def evaluate_metrics(
    economy: EconomyConfig,
    groups: tuple[GroupSpec, ...],
    model: FeatureMap,
    theta,
    state: QualificationState,
) -> Metrics:
    """Bundle the per-group rates with balance and institution utility."""
    return Metrics(
        qualification_rates=state.as_mapping(),
        balance=balance(state),
        institutional_utility=institutional_utility(economy, groups, model, theta, state),
    )
