"""Feature models: per-group TPR/FPR curves and the institution's best response.

Three families are supported. UniformThreshold scores each group uniformly
with a group-specific qualification threshold h_a; the institution picks a
cut point in [0, 1]. GaussianHalfspace assesses isotropic Gaussian features
with a unit-vector hyperplane; classification rates depend only on the
normalized angle between the chosen hyperplane and the group's own.
ScoreModel is the general scalar case: explicit conditional score CDFs per
group and label, parametric (Beta) or empirical.

The solver contract: with a fixed grid, fixed refinement, and fixed
tie-breaking, the institution's response is a deterministic function of the
state, which is what makes the downstream dynamics reproducible.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import special

from .core import (
    EconomyConfig,
    GroupSpec,
    QualificationState,
    RATE_TOL,
    response_rate,
)
from .errors import ConfigurationError, DomainError, ParameterError

DEFAULT_GRID = 2001  # step 5e-4 over [0, 1]

# Relative slack under the grid maximum within which utilities count as tied.
# Exact indifference states evaluate with about one ulp of spread across the
# flat stretch; genuinely sloped utilities clear this by many orders.
_PLATEAU_RTOL = 1e-15


def _as_float(x, what: str) -> float:
    try:
        return float(x)
    except (TypeError, ValueError):
        raise ParameterError(f"{what} must be a real number, got {x!r}") from None


# ---------------------------------------------------------------------------
# Score distributions (used by ScoreModel)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaScore:
    """Beta(alpha, beta) conditional score distribution on [0, 1]."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if not (self.alpha > 0 and self.beta > 0):
            raise ParameterError(
                f"Beta parameters must be positive, got ({self.alpha}, {self.beta})"
            )

    def cdf(self, x):
        return special.betainc(self.alpha, self.beta, np.clip(x, 0.0, 1.0))

    def pdf(self, x):
        a, b = self.alpha, self.beta
        ln_b = special.betaln(a, b)
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.exp((a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x) - ln_b)
        return np.where((x < 0.0) | (x > 1.0), 0.0, out)

    def to_config(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class EmpiricalScore:
    """Piecewise-linear conditional score CDF with knots spanning [0, 1].

    The first knot must be (0, 0) and the last (1, 1) so the curve is a CDF
    on the score range. Densities are obtained by central differences.
    """

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        knots = tuple((float(x), float(y)) for x, y in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise ParameterError("empirical score CDF needs at least 2 knots")
        xs = [x for x, _ in knots]
        ys = [y for _, y in knots]
        if abs(xs[0]) > 1e-12 or abs(ys[0]) > 1e-12:
            raise ParameterError(f"first knot must be (0, 0), got {knots[0]}")
        if abs(xs[-1] - 1.0) > 1e-12 or abs(ys[-1] - 1.0) > 1e-12:
            raise ParameterError(f"last knot must be (1, 1), got {knots[-1]}")
        for i in range(1, len(knots)):
            if xs[i] <= xs[i - 1]:
                raise ParameterError(f"knot x values must strictly increase at index {i}")
            if ys[i] < ys[i - 1]:
                raise ParameterError(f"knot CDF values decrease at index {i}")

    def cdf(self, x):
        xs = np.array([k[0] for k in self.knots])
        ys = np.array([k[1] for k in self.knots])
        return np.interp(np.clip(x, 0.0, 1.0), xs, ys)

    def pdf(self, x, step: float = 1e-4):
        x = np.clip(np.asarray(x, dtype=float), step, 1.0 - step)
        return (self.cdf(x + step) - self.cdf(x - step)) / (2.0 * step)

    def to_config(self) -> dict:
        return {"knots": [[x, y] for x, y in self.knots]}


# ---------------------------------------------------------------------------
# Feature model variants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformThreshold:
    """Scores uniform on [0, 1]; group a is qualified above its threshold h_a.

    Qualified members of group a have scores uniform on [h_a, 1] and
    unqualified members uniform on [0, h_a]; a cut at theta therefore gives
    TPR = min(1, (1 - max(theta, h_a)) / (1 - h_a)) and
    FPR = max(0, h_a - theta) / h_a.
    """

    thresholds: tuple[tuple[str, float], ...]
    theta_space = "interval [0, 1]"

    def __post_init__(self) -> None:
        if isinstance(self.thresholds, Mapping):
            items = tuple(sorted((str(k), float(v)) for k, v in self.thresholds.items()))
        else:
            items = tuple(sorted((str(k), float(v)) for k, v in self.thresholds))
        object.__setattr__(self, "thresholds", items)
        if not items:
            raise ParameterError("at least one group threshold is required")
        for gid, h in items:
            if not 0.0 < h < 1.0:
                raise ParameterError(f"threshold for group {gid!r} must lie in (0, 1), got {h}")

    @property
    def group_ids(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.thresholds)

    def threshold(self, group: str) -> float:
        for gid, h in self.thresholds:
            if gid == group:
                return h
        raise ConfigurationError(f"no threshold for group {group!r}")

    def tpr_fpr(self, group: str, theta: float) -> tuple[float, float]:
        theta = _check_unit_interval(theta)
        h = self.threshold(group)
        tpr = min(1.0, (1.0 - max(theta, h)) / (1.0 - h))
        fpr = max(0.0, h - theta) / h
        return tpr, fpr

    def rates_grid(self, group: str, thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        h = self.threshold(group)
        tpr = np.minimum(1.0, (1.0 - np.maximum(thetas, h)) / (1.0 - h))
        fpr = np.maximum(0.0, h - thetas) / h
        return tpr, fpr

    def to_config(self) -> dict:
        return {"variant": "uniform_threshold", "thresholds": dict(self.thresholds)}


@dataclass(frozen=True)
class GaussianHalfspace:
    """Isotropic Gaussian features; group a's true boundary is unit vector h_a.

    For a decision hyperplane theta (also a unit vector), the classification
    rates depend only on the normalized angle between theta and h_a:
    TPR = 1 - angle, FPR = angle, with angle = arccos(theta . h_a) / pi.
    """

    vectors: tuple[tuple[str, tuple[float, ...]], ...]
    theta_space = "unit vectors"

    def __post_init__(self) -> None:
        if isinstance(self.vectors, Mapping):
            raw = sorted((str(k), v) for k, v in self.vectors.items())
        else:
            raw = sorted((str(k), v) for k, v in self.vectors)
        items = []
        dim = None
        for gid, vec in raw:
            arr = np.asarray(vec, dtype=float)
            if arr.ndim != 1 or arr.size < 2:
                raise ParameterError(f"group {gid!r}: vector must be 1-d with >= 2 entries")
            if dim is None:
                dim = arr.size
            elif arr.size != dim:
                raise ParameterError("all group vectors must share one dimension")
            norm = float(np.linalg.norm(arr))
            if norm <= 0.0 or not math.isfinite(norm):
                raise ParameterError(f"group {gid!r}: vector has no direction")
            items.append((gid, tuple((arr / norm).tolist())))
        object.__setattr__(self, "vectors", tuple(items))
        if len(items) < 2:
            raise ParameterError("halfspace model needs at least 2 groups")
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                ang = normalized_angle(np.array(items[i][1]), np.array(items[j][1]))
                if not 0.0 < ang < 1.0:
                    raise ParameterError(
                        f"groups {items[i][0]!r} and {items[j][0]!r} have identical or "
                        f"opposite boundaries (normalized angle {ang})"
                    )

    @property
    def group_ids(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.vectors)

    def vector(self, group: str) -> np.ndarray:
        for gid, vec in self.vectors:
            if gid == group:
                return np.array(vec)
        raise ConfigurationError(f"no boundary vector for group {group!r}")

    def tpr_fpr(self, group: str, theta) -> tuple[float, float]:
        theta = self._check_theta(theta)
        ang = normalized_angle(theta, self.vector(group))
        return 1.0 - ang, ang

    def _check_theta(self, theta) -> np.ndarray:
        arr = np.asarray(theta, dtype=float)
        dim = len(self.vectors[0][1])
        if arr.shape != (dim,):
            raise DomainError(f"theta must be a vector of dimension {dim}")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > 1e-6:
            raise DomainError(f"theta must be a unit vector, got norm {norm}")
        return arr / norm

    def _pair(self) -> tuple[np.ndarray, np.ndarray]:
        if len(self.vectors) != 2:
            raise ConfigurationError(
                "geodesic-arc operations support exactly two groups; "
                f"model has {len(self.vectors)}"
            )
        return np.array(self.vectors[0][1]), np.array(self.vectors[1][1])

    @property
    def pair_angle(self) -> float:
        """Normalized angle between the two group boundaries."""
        h1, h2 = self._pair()
        return normalized_angle(h1, h2)

    @property
    def midpoint(self) -> np.ndarray:
        """Normalized midpoint of the two boundaries (the canonical tie choice)."""
        h1, h2 = self._pair()
        s = h1 + h2
        return s / np.linalg.norm(s)

    def arc_point(self, t: float) -> np.ndarray:
        """Point at arc fraction t on the geodesic from the first group's
        boundary (t=0) to the second's (t=1)."""
        if not 0.0 <= t <= 1.0:
            raise DomainError(f"arc fraction must lie in [0, 1], got {t}")
        h1, h2 = self._pair()
        omega = math.acos(float(np.clip(np.dot(h1, h2), -1.0, 1.0)))
        s = math.sin(omega)
        v = (math.sin((1.0 - t) * omega) * h1 + math.sin(t * omega) * h2) / s
        return v / np.linalg.norm(v)

    def arc_fraction(self, theta) -> float:
        """Inverse of arc_point for points on (or near) the geodesic arc."""
        theta = self._check_theta(theta)
        h1, _ = self._pair()
        return normalized_angle(theta, h1) / self.pair_angle

    def to_config(self) -> dict:
        return {
            "variant": "gaussian_halfspace",
            "vectors": {g: list(v) for g, v in self.vectors},
        }


def normalized_angle(u: np.ndarray, v: np.ndarray) -> float:
    """arccos(u . v) / pi for unit vectors: 0 aligned, 1 opposite."""
    return math.acos(float(np.clip(np.dot(u, v), -1.0, 1.0))) / math.pi


@dataclass(frozen=True)
class GroupScores:
    """Conditional score distributions for one group: y1 qualified, y0 not."""

    y1: BetaScore | EmpiricalScore
    y0: BetaScore | EmpiricalScore


@dataclass(frozen=True)
class ScoreModel:
    """Per-group conditional score CDFs; decisions accept scores above theta.

    TPR_a(theta) = 1 - F1_a(theta) and FPR_a(theta) = 1 - F0_a(theta).
    """

    curves: tuple[tuple[str, GroupScores], ...]
    theta_space = "interval [0, 1]"

    def __post_init__(self) -> None:
        if isinstance(self.curves, Mapping):
            items = tuple(sorted((str(k), v) for k, v in self.curves.items()))
        else:
            items = tuple(sorted((str(k), v) for k, v in self.curves))
        object.__setattr__(self, "curves", items)
        if not items:
            raise ParameterError("at least one group is required")
        for gid, gs in items:
            if not isinstance(gs, GroupScores):
                raise ParameterError(f"group {gid!r}: expected GroupScores, got {type(gs)}")

    @property
    def group_ids(self) -> tuple[str, ...]:
        return tuple(g for g, _ in self.curves)

    def scores(self, group: str) -> GroupScores:
        for gid, gs in self.curves:
            if gid == group:
                return gs
        raise ConfigurationError(f"no score curves for group {group!r}")

    def tpr_fpr(self, group: str, theta: float) -> tuple[float, float]:
        theta = _check_unit_interval(theta)
        gs = self.scores(group)
        return 1.0 - float(gs.y1.cdf(theta)), 1.0 - float(gs.y0.cdf(theta))

    def rates_grid(self, group: str, thetas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        gs = self.scores(group)
        return 1.0 - np.asarray(gs.y1.cdf(thetas)), 1.0 - np.asarray(gs.y0.cdf(thetas))

    def likelihood_ratio(self, group: str, x):
        """phi(x) = f0(x) / f1(x); inf where the qualified density vanishes."""
        gs = self.scores(group)
        f0 = np.asarray(gs.y0.pdf(x), dtype=float)
        f1 = np.asarray(gs.y1.pdf(x), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(f1 > 0.0, f0 / np.where(f1 > 0.0, f1, 1.0), np.inf)
        return out

    def to_config(self) -> dict:
        def dist_cfg(d):
            return d.to_config()

        return {
            "variant": "score",
            "groups": {
                g: {"y1": dist_cfg(gs.y1), "y0": dist_cfg(gs.y0)} for g, gs in self.curves
            },
        }


FeatureModel = UniformThreshold | GaussianHalfspace | ScoreModel
ScalarModel = (UniformThreshold, ScoreModel)


def _check_unit_interval(theta: float) -> float:
    theta = _as_float(theta, "theta")
    if not 0.0 <= theta <= 1.0:
        raise DomainError(f"theta must lie in [0, 1], got {theta}")
    return theta


# ---------------------------------------------------------------------------
# Institution best response
# ---------------------------------------------------------------------------


def _utility_grid(
    model,
    economy: EconomyConfig,
    groups: tuple[GroupSpec, ...],
    state: QualificationState,
    thetas: np.ndarray,
) -> np.ndarray:
    util = np.zeros_like(thetas)
    for g, pi in zip(groups, state.rates):
        tpr, fpr = model.rates_grid(g.id, thetas)
        util += g.proportion * (
            economy.payoff_tp * tpr * pi - economy.cost_fp * fpr * (1.0 - pi)
        )
    return util


def _utility_at(model, economy, groups, state, theta: float) -> float:
    total = 0.0
    for g, pi in zip(groups, state.rates):
        tpr, fpr = model.tpr_fpr(g.id, theta)
        total += g.proportion * (
            economy.payoff_tp * tpr * pi - economy.cost_fp * fpr * (1.0 - pi)
        )
    return total


def _ternary_argmax(f, a: float, b: float, iters: int = 90) -> float:
    # Fixed iteration count keeps the refinement bit-reproducible.
    for _ in range(iters):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if f(m1) < f(m2):
            a = m1
        else:
            b = m2
    return 0.5 * (a + b)


def _ternary_argmin(f, a: float, b: float, iters: int = 120) -> float:
    for _ in range(iters):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        if f(m1) > f(m2):
            a = m1
        else:
            b = m2
    return 0.5 * (a + b)


def _response_distance(
    model, economy, groups, state: QualificationState, theta: float
) -> float:
    """Sup-norm gap between the population's response to theta and the state."""
    worst = 0.0
    for g, pi in zip(groups, state.rates):
        tpr, fpr = model.tpr_fpr(g.id, theta)
        worst = max(worst, abs(response_rate(g.cost, economy.wage, tpr, fpr) - pi))
    return worst


def _scalar_best_response(
    model,
    economy: EconomyConfig,
    groups: tuple[GroupSpec, ...],
    state: QualificationState,
    grid_size: int,
) -> float:
    thetas = np.linspace(0.0, 1.0, grid_size)
    util = _utility_grid(model, economy, groups, state, thetas)
    i_best = int(np.argmax(util))
    u_max = float(util[i_best])
    if u_max <= 0.0:
        # No cut point earns a positive payoff: reject everyone. theta=1
        # always attains utility exactly 0, so it is inside the argmax set.
        return 1.0
    tol = _PLATEAU_RTOL * max(1.0, abs(u_max))
    tied = util >= u_max - tol
    lo_i = i_best
    while lo_i > 0 and tied[lo_i - 1]:
        lo_i -= 1
    hi_i = i_best
    while hi_i < grid_size - 1 and tied[hi_i + 1]:
        hi_i += 1

    if hi_i == lo_i:
        # Unique grid winner: one local refinement pass around it, snapping
        # back to the grid point unless refinement strictly improves (keeps
        # kink maxima that sit exactly on the grid, like threshold corners).
        a = float(thetas[max(i_best - 1, 0)])
        b = float(thetas[min(i_best + 1, grid_size - 1)])
        f = lambda th: _utility_at(model, economy, groups, state, th)
        refined = _ternary_argmax(f, a, b)
        if f(refined) - u_max > 1e-15 * max(1.0, abs(u_max)):
            return refined
        return float(thetas[i_best])

    # A flat stretch of maximizers: the fixed tie-break selects the point
    # whose induced response stays closest to the current state, so exact
    # indifference states map to themselves instead of jumping to an edge.
    lo_t, hi_t = float(thetas[lo_i]), float(thetas[hi_i])
    sub = np.linspace(lo_t, hi_t, 1025)
    d = lambda th: _response_distance(model, economy, groups, state, th)
    dists = np.array([d(th) for th in sub])
    j = int(np.argmin(dists))
    a = float(sub[max(j - 1, 0)])
    b = float(sub[min(j + 1, len(sub) - 1)])
    refined = _ternary_argmin(d, a, b)
    candidates = [refined, float(sub[j]), lo_t, hi_t]
    return min(candidates, key=d)


def _gaussian_weights(
    economy: EconomyConfig, groups: tuple[GroupSpec, ...], state: QualificationState
) -> tuple[float, float]:
    # Angle weight per group: n_a * (c_FP + (p_TP - c_FP) * pi_a); always > 0.
    (g1, g2) = groups
    p, c = economy.payoff_tp, economy.cost_fp
    w1 = g1.proportion * (c + (p - c) * state.rates[0])
    w2 = g2.proportion * (c + (p - c) * state.rates[1])
    return w1, w2


def gaussian_tiebreak(model: GaussianHalfspace, state: QualificationState) -> np.ndarray:
    """Tie-breaking hyperplane when every point of the arc is optimal.

    With equal group rates (and unequal institution payoffs) the whole
    geodesic is utility-maximizing; the convention is the normalized
    midpoint of the two group boundaries.
    """
    return model.midpoint


def _gaussian_best_response(
    model: GaussianHalfspace,
    economy: EconomyConfig,
    groups: tuple[GroupSpec, ...],
    state: QualificationState,
    grid_size: int,
    tie_tol: float,
) -> np.ndarray:
    if len(groups) != 2:
        raise ConfigurationError("halfspace best response supports exactly two groups")
    w1, w2 = _gaussian_weights(economy, groups, state)
    equal_sizes = abs(groups[0].proportion - groups[1].proportion) <= 1e-12
    if equal_sizes and economy.payoff_tp != economy.cost_fp:
        tied = abs(state.rates[0] - state.rates[1]) <= tie_tol
    else:
        tied = abs(w1 - w2) <= tie_tol * max(1.0, w1, w2)
    if tied:
        return gaussian_tiebreak(model, state)
    # The objective along the arc is linear in the arc fraction (the angles
    # to the two boundaries are t*ang and (1-t)*ang), so the grid argmax
    # lands on an endpoint; the grid keeps this path on the same contract
    # as the scalar models.
    ts = np.linspace(0.0, 1.0, grid_size)
    ang = model.pair_angle
    ang1 = ts * ang
    ang2 = (1.0 - ts) * ang
    p, c = economy.payoff_tp, economy.cost_fp
    pi1, pi2 = state.rates
    n1, n2 = groups[0].proportion, groups[1].proportion
    util = n1 * (p * (1.0 - ang1) * pi1 - c * ang1 * (1.0 - pi1)) + n2 * (
        p * (1.0 - ang2) * pi2 - c * ang2 * (1.0 - pi2)
    )
    t_best = float(ts[int(np.argmax(util))])
    return model.arc_point(t_best)


def institution_best_response(
    model,
    economy: EconomyConfig,
    groups: tuple[GroupSpec, ...],
    state: QualificationState,
    *,
    grid_size: int = DEFAULT_GRID,
    tie_tol: float = RATE_TOL,
):
    """Utility-maximizing assessment parameter for the current state.

    Scalar models (UniformThreshold, ScoreModel) return a cut point in
    [0, 1] found by grid argmax plus one local refinement pass; halfspace
    models return a unit vector on the geodesic arc between the two group
    boundaries. Ties are broken deterministically: reject-all when nothing
    is profitable, the response-preserving point on interior plateaus, and
    the arc midpoint for the halfspace indifference case.
    """
    _check_alignment(model, groups, state)
    if isinstance(model, GaussianHalfspace):
        return _gaussian_best_response(model, economy, groups, state, grid_size, tie_tol)
    if isinstance(model, ScalarModel):
        return _scalar_best_response(model, economy, groups, state, grid_size)
    raise ConfigurationError(f"unknown feature model type {type(model).__name__}")


def decoupled_best_response(
    model,
    economy: EconomyConfig,
    group: GroupSpec,
    pi: float,
    *,
    grid_size: int = DEFAULT_GRID,
):
    """Best response when the institution may pick a separate rule per group.

    Scalar models reuse the joint solver on a one-group economy. For the
    halfspace model the per-group optimum is always the group's own
    boundary: any other hyperplane trades true positives for false
    positives at a strictly positive angle weight.
    """
    if isinstance(model, GaussianHalfspace):
        return model.vector(group.id)
    if isinstance(model, ScalarModel):
        solo = (GroupSpec(id=group.id, proportion=1.0, cost=group.cost),)
        state = QualificationState(ids=(group.id,), rates=(float(pi),))
        return _scalar_best_response(model, economy, solo, state, grid_size)
    raise ConfigurationError(f"unknown feature model type {type(model).__name__}")


def _check_alignment(model, groups: tuple[GroupSpec, ...], state: QualificationState) -> None:
    group_ids = tuple(g.id for g in groups)
    if group_ids != state.ids:
        raise ConfigurationError(
            f"state groups {state.ids} do not match economy groups {group_ids}"
        )
    model_ids = tuple(model.group_ids)
    if model_ids != group_ids:
        raise ConfigurationError(
            f"feature model groups {model_ids} do not match economy groups {group_ids}"
        )


# ---------------------------------------------------------------------------
# Analytic single-group threshold (monotone likelihood ratio)
# ---------------------------------------------------------------------------


def coate_loury_threshold(
    model: ScoreModel,
    economy: EconomyConfig,
    state: QualificationState,
    *,
    grid_size: int = DEFAULT_GRID,
) -> float:
    """Single-group threshold via the likelihood-ratio condition.

    With phi = f0/f1 strictly decreasing, continuous, and positive, the
    institution accepts exactly the scores x where payoff_tp * pi * f1(x)
    beats cost_fp * (1 - pi) * f0(x), i.e. the smallest x with
    ratio >= ((1 - pi) / pi) * phi(x); found here by bisection. When the
    numerical monotonicity probe fails, falls back to the grid argmax and
    warns.
    """
    if len(state) != 1:
        raise ConfigurationError("analytic threshold applies to a single group")
    group = state.ids[0]
    pi = state.rates[0]
    if pi <= 0.0:
        return 1.0  # no qualified mass: accept no one

    probe = np.linspace(1e-6, 1.0 - 1e-6, 512)
    phi = model.likelihood_ratio(group, probe)
    finite = np.isfinite(phi)
    decreasing = bool(
        np.all(np.diff(phi[finite]) <= 1e-9 * np.maximum(1.0, np.abs(phi[finite][:-1])))
    )
    positive = bool(np.all(phi[finite] >= 0.0))
    if not (decreasing and positive and finite.any()):
        warnings.warn(
            "likelihood ratio is not monotone decreasing; falling back to grid argmax",
            stacklevel=2,
        )
        solo = (GroupSpec(id=group, proportion=1.0, cost=_UNIT_COST),)
        return _scalar_best_response(model, economy, solo, state, grid_size)

    odds = (1.0 - pi) / pi

    def short(x: float) -> float:
        # Positive when x is still too low to accept (condition unmet).
        val = float(model.likelihood_ratio(group, np.array([x]))[0])
        if not math.isfinite(val):
            return math.inf
        return odds * val - economy.ratio

    lo, hi = 1e-12, 1.0 - 1e-12
    if short(lo) <= 0.0:
        return 0.0  # condition already holds at the bottom: accept everyone
    if short(hi) > 0.0:
        return 1.0  # condition never holds: accept no one
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if short(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class _UnitCost:
    """Placeholder cost model for solver paths that never consult the CDF."""

    def cdf(self, x: float) -> float:
        return min(1.0, max(0.0, x))


_UNIT_COST = _UnitCost()


# ---------------------------------------------------------------------------
# Config plumbing
# ---------------------------------------------------------------------------


def _score_dist_from_config(obj: Mapping, path: str) -> BetaScore | EmpiricalScore:
    if not isinstance(obj, Mapping):
        raise ConfigurationError(f"{path}: expected a mapping")
    keys = set(obj)
    if keys == {"alpha", "beta"}:
        try:
            return BetaScore(float(obj["alpha"]), float(obj["beta"]))
        except ParameterError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    if keys == {"knots"}:
        try:
            return EmpiricalScore(tuple((float(x), float(y)) for x, y in obj["knots"]))
        except (ParameterError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    raise ConfigurationError(
        f"{path}: expected either {{alpha, beta}} or {{knots}}, got {sorted(keys)}"
    )


def from_config(obj: Mapping, group_ids: Sequence[str], path: str = "features"):
    """Build a feature model from a scenario-config mapping.

    The declared groups must exactly cover the economy's group ids; unknown
    fields or variants are configuration errors naming the path.
    """
    if not isinstance(obj, Mapping):
        raise ConfigurationError(f"{path}: expected a mapping")
    if "variant" not in obj:
        raise ConfigurationError(f"{path}.variant: missing required field")
    variant = obj["variant"]
    expected = tuple(sorted(group_ids))

    def check_cover(mapping: Mapping, field: str) -> None:
        got = tuple(sorted(str(k) for k in mapping))
        if got != expected:
            raise ConfigurationError(
                f"{path}.{field}: groups {list(got)} do not match economy groups {list(expected)}"
            )

    if variant == "uniform_threshold":
        extra = set(obj) - {"variant", "thresholds"}
        if extra:
            raise ConfigurationError(f"{path}.{sorted(extra)[0]}: unknown field")
        if "thresholds" not in obj:
            raise ConfigurationError(f"{path}.thresholds: missing required field")
        check_cover(obj["thresholds"], "thresholds")
        try:
            return UniformThreshold(obj["thresholds"])
        except ParameterError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    if variant == "gaussian_halfspace":
        extra = set(obj) - {"variant", "vectors"}
        if extra:
            raise ConfigurationError(f"{path}.{sorted(extra)[0]}: unknown field")
        if "vectors" not in obj:
            raise ConfigurationError(f"{path}.vectors: missing required field")
        check_cover(obj["vectors"], "vectors")
        try:
            return GaussianHalfspace(obj["vectors"])
        except ParameterError as exc:
            raise ConfigurationError(f"{path}: {exc}") from exc
    if variant == "score":
        extra = set(obj) - {"variant", "groups"}
        if extra:
            raise ConfigurationError(f"{path}.{sorted(extra)[0]}: unknown field")
        if "groups" not in obj:
            raise ConfigurationError(f"{path}.groups: missing required field")
        check_cover(obj["groups"], "groups")
        curves = {}
        for gid, spec in obj["groups"].items():
            if not isinstance(spec, Mapping) or set(spec) != {"y1", "y0"}:
                raise ConfigurationError(
                    f"{path}.groups.{gid}: expected exactly the fields y1 and y0"
                )
            curves[str(gid)] = GroupScores(
                y1=_score_dist_from_config(spec["y1"], f"{path}.groups.{gid}.y1"),
                y0=_score_dist_from_config(spec["y0"], f"{path}.groups.{gid}.y0"),
            )
        return ScoreModel(tuple(sorted(curves.items())))
    raise ConfigurationError(f"{path}.variant: unknown variant {variant!r}")
