"""Equilibrium analysis: closed-form tables for the two solvable feature
families, equilibrium enumeration by scanning, the beta(pi) map behind
multiple equilibria, near-realizability lower bounds, subsidy comparisons,
and equilibrium ranking reports.

Closed forms are hard-coded expressions, not symbolic derivations; every
closed-form equilibrium can be cross-checked against the dynamics engine,
and the scan never trusts a root it cannot reproduce as a fixed point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import (
    EconomyConfig,
    GroupSpec,
    QualificationState,
    balance as state_balance,
    normalize_groups,
    response_rate,
)
from .costs import CostModel, Uniform01, dominates
from .dynamics import (
    DynamicsConfig,
    FixedPoint,
    LimitCycle,
    NOT_ASSESSED,
    STABLE,
    Stability,
    UNSTABLE,
    classify_stability,
    cycle_average,
    iterate,
    step,
)
from .errors import (
    AssumptionError,
    ConfigurationError,
    ParameterError,
    PreconditionError,
    QualdynError,
)
from .features import (
    GaussianHalfspace,
    UniformThreshold,
    institution_best_response,
    normalized_angle,
)

_NONZERO_TOL = 1e-6  # rates below this count as the trivial equilibrium
_DEDUP_FACTOR = 10.0  # cluster radius = factor * fix_tol


@dataclass(frozen=True)
class EquilibriumRecord:
    """One equilibrium (or limit cycle) with everything a report needs.

    stability is the basin-probe verdict (the authoritative label);
    derivative_stable is the one-group |Phi'| < 1 test and slope_stable
    the decomposed G'(w beta) < |beta'| probe, both recorded for
    comparison but never used to overrule the basin verdict.
    """

    label: str
    kind: str  # "FixedPoint" | "LimitCycle"
    state: QualificationState  # the fixed point, or the cycle average
    theta: object = None
    stability: Stability = NOT_ASSESSED
    residual: float | None = None
    derivative_stable: bool | None = None
    slope_stable: bool | None = None
    cycle: tuple[QualificationState, ...] | None = None
    period: int | None = None

    @property
    def nonzero(self) -> bool:
        return max(self.state.rates) > _NONZERO_TOL


# ---------------------------------------------------------------------------
# Uniform closed forms
# ---------------------------------------------------------------------------


def _uniform_bound_exprs(h1: float, h2: float) -> tuple[float, float]:
    expr_a = (1.0 - h1) ** 2 / ((1.0 - h2) * h2 + (1.0 - h1) ** 2)
    expr_b = h2 * (1.0 - h1) / (h2 ** 2 + h1 * (1.0 - h1))
    return expr_a, expr_b


@dataclass(frozen=True)
class UniformClosedForms:
    h1: float
    h2: float
    w: float
    g: float | None  # offset of the interior indifference threshold above h1
    h_mid: float | None
    w_lo: float
    w_hi: float
    records: tuple[EquilibriumRecord, ...]


def uniform_closed_forms(
    h1: float,
    h2: float,
    w: float,
    economy: EconomyConfig | None = None,
    groups: Sequence[GroupSpec] | None = None,
    cost: CostModel | None = None,
    group_ids: tuple[str, str] = ("a1", "a2"),
) -> UniformClosedForms:
    """Closed-form equilibrium table for two uniformly-scored groups.

    Valid under 0 < h1 < h2 < 1, h2 > 1 - h1, and the balanced-economy
    condition n1 * payoff_tp = n2 * cost_fp (checked when economy and
    groups are supplied; otherwise the caller vouches for it). Qualification
    rates default to a uniform cost distribution; pass cost to override.

    The two w-bound expressions are reported sorted as (w_lo, w_hi); the
    stable corner equilibria exist for w above w_lo (at h1) and below w_hi
    (at h2) respectively, and the interior indifference equilibrium exists
    when the offset g lands inside (0, h2 - h1).
    """
    if not (0.0 < h1 < h2 < 1.0):
        raise AssumptionError(f"need 0 < h1 < h2 < 1, got h1={h1}, h2={h2}")
    if not h2 > 1.0 - h1:
        raise AssumptionError(f"need h2 > 1 - h1, got h2={h2}, 1-h1={1.0 - h1}")
    if not w > 0.0:
        raise AssumptionError(f"need a positive wage, got {w}")
    if (economy is None) != (groups is None):
        raise ParameterError("economy and groups must be supplied together")
    if economy is not None and groups is not None:
        groups = normalize_groups(groups)
        if len(groups) != 2:
            raise AssumptionError(f"the closed forms cover two groups, got {len(groups)}")
        n1, n2 = groups[0].proportion, groups[1].proportion
        lhs = n1 * economy.payoff_tp
        rhs = n2 * economy.cost_fp
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs), abs(rhs)):
            raise AssumptionError(
                f"balanced-economy condition violated: "
                f"n1*payoff_tp={lhs} differs from n2*cost_fp={rhs}"
            )
        group_ids = (groups[0].id, groups[1].id)
        if abs(economy.wage - w) > 1e-12:
            raise AssumptionError(f"wage mismatch: economy has {economy.wage}, w={w}")
    if len(set(group_ids)) != 2:
        raise ParameterError(f"group_ids must name two distinct groups, got {group_ids}")
    G = (cost or Uniform01()).cdf

    expr_a, expr_b = _uniform_bound_exprs(h1, h2)
    w_lo, w_hi = sorted((expr_a, expr_b))

    g = (1.0 - h1) * (-w * h2 ** 2 + h2 * (1.0 - h1) - w * h1 * (1.0 - h1)) / (
        w * ((1.0 - h1) ** 2 - h2 ** 2)
    )

    records = []
    if w > expr_b:
        # Utility is decreasing on (h1, h2) at these rates, so the cut
        # settles at the lower group threshold.
        records.append(
            EquilibriumRecord(
                label="h1",
                kind="FixedPoint",
                state=QualificationState.of(
                    {group_ids[0]: G(w), group_ids[1]: G(w * h1 / h2)}
                ),
                theta=h1,
                stability=STABLE,
            )
        )
    if w < expr_a:
        records.append(
            EquilibriumRecord(
                label="h2",
                kind="FixedPoint",
                state=QualificationState.of(
                    {group_ids[0]: G(w * (1.0 - h2) / (1.0 - h1)), group_ids[1]: G(w)}
                ),
                theta=h2,
                stability=STABLE,
            )
        )
    if 0.0 < g < h2 - h1:
        h_mid = h1 + g
        records.append(
            EquilibriumRecord(
                label="h_mid",
                kind="FixedPoint",
                state=QualificationState.of(
                    {
                        group_ids[0]: G(w * (1.0 - h_mid) / (1.0 - h1)),
                        group_ids[1]: G(w * h_mid / h2),
                    }
                ),
                theta=h_mid,
                stability=UNSTABLE,
            )
        )
    else:
        h_mid = None
        g = None
    return UniformClosedForms(
        h1=h1, h2=h2, w=w, g=g, h_mid=h_mid, w_lo=w_lo, w_hi=w_hi, records=tuple(records)
    )


# ---------------------------------------------------------------------------
# Gaussian closed forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianClosedForms:
    angle: float
    regime: str  # "stable_pair" | "limit_cycle"
    records: tuple[EquilibriumRecord, ...]


def gaussian_closed_forms(
    h1,
    h2,
    w: float,
    cost: CostModel,
    economy: EconomyConfig,
    group_ids: tuple[str, str] = ("a1", "a2"),
) -> GaussianClosedForms:
    """Closed-form equilibrium table for two equal-size halfspace groups.

    With payoff_tp > cost_fp: stable equilibria at each group boundary and
    an unstable one at the normalized midpoint. With payoff_tp < cost_fp:
    the midpoint equilibrium plus a period-2 cycle alternating between the
    two boundaries. The knife edge payoff_tp = cost_fp is refused; there
    the institution is indifferent along the whole arc and the closed
    forms do not apply.
    """
    v1 = np.asarray(h1, dtype=float)
    v2 = np.asarray(h2, dtype=float)
    for name, v in (("h1", v1), ("h2", v2)):
        norm = float(np.linalg.norm(v))
        if norm <= 0.0 or not math.isfinite(norm):
            raise ParameterError(f"{name} has no direction")
    v1 = v1 / np.linalg.norm(v1)
    v2 = v2 / np.linalg.norm(v2)
    ang = normalized_angle(v1, v2)
    if not 0.0 < ang < 1.0:
        raise PreconditionError(
            f"group boundaries must be distinct and not opposite, normalized angle {ang}"
        )
    if len(set(group_ids)) != 2:
        raise ParameterError(f"group_ids must name two distinct groups, got {group_ids}")
    p, c = economy.payoff_tp, economy.cost_fp
    if p == c:
        raise AssumptionError(
            "payoff_tp equals cost_fp: the institution is indifferent along the "
            "whole arc and the closed forms do not apply"
        )
    G = cost.cdf
    mid = (v1 + v2) / np.linalg.norm(v1 + v2)
    g_near, g_far = G(w), G(w * (1.0 - 2.0 * ang))

    mid_record = EquilibriumRecord(
        label="h_mid",
        kind="FixedPoint",
        state=QualificationState.of(
            {group_ids[0]: G(w * (1.0 - ang)), group_ids[1]: G(w * (1.0 - ang))}
        ),
        theta=mid,
        stability=UNSTABLE,
    )
    if p > c:
        records = (
            EquilibriumRecord(
                label="h1",
                kind="FixedPoint",
                state=QualificationState.of({group_ids[0]: g_near, group_ids[1]: g_far}),
                theta=v1,
                stability=STABLE,
            ),
            EquilibriumRecord(
                label="h2",
                kind="FixedPoint",
                state=QualificationState.of({group_ids[0]: g_far, group_ids[1]: g_near}),
                theta=v2,
                stability=STABLE,
            ),
            mid_record,
        )
        return GaussianClosedForms(angle=ang, regime="stable_pair", records=records)

    s1 = QualificationState.of({group_ids[0]: g_near, group_ids[1]: g_far})
    s2 = QualificationState.of({group_ids[0]: g_far, group_ids[1]: g_near})
    avg = QualificationState(
        ids=s1.ids,
        rates=tuple((a + b) / 2.0 for a, b in zip(s1.rates, s2.rates)),
    )
    cycle_record = EquilibriumRecord(
        label="cycle",
        kind="LimitCycle",
        state=avg,
        cycle=(s1, s2),
        period=2,
    )
    return GaussianClosedForms(
        angle=ang, regime="limit_cycle", records=(mid_record, cycle_record)
    )


# ---------------------------------------------------------------------------
# beta(pi): the institution-side response curve for one group
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BetaOfPi:
    """Sampled map pi -> beta(pi) = TPR(theta_br(pi)) - FPR(theta_br(pi)).

    pi_bar is the top of the contiguous low-end run of zero beta (the
    accept-no-one region); dbeta holds central-difference derivative
    estimates on the grid.
    """

    pis: tuple[float, ...]
    betas: tuple[float, ...]
    thetas: tuple[float, ...]
    dbeta: tuple[float, ...]
    pi_bar: float

    def beta_at(self, x: float) -> float:
        return float(np.interp(x, self.pis, self.betas))


def beta_of_pi(
    model,
    economy: EconomyConfig,
    grid_size: int = 201,
    *,
    cost: CostModel | None = None,
) -> BetaOfPi:
    """Sample beta(pi) for a single-group scalar feature model.

    The institution's best response needs a cost model only to break exact
    utility ties; the default uniform cost is used when none is given.
    """
    ids = tuple(model.group_ids)
    if len(ids) != 1:
        raise ConfigurationError(f"beta_of_pi needs a single-group model, got {len(ids)} groups")
    if grid_size < 11:
        raise ParameterError(f"grid_size must be at least 11, got {grid_size}")
    group = GroupSpec(id=ids[0], proportion=1.0, cost=cost or Uniform01())
    pis = np.linspace(0.0, 1.0, grid_size)
    betas = []
    thetas = []
    for x in pis:
        st = QualificationState(ids=ids, rates=(float(x),))
        th = institution_best_response(model, economy, (group,), st)
        tpr, fpr = model.tpr_fpr(ids[0], th)
        betas.append(tpr - fpr)
        thetas.append(float(th))
    betas_arr = np.array(betas)
    pi_bar = 0.0
    for x, b in zip(pis, betas_arr):
        if abs(b) <= 1e-12:
            pi_bar = float(x)
        else:
            break
    dbeta = np.gradient(betas_arr, pis)
    return BetaOfPi(
        pis=tuple(float(x) for x in pis),
        betas=tuple(float(b) for b in betas_arr),
        thetas=tuple(thetas),
        dbeta=tuple(float(d) for d in dbeta),
        pi_bar=pi_bar,
    )


# ---------------------------------------------------------------------------
# Equilibrium scan
# ---------------------------------------------------------------------------


def _phi_single(economy, group: GroupSpec, model, grid_size: int):
    ids = (group.id,)
    solo = (GroupSpec(id=group.id, proportion=1.0, cost=group.cost),)

    def phi(x: float) -> tuple[float, float]:
        st = QualificationState(ids=ids, rates=(min(1.0, max(0.0, float(x))),))
        th = institution_best_response(model, economy, solo, st, grid_size=grid_size)
        tpr, fpr = model.tpr_fpr(group.id, th)
        return response_rate(group.cost, economy.wage, tpr, fpr), float(th)

    return phi


def find_equilibria_scan(
    economy: EconomyConfig,
    groups: Sequence[GroupSpec],
    model,
    mode: str = "joint",
    grid: int | None = None,
    *,
    config: DynamicsConfig | None = None,
    seed: int = 0,
) -> tuple[EquilibriumRecord, ...]:
    """Enumerate equilibria by scanning initial conditions.

    One group: locate sign changes of Phi(pi) - pi on a grid, refine each
    by bisection, and drop any candidate whose fixed-point residual exceeds
    1e-6 (bisection converges to jump points of the piecewise map as
    readily as to true roots; the residual tells them apart). Both
    stability tests are attached: the finite-difference |Phi'| < 1 check
    and basin probing, with basin probing authoritative.

    Several groups: run the dynamics from every grid start, cluster the
    verdicts within 10 * fix_tol, and keep each cluster's smallest-residual
    member.
    """
    groups = normalize_groups(groups)
    if config is None:
        config = DynamicsConfig(mode=mode)
    elif config.mode != mode:
        raise ConfigurationError(f"config.mode={config.mode!r} conflicts with mode={mode!r}")
    if len(groups) == 1 and mode == "joint":
        return _scan_one_group(economy, groups[0], model, grid or 401, config, seed)
    return _scan_multi_group(economy, groups, model, grid or 21, config, seed)


def _scan_one_group(
    economy, group, model, grid: int, config: DynamicsConfig, seed: int
) -> tuple[EquilibriumRecord, ...]:
    phi = _phi_single(economy, group, model, config.theta_grid)
    xs = np.linspace(0.0, 1.0, grid)
    resp = np.array([phi(x)[0] for x in xs])
    psi = resp - xs

    roots: list[float] = []
    for x, r in ((0.0, psi[0]), (1.0, psi[-1])):
        if abs(r) <= config.fix_tol:
            roots.append(x)
    for i in range(grid - 1):
        if psi[i] == 0.0 and 0.0 < xs[i] < 1.0:
            roots.append(float(xs[i]))
        elif psi[i] * psi[i + 1] < 0.0:
            lo, hi = float(xs[i]), float(xs[i + 1])
            flo = psi[i]
            for _ in range(70):
                mid = 0.5 * (lo + hi)
                fm = phi(mid)[0] - mid
                if fm == 0.0:
                    lo = hi = mid
                    break
                if (flo < 0.0) == (fm < 0.0):
                    lo, flo = mid, fm
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))

    # Deduplicate, then keep only candidates that really are fixed points.
    radius = _DEDUP_FACTOR * config.fix_tol
    kept: list[tuple[float, float, float]] = []  # (x, residual, theta)
    for x in sorted(roots):
        fx, th = phi(x)
        residual = abs(fx - x)
        if residual > _NONZERO_TOL:
            continue  # a jump of the piecewise map, not a root
        if kept and abs(x - kept[-1][0]) <= radius:
            if residual < kept[-1][1]:
                kept[-1] = (x, residual, th)
            continue
        kept.append((x, residual, th))

    records = []
    for idx, (x, residual, th) in enumerate(kept):
        state = QualificationState(ids=(group.id,), rates=(x,))
        d_stable = _derivative_stable(phi, x)
        slope_ok = _slope_stable(phi, model, group, economy, x)
        if residual <= config.fix_tol:
            stability = classify_stability(
                economy, (group,), model, state, config, seed=seed
            )
        else:
            stability = NOT_ASSESSED
        if d_stable is not None and stability != NOT_ASSESSED:
            if d_stable != (stability == STABLE):
                warnings.warn(
                    f"stability tests disagree at pi={x:.6g}: derivative test says "
                    f"{'Stable' if d_stable else 'Unstable'}, basin probe says {stability}",
                    stacklevel=3,
                )
        records.append(
            EquilibriumRecord(
                label=f"eq{idx + 1}",
                kind="FixedPoint",
                state=state,
                theta=th,
                stability=stability,
                residual=residual,
                derivative_stable=d_stable,
                slope_stable=slope_ok,
            )
        )
    return tuple(records)


def _derivative_stable(phi, x: float, delta: float = 1e-6) -> bool | None:
    lo = max(0.0, x - delta)
    hi = min(1.0, x + delta)
    if hi <= lo:
        return None
    slope = (phi(hi)[0] - phi(lo)[0]) / (hi - lo)
    return abs(slope) < 1.0


def _slope_stable(phi, model, group, economy, x: float, delta: float = 1e-5) -> bool | None:
    """The decomposed local-stability test G'(w beta(pi)) < |beta'(pi)|,
    recorded for reference only (see the derivative test for the standard
    chain-rule criterion)."""

    def beta_at(v: float) -> float:
        _, th = phi(v)
        tpr, fpr = model.tpr_fpr(group.id, th)
        return tpr - fpr

    lo = max(0.0, x - delta)
    hi = min(1.0, x + delta)
    if hi <= lo:
        return None
    beta_x = beta_at(x)
    dbeta = (beta_at(hi) - beta_at(lo)) / (hi - lo)
    arg = economy.wage * beta_x
    g_lo = group.cost.cdf(arg - delta)
    g_hi = group.cost.cdf(arg + delta)
    g_prime = (g_hi - g_lo) / (2.0 * delta)
    return g_prime < abs(dbeta)


def _multi_starts(n_groups: int, grid: int) -> list[tuple[float, ...]]:
    axis = np.linspace(0.0, 1.0, grid)
    if n_groups <= 2:
        mesh = np.meshgrid(*([axis] * n_groups), indexing="ij")
        return [tuple(float(m[idx]) for m in mesh) for idx in np.ndindex(mesh[0].shape)]
    starts = [(float(v),) * n_groups for v in axis]  # diagonal
    for i in range(n_groups):
        for v in axis:
            point = [0.5] * n_groups
            point[i] = float(v)
            starts.append(tuple(point))
    return starts


def _scan_multi_group(
    economy, groups, model, grid: int, config: DynamicsConfig, seed: int
) -> tuple[EquilibriumRecord, ...]:
    ids = tuple(g.id for g in groups)
    fixed: list[tuple[QualificationState, float]] = []
    cycles: list[tuple[QualificationState, tuple[QualificationState, ...], int]] = []
    radius = _DEDUP_FACTOR * config.fix_tol

    for start in _multi_starts(len(groups), grid):
        outcome = iterate(
            economy, groups, model, QualificationState(ids=ids, rates=start), config
        )
        v = outcome.verdict
        if isinstance(v, FixedPoint):
            for i, (st, res) in enumerate(fixed):
                if v.state.sup_distance(st) <= radius:
                    if v.residual < res:
                        fixed[i] = (v.state, v.residual)
                    break
            else:
                fixed.append((v.state, v.residual))
        elif isinstance(v, LimitCycle):
            avg = cycle_average(outcome)
            for st, cyc, period in cycles:
                if period == v.period and avg.sup_distance(st) <= radius:
                    break
            else:
                cycles.append((avg, v.states, v.period))

    records = []
    fixed.sort(key=lambda item: item[0].rates)
    for st, res in fixed:
        theta = _theta_at(economy, groups, model, st, config)
        try:
            stability = classify_stability(economy, groups, model, st, config, seed=seed)
        except PreconditionError:
            stability = NOT_ASSESSED
        records.append(
            EquilibriumRecord(
                label=f"eq{len(records) + 1}",
                kind="FixedPoint",
                state=st,
                theta=theta,
                stability=stability,
                residual=res,
            )
        )
    cycles.sort(key=lambda item: item[0].rates)
    for st, cyc, period in cycles:
        records.append(
            EquilibriumRecord(
                label=f"cycle{period}_{len(records) + 1}",
                kind="LimitCycle",
                state=st,
                cycle=cyc,
                period=period,
            )
        )
    return tuple(records)


def _theta_at(economy, groups, model, state, config: DynamicsConfig):
    theta, _ = step(
        economy, groups, model, state, config.mode,
        grid_size=config.theta_grid, tie_tol=config.tie_tol,
    )
    return theta


# ---------------------------------------------------------------------------
# Near-realizability bound
# ---------------------------------------------------------------------------


def near_realizability_bound(eps: float, s: float, w: float, cost: CostModel) -> float:
    """Lower bound on the equilibrium qualification rate when the feature
    space contains an almost-perfect rule (TPR >= 1 - eps, FPR <= eps).

    Valid for starts in [s, 1-s]; requires 1 - s >= G(w) >= s + L * w * eps / s
    where L is the cost CDF's Lipschitz bound. The check is enforced when
    the bound's metadata is available and skipped with a warning otherwise.
    """
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps}")
    if not 0.0 < s < 0.5:
        raise ParameterError(f"s must lie in (0, 1/2), got {s}")
    if not w > 0.0:
        raise ParameterError(f"w must be positive, got {w}")
    lipschitz = getattr(cost, "lipschitz_bound", None)
    gw = cost.cdf(w)
    if lipschitz is None:
        warnings.warn(
            "cost model carries no Lipschitz bound; hypothesis check skipped",
            stacklevel=2,
        )
    else:
        lower = s + lipschitz * w * eps / s
        if not (1.0 - s >= gw and gw >= lower):
            raise AssumptionError(
                f"hypotheses fail: need 1-s >= G(w) >= s + L*w*eps/s, "
                f"got 1-s={1.0 - s}, G(w)={gw}, bound={lower}"
            )
    return cost.cdf(w * (1.0 - eps / s))


# ---------------------------------------------------------------------------
# Subsidies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImprovementRecord:
    base: EquilibriumRecord
    match: EquilibriumRecord | None  # best weakly-dominating equilibrium after subsidy
    improved: bool  # match dominates with strict improvement somewhere
    unchanged: bool  # match equals the base equilibrium within tolerance


@dataclass(frozen=True)
class GaussianSubsidyCheck:
    subsidized_group: str
    other_group: str
    precondition_holds: bool  # G_a(w) < G_b(w(1 - 2*angle)): only the far corner survives
    pre_rates: tuple[float, float]
    reappears: bool  # subsidized CDF now clears the bar at the group's own boundary
    post_rates: tuple[float, float]
    own_boundary_equilibrium_found: bool


@dataclass(frozen=True)
class SubsidyReport:
    base_equilibria: tuple[EquilibriumRecord, ...]
    subsidized_equilibria: tuple[EquilibriumRecord, ...]
    improvements: tuple[ImprovementRecord, ...]
    gaussian_check: GaussianSubsidyCheck | None


def subsidy_equilibrium_shift(
    economy: EconomyConfig,
    groups: Sequence[GroupSpec],
    model,
    base_cost: CostModel,
    new_cost: CostModel,
    *,
    mode: str = "joint",
    grid: int | None = None,
    tol: float = _NONZERO_TOL,
) -> SubsidyReport:
    """Compare equilibria before and after subsidizing qualification costs.

    new_cost must stochastically dominate base_cost (pointwise larger CDF,
    probed on a grid). Every group whose cost equals base_cost is switched
    to new_cost; equilibria are enumerated under both configurations, and
    each non-zero pre-subsidy fixed point is matched to the best
    weakly-dominating post-subsidy fixed point, if one exists.

    When the model is a two-group halfspace family and exactly one group is
    subsidized, the report also carries the unequal-cost corner check: with
    G_a(w) below the other group's rate bar the subsidized group's own
    boundary supports no equilibrium, and a large enough subsidy restores it.
    """
    groups = normalize_groups(groups)
    if not dominates(new_cost, base_cost):
        raise PreconditionError(
            "the subsidized cost CDF does not dominate the base CDF pointwise"
        )
    base_cfg = base_cost.to_config()
    switched = [g.id for g in groups if g.cost.to_config() == base_cfg]
    if not switched:
        raise ConfigurationError("no group uses the base cost model")
    groups_bar = tuple(
        GroupSpec(id=g.id, proportion=g.proportion, cost=new_cost)
        if g.cost.to_config() == base_cfg
        else g
        for g in groups
    )

    base_eqs = find_equilibria_scan(economy, groups, model, mode=mode, grid=grid)
    new_eqs = find_equilibria_scan(economy, groups_bar, model, mode=mode, grid=grid)

    improvements = []
    new_fixed = [r for r in new_eqs if r.kind == "FixedPoint"]
    for rec in base_eqs:
        if rec.kind != "FixedPoint" or not rec.nonzero:
            continue
        best = None
        best_gain = -math.inf
        for cand in new_fixed:
            diffs = [b - a for a, b in zip(rec.state.rates, cand.state.rates)]
            if min(diffs) >= -tol:
                gain = min(diffs)
                if gain > best_gain:
                    best, best_gain = cand, gain
        improved = best is not None and any(
            b - a > tol for a, b in zip(rec.state.rates, best.state.rates)
        )
        unchanged = best is not None and rec.state.sup_distance(best.state) <= tol
        improvements.append(
            ImprovementRecord(base=rec, match=best, improved=improved, unchanged=unchanged)
        )

    gaussian_check = None
    if isinstance(model, GaussianHalfspace) and len(groups) == 2 and len(switched) == 1:
        gaussian_check = _gaussian_subsidy_check(
            economy, groups, groups_bar, model, switched[0], new_eqs, tol
        )
    return SubsidyReport(
        base_equilibria=base_eqs,
        subsidized_equilibria=new_eqs,
        improvements=tuple(improvements),
        gaussian_check=gaussian_check,
    )


def _gaussian_subsidy_check(
    economy, groups, groups_bar, model, subsidized: str, new_eqs, tol
) -> GaussianSubsidyCheck:
    w = economy.wage
    ang = model.pair_angle
    sub = next(g for g in groups if g.id == subsidized)
    other = next(g for g in groups if g.id != subsidized)
    sub_bar = next(g for g in groups_bar if g.id == subsidized)

    pre_rates = (sub.cost.cdf(w), other.cost.cdf(w * (1.0 - 2.0 * ang)))
    post_rates = (sub_bar.cost.cdf(w), other.cost.cdf(w * (1.0 - 2.0 * ang)))
    h_sub = model.vector(subsidized)
    found = False
    for rec in new_eqs:
        if rec.kind != "FixedPoint" or rec.theta is None:
            continue
        theta = np.asarray(rec.theta, dtype=float)
        if theta.shape == h_sub.shape and normalized_angle(theta, h_sub) <= 1e-9:
            found = True
            break
    return GaussianSubsidyCheck(
        subsidized_group=subsidized,
        other_group=other.id,
        precondition_holds=pre_rates[0] < pre_rates[1] - tol,
        pre_rates=pre_rates,
        reappears=post_rates[0] > post_rates[1] + tol,
        post_rates=post_rates,
        own_boundary_equilibrium_found=found,
    )


# ---------------------------------------------------------------------------
# Equilibrium comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RankingReport:
    """Per-metric preference chains over a set of labeled equilibria.

    rankings maps metric name -> tiers, best first; labels in one tier are
    tied within tolerance. Balance prefers smaller values; qualification
    rates and utility prefer larger.
    """

    rankings: Mapping[str, tuple[tuple[str, ...], ...]]
    values: Mapping[str, Mapping[str, float]]

    def chain(self, metric: str) -> str:
        return " > ".join(" ~ ".join(tier) for tier in self.rankings[metric])


def compare_equilibria(
    equilibria: Sequence[EquilibriumRecord],
    economy: EconomyConfig,
    groups: Sequence[GroupSpec],
    model,
    *,
    tie_tol: float = 1e-9,
) -> RankingReport:
    """Rank equilibria on per-group qualification rate, balance, and
    institutional utility (utility from the engine's own evaluation, and
    only for fixed points carrying a theta).

    For a two-group uniform-threshold model with wage strictly inside the
    closed-form w interval and equilibria labeled h1/h_mid/h2, the known
    orderings are validated: group-1 rate h1 > h_mid > h2, group-2 rate
    h2 > h_mid > h1, balance h_mid > h1 > h2 (smaller is better). A strict
    inversion raises rather than silently emitting a wrong report.
    """
    if len(equilibria) < 2:
        raise ParameterError(f"need at least 2 equilibria to compare, got {len(equilibria)}")
    groups = normalize_groups(groups)
    labels = [r.label for r in equilibria]
    if len(set(labels)) != len(labels):
        raise ParameterError(f"equilibrium labels must be unique, got {labels}")

    values: dict[str, dict[str, float]] = {}
    ids = tuple(g.id for g in groups)
    for i, gid in enumerate(ids):
        values[f"pi:{gid}"] = {r.label: r.state.rates[i] for r in equilibria}
    values["balance"] = {r.label: state_balance(r.state) for r in equilibria}
    util: dict[str, float] = {}
    for r in equilibria:
        if r.kind == "FixedPoint" and r.theta is not None:
            util[r.label] = _utility_of(economy, groups, model, r.theta, r.state)
    values["utility"] = util

    rankings = {}
    for metric, vals in values.items():
        reverse = metric != "balance"
        rankings[metric] = _tiers(vals, reverse=reverse, tol=tie_tol)

    report = RankingReport(rankings=rankings, values=values)
    _validate_uniform_lemmas(report, equilibria, economy, model, ids)
    return report


def _utility_of(economy, groups, model, theta, state) -> float:
    total = 0.0
    for g, pi in zip(groups, state.rates):
        tpr, fpr = model.tpr_fpr(g.id, theta)
        total += g.proportion * (
            economy.payoff_tp * tpr * pi - economy.cost_fp * fpr * (1.0 - pi)
        )
    return total


def _tiers(vals: Mapping[str, float], reverse: bool, tol: float):
    ordered = sorted(vals.items(), key=lambda kv: kv[1], reverse=reverse)
    tiers: list[list[str]] = []
    last: float | None = None
    for label, v in ordered:
        if last is not None and abs(v - last) <= tol:
            tiers[-1].append(label)
        else:
            tiers.append([label])
        last = v
    return tuple(tuple(t) for t in tiers)


_UNIFORM_LEMMA_CHAINS = {
    # metric suffix -> expected strict order of the three labeled equilibria
    0: ("h1", "h_mid", "h2"),  # first group's rate
    1: ("h2", "h_mid", "h1"),  # second group's rate
    "balance": ("h_mid", "h1", "h2"),
}


def _validate_uniform_lemmas(report, equilibria, economy, model, ids) -> None:
    if not isinstance(model, UniformThreshold) or len(ids) != 2:
        return
    present = {r.label for r in equilibria}
    if not {"h1", "h_mid", "h2"} <= present:
        return
    h1 = model.threshold(ids[0])
    h2 = model.threshold(ids[1])
    if not h1 < h2:
        return
    expr_a, expr_b = _uniform_bound_exprs(h1, h2)
    w_lo, w_hi = sorted((expr_a, expr_b))
    if not w_lo < economy.wage < w_hi:
        return
    checks = [
        (f"pi:{ids[0]}", _UNIFORM_LEMMA_CHAINS[0]),
        (f"pi:{ids[1]}", _UNIFORM_LEMMA_CHAINS[1]),
        ("balance", _UNIFORM_LEMMA_CHAINS["balance"]),
    ]
    for metric, expected in checks:
        order = [
            label for tier in report.rankings[metric] for label in tier if label in expected
        ]
        tied = {
            frozenset(tier) for tier in report.rankings[metric] if len(set(tier) & set(expected)) > 1
        }
        if tuple(order) != expected or tied:
            raise QualdynError(
                f"known ordering violated on {metric}: expected {' > '.join(expected)}, "
                f"got {report.chain(metric)}"
            )
