"""Command-line front end for qualification-dynamics experiments.

Subcommands: run (one trajectory), sweep (initial-condition sweeps), find
(equilibrium enumeration with closed-form cross-checks), fit (score
histograms to Beta curves), verify (built-in assertion suites).

Scenario files are JSON with a top-level version field. Unknown fields are
rejected with a field-path diagnostic so a typo surfaces immediately
instead of silently running a different experiment.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .analysis import (
    EquilibriumRecord,
    find_equilibria_scan,
    gaussian_closed_forms,
    uniform_closed_forms,
)
from .core import EconomyConfig, GroupSpec, QualificationState, normalize_groups
from .costs import from_config as cost_from_config
from .costs import subsidize
from .dynamics import (
    DynamicsConfig,
    DynamicsOutcome,
    FixedPoint,
    LimitCycle,
    NonConverged,
    cycle_average,
    dynamics_from_config,
    iterate,
    step,
    trace_lines,
)
from .errors import (
    AssumptionError,
    ConfigurationError,
    ParameterError,
    ParseError,
    PreconditionError,
    QualdynError,
)
from .features import GaussianHalfspace, ScoreModel, UniformThreshold
from .features import from_config as features_from_config
from .ingest import fit_beta, fit_beta_resampled, load_histogram, to_score_model

CONFIG_VERSION = 1

_TOP_FIELDS = {"version", "economy", "groups", "features", "dynamics", "intervention", "seed"}
_ECONOMY_FIELDS = {"wage", "payoff_tp", "cost_fp"}
_GROUP_FIELDS = {"id", "proportion", "cost"}
_INTERVENTION_FIELDS = {"decouple", "subsidy"}
_SUBSIDY_FIELDS = {"group", "transform"}


# ---------------------------------------------------------------------------
# Scenario loading
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubsidySpec:
    """Cost intervention for one group: shift the CDF left by a fixed delta
    or compress it by a factor, both of which weakly raise every quantile's
    take-up."""

    group: str
    method: str  # "shift" | "scale"
    amount: float


@dataclass(frozen=True)
class Scenario:
    economy: EconomyConfig
    groups: tuple[GroupSpec, ...]
    model: object
    dynamics: DynamicsConfig
    seed: int = 0
    decouple: bool = False
    subsidy: SubsidySpec | None = None

    def effective_groups(self) -> tuple[GroupSpec, ...]:
        """Groups with the subsidy intervention applied, if any."""
        if self.subsidy is None:
            return self.groups
        kwargs = {self.subsidy.method: self.subsidy.amount}
        return tuple(
            replace(g, cost=subsidize(g.cost, **kwargs))
            if g.id == self.subsidy.group
            else g
            for g in self.groups
        )

    def run_config(self, force_decoupled: bool = False) -> DynamicsConfig:
        if force_decoupled or self.decouple:
            return replace(self.dynamics, mode="decoupled")
        return self.dynamics


def _require_mapping(obj, path: str) -> Mapping:
    if not isinstance(obj, Mapping):
        raise ConfigurationError(f"{path}: expected a mapping, got {type(obj).__name__}")
    return obj


def _number(obj, path: str) -> float:
    if not isinstance(obj, (int, float)) or isinstance(obj, bool):
        raise ConfigurationError(f"{path}: expected a number, got {obj!r}")
    return float(obj)


def _economy_from_config(obj, path: str = "economy") -> EconomyConfig:
    obj = _require_mapping(obj, path)
    unknown = set(obj) - _ECONOMY_FIELDS
    if unknown:
        raise ConfigurationError(f"{path}.{sorted(unknown)[0]}: unknown field")
    if "wage" not in obj:
        raise ConfigurationError(f"{path}.wage: missing required field")
    kwargs = {k: _number(v, f"{path}.{k}") for k, v in obj.items()}
    try:
        return EconomyConfig(**kwargs)
    except ParameterError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc


def _group_from_config(obj, path: str) -> GroupSpec:
    obj = _require_mapping(obj, path)
    unknown = set(obj) - _GROUP_FIELDS
    if unknown:
        raise ConfigurationError(f"{path}.{sorted(unknown)[0]}: unknown field")
    missing = _GROUP_FIELDS - set(obj)
    if missing:
        raise ConfigurationError(f"{path}.{sorted(missing)[0]}: missing required field")
    if not isinstance(obj["id"], str):
        raise ConfigurationError(f"{path}.id: expected a string, got {obj['id']!r}")
    try:
        return GroupSpec(
            id=obj["id"],
            proportion=_number(obj["proportion"], f"{path}.proportion"),
            cost=cost_from_config(obj["cost"], path=f"{path}.cost"),
        )
    except ParameterError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc


def _subsidy_from_config(obj, group_ids: Sequence[str], path: str) -> SubsidySpec:
    obj = _require_mapping(obj, path)
    unknown = set(obj) - _SUBSIDY_FIELDS
    if unknown:
        raise ConfigurationError(f"{path}.{sorted(unknown)[0]}: unknown field")
    missing = _SUBSIDY_FIELDS - set(obj)
    if missing:
        raise ConfigurationError(f"{path}.{sorted(missing)[0]}: missing required field")
    group = obj["group"]
    if group not in group_ids:
        raise ConfigurationError(
            f"{path}.group: {group!r} is not one of the declared groups {sorted(group_ids)}"
        )
    transform = _require_mapping(obj["transform"], f"{path}.transform")
    keys = set(transform)
    if len(keys) != 1 or not keys <= {"shift", "scale"}:
        raise ConfigurationError(
            f"{path}.transform: expected exactly one of shift or scale, got {sorted(keys)}"
        )
    method = next(iter(keys))
    amount = _number(transform[method], f"{path}.transform.{method}")
    if method == "shift" and amount < 0.0:
        raise ConfigurationError(f"{path}.transform.shift: must be >= 0, got {amount}")
    if method == "scale" and amount < 1.0:
        raise ConfigurationError(f"{path}.transform.scale: must be >= 1, got {amount}")
    return SubsidySpec(group=group, method=method, amount=amount)


def scenario_from_config(obj) -> Scenario:
    """Validate and build a scenario from a parsed config mapping."""
    obj = _require_mapping(obj, "config")
    unknown = set(obj) - _TOP_FIELDS
    if unknown:
        raise ConfigurationError(f"{sorted(unknown)[0]}: unknown field")
    if "version" not in obj:
        raise ConfigurationError("version: missing required field")
    if obj["version"] != CONFIG_VERSION:
        raise ConfigurationError(
            f"version: unsupported config version {obj['version']!r}; expected {CONFIG_VERSION}"
        )
    for field in ("economy", "groups", "features"):
        if field not in obj:
            raise ConfigurationError(f"{field}: missing required field")

    economy = _economy_from_config(obj["economy"])
    raw_groups = obj["groups"]
    if not isinstance(raw_groups, Sequence) or isinstance(raw_groups, (str, bytes)):
        raise ConfigurationError("groups: expected a list of group entries")
    parsed = [_group_from_config(entry, f"groups[{i}]") for i, entry in enumerate(raw_groups)]
    try:
        groups = normalize_groups(parsed)
    except ConfigurationError as exc:
        raise ConfigurationError(f"groups: {exc}") from exc
    group_ids = tuple(g.id for g in groups)
    model = features_from_config(obj["features"], group_ids, path="features")
    dynamics = dynamics_from_config(obj.get("dynamics", {}), path="dynamics")

    seed = obj.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigurationError(f"seed: expected a non-negative integer, got {seed!r}")

    decouple = False
    subsidy = None
    if "intervention" in obj:
        inter = _require_mapping(obj["intervention"], "intervention")
        unknown = set(inter) - _INTERVENTION_FIELDS
        if unknown:
            raise ConfigurationError(f"intervention.{sorted(unknown)[0]}: unknown field")
        if "decouple" in inter:
            if not isinstance(inter["decouple"], bool):
                raise ConfigurationError(
                    f"intervention.decouple: expected a boolean, got {inter['decouple']!r}"
                )
            decouple = inter["decouple"]
        if "subsidy" in inter:
            subsidy = _subsidy_from_config(inter["subsidy"], group_ids, "intervention.subsidy")

    return Scenario(
        economy=economy,
        groups=groups,
        model=model,
        dynamics=dynamics,
        seed=seed,
        decouple=decouple,
        subsidy=subsidy,
    )


def scenario_to_config(scenario: Scenario) -> dict:
    """Serialize a scenario back to its canonical config mapping."""
    economy = scenario.economy
    cfg: dict = {
        "version": CONFIG_VERSION,
        "economy": {
            "wage": economy.wage,
            "payoff_tp": economy.payoff_tp,
            "cost_fp": economy.cost_fp,
        },
        "groups": [
            {"id": g.id, "proportion": g.proportion, "cost": g.cost.to_config()}
            for g in scenario.groups
        ],
        "features": scenario.model.to_config(),
        "dynamics": scenario.dynamics.to_config(),
        "seed": scenario.seed,
    }
    intervention: dict = {}
    if scenario.decouple:
        intervention["decouple"] = True
    if scenario.subsidy is not None:
        intervention["subsidy"] = {
            "group": scenario.subsidy.group,
            "transform": {scenario.subsidy.method: scenario.subsidy.amount},
        }
    if intervention:
        cfg["intervention"] = intervention
    return cfg


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return scenario_from_config(obj)


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _parse_init(text: str, groups: tuple[GroupSpec, ...]) -> QualificationState:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ParameterError(f"--init: expected comma-separated numbers, got {text!r}") from None
    if len(values) == 1:
        values = values * len(groups)
    if len(values) != len(groups):
        raise ParameterError(
            f"--init: expected 1 or {len(groups)} rates for groups "
            f"{[g.id for g in groups]}, got {len(values)}"
        )
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ParameterError(f"--init: rates must lie in [0, 1], got {v}")
    return QualificationState(
        ids=tuple(g.id for g in groups), rates=tuple(values)
    )


def _settled_state(outcome: DynamicsOutcome) -> QualificationState:
    verdict = outcome.verdict
    if isinstance(verdict, FixedPoint):
        return verdict.state
    if isinstance(verdict, LimitCycle):
        return cycle_average(outcome)
    return verdict.last


def _fmt_state(state: QualificationState) -> str:
    return " ".join(f"{gid}={rate:.10g}" for gid, rate in zip(state.ids, state.rates))


def _fmt_theta(model, theta) -> str:
    if theta is None:
        return "-"
    if isinstance(theta, Mapping):
        return " ".join(f"{g}:{_fmt_theta(model, t)}" for g, t in sorted(theta.items()))
    if isinstance(model, GaussianHalfspace) and not np.isscalar(theta):
        try:
            return f"arc={model.arc_fraction(theta):.6g}"
        except QualdynError:
            return "(" + ",".join(f"{float(x):.4g}" for x in np.asarray(theta)) + ")"
    return f"{float(theta):.6g}"


def _write_lines(lines: Sequence[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# run
# ---------------------------------------------------------------------------


def cmd_run(args) -> int:
    scenario = load_scenario(args.config)
    groups = scenario.effective_groups()
    config = scenario.run_config(args.decoupled)
    if args.init:
        initial = _parse_init(args.init, groups)
    else:
        initial = QualificationState(
            ids=tuple(g.id for g in groups), rates=(0.5,) * len(groups)
        )
    outcome = iterate(scenario.economy, groups, scenario.model, initial, config)
    lines = trace_lines(outcome, scenario.model)
    _write_lines(lines, args.out)
    if args.out:
        verdict = outcome.verdict
        print(f"verdict: {verdict.name}")
        if isinstance(verdict, FixedPoint):
            print(f"pi: {_fmt_state(verdict.state)}")
            print(f"residual: {verdict.residual:.6g}")
        elif isinstance(verdict, LimitCycle):
            print(f"period: {verdict.period}")
            print(f"cycle average: {_fmt_state(cycle_average(outcome))}")
        else:
            print(f"last: {_fmt_state(verdict.last)}")
        print(f"trace: {len(outcome.trace)} records -> {args.out}")
    return 2 if isinstance(outcome.verdict, NonConverged) else 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------


def _sweep_starts(args, groups) -> list[tuple[list[float], QualificationState]]:
    ids = tuple(g.id for g in groups)
    if args.init:
        starts = []
        for chunk in args.init.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            state = _parse_init(chunk, groups)
            starts.append((list(state.rates), state))
        if not starts:
            raise ParameterError("--init: no start vectors given")
        return starts
    if args.grid < 2:
        raise ParameterError(f"--grid: a sweep needs at least 2 points, got {args.grid}")
    rates = np.linspace(0.0, 1.0, args.grid)
    return [
        (
            [float(r)],
            QualificationState(ids=ids, rates=(float(r),) * len(ids)),
        )
        for r in rates
    ]


def cmd_sweep(args) -> int:
    scenario = load_scenario(args.config)
    groups = scenario.effective_groups()
    ids = [g.id for g in groups]
    want_decoupled = args.decoupled or scenario.decouple
    starts = _sweep_starts(args, groups)
    per_group_init = args.init is not None

    joint_cfg = replace(scenario.dynamics, mode="joint")
    dec_cfg = replace(scenario.dynamics, mode="decoupled")
    economy, model = scenario.economy, scenario.model

    header = (
        [f"init_{gid}" for gid in ids] if per_group_init else ["init"]
    ) + [f"joint_pi_{gid}" for gid in ids] + ["joint_verdict"]
    if want_decoupled:
        header += [f"decoupled_pi_{gid}" for gid in ids]
        header += ["decoupled_verdict"]
        header += [f"delta_{gid}" for gid in ids]

    def one_row(start) -> list[str]:
        init_cells, state = start
        joint = iterate(economy, groups, model, state, joint_cfg)
        joint_pi = _settled_state(joint)
        row = [repr(v) for v in init_cells]
        row += [repr(r) for r in joint_pi.rates]
        row.append(joint.verdict.name)
        if want_decoupled:
            dec = iterate(economy, groups, model, state, dec_cfg)
            dec_pi = _settled_state(dec)
            row += [repr(r) for r in dec_pi.rates]
            row.append(dec.verdict.name)
            row += [repr(d - j) for d, j in zip(dec_pi.rates, joint_pi.rates)]
        return row

    # Rows are independent; run them concurrently but emit in grid order.
    with ThreadPoolExecutor(max_workers=min(8, len(starts))) as pool:
        rows = list(pool.map(one_row, starts))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if args.out:
        Path(args.out).write_text(buffer.getvalue())
        print(f"sweep: {len(rows)} rows -> {args.out}")
    else:
        sys.stdout.write(buffer.getvalue())
    return 0


# ---------------------------------------------------------------------------
# find
# ---------------------------------------------------------------------------


def _shared_cost(groups):
    first = groups[0].cost
    cfg = first.to_config()
    if all(g.cost.to_config() == cfg for g in groups[1:]):
        return first
    return None


def _closed_form_records(scenario, groups):
    """Closed-form equilibria for the solvable variants, or a refusal note."""
    model, economy = scenario.model, scenario.economy
    if isinstance(model, ScoreModel):
        return None, None
    if len(groups) != 2:
        return None, "closed forms cover exactly two groups"
    cost = _shared_cost(groups)
    if cost is None:
        return None, "closed forms need one cost model shared by both groups"
    g0, g1 = groups
    if isinstance(model, UniformThreshold):
        pairs = sorted(((model.threshold(g.id), g) for g in groups), key=lambda p: p[0])
        (h_lo, grp_lo), (h_hi, grp_hi) = pairs
        lhs = grp_lo.proportion * economy.payoff_tp
        rhs = grp_hi.proportion * economy.cost_fp
        if abs(lhs - rhs) > 1e-12 * max(1.0, abs(lhs), abs(rhs)):
            return None, (
                f"balanced-economy condition fails: n_lo*payoff_tp={lhs:.6g} "
                f"differs from n_hi*cost_fp={rhs:.6g}"
            )
        try:
            table = uniform_closed_forms(
                h_lo, h_hi, economy.wage, cost=cost, group_ids=(grp_lo.id, grp_hi.id)
            )
        except (AssumptionError, PreconditionError, ParameterError) as exc:
            return None, str(exc)
        return table.records, None
    try:
        table = gaussian_closed_forms(
            model.vector(g0.id),
            model.vector(g1.id),
            economy.wage,
            cost,
            economy,
            group_ids=(g0.id, g1.id),
        )
    except (AssumptionError, PreconditionError, ParameterError) as exc:
        return None, str(exc)
    return table.records, None


def _map_residual(economy, groups, model, rec: EquilibriumRecord, cfg) -> float:
    """Sup-norm residual of a closed-form record under one joint step."""

    def advance(state):
        _, nxt = step(
            economy, groups, model, state, "joint",
            grid_size=cfg.theta_grid, tie_tol=cfg.tie_tol,
        )
        return nxt

    if rec.kind == "FixedPoint":
        return advance(rec.state).sup_distance(rec.state)
    s1, s2 = rec.cycle
    return max(advance(s1).sup_distance(s2), advance(s2).sup_distance(s1))


def _print_record(model, rec: EquilibriumRecord, residual: float | None) -> None:
    res = "-" if residual is None else f"{residual:.3g}"
    extra = f" period={rec.period}" if rec.kind == "LimitCycle" else ""
    print(
        f"  {rec.label:<10} {rec.kind:<11} {rec.stability:<12} "
        f"residual={res:<10} theta={_fmt_theta(model, rec.theta):<16} "
        f"pi: {_fmt_state(rec.state)}{extra}"
    )


def cmd_find(args) -> int:
    scenario = load_scenario(args.config)
    groups = scenario.effective_groups()
    mode = "decoupled" if (args.decoupled or scenario.decouple) else scenario.dynamics.mode
    config = replace(scenario.dynamics, mode=mode)
    seed = args.seed if args.seed is not None else scenario.seed

    records = find_equilibria_scan(
        scenario.economy, groups, scenario.model, mode=mode,
        grid=args.grid, config=config, seed=seed,
    )
    print(f"equilibria ({mode} scan):")
    if not records:
        print("  none found")
    for rec in records:
        _print_record(scenario.model, rec, rec.residual)

    if mode != "joint":
        return 0
    closed, note = _closed_form_records(scenario, groups)
    if note is not None:
        print(f"closed forms unavailable: {note}")
    elif closed is not None:
        print("closed forms (residual = sup distance after one joint step):")
        worst = 0.0
        for rec in closed:
            residual = _map_residual(scenario.economy, groups, scenario.model, rec, config)
            worst = max(worst, residual)
            _print_record(scenario.model, rec, residual)
        print(f"max closed-form discrepancy: {worst:.6g}")
    return 0


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


def cmd_fit(args) -> int:
    hist = load_histogram(args.histogram)
    fits: dict[str, dict[int, object]] = {}
    diagnostics: list[str] = []
    for group in sorted(hist.groups):
        fits[group] = {}
        for label in (1, 0):
            if args.resample is not None:
                fit = fit_beta_resampled(hist, group, label, args.resample, args.seed)
            else:
                fit = fit_beta(hist, group, label)
            fits[group][label] = fit
            diagnostics.append(
                f"group {group} label {label}: alpha={fit.alpha:.6g} beta={fit.beta:.6g} "
                f"loglik={fit.log_likelihood:.6g} iterations={fit.iterations}"
            )
    model = to_score_model(fits)
    snippet = json.dumps(model.to_config(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(snippet + "\n")
        for line in diagnostics:
            print(line)
        print(f"feature block -> {args.out}")
    else:
        for line in diagnostics:
            print(line, file=sys.stderr)
        print(snippet)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    from . import verification

    results = verification.run_suite(args.suite)
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.name:<{width}}  {r.detail}")
    passed = sum(1 for r in results if r.passed)
    print(f"suite {args.suite}: {passed}/{len(results)} passed")
    return 0 if passed == len(results) else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; 2 is reserved for
    non-convergence here, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qualdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_p = sub.add_parser("run", help="run one trajectory and write its trace")
    run_p.add_argument("--config", required=True, help="scenario file (JSON)")
    run_p.add_argument(
        "--init",
        help="initial rates, one number or comma-separated per group in id order "
        "(default 0.5 everywhere)",
    )
    run_p.add_argument("--out", help="trace destination (default: stdout)")
    run_p.add_argument("--decoupled", action="store_true", help="force per-group rules")
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="sweep initial rates and tabulate outcomes")
    sweep_p.add_argument("--config", required=True, help="scenario file (JSON)")
    sweep_p.add_argument("--grid", type=int, default=11, help="number of shared starts (>= 2)")
    sweep_p.add_argument(
        "--init",
        help="explicit start vectors instead of the shared grid, "
        "semicolon-separated (e.g. '0.2,0.7;0.5,0.5')",
    )
    sweep_p.add_argument("--out", help="CSV destination (default: stdout)")
    sweep_p.add_argument(
        "--decoupled", action="store_true", help="also run decoupled dynamics and report deltas"
    )
    sweep_p.set_defaults(func=cmd_sweep)

    find_p = sub.add_parser("find", help="enumerate equilibria and cross-check closed forms")
    find_p.add_argument("--config", required=True, help="scenario file (JSON)")
    find_p.add_argument("--grid", type=int, default=None, help="scan grid size")
    find_p.add_argument("--seed", type=int, default=None, help="seed for stability probes")
    find_p.add_argument("--decoupled", action="store_true", help="scan decoupled dynamics")
    find_p.set_defaults(func=cmd_find)

    fit_p = sub.add_parser("fit", help="fit Beta score curves to a histogram CSV")
    fit_p.add_argument("histogram", help="CSV with columns group,label,score,count")
    fit_p.add_argument("--out", help="feature-block destination (default: stdout)")
    fit_p.add_argument(
        "--resample", type=int, default=None,
        help="fit on N resampled draws instead of bin masses",
    )
    fit_p.add_argument("--seed", type=int, default=0, help="resampling seed")
    fit_p.set_defaults(func=cmd_fit)

    verify_p = sub.add_parser("verify", help="run a built-in assertion suite")
    verify_p.add_argument(
        "suite",
        help="one of: realizable, near-realizable, uniform, gaussian, "
        "multi-eq, subsidy, decoupling",
    )
    verify_p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except QualdynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
