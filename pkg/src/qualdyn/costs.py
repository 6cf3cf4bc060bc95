"""Investment-cost distributions.

Individuals invest in qualification when the wage-weighted benefit exceeds
their private cost; the population's response is therefore read off a cost
CDF G. This module provides the built-in G families (uniform, truncated
normal, bimodal normal mixture, empirical piecewise-linear) plus the two
subsidy transforms, which act on the CDF itself: a shift makes G_bar(x) =
G(x + delta), a scale makes G_bar(x) = G(x * factor). Both dominate the
base CDF pointwise, which is what makes them subsidies.

All models are immutable and evaluation is pure.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ConfigurationError, ParameterError, UnsupportedModelError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Quantile solver target: |cdf(x) - p| at the returned point.
QUANTILE_TOL = 1e-10


def _normal_cdf(z: float) -> float:
    # erf is correctly rounded in libm; this is accurate to well under 1e-12.
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


def _normal_pdf(z: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * z * z)


class CostModel:
    """Base for cost CDFs.

    Subclasses set `kind`, `support` (the closed interval on which the CDF
    climbs from its minimum to 1), `strictly_increasing`, and
    `lipschitz_bound` (a valid Lipschitz constant for the CDF, used by the
    near-realizability hypothesis check; None when unknown).
    """

    kind: str = "abstract"

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def strictly_increasing(self) -> bool:
        raise NotImplementedError

    @property
    def lipschitz_bound(self) -> float | None:
        return None

    def _cdf_on_support(self, x: float) -> float:
        raise NotImplementedError

    def cdf(self, x: float) -> float:
        """G(x), clamped to 0 below the support and 1 above it."""
        lo, hi = self.support
        if x < lo:
            return 0.0
        if x > hi:
            return 1.0
        return min(1.0, max(0.0, self._cdf_on_support(x)))

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Uniform01(CostModel):
    """Costs uniform on [0, 1]: G(x) = x."""

    kind = "uniform01"

    @property
    def support(self) -> tuple[float, float]:
        return (0.0, 1.0)

    @property
    def strictly_increasing(self) -> bool:
        return True

    @property
    def lipschitz_bound(self) -> float:
        return 1.0

    def _cdf_on_support(self, x: float) -> float:
        return x

    def to_config(self) -> dict:
        return {"kind": "uniform01"}


@dataclass(frozen=True)
class TruncatedNormal(CostModel):
    """Normal(mu, sigma) conditioned on [lo, hi], so the CDF spans 0..1 there."""

    mu: float
    sigma: float
    lo: float = 0.0
    hi: float = 1.0
    kind = "truncated_normal"

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not self.lo < self.hi:
            raise ParameterError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self._mass() <= 0.0:
            raise ParameterError(
                f"normal({self.mu}, {self.sigma}) has no mass on [{self.lo}, {self.hi}]"
            )

    def _z(self, x: float) -> float:
        return (x - self.mu) / self.sigma

    def _mass(self) -> float:
        return _normal_cdf(self._z(self.hi)) - _normal_cdf(self._z(self.lo))

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def strictly_increasing(self) -> bool:
        return True

    @property
    def lipschitz_bound(self) -> float:
        # Peak of the truncated density, attained at mu clamped into [lo, hi].
        peak = min(max(self.mu, self.lo), self.hi)
        return _normal_pdf(self._z(peak)) / (self.sigma * self._mass())

    def _cdf_on_support(self, x: float) -> float:
        return (_normal_cdf(self._z(x)) - _normal_cdf(self._z(self.lo))) / self._mass()

    def to_config(self) -> dict:
        return {
            "kind": "truncated_normal",
            "mu": self.mu,
            "sigma": self.sigma,
            "lo": self.lo,
            "hi": self.hi,
        }


@dataclass(frozen=True)
class BimodalNormal(CostModel):
    """Mixture of two truncated normals on a common interval.

    mix is the weight on the first component. Each component is normalized
    on [lo, hi] separately, so the mixture CDF still spans 0..1.
    """

    mu1: float
    sigma1: float
    mu2: float
    sigma2: float
    mix: float
    lo: float = 0.0
    hi: float = 1.0
    kind = "bimodal_normal"

    def __post_init__(self) -> None:
        if not 0.0 <= self.mix <= 1.0:
            raise ParameterError(f"mix must lie in [0, 1], got {self.mix}")
        # Component constructors validate sigmas, interval, and mass.
        object.__setattr__(
            self, "_c1", TruncatedNormal(self.mu1, self.sigma1, self.lo, self.hi)
        )
        object.__setattr__(
            self, "_c2", TruncatedNormal(self.mu2, self.sigma2, self.lo, self.hi)
        )

    @property
    def support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    @property
    def strictly_increasing(self) -> bool:
        return True

    @property
    def lipschitz_bound(self) -> float:
        # Mix-weighted bound on the density peaks; a valid (not tight) constant.
        return self.mix * self._c1.lipschitz_bound + (1.0 - self.mix) * self._c2.lipschitz_bound

    def _cdf_on_support(self, x: float) -> float:
        return self.mix * self._c1.cdf(x) + (1.0 - self.mix) * self._c2.cdf(x)

    def to_config(self) -> dict:
        return {
            "kind": "bimodal_normal",
            "mu1": self.mu1,
            "sigma1": self.sigma1,
            "mu2": self.mu2,
            "sigma2": self.sigma2,
            "mix": self.mix,
            "lo": self.lo,
            "hi": self.hi,
        }


@dataclass(frozen=True)
class EmpiricalCdf(CostModel):
    """Piecewise-linear CDF through explicit (x, G(x)) knots.

    Knots must have strictly increasing x >= 0, nondecreasing G values in
    [0, 1], and end at G = 1. Linear interpolation keeps the CDF continuous.
    """

    knots: tuple[tuple[float, float], ...]
    kind = "empirical"

    def __post_init__(self) -> None:
        knots = tuple((float(x), float(y)) for x, y in self.knots)
        object.__setattr__(self, "knots", knots)
        if len(knots) < 2:
            raise ParameterError("empirical CDF needs at least 2 knots")
        xs = [x for x, _ in knots]
        ys = [y for _, y in knots]
        if xs[0] < 0.0:
            raise ParameterError(f"cost support must be nonnegative, first knot at {xs[0]}")
        for i in range(1, len(knots)):
            if xs[i] <= xs[i - 1]:
                raise ParameterError(f"knot x values must strictly increase at index {i}")
            if ys[i] < ys[i - 1]:
                raise ParameterError(f"knot CDF values decrease at index {i}")
        if not 0.0 <= ys[0]:
            raise ParameterError(f"CDF values must be nonnegative, got {ys[0]}")
        if abs(ys[-1] - 1.0) > 1e-12:
            raise ParameterError(f"last knot must have CDF value 1, got {ys[-1]}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.knots[0][0], self.knots[-1][0])

    @property
    def strictly_increasing(self) -> bool:
        return all(b[1] > a[1] for a, b in zip(self.knots, self.knots[1:]))

    @property
    def lipschitz_bound(self) -> float:
        return max((b[1] - a[1]) / (b[0] - a[0]) for a, b in zip(self.knots, self.knots[1:]))

    def _cdf_on_support(self, x: float) -> float:
        xs = [k[0] for k in self.knots]
        i = bisect_right(xs, x)
        if i == 0:
            return self.knots[0][1]
        if i == len(xs):
            return self.knots[-1][1]
        (x0, y0), (x1, y1) = self.knots[i - 1], self.knots[i]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def to_config(self) -> dict:
        return {"kind": "empirical", "knots": [[x, y] for x, y in self.knots]}


@dataclass(frozen=True)
class Shifted(CostModel):
    """Subsidized costs via G_bar(x) = G(x + delta), delta >= 0."""

    base: CostModel
    delta: float
    kind = "shifted"

    def __post_init__(self) -> None:
        if self.delta < 0:
            raise ParameterError(f"shift delta must be >= 0, got {self.delta}")

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.base.support
        return (lo - self.delta, hi - self.delta)

    @property
    def strictly_increasing(self) -> bool:
        return self.base.strictly_increasing

    @property
    def lipschitz_bound(self) -> float | None:
        return self.base.lipschitz_bound

    def _cdf_on_support(self, x: float) -> float:
        return self.base.cdf(x + self.delta)

    def to_config(self) -> dict:
        return {"kind": "shifted", "base": self.base.to_config(), "delta": self.delta}


@dataclass(frozen=True)
class Scaled(CostModel):
    """Subsidized costs via G_bar(x) = G(x * factor), factor >= 1."""

    base: CostModel
    factor: float
    kind = "scaled"

    def __post_init__(self) -> None:
        if self.factor < 1.0:
            raise ParameterError(f"scale factor must be >= 1, got {self.factor}")

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.base.support
        return (lo / self.factor, hi / self.factor)

    @property
    def strictly_increasing(self) -> bool:
        return self.base.strictly_increasing

    @property
    def lipschitz_bound(self) -> float | None:
        base = self.base.lipschitz_bound
        return None if base is None else base * self.factor

    def _cdf_on_support(self, x: float) -> float:
        return self.base.cdf(x * self.factor)

    def to_config(self) -> dict:
        return {"kind": "scaled", "base": self.base.to_config(), "factor": self.factor}


def subsidize(
    model: CostModel, *, shift: float | None = None, scale: float | None = None
) -> CostModel:
    """Build the dominating CDF for a subsidy.

    Exactly one of shift (delta >= 0) or scale (factor >= 1) must be given;
    anything else would break G_bar >= G and is rejected.
    """
    if (shift is None) == (scale is None):
        raise ParameterError("specify exactly one of shift= or scale=")
    if shift is not None:
        if shift < 0:
            raise ParameterError(f"shift delta must be >= 0, got {shift}")
        return Shifted(model, float(shift))
    assert scale is not None
    if scale < 1.0:
        raise ParameterError(f"scale factor must be >= 1, got {scale}")
    return Scaled(model, float(scale))


def inverse_cdf(model: CostModel, p: float) -> float:
    """Quantile of a strictly increasing cost CDF, by bisection on the support.

    Returns x with |cdf(x) - p| <= 1e-10. Raises UnsupportedModelError for
    models with flat segments (the quantile there is ill-defined) and
    ParameterError when p is outside the CDF's attained range.
    """
    if not model.strictly_increasing:
        raise UnsupportedModelError(
            f"inverse_cdf requires a strictly increasing CDF; {model.kind} has flat segments"
        )
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"quantile level must lie in [0, 1], got {p}")
    lo, hi = model.support
    f_lo = model.cdf(lo) - p
    f_hi = model.cdf(hi) - p
    if f_lo > QUANTILE_TOL:
        raise ParameterError(
            f"p={p} lies below the CDF's value {model.cdf(lo)} at the support edge"
        )
    if abs(f_lo) <= QUANTILE_TOL:
        return lo
    if abs(f_hi) <= QUANTILE_TOL and f_hi <= 0.0:
        return hi
    # 200 halvings shrink any bracket far below float resolution; the loop
    # exits early once the CDF residual target is met.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = model.cdf(mid) - p
        if abs(f_mid) <= QUANTILE_TOL:
            return mid
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dominates(candidate: CostModel, base: CostModel, points: int = 1001) -> bool:
    """Probe whether candidate's CDF is pointwise >= base's on a shared grid."""
    lo = min(candidate.support[0], base.support[0])
    hi = max(candidate.support[1], base.support[1])
    step = (hi - lo) / (points - 1)
    for i in range(points):
        x = lo + i * step
        if candidate.cdf(x) < base.cdf(x) - 1e-12:
            return False
    return True


_KIND_FIELDS: dict[str, set[str]] = {
    "uniform01": set(),
    "truncated_normal": {"mu", "sigma", "lo", "hi"},
    "bimodal_normal": {"mu1", "sigma1", "mu2", "sigma2", "mix", "lo", "hi"},
    "empirical": {"knots"},
    "shifted": {"base", "delta"},
    "scaled": {"base", "factor"},
}

_KIND_REQUIRED: dict[str, set[str]] = {
    "uniform01": set(),
    "truncated_normal": {"mu", "sigma"},
    "bimodal_normal": {"mu1", "sigma1", "mu2", "sigma2", "mix"},
    "empirical": {"knots"},
    "shifted": {"base", "delta"},
    "scaled": {"base", "factor"},
}


def from_config(obj: Mapping, path: str = "cost") -> CostModel:
    """Build a cost model from a scenario-config mapping.

    The mapping needs a `kind` discriminator; unknown kinds and unknown or
    missing fields are configuration errors naming the offending path.
    """
    if not isinstance(obj, Mapping):
        raise ConfigurationError(f"{path}: expected a mapping, got {type(obj).__name__}")
    if "kind" not in obj:
        raise ConfigurationError(f"{path}.kind: missing required field")
    kind = obj["kind"]
    if kind not in _KIND_FIELDS:
        raise ConfigurationError(f"{path}.kind: unknown cost kind {kind!r}")
    given = set(obj) - {"kind"}
    unknown = given - _KIND_FIELDS[kind]
    if unknown:
        raise ConfigurationError(f"{path}.{sorted(unknown)[0]}: unknown field for kind {kind!r}")
    missing = _KIND_REQUIRED[kind] - given
    if missing:
        raise ConfigurationError(f"{path}.{sorted(missing)[0]}: missing required field")
    try:
        if kind == "uniform01":
            return Uniform01()
        if kind == "truncated_normal":
            return TruncatedNormal(
                mu=float(obj["mu"]),
                sigma=float(obj["sigma"]),
                lo=float(obj.get("lo", 0.0)),
                hi=float(obj.get("hi", 1.0)),
            )
        if kind == "bimodal_normal":
            return BimodalNormal(
                mu1=float(obj["mu1"]),
                sigma1=float(obj["sigma1"]),
                mu2=float(obj["mu2"]),
                sigma2=float(obj["sigma2"]),
                mix=float(obj["mix"]),
                lo=float(obj.get("lo", 0.0)),
                hi=float(obj.get("hi", 1.0)),
            )
        if kind == "empirical":
            knots = obj["knots"]
            if not isinstance(knots, Sequence):
                raise ParameterError("knots must be a sequence of [x, G(x)] pairs")
            return EmpiricalCdf(tuple((float(x), float(y)) for x, y in knots))
        if kind == "shifted":
            return Shifted(from_config(obj["base"], f"{path}.base"), float(obj["delta"]))
        if kind == "scaled":
            return Scaled(from_config(obj["base"], f"{path}.base"), float(obj["factor"]))
    except ParameterError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    raise AssertionError("unreachable")
