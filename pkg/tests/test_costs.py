import pytest
from hypothesis import given
from hypothesis import strategies as st

from qualdyn import (
    BimodalNormal,
    ConfigurationError,
    EmpiricalCdf,
    ParameterError,
    Scaled,
    Shifted,
    TruncatedNormal,
    Uniform01,
    UnsupportedModelError,
    dominates,
    inverse_cdf,
    subsidize,
)
from qualdyn.costs import from_config


def test_uniform01_clamps():
    g = Uniform01()
    assert g.cdf(-0.5) == 0.0
    assert g.cdf(0.25) == pytest.approx(0.25)
    assert g.cdf(2.0) == 1.0
    assert g.strictly_increasing
    assert g.lipschitz_bound == pytest.approx(1.0)


def test_truncated_normal_basic():
    g = TruncatedNormal(mu=0.6, sigma=0.1)
    assert g.cdf(0.0) == 0.0
    assert g.cdf(1.0) == pytest.approx(1.0)
    assert 0.49 < g.cdf(0.6) < 0.51
    xs = [i / 50 for i in range(51)]
    vals = [g.cdf(x) for x in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ParameterError):
        TruncatedNormal(mu=0.5, sigma=0.0)
    with pytest.raises(ParameterError):
        TruncatedNormal(mu=0.5, sigma=0.1, lo=0.8, hi=0.2)


def test_bimodal_normal_is_a_mixture():
    g = BimodalNormal(mu1=0.25, sigma1=0.1, mu2=0.75, sigma2=0.1, mix=0.5)
    g1 = TruncatedNormal(mu=0.25, sigma=0.1)
    g2 = TruncatedNormal(mu=0.75, sigma=0.1)
    # Each component is normalized over [lo, hi] before mixing.
    for x in (0.1, 0.3, 0.5, 0.9):
        assert g.cdf(x) == pytest.approx(0.5 * g1.cdf(x) + 0.5 * g2.cdf(x), abs=1e-12)
    with pytest.raises(ParameterError):
        BimodalNormal(mu1=0.2, sigma1=0.1, mu2=0.8, sigma2=0.1, mix=1.5)


def test_empirical_cdf_interpolates_and_validates():
    g = EmpiricalCdf(((0.0, 0.0), (0.5, 0.8), (1.0, 1.0)))
    assert g.cdf(0.25) == pytest.approx(0.4)
    assert g.cdf(0.75) == pytest.approx(0.9)
    assert g.cdf(-1.0) == 0.0 and g.cdf(2.0) == 1.0
    with pytest.raises(ParameterError):
        EmpiricalCdf(((0.0, 0.0),))
    with pytest.raises(ParameterError):
        EmpiricalCdf(((0.0, 0.0), (0.5, 0.9), (1.0, 0.8)))
    with pytest.raises(ParameterError):
        EmpiricalCdf(((0.0, 0.0), (1.0, 0.9)))


def test_shift_and_scale_semantics():
    base = Uniform01()
    shifted = Shifted(base, 0.1)
    scaled = Scaled(base, 2.0)
    assert shifted.cdf(0.3) == pytest.approx(0.4)
    assert scaled.cdf(0.3) == pytest.approx(0.6)
    with pytest.raises(ParameterError):
        Shifted(base, -0.1)
    with pytest.raises(ParameterError):
        Scaled(base, 0.5)


def test_subsidize_requires_exactly_one_transform():
    base = Uniform01()
    assert isinstance(subsidize(base, shift=0.1), Shifted)
    assert isinstance(subsidize(base, scale=1.5), Scaled)
    with pytest.raises(ParameterError):
        subsidize(base)
    with pytest.raises(ParameterError):
        subsidize(base, shift=0.1, scale=1.5)
    with pytest.raises(ParameterError):
        subsidize(base, shift=-0.2)
    with pytest.raises(ParameterError):
        subsidize(base, scale=0.9)


def test_dominates():
    base = TruncatedNormal(mu=0.6, sigma=0.1)
    assert dominates(subsidize(base, shift=0.05), base)
    assert dominates(subsidize(base, scale=1.2), base)
    assert dominates(base, base)
    assert not dominates(base, subsidize(base, shift=0.05))


def test_inverse_cdf_round_trip():
    for g in (Uniform01(), TruncatedNormal(mu=0.4, sigma=0.2)):
        for p in (0.1, 0.5, 0.9):
            x = inverse_cdf(g, p)
            assert g.cdf(x) == pytest.approx(p, abs=1e-8)


def test_inverse_cdf_rejects_flat_cdf():
    flat = EmpiricalCdf(((0.0, 0.0), (0.4, 0.5), (0.6, 0.5), (1.0, 1.0)))
    assert not flat.strictly_increasing
    with pytest.raises(UnsupportedModelError):
        inverse_cdf(flat, 0.5)


def test_from_config_round_trip():
    models = (
        Uniform01(),
        TruncatedNormal(mu=0.6, sigma=0.1),
        BimodalNormal(mu1=0.25, sigma1=0.12, mu2=0.6, sigma2=0.12, mix=0.5),
        EmpiricalCdf(((0.0, 0.0), (0.5, 0.8), (1.0, 1.0))),
        Shifted(TruncatedNormal(mu=0.6, sigma=0.1), 0.05),
        Scaled(Uniform01(), 1.5),
    )
    for model in models:
        rebuilt = from_config(model.to_config())
        assert rebuilt == model
        assert rebuilt.to_config() == model.to_config()


def test_from_config_errors_name_the_path():
    with pytest.raises(ConfigurationError, match="cost.kind"):
        from_config({})
    with pytest.raises(ConfigurationError, match="cost.kind"):
        from_config({"kind": "nope"})
    with pytest.raises(ConfigurationError, match="cost.sigma"):
        from_config({"kind": "truncated_normal", "mu": 0.5})
    with pytest.raises(ConfigurationError, match="cost.extra"):
        from_config({"kind": "uniform01", "extra": 1})


@given(
    mu=st.floats(0.05, 0.95),
    sigma=st.floats(0.02, 0.5),
    shift=st.floats(0.0, 0.5),
)
def test_shifted_cdf_dominates_base_pointwise(mu, sigma, shift):
    base = TruncatedNormal(mu=mu, sigma=sigma)
    bar = subsidize(base, shift=shift)
    for i in range(21):
        x = i / 20
        assert bar.cdf(x) >= base.cdf(x) - 1e-12


@given(
    mu=st.floats(0.05, 0.95),
    sigma=st.floats(0.02, 0.5),
    xs=st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6),
)
def test_truncated_normal_cdf_monotone(mu, sigma, xs):
    g = TruncatedNormal(mu=mu, sigma=sigma)
    ordered = sorted(xs)
    vals = [g.cdf(x) for x in ordered]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)
