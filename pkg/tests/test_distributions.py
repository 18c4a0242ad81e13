import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kofn_standby.distributions import (
    DiscreteWeibull,
    FinitePmf,
    Geometric,
    NegBinomial,
    Residual,
    dominating,
    from_json,
    max_envelope,
    residual_transform,
    to_json,
    truncate,
)
from kofn_standby.errors import ConditioningOnNullEvent, SpecError

from helpers import brute_tail_sums


def test_sf_examples():
    assert Geometric(0.25).sf(0) == pytest.approx(0.75, abs=1e-15)
    assert NegBinomial(2, 0.25).sf(0) == pytest.approx(0.9375, abs=1e-15)
    assert DiscreteWeibull(0.75, 2.0).sf(1) == pytest.approx(0.31640625, abs=1e-15)
    for d in (Geometric(0.3), NegBinomial(3, 0.4), DiscreteWeibull(0.6, 1.7), FinitePmf((1, 2, 3))):
        assert d.sf(-1) == 1.0
        assert d.sf(-5) == 1.0


def test_pmf_examples():
    assert Geometric(0.5).pmf(2) == pytest.approx(0.125, abs=1e-15)
    assert DiscreteWeibull(0.75, 2.0).pmf(0) == pytest.approx(0.25, abs=1e-15)
    assert NegBinomial(2, 0.25).pmf(1) == pytest.approx(0.09375, abs=1e-15)
    assert Geometric(0.5).pmf(-1) == 0.0


def test_finite_pmf_normalizes_and_trims():
    d = FinitePmf((2.0, 2.0, 0.0, 0.0))
    assert d.weights == (0.5, 0.5)
    assert d.support_max == 1
    assert d.sf(1) == 0.0 and d.sf(7) == 0.0
    with pytest.raises(SpecError):
        FinitePmf((1e-13, 0.0))
    with pytest.raises(SpecError):
        FinitePmf((0.5, -0.1))


@pytest.mark.parametrize("bad", [lambda: Geometric(0.0), lambda: Geometric(1.0), lambda: NegBinomial(0, 0.5),
                                 lambda: NegBinomial(1.5, 0.5), lambda: DiscreteWeibull(1.0, 2.0),
                                 lambda: DiscreteWeibull(0.5, 0.0)])
def test_parameter_validation(bad):
    with pytest.raises(SpecError):
        bad()


ALL = [Geometric(0.3), Geometric(0.02), NegBinomial(1, 0.4), NegBinomial(4, 0.2), DiscreteWeibull(0.75, 2.0),
       DiscreteWeibull(0.9, 0.5), DiscreteWeibull(0.3, 1.0), FinitePmf((0.1, 0.0, 0.5, 0.4)),
       residual_transform(NegBinomial(2, 0.3), 4)]


@pytest.mark.parametrize("dist", ALL, ids=lambda d: repr(d)[:40])
def test_pmf_is_sf_difference(dist):
    t = np.arange(0, 300)
    np.testing.assert_allclose(dist.pmf(t), np.asarray(dist.sf(t - 1)) - np.asarray(dist.sf(t)), atol=1e-14)
    assert np.all(np.diff(dist.sf(t)) <= 0)
    np.testing.assert_allclose(np.asarray(dist.cdf(t)) + np.asarray(dist.sf(t)), 1.0, atol=1e-15)


@pytest.mark.parametrize("dist", ALL, ids=lambda d: repr(d)[:40])
def test_mean_matches_survival_sum(dist):
    assert dist.mean() == pytest.approx(brute_tail_sums(dist)[0] + dist.sf(0), rel=1e-12)


def test_weibull_beta_one_is_geometric():
    t = np.arange(0, 50)
    np.testing.assert_allclose(DiscreteWeibull(0.7, 1.0).sf(t), Geometric(0.3).sf(t), rtol=1e-13)


def test_residual_examples():
    assert residual_transform(Geometric(0.5), 3).sf(1) == pytest.approx(0.5, abs=1e-15)
    uniform = FinitePmf((1, 1, 1))
    assert residual_transform(uniform, 0).sf(1) == pytest.approx(0.5, abs=1e-15)
    assert residual_transform(DiscreteWeibull(0.75, 2.0), 1).sf(1) == pytest.approx(0.75**5, abs=1e-15)
    with pytest.raises(ConditioningOnNullEvent):
        residual_transform(uniform, 2)


@given(p=st.floats(0.01, 0.99), t=st.integers(0, 60), s=st.integers(0, 60))
def test_geometric_residual_is_unit_shift(p, t, s):
    g = Geometric(p)
    assert residual_transform(g, t).sf(s) == pytest.approx(g.sf(s - 1), rel=1e-12)


@given(t1=st.integers(0, 20), t2=st.integers(0, 20), s=st.integers(-2, 30))
def test_nested_residuals_compose(t1, t2, s):
    base = NegBinomial(3, 0.35)
    nested = residual_transform(residual_transform(base, t1), t2)
    assert isinstance(nested, Residual)
    assert nested.t == t1 + t2
    expected = 1.0 if s < 0 else base.sf(s + t1 + t2) / base.sf(t1 + t2)
    assert nested.sf(s) == pytest.approx(expected, rel=1e-12)


def test_finite_residual_stays_finite():
    d = FinitePmf((0.1, 0.2, 0.3, 0.4))
    r = residual_transform(d, 1)
    assert isinstance(r, FinitePmf)
    for s in range(-1, 4):
        assert r.sf(s) == pytest.approx(1.0 if s < 0 else d.sf(s + 1) / d.sf(1), abs=1e-15)


def _draws(rng, family, count):
    out = []
    for _ in range(count):
        if family == "geometric":
            out.append(Geometric(float(rng.uniform(0.02, 0.95))))
        elif family == "negbinomial":
            out.append(NegBinomial(int(rng.integers(1, 7)), float(rng.uniform(0.05, 0.95))))
        elif family == "dweibull_ge1":
            out.append(DiscreteWeibull(float(rng.uniform(0.05, 0.97)), float(rng.uniform(1.0, 3.0))))
        elif family == "dweibull_lt1":
            out.append(DiscreteWeibull(float(rng.uniform(0.05, 0.9)), float(rng.uniform(0.5, 0.99))))
        else:
            out.append(FinitePmf(tuple(rng.random(int(rng.integers(1, 60))))))
    return out


@pytest.mark.parametrize("family", ["geometric", "negbinomial", "dweibull_ge1", "dweibull_lt1", "pmf"])
def test_tail_bound_dominates_and_decreases(family):
    rng = np.random.default_rng(abs(hash(family)) % 2**32)
    for dist in _draws(rng, family, 50):
        tails = brute_tail_sums(dist)
        bounds = np.array([dist.tail_bound(t0) for t0 in range(51)])
        exact = np.array([tails[t0] if t0 < len(tails) else 0.0 for t0 in range(51)])
        assert np.all(bounds >= exact * (1 - 1e-10) - 1e-300), dist
        assert np.all(np.diff(bounds) <= 1e-300 + 1e-12 * bounds[:-1]), dist


def test_geometric_bound_is_exact():
    assert Geometric(0.5).tail_bound(3) == pytest.approx(0.0625, abs=1e-16)
    assert brute_tail_sums(Geometric(0.5))[3] == pytest.approx(0.0625, abs=1e-15)


def test_finite_bound_past_support_is_zero():
    d = FinitePmf((0.2, 0.3, 0.5))
    assert d.tail_bound(d.support_max) == 0.0
    assert d.tail_bound(10) == 0.0


@pytest.mark.parametrize("dist", [Geometric(0.25), NegBinomial(2, 0.25), NegBinomial(5, 0.6), DiscreteWeibull(0.75, 2.0),
                                  DiscreteWeibull(0.75, 0.5), DiscreteWeibull(math.exp(-2), 0.5),
                                  FinitePmf((0.1, 0.2, 0.3, 0.4)), residual_transform(DiscreteWeibull(0.9, 0.7), 5)],
                         ids=repr)
@pytest.mark.parametrize("budget", [1e-1, 1e-4, 1e-8])
def test_tail_bound_inverse_is_smallest(dist, budget):
    t0 = dist.tail_bound_inverse(budget)
    assert dist.tail_bound(t0) <= budget
    if t0 > 0:
        assert dist.tail_bound(t0 - 1) > budget


def test_weibull_small_beta_bound_dominates_direct_sum():
    d = DiscreteWeibull(0.75, 0.5)
    t0 = d.tail_bound_inverse(1e-4)
    assert d.tail_bound(t0) >= brute_tail_sums(d)[t0]


def test_dominating_parameters():
    nb = dominating([Geometric(0.3), NegBinomial(3, 0.5), NegBinomial(2, 0.2)])
    assert nb == NegBinomial(3, 0.2)
    dw = dominating([Geometric(0.3), DiscreteWeibull(0.6, 2.0), DiscreteWeibull(0.5, 1.5)])
    assert dw == DiscreteWeibull(0.7, 1.0)
    assert dominating([Geometric(0.2), FinitePmf((1, 1))]) is None


@pytest.mark.parametrize("dists,rule", [
    ([NegBinomial(2, 0.3)] * 3, "t0NB"),
    ([DiscreteWeibull(0.7, 2.0), DiscreteWeibull(0.6, 3.0)], "t0dW1"),
    ([DiscreteWeibull(0.7, 0.5), Geometric(0.3)], "t0dW2"),
    ([FinitePmf((1, 1))] * 2, "condt0IID"),
    ([FinitePmf((1, 1)), FinitePmf((1, 2, 3))], "condt0I"),
    ([FinitePmf((1, 1)), NegBinomial(2, 0.4)], "condt0I"),
])
def test_max_envelope_dominates_pointwise_max(dists, rule):
    env = max_envelope(dists)
    assert env.rule == rule
    top = 4000
    grid = np.arange(top + 1)
    m = np.max([np.asarray(d.sf(grid)) for d in dists], axis=0)
    tails = np.append(np.cumsum(m[::-1])[::-1][1:], 0.0)
    for t0 in (0, 1, 5, 20, 60):
        assert env.bound(t0) >= tails[t0] * (1 - 1e-12)


@pytest.mark.parametrize("dist", ALL[:-1], ids=lambda d: repr(d)[:40])
def test_json_round_trip(dist):
    assert from_json(to_json(dist)) == dist


@pytest.mark.parametrize("obj", [{"p": 0.3}, {"family": "poisson", "lam": 1}, {"family": "geometric"},
                                 {"family": "negbinomial", "r": 2.5, "p": 0.3}, {"family": "pmf", "weights": [0, 0]}])
def test_json_rejects_bad(obj):
    with pytest.raises(SpecError):
        from_json(obj)


def test_truncate_folds_tail_into_top_atom():
    d = Geometric(0.5)
    f = truncate(d)
    assert sum(f.weights) == pytest.approx(1.0, abs=1e-15)
    assert f.sf(f.support_max - 1) == pytest.approx(d.sf(f.support_max - 1), rel=1e-12)
    assert d.sf(f.support_max) < 1e-16


@pytest.mark.parametrize("dist", [Geometric(0.3), DiscreteWeibull(0.8, 1.7), NegBinomial(3, 0.4), DiscreteWeibull(0.5, 0.6)],
                         ids=repr)
def test_inverse_survival_sampling(dist):
    v = np.random.default_rng(1).random(5000)
    x = np.asarray(dist.isf(v))
    # smallest t with sf(t) <= v
    assert np.all(np.asarray(dist.sf(x)) <= v + 1e-12)
    assert np.all((x == 0) | (np.asarray(dist.sf(x - 1)) > v - 1e-12))
