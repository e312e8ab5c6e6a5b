import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from owc.analytics import MultihopSpec, multihop_distribution, singlehop_distribution
from owc.channels import HopConfig, derive_hop_params
from owc.config import TURBULENCE_PRESETS
from owc.mcsim import MCConfig, mc_evaluate
from owc.metrics import (
    ModulationParams,
    aber,
    aber_quadrature,
    diversity_order,
    fitted_slope,
    hop_diversity_order,
    outage,
    outage_asymptotic,
)
from owc.validation import iid_chain, slope_near

OOK = ModulationParams.preset("ook-imdd")
TH = 10.0  # 10 dB


def sr(power=20.0, **kw):
    return HopConfig(power_dbm=power, **kw)


def lr(power=20.0, **kw):
    return HopConfig(**{"distance_km": 1.5, **kw}, regime="long-range", power_dbm=power)


# ----------------------------------------------------------------- outage
def test_outage_trivial_cases():
    p = derive_hop_params(sr())
    top = p.A**2 * p.gamma_bar
    assert outage(p, top).value == 1.0
    assert outage(p, 2 * top).value == 1.0
    assert outage(p, 0.0).value == 0.0
    assert outage(p, 1e-300).value < 1e-12


def test_outage_sr_matches_mc():
    hop = sr()
    est = mc_evaluate(MultihopSpec((hop,)), MCConfig(samples=10**6, seed=12), thresholds=(TH,)).op(TH)
    op = outage(hop, TH)
    assert op.method == "closed-form"
    assert abs(est.mean - op.value) < 3 * est.stderr


@settings(max_examples=10, deadline=None)
@given(t1=st.floats(-10, 40), t2=st.floats(-10, 40))
def test_outage_monotone_in_threshold(t1, t2):
    lo, hi = sorted((t1, t2))
    d = singlehop_distribution(lr())
    assert outage(d, 10 ** (lo / 10)).value <= outage(d, 10 ** (hi / 10)).value + 1e-12


@pytest.mark.parametrize("make", [lambda P: sr(P), lambda P: lr(P), lambda P: MultihopSpec((sr(P, distance_km=0.5),) * 2)])
def test_outage_and_aber_monotone_in_power(make):
    ops, abers = [], []
    for P in (0.0, 10.0, 20.0, 30.0, 40.0):
        d = singlehop_distribution(make(P)) if isinstance(make(P), HopConfig) else multihop_distribution(make(P))
        ops.append(outage(d, TH).value)
        abers.append(aber(d, OOK).value)
    assert all(b <= a + 1e-12 for a, b in zip(ops, ops[1:]))
    assert all(b <= a + 1e-12 for a, b in zip(abers, abers[1:]))
    assert all(0 <= v <= 0.5 for v in abers)


# ------------------------------------------------------------- asymptote
def _at(hops_or_hop, gamma_bar):
    if isinstance(hops_or_hop, HopConfig):
        return singlehop_distribution(HopConfig(**{**hops_or_hop.__dict__, "gamma_bar": gamma_bar}))
    hops = tuple(HopConfig(**{**h.__dict__, "gamma_bar": gamma_bar}) for h in hops_or_hop)
    return multihop_distribution(MultihopSpec(hops, C=(1 + gamma_bar,) * len(hops)))


def _deep(d_of_g, target=1e-4):
    g = 1e10
    while outage(d_of_g(g), TH).value >= target:
        g *= 100.0
    return d_of_g(g)


@pytest.mark.parametrize(
    "system",
    [sr(), lr(), (sr(distance_km=0.5),) * 2, (lr(distance_km=0.75),) * 2],
    ids=["sr1", "lr1", "sr2", "lr2"],
)
def test_asymptote_ratio_in_deep_outage(system):
    d = _deep(lambda g: _at(system, g))
    exact = outage(d, TH).value
    asym = outage_asymptotic(d, TH)
    assert exact < 1e-4
    assert asym.value / exact == pytest.approx(1.0, abs=0.05)
    assert asym.valid


def test_lr_asymptote_slope():
    # the leading term carries ln(gamma_bar)**(k-1), so the local slope approaches
    # -DO from above like (k-1)/ln(gamma_bar/gamma_th)
    hop = lr()
    p = derive_hop_params(hop)
    do = hop_diversity_order(p)
    gaps = []
    for g in (1e40, 1e100, 1e300):
        a1 = outage_asymptotic(_at(hop, g), TH, check=False).value
        a2 = outage_asymptotic(_at(hop, 10 * g), TH, check=False).value
        slope = fitted_slope([g, 10 * g], [a1, a2])
        assert slope - (-do) == pytest.approx((p.k - 1) / math.log(g / TH), rel=0.1)
        gaps.append(slope + do)
    assert gaps[0] > gaps[1] > gaps[2] > 0
    assert gaps[-1] / do < 0.02
    assert outage_asymptotic(_at(hop, 1e40), TH, check=False).exponent == pytest.approx(min(p.z, p.rho2, p.a) / 2)


def test_sr_iid_asymptote_exponent():
    spec = iid_chain("short-range", 3, 1e30)
    d = multihop_distribution(spec)
    p = spec.params[0]
    e = outage_asymptotic(d, TH, check=False).exponent
    # bound CDF kernel: dominant point at N min(z, rho2)/2 / phi_1 in the bound variable
    assert e == pytest.approx(3 * min(p.z, p.rho2) / 2 / 3)


@pytest.mark.parametrize("power", [-10.0, 0.0, 20.0])
def test_asymptote_validity_gate(power):
    d = singlehop_distribution(sr(power))
    r = outage_asymptotic(d, TH)
    exact = outage(d, TH).value
    assert r.valid == (abs(r.value / exact - 1) <= 0.20)
    if power == -10.0:
        assert not r.valid and "outside validity gate" in r.note


# ------------------------------------------------------- diversity order
def test_diversity_order_examples():
    p = derive_hop_params(HopConfig(distance_km=1.5))
    assert p.z == pytest.approx(0.2207, abs=1e-4) and p.rho2 == pytest.approx(9.27, abs=0.01)
    assert abs(diversity_order(p) - 0.1104) < 1e-4
    moved = derive_hop_params(HopConfig(distance_km=1.5, mu_x=0.3, mu_y=0.0))
    assert diversity_order(moved) == diversity_order(p)
    spec = MultihopSpec((HopConfig(distance_km=1.5),) * 4)
    assert diversity_order(spec) == pytest.approx(4 * diversity_order(p))


def test_lr_diversity_order_includes_turbulence():
    a, b = TURBULENCE_PRESETS["strong-turbulence"]
    p = derive_hop_params(HopConfig(regime="long-range", turb_a=a, turb_b=b, fog_beta=1.0, distance_km=0.1))
    assert diversity_order(p) == pytest.approx(min(p.z, p.rho2, a) / 2)


def test_fitted_slope_power_law():
    x = np.geomspace(1, 1e4, 9)
    assert fitted_slope(x, 3.0 * x**-0.37) == pytest.approx(-0.37, rel=1e-12)


@pytest.mark.parametrize("regime", ["short-range", "long-range"])
def test_single_hop_empirical_slope(regime):
    slope, _ = slope_near(lambda g: iid_chain(regime, 1, g))
    do = diversity_order(iid_chain(regime, 1, 1.0))
    assert slope == pytest.approx(-do, rel=0.10)


# ------------------------------------------------------------------ ABER
SYSTEMS = {
    "sr1": lambda: singlehop_distribution(sr(30.0)),
    "lr1": lambda: singlehop_distribution(lr(30.0)),
    "sr2": lambda: multihop_distribution(MultihopSpec((sr(30.0, distance_km=0.5),) * 2)),
    "lr2-strong": lambda: multihop_distribution(
        MultihopSpec((lr(20.0, distance_km=0.75, turb_a=1.4321, turb_b=3.4948),) * 2)
    ),
}


@pytest.mark.parametrize("name", sorted(SYSTEMS))
def test_aber_contour_matches_quadrature(name):
    d = SYSTEMS[name]()
    r = aber(d, OOK)
    assert r.method == "contour"
    assert abs(r.value - aber_quadrature(d, OOK)) < 1e-5
    assert 0 <= r.value <= 0.5


def test_aber_lr_single_hop_matches_mc():
    spec = MultihopSpec((lr(10.0),))
    est = mc_evaluate(spec, MCConfig(samples=10**6, seed=31), mod=OOK).aber()
    assert abs(est.mean - aber(spec, OOK).value) < 3 * est.stderr


def test_aber_two_hop_strong_turbulence_matches_mc():
    spec = MultihopSpec((lr(20.0, distance_km=0.75, turb_a=1.4321, turb_b=3.4948),) * 2)
    est = mc_evaluate(spec, MCConfig(samples=10**6, seed=32), mod=OOK).aber("bound")
    assert abs(est.mean - aber(spec, OOK).value) < 3 * est.stderr


def test_aber_cross_check_reports_difference():
    r = aber(SYSTEMS["sr1"](), OOK, cross_check=True)
    assert r.error < 1e-5


def test_modulation_presets():
    assert ModulationParams.preset("ook-imdd") == ModulationParams(0.5, 0.5)
    with pytest.raises(ValueError):
        ModulationParams.preset("qam-1024")
    with pytest.raises(ValueError):
        ModulationParams(0.0, 1.0)
