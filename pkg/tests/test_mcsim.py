from dataclasses import replace

import numpy as np
import pytest
from scipy import stats

from owc.analytics import MultihopSpec, bound_e2e_snr, exact_e2e_snr, multihop_distribution
from owc.channels import HopConfig, derive_hop_params, fog_cdf, fog_sample
from owc.mcsim import (
    MCConfig,
    _draw_all,
    mc_aber,
    mc_distribution_check,
    mc_evaluate,
    mc_outage,
    stream_rng,
)
from owc.metrics import ModulationParams, aber, outage

OOK = ModulationParams.preset("ook-imdd")
SR2 = MultihopSpec((HopConfig(distance_km=0.5),) * 2)
LR2 = MultihopSpec((HopConfig(distance_km=0.75, regime="long-range"),) * 2)


def test_config_validation():
    with pytest.raises(ValueError):
        MCConfig(samples=10)
    with pytest.raises(ValueError):
        MCConfig(target="median")
    with pytest.raises(ValueError):
        MCConfig(seed=-1)
    assert MCConfig(target="both").targets == ("exact", "bound")


def test_bit_identical_across_workers_and_repeats():
    mc = MCConfig(samples=300_001, seed=99, streams=5)
    a = mc_evaluate(LR2, mc, thresholds=(10.0, 100.0), mod=OOK)
    b = mc_evaluate(LR2, replace(mc, workers=3), thresholds=(10.0, 100.0), mod=OOK)
    c = mc_evaluate(LR2, mc, thresholds=(10.0, 100.0), mod=OOK)
    assert a.estimates == b.estimates == c.estimates
    assert a.n == 300_001


def test_zero_threshold_gives_zero():
    est = mc_outage(SR2, 0.0, MCConfig(samples=10_000))
    assert est["bound"].mean == 0.0 and est["exact"].mean == 0.0


def test_single_hop_targets_identical():
    spec = MultihopSpec((HopConfig(),))
    rep = mc_evaluate(spec, MCConfig(samples=50_000, seed=4), thresholds=(10.0, 1e3), mod=OOK)
    for th in (10.0, 1e3):
        assert rep.op(th, "exact") == replace(rep.op(th, "bound"), target="exact")
    assert rep.aber("exact").mean == rep.aber("bound").mean


def test_stderr_quarters_with_samples():
    th = 10.0
    small = mc_outage(LR2, th, MCConfig(samples=100_000, seed=1))["bound"]
    big = mc_outage(LR2, th, MCConfig(samples=400_000, seed=2))["bound"]
    assert small.stderr / big.stderr == pytest.approx(2.0, rel=0.2)


def test_low_snr_aber_tends_to_half():
    spec = MultihopSpec((HopConfig(gamma_bar=1e-12),))
    est = mc_aber(spec, OOK, MCConfig(samples=10_000))["bound"]
    assert est.mean == pytest.approx(0.5, abs=1e-5)


@pytest.mark.parametrize("power", [0.0, 10.0, 20.0, 30.0, 40.0])
def test_exact_aber_not_below_bound_aber(power):
    spec = MultihopSpec((HopConfig(distance_km=0.5, power_dbm=power),) * 2)
    est = mc_aber(spec, OOK, MCConfig(samples=100_000, seed=6))
    assert est["exact"].mean >= est["bound"].mean


def test_amgm_no_violations():
    spec = MultihopSpec(SR2.hops, bound_variant="amgm")
    rep = mc_evaluate(spec, MCConfig(samples=100_000, seed=9), thresholds=(10.0,))
    assert rep.violations == 0


def test_paper_bound_empirical_cdf_below_exact():
    g = _draw_all(stream_rng(17, 0), LR2, 100_000)
    b = np.sort(bound_e2e_snr(g, LR2.gains))
    e = np.sort(exact_e2e_snr(g, LR2.gains))
    grid = np.geomspace(max(e[0], 1e-30), e[-1], 60)
    assert np.all(np.searchsorted(b, grid) <= np.searchsorted(e, grid))


def test_two_hop_moderate_fog_matches_analytic():
    spec = MultihopSpec((HopConfig(distance_km=0.5, fog_k=5.49, fog_beta=12.06),) * 2)
    th = 10**0.6
    est = mc_outage(spec, th, MCConfig(samples=10**6, seed=40))["bound"]
    assert abs(est.mean - outage(spec, th).value) < 3 * est.stderr


def test_lr_single_hop_aber_matches_analytic():
    spec = MultihopSpec((HopConfig(distance_km=1.5, regime="long-range", power_dbm=10.0),))
    est = mc_aber(spec, OOK, MCConfig(samples=10**6, seed=41))["bound"]
    assert abs(est.mean - aber(spec, OOK).value) < 3 * est.stderr


# ---------------------------------------------------------- goodness of fit
def test_ks_fog_sampler_on_reference_values():
    p = derive_hop_params(HopConfig(distance_km=1.5))
    assert p.k == 2.32 and round(p.z, 4) == 0.2207
    assert mc_distribution_check(p, n=10**5, seed=1)["hop0.fog"].pvalue > 0.01


def test_ks_zero_boresight_pointing():
    p = derive_hop_params(HopConfig(mu_x=0.0, mu_y=0.0))
    assert mc_distribution_check(p, n=10**5, seed=2)["hop0.pointing"].pvalue > 0.01


def test_ks_negative_control_doubled_shape():
    p = derive_hop_params(HopConfig(distance_km=1.5))
    wrong = replace(p, k=2 * p.k)
    rng = stream_rng(3, 0)
    sample = fog_sample(rng, p, 10**5)
    assert stats.kstest(sample, lambda x: fog_cdf(x, wrong)).pvalue < 0.01


def test_ks_bound_snr_against_multihop_cdf():
    res = mc_distribution_check(SR2, n=20_000, seed=5)
    assert res["bound_snr"].pvalue > 0.01
    assert set(res) >= {"hop0.fog", "hop1.pointing", "bound_snr"}
