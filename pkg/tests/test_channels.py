import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from owc.channels import (
    HopConfig,
    average_snr,
    derive_hop_params,
    fog_cdf,
    fog_moment,
    fog_pdf,
    fog_sample,
    hop_snr_moment,
    hop_snr_moment_value,
    hop_snr_sample,
    pointing_cdf,
    pointing_moment,
    pointing_pdf,
    pointing_pdf_series,
    pointing_sample,
    turb_moment,
    turb_pdf,
    turb_sample,
    turbulence_params_from_variances,
    turbulence_variances_from_params,
)
from owc.config import TURBULENCE_PRESETS
from owc.mcsim import mc_distribution_check, stream_rng
from owc.mellin import DomainError, kernel_eval

LR = derive_hop_params(HopConfig(distance_km=1.5, regime="long-range"))
SR = derive_hop_params(HopConfig(distance_km=1.0))

# mpmath values from tests/oracles/generate.py (independent integration routes)
ORACLE_POINTING = {0.5: 0.1796073979841580044677, 1.0: 0.03299522148676751509976, 2.0: 0.001177823125480765379873, 3.3: 1.689129988612535138155e-05}
ORACLE_TURB_2 = 1.456847722174965605361
ORACLE_FOG_1 = 0.01890987515193014732305  # k = 2.32, z = 0.2207


def test_derived_geometry_reference_values():
    assert LR.z == pytest.approx(0.2206808943089430894309, rel=1e-14)
    assert round(LR.z, 4) == 0.2207
    assert LR.v == pytest.approx(0.2088856895525833752013, rel=1e-14)
    assert LR.A == pytest.approx(0.05397189570961467460568, rel=1e-13)
    assert LR.w_zeq == pytest.approx(0.3044080512923998488568, rel=1e-13)
    assert LR.rho2 == pytest.approx(9.266426169163633729186, rel=1e-13)
    assert LR.gamma_bar == pytest.approx(3.2e11, rel=1e-13)
    assert LR.B == pytest.approx(4.5916 / 6.0941)


def test_zero_mean_offset_gives_zero_boresight():
    p = derive_hop_params(HopConfig(mu_x=0.0, mu_y=0.0))
    assert p.s_b == 0 and p.K == 0


def test_average_snr_formula():
    assert average_snr(0.0, 1.0, 2.0) == pytest.approx(1e-6)


def test_turbulence_variance_examples():
    a, b = turbulence_params_from_variances(math.log(2), math.log(2))
    assert (a, b) == pytest.approx((1.0, 3.0), rel=1e-14)
    a, _ = turbulence_params_from_variances(0.1963, 1.0)
    assert a == pytest.approx(1 / math.expm1(0.1963))
    with pytest.raises(ValueError):
        turbulence_params_from_variances(0.0, 1.0)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(0.1, 50.0), b=st.floats(2.05, 50.0))
def test_turbulence_variance_round_trip(a, b):
    a2, b2 = turbulence_params_from_variances(*turbulence_variances_from_params(a, b))
    assert (a2, b2) == pytest.approx((a, b), rel=1e-9)


# ------------------------------------------------------------------- fog
def test_fog_examples():
    p1 = derive_hop_params(HopConfig(fog_k=1.0))
    assert fog_pdf(1.0, p1) == pytest.approx(p1.z)
    assert fog_moment(0.0, LR) == pytest.approx(1.0)
    from dataclasses import replace

    pz = replace(LR, z=0.2207)
    assert fog_moment(1.0, pz).real == pytest.approx(ORACLE_FOG_1, rel=1e-12)
    assert abs(fog_moment(1.0, pz).real - 0.0189) < 1e-4
    with pytest.raises(DomainError):
        fog_moment(-LR.z, LR)


def test_fog_cdf_endpoints_and_derivative():
    assert fog_cdf(0.0, LR) == 0.0 and fog_cdf(1.0, LR) == 1.0
    h, dh = 0.3, 1e-6
    num = (fog_cdf(h + dh, LR) - fog_cdf(h - dh, LR)) / (2 * dh)
    assert num == pytest.approx(fog_pdf(h, LR), rel=1e-6)


def test_fog_sample_in_unit_interval():
    x = fog_sample(stream_rng(1, 0), LR, 10000)
    assert np.all((x > 0) & (x <= 1))


# -------------------------------------------------------------- pointing
def test_pointing_moment_against_offset_oracle():
    for u, ref in ORACLE_POINTING.items():
        assert pointing_moment(u, LR).real == pytest.approx(ref, rel=1e-10)
    assert pointing_moment(0.0, LR) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        pointing_moment(-LR.rho2, LR)


def test_pointing_zero_boresight_reduction():
    p = derive_hop_params(HopConfig(mu_x=0.0, mu_y=0.0))
    h = np.geomspace(1e-6, p.A, 50)
    ref = p.A ** (-p.rho2) * p.rho2 * h ** (p.rho2 - 1)
    np.testing.assert_allclose(pointing_pdf(h, p), ref, rtol=1e-12)
    for u in (0.5, 2.0, 1 + 1j):
        assert pointing_moment(u, p) == pytest.approx(p.A**u * p.rho2 / (p.rho2 + u), rel=1e-13)


def test_pointing_series_matches_bessel_form_near_aperture():
    h = LR.A * np.exp(-np.linspace(0, 1.8, 200))
    np.testing.assert_allclose(pointing_pdf_series(h, LR, 20), pointing_pdf(h, LR), rtol=1e-6)


@pytest.mark.parametrize("beam_ratio", [3.0, 6.0])
@pytest.mark.parametrize("jitter", [0.05, 0.10, 0.15, 0.20])
def test_pointing_series_truncation_on_support(beam_ratio, jitter):
    # J = 20 vs 30 across the whole support (0, A]; the series is in ln(A/h), so deep
    # fades need more terms than the default 20.
    p = derive_hop_params(HopConfig(beam_waist=0.05 * beam_ratio, jitter_std=jitter))
    h = p.A * np.exp(-np.linspace(0, 60, 2001))
    s20, s30 = pointing_pdf_series(h, p, 20), pointing_pdf_series(h, p, 30)
    ok = s30 > 0
    assert np.max(np.abs(s20[ok] / s30[ok] - 1)) < 1e-6


@pytest.mark.parametrize("beam_ratio", [3.0, 6.0])
@pytest.mark.parametrize("jitter", [0.05, 0.10, 0.15, 0.20])
def test_pointing_series_truncation_bulk(beam_ratio, jitter):
    # same comparison restricted to gains with P(h_p < h) >= 1e-2
    p = derive_hop_params(HopConfig(beam_waist=0.05 * beam_ratio, jitter_std=jitter))
    h = p.A * np.exp(-np.linspace(0, 60, 2001))
    h = h[pointing_cdf(h, p) >= 1e-2]
    s20, s30 = pointing_pdf_series(h, p, 20), pointing_pdf_series(h, p, 30)
    assert np.max(np.abs(s20 / s30 - 1)) < 1e-6


def test_pointing_sample_bounded_by_aperture():
    x = pointing_sample(stream_rng(2, 0), LR, 10000)
    assert np.all((x > 0) & (x <= LR.A))


def test_pointing_cdf_endpoints():
    assert pointing_cdf(LR.A, LR) == 1.0
    assert 0 < pointing_cdf(0.5 * LR.A, LR) < 1


# ------------------------------------------------------------ turbulence
def test_turbulence_moment_examples():
    assert turb_moment(0.0, LR) == pytest.approx(1.0)
    assert turb_moment(1.0, LR).real == pytest.approx(1.0, abs=1e-10)
    g = math.gamma
    closed = g(LR.a + 2) * g(LR.b - 2) / (g(LR.a) * g(LR.b)) * LR.B**-2
    assert turb_moment(2.0, LR).real == pytest.approx(closed, rel=1e-12)
    assert turb_moment(2.0, LR).real == pytest.approx(ORACLE_TURB_2, rel=1e-12)
    with pytest.raises(DomainError):
        turb_moment(LR.b, LR)


@pytest.mark.parametrize("name", sorted(TURBULENCE_PRESETS))
def test_turbulence_unit_mean_all_presets(name):
    a, b = TURBULENCE_PRESETS[name]
    p = derive_hop_params(HopConfig(regime="long-range", turb_a=a, turb_b=b))
    assert turb_moment(1.0, p).real == pytest.approx(1.0, abs=1e-10)


def test_turb_sample_positive():
    assert np.all(turb_sample(stream_rng(3, 0), LR, 1000) > 0)


# ---------------------------------------------------------- normalisation
def _log_integral(f, lo, hi):
    return integrate.quad(lambda s: f(math.exp(s)) * math.exp(s), lo, hi, limit=400, epsabs=1e-14, epsrel=1e-12)[0]


@pytest.mark.parametrize("p", [LR, SR], ids=["long-range", "short-range"])
def test_pdfs_integrate_to_one(p):
    fog = _log_integral(lambda h: fog_pdf(h, p), -400, 0)
    pt = _log_integral(lambda h: pointing_pdf(h, p), math.log(p.A) - 10, math.log(p.A))
    pt += integrate.quad(lambda s: pointing_pdf(math.exp(s), p) * math.exp(s), -np.inf, math.log(p.A) - 10)[0]
    assert fog == pytest.approx(1.0, abs=1e-6)
    assert pt == pytest.approx(1.0, abs=1e-6)
    if p.long_range:
        tb = sum(_log_integral(lambda h: turb_pdf(h, p), a, b) for a, b in [(-60, -5), (-5, 0), (0, 5), (5, 80)])
        assert tb == pytest.approx(1.0, abs=1e-6)


def test_ks_on_reference_hop():
    res = mc_distribution_check(LR, n=20000, seed=11)
    assert min(r.pvalue for r in res.values()) > 0.01


# ------------------------------------------------------------ hop SNR
def test_snr_kernel_matches_direct_moment():
    M = hop_snr_moment(LR)
    for t in (0.25, 0.5 + 0.3j, 1.0, 2.0):
        assert kernel_eval(M.kernel, t) == pytest.approx(hop_snr_moment_value(t, LR), rel=1e-12)


def test_snr_sample_mean_matches_moment_product():
    n = 10**6
    g = hop_snr_sample(stream_rng(99, 0), LR, n)
    target = LR.gamma_bar * (fog_moment(2, LR) * pointing_moment(2, LR) * turb_moment(2, LR)).real
    se = g.std(ddof=1) / math.sqrt(n)
    assert abs(g.mean() - target) < 3 * se


def test_short_range_samples_bounded():
    g = hop_snr_sample(stream_rng(5, 0), SR, 10**5)
    assert np.all(g <= SR.gamma_bar * SR.A**2)
    assert SR.snr_support_upper == pytest.approx(SR.gamma_bar * SR.A**2)


def test_hop_config_validation():
    with pytest.raises(ValueError):
        HopConfig(distance_km=0)
    with pytest.raises(ValueError):
        HopConfig(regime="long-range", turb_b=1.0)
    with pytest.raises(ValueError):
        HopConfig(regime="medium")
