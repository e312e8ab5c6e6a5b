"""Per-hop channel models: fog, pointing error with boresight, F turbulence.

Lengths are in meters except hop distance (km); powers in dBm at the
boundary.  Each channel offers a PDF, a CDF, an exact sampler and its
moment function ``E[h**u]``, both as a complex-valued callable and as a
:class:`~owc.mellin.MellinKernel` consumed by the analytics layer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import special, stats

from .mellin import DomainError, MellinKernel, MomentFunction

Regime = Literal["long-range", "short-range"]
REGIMES = ("long-range", "short-range")


@dataclass(frozen=True)
class HopConfig:
    """Physical description of one hop (SI units except km and dBm)."""

    distance_km: float = 1.0
    fog_k: float = 2.32
    fog_beta: float = 13.12
    aperture_radius: float = 0.05
    beam_waist: float = 0.30
    jitter_std: float = 0.05
    mu_x: float = 0.1
    mu_y: float = 0.1
    turb_a: float = 4.5916
    turb_b: float = 7.0941
    power_dbm: float = 20.0
    responsivity: float = 0.4
    noise_var: float = 1e-14
    regime: Regime = "short-range"
    gamma_bar: float | None = None

    def __post_init__(self):
        checks = {
            "distance_km": self.distance_km,
            "fog_k": self.fog_k,
            "fog_beta": self.fog_beta,
            "aperture_radius": self.aperture_radius,
            "beam_waist": self.beam_waist,
            "jitter_std": self.jitter_std,
            "responsivity": self.responsivity,
            "noise_var": self.noise_var,
        }
        for name, val in checks.items():
            if not (val > 0 and math.isfinite(val)):
                raise ValueError(f"{name} must be positive and finite, got {val}")
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.regime == "long-range":
            if not self.turb_a > 0:
                raise ValueError("turb_a must be positive")
            if not self.turb_b > 1:
                raise ValueError("turb_b must exceed 1 (F-distribution mean undefined otherwise)")
        if self.gamma_bar is not None and not self.gamma_bar > 0:
            raise ValueError("gamma_bar override must be positive")


@dataclass(frozen=True)
class DerivedHopParams:
    """Statistical parameters of one hop.

    ``K = s_b**2 / (2 sigma_s**2)`` is the boresight (Rician) exponent and
    ``boresight_series`` the weight ``s_b**2 w_zeq**2 / (8 sigma_s**4)`` of the
    Bessel-series form of the pointing PDF (equal to ``K * rho**2``).
    """

    z: float
    k: float
    v: float
    A: float
    w_zeq: float
    rho: float
    s_b: float
    sigma_s: float
    B: float
    m: float
    gamma_bar: float
    a: float
    b: float
    regime: Regime

    @property
    def rho2(self) -> float:
        return self.rho**2

    @property
    def K(self) -> float:
        return self.s_b**2 / (2.0 * self.sigma_s**2)

    @property
    def boresight_series(self) -> float:
        return self.s_b**2 * self.w_zeq**2 / (8.0 * self.sigma_s**4)

    @property
    def long_range(self) -> bool:
        return self.regime == "long-range"

    @property
    def snr_support_upper(self) -> float:
        return self.A**2 * self.gamma_bar if not self.long_range else math.inf


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def average_snr(power_dbm: float, responsivity: float, noise_var: float) -> float:
    return 2.0 * (responsivity * dbm_to_watt(power_dbm)) ** 2 / noise_var


def derive_hop_params(cfg: HopConfig) -> DerivedHopParams:
    v = math.sqrt(math.pi / 2.0) * cfg.aperture_radius / cfg.beam_waist
    A = special.erf(v) ** 2
    w_zeq2 = cfg.beam_waist**2 * math.sqrt(A * math.pi) / (2.0 * v * math.exp(-(v**2)))
    w_zeq = math.sqrt(w_zeq2)
    rho = w_zeq / (2.0 * cfg.jitter_std)
    z = 4.343 / (cfg.fog_beta * cfg.distance_km)
    s_b = math.hypot(cfg.mu_x, cfg.mu_y)
    lr = cfg.regime == "long-range"
    B = cfg.turb_a / (cfg.turb_b - 1.0) if lr else 1.0
    gb = cfg.gamma_bar if cfg.gamma_bar is not None else average_snr(cfg.power_dbm, cfg.responsivity, cfg.noise_var)
    return DerivedHopParams(
        z=z,
        k=cfg.fog_k,
        v=v,
        A=A,
        w_zeq=w_zeq,
        rho=rho,
        s_b=s_b,
        sigma_s=cfg.jitter_std,
        B=B,
        m=z - rho**2,
        gamma_bar=gb,
        a=cfg.turb_a if lr else math.nan,
        b=cfg.turb_b if lr else math.nan,
        regime=cfg.regime,
    )


def turbulence_params_from_variances(var_ln_small: float, var_ln_large: float) -> tuple[float, float]:
    """Shape parameters ``(a, b)`` from small/large-scale log-irradiance variances."""
    if not (var_ln_small > 0 and var_ln_large > 0):
        raise ValueError("log-irradiance variances must be positive")
    a = 1.0 / math.expm1(var_ln_small)
    b = 1.0 / math.expm1(var_ln_large) + 2.0
    return a, b


def turbulence_variances_from_params(a: float, b: float) -> tuple[float, float]:
    """Inverse of :func:`turbulence_params_from_variances` (requires b > 2)."""
    if not (a > 0 and b > 2):
        raise ValueError("need a > 0 and b > 2")
    return math.log1p(1.0 / a), math.log1p(1.0 / (b - 2.0))


def _check_moment_arg(u, edge: float, side: str, name: str):
    u = np.asarray(u, dtype=complex)
    if side == "lower" and np.any(u.real <= edge):
        bad = u[u.real <= edge].ravel()[0]
        if bad == edge:
            raise DomainError(f"{name} moment pole at u={edge}")
        raise DomainError(f"{name} moment infinite for Re(u) <= {edge}")
    if side == "upper" and np.any(u.real >= edge):
        raise DomainError(f"{name} moment infinite for Re(u) >= {edge}")
    return u


def _ret(x):
    return x if np.ndim(x) else complex(x)


# --------------------------------------------------------------------- fog
def fog_pdf(h, p: DerivedHopParams):
    h = np.asarray(h, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -np.log(h)
        logf = p.k * math.log(p.z) - special.gammaln(p.k) + (p.z - 1) * np.log(h) + (p.k - 1) * np.log(t)
        out = np.where((h > 0) & (h < 1), np.exp(logf), 0.0)
    if p.k == 1:
        out = np.where(h == 1, p.z, out)
    return out if out.ndim else float(out)


def fog_cdf(h, p: DerivedHopParams):
    h = np.asarray(h, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(h <= 0, 0.0, np.where(h >= 1, 1.0, special.gammaincc(p.k, p.z * np.log(1.0 / np.clip(h, 1e-300, 1)))))
    return out if out.ndim else float(out)


def fog_sample(rng: np.random.Generator, p: DerivedHopParams, size=None):
    return np.exp(-rng.gamma(p.k, 1.0 / p.z, size))


def fog_moment(u, p: DerivedHopParams):
    u = _check_moment_arg(u, -p.z, "lower", "fog")
    return _ret((p.z / (p.z + u)) ** p.k)


def fog_moment_kernel(p: DerivedHopParams) -> MellinKernel:
    return MellinKernel(prefactor=p.z**p.k, linear_factors=((p.z, 1.0, p.k),))


# ---------------------------------------------------------------- pointing
def _pointing_log_ratio(h, p):
    """``w_zeq**2/2 * ln(A/h)``, the squared radial offset giving gain h."""
    with np.errstate(divide="ignore"):
        return 0.5 * p.w_zeq**2 * np.log(p.A / h)


def pointing_pdf(h, p: DerivedHopParams):
    h = np.asarray(h, dtype=float)
    inside = (h > 0) & (h <= p.A)
    hh = np.where(inside, h, p.A)
    arg = (p.s_b / p.sigma_s**2) * np.sqrt(np.maximum(_pointing_log_ratio(hh, p), 0.0))
    # exp(-K) * I0(arg) in scaled form to avoid overflow
    logf = (
        math.log(p.rho2)
        - p.K
        - p.rho2 * math.log(p.A)
        + (p.rho2 - 1) * np.log(hh)
        + np.log(special.i0e(arg))
        + arg
    )
    out = np.where(inside, np.exp(logf), 0.0)
    return out if out.ndim else float(out)


def pointing_pdf_series(h, p: DerivedHopParams, J: int = 20):
    """Bessel-series form of the pointing PDF truncated after ``J`` terms."""
    h = np.asarray(h, dtype=float)
    inside = (h > 0) & (h <= p.A)
    hh = np.where(inside, h, p.A)
    L = np.log(p.A / hh)
    c = p.boresight_series
    total = np.zeros_like(hh)
    term = np.ones_like(hh)
    for j in range(J):
        if j:
            term = term * c * L / (j * j)
        total = total + term
    base = p.rho2 * math.exp(-p.K) * p.A ** (-p.rho2) * hh ** (p.rho2 - 1)
    out = np.where(inside, base * total, 0.0)
    return out if out.ndim else float(out)


def pointing_cdf(h, p: DerivedHopParams):
    h = np.asarray(h, dtype=float)
    hh = np.clip(h, 1e-300, p.A)
    r2 = _pointing_log_ratio(hh, p)
    sig2 = p.sigma_s**2
    out = stats.ncx2.sf(r2 / sig2, df=2, nc=p.s_b**2 / sig2) if p.s_b > 0 else np.exp(-r2 / (2 * sig2))
    out = np.where(h <= 0, 0.0, np.where(h >= p.A, 1.0, out))
    return out if out.ndim else float(out)


def pointing_sample(rng: np.random.Generator, p: DerivedHopParams, size=None):
    mux = p.s_b  # radial statistics depend only on |mu|
    x = rng.normal(mux, p.sigma_s, size)
    y = rng.normal(0.0, p.sigma_s, size)
    r2 = x * x + y * y
    return p.A * np.exp(-2.0 * r2 / p.w_zeq**2)


def pointing_moment(u, p: DerivedHopParams):
    u = _check_moment_arg(u, -p.rho2, "lower", "pointing")
    return _ret(np.exp(u * math.log(p.A)) * p.rho2 / (p.rho2 + u) * np.exp(-p.K * u / (p.rho2 + u)))


def pointing_moment_kernel(p: DerivedHopParams) -> MellinKernel:
    # exp(-K u/(rho2+u)) = exp(-K) * exp(K rho2/(rho2+u))
    exp_f = ((p.rho2, 1.0, p.K * p.rho2),) if p.K > 0 else ()
    return MellinKernel(
        prefactor=p.rho2 * math.exp(-p.K),
        log_argument=-math.log(p.A),
        linear_factors=((p.rho2, 1.0, 1.0),),
        exp_factors=exp_f,
    )


# -------------------------------------------------------------- turbulence
def turb_pdf(h, p: DerivedHopParams):
    h = np.asarray(h, dtype=float)
    a, b = p.a, p.b
    with np.errstate(divide="ignore", invalid="ignore"):
        logf = (
            a * math.log(a)
            + b * math.log(b - 1)
            + (a - 1) * np.log(h)
            - special.betaln(a, b)
            - (a + b) * np.log(a * h + b - 1)
        )
        out = np.where(h > 0, np.exp(logf), 0.0)
    return out if out.ndim else float(out)


def turb_cdf(h, p: DerivedHopParams):
    h = np.asarray(h, dtype=float)
    out = stats.betaprime.cdf(p.B * np.maximum(h, 0.0), p.a, p.b)
    return out if out.ndim else float(out)


def turb_sample(rng: np.random.Generator, p: DerivedHopParams, size=None):
    x = rng.gamma(p.a, 1.0, size)
    y = rng.gamma(p.b, 1.0, size)
    return (x / p.a) / (y / (p.b - 1.0))


def turb_moment(u, p: DerivedHopParams):
    u = np.asarray(u, dtype=complex)
    _check_moment_arg(u, p.b, "upper", "turbulence")
    _check_moment_arg(u, -p.a, "lower", "turbulence")
    out = np.exp(
        -u * math.log(p.B)
        + special.loggamma(p.a + u)
        + special.loggamma(p.b - u)
        - special.gammaln(p.a)
        - special.gammaln(p.b)
    )
    return _ret(out)


def turb_moment_kernel(p: DerivedHopParams) -> MellinKernel:
    return MellinKernel(
        prefactor=1.0 / (special.gamma(p.a) * special.gamma(p.b)),
        log_argument=math.log(p.B),
        gamma_factors=((p.a, 1.0, 1), (p.b, -1.0, 1)),
    )


# ------------------------------------------------------------------- SNR
def channel_gain_sample(rng: np.random.Generator, p: DerivedHopParams, size=None):
    h = fog_sample(rng, p, size) * pointing_sample(rng, p, size)
    if p.long_range:
        h = h * turb_sample(rng, p, size)
    return h


def hop_snr_sample(rng: np.random.Generator, p: DerivedHopParams, size=None):
    """Instantaneous hop SNR ``gamma_bar * h**2`` (turbulence only for long range)."""
    h = channel_gain_sample(rng, p, size)
    return p.gamma_bar * h * h


def gain_moment_kernel(p: DerivedHopParams) -> MellinKernel:
    k = fog_moment_kernel(p).times(pointing_moment_kernel(p))
    if p.long_range:
        k = k.times(turb_moment_kernel(p))
    return k


def hop_snr_moment(p: DerivedHopParams) -> MomentFunction:
    """``t -> E[gamma**t] = gamma_bar**t * E[h**(2t)]``."""
    k = gain_moment_kernel(p).dilate(2.0).with_argument_factor(1.0 / p.gamma_bar)
    return MomentFunction(k, p.snr_support_upper)


def hop_snr_moment_value(t, p: DerivedHopParams):
    """Direct evaluation of the hop SNR moment from the channel moment formulas."""
    t = np.asarray(t, dtype=complex)
    val = np.exp(t * math.log(p.gamma_bar)) * fog_moment(2 * t, p) * pointing_moment(2 * t, p)
    if p.long_range:
        val = val * turb_moment(2 * t, p)
    return _ret(val)
