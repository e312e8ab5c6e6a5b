"""Outage probability, its high-SNR asymptote, ABER and diversity order."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, special

from .analytics import MultihopSpec, SnrDistribution, singlehop_distribution
from .channels import DerivedHopParams, HopConfig, derive_hop_params
from .mellin import (
    ContourSpec,
    MellinError,
    ResidueExpansion,
    aber_functional,
    dominant_pole_asymptote,
)

ASYMPTOTE_TOLERANCE = 0.20


@dataclass(frozen=True)
class ModulationParams:
    """``(p, q)`` family with ``Pe = Gamma(p, q*gamma) / (2 Gamma(p))``."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise ValueError("modulation parameters p, q must be positive")

    @classmethod
    def preset(cls, name: str) -> "ModulationParams":
        try:
            return cls(*MODULATION_PRESETS[name])
        except KeyError:
            raise ValueError(f"unknown modulation preset {name!r}; choose from {sorted(MODULATION_PRESETS)}") from None


MODULATION_PRESETS = {
    "ook-imdd": (0.5, 0.5),
    "bpsk": (0.5, 1.0),
    "bfsk": (0.5, 0.5),
    "dbpsk": (1.0, 1.0),
    "ncbfsk": (1.0, 0.5),
}


@dataclass(frozen=True)
class OutageResult:
    value: float
    method: str
    error: float = 0.0
    note: str = ""
    valid: bool = True
    exponent: float = math.nan


@dataclass(frozen=True)
class AberResult:
    value: float
    method: str
    error: float = 0.0
    note: str = ""


def _as_distribution(dist) -> SnrDistribution:
    if isinstance(dist, SnrDistribution):
        return dist
    if isinstance(dist, (HopConfig, DerivedHopParams)):
        return singlehop_distribution(dist)
    if isinstance(dist, MultihopSpec):
        from .analytics import multihop_distribution

        return multihop_distribution(dist)
    raise TypeError(f"cannot build an SNR distribution from {type(dist).__name__}")


def outage(dist, gamma_th: float) -> OutageResult:
    """``P(gamma < gamma_th)`` from the distribution's canonical evaluator."""
    d = _as_distribution(dist)
    if not gamma_th > 0:
        return OutageResult(0.0, "trivial")
    if gamma_th >= d.support_upper:
        return OutageResult(1.0, "trivial")
    method = "closed-form" if (d.kind == "single-hop" and d.regime == "short-range") else "contour"
    tol = (d.contour or ContourSpec()).tolerance
    v = d.cdf(gamma_th)
    return OutageResult(v, method, error=tol * v)


def cdf_expansion(dist, gamma_th: float, n_points: int = 1, n_log_terms: int | None = None) -> ResidueExpansion:
    """Residue expansion of the CDF kernel at ``gamma_th`` (argument-space)."""
    d = _as_distribution(dist)
    k = d.moment.kernel.with_argument_factor(gamma_th).with_factors(linear=[(0.0, -1.0, 1.0)])
    return dominant_pole_asymptote(k, n_points=n_points, n_log_terms=n_log_terms), k


def outage_asymptotic(dist, gamma_th: float, n_points: int = 1, n_log_terms: int | None = None, check: bool = True) -> OutageResult:
    """High-SNR outage from the dominant singular point(s) of the CDF kernel.

    The asymptote is flagged (``valid=False``) unless it lies within 20% of
    the exact outage at the same point.
    """
    d = _as_distribution(dist)
    expansion, k = cdf_expansion(d, gamma_th, n_points, n_log_terms)
    val = float(expansion(k.argument))
    note = "high-SNR only"
    if expansion.remainder_note:
        note += "; " + expansion.remainder_note
    valid = True
    if check:
        exact = outage(d, gamma_th).value
        valid = exact > 0 and abs(val / exact - 1.0) <= ASYMPTOTE_TOLERANCE
        if not valid:
            note += f"; outside validity gate (exact {exact:.4g})"
    return OutageResult(val, "asymptotic", note=note, valid=valid, exponent=expansion.leading_exponent)


# -------------------------------------------------------------------- ABER
def aber(dist, mod: ModulationParams, contour: ContourSpec | None = None, cross_check: bool = False) -> AberResult:
    """Average error rate ``E[Gamma(p, q gamma)] / (2 Gamma(p))``.

    ``cross_check`` also integrates the CDF form numerically and reports the
    difference as the error estimate; if the contour fails, the quadrature
    value is returned with method ``quadrature``.
    """
    d = _as_distribution(dist)
    try:
        v = aber_functional(d.moment, mod.p, mod.q, contour or d.contour)
    except MellinError as exc:
        qv = aber_quadrature(d, mod)
        return AberResult(qv, "quadrature", note=f"contour failed: {exc}")
    if cross_check:
        qv = aber_quadrature(d, mod)
        return AberResult(v, "contour", error=abs(v - qv), note="cross-checked by quadrature")
    return AberResult(v, "contour", error=(contour or ContourSpec()).tolerance * max(v, 1e-300))


def aber_quadrature(dist, mod: ModulationParams, rel: float = 1e-10) -> float:
    """``q**p / (2 Gamma(p)) * integral gamma**(p-1) e**(-q gamma) F(gamma) dgamma``.

    Integrated in ``s = ln(q*gamma)`` on the distribution's canonical CDF.
    """
    d = _as_distribution(dist)
    p, q = mod.p, mod.q
    s_hi = math.log(60.0 + 2 * p)
    if math.isfinite(d.support_upper):
        s_hi = min(s_hi, math.log(q * d.support_upper))

    def f(s):
        x = math.exp(s)
        return math.exp(p * s - x) * d.cdf(x / q)

    s_lo = -40.0 / p
    # split at a few points so the adaptive rule sees the CDF rise
    edges = sorted({s_lo, -20.0, -10.0, -5.0, -2.0, 0.0, 1.0, 2.0, s_hi})
    edges = [e for e in edges if s_lo <= e <= s_hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(f, a, b, epsabs=1e-16, epsrel=rel, limit=200)[0]
    tail = 0.0
    if math.isfinite(d.support_upper) and math.log(q * d.support_upper) < math.log(60.0 + 2 * p):
        # F = 1 beyond the support: closed-form upper incomplete gamma remainder
        tail = special.gammaincc(p, q * d.support_upper) * special.gamma(p)
    # lower remainder below s_lo bounded by F <= 1
    return (total + tail) / (2.0 * special.gamma(p))


# ---------------------------------------------------------- diversity order
def _hop_params(obj) -> list[DerivedHopParams]:
    if isinstance(obj, MultihopSpec):
        return list(obj.params)
    if isinstance(obj, HopConfig):
        return [derive_hop_params(obj)]
    if isinstance(obj, DerivedHopParams):
        return [obj]
    return [derive_hop_params(h) if isinstance(h, HopConfig) else h for h in obj]


def hop_diversity_order(p: DerivedHopParams) -> float:
    vals = [p.z / 2.0, p.rho2 / 2.0]
    if p.long_range:
        vals.append(p.a / 2.0)
    return min(vals)


def diversity_order(obj) -> float:
    """Sum over hops of ``min{z/2, rho2/2[, a/2]}``."""
    return float(sum(hop_diversity_order(p) for p in _hop_params(obj)))


def bound_diversity_order(spec: MultihopSpec, gains_track_snr: bool = True) -> float:
    """High-SNR outage slope of the product-form bound when all ``gamma_bar_i`` scale together.

    The dominant singular point of the bound's CDF kernel sits at
    ``u = -min_i N DO_i / phi_i``; the kernel argument scales as
    ``gamma_bar**(-e)``, with ``e`` collecting the SNR exponents of the bound
    (the gains ``C_i ~ gamma_bar_i`` contribute when ``gains_track_snr``).
    """
    N = spec.N
    lam = min(N * hop_diversity_order(p) / ph for p, ph in zip(spec.params, spec.phi))
    e = sum(ph / N for ph in spec.phi)
    if gains_track_snr and N > 1:
        if spec.bound_variant == "paper-eq4":
            e -= sum((N - i) / N for i in range(1, N + 1))
        else:
            e -= sum(ph / N for ph in spec.phi)
    return lam * e


def fitted_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log10 y`` against ``log10 x``."""
    lx = np.log10(np.asarray(x, dtype=float))
    ly = np.log10(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
