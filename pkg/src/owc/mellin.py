"""Mellin-Barnes integrals along vertical contours.

Every Meijer-G / Fox-H style expression used by the package is represented by
a :class:`MellinKernel`, i.e. an integrand of the form::

    K(u) = prefactor * argument**(-u)
           * prod Gamma(o + s*u)**sign
           * prod (o + s*u)**(-power)
           * prod exp(coef / (o + s*u))

and evaluated as ``(1/2 pi i) * integral K(u) du`` over ``Re(u) = c``.

Conventions
-----------
* Every numerator gamma factor, linear factor and exponential factor requires
  ``Re(o + s*u) > 0`` on the contour; the intersection of these half-planes is
  the analyticity strip.  Poles and branch points therefore always lie on the
  far side of a factor's half-plane, and principal-branch logarithms keep every
  admissible vertical line cut-free.
* Evaluation is done in log-space; ``argument`` is stored as its logarithm so
  that SNR scales such as 1e60 do not overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy import optimize, special

__all__ = [
    "MellinError",
    "DomainError",
    "ConvergenceError",
    "PoleCollisionError",
    "GammaFactor",
    "LinearFactor",
    "ExpFactor",
    "MellinKernel",
    "ContourSpec",
    "ContourResult",
    "ResidueTerm",
    "ResidueExpansion",
    "MomentFunction",
    "log_gamma_complex",
    "kernel_eval",
    "contour_integrate",
    "contour_integrate_full",
    "meijer_g_kernel",
    "fox_h_kernel",
    "meijer_g",
    "perron_ccdf",
    "perron_cdf",
    "mellin_cdf",
    "mellin_pdf",
    "aber_functional",
    "dominant_pole_asymptote",
]

COLLISION_TOL = 1e-6


class MellinError(ValueError):
    """Base class for failures of the contour engine."""


class DomainError(MellinError):
    """Evaluation at a pole/branch point, or a contour outside the strip."""


class ConvergenceError(MellinError):
    """Quadrature did not reach the requested tolerance within its caps."""


class PoleCollisionError(MellinError):
    """Two singular factors coincide (within 1e-6); asymptotics are ill-posed."""


def log_gamma_complex(z):
    """Log-gamma for complex input, continuous off the negative real axis.

    Raises :class:`DomainError` at the poles ``z = 0, -1, -2, ...``.
    """
    z = np.asarray(z, dtype=complex)
    at_pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(at_pole):
        raise DomainError(f"log-gamma pole at z={z[at_pole].ravel()[0]}")
    out = special.loggamma(z)
    return out if out.ndim else complex(out)


class GammaFactor(NamedTuple):
    offset: float
    scale: float
    sign: int = 1


class LinearFactor(NamedTuple):
    offset: float
    scale: float
    power: float


class ExpFactor(NamedTuple):
    offset: float
    scale: float
    coefficient: float


def _singular_point(offset: float, scale: float) -> float:
    return -offset / scale


@dataclass(frozen=True)
class MellinKernel:
    """Product of gamma, linear and exponential factors (see module docs).

    ``lower``/``upper`` optionally restrict the strip further (used for
    degenerate moment functions that carry no factors).
    """

    prefactor: float = 1.0
    log_argument: float = 0.0
    gamma_factors: tuple[GammaFactor, ...] = ()
    linear_factors: tuple[LinearFactor, ...] = ()
    exp_factors: tuple[ExpFactor, ...] = ()
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        object.__setattr__(self, "gamma_factors", tuple(GammaFactor(*g) for g in self.gamma_factors))
        object.__setattr__(self, "linear_factors", tuple(LinearFactor(*f) for f in self.linear_factors))
        object.__setattr__(self, "exp_factors", tuple(ExpFactor(*f) for f in self.exp_factors))
        for g in self.gamma_factors:
            if not (math.isfinite(g.scale) and g.scale != 0):
                raise ValueError(f"gamma factor scale must be finite and non-zero: {g}")
            if g.sign not in (1, -1):
                raise ValueError(f"gamma factor sign must be +1 or -1: {g}")
        for f in self.linear_factors:
            if not (math.isfinite(f.scale) and f.scale != 0):
                raise ValueError(f"linear factor scale must be finite and non-zero: {f}")
            if f.power == 0:
                raise ValueError("linear factor with power 0; fold it into the prefactor")
        for f in self.exp_factors:
            if not (math.isfinite(f.scale) and f.scale != 0):
                raise ValueError(f"exp factor scale must be finite and non-zero: {f}")

    @classmethod
    def build(cls, *, argument: float = 1.0, **kw) -> "MellinKernel":
        if not argument > 0:
            raise ValueError("argument must be positive")
        return cls(log_argument=math.log(argument), **kw)

    @property
    def argument(self) -> float:
        return math.exp(self.log_argument)

    # ------------------------------------------------------------------ strip
    def strip(self) -> tuple[float, float]:
        lo, hi = self.lower, self.upper
        constraints = [(g.offset, g.scale) for g in self.gamma_factors if g.sign > 0]
        constraints += [(f.offset, f.scale) for f in self.linear_factors]
        constraints += [(f.offset, f.scale) for f in self.exp_factors]
        for o, s in constraints:
            edge = _singular_point(o, s)
            if s > 0:
                lo = max(lo, edge)
            else:
                hi = min(hi, edge)
        return lo, hi

    def in_strip(self, c: float) -> bool:
        lo, hi = self.strip()
        return lo < c < hi

    # ------------------------------------------------------------ composition
    def times(self, other: "MellinKernel") -> "MellinKernel":
        return MellinKernel(
            prefactor=self.prefactor * other.prefactor,
            log_argument=self.log_argument + other.log_argument,
            gamma_factors=self.gamma_factors + other.gamma_factors,
            linear_factors=self.linear_factors + other.linear_factors,
            exp_factors=self.exp_factors + other.exp_factors,
            lower=max(self.lower, other.lower),
            upper=min(self.upper, other.upper),
        )

    def dilate(self, alpha: float) -> "MellinKernel":
        """Kernel of ``u -> K(alpha*u)`` for ``alpha > 0``."""
        if not alpha > 0:
            raise ValueError("dilation factor must be positive")
        return MellinKernel(
            prefactor=self.prefactor,
            log_argument=alpha * self.log_argument,
            gamma_factors=tuple(GammaFactor(g.offset, alpha * g.scale, g.sign) for g in self.gamma_factors),
            linear_factors=tuple(LinearFactor(f.offset, alpha * f.scale, f.power) for f in self.linear_factors),
            exp_factors=tuple(ExpFactor(f.offset, alpha * f.scale, f.coefficient) for f in self.exp_factors),
            lower=self.lower / alpha,
            upper=self.upper / alpha,
        )

    def with_argument_factor(self, x: float) -> "MellinKernel":
        """Multiply the integrand by ``x**(-u)``."""
        if not x > 0:
            raise DomainError(f"argument factor must be positive, got {x}")
        return replace(self, log_argument=self.log_argument + math.log(x))

    def with_factors(self, *, prefactor: float = 1.0, gamma=(), linear=(), exp=()) -> "MellinKernel":
        return replace(
            self,
            prefactor=self.prefactor * prefactor,
            gamma_factors=self.gamma_factors + tuple(GammaFactor(*g) for g in gamma),
            linear_factors=self.linear_factors + tuple(LinearFactor(*f) for f in linear),
            exp_factors=self.exp_factors + tuple(ExpFactor(*f) for f in exp),
        )

    # ------------------------------------------------------------- evaluation
    def log_eval(self, u, *, skip_gamma=(), skip_linear=(), skip_exp=()):
        """``log K(u)`` (any branch); ``-inf`` real part where K vanishes."""
        u = np.asarray(u, dtype=complex)
        if math.isinf(self.log_argument):
            # degenerate scale: argument**(-u) is 0 or inf off the imaginary axis
            out = np.where(u.real > 0, -np.inf, np.inf) * np.sign(self.log_argument) + 0j
        else:
            out = -u * self.log_argument
        out = out + math.log(abs(self.prefactor)) + (0j if self.prefactor > 0 else 1j * math.pi)
        for i, g in enumerate(self.gamma_factors):
            if i in skip_gamma:
                continue
            z = g.offset + g.scale * u
            if g.sign > 0:
                out = out + log_gamma_complex(z)
            else:
                with np.errstate(invalid="ignore"):
                    lg = special.loggamma(z)
                at_pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
                out = out - np.where(at_pole, np.inf, lg)
        for i, f in enumerate(self.linear_factors):
            if i in skip_linear:
                continue
            z = f.offset + f.scale * u
            if np.any(z == 0):
                raise DomainError("evaluation at a linear-factor branch point")
            out = out - f.power * np.log(z)
        for i, f in enumerate(self.exp_factors):
            if i in skip_exp:
                continue
            z = f.offset + f.scale * u
            if np.any(z == 0):
                raise DomainError("evaluation at an essential singularity")
            out = out + f.coefficient / z
        return out

    def log_derivative(self, u):
        u = np.asarray(u, dtype=complex)
        out = np.full(u.shape, -self.log_argument, dtype=complex)
        for g in self.gamma_factors:
            out = out + g.sign * g.scale * special.psi(g.offset + g.scale * u)
        for f in self.linear_factors:
            out = out - f.power * f.scale / (f.offset + f.scale * u)
        for f in self.exp_factors:
            z = f.offset + f.scale * u
            out = out - f.coefficient * f.scale / z**2
        return out

    def __call__(self, u):
        out = np.exp(self.log_eval(u))
        return out if np.ndim(out) else complex(out)

    # ---------------------------------------------------------------- decay
    def decay(self, c: float) -> tuple[float, float]:
        """``(rate, power)`` with ``|K(c+it)| ~ |t|**power * exp(-rate*|t|)``."""
        rate = 0.0
        power = 0.0
        for g in self.gamma_factors:
            rate += g.sign * 0.5 * math.pi * abs(g.scale)
            power += g.sign * (g.offset + g.scale * c - 0.5)
        for f in self.linear_factors:
            power -= f.power
        return rate, power


def kernel_eval(k: MellinKernel, u) -> complex:
    """Evaluate ``k`` at complex ``u``; raises DomainError on singular points."""
    return k(u)


@dataclass(frozen=True)
class ContourSpec:
    """Vertical contour placement and quadrature controls.

    ``abscissa=None`` picks the saddle point of ``|K|`` on the real axis inside
    the strip; ``half_length=None`` truncates adaptively.  ``node_budget`` is
    the Gauss-Legendre order per panel and is doubled until two successive
    estimates agree to ``tolerance``.
    """

    abscissa: float | None = None
    half_length: float | None = None
    node_budget: int = 16
    tolerance: float = 1e-8
    max_node_budget: int = 256
    max_half_length: float = 1e7

    def __post_init__(self):
        if self.half_length is not None and not self.half_length > 0:
            raise ValueError("half_length must be positive")
        if self.node_budget < 2:
            raise ValueError("node_budget must be at least 2")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


DEFAULT_CONTOUR = ContourSpec()


@dataclass(frozen=True)
class ContourResult:
    value: float
    error: float
    abscissa: float
    half_length: float
    nodes: int
    imag_residual: float


@lru_cache(maxsize=16)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _nearest_singularity(k: MellinKernel, c: float) -> float:
    """Distance from ``c`` to the nearest numerator singular point."""
    d = math.inf
    for g in k.gamma_factors:
        if g.sign < 0:
            continue
        z = g.offset + g.scale * c
        d = min(d, z / abs(g.scale))
    for f in k.linear_factors + k.exp_factors:
        d = min(d, (f.offset + f.scale * c) / abs(f.scale))
    for edge in (k.lower, k.upper):
        if math.isfinite(edge):
            d = min(d, abs(c - edge))
    return d


def _saddle_abscissa(k: MellinKernel) -> float:
    lo, hi = k.strip()
    if not lo < hi:
        raise DomainError(f"empty analyticity strip ({lo}, {hi})")
    width = hi - lo
    if math.isfinite(width):
        pad = min(1e-3 * width, 1e-2)
        a, b = lo + pad, hi - pad
    elif math.isfinite(lo):
        a, b = lo + 1e-3, lo + 60.0
    elif math.isfinite(hi):
        a, b = hi - 60.0, hi - 1e-3
    else:
        a, b = -60.0, 60.0

    def f(c):
        v = k.log_eval(complex(c, 0.0)).real
        return v if np.isfinite(v) else 1e300

    res = optimize.minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": 1e-5 * max(1.0, b - a)})
    return float(res.x)


def _panel_edges(k: MellinKernel, c: float, T: float, d0: float, rate: float) -> np.ndarray:
    """Panel edges on ``[0, T]``: about one panel per half-distance to the nearest
    singular point, per oscillation and per e-fold of exponential decay.

    The phase speed is sampled on cells (linear up to ``d0``, then geometric
    with ratio 2**(1/8)) and each cell uses the larger endpoint value.
    """
    lin = np.linspace(0.0, min(d0, T), 9)
    geo = d0 * 2.0 ** (np.arange(1, 8 * max(1, math.ceil(math.log2(max(T / d0, 1.0)))) + 1) / 8.0)
    cells = np.unique(np.concatenate([lin, geo[geo < T], [T]]))
    omega = np.abs(k.log_derivative(c + 1j * cells).real)
    w_cell = np.maximum(omega[:-1], omega[1:])
    h_exp = 4.0 / rate if rate > 0 else math.inf
    with np.errstate(divide="ignore"):
        h_osc = np.where(w_cell > 0, 2.0 * math.pi / w_cell, math.inf)
    h = np.minimum(np.minimum(np.maximum(0.5 * d0, 0.5 * cells[:-1]), h_osc), h_exp)
    counts = np.maximum(1, np.ceil(np.diff(cells) / h).astype(np.int64))
    if counts.sum() > 2_000_000:
        raise ConvergenceError("contour requires too many panels")
    parts = [np.linspace(a, b, n + 1)[:-1] for a, b, n in zip(cells[:-1], cells[1:], counts)]
    return np.concatenate(parts + [[T]])


def _integrate_panels(k: MellinKernel, c: float, edges: np.ndarray, order: int, shift: float = 0.0):
    x, w = _gauss_legendre(order)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    t = (0.5 * (a + b) + half * x).ravel()
    weights = (half * w).ravel()
    vals = np.exp(k.log_eval(c + 1j * t) - shift)
    re = vals.real
    value = float(np.dot(weights, re)) / math.pi
    l1 = float(np.dot(weights, np.abs(vals))) / math.pi
    return value, l1


def contour_integrate_full(k: MellinKernel, c: ContourSpec | None = None) -> ContourResult:
    """Real part of ``(1/2 pi i) * integral K(u) du`` along ``Re(u) = c``."""
    spec = c or DEFAULT_CONTOUR
    lo, hi = k.strip()
    if not lo < hi:
        raise DomainError(f"empty analyticity strip ({lo}, {hi})")
    if math.isinf(k.log_argument):
        # argument**(-u) vanishes identically on the admissible half-plane
        if k.log_argument > 0 and lo >= 0:
            return ContourResult(0.0, 0.0, spec.abscissa or max(lo, 0.0) + 1.0, 0.0, 0, 0.0)
        raise DomainError("degenerate kernel is only admissible for Re(u) > 0")
    x0 = spec.abscissa if spec.abscissa is not None else _saddle_abscissa(k)
    if not lo < x0 < hi:
        raise DomainError(f"abscissa {x0} outside analyticity strip ({lo}, {hi})")
    rate, power = k.decay(x0)
    if rate < -1e-12 or (abs(rate) <= 1e-12 and power >= -1.0):
        raise MellinError(f"integrand does not decay along the contour (rate={rate}, power={power})")
    rate = max(rate, 0.0)
    d0 = max(_nearest_singularity(k, x0), 1e-12)
    # work relative to |K(x0)| so extreme arguments neither overflow nor underflow
    shift = float(k.log_eval(complex(x0, 0.0)).real)
    if not math.isfinite(shift):
        raise MellinError(f"kernel is not finite at the abscissa {x0}")

    def osc_len(T):
        # van der Corput: an oscillating tail with monotone amplitude and
        # phase speed >= w contributes at most ~2|K(T)|/w; factor 2 margin
        T = np.atleast_1d(np.asarray(T, dtype=float))
        w = k.log_derivative(x0 + 1j * np.stack([T, 2.0 * T, 8.0 * T])).real
        same = np.all(w > 0, axis=0) | np.all(w < 0, axis=0)
        out = np.where(same, 4.0 / np.maximum(np.min(np.abs(w), axis=0), 1e-300), np.inf)
        return out if out.size > 1 else float(out[0])

    def tail_bound(T):
        mag = math.exp(min(k.log_eval(complex(x0, T)).real - shift, 700.0))
        decay_len = T / (-power - 1.0) if rate == 0 else min(T, 1.0 / rate)
        return mag * min(decay_len, osc_len(T)) / math.pi

    if spec.half_length is not None:
        T = spec.half_length
    else:
        # coarse scan on a geometric grid for an initial truncation point
        ts = d0 * 2.0 ** np.arange(0, 80)
        ts = ts[ts <= spec.max_half_length]
        mags = np.exp(np.minimum(k.log_eval(x0 + 1j * ts).real - shift, 700.0))
        scale = max(float(np.max(mags * ts)), d0)
        lens = np.minimum(ts, (1.0 / rate) if rate > 0 else ts / max(-power - 1.0, 1e-3))
        lens = np.minimum(lens, osc_len(ts))
        ok = mags * lens < 1e-4 * spec.tolerance * scale
        # first index after which every grid point is negligible
        bad = np.nonzero(~ok)[0]
        idx = bad[-1] + 1 if bad.size else 0
        T = float(ts[min(idx, ts.size - 1)])

    order = spec.node_budget
    while True:
        edges = _panel_edges(k, x0, T, d0, rate)
        prev, l1 = _integrate_panels(k, x0, edges, order, shift)
        value = prev
        converged = False
        while order * 2 <= spec.max_node_budget:
            order *= 2
            value, l1 = _integrate_panels(k, x0, edges, order, shift)
            err = abs(value - prev)
            if err <= spec.tolerance * abs(value) or err <= 1e-13 * l1:
                converged = True
                break
            prev = value
        if not converged:
            raise ConvergenceError(f"quadrature did not converge (last change {abs(value - prev):.3e})")
        order = max(spec.node_budget, order // 2)
        if spec.half_length is not None:
            break
        if tail_bound(T) <= 1e-2 * spec.tolerance * max(abs(value), 1e-13 * l1):
            break
        if T >= spec.max_half_length:
            raise ConvergenceError("contour truncation did not converge")
        T = min(2.0 * T, spec.max_half_length)

    # conjugate-symmetry residual at a few nodes
    probe = x0 + 1j * np.array([0.1, 1.0, 3.0]) * max(d0, 1e-3)
    la = k.log_eval(probe)
    lb = k.log_eval(np.conj(probe))
    resid = float(np.max(np.abs(1.0 - np.exp(np.conj(lb) - la))))
    s = math.exp(shift) if shift < 709.0 else math.inf
    return ContourResult(value * s, abs(value - prev) * s, x0, T, order * (len(edges) - 1), resid)


def contour_integrate(k: MellinKernel, c: ContourSpec | None = None) -> float:
    return contour_integrate_full(k, c).value


def contour_integrate_family(k: MellinKernel, factor: tuple[float, float], powers, c: ContourSpec | None = None) -> np.ndarray:
    """Integrals of ``K(u) * (o + s u)**(-p)`` for every ``p`` in ``powers`` on shared nodes.

    The contour (abscissa, panels, truncation) comes from ``K`` itself; each
    member must separately meet the node-doubling and tail criteria, which
    holds whenever ``(o + s u)`` is analytic and non-vanishing in the strip
    and ``p >= 0`` (extra factors only speed up decay).
    """
    spec = c or DEFAULT_CONTOUR
    o, sc = factor
    powers = np.asarray(powers, dtype=float)
    if np.any(powers < 0):
        raise ValueError("family powers must be non-negative")
    base = contour_integrate_full(k, spec)
    x0, T = base.abscissa, base.half_length
    lo, hi = k.strip()
    edge = -o / sc
    if (sc > 0 and x0 <= edge) or (sc < 0 and x0 >= edge):
        raise DomainError("family factor vanishes or changes branch inside the contour strip")
    rate, power = k.decay(x0)
    rate = max(rate, 0.0)
    d0 = min(max(_nearest_singularity(k, x0), 1e-12), abs(x0 - edge))
    shifts = k.log_eval(complex(x0, 0.0)).real - powers * math.log(abs(o + sc * x0))

    def values(edges, order):
        x, w = _gauss_legendre(order)
        a, b = edges[:-1, None], edges[1:, None]
        half = 0.5 * (b - a)
        t = (0.5 * (a + b) + half * x).ravel()
        wts = (half * w).ravel()
        u = x0 + 1j * t
        lv = k.log_eval(u)[None, :] - powers[:, None] * np.log(o + sc * u)[None, :] - shifts[:, None]
        vals = np.exp(lv)
        return vals.real @ wts / math.pi, np.abs(vals) @ wts / math.pi, np.exp(lv[:, -1].real)

    order = spec.node_budget
    while True:
        edges = _panel_edges(k, x0, T, d0, rate)
        prev, _, _ = values(edges, order)
        while True:
            if order * 2 > spec.max_node_budget:
                raise ConvergenceError("family quadrature did not converge")
            order *= 2
            val, l1, tail_mag = values(edges, order)
            err = np.abs(val - prev)
            if np.all((err <= spec.tolerance * np.abs(val)) | (err <= 1e-13 * l1)):
                break
            prev = val
        order = max(spec.node_budget, order // 2)
        # members decay at least as fast as K, so its tail length is an upper bound
        decay_len = min(T, 1.0 / rate) if rate > 0 else T / (-power - 1.0)
        if np.all(tail_mag * decay_len / math.pi <= 1e-2 * spec.tolerance * np.maximum(np.abs(val), 1e-13 * l1)):
            break
        if T >= spec.max_half_length:
            raise ConvergenceError("family contour truncation did not converge")
        T = min(2.0 * T, spec.max_half_length)
    with np.errstate(over="ignore"):
        return val * np.exp(shifts)


# ----------------------------------------------------------- Meijer-G / Fox-H
def fox_h_kernel(z: float, a: Sequence[tuple[float, float]], b: Sequence[tuple[float, float]], m: int, n: int) -> MellinKernel:
    """Kernel of ``H^{m,n}_{p,q}[z | (a_j, A_j); (b_j, B_j)]``.

    Integration variable ``s`` with ``z**s``, i.e. ``argument = 1/z``.
    """
    gam = []
    for j, (bj, Bj) in enumerate(b):
        gam.append((bj, -Bj, 1) if j < m else (1 - bj, Bj, -1))
    for j, (aj, Aj) in enumerate(a):
        gam.append((1 - aj, Aj, 1) if j < n else (aj, -Aj, -1))
    return MellinKernel(log_argument=-math.log(z), gamma_factors=tuple(gam))


def meijer_g_kernel(z: float, a: Sequence[float], b: Sequence[float], m: int, n: int) -> MellinKernel:
    return fox_h_kernel(z, [(x, 1.0) for x in a], [(x, 1.0) for x in b], m, n)


def meijer_g(z: float, a: Sequence[float], b: Sequence[float], m: int, n: int, c: ContourSpec | None = None) -> float:
    return contour_integrate(meijer_g_kernel(z, a, b, m, n), c)


# ---------------------------------------------------------- moment functions
@dataclass(frozen=True)
class MomentFunction:
    """``u -> E[X**u]`` for a positive random variable, as a Mellin kernel.

    ``kernel(u)`` equals the moment; ``support_upper`` is the essential
    supremum of ``X`` (``inf`` when unbounded).
    """

    kernel: MellinKernel
    support_upper: float = math.inf

    def __call__(self, u):
        return self.kernel(u)

    def strip(self) -> tuple[float, float]:
        return self.kernel.strip()

    def times(self, other: "MomentFunction") -> "MomentFunction":
        """Moment of the product of two independent variables."""
        return MomentFunction(self.kernel.times(other.kernel), self.support_upper * other.support_upper)

    def power(self, alpha: float) -> "MomentFunction":
        """Moment of ``X**alpha``."""
        return MomentFunction(self.kernel.dilate(alpha), self.support_upper**alpha)

    def scaled(self, s: float) -> "MomentFunction":
        """Moment of ``s*X``."""
        return MomentFunction(self.kernel.with_argument_factor(1.0 / s), self.support_upper * s)

    @classmethod
    def degenerate(cls, value: float) -> "MomentFunction":
        """Point mass at ``value`` (``value = 0`` allowed; strip Re(u) > 0)."""
        if value == 0:
            return cls(MellinKernel(log_argument=math.inf, lower=0.0), 0.0)
        return cls(MellinKernel(log_argument=-math.log(value)), value)


def _right_contour(spec: ContourSpec | None, side: str) -> ContourSpec | None:
    if spec is None or spec.abscissa is None:
        return spec
    if side == "right" and not spec.abscissa > 0:
        raise DomainError("this inversion requires an abscissa c > 0")
    if side == "left" and not spec.abscissa < 0:
        raise DomainError("this inversion requires an abscissa c < 0")
    return spec


def _check_converged_clamp(v: float, lo: float, hi: float, tol: float) -> float:
    slack = max(1e-9, 10 * tol)
    if v < lo - slack or v > hi + slack:
        raise ConvergenceError(f"inversion result {v} far outside [{lo}, {hi}]")
    return min(max(v, lo), hi)


def _point_mass(M: MomentFunction) -> float | None:
    """Location of ``X`` when ``M`` is a pure power ``value**u`` (no decay on any contour)."""
    k = M.kernel
    if k.gamma_factors or k.linear_factors or k.exp_factors or k.prefactor != 1.0:
        return None
    return math.exp(-k.log_argument)


def perron_ccdf(M: MomentFunction, x: float, c: ContourSpec | None = None) -> float:
    """``P(X > x)`` from the moment function via a contour with ``c > 0``."""
    if not x > 0:
        raise DomainError("x must be positive")
    c = _right_contour(c, "right")
    if x >= M.support_upper:
        return 0.0
    at = _point_mass(M)
    if at is not None:
        return 1.0 if x < at else 0.0
    k = M.kernel.with_argument_factor(x).with_factors(linear=[(0.0, 1.0, 1.0)])
    if not k.strip()[0] < k.strip()[1]:
        raise DomainError("moment function is not finite on any line Re(u) > 0")
    v = contour_integrate(k, c)
    return _check_converged_clamp(v, 0.0, 1.0, (c or DEFAULT_CONTOUR).tolerance)


def perron_cdf(M: MomentFunction, x: float, c: ContourSpec | None = None) -> float:
    """``P(X < x)`` via a contour with ``c < 0`` (no cancellation in the tail)."""
    if not x > 0:
        raise DomainError("x must be positive")
    c = _right_contour(c, "left")
    if x >= M.support_upper:
        return 1.0
    at = _point_mass(M)
    if at is not None:
        return 1.0 if x >= at else 0.0
    k = M.kernel.with_argument_factor(x).with_factors(linear=[(0.0, -1.0, 1.0)])
    lo, hi = k.strip()
    if not lo < hi:
        raise DomainError("moment function is not finite on any line Re(u) < 0")
    v = contour_integrate(k, c)
    return _check_converged_clamp(v, 0.0, 1.0, (c or DEFAULT_CONTOUR).tolerance)


def mellin_cdf(M: MomentFunction, x: float, c: ContourSpec | None = None) -> float:
    """CDF using whichever side of ``u = 0`` the strip admits (left preferred)."""
    lo, _ = M.strip()
    if c is not None and c.abscissa is not None:
        return perron_cdf(M, x, c) if c.abscissa < 0 else 1.0 - perron_ccdf(M, x, c)
    if lo < 0:
        return perron_cdf(M, x, c)
    return 1.0 - perron_ccdf(M, x, c)


def mellin_pdf(M: MomentFunction, x: float, c: ContourSpec | None = None) -> float:
    """Density ``f(x) = (1/2 pi i) * integral M(u) x**(-u-1) du``."""
    if not x > 0:
        raise DomainError("x must be positive")
    if x >= M.support_upper:
        return 0.0
    k = M.kernel.with_argument_factor(x).with_factors(prefactor=1.0 / x)
    v = contour_integrate(k, c)
    tol = (c or DEFAULT_CONTOUR).tolerance
    if v < -max(1e-12, 10 * tol) * abs(v) - 1e-300 and v < -1e-12:
        raise ConvergenceError(f"negative density estimate {v}")
    return max(v, 0.0)


def aber_functional(M: MomentFunction, p: float, q: float, c: ContourSpec | None = None) -> float:
    """``E[Gamma(p, q X)] / (2 Gamma(p))``, the (p, q) error-rate family.

    A contour with ``0 < c < p`` gives ``1/2 - (1/(2 Gamma(p))) (1/2 pi i)
    integral M(u) q**u Gamma(p-u) du/u``; ``c < 0`` gives the same quantity
    without the leading 1/2 and is preferred whenever the strip allows it.
    """
    if not (p > 0 and q > 0):
        raise DomainError("p and q must be positive")
    base = M.kernel.with_argument_factor(1.0 / q).with_factors(gamma=[(p, -1.0, 1)])
    lo, _ = M.strip()
    side = None
    if c is not None and c.abscissa is not None:
        side = "left" if c.abscissa < 0 else "right"
        if side == "right" and not c.abscissa < p:
            raise DomainError("right-side ABER contour requires 0 < c < p")
    if side is None:
        side = "left" if lo < 0 else "right"
    g = math.gamma(p)
    tol = (c or DEFAULT_CONTOUR).tolerance
    if side == "left":
        k = base.with_factors(prefactor=1.0 / (2 * g), linear=[(0.0, -1.0, 1.0)])
        v = contour_integrate(k, c)
    else:
        k = base.with_factors(prefactor=1.0 / (2 * g), linear=[(0.0, 1.0, 1.0)])
        v = 0.5 - contour_integrate(k, c)
    return _check_converged_clamp(v, 0.0, 0.5, tol)


# ---------------------------------------------------------------- residues
@dataclass(frozen=True)
class ResidueTerm:
    """``coefficient * x**pole_location * ln(1/x)**log_power``."""

    pole_location: float
    order: float
    coefficient: float
    log_power: float

    def __call__(self, x):
        if self.coefficient == 0:
            return 0.0 * np.asarray(x, dtype=float)
        x = np.asarray(x, dtype=float)
        L = np.log(1.0 / x)
        with np.errstate(divide="ignore", invalid="ignore"):
            logmag = math.log(abs(self.coefficient)) + self.pole_location * np.log(x)
            logmag = logmag + (self.log_power * np.log(L) if self.log_power != 0 else 0.0)
        return math.copysign(1.0, self.coefficient) * np.exp(logmag)


@dataclass(frozen=True)
class ResidueExpansion:
    """Small-argument expansion ``sum c x**lambda ln(1/x)**m``.

    Terms are ordered by ascending ``pole_location`` (the first is dominant).
    ``exact`` is False when branch points or essential singularities were
    truncated to a finite number of terms.
    """

    terms: tuple[ResidueTerm, ...]
    exact: bool = True
    remainder_note: str = ""

    @property
    def leading_exponent(self) -> float:
        return self.terms[0].pole_location

    def __call__(self, x):
        return sum(t(x) for t in self.terms)


def _left_singularities(k: MellinKernel, n_gamma_poles: int):
    """Singular points to the left of the strip: (u0, kind, index, n)."""
    pts = []
    for i, g in enumerate(k.gamma_factors):
        if g.sign > 0 and g.scale > 0:
            for n in range(n_gamma_poles):
                pts.append((-(g.offset + n) / g.scale, "gamma", i, n))
    for i, f in enumerate(k.linear_factors):
        if f.scale > 0:
            pts.append((_singular_point(f.offset, f.scale), "linear", i, 0))
    for i, f in enumerate(k.exp_factors):
        if f.scale > 0:
            pts.append((_singular_point(f.offset, f.scale), "exp", i, 0))
    pts.sort(key=lambda p: -p[0])
    return pts


def _all_singular_points(k: MellinKernel, n_gamma_poles: int) -> list[float]:
    out = []
    for g in k.gamma_factors:
        if g.sign > 0:
            out += [-(g.offset + n) / g.scale for n in range(n_gamma_poles)]
    out += [_singular_point(f.offset, f.scale) for f in k.linear_factors + k.exp_factors]
    return out


def dominant_pole_asymptote(
    k: MellinKernel | MomentFunction,
    n_points: int = 1,
    n_log_terms: int | None = None,
    max_exp_terms: int = 400,
) -> ResidueExpansion:
    """Small-argument expansion of ``(1/2 pi i) integral K(u) du``.

    Moves the contour left across the ``n_points`` right-most singular points
    of ``K``.  At a singular point ``u0`` of (possibly fractional) order
    ``kappa`` with ``K(u) = argument**(-u) (u-u0)**(-kappa) g(u)``, the
    contribution is ``x**(-u0) sum_m g_m ln(1/x)**(kappa-1-m) / Gamma(kappa-m)``
    with ``g_m`` the Taylor coefficients of ``g`` (computed by a Cauchy
    integral).  For integer orders this is the exact residue; by default
    ``kappa`` terms are kept there and ``ceil(kappa) + 2`` otherwise.  A branch point
    paired with an ``exp(kappa'/(u-u0))`` factor contributes the leading
    ``sum_j`` series only.
    """
    if isinstance(k, MomentFunction):
        k = k.kernel
    pts = _left_singularities(k, n_gamma_poles=n_points + 2)
    if not pts:
        raise MellinError("kernel has no singular points to the left of the strip")
    # group coincident points
    groups: list[list] = []
    for p in pts:
        if groups and abs(groups[-1][0][0] - p[0]) <= COLLISION_TOL * max(1.0, abs(p[0])):
            groups[-1].append(p)
        else:
            groups.append([p])
    all_pts = _all_singular_points(k, n_gamma_poles=n_points + 4)
    terms: list[ResidueTerm] = []
    exact = True
    notes = []
    for grp in groups[:n_points]:
        u0 = grp[0][0]
        poles = [p for p in grp if p[1] != "exp"]
        exps = [p for p in grp if p[1] == "exp"]
        if len(poles) > 1:
            raise PoleCollisionError(
                f"singular factors coincide near u={u0:.6g}; perturb one of the colliding "
                "parameters by ~1e-4 relative"
            )
        # regularized remainder g(u) = K(u) argument**u (u-u0)**kappa
        skip_g = tuple(p[2] for p in poles if p[1] == "gamma")
        skip_l = tuple(p[2] for p in poles if p[1] == "linear")
        skip_e = tuple(p[2] for p in exps)
        if poles:
            kind, idx, nn = poles[0][1], poles[0][2], poles[0][3]
            if kind == "gamma":
                kappa = 1.0
                gf = k.gamma_factors[idx]
            else:
                kappa = float(k.linear_factors[idx].power)
                lf = k.linear_factors[idx]
        else:
            kind, kappa = None, 0.0
        E = sum(k.exp_factors[p[2]].coefficient / k.exp_factors[p[2]].scale for p in exps)

        def g(u, kind=kind):
            val = k.log_eval(u, skip_gamma=skip_g, skip_linear=skip_l, skip_exp=skip_e) + u * k.log_argument
            if kind == "gamma":
                # Gamma(o+s u)*(u-u0) is analytic at the pole
                val = val + log_gamma_complex(gf.offset + gf.scale * u) + np.log(u - u0)
            elif kind == "linear":
                val = val - lf.power * math.log(lf.scale) + 0j
            return np.exp(val)

        others = [abs(v - u0) for v in all_pts if abs(v - u0) > COLLISION_TOL * max(1.0, abs(u0))]
        radius = 0.5 * min(others + [1.0])
        nodes = 64
        theta = 2 * np.pi * np.arange(nodes) / nodes
        ring = u0 + radius * np.exp(1j * theta)
        vals = g(ring)
        lam = -u0 + 0.0
        if exps:
            exact = False
            notes.append(f"essential singularity at u={u0:.6g}: leading series only")
            g0 = float(np.mean(vals).real)
            for j in range(max_exp_terms):
                order = kappa + j
                if order <= 0:
                    continue
                logc = j * math.log(abs(E)) - math.lgamma(j + 1) - math.lgamma(order) if E != 0 else (0.0 if j == 0 else -math.inf)
                if not math.isfinite(logc):
                    break
                coef = g0 * math.exp(logc) * (math.copysign(1.0, E) ** j)
                terms.append(ResidueTerm(lam, kappa, coef, order - 1))
            continue
        integer_order = abs(kappa - round(kappa)) <= 1e-12
        n_terms = n_log_terms or (int(round(kappa)) if integer_order else math.ceil(kappa) + 2)
        for m in range(n_terms):
            gm = float((np.mean(vals * np.exp(-1j * m * theta)) / radius**m).real)
            rg = float(special.rgamma(kappa - m))
            if rg == 0.0:
                break
            terms.append(ResidueTerm(lam, kappa, gm * rg, kappa - 1 - m))
        if not integer_order:
            exact = False
            notes.append(f"branch point at u={u0:.6g}: {n_terms} terms of an asymptotic series")
    return ResidueExpansion(tuple(terms), exact, "; ".join(notes))
