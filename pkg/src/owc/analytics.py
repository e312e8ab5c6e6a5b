"""Single-hop and multihop SNR distributions.

The canonical route is the moment function (a product of channel moments)
inverted with the contour engine.  Independent evaluators of the per-hop
closed forms are kept alongside:

* long range: a Bessel-series sum of Meijer-G terms, each evaluated as its own
  Mellin-Barnes integral on the integration variable of the turbulence ratio;
* short range: a Poisson mixture of fog/jitter convolutions (stable for any
  fog shape and either sign of ``z - rho**2``), and the binomial incomplete
  gamma series in extended precision for cross-checking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import mpmath as mp
import numpy as np
from scipy import special

from .channels import DerivedHopParams, HopConfig, derive_hop_params, hop_snr_moment
from .mellin import (
    ContourSpec,
    contour_integrate_family,
    DomainError,
    MellinKernel,
    MomentFunction,
    contour_integrate,
    mellin_cdf,
    mellin_pdf,
    perron_ccdf,
)

BoundVariant = Literal["paper-eq4", "amgm"]
BOUND_VARIANTS = ("paper-eq4", "amgm")
EXACT_FORMS = ("printed", "shifted")

DEFAULT_J = 20
SERIES_STEP = 10
SERIES_MAX_J = 400


@dataclass(frozen=True)
class MultihopSpec:
    """An N-hop fixed-gain relay chain.

    ``C`` defaults to ``1 + gamma_bar_i`` per hop.  ``exact_form`` selects the
    end-to-end SNR: ``printed`` uses ``prod_{j<=i} (C_j - 1)/gamma_j`` and
    ``shifted`` uses ``prod_{j<=i} C_{j-1}/gamma_j`` with ``C_0 = 1``.
    """

    hops: tuple[HopConfig, ...]
    C: tuple[float, ...] | None = None
    bound_variant: BoundVariant = "paper-eq4"
    exact_form: str = "printed"
    params: tuple[DerivedHopParams, ...] = field(init=False, repr=False, compare=False)
    gains: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        hops = tuple(self.hops)
        if not hops:
            raise ValueError("at least one hop is required")
        object.__setattr__(self, "hops", hops)
        params = tuple(derive_hop_params(h) for h in hops)
        object.__setattr__(self, "params", params)
        if self.C is None:
            gains = tuple(1.0 + p.gamma_bar for p in params)
        else:
            gains = tuple(float(c) for c in self.C)
            if len(gains) != len(hops):
                raise ValueError(f"expected {len(hops)} gain constants, got {len(gains)}")
        if any(not c >= 1 for c in gains):
            raise ValueError("gain constants must satisfy C_i >= 1")
        object.__setattr__(self, "gains", gains)
        if self.bound_variant not in BOUND_VARIANTS:
            raise ValueError(f"bound_variant must be one of {BOUND_VARIANTS}")
        if self.exact_form not in EXACT_FORMS:
            raise ValueError(f"exact_form must be one of {EXACT_FORMS}")
        if self.bound_variant == "amgm" and len(hops) > 1 and any(c <= 1 for c in gains):
            raise ValueError("amgm bound requires C_i > 1")

    @property
    def N(self) -> int:
        return len(self.hops)

    @property
    def phi(self) -> tuple[int, ...]:
        return tuple(self.N + 1 - i for i in range(1, self.N + 1))

    @property
    def psi(self) -> tuple[float, ...]:
        return bound_weights(self.gains, self.bound_variant)

    @property
    def regime(self) -> str:
        regs = {p.regime for p in self.params}
        return regs.pop() if len(regs) == 1 else "mixed"


def bound_weights(C: Sequence[float], variant: str = "paper-eq4") -> tuple[float, ...]:
    N = len(C)
    if N == 1:
        return (1.0,)
    if variant == "paper-eq4":
        return tuple(c ** (-(N - i) / N) for i, c in enumerate(C, start=1))
    if variant == "amgm":
        return tuple((c - 1.0) ** (-(N + 1 - i) / N) for i, c in enumerate(C, start=1))
    raise ValueError(f"unknown bound variant {variant!r}")


# ------------------------------------------------------------ end-to-end SNR
def exact_e2e_snr(gammas, C: Sequence[float], form: str = "printed"):
    """Fixed-gain AF end-to-end SNR; ``gammas`` has shape (N, ...).

    A single hop has no relay gain, so ``N = 1`` returns ``gamma_1``.
    """
    g = np.asarray(gammas, dtype=float)
    N = g.shape[0]
    if len(C) != N:
        raise ValueError("need one gain constant per hop")
    if N == 1:
        return g[0].copy() if g.ndim > 1 else float(g[0])
    if form == "printed":
        if any(c <= 1 for c in C):
            raise ValueError("C_i = 1 makes the printed end-to-end SNR degenerate")
        w = [c - 1.0 for c in C]
    elif form == "shifted":
        w = [1.0] + list(C[:-1])
    else:
        raise ValueError(f"unknown exact form {form!r}")
    acc = np.zeros(g.shape[1:])
    prod = np.ones(g.shape[1:])
    for i in range(N):
        prod = prod * w[i] / g[i]
        acc = acc + prod
    out = 1.0 / acc
    return out if out.ndim else float(out)


def bound_e2e_snr(gammas, C: Sequence[float], variant: str = "paper-eq4"):
    """Product-form bound ``(1/N) prod psi_i gamma_i**(phi_i/N)``."""
    g = np.asarray(gammas, dtype=float)
    N = g.shape[0]
    psi = bound_weights(C, variant)
    logv = -math.log(N) + sum(math.log(psi[i]) for i in range(N))
    logv = logv + sum((N - i) / N * np.log(g[i]) for i in range(N))
    out = np.exp(logv)
    return out if np.ndim(out) else float(out)


# -------------------------------------------------------------- distributions
@dataclass(frozen=True)
class SnrDistribution:
    """SNR law defined by its moment function; ``kind`` is single-hop or multihop-bound."""

    moment: MomentFunction
    regime: str
    kind: str
    params: tuple[DerivedHopParams, ...] = ()
    contour: ContourSpec | None = None

    @property
    def support_upper(self) -> float:
        return self.moment.support_upper

    def cdf(self, x: float) -> float:
        if not x > 0:
            return 0.0
        if x >= self.support_upper:
            return 1.0
        if self.kind == "single-hop" and self.regime == "short-range":
            return singlehop_sr_cdf(x, self.params[0])
        return mellin_cdf(self.moment, x, self.contour)

    def cdf_contour(self, x: float) -> float:
        if x >= self.support_upper:
            return 1.0
        return mellin_cdf(self.moment, x, self.contour)

    def pdf(self, x: float) -> float:
        if not 0 < x < self.support_upper:
            return 0.0
        if self.kind == "single-hop" and self.regime == "short-range":
            return singlehop_sr_pdf(x, self.params[0])
        return mellin_pdf(self.moment, x, self.contour)


def singlehop_distribution(hop: HopConfig | DerivedHopParams, contour: ContourSpec | None = None) -> SnrDistribution:
    p = derive_hop_params(hop) if isinstance(hop, HopConfig) else hop
    return SnrDistribution(hop_snr_moment(p), p.regime, "single-hop", (p,), contour)


def multihop_moment_function(spec: MultihopSpec) -> MomentFunction:
    """``u -> N**(-u) prod psi_i**u E[gamma_i**(u phi_i/N)]``."""
    N = spec.N
    M = None
    for p, ph in zip(spec.params, spec.phi):
        Mi = hop_snr_moment(p).power(ph / N)
        M = Mi if M is None else M.times(Mi)
    scale = math.exp(sum(math.log(s) for s in spec.psi) - math.log(N))
    return M.scaled(scale)


def multihop_moment(spec: MultihopSpec, u):
    M = multihop_moment_function(spec)
    lo, hi = M.strip()
    ur = np.real(u)
    if np.any(ur <= lo) or np.any(ur >= hi):
        raise DomainError(f"moment order outside the finiteness strip ({lo:.6g}, {hi:.6g})")
    return M(u)


def multihop_distribution(spec: MultihopSpec, contour: ContourSpec | None = None) -> SnrDistribution:
    if spec.N == 1:
        return singlehop_distribution(spec.params[0], contour)
    return SnrDistribution(multihop_moment_function(spec), spec.regime, "multihop-bound", spec.params, contour)


def multihop_cdf(spec: MultihopSpec, gamma: float, contour: ContourSpec | None = None) -> float:
    return multihop_distribution(spec, contour).cdf(gamma)


def multihop_pdf(spec: MultihopSpec, gamma: float, contour: ContourSpec | None = None) -> float:
    return multihop_distribution(spec, contour).pdf(gamma)


# ------------------------------------------------------------ long range
def _require(p: DerivedHopParams, regime: str):
    if p.regime != regime:
        raise ValueError(f"expected a {regime} hop, got {p.regime}")


def singlehop_lr_cdf(gamma: float, p: DerivedHopParams, contour: ContourSpec | None = None) -> float:
    _require(p, "long-range")
    if not gamma > 0:
        return 0.0
    return mellin_cdf(hop_snr_moment(p), gamma, contour)


def singlehop_lr_pdf(gamma: float, p: DerivedHopParams, contour: ContourSpec | None = None) -> float:
    _require(p, "long-range")
    if not gamma > 0:
        return 0.0
    return mellin_pdf(hop_snr_moment(p), gamma, contour)


def _lr_series_prefactor(p: DerivedHopParams) -> float:
    a, b = p.a, p.b
    logc = (
        a * math.log(a)
        + p.k * math.log(p.z)
        + math.log(p.rho2)
        - p.K
        - a * math.log(p.A)
        - special.betaln(a, b)
        - a * math.log(b - 1)
        - special.gammaln(a + b)
    )
    return math.exp(logc)


def _lr_series_term_kernel(p: DerivedHopParams, j: int, w: float, cdf: bool) -> MellinKernel:
    # variable shifted by a so the y**a factor rides on the kernel argument
    lin = [(p.rho2, -1.0, j + 1.0), (p.z, -1.0, p.k)]
    if cdf:
        lin.append((0.0, 1.0, 1.0))
    return MellinKernel(
        log_argument=-math.log(w),
        gamma_factors=((p.a, -1.0, 1), (p.b, 1.0, 1)),
        linear_factors=tuple(lin),
    )


def _guarded_series(terms, J: int, rel: float = 1e-10) -> tuple[float, int]:
    """Sum ``terms(range)`` over ``J`` terms, extending until ``J`` and ``J+10`` agree."""
    total = float(np.sum(terms(range(J))))
    while J < SERIES_MAX_J:
        extra = float(np.sum(terms(range(J, J + SERIES_STEP))))
        J += SERIES_STEP
        total += extra
        if abs(extra) <= rel * abs(total):
            return total, J
    raise ArithmeticError("Bessel-series sum did not converge")


def _lr_series_terms(p: DerivedHopParams, w: float, cdf: bool):
    """``js -> K''**j / j! * (Meijer-G term j)``; terms share one contour per call."""
    c = p.boresight_series
    base = _lr_series_term_kernel(p, 0, w, cdf)

    def terms(js):
        js = np.asarray(list(js), dtype=float)
        if c == 0:
            js = js[js == 0]
            if js.size == 0:
                return np.zeros(1)
        vals = contour_integrate_family(base, (p.rho2, -1.0), js)
        logw = js * (math.log(c) if c > 0 else 0.0) - special.gammaln(js + 1)
        return np.exp(logw) * vals

    return terms


def singlehop_lr_cdf_series(gamma: float, p: DerivedHopParams, J: int = DEFAULT_J, guard: bool = True) -> float:
    """Long-range CDF as the Bessel-series sum of Meijer-G terms.

    ``guard`` extends the truncation while ``J`` and ``J + 10`` disagree.
    """
    _require(p, "long-range")
    if not gamma > 0:
        return 0.0
    w = p.B / p.A * math.sqrt(gamma / p.gamma_bar)
    pre = _lr_series_prefactor(p) * (p.A / p.B) ** p.a
    terms = _lr_series_terms(p, w, True)
    total = _guarded_series(terms, J)[0] if guard else float(np.sum(terms(range(J))))
    return pre * total


def singlehop_lr_pdf_series(gamma: float, p: DerivedHopParams, J: int = DEFAULT_J, guard: bool = True) -> float:
    _require(p, "long-range")
    if not gamma > 0:
        return 0.0
    w = p.B / p.A * math.sqrt(gamma / p.gamma_bar)
    pre = _lr_series_prefactor(p) * (p.A / p.B) ** p.a / (2.0 * gamma)
    terms = _lr_series_terms(p, w, False)
    total = _guarded_series(terms, J)[0] if guard else float(np.sum(terms(range(J))))
    return pre * total


# ----------------------------------------------------------- short range
def _sr_log_L(gamma: float, p: DerivedHopParams) -> float:
    """``ln(A sqrt(gamma_bar/gamma))``: the total log-attenuation at ``gamma``."""
    return math.log(p.A) + 0.5 * (math.log(p.gamma_bar) - math.log(gamma))


def _sr_conv_log_terms(n: np.ndarray, L: float, p: DerivedHopParams) -> np.ndarray:
    """``log[z**k rho2**n L**(k+n) e**(-rho2 L) 1F1(k; k+n+1; (rho2-z) L) / Gamma(k+n+1)]``.

    This is ``rho2**(-1)`` times the density at ``L`` of the sum of a
    Gamma(k, z) and a Gamma(n+1, rho2) variable, with ``rho2**n`` pulled out.
    """
    k, z, r2 = p.k, p.z, p.rho2
    n = np.asarray(n, dtype=float)
    if r2 >= z:
        log_h = -r2 * L + np.log(special.hyp1f1(k, k + n + 1, (r2 - z) * L))
    else:
        log_h = -z * L + np.log(special.hyp1f1(n + 1, k + n + 1, (z - r2) * L))
    if not np.all(np.isfinite(log_h)):
        mp.mp.dps = 30
        vals = []
        for nn in n:
            if r2 >= z:
                vals.append(float(-r2 * L + mp.log(mp.hyp1f1(k, k + nn + 1, (r2 - z) * L))))
            else:
                vals.append(float(-z * L + mp.log(mp.hyp1f1(nn + 1, k + nn + 1, (z - r2) * L))))
        log_h = np.asarray(vals)
    return k * math.log(z) + n * math.log(r2) + (k + n) * math.log(L) + log_h - special.gammaln(k + n + 1)


def _mixture_count(p: DerivedHopParams) -> int:
    K = p.K
    return int(math.ceil(K + 12.0 * math.sqrt(K + 1.0) + 40.0))


def singlehop_sr_cdf(gamma: float, p: DerivedHopParams) -> float:
    """Short-range CDF in closed form.

    With ``h_f = e**-T`` and ``h_p = A e**-V``, the SNR is below ``gamma`` iff
    ``T + V > L``.  ``V`` is a Poisson(K) mixture of Gamma(n+1, rho2) laws, so
    ``P(T+V > L) = Q(k, zL) + sum_m P(T<L, M=m) P(N>=m)`` where ``M`` counts the
    jitter-exponential arrivals in ``[0, L-T]``.
    """
    _require(p, "short-range")
    if not gamma > 0:
        return 0.0
    L = _sr_log_L(gamma, p)
    if L <= 0:
        return 1.0
    nmax = _mixture_count(p)
    m = np.arange(nmax + 1)
    terms = np.exp(_sr_conv_log_terms(m, L, p))
    tail = np.ones(m.size)
    if p.K > 0:
        tail[1:] = special.gammainc(m[1:], p.K)
    else:
        tail[1:] = 0.0
    val = special.gammaincc(p.k, p.z * L) + float(np.dot(terms, tail))
    return min(max(val, 0.0), 1.0)


def singlehop_sr_pdf(gamma: float, p: DerivedHopParams) -> float:
    _require(p, "short-range")
    if not gamma > 0:
        return 0.0
    L = _sr_log_L(gamma, p)
    if L <= 0:
        return 0.0
    nmax = _mixture_count(p)
    n = np.arange(nmax + 1)
    log_pois = -p.K + n * math.log(p.K) - special.gammaln(n + 1) if p.K > 0 else np.where(n == 0, 0.0, -np.inf)
    dens = p.rho2 * float(np.sum(np.exp(log_pois + _sr_conv_log_terms(n, L, p))))
    return dens / (2.0 * gamma)


def _eq22_lower_gamma_scaled(n_max: int, k, m, L):
    """``g_n = m**(-n-k) * lower_gamma(n+k, m L)`` for n = 0..n_max (real for any sign of m)."""
    s = k
    g0 = L**s / s * mp.hyp1f1(s, s + 1, -m * L)
    out = [g0]
    emL = mp.exp(-m * L)
    for n in range(n_max):
        s = n + k
        out.append((s * out[-1] - L**s * emL) / m)
    return out


def _sr_dps(p: DerivedHopParams, L: float, J: int) -> int:
    return int(30 + (abs(p.m) * L + J * math.log(max(2.0, abs(p.m) * L + 2 * J))) / math.log(10))


def singlehop_sr_pdf_series(gamma: float, p: DerivedHopParams, J: int = DEFAULT_J, guard: bool = True) -> float:
    """Short-range PDF from the binomial incomplete-gamma series (extended precision).

    The lower incomplete gamma with argument ``m L`` is taken as its real
    analytic continuation when ``m = z - rho2 < 0``.
    """
    _require(p, "short-range")
    if not gamma > 0:
        return 0.0
    L0 = _sr_log_L(gamma, p)
    if L0 <= 0:
        return 0.0
    Jcap = J + 2 * SERIES_STEP
    with mp.workdps(_sr_dps(p, L0, SERIES_MAX_J if guard else J)):
        k, z, r2, m = (mp.mpf(x) for x in (p.k, p.z, p.rho2, p.m))
        L = mp.mpf(L0)
        c = mp.mpf(p.boresight_series)
        g = _eq22_lower_gamma_scaled(Jcap, k, m, L)

        def term(j):
            if c == 0 and j > 0:
                return mp.mpf(0)
            nonlocal g
            if j >= len(g):
                g = _eq22_lower_gamma_scaled(j + SERIES_STEP, k, m, L)
            inner = mp.fsum(mp.binomial(j, n) * (-1) ** n * L ** (j - n) * g[n] for n in range(j + 1))
            return c**j / mp.factorial(j) ** 2 * inner

        if guard:
            total, _ = _guarded_series_mp(term, J)
        else:
            total = mp.fsum(term(j) for j in range(J))
        y = mp.sqrt(mp.mpf(gamma) / p.gamma_bar)
        pre = z**k * r2 * mp.exp(-p.K) / (2 * mp.gamma(k) * mp.mpf(p.A) ** r2 * mp.sqrt(mp.mpf(gamma) * p.gamma_bar))
        return float(pre * y ** (r2 - 1) * total)


def _guarded_series_mp(term, J: int, rel: float = 1e-12):
    total = mp.fsum(term(j) for j in range(J))
    while J < SERIES_MAX_J:
        extra = mp.fsum(term(j) for j in range(J, J + SERIES_STEP))
        J += SERIES_STEP
        total += extra
        if abs(extra) <= rel * abs(total):
            return total, J
    raise ArithmeticError("incomplete-gamma series did not converge")


def singlehop_sr_cdf_series(gamma: float, p: DerivedHopParams, J: int = DEFAULT_J, guard: bool = True) -> float:
    """Short-range CDF from the double incomplete-gamma series (integer fog shape).

    Terms carry the finite sum over ``l`` that the integration of
    ``lower_gamma(n+k, .)`` produces; only defined for integer ``k``.
    """
    _require(p, "short-range")
    if abs(p.k - round(p.k)) > 1e-12:
        raise ValueError("the incomplete-gamma CDF series requires an integer fog shape k")
    if not gamma > 0:
        return 0.0
    L0 = _sr_log_L(gamma, p)
    if L0 <= 0:
        return 1.0
    kk = int(round(p.k))
    with mp.workdps(_sr_dps(p, L0, SERIES_MAX_J if guard else J)):
        z, r2, m = (mp.mpf(x) for x in (p.z, p.rho2, p.m))
        L = mp.mpf(L0)
        c = mp.mpf(p.boresight_series)
        upper_r, upper_z = {}, {}

        def G(cache, t, rate):
            # Gamma(t, rate L) / rate**t, shared by all (j, n, l) with equal t
            if t not in cache:
                cache[t] = mp.gammainc(t, rate * L) / rate**t
            return cache[t]

        def term(j):
            if c == 0 and j > 0:
                return mp.mpf(0)
            inner = mp.mpf(0)
            for n in range(j + 1):
                s = n + kk
                first = mp.factorial(s - 1) * G(upper_r, j - n + 1, r2)
                second = mp.fsum(m**l / mp.factorial(l) * G(upper_z, j - n + l + 1, z) for l in range(s))
                inner += mp.binomial(j, n) * (-1) ** n * m ** (-s) * (first - mp.factorial(s - 1) * second)
            return c**j / mp.factorial(j) ** 2 * inner

        if guard:
            total, _ = _guarded_series_mp(term, J)
        else:
            total = mp.fsum(term(j) for j in range(J))
        pre = z**kk * r2 * mp.exp(-p.K) / mp.factorial(kk - 1)
        return float(pre * total)


def singlehop_sr_cdf_quadrature(gamma: float, p: DerivedHopParams) -> float:
    """CDF by integrating the closed-form PDF in the log-attenuation variable."""
    from scipy import integrate

    _require(p, "short-range")
    if not gamma > 0:
        return 0.0
    L0 = _sr_log_L(gamma, p)
    if L0 <= 0:
        return 1.0
    # P(S > L0) with S the total log-attenuation; density of S is 2*gamma*pdf
    nmax = _mixture_count(p)
    n = np.arange(nmax + 1)
    log_pois = -p.K + n * math.log(p.K) - special.gammaln(n + 1) if p.K > 0 else np.where(n == 0, 0.0, -np.inf)

    def dens(L):
        return p.rho2 * float(np.sum(np.exp(log_pois + _sr_conv_log_terms(n, L, p))))

    val, _ = integrate.quad(dens, L0, np.inf, epsabs=0.0, epsrel=1e-11, limit=400)
    return min(max(val, 0.0), 1.0)
