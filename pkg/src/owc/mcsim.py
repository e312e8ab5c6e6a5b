"""Monte-Carlo reference estimates for outage and error rate.

Draws are organised in independent Philox streams keyed by ``(seed, stream)``;
each stream is consumed in fixed-size chunks and partial sums are combined in
stream order, so results do not depend on thread scheduling.  Channel gains do
not depend on transmit power, hence equal seeds give common random numbers
across power points as well as across the exact/bound targets.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import interpolate, special, stats

from .analytics import MultihopSpec, bound_e2e_snr, exact_e2e_snr, multihop_distribution
from .channels import (
    DerivedHopParams,
    channel_gain_sample,
    fog_cdf,
    fog_sample,
    pointing_cdf,
    pointing_sample,
    turb_cdf,
    turb_sample,
)
from .metrics import ModulationParams

TARGETS = ("exact", "bound", "both")
CHUNK = 1 << 16


@dataclass(frozen=True)
class MCConfig:
    samples: int = 10**6
    seed: int = 20240601
    streams: int = 4
    target: str = "both"
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1000:
            raise ValueError("samples must be at least 1000")
        if self.streams < 1:
            raise ValueError("streams must be at least 1")
        if self.target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def targets(self) -> tuple[str, ...]:
        return ("exact", "bound") if self.target == "both" else (self.target,)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int
    target: str


@dataclass
class MCReport:
    """Estimates keyed by ``(metric, threshold_or_None, target)``."""

    estimates: dict
    n: int
    violations: int = 0

    def op(self, gamma_th: float, target: str = "bound") -> MCEstimate:
        return self.estimates[("op", float(gamma_th), target)]

    def aber(self, target: str = "bound") -> MCEstimate:
        return self.estimates[("aber", None, target)]


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _stream_sizes(mc: MCConfig) -> list[int]:
    base, extra = divmod(mc.samples, mc.streams)
    return [base + (s < extra) for s in range(mc.streams)]


def _hop_snr_chunks(rng, params: Sequence[DerivedHopParams], n: int):
    """Yield arrays of shape (N, m) of per-hop SNR draws, chunk by chunk."""
    done = 0
    while done < n:
        m = min(CHUNK, n - done)
        g = np.empty((len(params), m))
        for i, p in enumerate(params):
            h = channel_gain_sample(rng, p, m)
            g[i] = p.gamma_bar * h * h
        done += m
        yield g


def _run_stream(spec: MultihopSpec, mc: MCConfig, stream: int, n: int, thresholds, mod):
    rng = stream_rng(mc.seed, stream)
    sums = {}
    violations = 0
    for g in _hop_snr_chunks(rng, spec.params, n):
        snr = {}
        if "exact" in mc.targets:
            snr["exact"] = exact_e2e_snr(g, spec.gains, spec.exact_form)
        if "bound" in mc.targets:
            snr["bound"] = bound_e2e_snr(g, spec.gains, spec.bound_variant)
        if spec.bound_variant == "amgm" and len(snr) == 2:
            violations += int(np.count_nonzero(snr["bound"] < snr["exact"] * (1 - 1e-12)))
        for tgt, x in snr.items():
            for th in thresholds:
                key = ("op", th, tgt)
                c = int(np.count_nonzero(x < th))
                s1, s2 = sums.get(key, (0.0, 0.0))
                sums[key] = (s1 + c, s2 + c)
            if mod is not None:
                pe = special.gammaincc(mod.p, mod.q * x) / 2.0
                key = ("aber", None, tgt)
                s1, s2 = sums.get(key, (0.0, 0.0))
                sums[key] = (s1 + math.fsum(pe), s2 + math.fsum(pe * pe))
    return sums, violations


def mc_evaluate(spec: MultihopSpec, mc: MCConfig, thresholds: Iterable[float] = (), mod: ModulationParams | None = None) -> MCReport:
    """Outage at each threshold and/or ABER from one shared set of draws."""
    thresholds = tuple(float(t) for t in thresholds)
    sizes = _stream_sizes(mc)
    jobs = list(enumerate(sizes))
    if mc.workers > 1:
        with ThreadPoolExecutor(mc.workers) as ex:
            parts = list(ex.map(lambda job: _run_stream(spec, mc, job[0], job[1], thresholds, mod), jobs))
    else:
        parts = [_run_stream(spec, mc, s, n, thresholds, mod) for s, n in jobs]
    n = sum(sizes)
    estimates = {}
    keys = parts[0][0].keys()
    for key in keys:
        s1 = sum(p[0][key][0] for p in parts)
        s2 = sum(p[0][key][1] for p in parts)
        mean = s1 / n
        var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
        estimates[key] = MCEstimate(mean, math.sqrt(var / n), n, key[2])
    return MCReport(estimates, n, sum(p[1] for p in parts))


def mc_outage(spec: MultihopSpec, gamma_th: float, mc: MCConfig) -> dict[str, MCEstimate]:
    rep = mc_evaluate(spec, mc, thresholds=(gamma_th,))
    return {t: rep.op(gamma_th, t) for t in mc.targets}


def mc_aber(spec: MultihopSpec, mod: ModulationParams, mc: MCConfig) -> dict[str, MCEstimate]:
    rep = mc_evaluate(spec, mc, mod=mod)
    return {t: rep.aber(t) for t in mc.targets}


# ------------------------------------------------------------ goodness of fit
@dataclass(frozen=True)
class KSResult:
    statistic: float
    pvalue: float
    n: int


def _ks(sample, cdf) -> KSResult:
    r = stats.kstest(sample, cdf)
    return KSResult(float(r.statistic), float(r.pvalue), len(sample))


def _tabulated_cdf(cdf, lo: float, hi: float, points: int = 240):
    """Monotone interpolant of an expensive CDF on a log grid."""
    xs = np.geomspace(lo, hi, points)
    ys = np.maximum.accumulate(np.array([cdf(x) for x in xs]))
    f = interpolate.PchipInterpolator(np.log(xs), ys, extrapolate=False)

    def out(x):
        x = np.asarray(x, dtype=float)
        v = f(np.log(np.clip(x, lo, hi)))
        return np.where(x <= lo, ys[0], np.where(x >= hi, ys[-1], v))

    return out


def mc_distribution_check(obj, n: int = 10**5, seed: int = 7) -> dict[str, KSResult]:
    """KS tests of each channel sampler against its analytic CDF.

    ``obj`` is a :class:`DerivedHopParams` (per-channel tests) or a
    :class:`MultihopSpec` (additionally tests the bound SNR against the
    analytic bound CDF, tabulated on a log grid).
    """
    out = {}
    params = obj.params if isinstance(obj, MultihopSpec) else (obj,)
    for i, p in enumerate(params):
        rng = stream_rng(seed, i)
        out[f"hop{i}.fog"] = _ks(fog_sample(rng, p, n), lambda x, p=p: fog_cdf(x, p))
        out[f"hop{i}.pointing"] = _ks(pointing_sample(rng, p, n), lambda x, p=p: pointing_cdf(x, p))
        if p.long_range:
            out[f"hop{i}.turbulence"] = _ks(turb_sample(rng, p, n), lambda x, p=p: turb_cdf(x, p))
    if isinstance(obj, MultihopSpec):
        rng = stream_rng(seed, 10_000)
        snr = bound_e2e_snr(next(_hop_snr_chunks(rng, obj.params, n)) if n <= CHUNK else _draw_all(rng, obj, n), obj.gains, obj.bound_variant)
        d = multihop_distribution(obj)
        lo, hi = np.quantile(snr, [1e-6, 1 - 1e-6])
        hi = min(hi * 1.5, d.support_upper)
        out["bound_snr"] = _ks(snr, _tabulated_cdf(d.cdf, lo / 2, hi))
    return out


def _draw_all(rng, spec: MultihopSpec, n: int) -> np.ndarray:
    return np.concatenate(list(_hop_snr_chunks(rng, spec.params, n)), axis=1)
