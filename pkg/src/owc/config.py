"""Run configuration (TOML) and channel presets.

See ``docs/config.md`` for the grammar.  Unknown keys are rejected.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .analytics import BOUND_VARIANTS, EXACT_FORMS, MultihopSpec
from .channels import REGIMES, HopConfig
from .mcsim import MCConfig
from .metrics import MODULATION_PRESETS, ModulationParams

FOG_PRESETS = {
    "light-fog": (2.32, 13.12),
    "moderate-fog": (5.49, 12.06),
    "dense-fog": (6.00, 23.00),
}

TURBULENCE_PRESETS = {
    "weak-turbulence": (4.5916, 7.0941),
    "moderate-turbulence": (2.3378, 4.5323),
    "strong-turbulence": (1.4321, 3.4948),
}

DEFAULT_DISTANCE_KM = {"long-range": 1.5, "short-range": 1.0}

METRICS = ("op", "aber", "asymptote", "mc")
SWEEP_VARIABLES = ("power-dbm", "hop-count")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending section/field."""


# keys accepted in [hop] and [[hops]] blocks
HOP_KEYS = {
    "fog",
    "turbulence",
    "distance_km",
    "fog_k",
    "fog_beta",
    "aperture_radius",
    "beam_ratio",
    "beam_waist",
    "jitter_std",
    "mu_x",
    "mu_y",
    "turb_a",
    "turb_b",
    "responsivity",
    "noise_var",
    "gamma_bar",
}

SECTION_KEYS = {
    "system": {"regime", "hops", "bound_variant", "exact_form", "gains", "total_distance_km"},
    "hop": HOP_KEYS,
    "hops": HOP_KEYS,
    "sweep": {"variable", "start", "stop", "step", "power_dbm"},
    "metrics": {"compute", "thresholds_db", "modulation", "p", "q", "series_terms"},
    "mc": {"samples", "seed", "streams"},
    "output": {"path"},
}


@dataclass(frozen=True)
class SweepConfig:
    variable: str = "power-dbm"
    start: float = 0.0
    stop: float = 40.0
    step: float = 10.0
    power_dbm: float = 10.0

    def points(self) -> list[float]:
        n = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        pts = [self.start + i * self.step for i in range(n)]
        if self.variable == "hop-count":
            return [float(int(round(v))) for v in pts]
        return pts


@dataclass(frozen=True)
class RunConfig:
    regime: str = "short-range"
    n_hops: int = 1
    bound_variant: str = "paper-eq4"
    exact_form: str = "printed"
    gains: tuple[float, ...] | None = None
    total_distance_km: float | None = None
    hop_template: dict = field(default_factory=dict)
    hop_list: tuple[dict, ...] = ()
    sweep: SweepConfig = SweepConfig()
    metrics: tuple[str, ...] = ("op",)
    thresholds_db: tuple[float, ...] = (10.0,)
    modulation: ModulationParams = ModulationParams(0.5, 0.5)
    series_terms: int = 20
    mc: MCConfig = MCConfig()
    output: str = "results.csv"

    # ------------------------------------------------------------- building
    def _hop(self, block: dict, power_dbm: float, distance_km: float) -> HopConfig:
        kw: dict[str, Any] = {"regime": self.regime, "power_dbm": power_dbm, "distance_km": distance_km}
        merged = {**self.hop_template, **block}
        if "fog" in merged:
            kw["fog_k"], kw["fog_beta"] = FOG_PRESETS[merged["fog"]]
        if "turbulence" in merged:
            kw["turb_a"], kw["turb_b"] = TURBULENCE_PRESETS[merged["turbulence"]]
        for key, val in merged.items():
            if key in ("fog", "turbulence", "beam_ratio"):
                continue
            kw[key] = val
        a_r = kw.get("aperture_radius", 0.05)
        if "beam_ratio" in merged and "beam_waist" not in merged:
            kw["beam_waist"] = merged["beam_ratio"] * a_r
        return HopConfig(**kw)

    def hops_for(self, power_dbm: float, n_hops: int) -> list[HopConfig]:
        if self.hop_list:
            if n_hops > len(self.hop_list):
                raise ConfigError(f"{n_hops} hops requested but only {len(self.hop_list)} listed in [[hops]]")
            blocks = self.hop_list[:n_hops]
        else:
            blocks = [{}] * n_hops
        # per-hop distance: explicit value, else an equal split of the total
        # (for hop-count sweeps a template distance is the total path length)
        tmpl_d = self.hop_template.get("distance_km")
        if self.total_distance_km is not None:
            split = self.total_distance_km / n_hops
        elif tmpl_d is not None:
            split = tmpl_d / n_hops if self.sweep.variable == "hop-count" else tmpl_d
        else:
            split = DEFAULT_DISTANCE_KM[self.regime] / n_hops
        hops = []
        for b in blocks:
            d = b.get("distance_km", split)
            hops.append(self._hop({**b, "distance_km": d}, power_dbm, d))
        return hops

    def spec_at(self, x: float) -> MultihopSpec:
        """System at sweep value ``x`` (power in dBm or hop count)."""
        if self.sweep.variable == "power-dbm":
            power, n = x, self.n_hops
        else:
            power, n = self.sweep.power_dbm, int(x)
        gains = self.gains if (self.gains is not None and len(self.gains) == n) else None
        if self.gains is not None and gains is None:
            raise ConfigError(f"system.gains has {len(self.gains)} entries but the system has {n} hops")
        return MultihopSpec(tuple(self.hops_for(power, n)), gains, self.bound_variant, self.exact_form)


def _check_keys(section: str, table: dict, allowed: set, where: str | None = None):
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown field '{key}' in [{where or section}]")


def _num(table, key, where, kind=float, positive=False):
    val = table[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"[{where}] {key} must be a number, got {val!r}")
    if kind is int:
        if float(val) != int(val):
            raise ConfigError(f"[{where}] {key} must be an integer, got {val!r}")
        val = int(val)
    else:
        val = float(val)
    if positive and not val > 0:
        raise ConfigError(f"[{where}] {key} must be positive, got {val!r}")
    return val


def _hop_block(table: dict, where: str) -> dict:
    _check_keys("hop", table, HOP_KEYS, where)
    out = {}
    for key, val in table.items():
        if key == "fog":
            if val not in FOG_PRESETS:
                raise ConfigError(f"[{where}] unknown fog preset {val!r}; choose from {sorted(FOG_PRESETS)}")
            out[key] = val
        elif key == "turbulence":
            if val not in TURBULENCE_PRESETS:
                raise ConfigError(f"[{where}] unknown turbulence preset {val!r}; choose from {sorted(TURBULENCE_PRESETS)}")
            out[key] = val
        else:
            out[key] = _num(table, key, where)
    return out


def parse_config(text: str, base: Path | None = None) -> RunConfig:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from None
    for key in data:
        if key not in SECTION_KEYS:
            raise ConfigError(f"unknown section [{key}]")
    kw: dict[str, Any] = {}

    sysd = data.get("system", {})
    _check_keys("system", sysd, SECTION_KEYS["system"])
    regime = sysd.get("regime", "short-range")
    if regime not in REGIMES:
        raise ConfigError(f"[system] regime must be one of {REGIMES}, got {regime!r}")
    kw["regime"] = regime
    if "hops" in sysd:
        kw["n_hops"] = _num(sysd, "hops", "system", int, positive=True)
    bv = sysd.get("bound_variant", "paper-eq4")
    if bv not in BOUND_VARIANTS:
        raise ConfigError(f"[system] bound_variant must be one of {BOUND_VARIANTS}")
    kw["bound_variant"] = bv
    ef = sysd.get("exact_form", "printed")
    if ef not in EXACT_FORMS:
        raise ConfigError(f"[system] exact_form must be one of {EXACT_FORMS}")
    kw["exact_form"] = ef
    if "gains" in sysd:
        g = sysd["gains"]
        if not isinstance(g, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in g):
            raise ConfigError("[system] gains must be a list of numbers")
        kw["gains"] = tuple(float(v) for v in g)
    if "total_distance_km" in sysd:
        kw["total_distance_km"] = _num(sysd, "total_distance_km", "system", positive=True)

    if "hop" in data:
        kw["hop_template"] = _hop_block(data["hop"], "hop")
    if "hops" in data:
        if not isinstance(data["hops"], list):
            raise ConfigError("[[hops]] must be an array of tables")
        kw["hop_list"] = tuple(_hop_block(t, f"hops.{i}") for i, t in enumerate(data["hops"]))
        if "n_hops" in kw and kw["n_hops"] != len(kw["hop_list"]):
            raise ConfigError(f"[system] hops = {kw['n_hops']} but {len(kw['hop_list'])} [[hops]] blocks given")
        kw.setdefault("n_hops", len(kw["hop_list"]))

    sw = data.get("sweep", {})
    _check_keys("sweep", sw, SECTION_KEYS["sweep"])
    swkw = {}
    var = sw.get("variable", "power-dbm")
    if var not in SWEEP_VARIABLES:
        raise ConfigError(f"[sweep] variable must be one of {SWEEP_VARIABLES}, got {var!r}")
    swkw["variable"] = var
    for key in ("start", "stop", "step", "power_dbm"):
        if key in sw:
            swkw[key] = _num(sw, key, "sweep")
    if var == "hop-count":
        swkw.setdefault("start", 1.0)
        swkw.setdefault("stop", 5.0)
        swkw.setdefault("step", 1.0)
    sweep = SweepConfig(**swkw)
    if not sweep.step > 0:
        raise ConfigError("[sweep] step must be positive")
    if sweep.stop < sweep.start:
        raise ConfigError("[sweep] empty range: stop < start")
    if var == "hop-count":
        if sweep.start < 1 or any(p != int(p) for p in (sweep.start, sweep.step)):
            raise ConfigError("[sweep] hop-count range must use positive integers")
        if "n_hops" in kw and "hop_list" not in kw:
            raise ConfigError("[system] hops conflicts with a hop-count sweep")
    kw["sweep"] = sweep

    md = data.get("metrics", {})
    _check_keys("metrics", md, SECTION_KEYS["metrics"])
    compute = md.get("compute", ["op"])
    if not isinstance(compute, list):
        raise ConfigError("[metrics] compute must be a list")
    if not compute:
        raise ConfigError("[metrics] compute is empty: request at least one of " + ", ".join(METRICS))
    for m in compute:
        if m not in METRICS:
            raise ConfigError(f"[metrics] unknown metric {m!r}; choose from {METRICS}")
    kw["metrics"] = tuple(m for m in METRICS if m in compute)
    if "thresholds_db" in md:
        th = md["thresholds_db"]
        if not isinstance(th, list) or not th or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in th):
            raise ConfigError("[metrics] thresholds_db must be a non-empty list of numbers")
        kw["thresholds_db"] = tuple(float(v) for v in th)
    if "p" in md or "q" in md:
        if "modulation" in md:
            raise ConfigError("[metrics] give either modulation or (p, q), not both")
        if not ("p" in md and "q" in md):
            raise ConfigError("[metrics] p and q must be given together")
        kw["modulation"] = ModulationParams(_num(md, "p", "metrics", positive=True), _num(md, "q", "metrics", positive=True))
    elif "modulation" in md:
        name = md["modulation"]
        if name not in MODULATION_PRESETS:
            raise ConfigError(f"[metrics] unknown modulation preset {name!r}; choose from {sorted(MODULATION_PRESETS)}")
        kw["modulation"] = ModulationParams.preset(name)
    if "series_terms" in md:
        kw["series_terms"] = _num(md, "series_terms", "metrics", int, positive=True)

    mcd = data.get("mc", {})
    _check_keys("mc", mcd, SECTION_KEYS["mc"])
    mckw = {}
    for key in ("samples", "seed", "streams"):
        if key in mcd:
            mckw[key] = _num(mcd, key, "mc", int)
    try:
        kw["mc"] = MCConfig(**mckw)
    except ValueError as exc:
        raise ConfigError(f"[mc] {exc}") from None

    out = data.get("output", {})
    _check_keys("output", out, SECTION_KEYS["output"])
    if "path" in out:
        if not isinstance(out["path"], str):
            raise ConfigError("[output] path must be a string")
        p = Path(out["path"])
        kw["output"] = str(p if p.is_absolute() or base is None else base / p)

    cfg = RunConfig(**kw)
    # validate every hop once so bad physical values are reported at parse time
    try:
        for x in (cfg.sweep.points()[0], cfg.sweep.points()[-1]):
            cfg.spec_at(x)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid hop parameters: {exc}") from None
    return cfg


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text, base=path.parent)
