# src/engine/experiments.py
import csv
import io
import math
import time
from collections import Counter
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import orjson
import scipy
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy import stats
from tqdm import tqdm

from src import __version__
from src.engine.analysis import ab_cycle_spectrum, is_almost_malnormal, is_finite_index, simple_ab_cycles
from src.engine.oracle import EnumMode, ExhaustiveOracle
from src.engine.sampler import GraphSampler
from src.engine.silhouette import silhouette
from src.utils.config import get_settings
from src.utils.errors import InvalidInputError
from src.utils.graph_io import encode
from src.utils.log import LogMixin

SAMPLER_CODES = {"cyc": 0, "rooted": 1, "silh": 2}
BATCH_SIZE = 250

# threshold sources
ASYMPTOTIC = "asymptotic"
CALIBRATED = "calibrated"
EXACT = "exact"


class ExperimentKind(str, Enum):
    SILHOUETTE_SIZE = "silhouette-size"
    SMALL_AB_CYCLES = "small-ab-cycles"
    PARABOLICITY = "parabolicity"
    MALNORMALITY = "malnormality"
    CONNECTIVITY = "connectivity"


def _to_fraction(v: Any) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**6)
    return Fraction(str(v).strip())


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        populate_by_name=True,
        alias_generator=lambda s: s.replace("_", "-"),
    )

    experiment: ExperimentKind
    sizes: List[int]
    samples_per_size: int = Field(default=1000, ge=100)
    alpha_exponent: Fraction = Fraction(1, 7)
    mu: Fraction = Fraction(1)
    master_seed: int = Field(default=0, ge=0, lt=1 << 64)

    @field_validator("sizes")
    @classmethod
    def _sizes(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("at least one size is required")
        if any(n < 1 for n in v):
            raise ValueError("sizes must be positive")
        if list(v) != sorted(v):
            raise ValueError("sizes must be sorted ascending")
        return list(v)

    @field_validator("alpha_exponent", mode="before")
    @classmethod
    def _alpha(cls, v: Any) -> Fraction:
        f = _to_fraction(v)
        if not 0 < f < Fraction(1, 6):
            raise ValueError("alpha-exponent must lie in (0, 1/6)")
        return f

    @field_validator("mu", mode="before")
    @classmethod
    def _mu(cls, v: Any) -> Fraction:
        f = _to_fraction(v)
        if f <= 0:
            raise ValueError("mu must be positive")
        return f

    @classmethod
    def from_json(cls, raw: Any) -> "ExperimentConfig":
        """Parse a JSON config; MODGROUP_SEED, when set, replaces master-seed."""
        data = orjson.loads(raw) if isinstance(raw, (bytes, str)) else dict(raw)
        cfg = cls.model_validate(data)
        seed = get_settings().master_seed(cfg.master_seed)
        return cfg.model_copy(update={"master_seed": seed})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment.value,
            "sizes": list(self.sizes),
            "samples-per-size": self.samples_per_size,
            "alpha-exponent": str(self.alpha_exponent),
            "mu": str(self.mu),
            "master-seed": self.master_seed,
        }


REPORT_COLUMNS = (
    "experiment",
    "sampler",
    "n",
    "samples",
    "statistic",
    "estimate",
    "stderr",
    "threshold",
    "source",
    "approximate",
)


class ExperimentReport(BaseModel):
    rows: List[Dict[str, Any]]
    config: Dict[str, Any]
    wall_clock: float = 0.0
    versions: Dict[str, str] = Field(default_factory=dict)

    def to_csv(self) -> str:
        """Rows only; wall-clock stays out so equal configs give equal bytes."""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(row.get(k)) for k in REPORT_COLUMNS})
        return buf.getvalue()

    def plot_data(self) -> str:
        """(n, frequency, stderr) triples per sampler and statistic."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["sampler", "statistic", "n", "frequency", "stderr"])
        for row in self.rows:
            if row.get("stderr") is None:
                continue
            writer.writerow([row["sampler"], row["statistic"], row["n"], _fmt(row["estimate"]), _fmt(row["stderr"])])
        return buf.getvalue()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "success": True,
            "config": self.config,
            "rows": self.rows,
            "wall_clock": self.wall_clock,
            "versions": self.versions,
        }


def _fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


# ===================== Small helpers =====================

def small_cycle_bound(n: int, alpha: Fraction) -> int:
    """⌊n^α⌋, from exp(α ln n) and corrected with exact integer powers."""
    alpha = Fraction(alpha)
    p, q = alpha.numerator, alpha.denominator
    m = int(math.floor(math.exp(float(alpha) * math.log(n)))) if n > 1 else 1
    m = max(m, 1)
    while (m + 1) ** q <= n ** p:
        m += 1
    while m > 1 and m ** q > n ** p:
        m -= 1
    return m


def frequency(flags: Sequence[bool]) -> Tuple[float, float]:
    arr = np.asarray(flags, dtype=np.float64)
    if arr.size == 0:
        return 0.0, 0.0
    p = float(arr.mean())
    return p, math.sqrt(p * (1.0 - p) / arr.size)


def mean_with_error(values: Sequence[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        return float(arr.mean()) if arr.size else 0.0, 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def decreasing_within(rows: Sequence[Dict[str, Any]], sigma: float = 3.0) -> bool:
    """Each estimate stays below the previous one up to ``sigma`` joint standard errors."""
    for a, b in zip(rows, rows[1:]):
        slack = sigma * math.hypot(a["stderr"] or 0.0, b["stderr"] or 0.0)
        rise = b["estimate"] - a["estimate"]
        if rise >= slack if slack > 0 else rise >= 0:
            return False
    return True


# ===================== Sample workers (top level for joblib) =====================

def _draw(sampler: GraphSampler, code: str, n: int):
    return sampler.sample(code, n)


def _size_batch(seed: int, n: int, code: str, lo: int, hi: int, params: Dict[str, Any]) -> List[Tuple]:
    out = []
    for i in range(lo, hi):
        s = GraphSampler(seed, n, SAMPLER_CODES[code], i)
        g = _draw(s, code, n)
        out.append((silhouette(g).n, s.approximate))
    return out


def _cycle_batch(seed: int, n: int, code: str, lo: int, hi: int, params: Dict[str, Any]) -> List[Tuple]:
    bound = params["bound"]
    out = []
    for i in range(lo, hi):
        s = GraphSampler(seed, n, SAMPLER_CODES[code], i)
        g = _draw(s, code, n)
        spectrum = ab_cycle_spectrum(g)
        small = any(2 <= m <= bound for m in spectrum)
        simple = None
        if code == "silh":
            simple = any(2 <= m <= bound for m in simple_ab_cycles(g))
        out.append((small, simple, s.approximate))
    return out


def _property_batch(seed: int, n: int, code: str, lo: int, hi: int, params: Dict[str, Any]) -> List[Tuple]:
    bound = params["bound"]
    malnormality = params["malnormality"]
    out = []
    for i in range(lo, hi):
        s = GraphSampler(seed, n, SAMPLER_CODES[code], i)
        g = _draw(s, code, n)
        spectrum = ab_cycle_spectrum(g)
        non_parabolic = not spectrum
        small = any(2 <= m <= bound for m in spectrum)
        malnormal = finite = conflict = None
        if malnormality:
            malnormal = is_almost_malnormal(g).almost_malnormal
            index = is_finite_index(g)
            finite = index is not None and index >= 2
            conflict = malnormal and any(m >= 2 for m in spectrum)
        out.append((non_parabolic, small, malnormal, finite, conflict, s.approximate))
    return out


def _connectivity_batch(seed: int, n: int, code: str, lo: int, hi: int, params: Dict[str, Any]) -> List[Tuple]:
    out = []
    for i in range(lo, hi):
        _, _, connected = GraphSampler(seed, n, SAMPLER_CODES[code], i).sample_silhouette_pair(n)
        out.append((connected,))
    return out


def _category_batch(seed: int, n: int, code: str, lo: int, hi: int, params: Dict[str, Any]) -> List[Tuple]:
    return [(encode(_draw(GraphSampler(seed, n, SAMPLER_CODES[code], i), code, n)),) for i in range(lo, hi)]


# ===================== Harness =====================

class ExperimentHarness(LogMixin):
    """
    Runs one experiment over its sizes and samplers. Sample i of size n from
    sampler c is always drawn from the seed key (n, c, i); batches are merged
    in index order whatever the number of workers.
    """

    _log_prefix = "[Harness]"

    def __init__(self, threads: Optional[int] = None, progress: bool = False, debug: bool = False):
        self.threads = threads or get_settings().threads
        self.progress = progress
        self.debug = debug

    def collect(
        self,
        worker: Callable,
        seed: int,
        n: int,
        code: str,
        samples: int,
        params: Optional[Dict[str, Any]] = None,
    ) -> List[Tuple]:
        params = params or {}
        bounds = [(lo, min(lo + BATCH_SIZE, samples)) for lo in range(0, samples, BATCH_SIZE)]
        if self.threads > 1:
            jobs = Parallel(n_jobs=self.threads, return_as="generator")(
                delayed(worker)(seed, n, code, lo, hi, params) for lo, hi in bounds
            )
        else:
            jobs = (worker(seed, n, code, lo, hi, params) for lo, hi in bounds)
        out: List[Tuple] = []
        for part in tqdm(jobs, total=len(bounds), disable=not self.progress, desc=f"{code} n={n}"):
            out.extend(part)
        self._log(f"{code} n={n}: {len(out)} samples")
        return out

    @staticmethod
    def _row(cfg: ExperimentConfig, sampler: str, n: int, samples: int, statistic: str, estimate, stderr=None,
             threshold=None, source=None, approximate=False) -> Dict[str, Any]:
        return {
            "experiment": cfg.experiment.value,
            "sampler": sampler,
            "n": n,
            "samples": samples,
            "statistic": statistic,
            "estimate": estimate,
            "stderr": stderr,
            "threshold": threshold,
            "source": source,
            "approximate": approximate,
        }

    # -----------------
    # Experiments
    # -----------------
    def silhouette_size(self, cfg: ExperimentConfig) -> List[Dict[str, Any]]:
        rows = []
        mu = float(cfg.mu)
        for n in cfg.sizes:
            for code in ("cyc", "rooted"):
                if code == "rooted" and n < 2:
                    continue
                res = self.collect(_size_batch, cfg.master_seed, n, code, cfg.samples_per_size)
                sizes = np.asarray([r[0] for r in res], dtype=np.int64)
                approx = any(r[1] for r in res)
                deficit = n - sizes
                n23 = n ** (2.0 / 3.0)
                cut = n - (2.0 + mu) * n23
                m, e = mean_with_error(sizes)
                dm, de = mean_with_error(deficit)
                tail, tail_e = frequency(sizes < cut)
                k = len(res)
                rows.append(self._row(cfg, code, n, k, "mean_size", m, e, approximate=approx))
                rows.append(self._row(cfg, code, n, k, "mean_deficit", dm, de, 2.5 * n23, CALIBRATED, approx))
                for q in (0.5, 0.9, 0.99):
                    rows.append(self._row(cfg, code, n, k, f"deficit_q{int(q * 100)}",
                                          float(np.quantile(deficit, q)), approximate=approx))
                rows.append(self._row(cfg, code, n, k, "tail_frequency", tail, tail_e, 0.01, CALIBRATED, approx))
        return rows

    def small_ab_cycles(self, cfg: ExperimentConfig) -> List[Dict[str, Any]]:
        rows = []
        for n in cfg.sizes:
            bound = small_cycle_bound(n, cfg.alpha_exponent)
            codes = (["silh"] if n % 6 == 0 else []) + ["cyc"] + (["rooted"] if n >= 2 else [])
            for code in codes:
                res = self.collect(_cycle_batch, cfg.master_seed, n, code, cfg.samples_per_size, {"bound": bound})
                approx = any(r[2] for r in res)
                p, e = frequency([not r[0] for r in res])
                threshold = 0.25 if code == "silh" else None
                rows.append(self._row(cfg, code, n, len(res), "no_small_ab_cycle", p, e, threshold,
                                      CALIBRATED if threshold is not None else None, approx))
                if code == "silh":
                    ps, es = frequency([not r[1] for r in res])
                    rows.append(self._row(cfg, code, n, len(res), "no_small_simple_ab_cycle", ps, es,
                                          approximate=approx))
                rows.append(self._row(cfg, code, n, len(res), "cycle_bound", bound, source=EXACT))
        return rows

    def property_frequencies(self, cfg: ExperimentConfig) -> List[Dict[str, Any]]:
        malnormality = cfg.experiment is ExperimentKind.MALNORMALITY
        rows = []
        for n in cfg.sizes:
            bound = small_cycle_bound(n, cfg.alpha_exponent)
            for code in ("rooted", "cyc"):
                if code == "rooted" and n < 2:
                    continue
                params = {"bound": bound, "malnormality": malnormality}
                res = self.collect(_property_batch, cfg.master_seed, n, code, cfg.samples_per_size, params)
                approx = any(r[5] for r in res)
                k = len(res)
                p, e = frequency([r[0] for r in res])
                q, qe = frequency([not r[1] for r in res])
                rows.append(self._row(cfg, code, n, k, "non_parabolic", p, e, approximate=approx))
                rows.append(self._row(cfg, code, n, k, "no_small_ab_cycle", q, qe, approximate=approx))
                if malnormality:
                    mp, me = frequency([r[2] for r in res])
                    threshold = 0.1 if n >= 1000 else None
                    rows.append(self._row(cfg, code, n, k, "almost_malnormal", mp, me, threshold,
                                          CALIBRATED if threshold is not None else None, approx))
                    finite_bad = sum(1 for r in res if r[3] and r[2])
                    rows.append(self._row(cfg, code, n, k, "finite_index_malnormal", finite_bad, threshold=0, source=EXACT))
                    conflicts = sum(1 for r in res if r[4])
                    rows.append(self._row(cfg, code, n, k, "ab_cycle_malnormal", conflicts, threshold=0, source=EXACT))
        return rows

    def connectivity(self, cfg: ExperimentConfig) -> List[Dict[str, Any]]:
        rows = []
        for n in cfg.sizes:
            if n % 6:
                raise InvalidInputError(f"silhouette size must be a positive multiple of 6, got {n}")
            res = self.collect(_connectivity_batch, cfg.master_seed, n, "silh", cfg.samples_per_size)
            p, e = frequency([not r[0] for r in res])
            rows.append(self._row(cfg, "silh", n, len(res), "disconnected", p, e, 5.0 / (6.0 * n), ASYMPTOTIC))
        return rows

    def run(self, cfg: ExperimentConfig) -> ExperimentReport:
        start = time.perf_counter()
        kind = cfg.experiment
        if kind is ExperimentKind.SILHOUETTE_SIZE:
            rows = self.silhouette_size(cfg)
        elif kind is ExperimentKind.SMALL_AB_CYCLES:
            rows = self.small_ab_cycles(cfg)
        elif kind is ExperimentKind.CONNECTIVITY:
            rows = self.connectivity(cfg)
        else:
            rows = self.property_frequencies(cfg)
        return ExperimentReport(
            rows=rows,
            config=cfg.to_dict(),
            wall_clock=time.perf_counter() - start,
            versions={"modular-silhouettes": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        )

    # -----------------
    # Sampler uniformity
    # -----------------
    def chi_square_uniformity(self, code: str, n: int, samples: int, seed: int) -> Dict[str, Any]:
        """Goodness of fit of a sampler against the full enumeration of its class."""
        mode = {"cyc": EnumMode.CYCLICALLY_REDUCED, "rooted": EnumMode.REDUCED_ROOTED, "silh": EnumMode.SILHOUETTE}[code]
        support = [encode(g) for g in ExhaustiveOracle(threads=1).enumerate_graphs(n, mode)]
        counts = Counter(r[0] for r in self.collect(_category_batch, seed, n, code, samples))
        stray = set(counts) - set(support)
        if stray:
            raise InvalidInputError(f"{len(stray)} sampled graph(s) outside the enumerated class")
        observed = np.asarray([counts.get(k, 0) for k in support], dtype=np.float64)
        stat, pvalue = stats.chisquare(observed)
        return {
            "success": True,
            "sampler": code,
            "n": n,
            "samples": samples,
            "categories": len(support),
            "statistic": float(stat),
            "pvalue": float(pvalue),
        }


# ===================== Module-level shortcuts =====================

def run_silhouette_size(cfg: ExperimentConfig) -> ExperimentReport:
    return ExperimentHarness().run(cfg.model_copy(update={"experiment": ExperimentKind.SILHOUETTE_SIZE}))


def run_small_ab_cycles(cfg: ExperimentConfig) -> ExperimentReport:
    return ExperimentHarness().run(cfg.model_copy(update={"experiment": ExperimentKind.SMALL_AB_CYCLES}))


def run_property_frequencies(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.experiment not in (ExperimentKind.PARABOLICITY, ExperimentKind.MALNORMALITY):
        raise InvalidInputError("property frequencies need experiment parabolicity or malnormality")
    return ExperimentHarness().run(cfg)


def run_connectivity(cfg: ExperimentConfig) -> ExperimentReport:
    return ExperimentHarness().run(cfg.model_copy(update={"experiment": ExperimentKind.CONNECTIVITY}))


def run_experiment(cfg: ExperimentConfig, threads: Optional[int] = None, progress: bool = False) -> ExperimentReport:
    return ExperimentHarness(threads=threads, progress=progress).run(cfg)


def chi_square_uniformity(code: str, n: int, samples: int, seed: int = 0) -> Dict[str, Any]:
    return ExperimentHarness().chi_square_uniformity(code, n, samples, seed)
