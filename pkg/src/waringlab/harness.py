"""Experiment orchestration: sampled subsets, coverage, reports.

All randomness flows through numpy's PCG64 keyed by the config seed,
so a config fully determines its report. Reports serialize to JSON
with sorted keys; wall time is the one field excluded when byte
determinism is wanted (include_timing=False).
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from . import __version__
from .convolve import booleanize, convolve_exact, iterated_support
from .errors import CapacityError, PreconditionError
from .residues import build_k_context
from .zk import zk_estimate

_SUBSET_MODES = ("bernoulli", "exact_count", "full")
_FORMATS = ("json", "csv")
_COUNT_CAP = 1 << 26


@dataclass(frozen=True)
class ExperimentConfig:
    k: int = 2
    w: int = 2
    N: int = 100_000
    s: int = 5
    density: float = 1.0
    seed: int = 0
    rho: float = 0.2
    grid_m: int = 1 << 16
    subset_mode: str = "exact_count"
    output_format: str = "json"
    n_min: int = 1
    congruence_filter: bool = True

    def __post_init__(self) -> None:
        if not (2 <= self.k <= 12):
            raise PreconditionError(f"k={self.k} outside [2,12]")
        if not (0 < self.density <= 1):
            raise PreconditionError("density must lie in (0,1]")
        if self.subset_mode not in _SUBSET_MODES:
            raise PreconditionError(f"subset_mode must be one of {_SUBSET_MODES}")
        if self.output_format not in _FORMATS:
            raise PreconditionError(f"output_format must be one of {_FORMATS}")
        if not (0 <= self.seed < 2**64):
            raise PreconditionError("seed must fit in 64 bits")
        if self.N < 1 or self.s < 1 or self.n_min < 1:
            raise PreconditionError("N, s, n_min must be >= 1")

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in asdict(self).items())

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        kwargs: dict = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PreconditionError(f"config line {lineno}: expected key=value")
            key, val = (part.strip() for part in line.split("=", 1))
            if key not in cls.__dataclass_fields__:
                raise PreconditionError(f"config line {lineno}: unknown key {key!r}")
            kwargs[key] = _coerce(key, val)
        return cls(**kwargs)


def _coerce(key: str, val: str):
    kind = ExperimentConfig.__dataclass_fields__[key].default
    if isinstance(kind, bool):
        if val.lower() in ("true", "1", "yes"):
            return True
        if val.lower() in ("false", "0", "no"):
            return False
        raise PreconditionError(f"{key}: expected a boolean, got {val!r}")
    if isinstance(kind, int):
        return int(val)
    if isinstance(kind, float):
        return float(val)
    return val


class CheckOutcome(NamedTuple):
    name: str
    holds: bool
    measured: dict


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    checks: list[CheckOutcome] = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "config": asdict(self.config),
            "checks": [
                {"name": c.name, "holds": c.holds, "measured": c.measured}
                for c in self.checks
            ],
            "version": self.version,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


def report_from_dict(d: dict) -> ExperimentReport:
    return ExperimentReport(
        config=ExperimentConfig(**d["config"]),
        checks=[CheckOutcome(c["name"], c["holds"], c["measured"]) for c in d["checks"]],
        wall_time=d.get("wall_time", 0.0),
        version=d["version"],
    )


def random_dense_subset(
    k: int, range_max: int, density: float, seed: int, mode: str = "bernoulli"
) -> set[int]:
    """Subset of {t^k <= range_max}; PCG64(seed) fixes it completely."""
    if not (0 < density <= 1):
        raise PreconditionError("density must lie in (0,1]")
    if mode not in _SUBSET_MODES:
        raise PreconditionError(f"mode must be one of {_SUBSET_MODES}")
    powers = []
    t = 1
    while t**k <= range_max:
        powers.append(t**k)
        t += 1
    if mode == "full":
        return set(powers)
    rng = np.random.Generator(np.random.PCG64(seed))
    arr = np.array(powers, dtype=np.int64)
    if mode == "bernoulli":
        return set(arr[rng.random(len(arr)) < density].tolist())
    m = math.ceil(density * len(arr))
    return set(rng.choice(arr, size=m, replace=False).tolist())


def empirical_density(A: set[int], k: int, range_max: int) -> float:
    """|A intersect [range_max]| over the count of k-th powers there."""
    n_powers = 0
    t = 1
    while t**k <= range_max:
        n_powers += 1
        t += 1
    if n_powers == 0:
        return 0.0
    return sum(1 for a in A if 1 <= a <= range_max) / n_powers


def representation_count(A: set[int], s: int, n_max: int) -> np.ndarray:
    """Ordered s-tuple counts r_A^s(n) for n in [0, n_max], exact.

    s-1 integer convolutions, clipped to n_max at every stage. Counts
    that overflow int64 come back as Python ints in an object array
    (the flag is the dtype).
    """
    if s < 1:
        raise PreconditionError("s must be >= 1")
    if n_max > _COUNT_CAP:
        raise CapacityError(f"n_max {n_max} exceeds cap {_COUNT_CAP}")
    ind = np.zeros(n_max + 1, dtype=np.int64)
    for a in A:
        if 0 <= a <= n_max:
            ind[a] = 1
    acc = ind
    for _ in range(s - 1):
        acc = convolve_exact(acc, ind, clip=n_max)
    return acc


def shnirelman_density(B: set[int], n_max: int) -> float:
    """min over N <= n_max of |B intersect [N]| / N."""
    if any(not (1 <= b <= n_max) for b in B):
        raise PreconditionError(f"members must lie in [1, {n_max}]")
    ind = np.zeros(n_max + 1, dtype=np.int64)
    for b in B:
        ind[b] = 1
    prefix = np.cumsum(ind[1:])
    return float(np.min(prefix / np.arange(1, n_max + 1)))


def coverage_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Sample A, then measure which admissible n <= N are s-fold sums.

    Admissible means n == s mod R_k (skipped when the congruence filter
    is off, the sanity mode). Coverage is the covered fraction over
    [n_min, N]; first_gap is the smallest uncovered admissible n. The
    report flags, never refuses, when the density or s hypotheses of
    the asymptotic statement are unmet at these desk parameters.
    """
    t0 = time.perf_counter()
    k, s, N = config.k, config.s, config.N
    kctx = build_k_context(k)
    A = random_dense_subset(k, N, config.density, config.seed, config.subset_mode)
    report = ExperimentReport(config=config)

    dens = empirical_density(A, k, N)
    z_upper = zk_estimate(k, 1e-3).upper
    dens_threshold = (1.0 - 1.0 / (2.0 * z_upper)) ** (1.0 / k)
    s_threshold = 16 * k * kctx.omega_k + 4 * k + 4
    report.checks.append(
        CheckOutcome(
            "hypothesis_density",
            config.density > dens_threshold,
            {
                "density": config.density,
                "empirical_density": dens,
                "threshold": dens_threshold,
            },
        )
    )
    report.checks.append(
        CheckOutcome(
            "hypothesis_s",
            s >= s_threshold,
            {"s": s, "threshold": s_threshold},
        )
    )

    ind = np.zeros(N + 1, dtype=np.int64)
    for a in A:
        if a <= N:
            ind[a] = 1
    reach = iterated_support(booleanize(ind), s, clip=N)
    if config.congruence_filter:
        targets = np.arange(config.n_min, N + 1)
        targets = targets[targets % kctx.R == s % kctx.R]
    else:
        targets = np.arange(config.n_min, N + 1)
    covered = reach[targets].astype(bool)
    coverage = float(covered.mean()) if len(targets) else 1.0
    gaps = targets[~covered]
    first_gap = int(gaps[0]) if len(gaps) else None
    report.checks.append(
        CheckOutcome(
            "window_coverage_full",
            coverage == 1.0,
            {
                "coverage": coverage,
                "first_gap": first_gap,
                "targets": int(len(targets)),
                "subset_size": len(A),
            },
        )
    )
    report.wall_time = time.perf_counter() - t0
    return report


def emit_report(
    report: ExperimentReport, fmt: str, path: str | None, include_timing: bool = True
) -> str:
    """Serialize (JSON sorted-keys or RFC-4180 CSV) and optionally write.

    Returns the serialized text either way; I/O errors surface with
    the offending path attached.
    """
    if fmt == "json":
        text = json.dumps(report.to_dict(include_timing), sort_keys=True, indent=2) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
        writer.writerow(["name", "holds", "measured"])
        for c in report.checks:
            writer.writerow([c.name, c.holds, json.dumps(c.measured, sort_keys=True)])
        text = buf.getvalue()
    else:
        raise PreconditionError(f"format must be one of {_FORMATS}")
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"failed writing report to {path}: {exc}") from exc
    return text
