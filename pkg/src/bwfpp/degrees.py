"""Degree sequences and the empirical statistics that feed the theory formulas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class Regular:
    delta: int


@dataclass(frozen=True)
class IIDFromPMF:
    pmf: Mapping[int, float]


@dataclass(frozen=True)
class Explicit:
    degrees: tuple[int, ...]


DegreeSpec = Union[Regular, IIDFromPMF, Explicit]


@dataclass(frozen=True)
class DegreeSequence:
    degrees: np.ndarray
    # index of the node bumped by one to fix an odd total, or None
    parity_adjusted: int | None = None

    def __post_init__(self):
        if self.degrees.ndim != 1 or len(self.degrees) < 1:
            raise ValueError("degree sequence needs at least one node")
        if np.any(self.degrees < 0):
            raise ValueError("degrees must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return int(self.degrees.sum())

    @classmethod
    def of(cls, degrees: Sequence[int]) -> "DegreeSequence":
        return cls(np.asarray(degrees, dtype=np.int64))


@dataclass(frozen=True)
class DegreeStats:
    mu: float
    nu: float
    min_degree: int
    moment_2_plus_eps: float


@dataclass
class RegularityReport:
    delta: int
    eps: float
    c: float
    min_degree: int
    moment: float
    min_degree_ok: bool
    moment_ok: bool
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.min_degree_ok and self.moment_ok


def build_degree_sequence(spec: DegreeSpec, n: int, rng: np.random.Generator) -> DegreeSequence:
    """Realize ``spec`` on ``n`` nodes.

    An odd total degree from an i.i.d. or explicit spec is repaired by adding
    one to a node of maximal degree; a regular spec with odd ``n * delta`` is
    rejected instead.
    """
    if spec is None:
        raise ValueError("empty degree spec")
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(spec, Regular):
        if spec.delta < 0:
            raise ValueError("regular degree must be nonnegative")
        if (n * spec.delta) % 2:
            raise ValueError(f"regular({spec.delta}) on n={n} nodes has odd total degree")
        return DegreeSequence(np.full(n, spec.delta, dtype=np.int64))
    if isinstance(spec, IIDFromPMF):
        if not spec.pmf:
            raise ValueError("empty pmf")
        ks = np.array(sorted(spec.pmf), dtype=np.int64)
        ps = np.array([spec.pmf[k] for k in ks], dtype=float)
        if np.any(ks < 0) or np.any(ps < 0):
            raise ValueError("pmf support and masses must be nonnegative")
        if abs(ps.sum() - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {ps.sum()!r}, not 1")
        degrees = rng.choice(ks, size=n, p=ps / ps.sum())
    elif isinstance(spec, Explicit):
        if not spec.degrees:
            raise ValueError("empty explicit degree list")
        if len(spec.degrees) != n:
            raise ValueError(f"explicit list has {len(spec.degrees)} entries, expected n={n}")
        degrees = np.asarray(spec.degrees, dtype=np.int64)
    else:
        raise TypeError(f"unknown degree spec {spec!r}")

    degrees = degrees.astype(np.int64, copy=True)
    adjusted = None
    if degrees.sum() % 2:
        adjusted = int(np.argmax(degrees))
        degrees[adjusted] += 1
    return DegreeSequence(degrees, parity_adjusted=adjusted)


def empirical_pmf(ds: DegreeSequence) -> dict[int, float]:
    values, counts = np.unique(ds.degrees, return_counts=True)
    return {int(k): c / ds.n for k, c in zip(values, counts)}


def pmf_stats(pmf: Mapping[int, float], eps: float = 1.0) -> DegreeStats:
    """mu, nu, minimal support point and the (2+eps)-moment of a degree pmf."""
    support = [k for k, p in pmf.items() if p > 0]
    if not support:
        raise ValueError("pmf has no mass")
    mu = math.fsum(k * p for k, p in pmf.items())
    if mu == 0:
        raise ValueError("all degrees are zero; nu is undefined")
    second = math.fsum(k * (k - 1) * p for k, p in pmf.items())
    moment = math.fsum(k ** (2 + eps) * p for k, p in pmf.items())
    return DegreeStats(mu=mu, nu=second / mu, min_degree=min(support), moment_2_plus_eps=moment)


def degree_stats(ds: DegreeSequence, eps: float = 1.0) -> DegreeStats:
    if ds.total == 0:
        raise ValueError("all degrees are zero; nu is undefined")
    d = ds.degrees.astype(float)
    # integer sums keep regular sequences exact
    total = int(ds.degrees.sum())
    second = int((ds.degrees * (ds.degrees - 1)).sum())
    return DegreeStats(
        mu=total / ds.n,
        nu=second / total,
        min_degree=int(ds.degrees.min()),
        moment_2_plus_eps=float(np.mean(d ** (2 + eps))),
    )


def validate_regularity(ds: DegreeSequence, delta: int = 3, eps: float = 1.0, c: float = 100.0) -> RegularityReport:
    """Check the minimum-degree and (2+eps)-moment conditions.

    The report is advisory: nothing downstream refuses an unvalidated sequence.
    """
    stats = degree_stats(ds, eps) if ds.total else DegreeStats(0.0, 0.0, 0, 0.0)
    report = RegularityReport(
        delta=delta,
        eps=eps,
        c=c,
        min_degree=int(ds.degrees.min()),
        moment=stats.moment_2_plus_eps,
        min_degree_ok=bool(ds.degrees.min() >= delta),
        moment_ok=bool(stats.moment_2_plus_eps <= c),
    )
    if delta < 3:
        report.notes.append("delta < 3: theory predictions are not meaningful")
    return report


def load_degrees(path: str | Path) -> tuple[int, ...]:
    """Read a newline-delimited integer file; blank lines and '#' comments are skipped."""
    out = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(int(line))
    return tuple(out)


def parse_degree_spec(obj) -> DegreeSpec:
    """Build a spec from a config mapping such as ``{"regular": 3}``,
    ``{"pmf": {"3": 0.5, "4": 0.5}}``, ``{"explicit": [3, 3, 3, 3]}`` or
    ``{"file": "degrees.txt"}``."""
    if not isinstance(obj, Mapping) or len(obj) != 1:
        raise ValueError(f"degree spec must have exactly one of regular/pmf/explicit/file, got {obj!r}")
    (kind, value), = obj.items()
    if kind == "regular":
        return Regular(int(value))
    if kind == "pmf":
        return IIDFromPMF({int(k): float(p) for k, p in value.items()})
    if kind == "explicit":
        return Explicit(tuple(int(v) for v in value))
    if kind == "file":
        return Explicit(load_degrees(value))
    raise ValueError(f"unknown degree spec kind {kind!r}")


def spec_stats(spec: DegreeSpec, eps: float = 1.0) -> DegreeStats:
    """Limit statistics implied by a spec (independent of any sampled sequence)."""
    if isinstance(spec, Regular):
        return pmf_stats({spec.delta: 1.0}, eps)
    if isinstance(spec, IIDFromPMF):
        return pmf_stats(spec.pmf, eps)
    return degree_stats(DegreeSequence.of(spec.degrees), eps)
