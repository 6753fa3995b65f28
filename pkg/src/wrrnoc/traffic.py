"""Discrete-time arrival processes: geometric and bursty (GGeo) traffic.

A source injects packets at integer cycles. The plain geometric process is
Bernoulli per cycle (at most one packet). The bursty generalization starts a
bulk in each cycle with probability ``sigma = rate * (1 - p_burst)``; once a
bulk starts, every additional packet in the same cycle follows with
probability ``p_burst``, so bulk sizes are geometric with mean
``1 / (1 - p_burst)`` and the long-run rate stays ``rate``. Within-bulk
packets count as inter-arrival gaps of zero cycles, which is what makes
burstiness raise the inter-arrival variability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ArrivalSpec",
    "GGeoSpec",
    "PacketTrace",
    "scv_from_burst",
    "sample_trace",
    "merge_arrivals",
    "empirical_gap_scv",
]


@dataclass(frozen=True)
class ArrivalSpec:
    """First two moments of a discrete-time arrival stream.

    rate: mean packets per cycle, 0 <= rate < 1 (at most one injection
          opportunity per cycle per source in a slotted system).
    scv:  squared coefficient of variation of the inter-arrival time.
    """

    rate: float
    scv: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate < 1.0:
            raise ValueError(f"rate must be in [0, 1), got {self.rate}")
        if self.scv < 0.0:
            raise ValueError(f"scv must be >= 0, got {self.scv}")


@dataclass(frozen=True)
class GGeoSpec:
    """Bursty source: injection rate plus bulk-continuation probability."""

    rate: float
    p_burst: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.rate < 1.0:
            raise ValueError(f"rate must be in [0, 1), got {self.rate}")
        if not 0.0 <= self.p_burst < 1.0:
            raise ValueError(f"p_burst must be in [0, 1), got {self.p_burst}")


@dataclass(frozen=True)
class PacketTrace:
    """Sampled arrival cycles, non-decreasing; repeats mark same-cycle bulks."""

    arrival_cycles: np.ndarray = field(default_factory=lambda: np.empty(0, np.int64))

    def __post_init__(self) -> None:
        cycles = np.asarray(self.arrival_cycles, dtype=np.int64)
        object.__setattr__(self, "arrival_cycles", cycles)
        if cycles.size and (np.any(np.diff(cycles) < 0) or cycles[0] < 0):
            raise ValueError("arrival cycles must be non-negative and non-decreasing")

    def __len__(self) -> int:
        return int(self.arrival_cycles.size)

    def rate(self, cycles: int) -> float:
        """Empirical packets per cycle over an observation window."""
        return self.arrival_cycles.size / float(cycles)

    def gap_scv(self) -> float:
        """Empirical SCV of inter-arrival gaps (zero gaps within bulks count)."""
        return empirical_gap_scv(np.diff(self.arrival_cycles))


def scv_from_burst(g: GGeoSpec) -> ArrivalSpec:
    """Inter-arrival SCV of the bursty sampling process.

    A gap is zero with probability ``p_burst`` (next packet in the same bulk),
    otherwise it is geometric on {1, 2, ...} with success probability
    ``sigma = rate * (1 - p_burst)``. The first two gap moments give

        E[A]   = 1 / rate
        E[A^2] = (1 - p_burst) * (2 - sigma) / sigma^2

    and hence ``scv = 2 / (1 - p_burst) - (1 + rate)``. At ``p_burst = 0``
    this is the Bernoulli gap SCV ``1 - rate``, and it is strictly
    increasing in ``p_burst`` at fixed rate.
    """
    scv = 2.0 / (1.0 - g.p_burst) - (1.0 + g.rate)
    return ArrivalSpec(rate=g.rate, scv=scv)


def sample_trace(g: GGeoSpec, cycles: int, seed: int) -> PacketTrace:
    """Sample arrival cycles for ``cycles`` slots; deterministic per seed.

    Bulk-start cycles form a Bernoulli(sigma) process, drawn as geometric
    gaps; bulk sizes are geometric with continuation ``p_burst``.
    """
    if cycles <= 0:
        raise ValueError(f"cycles must be positive, got {cycles}")
    rng = np.random.default_rng(seed)
    sigma = g.rate * (1.0 - g.p_burst)
    if sigma == 0.0:
        return PacketTrace(np.empty(0, dtype=np.int64))

    parts: list[np.ndarray] = []
    last = -1
    expect = int(sigma * cycles) + 1
    chunk = expect + 4 * int(np.sqrt(expect)) + 16
    while last < cycles:
        gaps = rng.geometric(sigma, size=chunk).astype(np.int64)
        starts = last + np.cumsum(gaps)
        parts.append(starts)
        last = int(starts[-1])
        chunk = 1024
    starts = np.concatenate(parts)
    starts = starts[starts < cycles]
    sizes = rng.geometric(1.0 - g.p_burst, size=starts.size)
    return PacketTrace(np.repeat(starts, sizes))


def merge_arrivals(streams: Sequence[ArrivalSpec] | Iterable[ArrivalSpec]) -> ArrivalSpec:
    """Superpose independent streams: rates add, SCVs merge rate-weighted.

    With all rates zero the SCV falls back to the plain mean so that the
    merge of idle streams is still well defined.
    """
    streams = list(streams)
    if not streams:
        raise ValueError("cannot merge an empty list of streams")
    total = sum(s.rate for s in streams)
    if total == 0.0:
        scv = sum(s.scv for s in streams) / len(streams)
    else:
        scv = sum(s.rate * s.scv for s in streams) / total
    return ArrivalSpec(rate=total, scv=scv)


def empirical_gap_scv(gaps: np.ndarray) -> float:
    """Sample SCV (population variance over squared mean) of a gap sequence."""
    gaps = np.asarray(gaps, dtype=np.float64)
    if gaps.size < 2:
        raise ValueError("need at least two gaps to estimate an SCV")
    mean = gaps.mean()
    if mean == 0.0:
        raise ValueError("gap mean is zero; SCV undefined")
    return float(gaps.var() / mean**2)
