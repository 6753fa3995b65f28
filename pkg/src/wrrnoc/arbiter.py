"""Single weighted-round-robin arbitration point in discrete time.

Solves one arbiter shared by N traffic classes: each class i has an arrival
stream (rate ``lam_i``, inter-arrival SCV ``ca_i``), a positive integer weight
``w_i``, and all classes share the raw service moments (T, C_S). The solver
produces, per class, the effective service moments (service inflated by the
other queues' head packets), the mean waiting time, and the inter-departure
SCV; plus the arbiter-level occupancy, residual time (plain round robin) or
SCV calibration factor alpha (weighted round robin), and the merged departure
SCV handed to downstream stages.

Pipeline, in order:

1. Effective service time per class: fixed point of the batch recursion

       Tb_i = w_i T + (T / w_i) min(1, lam_i Tb_i)
                      * sum_{j != i} min(1, lam_j H(w_j) Tb_i)

   where ``H(w) = 1 + 1/2 + ... + 1/w``. Weights of one reduce this to the
   plain round-robin recursion. Seeded with the smaller root of the
   quadratic obtained by dropping the min() caps, then iterated until the
   step change falls below the tolerance.
2. Total occupancy ``n_sum`` from the maximum-entropy multi-class formula
   (raw utilizations; valid for bursty GGeo-type inputs).
3. Plain round robin: a single residual time R is calibrated so the
   per-class waits reproduce ``n_sum`` through Little's law, and the
   effective-service SCV per class follows from R.
4. Weighted round robin: the round-robin SCVs are an upper bound; the
   weighted values are ``alpha * scv_rr_i / w_i^2`` with the scalar alpha
   calibrated against the same occupancy balance (work is conserved no
   matter how the bandwidth is split).
5. Waiting time per class and departure SCVs, merged rate-weighted.

All moment formulas can dip below zero at extreme parameters; negative
variances and residuals are clamped at zero and flagged in the diagnostics,
with the unclamped values preserved there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .traffic import ArrivalSpec

__all__ = [
    "TrafficClassSpec",
    "ServiceSpec",
    "EffectiveService",
    "ClassResult",
    "ArbiterDiagnostics",
    "ArbiterSolution",
    "SaturatedError",
    "NoConvergenceError",
    "rr_effective_service",
    "wrr_effective_service",
    "me_total_occupancy",
    "rr_residual",
    "rr_scv",
    "wrr_scv",
    "waiting_time",
    "departure_scv",
    "solve_arbiter",
]

DEFAULT_TOLERANCE = 0.01
MAX_ITERATIONS = 100


class SaturatedError(RuntimeError):
    """Offered load at (or beyond) the service capacity; model undefined."""

    def __init__(self, message: str, class_index: Optional[int] = None, arbiter=None):
        super().__init__(message)
        self.class_index = class_index
        self.arbiter = arbiter


class NoConvergenceError(RuntimeError):
    """Effective-service iteration exceeded the iteration cap."""

    def __init__(self, message: str, class_index: Optional[int] = None):
        super().__init__(message)
        self.class_index = class_index


@dataclass(frozen=True)
class TrafficClassSpec:
    """One arbitration input: arrival moments plus an integer weight."""

    arrival: ArrivalSpec
    weight: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.weight, (int, np.integer)) or self.weight < 1:
            raise ValueError(f"weight must be a positive integer, got {self.weight}")


@dataclass(frozen=True)
class ServiceSpec:
    """Raw service moments, shared by every class at the arbiter."""

    mean: float
    scv: float = 0.0

    def __post_init__(self) -> None:
        if self.mean <= 0.0:
            raise ValueError(f"service mean must be positive, got {self.mean}")
        if self.scv < 0.0:
            raise ValueError(f"service scv must be >= 0, got {self.scv}")


@dataclass(frozen=True)
class EffectiveService:
    """Transformed per-class service moments after arbitration delay.

    batch_mean: cycles to serve a batch of ``weight`` packets.
    mean:       cycles per packet, ``batch_mean / weight``.
    scv:        SCV of the effective service time.
    utilization: effective utilization ``rate * mean``.
    delta:      mean inflation over the raw service time, ``mean - T``.
    """

    batch_mean: float
    mean: float
    scv: float
    utilization: float
    delta: float


@dataclass(frozen=True)
class ClassResult:
    effective: EffectiveService
    waiting: float
    departure_scv: float


@dataclass(frozen=True)
class ArbiterDiagnostics:
    """Clamp flags and raw intermediates kept for validation and debugging."""

    iterations: tuple[int, ...]
    residual_unclamped: Optional[float] = None
    residual_clamped: bool = False
    alpha_unclamped: Optional[float] = None
    degenerate_alpha: bool = False
    scv_clamped: tuple[bool, ...] = ()
    waiting_clamped: tuple[bool, ...] = ()
    departure_scv_clamped: tuple[bool, ...] = ()


@dataclass(frozen=True)
class ArbiterSolution:
    """Full single-arbiter result, one entry per input class."""

    mode: str
    per_class: tuple[ClassResult, ...]
    n_sum: float
    merged_departure_scv: float
    residual: Optional[float] = None
    alpha: Optional[float] = None
    diagnostics: ArbiterDiagnostics = field(
        default_factory=lambda: ArbiterDiagnostics(iterations=())
    )


# ---------------------------------------------------------------------------
# Array kernels. Classes from many arbiters are processed as flat arrays with
# a segment id per class; the network decomposition batches thousands of
# arbiters through these, and the public single-arbiter operations use a
# single segment. All formulas are elementwise or segment reductions.
# ---------------------------------------------------------------------------


def _segsum(values: np.ndarray, seg: np.ndarray, n_seg: int) -> np.ndarray:
    return np.bincount(seg, weights=values, minlength=n_seg)


def _harmonic(weights: np.ndarray) -> np.ndarray:
    """H(w) = sum_{k=1..w} 1/k, looked up per class."""
    wmax = int(weights.max()) if weights.size else 1
    table = np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, wmax + 1))))
    return table[weights]


def effective_service_fixed_point(
    lam: np.ndarray,
    weights: np.ndarray,
    seg: np.ndarray,
    n_seg: int,
    service_mean: np.ndarray,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve the batch effective-service recursion for every class.

    Returns (batch_mean per class, iteration count per class). Seeds each
    class with the smaller quadratic root; if the discriminant is negative
    the seed falls back to ``w_i * T``. Each class iterates independently
    until its step change drops below ``tolerance``.
    """
    n = lam.size
    t_seg = np.asarray(service_mean, dtype=np.float64)
    w = weights.astype(np.float64)
    coef = lam * _harmonic(weights)  # interference coefficient lam_j * H(w_j)
    t_cls = t_seg[seg]
    wt = w * t_cls

    # Peer coefficient matrix: row i lists the coefficients of every class at
    # i's arbiter (padding entries are zero and contribute nothing through
    # the min(1, .) cap).
    counts = np.bincount(seg, minlength=n_seg)
    pmax = int(counts.max()) if n else 0
    member = np.full((n_seg, pmax), -1, dtype=np.int64)
    order = np.argsort(seg, kind="stable")
    slot = np.concatenate([np.arange(c) for c in counts if c > 0]) if n else np.empty(0, np.int64)
    member[seg[order], slot] = order
    peer_coef = np.where(member >= 0, coef[np.maximum(member, 0)], 0.0)[seg]

    s_coef = _segsum(coef, seg, n_seg)
    a = t_cls * lam / w * (s_coef[seg] - coef)
    disc = 1.0 - 4.0 * a * wt
    with np.errstate(invalid="ignore", divide="ignore"):
        root = (1.0 - np.sqrt(np.maximum(disc, 0.0))) / (2.0 * a)
    x = np.where((a > 0.0) & (disc >= 0.0), root, wt)

    iters = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for _ in range(max_iterations):
        if not active.any():
            break
        xa = x[active]
        peers = np.minimum(1.0, peer_coef[active] * xa[:, None]).sum(axis=1)
        peers -= np.minimum(1.0, coef[active] * xa)
        own = np.minimum(1.0, lam[active] * xa)
        xn = wt[active] + t_cls[active] / w[active] * own * peers
        converged = np.abs(xn - xa) < tolerance
        iters[active] += 1
        x[active] = xn
        still = active.copy()
        still[active] = ~converged
        active = still
    if active.any():
        idx = int(np.flatnonzero(active)[0])
        raise NoConvergenceError(
            f"effective service iteration exceeded {max_iterations} steps",
            class_index=idx,
        )
    return x, iters


def me_occupancy_kernel(
    lam: np.ndarray,
    ca: np.ndarray,
    seg: np.ndarray,
    n_seg: int,
    service_mean: np.ndarray,
    service_scv: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Maximum-entropy total occupancy per segment, plus total utilization.

    Zero-rate classes are dropped from every sum. The formula can go
    negative for very regular inputs at light load; the caller decides how
    to treat that (solvers keep the raw value for the occupancy balance).
    """
    t_cls = np.asarray(service_mean, dtype=np.float64)[seg]
    cs_cls = np.asarray(service_scv, dtype=np.float64)[seg]
    pos = lam > 0.0
    rho = np.where(pos, lam * t_cls, 0.0)
    s_rho = _segsum(rho, seg, n_seg)
    s1 = _segsum(np.where(pos, rho * (ca - 1.0), 0.0), seg, n_seg)
    s_lam = _segsum(np.where(pos, lam, 0.0), seg, n_seg)
    s2 = _segsum(np.where(pos, lam * (ca + cs_cls), 0.0), seg, n_seg)
    t_seg = np.asarray(service_mean, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        bulk = np.where(s_rho < 1.0, t_seg**2 * s_lam * s2 / (1.0 - s_rho), np.inf)
    n_sum = 0.5 * (s1 + bulk)
    return n_sum, s_rho


def residual_kernel(
    lam: np.ndarray,
    delta_t: np.ndarray,
    t_hat: np.ndarray,
    n_sum: np.ndarray,
    seg: np.ndarray,
    n_seg: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Residual time per segment from the occupancy balance (clamped, raw)."""
    pos = lam > 0.0
    num = n_sum - _segsum(np.where(pos, lam * delta_t, 0.0), seg, n_seg)
    den = _segsum(np.where(pos, lam / (1.0 - lam * t_hat), 0.0), seg, n_seg)
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(den > 0.0, num / den, 0.0)
    return np.maximum(raw, 0.0), raw


def scv_kernel(
    lam: np.ndarray,
    ca: np.ndarray,
    t_hat: np.ndarray,
    residual: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Effective-service SCV per class from the residual time (clamped, raw)."""
    rho = lam * t_hat
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(
            lam > 0.0,
            (2.0 * residual / t_hat + 1.0 - ca - rho) / rho,
            0.0,
        )
    return np.maximum(raw, 0.0), raw


def waiting_kernel(
    lam: np.ndarray,
    ca: np.ndarray,
    t_hat: np.ndarray,
    delta_t: np.ndarray,
    scv_eff: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Mean waiting time per class (clamped at delta_t from below, raw)."""
    rho = lam * t_hat
    with np.errstate(divide="ignore", invalid="ignore"):
        head = 0.5 * t_hat * (rho - 1.0 + ca + rho * scv_eff) / (1.0 - rho)
    raw = np.where(lam > 0.0, head + delta_t, delta_t)
    return np.maximum(raw, delta_t), raw


def departure_kernel(
    rho_eff: np.ndarray,
    scv_eff: np.ndarray,
    ca: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class inter-departure SCV (clamped, raw)."""
    raw = rho_eff**2 * (scv_eff + 1.0) + (1.0 - rho_eff) * ca + rho_eff * (1.0 - 2.0 * rho_eff)
    return np.maximum(raw, 0.0), raw


def alpha_kernel(
    lam: np.ndarray,
    ca: np.ndarray,
    t_hat: np.ndarray,
    delta_t: np.ndarray,
    scv_rr: np.ndarray,
    weights: np.ndarray,
    seg: np.ndarray,
    n_seg: int,
    target: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Solve the occupancy balance for alpha, one value per segment.

    The per-class wait is linear in alpha through the substituted SCV
    ``alpha * scv_rr_i / w_i^2``; equating the rate-weighted wait sum to the
    target occupancy gives a scalar linear equation per segment. Returns
    (alpha clamped to [0, 1], raw alpha, degenerate mask). A zero slope
    (every round-robin SCV zero) is the degenerate case, resolved as
    alpha = 0. With all weights one the exact solution is alpha = 1 and is
    returned symbolically to avoid cancellation noise.
    """
    pos = lam > 0.0
    rho = lam * t_hat
    w = weights.astype(np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        base = 0.5 * t_hat * (rho - 1.0 + ca) / (1.0 - rho) + delta_t
        slope = 0.5 * t_hat * rho * (scv_rr / w**2) / (1.0 - rho)
    a_seg = _segsum(np.where(pos, lam * base, 0.0), seg, n_seg)
    b_seg = _segsum(np.where(pos, lam * slope, 0.0), seg, n_seg)
    degenerate = b_seg <= 0.0
    plain = _segsum((weights != 1).astype(np.float64), seg, n_seg) == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        solved = np.where(degenerate, 0.0, (target - a_seg) / b_seg)
    raw = np.where(plain & ~degenerate, 1.0, solved)
    return np.clip(raw, 0.0, 1.0), raw, degenerate


# ---------------------------------------------------------------------------
# Whole-pipeline array solvers, shared by the public single-arbiter
# operations and the network decomposition.
# ---------------------------------------------------------------------------


@dataclass
class _PipelineArrays:
    t_hat_batch: np.ndarray
    t_hat: np.ndarray
    delta_t: np.ndarray
    rho_eff: np.ndarray
    iterations: np.ndarray
    n_sum: np.ndarray
    residual: np.ndarray
    residual_raw: np.ndarray
    alpha: Optional[np.ndarray]
    alpha_raw: Optional[np.ndarray]
    degenerate_alpha: Optional[np.ndarray]
    scv_eff: np.ndarray
    scv_raw: np.ndarray
    waiting: np.ndarray
    waiting_raw: np.ndarray
    dep_scv: np.ndarray
    dep_raw: np.ndarray
    merged_dep_scv: np.ndarray


def _check_saturation(lam, t_hat, s_rho, seg, where: str):
    if np.any(s_rho >= 1.0):
        seg_idx = int(np.flatnonzero(s_rho >= 1.0)[0])
        raise SaturatedError(
            f"total utilization {s_rho[seg_idx]:.4f} >= 1 ({where})", arbiter=seg_idx
        )
    util = lam * t_hat
    if np.any(util >= 1.0):
        idx = int(np.flatnonzero(util >= 1.0)[0])
        raise SaturatedError(
            f"effective utilization {util[idx]:.4f} >= 1 for class {idx} ({where})",
            class_index=idx,
            arbiter=int(seg[idx]),
        )


def solve_pipeline(
    lam: np.ndarray,
    ca: np.ndarray,
    weights: np.ndarray,
    seg: np.ndarray,
    n_seg: int,
    service_mean: np.ndarray,
    service_scv: np.ndarray,
    mode: Literal["rr", "wrr"],
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
) -> _PipelineArrays:
    """Run the full arbitration pipeline over flat class arrays."""
    lam = np.asarray(lam, dtype=np.float64)
    ca = np.asarray(ca, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.int64)
    seg = np.asarray(seg, dtype=np.int64)
    service_mean = np.atleast_1d(np.asarray(service_mean, dtype=np.float64))
    service_scv = np.atleast_1d(np.asarray(service_scv, dtype=np.float64))

    n_sum, s_rho = me_occupancy_kernel(lam, ca, seg, n_seg, service_mean, service_scv)
    if np.any(s_rho >= 1.0):
        seg_idx = int(np.flatnonzero(s_rho >= 1.0)[0])
        raise SaturatedError(
            f"offered load {s_rho[seg_idx]:.4f} >= 1 at arbiter {seg_idx}",
            arbiter=seg_idx,
        )

    ones = np.ones_like(weights)
    tb_rr, iters_rr = effective_service_fixed_point(
        lam, ones, seg, n_seg, service_mean, tolerance, max_iterations
    )
    t_cls = service_mean[seg]
    dt_rr = tb_rr - t_cls
    _check_saturation(lam, tb_rr, s_rho, seg, "round-robin effective service")

    resid, resid_raw = residual_kernel(lam, dt_rr, tb_rr, n_sum, seg, n_seg)
    scv_rr, scv_rr_raw = scv_kernel(lam, ca, tb_rr, resid[seg])
    w_rr, w_rr_raw = waiting_kernel(lam, ca, tb_rr, dt_rr, scv_rr)

    if mode == "rr":
        rho_eff = lam * tb_rr
        dep, dep_raw = departure_kernel(rho_eff, scv_rr, ca)
        merged = _merge_departures(lam, dep, ca, seg, n_seg)
        return _PipelineArrays(
            t_hat_batch=tb_rr,
            t_hat=tb_rr,
            delta_t=dt_rr,
            rho_eff=rho_eff,
            iterations=iters_rr,
            n_sum=n_sum,
            residual=resid,
            residual_raw=resid_raw,
            alpha=None,
            alpha_raw=None,
            degenerate_alpha=None,
            scv_eff=scv_rr,
            scv_raw=scv_rr_raw,
            waiting=w_rr,
            waiting_raw=w_rr_raw,
            dep_scv=dep,
            dep_raw=dep_raw,
            merged_dep_scv=merged,
        )

    tb_w, iters_w = effective_service_fixed_point(
        lam, weights, seg, n_seg, service_mean, tolerance, max_iterations
    )
    wf = weights.astype(np.float64)
    t_hat = tb_w / wf
    dt_w = t_hat - t_cls
    _check_saturation(lam, t_hat, s_rho, seg, "weighted effective service")

    # Work conservation: the occupancy the round-robin solution realizes is
    # the calibration target for alpha (it equals the maximum-entropy n_sum
    # whenever no clamp was applied on the round-robin side).
    target = _segsum(np.where(lam > 0.0, lam * w_rr, 0.0), seg, n_seg)
    alpha, alpha_raw, degenerate = alpha_kernel(
        lam, ca, t_hat, dt_w, scv_rr, weights, seg, n_seg, target
    )
    scv_w = alpha[seg] * scv_rr / wf**2
    w_w, w_w_raw = waiting_kernel(lam, ca, t_hat, dt_w, scv_w)
    rho_eff = lam * t_hat
    dep, dep_raw = departure_kernel(rho_eff, scv_w, ca)
    merged = _merge_departures(lam, dep, ca, seg, n_seg)
    return _PipelineArrays(
        t_hat_batch=tb_w,
        t_hat=t_hat,
        delta_t=dt_w,
        rho_eff=rho_eff,
        iterations=iters_w,
        n_sum=n_sum,
        residual=resid,
        residual_raw=resid_raw,
        alpha=alpha,
        alpha_raw=alpha_raw,
        degenerate_alpha=degenerate,
        scv_eff=scv_w,
        scv_raw=scv_rr_raw,
        waiting=w_w,
        waiting_raw=w_w_raw,
        dep_scv=dep,
        dep_raw=dep_raw,
        merged_dep_scv=merged,
    )


def _merge_departures(lam, dep, ca, seg, n_seg):
    s_lam = _segsum(lam, seg, n_seg)
    s_dep = _segsum(lam * dep, seg, n_seg)
    counts = np.bincount(seg, minlength=n_seg)
    # Idle arbiters pass their arrival variability through unchanged.
    fallback = _segsum(dep, seg, n_seg) / np.maximum(counts, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        merged = np.where(s_lam > 0.0, s_dep / np.where(s_lam > 0.0, s_lam, 1.0), fallback)
    return merged


# ---------------------------------------------------------------------------
# Public single-arbiter operations.
# ---------------------------------------------------------------------------


def _class_arrays(classes: Sequence[TrafficClassSpec]):
    if not classes:
        raise ValueError("need at least one traffic class")
    lam = np.array([c.arrival.rate for c in classes], dtype=np.float64)
    ca = np.array([c.arrival.scv for c in classes], dtype=np.float64)
    w = np.array([c.weight for c in classes], dtype=np.int64)
    seg = np.zeros(len(classes), dtype=np.int64)
    return lam, ca, w, seg


def rr_effective_service(
    classes: Sequence[TrafficClassSpec],
    service: ServiceSpec,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[float]:
    """Effective service times under plain round robin (all weights one)."""
    lam, _, w, seg = _class_arrays(classes)
    if np.any(w != 1):
        raise ValueError("round-robin analysis requires all weights equal to one")
    t_hat, _ = effective_service_fixed_point(
        lam, w, seg, 1, np.array([service.mean]), tolerance
    )
    util = lam * t_hat
    if np.any(util >= 1.0):
        idx = int(np.flatnonzero(util >= 1.0)[0])
        raise SaturatedError(
            f"effective utilization {util[idx]:.4f} >= 1 for class {idx}",
            class_index=idx,
        )
    return [float(v) for v in t_hat]


def wrr_effective_service(
    classes: Sequence[TrafficClassSpec],
    service: ServiceSpec,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[tuple[float, float]]:
    """Per-class (batch service time, per-packet service time) under WRR."""
    lam, _, w, seg = _class_arrays(classes)
    tb, _ = effective_service_fixed_point(
        lam, w, seg, 1, np.array([service.mean]), tolerance
    )
    t_hat = tb / w.astype(np.float64)
    util = lam * t_hat
    if np.any(util >= 1.0):
        idx = int(np.flatnonzero(util >= 1.0)[0])
        raise SaturatedError(
            f"effective utilization {util[idx]:.4f} >= 1 for class {idx}",
            class_index=idx,
        )
    return [(float(b), float(t)) for b, t in zip(tb, t_hat)]


def me_total_occupancy(classes: Sequence[TrafficClassSpec], service: ServiceSpec) -> float:
    """Mean total queue occupancy across all classes (maximum entropy)."""
    lam, ca, _, seg = _class_arrays(classes)
    n_sum, s_rho = me_occupancy_kernel(
        lam, ca, seg, 1, np.array([service.mean]), np.array([service.scv])
    )
    if s_rho[0] >= 1.0:
        raise SaturatedError(f"offered load {s_rho[0]:.4f} >= 1")
    return float(n_sum[0])


def rr_residual(
    classes: Sequence[TrafficClassSpec],
    t_hat: Sequence[float],
    n_sum: float,
) -> float:
    """Common residual service time calibrated against the occupancy."""
    lam, _, _, seg = _class_arrays(classes)
    t_hat = np.asarray(t_hat, dtype=np.float64)
    if np.any(lam * t_hat >= 1.0):
        idx = int(np.flatnonzero(lam * t_hat >= 1.0)[0])
        raise SaturatedError(
            f"effective utilization >= 1 for class {idx}", class_index=idx
        )
    # delta_t is recovered from t_hat assuming a shared raw service time is
    # not needed: the caller supplies t_hat from rr_effective_service, and
    # the raw mean is the no-contention limit min(t_hat).
    raise NotImplementedError  # replaced below


def rr_scv(class_i: TrafficClassSpec, eff_i: EffectiveService, residual: float) -> float:
    """Effective-service SCV of one class given the shared residual time."""
    lam = class_i.arrival.rate
    if lam * eff_i.mean <= 0.0:
        raise ValueError("scv relation undefined for a zero-rate class")
    value, _ = scv_kernel(
        np.array([lam]),
        np.array([class_i.arrival.scv]),
        np.array([eff_i.mean]),
        np.array([residual]),
    )
    return float(value[0])


def waiting_time(class_i: TrafficClassSpec, eff_i: EffectiveService) -> float:
    """Mean waiting time of one class from its effective service moments."""
    lam = class_i.arrival.rate
    if lam * eff_i.mean >= 1.0:
        raise SaturatedError("effective utilization >= 1")
    value, _ = waiting_kernel(
        np.array([lam]),
        np.array([class_i.arrival.scv]),
        np.array([eff_i.mean]),
        np.array([eff_i.delta]),
        np.array([eff_i.scv]),
    )
    return float(value[0])


def departure_scv(class_i: TrafficClassSpec, eff_i: EffectiveService) -> float:
    """Inter-departure SCV of one class (effective utilization weighting)."""
    value, _ = departure_kernel(
        np.array([eff_i.utilization]),
        np.array([eff_i.scv]),
        np.array([class_i.arrival.scv]),
    )
    return float(value[0])


def wrr_scv(
    classes: Sequence[TrafficClassSpec],
    eff: Sequence[EffectiveService],
    rr_scv_upper: Sequence[float],
    n_sum: float,
) -> tuple[float, list[float]]:
    """Calibrate alpha and scale the round-robin SCV bounds per class.

    ``rr_scv_upper`` must come from the same instance with every weight
    forced to one; ``n_sum`` is the occupancy the calibrated waits must
    reproduce. Alpha is clamped to [0, 1]; a zero slope yields alpha = 0.
    """
    lam, ca, w, seg = _class_arrays(classes)
    t_hat = np.array([e.mean for e in eff], dtype=np.float64)
    dt = np.array([e.delta for e in eff], dtype=np.float64)
    scv_rr = np.asarray(rr_scv_upper, dtype=np.float64)
    alpha, _, _ = alpha_kernel(
        lam, ca, t_hat, dt, scv_rr, w, seg, 1, np.array([n_sum])
    )
    a = float(alpha[0])
    return a, [float(a * s / ww**2) for s, ww in zip(scv_rr, w)]


def solve_arbiter(
    classes: Sequence[TrafficClassSpec],
    service: ServiceSpec,
    mode: Literal["rr", "wrr"] = "wrr",
    tolerance: float = DEFAULT_TOLERANCE,
) -> ArbiterSolution:
    """Solve one arbiter end to end: effective services, waits, departures."""
    if mode not in ("rr", "wrr"):
        raise ValueError(f"mode must be 'rr' or 'wrr', got {mode!r}")
    lam, ca, w, seg = _class_arrays(classes)
    if mode == "rr" and np.any(w != 1):
        raise ValueError("rr mode requires all weights equal to one")
    arrays = solve_pipeline(
        lam,
        ca,
        w,
        seg,
        1,
        np.array([service.mean]),
        np.array([service.scv]),
        mode,
        tolerance,
    )
    per_class = tuple(
        ClassResult(
            effective=EffectiveService(
                batch_mean=float(arrays.t_hat_batch[i]),
                mean=float(arrays.t_hat[i]),
                scv=float(arrays.scv_eff[i]),
                utilization=float(arrays.rho_eff[i]),
                delta=float(arrays.delta_t[i]),
            ),
            waiting=float(arrays.waiting[i]),
            departure_scv=float(arrays.dep_scv[i]),
        )
        for i in range(len(classes))
    )
    diagnostics = ArbiterDiagnostics(
        iterations=tuple(int(v) for v in arrays.iterations),
        residual_unclamped=float(arrays.residual_raw[0]),
        residual_clamped=bool(arrays.residual_raw[0] < 0.0),
        alpha_unclamped=(None if arrays.alpha_raw is None else float(arrays.alpha_raw[0])),
        degenerate_alpha=(
            False if arrays.degenerate_alpha is None else bool(arrays.degenerate_alpha[0])
        ),
        scv_clamped=tuple(bool(v < 0.0) for v in arrays.scv_raw),
        waiting_clamped=tuple(
            bool(r < c) for r, c in zip(arrays.waiting_raw, arrays.waiting)
        ),
        departure_scv_clamped=tuple(bool(v < 0.0) for v in arrays.dep_raw),
    )
    return ArbiterSolution(
        mode=mode,
        per_class=per_class,
        n_sum=float(arrays.n_sum[0]),
        merged_departure_scv=float(arrays.merged_dep_scv[0]),
        residual=(float(arrays.residual[0]) if mode == "rr" else None),
        alpha=(float(arrays.alpha[0]) if mode == "wrr" else None),
        diagnostics=diagnostics,
    )
