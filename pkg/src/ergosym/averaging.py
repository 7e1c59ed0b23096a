"""Streaming Cesaro and weighted ergodic averages with checkpoint reports.

Averages a_n = (1/n) sum_{k<n} beta_k T^k f are computed in a single pass:
one operator application per step, one running Kahan-compensated sum, and a
report row at each requested checkpoint. Nothing is recomputed and operator
powers are never materialized, so memory stays at a few state vectors even
for long horizons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, CapabilityError, InputError
from .operators import Operator
from .spaces import MAJORIZATION_TOL, MeasurableFunction, majorizes
from .weights import WeightSequence

# default cap on the number of operator applications per run
DEFAULT_BUDGET = 1_000_000


def geometric_checkpoints(limit: int) -> tuple[int, ...]:
    """Powers of two up to `limit`, with `limit` itself appended."""
    if limit < 1:
        raise InputError("checkpoint limit must be at least 1")
    cps = []
    n = 1
    while n <= limit:
        cps.append(n)
        n *= 2
    if cps[-1] != limit:
        cps.append(limit)
    return tuple(cps)


def _validated_checkpoints(checkpoints) -> tuple[int, ...]:
    cps = tuple(int(n) for n in checkpoints)
    if len(cps) == 0:
        raise InputError("need at least one checkpoint")
    if cps[0] < 1 or any(b <= a for a, b in zip(cps, cps[1:])):
        raise InputError("checkpoints must be strictly increasing and >= 1")
    return cps


@dataclass(eq=False)
class AveragingReport:
    """Per-checkpoint averages, norms, and probe values.

    `averages` is populated in full mode only; probe-only runs keep just the
    probe columns (norms are still exact, they are read off the running sum
    at checkpoint time). `weight_bound` is the normalization constant
    M = max(1, sup_k |beta_k|) for weighted runs, None for plain Cesaro.
    `majorized` is filled by `majorization_trace`.
    """

    checkpoints: tuple[int, ...]
    probes: tuple[int, ...]
    probe_values: np.ndarray
    l1_norms: np.ndarray
    linf_norms: np.ndarray
    averages: tuple[MeasurableFunction, ...] | None = None
    weight_bound: float | None = None
    majorized: tuple[bool, ...] | None = None

    @property
    def full(self) -> bool:
        return self.averages is not None


def _stream(T, f, checkpoints, beta, probes, store_averages, max_iterations):
    cps = _validated_checkpoints(checkpoints)
    if cps[-1] > max_iterations:
        raise BudgetError(
            f"last checkpoint {cps[-1]} exceeds the iteration budget "
            f"{max_iterations}"
        )
    if not T.space.is_compatible(f.space):
        raise InputError("operator and function live on different spaces")
    n_atoms = T.space.n_atoms
    probes = tuple(int(p) for p in probes)
    if any(p < 0 or p >= n_atoms for p in probes):
        raise InputError("probe atom out of range")

    betas = None
    weight_bound = None
    if beta is not None:
        betas = beta.values(cps[-1])
        weight_bound = max(1.0, float(np.max(np.abs(betas))))

    w = T.space.weights
    g = f.values.astype(complex, copy=True)
    total = np.zeros(n_atoms, dtype=complex)
    comp = np.zeros(n_atoms, dtype=complex)

    probe_rows, l1s, linfs, avgs = [], [], [], []
    ptr = 0
    for k in range(cps[-1]):
        term = g if betas is None else betas[k] * g
        # Kahan step: the compensation vector carries the lost low bits
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        n = k + 1
        if n == cps[ptr]:
            a = total / n
            mags = np.abs(a)
            l1s.append(float(np.sum(w * mags)))
            linfs.append(float(np.max(mags)))
            probe_rows.append(a[list(probes)] if probes else np.zeros(0, complex))
            if store_averages:
                avgs.append(MeasurableFunction(a, T.space))
            ptr += 1
        if n < cps[-1]:
            g = T.apply_values(g)

    return AveragingReport(
        checkpoints=cps,
        probes=probes,
        probe_values=np.array(probe_rows),
        l1_norms=np.array(l1s),
        linf_norms=np.array(linfs),
        averages=tuple(avgs) if store_averages else None,
        weight_bound=weight_bound,
    )


def cesaro(
    T: Operator,
    f: MeasurableFunction,
    checkpoints,
    probes=(),
    store_averages: bool = True,
    max_iterations: int = DEFAULT_BUDGET,
) -> AveragingReport:
    """Plain Cesaro averages (1/n) sum_{k<n} T^k f at the checkpoints.

    T should be a certified or declared DS operator for the norm and
    majorization guarantees to mean anything; the run itself only needs
    apply().
    """
    return _stream(T, f, checkpoints, None, probes, store_averages, max_iterations)


def weighted(
    T: Operator,
    f: MeasurableFunction,
    beta: WeightSequence,
    checkpoints,
    probes=(),
    store_averages: bool = True,
    max_iterations: int = DEFAULT_BUDGET,
) -> AveragingReport:
    """Weighted averages (1/n) sum_{k<n} beta_k T^k f.

    The report records M = max(1, sup over materialized |beta_k|); the
    majorization trace compares a_n / M against f, which is the contraction
    statement that survives unbounded-looking weights.
    """
    return _stream(T, f, checkpoints, beta, probes, store_averages, max_iterations)


def oscillation(report: AveragingReport, probe: int, window) -> float:
    """Max minus min of recorded probe averages over a checkpoint window.

    `window` is an inclusive (lo, hi) range of checkpoint values n. Complex
    averages report the larger of the real-part and imaginary-part
    oscillations.
    """
    if probe not in report.probes:
        raise InputError(f"probe {probe} was not recorded")
    lo, hi = int(window[0]), int(window[1])
    sel = [i for i, n in enumerate(report.checkpoints) if lo <= n <= hi]
    if not sel:
        raise InputError("window contains no recorded checkpoints")
    col = report.probes.index(probe)
    v = report.probe_values[sel, col]
    osc_re = float(np.max(v.real) - np.min(v.real))
    osc_im = float(np.max(v.imag) - np.min(v.imag))
    return max(osc_re, osc_im)


def majorization_trace(
    report: AveragingReport, f: MeasurableFunction, tol: float = MAJORIZATION_TOL
) -> tuple[bool, ...]:
    """Per-checkpoint flags: a_n (normalized by M for weighted runs) is
    submajorized by f. Requires a full-mode report."""
    if report.averages is None:
        raise CapabilityError(
            "majorization trace needs retained averages; rerun in full mode"
        )
    scale = report.weight_bound if report.weight_bound is not None else 1.0
    flags = []
    for a in report.averages:
        candidate = a if scale == 1.0 else (1.0 / scale) * a
        flags.append(bool(majorizes(f, candidate, tol)))
    report.majorized = tuple(flags)
    return report.majorized
