"""Constructive divergence schedule for averages of a signed shift.

Feeding a non-increasing profile mu >= 1 to the signed unit shift makes the
Cesaro averages at points of (0, 1) alternate across +-1/2: each breakpoint
flips the sign of all later terms, and the greedy search picks the smallest
n where the running average crosses the next threshold on every probe.

The certificate records the breakpoints and the extremal average per stage.
Verification rebuilds the operator from scratch, streams the averages
through the generic averaging engine, checks the inequalities, and
cross-checks the streamed values against the direct sign-product formula;
disagreement beyond tolerance is a consistency failure, not a soft miss.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .averaging import cesaro
from .errors import BudgetError, ConsistencyError, InputError, WindowError
from .operators import signed_shift_operator
from .spaces import MeasurableFunction, Rearrangement

# strict inequalities must clear their threshold by more than this
STRICT_TOL = 1e-12
# allowed disagreement between the streamed and direct pipelines
CROSS_TOL = 1e-9
# greedy search cap on candidate breakpoints
DEFAULT_MAX_CANDIDATE = 200_000


@dataclass(frozen=True)
class StageCheck:
    """One alternation stage: the extremal average over the probe grid at
    checkpoint n, and how far it clears the base threshold (1 or 1/2)."""

    n: int
    side: str  # ">=1", "<-1/2", or ">1/2"
    worst_value: float
    margin: float


@dataclass(frozen=True)
class DivergenceCertificate:
    eps: float
    margin: float
    grid: int
    mode: str  # "unit-cell" (grid 1) or "full-grid"
    breakpoints: tuple[int, ...]
    stages: tuple[StageCheck, ...]


@dataclass(frozen=True)
class VerificationResult:
    ok: bool
    stage_margins: tuple[float, ...]
    max_deviation: float
    failed_stage: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def probe_points(eps: float, grid: int) -> np.ndarray:
    """Cell midpoints of the 1/grid partition lying strictly inside (eps, 1)."""
    if not 0.0 < eps < 1.0:
        raise InputError("eps must lie strictly between 0 and 1")
    if grid < 1:
        raise InputError("grid must be a positive integer")
    mids = (np.arange(int(grid)) + 0.5) / grid
    ts = mids[(mids > eps) & (mids < 1.0)]
    if ts.size == 0:
        raise InputError("no probe cells strictly inside (eps, 1); refine the grid")
    return ts


def direct_averages(rearr: Rearrangement, breakpoints, ts, ns) -> np.ndarray:
    """a_n(t) = (1/n) sum_{k<n} sign_k mu(t + k) evaluated directly.

    sign_k = (-1)^(number of breakpoints <= k). This is the closed-form
    reference pipeline; the operator stream must reproduce it.
    """
    bps = sorted(int(b) for b in breakpoints)
    ts = np.asarray(ts, dtype=float)
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])) or (ns and ns[0] < 1):
        raise InputError("evaluation points n must be strictly increasing, >= 1")
    out = np.empty((len(ns), ts.size))
    total = np.zeros(ts.size)
    ptr = 0
    for k in range(ns[-1]):
        sign = -1.0 if bisect_right(bps, k) % 2 else 1.0
        total += sign * rearr.values_at(ts + k)
        if ptr < len(ns) and k + 1 == ns[ptr]:
            out[ptr] = total / (k + 1)
            ptr += 1
    return out


def construct_certificate(
    rearr: Rearrangement,
    eps: float,
    stages: int,
    margin: float = 0.0,
    grid: int = 1,
    max_candidate: int = DEFAULT_MAX_CANDIDATE,
) -> DivergenceCertificate:
    """Greedy minimal breakpoints forcing the averages to alternate.

    Stage 1 pins n_1 = 1 (a_1 = mu(t) >= 1 on the window). Stage j then
    takes the smallest n with a_n < -(1/2 + margin) on every probe (j even)
    or a_n > 1/2 + margin (j odd); strict crossings must clear the
    threshold by more than 1e-12. The probe grid is the cell midpoints in
    (eps, 1). Running past the profile's window raises WindowError; a
    search beyond max_candidate raises BudgetError.
    """
    if stages < 1:
        raise InputError("need at least one stage")
    if margin < 0:
        raise InputError("margin must be nonnegative")
    ts = probe_points(eps, grid)
    if rearr.plateaus.size == 0 or float(rearr.plateaus[-1]) < 1.0 - STRICT_TOL:
        raise InputError("profile must stay >= 1 across its window")
    t_m = rearr.support_measure
    tmax = float(ts[-1])

    a1 = rearr.values_at(ts)
    worst1 = float(np.min(a1))
    checks = [StageCheck(1, ">=1", worst1, worst1 - 1.0)]
    if worst1 < 1.0 - STRICT_TOL:
        raise InputError("a_1 >= 1 fails on the probe grid")
    bps = [1]
    total = a1.copy()
    n = 1
    for j in range(2, stages + 1):
        sign = -1.0 if (j - 1) % 2 else 1.0
        negative = j % 2 == 0
        thr = 0.5 + margin
        while True:
            k = n  # index of the next term
            if tmax + k >= t_m:
                raise WindowError(
                    f"profile window {t_m} too short: stage {j} needs terms "
                    f"past t = {tmax + k}"
                )
            if n + 1 > max_candidate:
                raise BudgetError(
                    f"stage {j} threshold not reached within {max_candidate} terms"
                )
            total += sign * rearr.values_at(ts + k)
            n += 1
            a = total / n
            if negative:
                worst = float(np.max(a))
                if worst < -thr - STRICT_TOL:
                    break
            else:
                worst = float(np.min(a))
                if worst > thr + STRICT_TOL:
                    break
        bps.append(n)
        side = "<-1/2" if negative else ">1/2"
        base_margin = (-worst - 0.5) if negative else (worst - 0.5)
        checks.append(StageCheck(n, side, worst, base_margin))

    mode = "unit-cell" if grid == 1 else "full-grid"
    return DivergenceCertificate(
        float(eps), float(margin), int(grid), mode, tuple(bps), tuple(checks)
    )


def verify_certificate(
    cert: DivergenceCertificate, rearr: Rearrangement, tol: float = CROSS_TOL
) -> VerificationResult:
    """Independent verification of a divergence certificate.

    Rebuilds the signed shift on the certificate's grid, streams the Cesaro
    averages of the sampled profile, and checks every stage inequality at
    every probe. The streamed values are cross-checked against
    direct_averages; a deviation beyond tol raises ConsistencyError.
    Returns the verdict with the worst margin per stage (relative to the
    base thresholds 1 and 1/2).
    """
    bps = [int(b) for b in cert.breakpoints]
    if not bps or bps[0] != 1 or any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
        raise InputError("certificate breakpoints must start at 1 and increase")
    window = bps[-1]
    if rearr.support_measure + 1e-9 < window:
        raise WindowError(
            f"profile window {rearr.support_measure} shorter than the last "
            f"breakpoint {window}"
        )
    T = signed_shift_operator(bps, cert.grid, window)
    h = 1.0 / cert.grid
    mids = (np.arange(T.space.n_atoms) + 0.5) * h
    profile = MeasurableFunction(rearr.values_at(mids), T.space)
    ts = probe_points(cert.eps, cert.grid)
    probe_atoms = [int(round(t / h - 0.5)) for t in ts]
    report = cesaro(T, profile, checkpoints=bps, probes=probe_atoms,
                    store_averages=False)
    streamed = report.probe_values.real
    direct = direct_averages(rearr, bps, ts, bps)
    max_dev = float(np.max(np.abs(report.probe_values - direct)))
    if max_dev > tol:
        raise ConsistencyError(
            f"streamed averages deviate from the direct formula by {max_dev}"
        )

    ok = True
    failed = None
    margins = []
    thr = 0.5 + cert.margin
    for idx, n in enumerate(bps):
        vals = streamed[idx]
        if idx == 0:
            worst = float(np.min(vals))
            margins.append(worst - 1.0)
            stage_ok = worst >= 1.0 - STRICT_TOL
        elif idx % 2 == 1:  # even-numbered stage: below -1/2
            worst = float(np.max(vals))
            margins.append(-worst - 0.5)
            stage_ok = worst < -thr - STRICT_TOL
        else:
            worst = float(np.min(vals))
            margins.append(worst - 0.5)
            stage_ok = worst > thr + STRICT_TOL
        if not stage_ok and ok:
            ok = False
            failed = idx + 1
    return VerificationResult(ok, tuple(margins), max_dev, failed)
