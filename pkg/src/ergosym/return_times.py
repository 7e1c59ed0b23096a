"""Return-time product averages and Wiener-Wintner frequency sweeps.

A point system is an atom set with a weight-preserving bijection acting on
it. Product averages (1/n) sum_k f(tau^k w) g(phi^k y) couple two systems
along paired orbits; the Wiener-Wintner sweep evaluates the twisted
averages (1/n) sum_k lam^k f(tau^k w) for a whole grid of unimodular lam
from a single orbit traversal. For rational rotations the sweep has a
closed form (finite geometric series), used as the oracle.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import pi

import numpy as np

from .averaging import DEFAULT_BUDGET, _validated_checkpoints
from .errors import BudgetError, InputError
from .spaces import AtomicMeasureSpace, MeasurableFunction
from .weights import UNIT_TOL, unit_powers_matrix

# |1 - q| below this flags a resonant grid point (slow geometric decay)
RESONANCE_TOL = 1e-6


@dataclass(eq=False)
class PointSystem:
    """Atom set with a weight-preserving bijection tau."""

    space: AtomicMeasureSpace
    tau: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.tau, dtype=int)
        n = self.space.n_atoms
        if t.shape != (n,):
            raise InputError("tau needs one image per atom")
        if np.any(t < 0) or np.any(t >= n) or np.unique(t).size != n:
            raise InputError("tau must be a bijection of the atom set")
        w = self.space.weights
        if np.max(np.abs(w[t] - w)) > 1e-12 * max(1.0, float(np.max(w))):
            raise InputError("tau must preserve atom weights")
        self.tau = t

    @classmethod
    def cyclic(cls, order: int, step: int = 1, weight: float = 1.0, label: str = ""):
        """Cyclic shift i -> i + step (mod order) on uniform atoms."""
        if order < 1:
            raise InputError("cyclic systems need at least one atom")
        space = AtomicMeasureSpace.uniform(order, weight)
        tau = (np.arange(order) + step) % order
        return cls(space, tau, label)

    def orbit(self, start: int, n: int) -> np.ndarray:
        """Atom indices tau^k(start) for k < n."""
        if start < 0 or start >= self.space.n_atoms:
            raise InputError("orbit start out of range")
        pos = np.empty(n, dtype=int)
        p = int(start)
        tau = self.tau
        for k in range(n):
            pos[k] = p
            p = int(tau[p])
        return pos


@dataclass(eq=False)
class ProductAverageReport:
    """Product averages per checkpoint (rows) and probe pair (columns)."""

    checkpoints: tuple[int, ...]
    probes: tuple[tuple[int, int], ...]
    averages: np.ndarray


def product_average(
    system_a: PointSystem,
    f: MeasurableFunction,
    system_b: PointSystem,
    g: MeasurableFunction,
    probes,
    checkpoints,
    max_iterations: int = DEFAULT_BUDGET,
) -> ProductAverageReport:
    """Averages (1/n) sum_{k<n} f(tau^k w) g(phi^k y) at the checkpoints,
    for each probe pair (w, y). One orbit traversal per system per probe."""
    cps = _validated_checkpoints(checkpoints)
    if cps[-1] > max_iterations:
        raise BudgetError(
            f"last checkpoint {cps[-1]} exceeds the iteration budget {max_iterations}"
        )
    if not system_a.space.is_compatible(f.space):
        raise InputError("f must live on the first system's space")
    if not system_b.space.is_compatible(g.space):
        raise InputError("g must live on the second system's space")
    pairs = tuple((int(a), int(b)) for a, b in probes)
    if not pairs:
        raise InputError("need at least one probe pair")
    n_max = cps[-1]
    idx = np.array(cps) - 1
    ns = np.array(cps, dtype=float)
    out = np.empty((len(cps), len(pairs)), dtype=complex)
    for col, (wa, yb) in enumerate(pairs):
        fo = f.values[system_a.orbit(wa, n_max)]
        go = g.values[system_b.orbit(yb, n_max)]
        csum = np.cumsum(fo * go)
        out[:, col] = csum[idx] / ns
    return ProductAverageReport(cps, pairs, out)


@dataclass(eq=False)
class SweepResult:
    """Twisted averages over a uniform frequency grid.

    averages[j, p, c] is the average at lambda_j = exp(2 pi i j / G), probe
    p, checkpoint c; oscillations hold the max-minus-min of each
    (lambda, probe) trace over the recorded checkpoints (real/imag split).
    """

    lambdas: np.ndarray
    probes: tuple[int, ...]
    checkpoints: tuple[int, ...]
    averages: np.ndarray
    oscillations: np.ndarray


def wiener_wintner_sweep(
    system: PointSystem,
    f: MeasurableFunction,
    probes,
    grid_size: int,
    checkpoints,
    max_iterations: int = DEFAULT_BUDGET,
) -> SweepResult:
    """Sweep (1/n) sum_{k<n} lam^k f(tau^k w) over the G-point unit-circle
    grid; a single orbit traversal per probe feeds all per-lambda
    accumulators."""
    cps = _validated_checkpoints(checkpoints)
    if cps[-1] > max_iterations:
        raise BudgetError(
            f"last checkpoint {cps[-1]} exceeds the iteration budget {max_iterations}"
        )
    if not system.space.is_compatible(f.space):
        raise InputError("f must live on the system's space")
    if grid_size < 1:
        raise InputError("frequency grid needs at least one point")
    probes = tuple(int(p) for p in probes)
    if not probes:
        raise InputError("need at least one probe")
    g = int(grid_size)
    lams = np.exp(2j * pi * np.arange(g) / g)
    assert np.max(np.abs(np.abs(lams) - 1.0)) <= UNIT_TOL
    n_max = cps[-1]
    powers = unit_powers_matrix(lams, n_max)
    idx = np.array(cps) - 1
    ns = np.array(cps, dtype=float)
    avgs = np.empty((g, len(probes), len(cps)), dtype=complex)
    for p, start in enumerate(probes):
        fo = f.values[system.orbit(start, n_max)]
        csum = np.cumsum(powers * fo[np.newaxis, :], axis=1)
        avgs[:, p, :] = csum[:, idx] / ns
    osc = np.maximum(
        avgs.real.max(axis=2) - avgs.real.min(axis=2),
        avgs.imag.max(axis=2) - avgs.imag.min(axis=2),
    )
    return SweepResult(lams, probes, cps, avgs, osc)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, tuple):
        return Fraction(*x)
    if isinstance(x, int):
        return Fraction(x)
    raise InputError("rational angles must be Fraction, int, or (num, den)")


def _cycles(phase: float) -> complex:
    return cmath.exp(2j * pi * phase)


def rotation_q(rho, lam):
    """Decay ratio q = lam e^{2 pi i rho} of the twisted rotation average.

    Returns (q, exact_resonance). With lam given as a Fraction (its phase
    in cycles) resonance q == 1 is decided exactly in integer arithmetic.
    """
    rho = _as_fraction(rho)
    if isinstance(lam, (Fraction, int, tuple)):
        q_phase = (_as_fraction(lam) + rho) % 1
        return _cycles(float(q_phase)), q_phase == 0
    q = complex(lam) * _cycles(float(rho % 1))
    return q, q == 1.0 + 0j


def rotation_closed_form(rho, lam, omega_phase: float, n: int) -> complex:
    """Closed form of (1/n) sum_{k<n} lam^k e^{2 pi i (omega + k rho)}.

    rho is the rotation angle in cycles, as an exact rational; omega_phase
    is the starting phase in cycles. The value is
    e^{2 pi i omega} (1 - q^n) / (n (1 - q)) with q = lam e^{2 pi i rho},
    and exactly e^{2 pi i omega} at resonance q = 1. Pass lam as a Fraction
    phase for exact resonance detection and drift-free q^n.
    """
    if n < 1:
        raise InputError("closed form needs n >= 1")
    rho = _as_fraction(rho)
    front = _cycles(float(omega_phase))
    if isinstance(lam, (Fraction, int, tuple)):
        q_phase = (_as_fraction(lam) + rho) % 1
        if q_phase == 0:
            return front
        q = _cycles(float(q_phase))
        qn = _cycles(float((n * q_phase) % 1))
    else:
        q, resonant = rotation_q(rho, lam)
        if resonant:
            return front
        qn = q**n
    return front * (1.0 - qn) / (n * (1.0 - q))
