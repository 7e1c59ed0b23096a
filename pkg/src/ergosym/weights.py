"""Bounded weight sequences and trigonometric-polynomial approximants.

A weight sequence is Besicovitch-style admissible when it is bounded and
approximated, in averaged absolute deviation, by trigonometric polynomials
sum_j z_j lam_j^k with unimodular frequencies. Periodic sequences are
reproduced exactly by their DFT interpolant, which is the workhorse here.

Power streams lam^k are materialized by repeated multiplication with the
magnitude reset to 1 every RENORM_EVERY steps, so |lam^k| cannot drift over
long horizons. Frequencies with a known rational phase (the DFT case) are
evaluated through exact integer phase reduction instead, which keeps the
reproduction error at roundoff level even at k ~ 1e5.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import pi

import numpy as np

from .errors import InputError

# tolerance for |frequency| == 1 checks
UNIT_TOL = 1e-12
# magnitude renormalization cadence for power streams
RENORM_EVERY = 1024


def unit_powers_matrix(
    lams: np.ndarray, n: int, renorm_every: int = RENORM_EVERY
) -> np.ndarray:
    """Rows of lam^k, k < n, for several unimodular lam at once."""
    lams = np.atleast_1d(np.asarray(lams, dtype=complex))
    out = np.empty((lams.size, n), dtype=complex)
    if n == 0:
        return out
    base = np.ones(lams.size, dtype=complex)
    for start in range(0, n, renorm_every):
        m = min(renorm_every, n - start)
        out[:, start] = base
        if m > 1:
            out[:, start + 1 : start + m] = base[:, None] * np.cumprod(
                np.broadcast_to(lams[:, None], (lams.size, m - 1)), axis=1
            )
        nxt = out[:, start + m - 1] * lams
        base = nxt / np.abs(nxt)
    return out


def unit_powers(lam: complex, n: int, renorm_every: int = RENORM_EVERY) -> np.ndarray:
    """lam^k for k < n with periodic magnitude renormalization."""
    return unit_powers_matrix(np.array([lam]), n, renorm_every)[0]


@dataclass(frozen=True)
class TrigTerm:
    """One term z * lam^k; `phase` is the exact phase of lam in cycles when
    known (lam = exp(2 pi i phase)), enabling drift-free evaluation."""

    coefficient: complex
    frequency: complex
    phase: Fraction | None = None

    def __post_init__(self):
        if abs(abs(self.frequency) - 1.0) > UNIT_TOL:
            raise InputError("trig polynomial frequencies must be unimodular")

    @classmethod
    def from_phase(cls, coefficient: complex, phase: Fraction):
        freq = complex(
            np.cos(2.0 * pi * float(phase)), np.sin(2.0 * pi * float(phase))
        )
        return cls(coefficient, freq, phase)


@dataclass(frozen=True)
class TrigPolynomial:
    """P(k) = sum_j z_j lam_j^k with at least one term."""

    terms: tuple[TrigTerm, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if len(terms) == 0:
            raise InputError("trig polynomials need at least one term")
        object.__setattr__(self, "terms", terms)

    @property
    def coefficient_bound(self) -> float:
        """Triangle-inequality bound sum_j |z_j| on |P(k)|."""
        return float(sum(abs(t.coefficient) for t in self.terms))

    def evaluate(self, k: int) -> complex:
        if k < 0:
            raise InputError("trig polynomials are evaluated at k >= 0")
        total = 0j
        for t in self.terms:
            if t.phase is not None:
                den = t.phase.denominator
                r = (t.phase.numerator * k) % den
                total += t.coefficient * np.exp(2j * pi * r / den)
            else:
                total += t.coefficient * t.frequency**k
        return complex(total)

    def values(self, n: int) -> np.ndarray:
        """P(k) for k < n; exact phase reduction where available."""
        out = np.zeros(n, dtype=complex)
        ks = np.arange(n)
        for t in self.terms:
            if t.phase is not None:
                den = t.phase.denominator
                roots = np.exp(2j * pi * np.arange(den) / den)
                out += t.coefficient * roots[(t.phase.numerator * ks) % den]
            else:
                out += t.coefficient * unit_powers(t.frequency, n)
        return out


_KINDS = ("constant", "periodic", "trig_poly", "lambda_power", "explicit")


@dataclass(frozen=True, eq=False)
class WeightSequence:
    """Bounded sequence k -> beta_k with a declared bound C.

    Kinds: constant, periodic (repeating list), trig_poly, lambda_power
    (beta_k = lam^k, |lam| = 1), explicit (finite list; evaluation past the
    end is a range error).
    """

    kind: str
    bound: float
    table: np.ndarray | None = None
    poly: TrigPolynomial | None = None
    lam: complex | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InputError(f"unknown weight kind {self.kind!r}")
        if not np.isfinite(self.bound) or self.bound < 0:
            raise InputError("weight bound must be finite and nonnegative")

    @classmethod
    def constant(cls, c: complex):
        return cls("constant", abs(c), table=np.array([c], dtype=complex))

    @classmethod
    def periodic(cls, vals):
        v = np.asarray(vals, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise InputError("periodic weights need a nonempty value list")
        return cls("periodic", float(np.max(np.abs(v))), table=v)

    @classmethod
    def trig_poly(cls, poly: TrigPolynomial):
        return cls("trig_poly", poly.coefficient_bound, poly=poly)

    @classmethod
    def lambda_power(cls, lam: complex):
        if abs(abs(lam) - 1.0) > UNIT_TOL:
            raise InputError("lambda_power weights need |lambda| = 1")
        return cls("lambda_power", 1.0, lam=complex(lam))

    @classmethod
    def explicit(cls, vals, bound: float | None = None):
        """Finite list with a declared bound. A declared bound smaller than
        the actual sup is accepted here and flagged by validate_bound."""
        v = np.asarray(vals, dtype=complex)
        if v.ndim != 1 or v.size == 0:
            raise InputError("explicit weights need a nonempty value list")
        if bound is None:
            bound = float(np.max(np.abs(v)))
        return cls("explicit", float(bound), table=v)

    def values(self, n: int) -> np.ndarray:
        """Materialize beta_k for k < n."""
        if n < 0:
            raise InputError("cannot materialize a negative prefix")
        if self.kind == "constant":
            return np.full(n, self.table[0])
        if self.kind == "periodic":
            reps = -(-n // self.table.size)
            return np.tile(self.table, reps)[:n]
        if self.kind == "trig_poly":
            return self.poly.values(n)
        if self.kind == "lambda_power":
            return unit_powers(self.lam, n)
        if n > self.table.size:
            raise InputError(
                f"explicit weight list exhausted: need {n} values, have "
                f"{self.table.size}"
            )
        return self.table[:n].copy()


def eval_weight(w: WeightSequence, k: int) -> complex:
    """Single weight beta_k."""
    if k < 0:
        raise InputError("weights are indexed by k >= 0")
    if w.kind == "constant":
        return complex(w.table[0])
    if w.kind == "periodic":
        return complex(w.table[k % w.table.size])
    if w.kind == "trig_poly":
        return w.poly.evaluate(k)
    if w.kind == "lambda_power":
        return complex(w.values(k + 1)[k])
    if k >= w.table.size:
        raise InputError(f"explicit weight list exhausted at k={k}")
    return complex(w.table[k])


def validate_bound(w: WeightSequence, n: int) -> bool:
    """Check |beta_k| <= C + 1e-12 on the materialized prefix k < n."""
    vals = w.values(n)
    if vals.size == 0:
        return True
    return float(np.max(np.abs(vals))) <= w.bound + UNIT_TOL


def besicovitch_deviation(w: WeightSequence, poly: TrigPolynomial, n: int) -> float:
    """Averaged deviation (1/n) sum_{k<n} |beta_k - P(k)|."""
    if n < 1:
        raise InputError("deviation needs n >= 1")
    return float(np.mean(np.abs(w.values(n) - poly.values(n))))


def dft_interpolant(vals) -> TrigPolynomial:
    """Exact interpolant of a period-p list: frequencies exp(2 pi i j / p),
    coefficients (1/p) sum_k beta_k exp(-2 pi i j k / p).

    All p terms are kept, including (near-)zero coefficients; the phases are
    stored exactly so the interpolant reproduces the source at roundoff
    level over arbitrary horizons.
    """
    v = np.asarray(vals, dtype=complex)
    if v.ndim != 1 or v.size == 0:
        raise InputError("interpolation needs a nonempty period of values")
    p = v.size
    coeffs = np.fft.fft(v) / p
    terms = tuple(
        TrigTerm.from_phase(complex(coeffs[j]), Fraction(j, p)) for j in range(p)
    )
    return TrigPolynomial(terms)


def limsup_deviation(
    w: WeightSequence, poly: TrigPolynomial, n_max: int, samples: int = 16
) -> float:
    """Estimate limsup_n of the averaged deviation.

    Samples n along a geometric grid up to n_max and reports the running
    max over the tail half of the samples; an estimate, not a certificate.
    """
    if n_max < 2 or samples < 2:
        raise InputError("need n_max >= 2 and samples >= 2")
    grid = np.unique(
        np.geomspace(2, n_max, num=samples).astype(int)
    )
    devs = [besicovitch_deviation(w, poly, int(n)) for n in grid]
    tail = devs[len(devs) // 2 :]
    return float(max(tail))
