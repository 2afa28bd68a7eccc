"""Closed-form repair-bandwidth computations: achievable scheme bandwidth,
the naive baseline, fractional and integer lower bounds, and the sweep
over helper-node budgets behind the bandwidth-vs-availability tables.

Logarithms that feed floor/ceil decisions are carried as exact rational
ratios; floats appear only in display fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from privrepair.errors import ValidationError


@dataclass(frozen=True)
class BoundInput:
    """Code and privacy parameters for the bound formulas.

    ``d`` optionally restricts the helper count; bounds and bandwidths are
    then re-derived on the punctured code with d+1 evaluation points.
    """

    n: int
    k: int
    t: int
    q: int
    ell: int
    d: int = None

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if self.t < 0:
            raise ValidationError("t must be >= 0")
        if self.q < 2 or self.ell < 2:
            raise ValidationError("need q >= 2 and ell >= 2")
        if self.n > self.q ** self.ell:
            raise ValidationError(f"n={self.n} exceeds the field size {self.q ** self.ell}")
        if self.k + self.t >= self.n:
            raise ValidationError(f"need k + t < n, got {self.k}+{self.t} >= {self.n}")
        if self.d is not None and not self.k + self.t <= self.d <= self.n - 1:
            raise ValidationError(f"helper count d={self.d} out of range")

    @property
    def field_order(self):
        return self.q ** self.ell

    @property
    def n_eff(self):
        return self.n if self.d is None else self.d + 1


def _floor_log(q, x):
    """floor(log_q(x)) for an exact rational x >= 1."""
    if x < 1:
        raise ValidationError("ratio below 1; no nonnegative logarithm")
    a = 0
    power = Fraction(q)
    while power <= x:
        a += 1
        power *= q
    return a


def load_factor(inp):
    """L = ((|F|-1)(n-k-t) + n-1) / |F| on the effective point count."""
    n = inp.n_eff
    big_f = inp.field_order
    return Fraction((big_f - 1) * (n - inp.k - inp.t) + (n - 1), big_f)


@dataclass(frozen=True)
class FractionalBound:
    """(n-1) * log_q(ratio) carried exactly; ``value`` is the float view."""

    n_minus_1: int
    ratio: Fraction
    base: int

    @property
    def value(self):
        return self.n_minus_1 * math.log(self.ratio) / math.log(self.base)


def fractional_bound(inp):
    n = inp.n_eff
    L = load_factor(inp)
    return FractionalBound(n_minus_1=n - 1, ratio=Fraction(n - 1) / L, base=inp.q)


def integer_bound(inp):
    """Per-node integral version of the fractional bound.

    Splits the n-1 nodes between the floor and ceiling of the per-node
    log; when the ratio is an exact power the split degenerates and every
    node contributes the same amount.
    """
    n = inp.n_eff
    q = inp.q
    L = load_factor(inp)
    ratio = Fraction(n - 1) / L
    a = _floor_log(q, ratio)
    if Fraction(q) ** a == ratio:
        return (n - 1) * a
    c = a + 1
    n0 = (L - (n - 1) * Fraction(1, q ** c)) / (Fraction(1, q ** a) - Fraction(1, q ** c))
    n0 = math.floor(n0)
    return n0 * a + (n - 1 - n0) * c


def scheme_bandwidth(inp):
    """Bandwidth of the subspace scheme at the best feasible dimension.

    Returns ``(bandwidth, m)`` or ``(None, None)`` when no dimension is
    feasible (then only the naive baseline applies).  The non-private
    scheme (t=0) has the same feasibility window as t=1.
    """
    n = inp.n_eff
    headroom = n - inp.k - max(inp.t, 1) + 1
    if headroom < inp.q:
        return None, None
    m = min(_floor_log(inp.q, Fraction(headroom)), inp.ell - 1)
    return (n - 1) * (inp.ell - m), m


def naive_bandwidth(inp):
    return inp.k * inp.ell


@dataclass(frozen=True)
class BandwidthReport:
    scheme_bandwidth: int
    best_m: int
    naive: int
    fractional: FractionalBound
    integer: int
    attained: bool


def bandwidth_report(inp):
    bw, m = scheme_bandwidth(inp)
    ib = integer_bound(inp)
    return BandwidthReport(
        scheme_bandwidth=bw,
        best_m=m,
        naive=naive_bandwidth(inp),
        fractional=fractional_bound(inp),
        integer=ib,
        attained=bw == ib,
    )


# ----------------------------------------------------------------------
# Sweep over the helper budget
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    d: int
    bw_private: int
    bw_plain: int
    bound_private: int
    bound_plain: int
    m_private: int
    m_plain: int
    attained: bool


def _best_over_budget(k, t, q, ell, d):
    """Minimum scheme bandwidth over all helper counts d' <= d, treating
    d'+1 surviving evaluation points as a punctured (still RS) code.
    Naive download of k full symbols is reported only when no subspace
    dimension is feasible at any allowed budget."""
    best = None
    for d_prime in range(k + t, d + 1):
        inp = BoundInput(n=d_prime + 1, k=k, t=t, q=q, ell=ell)
        bw, m = scheme_bandwidth(inp)
        if bw is not None and (best is None or bw < best[0]):
            best = (bw, m)
    return best if best is not None else (k * ell, 0)


def _best_bound_over_budget(k, t, q, ell, d):
    best = None
    for d_prime in range(k + t, d + 1):
        b = integer_bound(BoundInput(n=d_prime + 1, k=k, t=t, q=q, ell=ell))
        if best is None or b < best:
            best = b
    return best


def sweep(k, t, q, ell, d_lo, d_hi):
    """One row per helper budget d; monotone nonincreasing columns."""
    if d_lo > d_hi:
        raise ValidationError(f"empty range {d_lo}..{d_hi}")
    if d_lo < k + t:
        raise ValidationError(f"d must be at least k + t = {k + t}")
    if d_hi > q ** ell - 1:
        raise ValidationError(f"d={d_hi} exceeds n-1 for the full-length code")
    rows = []
    for d in range(d_lo, d_hi + 1):
        bw_priv, m_priv = _best_over_budget(k, t, q, ell, d)
        bw_plain, m_plain = _best_over_budget(k, 0, q, ell, d)
        bound_priv = _best_bound_over_budget(k, t, q, ell, d)
        bound_plain = _best_bound_over_budget(k, 0, q, ell, d)
        rows.append(SweepRow(
            d=d, bw_private=bw_priv, bw_plain=bw_plain,
            bound_private=bound_priv, bound_plain=bound_plain,
            m_private=m_priv, m_plain=m_plain,
            attained=bw_priv == bound_priv,
        ))
    return rows


SWEEP_HEADER = "d,bw_private,bw_plain,bound_private,bound_plain,m_private,m_plain,attained"


def sweep_csv(rows):
    lines = [SWEEP_HEADER]
    for r in rows:
        lines.append(
            f"{r.d},{r.bw_private},{r.bw_plain},{r.bound_private},"
            f"{r.bound_plain},{r.m_private},{r.m_plain},"
            f"{'true' if r.attained else 'false'}")
    return "\n".join(lines) + "\n"
