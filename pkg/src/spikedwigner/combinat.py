"""Exact Catalan and even-cycle combinatorics behind the trace-moment sums.

Everything in this module is integer or rational arithmetic unless a function
is explicitly log-space.  The three generating sums have the shapes

    s1(theta, p)   = sum_{s>=1, s<=l<=p-s/2} C(2p-2l-1, s-1) theta^(2p-2l)
                     * [sum over positive tuples l_1+..+l_s = l of Cat(l_1)..Cat(l_s)]
    s2(theta, p)   = sum_{1<=l<=p-1, 1<=t<=l+1, 0<=q<=t-1}
                     theta^(2p-2l) C(t, q+1) C(2p-2l-1, q) b[l][t]
    s_of_M(p, M)   = M^(2p) + sum_{1<=l<=p-1} M^(2l)
                     * sum_{t, l0} C(l-l0+t-1, l-l0) C(t, 2l0) b[p-l][t]

where b[l][t] counts vertices of multiplicity t over the Catalan family of
even-cycle classes of length 2l (realized as Euler tours of rooted plane
trees).  Their normalized large-p limits recover the spectral-edge functions
F^2, f^2 checked in :mod:`spikedwigner.limits`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.special import gammaln

__all__ = [
    "catalan",
    "catalan_table",
    "sigma_conv",
    "positive_conv",
    "verify_shift_identity",
    "r_tail",
    "verify_conv_bounds",
    "CycleClassTable",
    "enumerate_cycle_classes",
    "verify_multiplicity_bounds",
    "s1",
    "log_s1",
    "s2",
    "s2_proxy",
    "s_of_M",
    "SumTable",
    "build_sum_table",
    "CYCLE_CAP",
]

CYCLE_CAP = 12  # largest half-length enumerated exactly (Catalan(12) = 208012 classes)


# --------------------------------------------------------------------------- #
# Catalan numbers and convolution powers
# --------------------------------------------------------------------------- #

def catalan(l: int) -> int:
    """Catalan number binom(2l, l)/(l+1), exact."""
    if l < 0:
        raise ValueError("catalan requires l >= 0")
    return math.comb(2 * l, l) // (l + 1)


def catalan_table(lmax: int) -> List[int]:
    """[C_0, ..., C_lmax]."""
    return [catalan(l) for l in range(lmax + 1)]


def sigma_conv(l: int, s: int) -> int:
    """Convolution power: sum over l_1,...,l_s >= 0 with sum l of Cat(l_1)...Cat(l_s).

    Computed by repeated truncated convolution, all integers exact.
    """
    if l < 0 or s < 1:
        raise ValueError("sigma_conv requires l >= 0 and s >= 1")
    cats = catalan_table(l)
    row = list(cats)
    for _ in range(s - 1):
        row = [sum(cats[i] * row[j - i] for i in range(j + 1)) for j in range(l + 1)]
    return row[l]


def positive_conv(l: int, s: int) -> int:
    """Sum over strictly positive tuples l_1+...+l_s = l of Cat(l_1)...Cat(l_s).

    Returns 0 for l < s (no positive tuple exists).
    """
    if s < 1:
        raise ValueError("positive_conv requires s >= 1")
    if l < s:
        return 0
    cats = catalan_table(l)
    row = cats[: l + 1]
    row = list(row)
    row[0] = 0  # positive parts only
    cur = list(row)
    for _ in range(s - 1):
        cur = [sum(row[i] * cur[j - i] for i in range(1, j)) if j >= 2 else 0
               for j in range(l + 1)]
    return cur[l]


def _positive_conv_closed(l: int, s: int) -> int:
    """(s/l) * binom(2l, l-s): the ballot-style closed form of positive_conv."""
    if l < s:
        return 0
    num = s * math.comb(2 * l, l - s)
    if num % l:
        raise ArithmeticError("closed-form convolution is not an integer")
    return num // l


def verify_shift_identity(l: int, s: int) -> bool:
    """Check that the positive s-part sum equals the nonnegative 2s-part sum at l-s.

    Both sides exact; they are computed by different recursions so the check
    is not circular.
    """
    if not (1 <= s <= l):
        raise ValueError("requires 1 <= s <= l")
    return positive_conv(l, s) == sigma_conv(l - s, 2 * s)


# --------------------------------------------------------------------------- #
# tail sums of C_i / 4^i
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class TailSumEstimate:
    """Partial sum of sum_{i >= l} C_i/4^i with a rigorous remainder bound."""

    l: int
    value: float
    error_bound: float


@lru_cache(maxsize=None)
def _r_tail_fraction(l: int, terms: int = 200) -> Fraction:
    """Exact partial sum of sum_{i=l}^{l+terms} C_i/4^i (a certified lower bound)."""
    total = Fraction(0)
    for i in range(l, l + terms + 1):
        total += Fraction(catalan(i), 4 ** i)
    return total


def r_tail(l: int, terms: int = 200) -> TailSumEstimate:
    """sum_{i >= l} C_i/4^i as partial sum plus remainder bound.

    Remainder: C_i/4^i = binom(2i,i)/(4^i (i+1)) <= 1/(sqrt(pi) i^(3/2)), so the
    tail beyond L is at most 2/(sqrt(pi) sqrt(L-1)).  The full series sums to 2.
    """
    if l < 0:
        raise ValueError("r_tail requires l >= 0")
    partial = float(_r_tail_fraction(l, terms))
    cutoff = l + terms + 1
    bound = 2.0 / (math.sqrt(math.pi) * math.sqrt(cutoff - 1))
    return TailSumEstimate(l, partial, bound)


@dataclass(frozen=True)
class ConvBoundReport:
    """Outcome of the convolution-power sandwich at a single (l, s)."""

    l: int
    s: int
    sigma: int
    upper_bound_ok: bool
    lower_bound_ok: Optional[bool]  # None when l <= s (lower bound not claimed)
    upper_slack: float
    lower_slack: Optional[float]


def verify_conv_bounds(l: int, s: int, zero_first_tail: bool = False,
                       terms: int = 200) -> ConvBoundReport:
    """Check 2^-s C_{l+s} prod_i (1 + r(i)/2) >= sigma(l, s) >= (C_l/4)((5/4)^s - 1).

    The upper bound is evaluated with certified rational lower bounds for the
    tails r(i), so a pass is a proof of the inequality instance.  The lower
    bound (claimed only for l > s) is exact rational on both sides.

    ``zero_first_tail`` replaces r(0) by 0; with that stricter convention the
    upper bound is genuinely false at (l, s) = (1, 2), so the default keeps the
    raw series value r(0) = 2.
    """
    if l < 1 or s < 1:
        raise ValueError("requires l, s >= 1")
    sig = sigma_conv(l, s)

    prod = Fraction(1)
    for i in range(s):
        if i == 0 and zero_first_tail:
            continue
        prod *= 1 + _r_tail_fraction(i, terms) / 2
    upper = Fraction(catalan(l + s), 2 ** s) * prod
    upper_ok = sig <= upper
    upper_slack = float(upper - sig)

    if l > s:
        lower = Fraction(catalan(l), 4) * (Fraction(5, 4) ** s - 1)
        lower_ok = sig >= lower
        lower_slack = float(sig - lower)
    else:
        lower_ok = None
        lower_slack = None
    return ConvBoundReport(l, s, sig, upper_ok, lower_ok, upper_slack, lower_slack)


# --------------------------------------------------------------------------- #
# even-cycle classes as Euler tours of rooted plane trees
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class CycleClassTable:
    """Vertex-multiplicity census of the even-cycle classes of length 2l.

    ``b[t]`` counts, over all classes, the vertices appearing exactly t times
    in the closed tour (the root is counted at both endpoints).
    """

    l: int
    b: Dict[int, int]
    class_count: int

    def totals_ok(self) -> bool:
        cl = catalan(self.l)
        vertices = sum(self.b.values())
        positions = sum(t * cnt for t, cnt in self.b.items())
        return (self.class_count == cl
                and vertices == (self.l + 1) * cl
                and positions == (2 * self.l + 1) * cl)


def _dyck_paths(l: int) -> Iterator[Tuple[int, ...]]:
    """All +1/-1 ballot sequences of length 2l (lexicographic)."""
    path: List[int] = []

    def rec(ups: int, downs: int):
        if ups == l and downs == l:
            yield tuple(path)
            return
        if ups < l:
            path.append(1)
            yield from rec(ups + 1, downs)
            path.pop()
        if downs < ups:
            path.append(-1)
            yield from rec(ups, downs + 1)
            path.pop()

    yield from rec(0, 0)


def _tour_multiplicities(path: Tuple[int, ...]) -> List[int]:
    """Vertex multiplicities of the closed Euler tour encoded by a Dyck path."""
    counts = [1]  # root seen at position 0
    stack = [0]
    for step in path:
        if step == 1:
            counts.append(1)
            stack.append(len(counts) - 1)
        else:
            stack.pop()
            counts[stack[-1]] += 1
    return counts


@lru_cache(maxsize=None)
def enumerate_cycle_classes(l: int, cap: int = CYCLE_CAP) -> CycleClassTable:
    """Census b[t] over all rooted plane trees with l edges via their Euler tours."""
    if not (1 <= l <= cap):
        raise ValueError(f"l must lie in [1, {cap}]")
    b: Dict[int, int] = {}
    n_classes = 0
    for path in _dyck_paths(l):
        n_classes += 1
        for t in _tour_multiplicities(path):
            b[t] = b.get(t, 0) + 1
    return CycleClassTable(l, dict(sorted(b.items())), n_classes)


@dataclass(frozen=True)
class MultiplicityBoundReport:
    l: int
    all_ok: bool
    failures: Tuple[Tuple[int, str], ...]  # (t, which side)


def verify_multiplicity_bounds(l: int, cap: int = CYCLE_CAP) -> MultiplicityBoundReport:
    """Check binom(2l+1-t, l)/(4l) <= b[l][t] <= (l+1)^120 binom(2l+1-t, l).

    All quantities exact integers (the lower bound is cleared of its
    denominator), so the verdict is rigorous.
    """
    table = enumerate_cycle_classes(l, cap)
    failures = []
    for t in range(1, l + 2):
        blt = table.b.get(t, 0)
        ref = math.comb(2 * l + 1 - t, l)
        if 4 * l * blt < ref:
            failures.append((t, "lower"))
        if blt > (l + 1) ** 120 * ref:
            failures.append((t, "upper"))
    return MultiplicityBoundReport(l, not failures, tuple(failures))


# --------------------------------------------------------------------------- #
# the generating sums
# --------------------------------------------------------------------------- #

def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 12)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def s1(theta, p: int) -> Fraction:
    """Exact rational value of the delocalized-spike generating sum."""
    if p < 1:
        raise ValueError("s1 requires p >= 1")
    th = _as_fraction(theta)
    th2 = th * th
    total = Fraction(0)
    for l in range(1, p):
        smax = min(l, 2 * (p - l))
        inner = Fraction(0)
        for s in range(1, smax + 1):
            inner += math.comb(2 * p - 2 * l - 1, s - 1) * positive_conv(l, s)
        total += th2 ** (p - l) * inner
    return total


def log_s1(theta: float, p: int) -> float:
    """log s1(theta, p) in log space; safe up to p ~ 1000.

    Uses the closed form (s/l) binom(2l, l-s) for the inner positive tuple sum.
    """
    if p < 1:
        raise ValueError("log_s1 requires p >= 1")
    if theta < 0:
        raise ValueError("log_s1 requires theta >= 0")
    terms = []
    logth = math.log(theta) if theta > 0 else -math.inf
    for l in range(1, p):
        smax = min(l, 2 * (p - l))
        if smax < 1:
            continue
        s = np.arange(1, smax + 1, dtype=float)
        m = 2 * p - 2 * l - 1
        log_binom = gammaln(m + 1) - gammaln(s) - gammaln(m - s + 2)
        log_conv = (np.log(s) - math.log(l)
                    + gammaln(2 * l + 1) - gammaln(l - s + 1) - gammaln(l + s + 1))
        terms.append(log_binom + log_conv + (2 * p - 2 * l) * logth)
    if not terms:
        return -math.inf
    flat = np.concatenate(terms)
    top = float(np.max(flat))
    if top == -math.inf:
        return -math.inf
    return top + math.log(float(np.sum(np.exp(flat - top))))


def s2(theta, p: int, cap: int = CYCLE_CAP) -> Fraction:
    """Exact rational value of the localized-spike generating sum.

    Requires the exact multiplicity census up to half-length p-1, hence
    p - 1 <= cap.
    """
    if p < 1:
        raise ValueError("s2 requires p >= 1")
    if p - 1 > cap:
        raise ValueError(f"s2 exact mode needs p - 1 <= {cap}; use s2_proxy beyond")
    th = _as_fraction(theta)
    th2 = th * th
    total = Fraction(0)
    for l in range(1, p):
        table = enumerate_cycle_classes(l, cap).b
        inner = 0
        for t in range(1, l + 2):
            blt = table.get(t, 0)
            if not blt:
                continue
            for q in range(t):
                inner += math.comb(t, q + 1) * math.comb(2 * p - 2 * l - 1, q) * blt
        total += th2 ** (p - l) * inner
    return total


def s2_proxy(theta: float, p: int) -> float:
    """Estimate of s2 beyond the exact census cap, flagged by its name.

    Substitutes the binomial proxy binom(2l+1-t, l) for b[l][t]; correct up to
    the polynomial factors allowed by the census sandwich, so only useful for
    growth-rate checks.
    """
    if p < 1:
        raise ValueError("s2_proxy requires p >= 1")
    total = 0.0
    for l in range(1, p):
        inner = 0.0
        for t in range(1, l + 2):
            proxy = math.comb(2 * l + 1 - t, l)
            for q in range(t):
                inner += math.comb(t, q + 1) * math.comb(2 * p - 2 * l - 1, q) * proxy
        total += theta ** (2 * p - 2 * l) * inner
    return total


def s_of_M(p: int, M, cap: int = CYCLE_CAP) -> Fraction:
    """Exact rational value of the conditional trace-difference sum s(p, M)."""
    if p < 1:
        raise ValueError("s_of_M requires p >= 1")
    if p - 1 > cap:
        raise ValueError(f"s_of_M exact mode needs p - 1 <= {cap}")
    m = _as_fraction(M)
    m2 = m * m
    total = m2 ** p
    for l in range(1, p):
        table = enumerate_cycle_classes(p - l, cap).b
        inner = 0
        for t in range(1, p - l + 2):
            bplt = table.get(t, 0)
            if not bplt:
                continue
            for l0 in range(0, min(t // 2, l) + 1):
                inner += (math.comb(l - l0 + t - 1, l - l0)
                          * math.comb(t, 2 * l0) * bplt)
        total += m2 ** l * inner
    return total


# --------------------------------------------------------------------------- #
# tabulation helper
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class SumTable:
    """Exact values of the generating sums over a range of p."""

    theta: Fraction
    M: Fraction
    s1_values: Dict[int, Fraction]
    s2_values: Dict[int, Fraction]
    s_of_M_values: Dict[int, Fraction]
    sigma_values: Dict[Tuple[int, int], int]


def build_sum_table(theta, M, p_range, sigma_range=(), cap: int = CYCLE_CAP) -> SumTable:
    """Tabulate s1/s2/s_of_M over ``p_range`` and sigma over ``sigma_range`` pairs."""
    th = _as_fraction(theta)
    m = _as_fraction(M)
    s1_vals = {p: s1(th, p) for p in p_range}
    s2_vals = {p: s2(th, p, cap) for p in p_range if p - 1 <= cap}
    sm_vals = {p: s_of_M(p, m, cap) for p in p_range if p - 1 <= cap}
    sig_vals = {(l, s): sigma_conv(l, s) for (l, s) in sigma_range}
    return SumTable(th, m, s1_vals, s2_vals, sm_vals, sig_vals)
