"""Pullback of binomials to the charts of a stacky fan and per-chart verdicts."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from sympy import factorint, integer_nthroot

from .errors import (
    DimensionMismatch,
    IrrationalRoot,
    NotSchoen,
    TooManyMembers,
)
from .fantastack import Chart, StackyFan
from .intlinalg import Vector, minors_gcd, rank, rank_mod, vgcd
from .parser import Binomial, BinomialSystem

MAX_MEMBERS = 12


@dataclass(frozen=True)
class PulledBinomial:
    """``x^W * (x^U - lam * x^V)`` on the n chart coordinates.

    ``U``, ``V`` and ``lam`` are ``None`` for a monomial.
    """

    source: int
    W: Vector
    U: Vector | None = None
    V: Vector | None = None
    lam: Fraction | None = None
    multiplicity: int = 1

    @property
    def is_pure(self) -> bool:
        return self.U is not None

    @property
    def kind(self) -> str:
        return "pure" if self.is_pure else "monomial"


def _apply(M_rows, vec) -> Vector:
    # M^T @ vec, with M given row-major (m rows)
    n = len(M_rows[0])
    return tuple(sum(M_rows[i][j] * vec[i] for i in range(len(vec))) for j in range(n))


def pull_one(b: Binomial, sf: StackyFan, source: int = 0) -> PulledBinomial:
    if b.dim != sf.m:
        raise DimensionMismatch(f"binomial has {b.dim} variables, fan has dimension {sf.m}")
    M = sf.M
    if not b.is_pure:
        return PulledBinomial(source, _apply(M, b.C))
    pa, pb = (_apply(M, pt) for pt in b.exponent_points())
    W = tuple(min(a, c) for a, c in zip(pa, pb))
    U = tuple(a - w for a, w in zip(pa, W))
    V = tuple(c - w for c, w in zip(pb, W))
    return PulledBinomial(source, W, U, V, b.lam)


def pullback(system: BinomialSystem, sf: StackyFan) -> list[PulledBinomial]:
    return [pull_one(b, sf, k) for k, b in enumerate(system.members)]


def rational_root(q: Fraction, k: int) -> Fraction:
    """Exact ``k``-th root of a rational, or ``IrrationalRoot``."""
    q = Fraction(q)
    if k == 1:
        return q
    sign = 1
    if q < 0:
        if k % 2 == 0:
            raise IrrationalRoot(f"{q} has no real {k}-th root")
        sign = -1
    num, ok_n = integer_nthroot(abs(q.numerator), k)
    den, ok_d = integer_nthroot(q.denominator, k)
    if not (ok_n and ok_d):
        raise IrrationalRoot(f"{q} is not a {k}-th power in Q")
    return sign * Fraction(int(num), int(den))


def _p_part(exps: Sequence[int], p: int) -> int:
    g = vgcd(exps)
    k = 1
    while g and g % (k * p) == 0:
        k *= p
    return k


def reduce_pure(b, p: int):
    """Strip the largest common ``p``-power from the two exponent vectors.

    Returns ``(reduced, multiplicity)``; works on ``Binomial`` and on
    ``PulledBinomial`` alike.
    """
    if not b.is_pure:
        raise ValueError("only pure binomials can be reduced")
    if p == 0:
        return b, 1
    if isinstance(b, PulledBinomial):
        k = _p_part(b.U + b.V, p)
        if k == 1:
            return b, 1
        lam = rational_root(b.lam, k)
        return replace(
            b,
            U=tuple(u // k for u in b.U),
            V=tuple(v // k for v in b.V),
            lam=lam,
            multiplicity=b.multiplicity * k,
        ), k
    k = _p_part(b.A + b.B, p)
    if k == 1:
        return b, 1
    lam = rational_root(b.lam, k)
    return replace(
        b, A=tuple(a // k for a in b.A), B=tuple(c // k for c in b.B), lam=lam
    ), k


def is_schoen(pb: PulledBinomial, chart: Chart) -> bool:
    if not pb.is_pure:
        return True
    inv = chart.invertible
    return all(i in inv for i, u in enumerate(pb.U) if u) or all(
        i in inv for i, v in enumerate(pb.V) if v
    )


@dataclass(frozen=True)
class ResidualForm:
    """The residual factor as a torus equation ``x^D = lam``."""

    D: Vector
    lam: Fraction
    sources: tuple[int, ...]


def _canonical(D, lam):
    lead = next(x for x in D if x)
    if lead < 0:
        return tuple(-x for x in D), 1 / Fraction(lam)
    return tuple(D), Fraction(lam)


def residual_forms(pbs: Sequence[PulledBinomial]) -> list[ResidualForm]:
    """Deduplicated residual forms of the pure members.

    ``x^U = lam x^V`` and ``x^-U = lam^-1 x^-V`` describe the same factor, so
    forms are normalized to a positive leading coefficient.
    """
    seen: dict[tuple, list[int]] = {}
    for pb in pbs:
        if not pb.is_pure:
            continue
        key = _canonical(tuple(u - v for u, v in zip(pb.U, pb.V)), pb.lam)
        seen.setdefault(key, []).append(pb.source)
    return [ResidualForm(D, lam, tuple(src)) for (D, lam), src in seen.items()]


@dataclass
class SNCReport:
    snc: bool
    forms: list[ResidualForm]
    failures: list[tuple[int, ...]]


def is_snc_chart(pbs: Sequence[PulledBinomial], chart: Chart, p: int = 0,
                 max_subset_size: int | None = None) -> SNCReport:
    """Simple-normal-crossings verdict for the pulled-back system on a chart.

    The monomial parts are coordinate hyperplanes.  The residual factors
    avoid every boundary divisor their equation involves, so only their
    mutual position in the torus matters: every subset with a common point
    must have independent logarithmic differentials mod ``p``.
    """
    from .arrangement import TorusForm, consistent

    for pb in pbs:
        if not is_schoen(pb, chart):
            raise NotSchoen(f"member {pb.source} is not schoen on chart {chart.cone_index}")
    forms = residual_forms(pbs)
    tf = [TorusForm(f.D, f.lam) for f in forms]
    top = len(forms) if max_subset_size is None else min(len(forms), max_subset_size)
    failures = []
    for size in range(1, top + 1):
        for I in combinations(range(len(forms)), size):
            sub = [tf[i] for i in I]
            if not consistent(sub, p):
                continue
            if rank_mod([t.D for t in sub], p) != size:
                failures.append(I)
    return SNCReport(not failures, forms, failures)


def exponent_matrix(system: BinomialSystem) -> list[Vector]:
    """Rows ``A_j - B_j`` of the pure members (the transpose of D)."""
    return [b.tropical() for b in system.pure_members]


def subset_minor_gcds(rows: Sequence[Vector], max_subset_size: int | None = None):
    """``(subset, rank, gcd of maximal minors)`` for every nonempty subset."""
    a = len(rows)
    if a > MAX_MEMBERS:
        raise TooManyMembers(f"{a} pure members exceed the limit of {MAX_MEMBERS}")
    top = a if max_subset_size is None else min(a, max_subset_size)
    out = []
    for size in range(1, top + 1):
        for I in combinations(range(a), size):
            sub = [rows[i] for i in I]
            k = rank(sub)
            out.append((I, k, minors_gcd(sub, k) if k else 0))
    return out


def problematic_primes(system: BinomialSystem, max_subset_size: int | None = None) -> set[int]:
    primes: set[int] = set()
    for _, _, g in subset_minor_gcds(exponent_matrix(system), max_subset_size):
        if g > 1:
            primes.update(factorint(g))
    return {int(p) for p in primes}
