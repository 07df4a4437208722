"""Principalization of binomial ideals and the stratified chart decomposition."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .arrangement import TorusForm, consistent
from .errors import IrrationalRoot, NotTotallyOrdered
from .fantastack import Chart
from .intlinalg import rank, rank_mod
from .parser import BinomialSystem
from .polyhedra import Fan, NewtonPolyhedron, common_refinement, dual_fan, tropical_fan
from .transform import PulledBinomial, reduce_pure


def pair_polyhedron(system: BinomialSystem, i: int, j: int) -> NewtonPolyhedron:
    """Newton polyhedron of the monomial ideal generated by the terms of
    members ``i`` and ``j``."""
    pts = system.members[i].exponent_points() + system.members[j].exponent_points()
    return NewtonPolyhedron(system.dim, pts)


def principalizing_fan(system: BinomialSystem) -> Fan:
    """Refine the dual fan of the product so that, on every cone, one of any
    two members has the smaller monomial factor along every ray."""
    fan = tropical_fan(system)
    for i, j in combinations(range(len(system.members)), 2):
        fan = common_refinement(fan, dual_fan(pair_polyhedron(system, i, j)))
    return fan


def reduced_support(pb: PulledBinomial, chart: Chart) -> frozenset[int]:
    """Support of the monomial factor on the chart's non-invertible coordinates."""
    return frozenset(k for k in chart.non_invertible if pb.W[k])


def chart_order(chart: Chart, pulled: Sequence[PulledBinomial]) -> tuple[int, ...]:
    """Positions of ``pulled`` sorted so that the reduced monomial factors form
    a divisibility chain."""
    sup = [reduced_support(pb, chart) for pb in pulled]
    weight = [sum(pb.W[j] for j in chart.non_invertible) for pb in pulled]
    order = sorted(range(len(pulled)), key=lambda k: (len(sup[k]), weight[k], k))
    for a, b in zip(order, order[1:]):
        if not sup[a] <= sup[b]:
            raise NotTotallyOrdered(
                f"monomial factors of members {pulled[a].source} and "
                f"{pulled[b].source} are not comparable on chart {chart.cone_index}"
            )
    return tuple(order)


@dataclass
class Stratum:
    """``V(monomial, residuals...)``; ``monomial`` lists coordinates whose
    product is the monomial, ``None`` for the final stratum."""

    monomial: tuple[int, ...] | None
    residuals: tuple[int, ...]
    empty: bool = False
    reason: str = ""


@dataclass
class ChartDecomposition:
    chart: Chart
    order: tuple[int, ...]
    M: list[tuple[int, ...]]
    N: list[tuple[int, ...]]
    strata: list[Stratum]
    forms: dict[int, TorusForm | None] = field(default_factory=dict)

    def nonempty(self) -> list[Stratum]:
        return [s for s in self.strata if not s.empty]


def _residual(pb: PulledBinomial, p: int) -> TorusForm | None:
    if not pb.is_pure:
        return None
    if p:
        try:
            pb, _ = reduce_pure(pb, p)
        except IrrationalRoot:
            pass
    return TorusForm(tuple(u - v for u, v in zip(pb.U, pb.V)), pb.lam)


def _emptiness(monomial, residuals, forms, p) -> str:
    if monomial is not None and not monomial:
        return "unit monomial"
    if any(forms[r] is None for r in residuals):
        return "unit residual factor"
    tfs = [forms[r] for r in residuals]
    if tfs and not consistent(tfs, p):
        return "inconsistent residual factors"
    if monomial is not None and tfs:
        # a residual x^D = lam forces every coordinate in supp(D) to be nonzero
        used = {k for t in tfs for k, d in enumerate(t.D) if d}
        if all(k in used for k in monomial):
            return "monomial coordinates forced nonzero"
    return ""


def decompose(chart: Chart, pulled: Sequence[PulledBinomial], p: int = 0) -> ChartDecomposition:
    """Stratify the reduced preimage on one chart.

    With the members ordered so that ``M_1 | M_2 | ...`` the strata are
    ``V(N_1)``, ``V(N_2, f_1')``, ..., ``V(f_1', ..., f_a')`` where
    ``N_i = M_i / M_(i-1)`` and ``f_i'`` is the residual factor.
    """
    order = chart_order(chart, pulled)
    sup = [reduced_support(pb, chart) for pb in pulled]
    forms = {k: _residual(pulled[k], p) for k in range(len(pulled))}
    M = [tuple(sorted(sup[k])) for k in order]
    N = []
    prev: frozenset[int] = frozenset()
    for k in order:
        N.append(tuple(sorted(sup[k] - prev)))
        prev = sup[k]
    strata = []
    for i, k in enumerate(order):
        res = tuple(order[:i])
        reason = _emptiness(N[i], res, forms, p)
        strata.append(Stratum(N[i], res, bool(reason), reason))
    reason = _emptiness(None, tuple(order), forms, p)
    strata.append(Stratum(None, tuple(order), bool(reason), reason))
    return ChartDecomposition(chart, order, M, N, strata, forms)


def simple_normal_position_check(cd: ChartDecomposition, p: int = 0) -> bool:
    """Every nonempty stratum must be cut out by a coordinate monomial and
    residual factors whose exponent rows keep their rational rank mod ``p``."""
    for s in cd.nonempty():
        tfs = [cd.forms[r] for r in s.residuals]
        if any(t is None for t in tfs):
            return False
        for size in range(1, len(tfs) + 1):
            for sub in combinations(tfs, size):
                if not consistent(sub, p):
                    continue
                rows = [t.D for t in sub]
                if rank_mod(rows, p) != rank(rows):
                    return False
    return True


def decomposition_to_json(cd: ChartDecomposition) -> dict:
    return {
        "order": list(cd.order),
        "M": [list(x) for x in cd.M],
        "N": [list(x) for x in cd.N],
        "strata": [
            {
                "monomial": list(s.monomial) if s.monomial is not None else None,
                "residuals": list(s.residuals),
                "empty": s.empty,
            }
            for s in cd.strata
        ],
    }
