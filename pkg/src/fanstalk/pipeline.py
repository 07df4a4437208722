"""End-to-end runs that assemble JSON-ready reports from the library pieces."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .arrangement import TorusForm, hu_schedule, intersection_poset, poset_to_json
from .errors import (
    BadReduction,
    FieldTooLarge,
    IrrationalRoot,
    NotTotallyOrdered,
    TooManyCoordinates,
)
from .fantastack import (
    build_stacky_fan,
    charts,
    coordinate_names,
    kernel_lattice,
    stacky_fan_to_json,
)
from .ideals import decompose, decomposition_to_json, principalizing_fan, simple_normal_position_check
from .oracle import (
    Equation,
    certify_facet,
    minkowski_vertices_bruteforce,
    smoothness_scan,
)
from .parser import Binomial, BinomialSystem, VariableOrder, format_binomial
from .polyhedra import fan_to_json, newton_polyhedron, star_subdivide_all, tropical_fan
from .transform import (
    PulledBinomial,
    exponent_matrix,
    is_schoen,
    is_snc_chart,
    problematic_primes,
    pullback,
    reduce_pure,
    subset_minor_gcds,
)


def fraction_text(x: Fraction) -> str:
    return str(Fraction(x))


def format_pulled(pb: PulledBinomial, names) -> str:
    order = VariableOrder(tuple(names))
    if not pb.is_pure:
        return format_binomial(Binomial(order, pb.W))
    return format_binomial(Binomial(order, pb.W, pb.U, pb.V, pb.lam))


@dataclass
class Report:
    data: dict
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def fan_for(system: BinomialSystem, star: bool = False):
    fan = tropical_fan(system)
    if star:
        fan = star_subdivide_all(fan)
    return fan


def _reduce_all(pulled, p):
    out, notes = [], []
    for pb in pulled:
        if pb.is_pure and p:
            try:
                pb, _ = reduce_pure(pb, p)
            except IrrationalRoot as exc:
                notes.append(f"member {pb.source}: {exc}")
        out.append(pb)
    return out, notes


def chart_equations(pulled) -> list[Equation]:
    return [Equation(pb.U, pb.V, pb.lam) for pb in pulled if pb.is_pure]


def scan_chart(pulled, chart, q: int):
    """Smoothness scan of the residual equations, or ``None`` when skipped."""
    eqs = chart_equations(pulled)
    try:
        return smoothness_scan(eqs, q, chart.invertible)
    except (BadReduction, TooManyCoordinates, FieldTooLarge):
        return None


def primes_report(system: BinomialSystem, p: int = 0, max_subset_size=None) -> Report:
    rows = exponent_matrix(system)
    subsets = subset_minor_gcds(rows, max_subset_size) if rows else []
    primes = sorted(problematic_primes(system, max_subset_size)) if rows else []
    data = {
        "char": p,
        "primes": primes,
        "subsets": [
            {"subset": list(I), "rank": k, "minor_gcd": g} for I, k, g in subsets
        ],
    }
    failures = [f"characteristic {p} is a problematic prime"] if p in primes else []
    return Report(data, failures)


def resolve(system: BinomialSystem, p: int = 0, star: bool = False,
            oracle_verify: bool = False, max_subset_size=None) -> Report:
    failures: list[str] = []
    fan = fan_for(system, star)
    np_ = newton_polyhedron(system)
    sf = build_stacky_fan(fan)
    kernel = kernel_lattice(sf)
    names = coordinate_names(sf, system.order)
    pulled = pullback(system, sf)
    reduced, notes = _reduce_all(pulled, p)
    primes = primes_report(system, p, max_subset_size)
    failures += primes.failures

    chart_reports = []
    for chart in charts(sf, system.order):
        members = []
        for pb, rb in zip(pulled, reduced):
            entry = {
                "source": pb.source,
                "kind": pb.kind,
                "W": list(pb.W),
                "U": list(pb.U) if pb.is_pure else None,
                "V": list(pb.V) if pb.is_pure else None,
                "lambda": fraction_text(pb.lam) if pb.is_pure else None,
                "multiplicity": rb.multiplicity,
                "schoen": is_schoen(pb, chart),
                "transform": format_pulled(pb, names),
            }
            members.append(entry)
        schoen = all(e["schoen"] for e in members)
        entry = {
            "chart": chart.cone_index,
            "cone": list(chart.cone),
            "invertible": sorted(chart.invertible),
            "invertible_names": chart.invertible_names(),
            "members": members,
            "schoen": schoen,
        }
        if not schoen:
            failures.append(f"chart {chart.cone_index}: a member is not schoen")
            entry["snc"] = False
        else:
            snc = is_snc_chart(reduced, chart, p, max_subset_size)
            entry["snc"] = snc.snc
            entry["snc_failures"] = [list(I) for I in snc.failures]
            if not snc.snc:
                failures.append(f"chart {chart.cone_index}: residual factors are not SNC")
            if p not in primes.data["primes"]:
                forms = [TorusForm(f.D, f.lam) for f in snc.forms]
                if forms:
                    poset = intersection_poset(forms, p, max_subset_size)
                    sched = hu_schedule(poset) if poset.simple else None
                    entry["poset"] = poset_to_json(poset, sched)
        if oracle_verify:
            qs = [p] if p else [5, 7]
            scans = {}
            for q in qs:
                if q in primes.data["primes"]:
                    continue
                bad = scan_chart(reduced, chart, q)
                scans[str(q)] = None if bad is None else len(bad)
                if bad:
                    failures.append(f"chart {chart.cone_index}: {len(bad)} singular points over F_{q}")
            entry["oracle_scan"] = scans
        chart_reports.append(entry)

    data = {
        "command": "resolve",
        "char": p,
        "newton_polyhedron": [list(v) for v in np_.vertices],
        "fan": fan_to_json(fan, np_.vertices if not star else None),
        "stacky_fan": stacky_fan_to_json(sf, kernel, system.order),
        "charts": chart_reports,
        "primes": primes.data["primes"],
        "notes": notes + [
            "clean intersection judged by the rank criterion mod p"
        ],
    }
    if oracle_verify:
        brute = minkowski_vertices_bruteforce(system) if len(system.members) <= 8 else None
        ok_np = brute is None or brute == set(np_.vertices)
        ok_rays = all(certify_facet(np_, r) for r in fan.rays) if not star else True
        data["oracle"] = {"minkowski_agrees": ok_np, "rays_certified": ok_rays}
        if not (ok_np and ok_rays):
            failures.append("oracle disagrees with the Newton polyhedron or its fan")
    data["verdict"] = {"ok": not failures, "failures": failures}
    return Report(data, failures)


def ideal(system: BinomialSystem, p: int = 0, oracle_verify: bool = False) -> Report:
    failures: list[str] = []
    fan = principalizing_fan(system)
    sf = build_stacky_fan(fan)
    names = coordinate_names(sf, system.order)
    pulled = pullback(system, sf)
    out = []
    for chart in charts(sf, system.order):
        try:
            cd = decompose(chart, pulled, p)
        except NotTotallyOrdered as exc:
            failures.append(str(exc))
            continue
        snp = simple_normal_position_check(cd, p)
        if not snp:
            failures.append(f"chart {chart.cone_index}: not in simple normal position")
        entry = {
            "chart": chart.cone_index,
            "invertible_names": chart.invertible_names(),
            **decomposition_to_json(cd),
            "strata_text": [stratum_text(s, cd, names) for s in cd.nonempty()],
            "simple_normal_position": snp,
        }
        if oracle_verify:
            q = p or 5
            eq = strata_match(cd, pulled, q)
            entry["oracle_point_sets_equal"] = eq
            if eq is False:
                failures.append(f"chart {chart.cone_index}: strata union differs from preimage")
        out.append(entry)
    data = {
        "command": "ideal",
        "char": p,
        "fan": fan_to_json(fan),
        "stacky_fan": stacky_fan_to_json(sf, order=system.order),
        "charts": out,
        "verdict": {"ok": not failures, "failures": failures},
    }
    return Report(data, failures)


def stratum_text(s, cd, names) -> str:
    parts = []
    if s.monomial is not None:
        parts.append("*".join(names[k] for k in s.monomial))
    for r in s.residuals:
        parts.append(f"f{r + 1}'")
    return "V(" + ", ".join(parts) + ")"


def _two_term_pure(U, V, lam, q):
    from .oracle import reduce_mod

    return (tuple(U), 1, tuple(V), (-reduce_mod(lam, q)) % q)


def strata_match(cd, pulled, q: int):
    """Point-set equality of the strata union and the reduced preimage over
    F_q on the chart; ``None`` when the scan is out of budget."""
    from .oracle import point_sets_equal

    n = len(pulled[0].W)
    zero = tuple(0 for _ in range(n))
    try:
        pre = []
        for pb in pulled:
            W = tuple(w if k in cd.chart.non_invertible else 0 for k, w in enumerate(pb.W))
            if pb.is_pure:
                U = tuple(a + b for a, b in zip(W, pb.U))
                V = tuple(a + b for a, b in zip(W, pb.V))
                pre.append(_two_term_pure(U, V, pb.lam, q))
            else:
                pre.append((W, 1, zero, 0))
        strata = []
        for s in cd.strata:
            clause = []
            if s.monomial is not None:
                mono = tuple(int(k in s.monomial) for k in range(n))
                clause.append((mono, 1, zero, 0))
            for r in s.residuals:
                pb = pulled[r]
                if pb.is_pure:
                    clause.append(_two_term_pure(pb.U, pb.V, pb.lam, q))
                else:
                    clause.append((zero, 1, zero, 0))  # the constant 1
            strata.append(clause)
        return point_sets_equal([pre], strata, q, n, cd.chart.invertible)
    except (BadReduction, TooManyCoordinates, FieldTooLarge):
        return None
