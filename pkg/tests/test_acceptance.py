"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v``. The rank-2
axiom check takes several minutes; everything else is quick.
"""
import json
import time
from itertools import combinations

import pytest

from sheafforcing import formula as F
from sheafforcing.catalog import CATALOG
from sheafforcing.forcing import (bounded_exists, bounded_forall, delta0_suite, engine, force,
                                  forces_eq, truth_value)
from sheafforcing.hf import numeral
from sheafforcing.izfa import BOUNDED, FULL, axiom_plans, check_axioms
from sheafforcing.matching import (amalgamation_violations, extract_witness, is_matching,
                                   matching_functions)
from sheafforcing.names import atom, check_name, empty_set, enumerate_names, set_name
from sheafforcing.settopos import check_equivalence
from sheafforcing.sieves import (closed_sieves, heyting_bottom, heyting_impl,
                                 heyting_join, heyting_meet, heyting_neg, heyting_top,
                                 validate_topology)
from sheafforcing.tables import (GridEvaluator, RelationTable, closedness_violations,
                                 equality_law_violations)

KEYS = ("1", "2", "2'", "chain3", "parallel")


@pytest.fixture
def verdict(capsys):
    """Print ``PASS``/``FAIL`` for a criterion, then assert it."""
    def emit(label: str, ok: bool, detail: str = ""):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {label}{': ' + detail if detail else ''}")
        assert ok, detail
    return emit


def _brute_closed(site, A):
    cat = site.cat
    arrows = list(cat.hom_into(A))
    out = set()
    for k in range(len(arrows) + 1):
        for combo in combinations(arrows, k):
            s = set(combo)
            if not all(cat.compose(f, g) in s for f in s for g in cat.hom_into(cat.dom(f))):
                continue
            if all(f in s for f in arrows
                   if site.covered_by(cat.dom(f), {g for g in cat.hom_into(cat.dom(f))
                                                   if cat.compose(f, g) in s})):
                out.add(frozenset(s))
    return out


def _heyting_problems(site, A):
    om = closed_sieves(site, A)
    bad = []
    top, bot = heyting_top(site, A), heyting_bottom(site, A)
    if top not in om or bot not in om:
        bad.append("top/bottom")
    for a in om:
        if heyting_neg(site, a) != heyting_impl(site, a, bot):
            bad.append("negation")
        for b in om:
            for c in om:
                if (heyting_meet(site, c, b) <= a) != (c <= heyting_impl(site, b, a)):
                    bad.append("residuation")
    for k in range(len(om) + 1):
        for fam in combinations(om, k):
            J = heyting_join(site, *fam, base=A)
            M = heyting_meet(site, *fam, base=A)
            uppers = [x for x in om if all(s <= x for s in fam)]
            lowers = [x for x in om if all(x <= s for s in fam)]
            if J not in uppers or not all(J <= x for x in uppers):
                bad.append("join")
            if M not in lowers or not all(x <= M for x in lowers):
                bad.append("meet")
            # infinite distributivity: a ∧ ⋁fam = ⋁(a ∧ s)
            for a in om:
                if heyting_meet(site, a, J) != heyting_join(site, *(heyting_meet(site, a, s) for s in fam), base=A):
                    bad.append("distributivity")
    return bad


def test_criterion_1_topology_and_heyting(verdict):
    t0 = time.time()
    problems = []
    for key in KEYS:
        site = CATALOG[key]()
        if not validate_topology(site.cat, site.J).ok:
            problems.append(f"{key}: topology invalid")
        for A in site.objects:
            if {S.arrows for S in closed_sieves(site, A)} != _brute_closed(site, A):
                problems.append(f"{key}/{A}: closed sieves differ from brute force")
            problems += [f"{key}/{A}: {p}" for p in _heyting_problems(site, A)]
    sizes = (len(closed_sieves(CATALOG["2"](), "B")), len(closed_sieves(CATALOG["2'"](), "B")))
    if sizes != (3, 2):
        problems.append(f"|Ω(B)| = {sizes}")
    dt = time.time() - t0
    verdict("criterion 1 (topologies, Heyting laws, |Ω(B)| = 3, 2)",
            not problems and dt < 5, f"{dt:.2f}s {problems[:3]}")


def test_criterion_2_soundness(verdict):
    t0 = time.time()
    problems = []
    taut, non = F.tautology_suite(), F.non_theorem_suite()
    failing = {label: [] for label, _ in non}
    for key in KEYS:
        site = CATALOG[key]()
        ev = GridEvaluator(RelationTable(site, 1))
        for phi in taut:
            if not ev.valid(phi):
                problems.append(f"{key}: {F.to_text(phi)}")
        for label, phi in non:
            if not ev.valid(phi):
                failing[label].append(key)
    # the recursive engine agrees on the tautologies over every rank-1 environment of 𝟚
    site = CATALOG["2"]()
    eng = engine(site, 1)
    for phi in taut:
        free = sorted(F.free_vars(phi))
        for A in site.objects:
            names = enumerate_names(site.cat, A, 1)
            for vals in _envs(names, len(free)):
                if not eng.force(A, phi, dict(zip(free, vals))).value:
                    problems.append(f"engine 2/{A}: {F.to_text(phi)}")
                    break
    problems += [f"{label} holds on every site" for label, keys in failing.items() if not keys]
    # the documented counterexample: ḃ = {(@u, u)} at B on the trivially covered arrow
    b = set_name("B", [(atom(site.cat, "u"), "u")])
    ex = F.parse("exists x . x in b")
    tv = truth_value(site, "B", ex, {"b": b}).arrows
    lem = force(site, "B", F.Or(ex, F.Not(ex)), {"b": b})
    if tv != ["u"] or lem.value:
        problems.append(f"LEM counterexample: sieve {tv}, forced {lem.value}")
    dt = time.time() - t0
    verdict(f"criterion 2 ({len(taut)} tautologies, {len(non)} non-theorems, LEM sieve {tv})",
            not problems and dt < 30, f"{dt:.1f}s {problems[:3]}")


def _envs(names, k):
    if k == 0:
        yield ()
        return
    for x in names:
        for rest in _envs(names, k - 1):
            yield (x,) + rest


def test_criterion_3_equality_and_closedness(verdict):
    t0 = time.time()
    counts = {}
    for key in ("2", "2'"):
        table = RelationTable(CATALOG[key](), 2)
        laws = equality_law_violations(table)
        counts[key] = (sum(laws.values()), closedness_violations(table), len(table.names["B"]))
    dt = time.time() - t0
    ok = all(v[0] == 0 and v[1] == 0 for v in counts.values()) and dt < 120
    verdict("criterion 3 (equality laws and closed atomic sieves over U_2)", ok,
            f"{dt:.1f}s (law violations, closedness violations, |U_2(B)|) = {counts}")


BODIES = [F.parse(t) for t in (
    "x = x", "x in x", "x : atom", "x : set", "x = c", "x in c", "c in x",
    "exists y in x . y = y", "forall y in x . y in c", "not x = c or x : set")]


def test_criterion_4_bounded_quantifiers(verdict):
    disagreements, checked = [], 0
    for key in ("2", "2'"):
        site = CATALOG[key]()
        for A in site.objects:
            sets = [x for x in enumerate_names(site.cat, A, 1) if x.kind == "set"]
            for c in sets:
                for a in sets:
                    env = {"c": c, "a": a}
                    for body in BODIES:
                        fa = bounded_forall(site, A, a, "x", body, {"c": c}).value
                        ex = bounded_exists(site, A, a, "x", body, {"c": c}).value
                        sfa = force(site, A, F.Forall("x", F.Implies(F.Mem("x", "a"), body)), env, n=1).value
                        sex = force(site, A, F.Exists("x", F.And(F.Mem("x", "a"), body)), env, n=1).value
                        checked += 1
                        if fa != sfa or ex != sex:
                            disagreements.append((key, A, F.to_text(body)))
    verdict("criterion 4 (bounded quantifiers agree with their desugaring)", not disagreements,
            f"{checked} cases, {len(disagreements)} disagreements")


def test_criterion_5_delta0_absoluteness(verdict):
    tallies = {}
    for key in KEYS:
        cases = delta0_suite(CATALOG[key](), 100, seed=0, max_rank=3, max_depth=4)
        tallies[key] = sum(c.agrees for c in cases)
    verdict("criterion 5 (Δ0 absoluteness, 100 per site)", all(v == 100 for v in tallies.values()),
            str(tallies))


def test_criterion_6_amalgamation(verdict):
    problems, total = [], 0
    for key in ("2", "2'"):
        site = CATALOG[key]()
        cands = {D: [x for x in enumerate_names(site.cat, D, 1) if x.kind == "set"] for D in site.objects}
        for A in site.objects:
            for m in matching_functions(site, A, cands):
                total += 1
                if not is_matching(site, m) or amalgamation_violations(site, m):
                    problems.append((key, A))
    # the three witness instances, each checked against its post-condition
    s2 = CATALOG["2"]()
    b = check_name(s2.cat, "B", numeral(2))
    phi = F.parse("x = b")
    x = extract_witness(s2, "B", phi, {"b": b})
    if not (forces_eq(s2, x, b) and force(s2, "B", phi, {"x": x, "b": b}).value):
        problems.append("witness x = b")
    s1 = CATALOG["1"]()
    phi = F.parse("forall y . not y in x")
    x = extract_witness(s1, "*", phi)
    if not force(s1, "*", phi, {"x": x}, n=2).value:
        problems.append("witness empty set")
    s2c = CATALOG["2'"]()
    c = check_name(s2c.cat, "B", numeral(1))
    partial = set_name("B", [(empty_set("A"), "u")])
    x = extract_witness(s2c, "B", F.parse("x = c"), {"c": c}, n=0,
                        candidates={"B": [partial], "A": [check_name(s2c.cat, "A", numeral(1))]})
    if not forces_eq(s2c, x, c):
        problems.append("witness glued from a cover")
    verdict("criterion 6 (amalgamation, witness extraction)", not problems and total > 0,
            f"{total} matching functions, problems {problems[:3]}")


def test_criterion_7_axioms(verdict):
    t0 = time.time()
    rows, problems = [], []
    for key in ("1", "2", "2'"):
        for rec in check_axioms(CATALOG[key](), 2, only={p.name for p in axiom_plans() if p.kind == FULL}):
            rows.append((key, rec.axiom, rec.status, rec.rank))
            if rec.status != "pass" or rec.rank != 2:
                problems.append((key, rec.axiom, rec.status))
    for key in KEYS:
        for rec in check_axioms(CATALOG[key](), 1, only={p.name for p in axiom_plans() if p.kind == BOUNDED}):
            rows.append((key, rec.axiom, rec.status, rec.rank))
            if rec.status != "rank-relative pass":
                problems.append((key, rec.axiom, rec.status))
    dt = time.time() - t0
    verdict("criterion 7 (IZFA axioms: full at rank 2 on 1, 2, 2'; bounded instances everywhere)",
            not problems, f"{len(rows)} rows in {dt:.0f}s, problems {problems}")


@pytest.mark.xfail(strict=True, reason="U_2 has more than 10^6 names at some object of chain3 and "
                                       "of the parallel pair, so rank-2 quantifiers cannot be enumerated")
@pytest.mark.parametrize("key", ["chain3", "parallel"])
def test_criterion_7_rank_two_on_larger_sites(key, verdict):
    full = {p.name for p in axiom_plans() if p.kind == FULL}
    low = check_axioms(CATALOG[key](), 1, only=full)
    assert all(r.status == "pass" for r in low)
    recs = check_axioms(CATALOG[key](), 2, only={"Pairing"}, budget=100_000)
    verdict(f"criterion 7 (rank 2 on {key}; rank 1 passes)", all(r.status == "pass" for r in recs),
            ", ".join(f"{r.axiom}: {r.status}" for r in recs))


def test_criterion_8_equivalence(verdict):
    t0 = time.time()
    out = {}
    for key in ("1", "2", "2'"):
        rep = check_equivalence(CATALOG[key](), bound=2)
        out[key] = (rep.ok, len(rep.records))
    dt = time.time() - t0
    verdict("criterion 8 (Sh(C,J) and (C,J)-sets equivalent on 1, 2, 2')",
            all(ok for ok, _ in out.values()) and dt < 600, f"{dt:.1f}s {out}")


def _report_bytes() -> bytes:
    lines = []
    for key in ("2", "chain3"):
        lines += [json.dumps(c.to_json(), sort_keys=True) for c in delta0_suite(CATALOG[key](), 40, seed=11)]
        lines += [json.dumps(r.to_json(), sort_keys=True) for r in check_axioms(CATALOG[key](), 1)]
    lines.append(json.dumps(check_equivalence(CATALOG["2'"](), bound=2).to_json(), sort_keys=True))
    return "\n".join(lines).encode()


def test_criterion_9_determinism(verdict):
    first, second = _report_bytes(), _report_bytes()
    verdict("criterion 9 (byte-identical reports)", first == second, f"{len(first)} bytes")
