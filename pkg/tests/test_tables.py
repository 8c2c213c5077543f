import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sheafforcing import formula as F
from sheafforcing.catalog import CATALOG, arrow_site_degenerate
from sheafforcing.forcing import Engine
from sheafforcing.tables import (GridEvaluator, RelationTable, closedness_violations,
                                 equality_law_violations)

MAKERS = {**CATALOG, "2-degenerate": arrow_site_degenerate}


@pytest.mark.parametrize("key", sorted(MAKERS))
def test_table_agrees_with_recursive_clauses(key):
    site = MAKERS[key]()
    table = RelationTable(site, 1)
    plain = Engine(MAKERS[key](), 0)      # a separate site, so no table is attached
    for D, names in table.names.items():
        for i, a in enumerate(names):
            for j, b in enumerate(names):
                assert table.eq[D][i, j] == plain.eq(a, b), (D, a, b)
                assert table.mem[D][i, j] == plain.mem(a, b), (D, a, b)


@pytest.mark.parametrize("key", sorted(MAKERS))
def test_equality_laws_and_closedness_at_rank_one(key):
    table = RelationTable(MAKERS[key](), 1)
    assert not any(equality_law_violations(table).values())
    assert closedness_violations(table) == 0


def test_law_checker_detects_planted_defects():
    table = RelationTable(CATALOG["2"](), 1)
    D = "B"
    E = table.eq[D]
    i, j = 0, len(table.names[D]) - 1
    assert not E[i, j]
    E[i, j] = True                      # now i = j but not j = i
    counts = equality_law_violations(table)
    assert counts["symmetry"] > 0
    E[i, j] = False
    E[i, i] = False
    assert equality_law_violations(table)["reflexivity"] > 0
    E[i, i] = True
    assert not any(equality_law_violations(table).values())


SMALL = {k: MAKERS[k]() for k in ("2", "2'", "2-degenerate", "parallel")}


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(SMALL)), st.integers(0, 2**32))
def test_grid_matches_engine(key, seed):
    site = SMALL[key]
    rng = random.Random(seed)
    body = F.random_delta0(rng, ("a", "x"), 2)
    phi = rng.choice((F.Forall, F.Exists))("x", F.Or(body, F.AtomPred("x")) if rng.random() < 0.3 else body)
    table = RelationTable(site, 1)
    grid = GridEvaluator(table).evaluate(phi)
    eng = Engine(site, 1)
    eng.use_table(table)
    for D, names in table.names.items():
        arr = np.asarray(grid.values[D])
        for i, a in enumerate(names):
            got = bool(arr[i]) if grid.axes == ("a",) else bool(arr)
            assert got == eng.force(D, phi, {"a": a}).value, (D, a, F.to_text(phi))


def test_grid_validity_of_tautologies():
    for key in ("2", "parallel"):
        ev = GridEvaluator(RelationTable(CATALOG[key](), 1))
        for phi in F.tautology_suite():
            assert ev.valid(phi), F.to_text(phi)
        assert not all(ev.valid(phi) for _, phi in F.non_theorem_suite())
