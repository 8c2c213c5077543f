from itertools import chain, combinations

import pytest
from hypothesis import given, settings, strategies as st

from sheafforcing.catalog import CATALOG, arrow_category
from sheafforcing.sieves import (Sieve, Site, Topology, all_sieves, closed_sieves, closure,
                                 generate_topology, generated_sieve, heyting_bottom, heyting_impl,
                                 heyting_join, heyting_meet, heyting_neg, heyting_top, is_closed,
                                 is_sieve, maximal_sieve, pullback_sieve, validate_topology)


def brute_sieves(cat, A):
    """Every subset of Hom(-, A) closed under precomposition."""
    arrows = list(cat.hom_into(A))
    out = []
    for combo in chain.from_iterable(combinations(arrows, k) for k in range(len(arrows) + 1)):
        s = set(combo)
        if all(cat.compose(f, g) in s for f in s for g in cat.hom_into(cat.dom(f))):
            out.append(frozenset(s))
    return out


def brute_closed(site, A):
    cat = site.cat
    return [S for S in brute_sieves(cat, A)
            if all(f in S for f in cat.hom_into(A)
                   if site.covered_by(cat.dom(f), {g for g in cat.hom_into(cat.dom(f)) if cat.compose(f, g) in S}))]


def test_catalog_topologies_validate(any_site):
    assert validate_topology(any_site.cat, any_site.J).ok


def test_sieve_enumeration_matches_brute_force(any_site):
    cat = any_site.cat
    for A in cat.objects:
        assert {S.arrows for S in all_sieves(cat, A)} == set(brute_sieves(cat, A))


def test_closed_sieves_match_brute_force(any_site):
    for A in any_site.objects:
        assert {S.arrows for S in closed_sieves(any_site, A)} == set(brute_closed(any_site, A))


def test_omega_sizes_on_the_arrow():
    assert len(closed_sieves(CATALOG["2"](), "B")) == 3
    assert len(closed_sieves(CATALOG["2'"](), "B")) == 2


def test_heyting_laws_exhaustive(any_site):
    for A in any_site.objects:
        om = closed_sieves(any_site, A)
        top, bot = heyting_top(any_site, A), heyting_bottom(any_site, A)
        assert top in om and bot in om
        for a in om:
            assert heyting_neg(any_site, a) == heyting_impl(any_site, a, bot)
            for b in om:
                m, j = heyting_meet(any_site, a, b), heyting_join(any_site, a, b)
                assert m in om and j in om
                assert m <= a and m <= b and a <= j and b <= j
                for c in om:
                    # residuation
                    assert (heyting_meet(any_site, c, b) <= a) == (c <= heyting_impl(any_site, b, a))
                    # distributivity
                    assert heyting_meet(any_site, a, heyting_join(any_site, b, c)) == \
                        heyting_join(any_site, heyting_meet(any_site, a, b), heyting_meet(any_site, a, c))


def test_joins_and_meets_over_all_subfamilies(any_site):
    for A in any_site.objects:
        om = closed_sieves(any_site, A)
        for k in range(len(om) + 1):
            for fam in combinations(om, k):
                J = heyting_join(any_site, *fam, base=A)
                M = heyting_meet(any_site, *fam, base=A)
                uppers = [x for x in om if all(s <= x for s in fam)]
                lowers = [x for x in om if all(x <= s for s in fam)]
                assert J in uppers and all(J <= x for x in uppers)
                assert M in lowers and all(x <= M for x in lowers)


def test_stability_violation_is_reported():
    cat = arrow_category()
    # {u} covers B but the pullback along u (the maximal sieve on A) is fine; drop A's covers instead
    J = Topology({"A": frozenset(), "B": frozenset({maximal_sieve(cat, "B")})})
    assert "maximality" in validate_topology(cat, J).laws()
    J2 = Topology({"A": frozenset({maximal_sieve(cat, "A")}),
                   "B": frozenset({maximal_sieve(cat, "B"), Sieve("B", frozenset({"u"})),
                                   Sieve("B", frozenset())})})
    rep = validate_topology(cat, J2)
    assert "stability" in rep.laws()


def test_generated_topology_is_valid_for_every_basis():
    for name in ("2", "chain3", "parallel"):
        cat = CATALOG[name]().cat
        for A in cat.objects:
            for S in all_sieves(cat, A):
                J = generate_topology(cat, {A: [S]})
                assert validate_topology(cat, J).ok
                assert S in J[A]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(sorted(CATALOG)), st.data())
def test_generated_sieves_and_pullbacks_are_sieves(key, data):
    site = CATALOG[key]()
    cat = site.cat
    A = data.draw(st.sampled_from(cat.objects))
    gens = data.draw(st.sets(st.sampled_from(cat.hom_into(A))))
    S = generated_sieve(cat, A, gens)
    assert is_sieve(cat, S) and set(gens) <= S.arrows
    f = data.draw(st.sampled_from(cat.hom_into(A)))
    P = pullback_sieve(cat, S, f)
    assert is_sieve(cat, P) and P.base == cat.dom(f)
    assert pullback_sieve(cat, S, cat.identity(A)) == S
    # closure is the least closed sieve above S
    C = closure(site, S)
    assert is_closed(site, C) and S <= C
    assert all(C <= T for T in closed_sieves(site, A) if S <= T)
