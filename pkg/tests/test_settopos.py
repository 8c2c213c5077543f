import pytest

from sheafforcing.catalog import CATALOG
from sheafforcing.fincat import (NatTransFin, PresheafFin, compose_transformations, constant_presheaf,
                                 identity_transformation, representable)
from sheafforcing.forcing import engine
from sheafforcing.names import empty_set, is_closed_name, restrict, set_name
from sheafforcing.settopos import (CJArrow, CJSet, MemberClasses, _holds, arrows_agree, check_equivalence,
                                   cjarrow_problems, cjset_problems, compose_arrows, element_name,
                                   enumerate_sheaves, functor_K_arrow, functor_K_obj, functor_L_arrow,
                                   functor_L_obj, identity_arrow, is_bijection, is_function, is_sheaf,
                                   iso_P, iso_sigma, natural_transformations, sheaf_violations,
                                   sigma_checks)

SITES = {k: CATALOG[k]() for k in ("1", "2", "2'")}


def test_sheaf_condition_examples():
    site = SITES["2'"]
    cat = site.cat
    P = PresheafFin({"B": ("0", "1"), "A": ("*",)},
                    {"id_B": {"0": "0", "1": "1"}, "id_A": {"*": "*"}, "u": {"0": "*", "1": "*"}})
    assert not is_sheaf(site, P)
    assert "2 amalgamations" in sheaf_violations(site, P)[0]
    assert is_sheaf(site, representable(cat, "B"))
    assert not is_sheaf(site, representable(cat, "A"))       # nothing over B to glue to
    # under the trivial topology everything is a sheaf
    assert is_sheaf(SITES["2"], P)


@pytest.mark.parametrize("key,count", [("1", 3), ("2", 11), ("2'", 4)])
def test_sheaf_counts(key, count):
    assert len(enumerate_sheaves(SITES[key], 2)) == count


def _sheaves(key):
    return enumerate_sheaves(SITES[key], 2)


@pytest.mark.parametrize("key", sorted(SITES))
def test_element_names(key):
    site = SITES[key]
    cat = site.cat
    eng = engine(site, 0)
    for F in _sheaves(key):
        for f in cat.arrows:
            for a in F.values[cat.cod(f)]:
                abar = element_name(site, F, cat.cod(f), a)
                assert is_closed_name(cat, abar)
                assert eng.eq(restrict(cat, abar, f), element_name(site, F, cat.dom(f), F.actions[f][a]))
        for A in site.objects:
            for a in F.values[A]:
                for b in F.values[A]:
                    same = eng.eq(element_name(site, F, A, a), element_name(site, F, A, b))
                    assert same == (a == b) or site.degenerate(A)


@pytest.mark.parametrize("key", sorted(SITES))
def test_K_gives_cjsets_and_is_a_functor(key):
    site = SITES[key]
    sheaves = _sheaves(key)
    for F in sheaves:
        a = functor_K_obj(site, F)
        assert not cjset_problems(site, a)
        assert all(is_closed_name(site.cat, a[A]) for A in site.objects)
        Kid = functor_K_arrow(site, F, F, identity_transformation(site.cat, F))
        assert arrows_agree(site, Kid, identity_arrow(site, a))
    for F in sheaves:
        for G in sheaves:
            for s in natural_transformations(site, F, G):
                Ks = functor_K_arrow(site, F, G, s)
                assert not cjarrow_problems(site, Ks)
                for H in sheaves:
                    for t in natural_transformations(site, G, H):
                        lhs = functor_K_arrow(site, F, H, compose_transformations(t, s))
                        rhs = compose_arrows(site, functor_K_arrow(site, G, H, t), Ks)
                        assert arrows_agree(site, lhs, rhs)


def test_K_of_empty_sheaf_is_empty():
    site = SITES["2"]
    F = PresheafFin({"A": (), "B": ()}, {"id_A": {}, "id_B": {}, "u": {}})
    a = functor_K_obj(site, F)
    assert all(a[A] is empty_set(A) for A in site.objects)


def test_L_of_empty_cjset_is_empty():
    site = SITES["2"]
    e = CJSet({A: empty_set(A) for A in site.objects}, "empty")
    L = functor_L_obj(site, e)
    assert all(not v for v in L.presheaf.values.values())
    P, checks = iso_P(site, e, L)
    assert all(ok for _, ok in checks)


@pytest.mark.parametrize("key", sorted(SITES))
def test_L_K_preserves_sizes_and_sheafhood(key):
    site = SITES[key]
    for F in _sheaves(key):
        L = functor_L_obj(site, functor_K_obj(site, F)).presheaf
        assert is_sheaf(site, L)
        assert {A: len(L.values[A]) for A in site.objects} == {A: len(F.values[A]) for A in site.objects}


def test_singleton_sheaf_gives_singletons():
    site = SITES["2'"]
    F = constant_presheaf(site.cat, ["x"])
    L = functor_L_obj(site, functor_K_obj(site, F)).presheaf
    assert all(len(v) == 1 for v in L.values.values())


@pytest.mark.parametrize("key", sorted(SITES))
def test_L_of_identity_is_identity(key):
    site = SITES[key]
    for F in _sheaves(key):
        a = functor_K_obj(site, F)
        L = functor_L_obj(site, a)
        Lid = functor_L_arrow(site, identity_arrow(site, a), L, L)
        assert Lid.components == identity_transformation(site.cat, L.presheaf).components


def test_member_classes_contain_every_member():
    site = SITES["2"]
    F = [F for F in _sheaves("2") if len(F.values["B"]) == 2 and len(F.values["A"]) == 2][0]
    a = functor_K_obj(site, F)
    mc = MemberClasses(site, a)
    eng = engine(site, 0)
    for D in site.objects:
        assert len(mc.reps[D]) == len(F.values[D])
        for x, f in a[D].entries:
            if f == site.cat.identity(D):
                assert any(eng.eq(x, y) for y in mc.reps[D])


@pytest.mark.parametrize("key", sorted(SITES))
def test_isomorphisms_pass(key):
    site = SITES[key]
    sheaves = _sheaves(key)
    LK = {F.name: functor_L_obj(site, functor_K_obj(site, F)) for F in sheaves}
    sig = {F.name: iso_sigma(site, F, LK[F.name])[0] for F in sheaves}
    for F in sheaves:
        against = [(rho, G, LK[G.name], sig[G.name]) for G in sheaves for rho in natural_transformations(site, F, G)]
        _, checks = iso_sigma(site, F, LK[F.name], against)
        assert all(ok for _, ok in checks), checks
        a = functor_K_obj(site, F)
        _, checks = iso_P(site, a, LK[F.name])
        assert all(ok for _, ok in checks), checks


def test_broken_sigma_is_caught():
    site = SITES["2"]
    F = [F for F in _sheaves("2") if len(F.values["B"]) == 2 and len(F.values["A"]) == 2][0]
    LK = functor_L_obj(site, functor_K_obj(site, F))
    sigma, checks = iso_sigma(site, F, LK)
    assert all(ok for _, ok in checks)
    comps = {A: dict(c) for A, c in sigma.components.items()}
    first = next(iter(comps["B"].values()))
    comps["B"] = {k: first for k in comps["B"]}          # collapse the top component
    bad = dict(sigma_checks(site, F, LK, NatTransFin(comps)))
    assert not bad["bijective[B]"]
    swapped = {A: dict(c) for A, c in sigma.components.items()}
    x, y = sorted(swapped["A"])
    swapped["A"][x], swapped["A"][y] = swapped["A"][y], swapped["A"][x]
    bad = dict(sigma_checks(site, F, LK, NatTransFin(swapped)))
    assert bad["bijective[A]"] and not bad["natural"]


def test_bijection_check_catches_a_dropped_pair():
    site = SITES["2"]
    F = [F for F in _sheaves("2") if len(F.values["B"]) == 2][0]
    a = functor_K_obj(site, F)
    P, _ = iso_P(site, a)
    ents = sorted(P["B"].entries, key=lambda e: (e[1], e[0].sort_key()))
    for i in range(len(ents)):
        bad = set_name("B", ents[:i] + ents[i + 1:])
        assert not _holds(site, "B", is_bijection(), {"p": bad, "a": a["B"], "b": P.cod["B"]})


def test_constant_map_is_a_function_but_not_a_bijection():
    site = SITES["1"]
    F = constant_presheaf(site.cat, ["0", "1"])
    G = constant_presheaf(site.cat, ["0"])
    s = NatTransFin({"*": {"0": "0", "1": "0"}})
    Ks = functor_K_arrow(site, F, G, s)
    env = {"p": Ks["*"], "a": Ks.dom["*"], "b": Ks.cod["*"]}
    assert _holds(site, "*", is_function(), env)
    assert not _holds(site, "*", is_bijection(), env)


@pytest.mark.parametrize("key", sorted(SITES))
def test_check_equivalence_passes(key):
    rep = check_equivalence(SITES[key], 2)
    assert rep.ok and rep.records
    assert {r.status for r in rep.records} == {"pass"}
    assert rep.to_json()["counts"] == {"pass": len(rep.records)}
