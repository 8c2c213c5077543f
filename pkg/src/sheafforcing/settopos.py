"""Sheaves, (C,J)-sets, the functors K and L, and the equivalence check.

Sheaf elements are encoded as von Neumann numerals of their label index,
so the element names ``ā`` are built from check-names. All properties of
(C,J)-sets and their arrows are bounded formulas over the Kuratowski
encoding, so forcing them is exact at rank 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from . import formula as F
from .fincat import NatTransFin, PresheafFin, all_functions, validate_nat_trans, validate_presheaf
from .forcing import engine
from .hf import numeral
from .matching import MatchFn, amalgamate
from .names import Name, atom_at, check_name, is_closed_name, op_pair, restrict, set_name
from .sieves import Sieve, Site


class RankTooLow(RuntimeError):
    """No witness among the member classes: the search space was too small."""


# --- sheaves ----------------------------------------------------------------------

def matching_families(site: Site, P: PresheafFin, A: str, S: Iterable[str]):
    """Families ``(a_f)_{f∈S}`` with ``P(g)(a_f) = a_{f∘g}`` whenever ``f∘g ∈ S``."""
    cat = site.cat
    arrows = sorted(S)
    for choice in product(*(P.values[cat.dom(f)] for f in arrows)):
        fam = dict(zip(arrows, choice))
        if all(P.actions[g][fam[f]] == fam[cat.compose(f, g)]
               for f in arrows for g in cat.hom_into(cat.dom(f))):
            yield fam


def sheaf_violations(site: Site, P: PresheafFin) -> list[str]:
    cat = site.cat
    out = []
    for A in site.objects:
        for S in site.covers(A):
            for fam in matching_families(site, P, A, S):
                glue = [a for a in P.values[A] if all(P.actions[f][a] == x for f, x in fam.items())]
                if len(glue) != 1:
                    out.append(f"{len(glue)} amalgamations at {A} for cover {sorted(S)}: {fam}")
    return out


def is_sheaf(site: Site, P: PresheafFin) -> bool:
    """Every matching family on every cover has exactly one amalgamation."""
    return validate_presheaf(site.cat, P).ok and not sheaf_violations(site, P)


def enumerate_presheaves(site: Site, bound: int) -> list[PresheafFin]:
    """All presheaves with value sets ``("0", …)`` of size at most ``bound``."""
    cat = site.cat
    objs = list(site.objects)
    out = []
    for sizes in product(range(bound + 1), repeat=len(objs)):
        values = {A: tuple(str(i) for i in range(k)) for A, k in zip(objs, sizes)}
        free = [f for f in sorted(cat.arrows) if f not in set(cat.identities.values())]
        choices = [list(all_functions(values[cat.cod(f)], values[cat.dom(f)])) for f in free]
        for pick in product(*choices):
            actions = {cat.identities[A]: {x: x for x in values[A]} for A in objs}
            actions.update(dict(zip(free, pick)))
            P = PresheafFin(values, actions)
            if validate_presheaf(cat, P).ok:
                out.append(P)
    for i, P in enumerate(out):
        object.__setattr__(P, "name", f"F{i}")
    return out


def enumerate_sheaves(site: Site, bound: int) -> list[PresheafFin]:
    out = [P for P in enumerate_presheaves(site, bound) if is_sheaf(site, P)]
    for i, P in enumerate(out):
        object.__setattr__(P, "name", f"F{i}")
    return out


def natural_transformations(site: Site, P: PresheafFin, Q: PresheafFin) -> list[NatTransFin]:
    cat = site.cat
    objs = list(site.objects)
    out = []
    for pick in product(*(list(all_functions(P.values[A], Q.values[A])) for A in objs)):
        s = NatTransFin(dict(zip(objs, pick)))
        if validate_nat_trans(cat, P, Q, s).ok:
            out.append(s)
    for i, s in enumerate(out):
        object.__setattr__(s, "name", f"{P.name}->{Q.name}#{i}")
    return out


# --- bounded formulas over the Kuratowski encoding -----------------------------------------

def _single(s, x, t="t"):
    return F.And(F.BoundedForall(t, s, F.Eq(t, x)), F.Mem(x, s))


def _double(s, x, y, t="t"):
    return F.conj(F.BoundedForall(t, s, F.Or(F.Eq(t, x), F.Eq(t, y))), F.Mem(x, s), F.Mem(y, s))


def is_pair(q: str, x: str, y: str) -> F.Formula:
    """``q = op(x, y)`` written with bounded quantifiers."""
    s = F.fresh_var({q, x, y}, "s")
    return F.conj(F.BoundedForall(s, q, F.Or(_single(s, x), _double(s, x, y))),
                  F.BoundedExists(s, q, _single(s, x)),
                  F.BoundedExists(s, q, _double(s, x, y)))


def maps_to(p: str, x: str, y: str) -> F.Formula:
    """``op(x, y) ∈ p``."""
    q = F.fresh_var({p, x, y}, "q")
    return F.BoundedExists(q, p, is_pair(q, x, y))


def is_function(p: str = "p", a: str = "a", b: str = "b") -> F.Formula:
    """``p`` is a function from ``a`` to ``b``: a set of pairs, total and single-valued."""
    x, y, y2, q = "x", "y", "y2", "q"
    graph = F.BoundedForall(q, p, F.BoundedExists(x, a, F.BoundedExists(y, b, is_pair(q, x, y))))
    total = F.BoundedForall(x, a, F.BoundedExists(y, b, maps_to(p, x, y)))
    single = F.BoundedForall(x, a, F.BoundedForall(y, b, F.BoundedForall(y2, b, F.Implies(
        F.And(maps_to(p, x, y), maps_to(p, x, y2)), F.Eq(y, y2)))))
    return F.conj(F.SetPred(p), graph, total, single)


def is_bijection(p: str = "p", a: str = "a", b: str = "b") -> F.Formula:
    x, x2, y = "x", "x2", "y"
    inj = F.BoundedForall(x, a, F.BoundedForall(x2, a, F.BoundedForall(y, b, F.Implies(
        F.And(maps_to(p, x, y), maps_to(p, x2, y)), F.Eq(x, x2)))))
    surj = F.BoundedForall(y, b, F.BoundedExists(x, a, maps_to(p, x, y)))
    return F.conj(is_function(p, a, b), inj, surj)


def composite_maps(f: str, g: str, b: str, x: str, z: str) -> F.Formula:
    """``(f∘g)(x) = z`` through a middle element of ``b``."""
    y = F.fresh_var({f, g, b, x, z}, "y")
    return F.BoundedExists(y, b, F.And(maps_to(g, x, y), maps_to(f, y, z)))


def composites_agree(f1: str, g1: str, b1: str, f2: str, g2: str, b2: str,
                     a: str = "a", c: str = "c") -> F.Formula:
    """``f1∘g1 = f2∘g2`` as relations from ``a`` to ``c``."""
    x, z = "x", "z"
    return F.BoundedForall(x, a, F.BoundedForall(z, c, F.iff(
        composite_maps(f1, g1, b1, x, z), composite_maps(f2, g2, b2, x, z))))


def composite_is(f: str, g: str, h: str, a: str = "a", b: str = "b", c: str = "c") -> F.Formula:
    """``f∘g = h`` for ``g: a → b``, ``f: b → c``, ``h: a → c``."""
    x, z = "x", "z"
    return F.BoundedForall(x, a, F.BoundedForall(z, c, F.iff(
        composite_maps(f, g, b, x, z), maps_to(h, x, z))))


def _holds(site: Site, A: str, phi: F.Formula, env: Mapping[str, Name]) -> bool:
    return engine(site, 0).force(A, phi, env).value


# --- (C,J)-sets -------------------------------------------------------------------------

@dataclass(frozen=True)
class CJSet:
    """One representative name per object."""

    reps: Mapping[str, Name]
    label: str = field(default="", compare=False)

    def __getitem__(self, A: str) -> Name:
        return self.reps[A]


@dataclass(frozen=True)
class CJArrow:
    reps: Mapping[str, Name]
    dom: CJSet
    cod: CJSet
    label: str = field(default="", compare=False)

    def __getitem__(self, A: str) -> Name:
        return self.reps[A]


def stability_problems(site: Site, reps: Mapping[str, Name]) -> list[str]:
    cat = site.cat
    eng = engine(site, 0)
    return [f"restriction along {f} is not forced equal" for f in sorted(cat.arrows)
            if not eng.eq(restrict(cat, reps[cat.cod(f)], f), reps[cat.dom(f)])]


def cjset_problems(site: Site, a: CJSet) -> list[str]:
    out = [f"not a set at {A}" for A in site.objects if not _holds(site, A, F.SetPred("a"), {"a": a[A]})]
    return out + stability_problems(site, a.reps)


def cjarrow_problems(site: Site, p: CJArrow) -> list[str]:
    phi = is_function("p", "a", "b")
    out = [f"not a function at {A}" for A in site.objects
           if not _holds(site, A, phi, {"p": p[A], "a": p.dom[A], "b": p.cod[A]})]
    return out + stability_problems(site, p.reps)


def compose_arrows(site: Site, p: CJArrow, q: CJArrow) -> CJArrow:
    """The graph-composite ``p∘q``, one name per object."""
    cat = site.cat
    eng = engine(site, 0)
    node = eng.compile(composite_maps("f", "g", "b", "x", "z"))
    reps = {}
    for A in site.objects:
        ents = set()
        for f in sorted(cat.hom_into(A)):
            D = cat.dom(f)
            env = {"f": restrict(cat, p[A], f), "g": restrict(cat, q[A], f), "b": restrict(cat, q.cod[A], f)}
            for x, g in q.dom[A].entries:
                if g != f:
                    continue
                for z, h in p.cod[A].entries:
                    if h == f and eng.evaluate(node, D, {**env, "x": x, "z": z})[0]:
                        ents.add((op_pair(cat, D, x, z), f))
        reps[A] = set_name(A, ents)
    return CJArrow(reps, q.dom, p.cod, f"{p.label}∘{q.label}")


# --- the functor K -------------------------------------------------------------------------

def element_name(site: Site, P: PresheafFin, A: str, a: str) -> Name:
    """``ā``: pairs ``(op(x̌, f^atom), g)`` with ``P(f)(x) = P(g)(a)``."""
    return _element_name(site, P, A, a)


def _element_name(site, P, A, a):
    cache = site.cache.setdefault(("element-names", id(P)), {})
    got = cache.get((A, a))
    if got is not None:
        return got
    cat = site.cat
    index = P.label_index()
    ents = []
    for g in sorted(cat.hom_into(A)):
        D = cat.dom(g)
        ga = P.actions[g][a]
        for f in sorted(cat.hom_from(D)):
            for x in P.values[cat.cod(f)]:
                if P.actions[f][x] == ga:
                    ents.append((op_pair(cat, D, check_name(cat, D, numeral(index[x])), atom_at(D, f)), g))
    got = cache[(A, a)] = set_name(A, ents)
    site.cache.setdefault(("element-name-owners",), []).append(P)  # keep id(P) alive
    return got


def functor_K_obj(site: Site, P: PresheafFin) -> CJSet:
    cat = site.cat
    reps = {}
    for A in site.objects:
        reps[A] = set_name(A, [(element_name(site, P, cat.dom(f), a), f)
                               for f in sorted(cat.hom_into(A)) for a in P.values[cat.dom(f)]])
    return CJSet(reps, f"K({P.name})")


def functor_K_arrow(site: Site, P: PresheafFin, Q: PresheafFin, s: NatTransFin) -> CJArrow:
    cat = site.cat
    reps = {}
    for A in site.objects:
        ents = []
        for f in sorted(cat.hom_into(A)):
            D = cat.dom(f)
            for a in P.values[D]:
                ents.append((op_pair(cat, D, element_name(site, P, D, a),
                                     element_name(site, Q, D, s.components[D][a])), f))
        reps[A] = set_name(A, ents)
    return CJArrow(reps, functor_K_obj(site, P), functor_K_obj(site, Q), f"K({s.name})")


# --- the functor L ------------------------------------------------------------------------

class MemberClasses:
    """Classes of names forced into ``a[D]``, one representative each.

    Candidates are the atoms at ``D``, the entries of ``a[D]`` at the
    identity, and amalgams of compatible entry families over covers. The
    list is then closed under restriction, adding a restricted name as a
    new class whenever it matches no existing one.
    """

    def __init__(self, site: Site, a: CJSet):
        self.site, self.a = site, a
        cat = site.cat
        eng = engine(site, 0)
        self.reps: dict[str, list[Name]] = {}
        for D in site.objects:
            found: list[Name] = []
            for x in self._candidates(D):
                if eng.mem(x, a[D]) and not any(eng.eq(x, y) for y in found):
                    found.append(x)
            self.reps[D] = found
        self.restriction: dict[str, list[int]] = {g: [] for g in cat.arrows}
        changed = True
        while changed:
            changed = False
            for g in sorted(cat.arrows):
                C, D = cat.dom(g), cat.cod(g)
                row = self.restriction[g]
                while len(row) < len(self.reps[D]):
                    row.append(self._find_or_add(C, restrict(cat, self.reps[D][len(row)], g)))
                    changed = True

    def _find_or_add(self, D: str, x: Name) -> int:
        eng = engine(self.site, 0)
        for i, y in enumerate(self.reps[D]):
            if eng.eq(x, y):
                return i
        if not eng.mem(x, self.a[D]):
            raise RankTooLow(f"restricted member at {D} is not forced into the set")
        self.reps[D].append(x)
        return len(self.reps[D]) - 1

    def _candidates(self, D: str):
        site, cat = self.site, self.site.cat
        aD = self.a[D]
        for k in sorted(cat.hom_from(D)):
            yield atom_at(D, k)
        if aD.kind != "set":
            return
        groups = aD.by_arrow()
        yield from groups.get(cat.identity(D), ())
        eng = engine(site, 0)
        for S in site.covers(D):
            arrows = sorted(S)
            options = [[y for y in groups.get(g, ()) if y.kind == "set"] for g in arrows]
            for pick in product(*options):
                fam = dict(zip(arrows, pick))
                if all(eng.eq(restrict(cat, fam[g], h), fam[cat.compose(g, h)])
                       for g in arrows for h in cat.hom_into(cat.dom(g))):
                    yield amalgamate(site, MatchFn(D, Sieve(D, frozenset(S)),
                                                   {g: {y} for g, y in fam.items()}))

    def index_of(self, D: str, x: Name) -> int:
        eng = engine(self.site, 0)
        for i, y in enumerate(self.reps[D]):
            if eng.eq(x, y):
                return i
        raise RankTooLow(f"name at {D} is not forced equal to any member class")


@dataclass(frozen=True)
class LSheaf:
    """``L_a`` with its classes of matching functions.

    A matching function is a sorted tuple of ``(arrow, class index)``.
    """

    presheaf: PresheafFin
    members: MemberClasses
    classes: Mapping[str, tuple]          # object -> tuple of frozensets of matching functions
    label_of: Mapping[str, dict]          # object -> {matching function: label}


def _matching_on(site: Site, mc: MemberClasses, A: str, S) -> list[tuple]:
    cat = site.cat
    arrows = sorted(S)
    out = []
    for pick in product(*(range(len(mc.reps[cat.dom(f)])) for f in arrows)):
        m = dict(zip(arrows, pick))
        if all(mc.restriction[g][m[f]] == m[cat.compose(f, g)]
               for f in arrows for g in cat.hom_into(cat.dom(f))):
            out.append(tuple(sorted(m.items())))
    return out


def restrict_fn(site: Site, m: tuple, f: str) -> tuple:
    """``m·f``: ``g ↦ m(f∘g)`` on ``f*(dom m)``."""
    cat = site.cat
    d = dict(m)
    return tuple(sorted((g, d[cat.compose(f, g)]) for g in cat.hom_into(cat.dom(f))
                        if cat.compose(f, g) in d))


def functor_L_obj(site: Site, a: CJSet) -> LSheaf:
    """Classes of matching functions on covers, with ``[m]·f = [m·f]``."""
    cat = site.cat
    mc = MemberClasses(site, a)
    classes, label_of, values = {}, {}, {}
    for A in site.objects:
        fns = []
        for S in site.covers(A):
            fns.extend(_matching_on(site, mc, A, S))
        parent = list(range(len(fns)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i
        for i in range(len(fns)):
            for j in range(i + 1, len(fns)):
                if find(i) != find(j) and _equivalent(site, A, fns[i], fns[j]):
                    parent[find(i)] = find(j)
        groups: dict[int, list] = {}
        for i, m in enumerate(fns):
            groups.setdefault(find(i), []).append(m)
        ordered = sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])
        classes[A] = tuple(frozenset(g) for g in ordered)
        values[A] = tuple(str(i) for i in range(len(ordered)))
        label_of[A] = {m: str(i) for i, g in enumerate(ordered) for m in g}
    actions = {}
    for f in sorted(cat.arrows):
        B, A = cat.cod(f), cat.dom(f)
        act = {}
        for label, group in zip(values[B], classes[B]):
            images = {label_of[A][restrict_fn(site, m, f)] for m in group}
            if len(images) != 1:
                raise ValueError(f"restriction along {f} is not well defined on classes")
            act[label] = images.pop()
        actions[f] = act
    P = PresheafFin(values, actions, name=f"L({a.label})")
    return LSheaf(P, mc, classes, label_of)


def _equivalent(site: Site, A: str, m1: tuple, m2: tuple) -> bool:
    d1, d2 = dict(m1), dict(m2)
    agree = {f for f in d1 if f in d2 and d1[f] == d2[f]}
    return site.covered_by(A, agree)


def name_class(site: Site, L: LSheaf, A: str, x: Name) -> str:
    """The label of ``[m_x]`` in ``L_a(A)``."""
    cat = site.cat
    mc = L.members
    m = tuple(sorted((f, mc.index_of(cat.dom(f), restrict(cat, x, f))) for f in cat.hom_into(A)))
    return L.label_of[A][m]


def app(site: Site, p: CJArrow, La: LSheaf, Lb: LSheaf, A: str, m: tuple) -> tuple:
    """``app_A(p, m)``: the forced image class at every arrow that has one."""
    cat = site.cat
    eng = engine(site, 0)
    node = eng.compile(maps_to("p", "x", "y"))
    out = []
    for f, i in m:
        D = cat.dom(f)
        x = La.members.reps[D][i]
        hits = [j for j, y in enumerate(Lb.members.reps[D])
                if eng.evaluate(node, D, {"p": p[D], "x": x, "y": y})[0]]
        if len(hits) > 1:
            raise RankTooLow(f"image at {f} is not unique")
        if hits:
            out.append((f, hits[0]))
    if not site.covered_by(A, {f for f, _ in out}):
        raise RankTooLow(f"app domain at {A} is not a cover")
    return tuple(sorted(out))


def functor_L_arrow(site: Site, p: CJArrow, La: LSheaf, Lb: LSheaf) -> NatTransFin:
    comps = {}
    for A in site.objects:
        comp = {}
        for label, group in zip(La.presheaf.values[A], La.classes[A]):
            images = {Lb.label_of[A][app(site, p, La, Lb, A, m)] for m in group}
            if len(images) != 1:
                raise RankTooLow(f"L({p.label}) is not well defined at {A}")
            comp[label] = images.pop()
        comps[A] = comp
    return NatTransFin(comps, name=f"L({p.label})")


# --- the natural isomorphisms ---------------------------------------------------------------

def arrows_agree(site: Site, p: CJArrow, q: CJArrow) -> bool:
    """``p`` and ``q`` are forced to have the same graph at every object."""
    x, y = "x", "y"
    phi = F.BoundedForall(x, "a", F.BoundedForall(y, "b", F.iff(maps_to("p", x, y), maps_to("q", x, y))))
    return all(_holds(site, A, phi, {"p": p[A], "q": q[A], "a": p.dom[A], "b": p.cod[A]})
               for A in site.objects)


def identity_arrow(site: Site, a: CJSet) -> CJArrow:
    cat = site.cat
    reps = {A: set_name(A, [(op_pair(cat, cat.dom(f), x, x), f) for x, f in a[A].entries])
            for A in site.objects}
    return CJArrow(reps, a, a, f"id({a.label})")


def iso_P(site: Site, a: CJSet, La: LSheaf | None = None,
          against: Iterable[tuple[CJArrow, LSheaf, CJArrow]] = ()) -> tuple[CJArrow, list]:
    """``Ṗ_a`` and its checks.

    Entries are ``(op(x, bar([m_x])), f)`` for ``(x, f) ∈ a[A]``. ``against``
    holds triples ``(Q, L_b, Ṗ_b)`` for arrows ``Q: a → b``; each adds the
    square ``Ṗ_b ∘ Q = K(L(Q)) ∘ Ṗ_a``.
    """
    cat = site.cat
    La = La or functor_L_obj(site, a)
    reps = {}
    for A in site.objects:
        ents = []
        for x, f in sorted(a[A].entries, key=lambda e: (e[1], e[0].sort_key())):
            D = cat.dom(f)
            label = name_class(site, La, D, x)
            ents.append((op_pair(cat, D, x, element_name(site, La.presheaf, D, label)), f))
        reps[A] = set_name(A, ents)
    P = CJArrow(reps, a, functor_K_obj(site, La.presheaf), f"P({a.label})")
    checks = [("is-cjarrow", not cjarrow_problems(site, P))]
    phi = is_bijection("p", "a", "b")
    for A in site.objects:
        checks.append((f"bijection[{A}]", _holds(site, A, phi, {"p": P[A], "a": a[A], "b": P.cod[A]})))
    for Q, Lb, Pb in against:
        LQ = functor_L_arrow(site, Q, La, Lb)
        checks.append((f"square[{Q.label}]", P_square_holds(site, Q, La, Lb, P, Pb, LQ)))
    return P, checks


def P_square_holds(site: Site, Q: CJArrow, La: LSheaf, Lb: LSheaf,
                   Pa: CJArrow, Pb: CJArrow, LQ: NatTransFin) -> bool:
    """``Ṗ_b ∘ Q = K(L(Q)) ∘ Ṗ_a`` as relations, at every object."""
    KLQ = functor_K_arrow(site, La.presheaf, Lb.presheaf, LQ)
    phi = composites_agree("f1", "g1", "b1", "f2", "g2", "b2", "a", "c")
    for A in site.objects:
        env = {"f1": Pb[A], "g1": Q[A], "b1": Q.cod[A], "f2": KLQ[A], "g2": Pa[A], "b2": Pa.cod[A],
               "a": Q.dom[A], "c": Pb.cod[A]}
        if not _holds(site, A, phi, env):
            return False
    return True


def iso_sigma(site: Site, P: PresheafFin, LK: LSheaf | None = None,
              against: Iterable[tuple[NatTransFin, PresheafFin, LSheaf, NatTransFin]] = ()
              ) -> tuple[NatTransFin, list]:
    """``σ_F: a ↦ [m_ā]`` and its checks.

    ``against`` holds ``(ρ, G, L(K(G)), σ_G)`` for transformations
    ``ρ: F → G``; each adds the square ``L(K(ρ)) ∘ σ_F = σ_G ∘ ρ``.
    """
    LK = LK or functor_L_obj(site, functor_K_obj(site, P))
    sigma = NatTransFin({A: {a: name_class(site, LK, A, element_name(site, P, A, a))
                             for a in P.values[A]} for A in site.objects}, name=f"sigma({P.name})")
    return sigma, sigma_checks(site, P, LK, sigma, against)


def sigma_checks(site: Site, P: PresheafFin, LK: LSheaf, sigma: NatTransFin,
                 against: Iterable = ()) -> list[tuple[str, bool]]:
    """Bijectivity, naturality and the ``ρ`` squares for a candidate ``σ_F``."""
    checks = []
    for A in site.objects:
        comp = sigma.components[A]
        checks.append((f"bijective[{A}]", len(set(comp.values())) == len(comp)
                       and set(comp.values()) == set(LK.presheaf.values[A])))
    checks.append(("natural", validate_nat_trans(site.cat, P, LK.presheaf, sigma).ok))
    for rho, G, LKG, sG in against:
        Kr = functor_K_arrow(site, P, G, rho)
        LKr = functor_L_arrow(site, Kr, LK, LKG)
        checks.append((f"square[{rho.name}]", all(
            LKr.components[A][sigma.components[A][x]] == sG.components[A][rho.components[A][x]]
            for A in site.objects for x in P.values[A])))
    return checks


# --- the whole check ----------------------------------------------------------------------

@dataclass(frozen=True)
class CheckRecord:
    site: str
    instance: str
    check: str
    status: str          # pass | fail | budget
    rank: int = 0
    detail: str = ""

    def to_json(self) -> dict:
        out = {"site": self.site, "sheaf-id": self.instance, "check-name": self.check,
               "status": self.status, "rank-used": self.rank}
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class EquivalenceReport:
    site: str
    bound: int
    records: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status == "pass" for r in self.records)

    def counts(self) -> dict:
        out: dict = {}
        for r in self.records:
            out[r.status] = out.get(r.status, 0) + 1
        return dict(sorted(out.items()))

    def to_json(self) -> dict:
        return {"site": self.site, "bound": self.bound, "ok": self.ok, "counts": self.counts(),
                "records": [r.to_json() for r in self.records]}


def check_equivalence(site: Site, bound: int = 2, progress=None) -> EquivalenceReport:
    """Both natural isomorphisms on every sheaf with values of size ≤ ``bound``.

    Every forced statement here is a bounded formula, so it is decided
    exactly with no search over name stages; records report rank 0.
    """
    rep = EquivalenceReport(site.name, bound)
    sheaves = enumerate_sheaves(site, bound)

    def add(inst, checks, prefix):
        for name, ok in checks:
            rep.records.append(CheckRecord(site.name, inst, f"{prefix}{name}", "pass" if ok else "fail"))

    def budget(inst, check, exc):
        rep.records.append(CheckRecord(site.name, inst, check, "budget", 0, str(exc)))

    K, LK = {}, {}
    for P in sheaves:
        K[P.name] = a = functor_K_obj(site, P)
        add(P.name, [("is-cjset", not cjset_problems(site, a))], "K:")
        try:
            LK[P.name] = L = functor_L_obj(site, a)
        except RankTooLow as exc:
            budget(P.name, "L", exc)
            continue
        add(P.name, [("is-sheaf", is_sheaf(site, L.presheaf))], "L:")
    sig, Ps = {}, {}
    for P in sheaves:
        if P.name not in LK:
            continue
        sig[P.name], checks = iso_sigma(site, P, LK[P.name])
        add(P.name, checks, "sigma:")
        Ps[P.name], checks = iso_P(site, K[P.name], LK[P.name])
        add(P.name, checks, "P:")
        if progress:
            progress(P.name)
    for P in sheaves:
        for Q in sheaves:
            if P.name not in LK or Q.name not in LK:
                continue
            for rho in natural_transformations(site, P, Q):
                Kr = functor_K_arrow(site, P, Q, rho)
                add(rho.name, [("is-cjarrow", not cjarrow_problems(site, Kr))], "K:")
                try:
                    LQ = functor_L_arrow(site, Kr, LK[P.name], LK[Q.name])
                except RankTooLow as exc:
                    budget(rho.name, "L-arrow", exc)
                    continue
                add(rho.name, [("square", all(
                    LQ.components[A][sig[P.name].components[A][x]]
                    == sig[Q.name].components[A][rho.components[A][x]]
                    for A in site.objects for x in P.values[A]))], "sigma:")
                add(rho.name, [("square", P_square_holds(site, Kr, LK[P.name], LK[Q.name],
                                                          Ps[P.name], Ps[Q.name], LQ))], "P:")
    return rep
