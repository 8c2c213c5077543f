"""Matching functions on sieves and their amalgamation into a single name."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping

from . import formula as F
from .forcing import Engine, engine
from .names import Name, NameTypeError, dump_name, restrict, set_name
from .sieves import Sieve, Site, all_sieves, maximal_sieve, pullback_sieve


class NotMatching(ValueError):
    pass


class WitnessError(ValueError):
    pass


@dataclass(frozen=True)
class MatchFn:
    """A family ``f ↦ values[f]`` of name sets on the sieve ``dom``."""

    base: str
    dom: Sieve
    values: Mapping[str, frozenset]

    def __post_init__(self):
        object.__setattr__(self, "values", {f: frozenset(v) for f, v in self.values.items()})
        if set(self.values) != set(self.dom.arrows):
            raise NameTypeError("values must be given exactly on the sieve")

    def __call__(self, f: str) -> frozenset:
        return self.values[f]

    def key(self):
        return (self.base, tuple(sorted((f, tuple(sorted(x.sort_key() for x in v)))
                                        for f, v in self.values.items())))

    def to_json(self) -> dict:
        return {"base": self.base, "sieve": sorted(self.dom.arrows),
                "values": {f: [dump_name(x) for x in sorted(v, key=Name.sort_key)]
                           for f, v in sorted(self.values.items())}}


def matching_problems(site: Site, m: MatchFn) -> list[str]:
    cat = site.cat
    eng = engine(site, 0)
    out = []
    for f in sorted(m.dom.arrows):
        vals = m.values[f]
        if not vals:
            out.append(f"empty value at {f}")
            continue
        for a in vals:
            if a.base != cat.dom(f):
                out.append(f"value at {f} lives at {a.base}")
        for g in sorted(cat.hom_into(cat.dom(f))):
            fg = cat.compose(f, g)
            for a in vals:
                ag = restrict(cat, a, g)
                for b in m.values[fg]:
                    if not eng.eq(ag, b):
                        out.append(f"value at {f} restricted along {g} differs from value at {fg}")
    return out


def is_matching(site: Site, m: MatchFn, n: int = 0) -> bool:
    """Nonempty values and compatibility under restriction.

    Only atomic forcing is involved, so ``n`` does not affect the answer.
    """
    return not matching_problems(site, m)


def restrict_matching(site: Site, m: MatchFn, f: str) -> MatchFn:
    """``(m·f)(g) = m(f∘g)`` on ``f*(dom m)``."""
    cat = site.cat
    if cat.cod(f) != m.base:
        raise NameTypeError(f"{f} does not point into {m.base}")
    S = pullback_sieve(cat, m.dom, f)
    return MatchFn(cat.dom(f), S, {g: m.values[cat.compose(f, g)] for g in S.arrows})


def m_of(site: Site, x: Name) -> MatchFn:
    """``m_ẋ``: the restrictions of ``x`` on the maximal sieve."""
    cat = site.cat
    S = maximal_sieve(cat, x.base)
    return MatchFn(x.base, S, {f: {restrict(cat, x, f)} for f in S.arrows})


def amalgamate(site: Site, m: MatchFn) -> Name:
    """``⊔F``: the entries ``(x, f∘g)`` of members ``a ∈ F(f)`` with ``(x, g) ∈ a``."""
    cat = site.cat
    ents = set()
    for f, vals in m.values.items():
        for a in vals:
            if a.kind != "set":
                raise NameTypeError(f"atom-type value at {f}")
            for x, g in a.entries:
                ents.add((x, cat.compose(f, g)))
    return set_name(m.base, ents)


def amalgamation_violations(site: Site, m: MatchFn) -> list[tuple[str, Name]]:
    """Pairs ``(f, b)`` with ``b ∈ F(f)`` where ``(⊔F)·f = b`` is not forced."""
    cat = site.cat
    eng = engine(site, 0)
    a = amalgamate(site, m)
    return [(f, b) for f in sorted(m.dom.arrows) for b in m.values[f]
            if not eng.eq(restrict(cat, a, f), b)]


def matching_functions(site: Site, A: str, candidates: Mapping[str, Iterable[Name]]) -> Iterator[MatchFn]:
    """Every matching function on every sieve of ``A`` with values drawn from ``candidates[D]``."""
    cat = site.cat
    eng = engine(site, 0)
    options = {}
    for D, names in candidates.items():
        names = sorted(set(names), key=Name.sort_key)
        subsets = []
        for r in range(1, len(names) + 1):
            for sub in combinations(names, r):
                if all(eng.eq(a, b) for a in sub for b in sub):
                    subsets.append(frozenset(sub))
        options[D] = subsets
    for S in all_sieves(cat, A):
        arrows = sorted(S.arrows, key=lambda f: (-len(cat.hom_into(cat.dom(f))), f))
        yield from _assign(site, eng, A, S, arrows, options, {})


def _assign(site, eng: Engine, A, S, arrows, options, chosen):
    if len(chosen) == len(arrows):
        yield MatchFn(A, S, dict(chosen))
        return
    cat = site.cat
    f = arrows[len(chosen)]
    for vals in options.get(cat.dom(f), ()):
        if _compatible(cat, eng, f, vals, chosen):
            chosen[f] = vals
            yield from _assign(site, eng, A, S, arrows, options, chosen)
            del chosen[f]


def _compatible(cat, eng, f, vals, chosen) -> bool:
    for h, other in chosen.items():
        for g in cat.hom(cat.dom(f), cat.dom(h)):
            if cat.compose(h, g) == f:
                if not all(eng.eq(restrict(cat, b, g), a) for b in other for a in vals):
                    return False
        for g in cat.hom(cat.dom(h), cat.dom(f)):
            if cat.compose(f, g) == h:
                if not all(eng.eq(restrict(cat, a, g), b) for a in vals for b in other):
                    return False
    return True


# --- unique existence -------------------------------------------------------------------

def extract_witness(site: Site, A: str, phi: F.Formula, env: Mapping[str, Name] | None = None,
                    n: int = 1, var: str = "x",
                    candidates: Mapping[str, Iterable[Name]] | None = None) -> Name:
    """A name ``ẋ`` with ``A ⊩ ẋ:set ∧ φ(ẋ)``, given ``A ⊩ ∃!x:set φ``.

    Local witnesses are collected on the sieve where one exists, packed into
    a matching function and amalgamated. Names in ``candidates[D]`` and the
    restricted ``env`` values are tried before the stage search.
    """
    env = dict(env or {})
    cat = site.cat
    eng = engine(site, n)
    old = eng.hints
    eng.hints = {**old, var: _env_candidates(env, candidates or {})}
    eng.clear()
    try:
        pre = F.unique_set_exists(var, phi)
        if not eng.force(A, pre, env).value:
            raise WitnessError("∃!x:set φ is not forced")
        local = F.And(F.SetPred(var), phi)
        node = eng.compile(local)
        values = {}
        for f in sorted(cat.hom_into(A)):
            D = cat.dom(f)
            envf = {v: restrict(cat, a, f) for v, a in env.items()}
            for x, _ in eng._candidates(var, D, envf):
                if x.kind != "set":
                    continue
                if eng.evaluate(node, D, {**envf, var: x})[0]:
                    values[f] = {x}
                    break
        S = Sieve(A, frozenset(values))
        m = MatchFn(A, S, values)
        problems = matching_problems(site, m)
        if problems:
            raise WitnessError("local witnesses are not compatible: " + problems[0])
        x = amalgamate(site, m)
        if not eng.force(A, local, {**env, var: x}).value:
            raise WitnessError("amalgamated name does not satisfy the formula")
        return x
    finally:
        eng.hints = old
        eng.clear()


def _env_candidates(env: Mapping[str, Name], extra: Mapping[str, Iterable[Name]]):
    keys = sorted(env)
    extra = {D: list(v) for D, v in extra.items()}

    def hint(eng: Engine, D: str, envf: dict):
        return extra.get(D, []) + [envf[k] for k in keys if k in envf]
    return hint
