"""Sieves, Grothendieck topologies and the algebra of J-closed sieves."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .fincat import FinCategory, ValidationReport, Violation, validate_category


@dataclass(frozen=True)
class Sieve:
    base: str
    arrows: frozenset[str]

    def __contains__(self, f: str) -> bool:
        return f in self.arrows

    def __iter__(self):
        return iter(sorted(self.arrows))

    def __len__(self) -> int:
        return len(self.arrows)

    def __le__(self, other: "Sieve") -> bool:
        return self.arrows <= other.arrows

    def __lt__(self, other: "Sieve") -> bool:
        return self.arrows < other.arrows

    def sort_key(self):
        return (self.base, len(self.arrows), sorted(self.arrows))

    def __repr__(self) -> str:
        return f"Sieve({self.base}: {{{', '.join(sorted(self.arrows))}}})"


class SieveTypeError(ValueError):
    pass


def make_sieve(cat: FinCategory, A: str, arrows: Iterable[str]) -> Sieve:
    return Sieve(A, frozenset(arrows))


def generated_sieve(cat: FinCategory, A: str, arrows: Iterable[str]) -> Sieve:
    """Smallest sieve on ``A`` containing ``arrows``."""
    out = set()
    for f in arrows:
        if cat.cod(f) != A:
            raise SieveTypeError(f"{f} does not land in {A}")
        out.update(cat.compose(f, g) for g in cat.hom_into(cat.dom(f)))
    return Sieve(A, frozenset(out))


def maximal_sieve(cat: FinCategory, A: str) -> Sieve:
    return Sieve(A, frozenset(cat.hom_into(A)))


def sieve_problems(cat: FinCategory, S: Sieve) -> list[str]:
    probs = []
    for f in S.arrows:
        if f not in cat._cod:
            probs.append(f"unknown arrow {f}")
        elif cat.cod(f) != S.base:
            probs.append(f"{f} does not land in {S.base}")
    if probs:
        return probs
    for f in S.arrows:
        for g in cat.hom_into(cat.dom(f)):
            h = cat.compose(f, g)
            if h not in S.arrows:
                probs.append(f"{f} ∘ {g} = {h} missing")
    return probs


def is_sieve(cat: FinCategory, S: Sieve) -> bool:
    return not sieve_problems(cat, S)


def pullback_sieve(cat: FinCategory, S: Sieve, f: str) -> Sieve:
    """``f*(S) = {g | f ∘ g ∈ S}`` as a sieve on ``dom f``."""
    if cat.cod(f) != S.base:
        raise SieveTypeError(f"cod({f}) = {cat.cod(f)} but the sieve lives on {S.base}")
    D = cat.dom(f)
    return Sieve(D, frozenset(g for g in cat.hom_into(D) if cat.compose(f, g) in S.arrows))


def all_sieves(cat: FinCategory, A: str) -> tuple[Sieve, ...]:
    """Every sieve on ``A`` in a fixed order (by size, then arrow names)."""
    key = ("all_sieves", A)
    if key in cat.cache:
        return cat.cache[key]
    into = sorted(cat.hom_into(A))
    if len(into) > 20:
        raise ValueError(f"too many arrows into {A} to enumerate sieves")
    out = []
    for k in range(len(into) + 1):
        for combo in combinations(into, k):
            S = Sieve(A, frozenset(combo))
            if is_sieve(cat, S):
                out.append(S)
    out.sort(key=Sieve.sort_key)
    cat.cache[key] = tuple(out)
    return cat.cache[key]


@dataclass(frozen=True)
class Topology:
    covers: Mapping[str, frozenset[Sieve]]

    def __getitem__(self, A: str) -> frozenset[Sieve]:
        return self.covers[A]


def trivial_topology(cat: FinCategory) -> Topology:
    return Topology({A: frozenset({maximal_sieve(cat, A)}) for A in cat.objects})


def dense_topology(cat: FinCategory) -> Topology:
    """``S`` covers ``A`` iff every arrow into ``A`` factors further into ``S``."""
    covers = {}
    for A in cat.objects:
        good = []
        for S in all_sieves(cat, A):
            if all(any(cat.compose(f, g) in S.arrows for g in cat.hom_into(cat.dom(f)))
                   for f in cat.hom_into(A)):
                good.append(S)
        covers[A] = frozenset(good)
    return Topology(covers)


def validate_topology(cat: FinCategory, J: Topology) -> ValidationReport:
    out: list[Violation] = []
    for A in cat.objects:
        if A not in J.covers:
            out.append(Violation("maximality", f"no covers listed for {A}"))
            continue
        for S in J.covers[A]:
            if S.base != A:
                out.append(Violation("sieve", f"{S} listed as a cover of {A}"))
            for p in sieve_problems(cat, S):
                out.append(Violation("sieve", f"{S}: {p}"))
    if out:
        return ValidationReport(tuple(out))
    for A in cat.objects:
        if maximal_sieve(cat, A) not in J.covers[A]:
            out.append(Violation("maximality", f"maximal sieve on {A} does not cover"))
    for A in cat.objects:
        for S in sorted(J.covers[A], key=Sieve.sort_key):
            for f in cat.hom_into(A):
                pb = pullback_sieve(cat, S, f)
                if pb not in J.covers[cat.dom(f)]:
                    out.append(Violation("stability", f"{f}*({S}) = {pb} does not cover"))
    for A in cat.objects:
        for R in all_sieves(cat, A):
            if R in J.covers[A]:
                continue
            for S in sorted(J.covers[A], key=Sieve.sort_key):
                if all(pullback_sieve(cat, R, f) in J.covers[cat.dom(f)] for f in S.arrows):
                    out.append(Violation(
                        "transitivity", f"{R} is locally covering along {S} but does not cover"))
                    break
    return ValidationReport(tuple(out))


def generate_topology(cat: FinCategory, basis: Mapping[str, Iterable[Sieve]] | None = None) -> Topology:
    """Least topology containing the given sieves (fixed point of the closure rules)."""
    covers = {A: {maximal_sieve(cat, A)} for A in cat.objects}
    for A, sieves in (basis or {}).items():
        for S in sieves:
            probs = sieve_problems(cat, S)
            if probs or S.base != A:
                raise SieveTypeError(f"basis sieve {S} on {A} is malformed: {probs}")
            covers[A].add(S)
    changed = True
    while changed:
        changed = False
        for A in cat.objects:
            for S in list(covers[A]):
                for f in cat.hom_into(A):
                    pb = pullback_sieve(cat, S, f)
                    if pb not in covers[cat.dom(f)]:
                        covers[cat.dom(f)].add(pb)
                        changed = True
        for A in cat.objects:
            for R in all_sieves(cat, A):
                if R in covers[A]:
                    continue
                if any(all(pullback_sieve(cat, R, f) in covers[cat.dom(f)] for f in S.arrows)
                       for S in covers[A]):
                    covers[A].add(R)
                    changed = True
    return Topology({A: frozenset(c) for A, c in covers.items()})


class Site:
    """A finite category together with a Grothendieck topology.

    Holds the lookup tables the evaluator needs; construct once per site.
    """

    def __init__(self, cat: FinCategory, J: Topology, name: str = ""):
        self.cat = cat
        self.J = J
        self.name = name
        self._covers = {A: tuple(sorted((S.arrows for S in J.covers[A]),
                                        key=lambda s: (-len(s), sorted(s))))
                        for A in cat.objects}
        self._cover_sets = {A: frozenset(self._covers[A]) for A in cat.objects}
        self._degenerate = {A: frozenset() in self._cover_sets[A] for A in cat.objects}
        self.cache: dict = {}

    def __repr__(self) -> str:
        return f"Site({self.name or self.cat!r})"

    @property
    def objects(self) -> tuple[str, ...]:
        return self.cat.objects

    def hom_into(self, A: str) -> tuple[str, ...]:
        return self.cat.hom_into(A)

    def covers(self, A: str) -> tuple[frozenset[str], ...]:
        """Covering sieves of ``A`` as arrow sets, largest first."""
        return self._covers[A]

    def is_cover(self, S: Sieve) -> bool:
        return S.arrows in self._cover_sets[S.base]

    def degenerate(self, A: str) -> bool:
        """``∅ ∈ J(A)``."""
        return self._degenerate[A]

    def covered_by(self, A: str, arrows) -> bool:
        """Whether some covering sieve of ``A`` is contained in ``arrows``."""
        if not isinstance(arrows, (set, frozenset)):
            arrows = frozenset(arrows)
        return any(S <= arrows for S in self._covers[A])

    def validate(self) -> ValidationReport:
        rep = validate_category(self.cat)
        if not rep.ok:
            return rep
        return validate_topology(self.cat, self.J)


def is_closed(site: Site, S: Sieve) -> bool:
    cat = site.cat
    for f in cat.hom_into(S.base):
        if f not in S.arrows and site.is_cover(pullback_sieve(cat, S, f)):
            return False
    return True


def closed_sieves(site: Site, A: str) -> tuple[Sieve, ...]:
    """The J-closed sieves on ``A``: the carrier of Ω(A)."""
    key = ("closed", A)
    if key not in site.cache:
        site.cache[key] = tuple(S for S in all_sieves(site.cat, A) if is_closed(site, S))
    return site.cache[key]


class MixedBaseError(ValueError):
    pass


def _base(sieves, A=None) -> str:
    bases = {S.base for S in sieves}
    if A is not None:
        bases.add(A)
    if len(bases) != 1:
        raise MixedBaseError(f"operands live on {sorted(bases)}")
    return bases.pop()


def heyting_top(site: Site, A: str) -> Sieve:
    return maximal_sieve(site.cat, A)


def heyting_bottom(site: Site, A: str) -> Sieve:
    return Sieve(A, frozenset(f for f in site.hom_into(A) if site.degenerate(site.cat.dom(f))))


def heyting_meet(site: Site, *sieves: Sieve, base: str | None = None) -> Sieve:
    A = _base(sieves, base)
    out = frozenset(site.hom_into(A))
    for S in sieves:
        out &= S.arrows
    return Sieve(A, out)


def heyting_join(site: Site, *sieves: Sieve, base: str | None = None) -> Sieve:
    """``{f | f*(⋃ S_i) ∈ J(dom f)}``, computed directly from the union."""
    A = _base(sieves, base)
    union = Sieve(A, frozenset().union(*(S.arrows for S in sieves)))
    return Sieve(A, frozenset(f for f in site.hom_into(A)
                              if site.is_cover(pullback_sieve(site.cat, union, f))))


def heyting_impl(site: Site, S0: Sieve, S1: Sieve) -> Sieve:
    A = _base((S0, S1))
    cat = site.cat
    return Sieve(A, frozenset(f for f in cat.hom_into(A)
                              if pullback_sieve(cat, S0, f) <= pullback_sieve(cat, S1, f)))


def heyting_neg(site: Site, S: Sieve) -> Sieve:
    return heyting_impl(site, S, heyting_bottom(site, S.base))


def closure(site: Site, S: Sieve) -> Sieve:
    """Smallest J-closed sieve containing ``S``."""
    return Sieve(S.base, frozenset(f for f in site.hom_into(S.base)
                                   if site.is_cover(pullback_sieve(site.cat, S, f))))
