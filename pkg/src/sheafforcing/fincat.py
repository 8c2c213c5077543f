"""Finite categories, presheaves on them and natural transformations.

Objects and arrows are plain string identifiers. The composition table is
explicit: ``comp[(f, g)]`` is ``f ∘ g`` and must be defined exactly when
``cod(g) == dom(f)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping


@dataclass(frozen=True)
class Violation:
    law: str
    detail: str

    def __str__(self) -> str:
        return f"{self.law}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def laws(self) -> set[str]:
        return {v.law for v in self.violations}

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


class UnknownObjectError(KeyError):
    pass


class FinCategory:
    """A finite category given by an explicit composition table.

    The constructor does not check the category laws; run
    :func:`validate_category` for that. Lookups on undefined pairs raise.
    """

    def __init__(
        self,
        objects: Iterable[str],
        arrows: Mapping[str, tuple[str, str]],
        comp: Mapping[tuple[str, str], str],
        identities: Mapping[str, str],
    ):
        self.objects: tuple[str, ...] = tuple(objects)
        self.arrows: tuple[str, ...] = tuple(arrows)
        self._dom = {f: dc[0] for f, dc in arrows.items()}
        self._cod = {f: dc[1] for f, dc in arrows.items()}
        self.comp: dict[tuple[str, str], str] = dict(comp)
        self.identities: dict[str, str] = dict(identities)
        self._into = {A: tuple(f for f in self.arrows if self._cod[f] == A)
                      for A in self.objects}
        self._out = {A: tuple(f for f in self.arrows if self._dom[f] == A)
                     for A in self.objects}
        # scratch space for caches owned by other modules (restriction etc.)
        self.cache: dict = {}

    @classmethod
    def build(cls, objects, arrows, comp=(), identities=None) -> "FinCategory":
        """Convenience constructor that fills in the unit-law entries.

        ``arrows`` maps name to ``(dom, cod)``; identities default to
        ``id_<object>`` and are added to the arrow table if absent.
        ``comp`` lists ``(f, g, f∘g)`` triples for the non-identity pairs;
        explicit entries are never overwritten.
        """
        objects = list(objects)
        arrows = dict(arrows)
        if identities is None:
            identities = {A: f"id_{A}" for A in objects}
        for A, i in identities.items():
            arrows.setdefault(i, (A, A))
        table = {(f, g): h for f, g, h in comp}
        for f, (d, c) in arrows.items():
            table.setdefault((f, identities[d]), f)
            table.setdefault((identities[c], f), f)
        return cls(objects, arrows, table, identities)

    def __repr__(self) -> str:
        return f"FinCategory(objects={list(self.objects)}, arrows={len(self.arrows)})"

    def dom(self, f: str) -> str:
        return self._dom[f]

    def cod(self, f: str) -> str:
        return self._cod[f]

    def identity(self, A: str) -> str:
        if A not in self._into:
            raise UnknownObjectError(A)
        return self.identities[A]

    def compose(self, f: str, g: str) -> str:
        """``f ∘ g`` (first ``g`` then ``f``)."""
        try:
            return self.comp[(f, g)]
        except KeyError:
            if self._dom.get(f) != self._cod.get(g):
                raise ValueError(f"{f} ∘ {g} is not composable") from None
            raise

    def hom_into(self, A: str) -> tuple[str, ...]:
        """All arrows with codomain ``A``."""
        try:
            return self._into[A]
        except KeyError:
            raise UnknownObjectError(A) from None

    def hom_from(self, A: str) -> tuple[str, ...]:
        try:
            return self._out[A]
        except KeyError:
            raise UnknownObjectError(A) from None

    def hom(self, A: str, B: str) -> tuple[str, ...]:
        return tuple(f for f in self.hom_into(B) if self._dom[f] == A)

    def composable(self):
        """Pairs ``(f, g)`` with ``cod g == dom f``."""
        for f in self.arrows:
            for g in self._into.get(self._dom[f], ()):
                yield f, g


def hom_into(cat: FinCategory, A: str) -> frozenset[str]:
    return frozenset(cat.hom_into(A))


def validate_category(cat: FinCategory) -> ValidationReport:
    out: list[Violation] = []
    objs = set(cat.objects)
    for f in cat.arrows:
        for end, o in (("dom", cat.dom(f)), ("cod", cat.cod(f))):
            if o not in objs:
                out.append(Violation("typing", f"{end}({f}) = {o} is not an object"))
    for A in cat.objects:
        i = cat.identities.get(A)
        if i is None or i not in cat._dom:
            out.append(Violation("identity", f"no identity arrow for {A}"))
        elif (cat.dom(i), cat.cod(i)) != (A, A):
            out.append(Violation("identity", f"{i} is not an endo-arrow of {A}"))
    if out:
        return ValidationReport(tuple(out))

    arrows = set(cat.arrows)
    for (f, g), h in sorted(cat.comp.items()):
        if f not in arrows or g not in arrows or h not in arrows:
            out.append(Violation("unknown-arrow", f"entry {f} ∘ {g} = {h}"))
        elif cat.dom(f) != cat.cod(g):
            out.append(Violation("ill-typed-entry", f"{f} ∘ {g} given but cod({g}) != dom({f})"))
    pairs = list(cat.composable())
    for f, g in pairs:
        h = cat.comp.get((f, g))
        if h is None:
            out.append(Violation("partial-table", f"{f} ∘ {g} undefined"))
        elif h in arrows and (cat.dom(h), cat.cod(h)) != (cat.dom(g), cat.cod(f)):
            out.append(Violation(
                "typing", f"{f} ∘ {g} = {h} has type {cat.dom(h)}->{cat.cod(h)}, "
                f"expected {cat.dom(g)}->{cat.cod(f)}"))
    for f in cat.arrows:
        i_d, i_c = cat.identities[cat.dom(f)], cat.identities[cat.cod(f)]
        if cat.comp.get((f, i_d)) != f:
            out.append(Violation("right-unit", f"{f} ∘ {i_d} = {cat.comp.get((f, i_d))} != {f}"))
        if cat.comp.get((i_c, f)) != f:
            out.append(Violation("left-unit", f"{i_c} ∘ {f} = {cat.comp.get((i_c, f))} != {f}"))
    if any(v.law in ("partial-table", "unknown-arrow") for v in out):
        return ValidationReport(tuple(out))
    comp = cat.comp
    for f, g in pairs:
        fg = comp[(f, g)]
        if fg not in arrows or cat.dom(fg) != cat.dom(g):
            continue
        for h in cat.hom_into(cat.dom(g)):
            gh = comp[(g, h)]
            left = comp.get((fg, h))
            right = comp.get((f, gh))
            if left != right:
                out.append(Violation(
                    "associativity", f"({f} ∘ {g}) ∘ {h} = {left} but {f} ∘ ({g} ∘ {h}) = {right}"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class PresheafFin:
    """A presheaf with finite value sets.

    ``actions[f]`` maps ``values[cod f]`` to ``values[dom f]``.
    """

    values: Mapping[str, tuple[str, ...]]
    actions: Mapping[str, Mapping[str, str]]
    name: str = field(default="", compare=False)

    def __call__(self, f: str, x: str) -> str:
        return self.actions[f][x]

    def labels(self) -> tuple[str, ...]:
        """Every label used anywhere, in a fixed order."""
        seen = set()
        for vals in self.values.values():
            seen.update(vals)
        return tuple(sorted(seen, key=_label_key))

    def label_index(self) -> dict[str, int]:
        return {x: i for i, x in enumerate(self.labels())}


def _label_key(x: str):
    return (0, int(x), x) if x.isdigit() else (1, 0, x)


def validate_presheaf(cat: FinCategory, P: PresheafFin) -> ValidationReport:
    out: list[Violation] = []
    for A in cat.objects:
        if A not in P.values:
            out.append(Violation("typing", f"no value set at {A}"))
    if out:
        return ValidationReport(tuple(out))
    for f in cat.arrows:
        act = P.actions.get(f)
        src, tgt = P.values[cat.cod(f)], set(P.values[cat.dom(f)])
        if act is None:
            out.append(Violation("typing", f"no action for {f}"))
            continue
        for x in src:
            if x not in act:
                out.append(Violation("typing", f"P({f}) undefined at {x}"))
            elif act[x] not in tgt:
                out.append(Violation("typing", f"P({f})({x}) = {act[x]} not in P({cat.dom(f)})"))
    if out:
        return ValidationReport(tuple(out))
    for A in cat.objects:
        i = cat.identities[A]
        for x in P.values[A]:
            if P.actions[i][x] != x:
                out.append(Violation("identity", f"P({i})({x}) = {P.actions[i][x]}"))
    for f, g in cat.composable():
        fg = cat.compose(f, g)
        for x in P.values[cat.cod(f)]:
            lhs = P.actions[fg][x]
            rhs = P.actions[g][P.actions[f][x]]
            if lhs != rhs:
                out.append(Violation(
                    "contravariance", f"P({f} ∘ {g})({x}) = {lhs} but P({g})(P({f})({x})) = {rhs}"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class NatTransFin:
    """Components ``components[A]: values_F(A) -> values_G(A)``."""

    components: Mapping[str, Mapping[str, str]]
    name: str = field(default="", compare=False)

    def __call__(self, A: str, x: str) -> str:
        return self.components[A][x]


def validate_nat_trans(cat: FinCategory, F: PresheafFin, G: PresheafFin,
                       sigma: NatTransFin) -> ValidationReport:
    out: list[Violation] = []
    for A in cat.objects:
        comp = sigma.components.get(A)
        if comp is None:
            out.append(Violation("typing", f"no component at {A}"))
            continue
        for x in F.values[A]:
            if comp.get(x) not in G.values[A]:
                out.append(Violation("typing", f"sigma_{A}({x}) not in G({A})"))
    if out:
        return ValidationReport(tuple(out))
    for f in cat.arrows:
        A, B = cat.dom(f), cat.cod(f)
        for x in F.values[B]:
            lhs = G.actions[f][sigma.components[B][x]]
            rhs = sigma.components[A][F.actions[f][x]]
            if lhs != rhs:
                out.append(Violation("naturality", f"square for {f} fails at {x}"))
    return ValidationReport(tuple(out))


def representable(cat: FinCategory, B: str) -> PresheafFin:
    """``Hom(-, B)`` with labels the arrow names."""
    values = {A: cat.hom(A, B) for A in cat.objects}
    actions = {f: {g: cat.compose(g, f) for g in values[cat.cod(f)]} for f in cat.arrows}
    return PresheafFin(values, actions, name=f"Hom(-,{B})")


def constant_presheaf(cat: FinCategory, labels: Iterable[str]) -> PresheafFin:
    labels = tuple(labels)
    return PresheafFin({A: labels for A in cat.objects},
                       {f: {x: x for x in labels} for f in cat.arrows},
                       name=f"const{list(labels)}")


def identity_transformation(cat: FinCategory, F: PresheafFin) -> NatTransFin:
    return NatTransFin({A: {x: x for x in F.values[A]} for A in cat.objects}, name="id")


def compose_transformations(tau: NatTransFin, sigma: NatTransFin) -> NatTransFin:
    """``tau ∘ sigma``."""
    return NatTransFin({A: {x: tau.components[A][y] for x, y in comp.items()}
                        for A, comp in sigma.components.items()},
                       name=f"{tau.name}∘{sigma.name}")


def all_functions(src: tuple[str, ...], tgt: tuple[str, ...]):
    for image in product(tgt, repeat=len(src)):
        yield dict(zip(src, image))
