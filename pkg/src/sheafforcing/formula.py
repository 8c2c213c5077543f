"""Formulas of the two-sorted membership language with atoms.

Terms are variables only; names are supplied through environments at
evaluation time. The parser accepts an ASCII keyword syntax with unicode
aliases and keeps bounded quantifiers as their own nodes; :func:`desugar`
unfolds them.

Grammar::

    formula := quant | impl
    quant   := ("forall" | "exists") IDENT ["in" IDENT] "." formula
    impl    := disj ["->" impl]
    disj    := conj {"or" conj}
    conj    := neg {"and" neg}
    neg     := "not" neg | atom
    atom    := "(" formula ")" | IDENT ":" ("atom" | "set") | IDENT ("=" | "in") IDENT
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import Iterable, Union


@dataclass(frozen=True)
class AtomPred:
    var: str


@dataclass(frozen=True)
class SetPred:
    var: str


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Mem:
    left: str
    right: str


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class BoundedForall:
    var: str
    bound: str
    body: "Formula"


@dataclass(frozen=True)
class BoundedExists:
    var: str
    bound: str
    body: "Formula"


Formula = Union[AtomPred, SetPred, Eq, Mem, And, Or, Implies, Not, Forall, Exists,
                BoundedForall, BoundedExists]

ATOMIC = (AtomPred, SetPred, Eq, Mem)
BINARY = (And, Or, Implies)
QUANT = (Forall, Exists)
BOUNDED = (BoundedForall, BoundedExists)


# --- errors --------------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        super().__init__(f"{msg} at position {pos}" + (f" in {text!r}" if text else ""))
        self.pos = pos


class UnboundVariableError(ValueError):
    def __init__(self, names):
        names = sorted(names)
        super().__init__(f"unbound variable(s): {', '.join(names)}")
        self.names = names


# --- lexer / parser ------------------------------------------------------------

KEYWORDS = {"forall", "exists", "in", "and", "or", "not", "atom", "set"}
_ALIASES = {"∀": "forall", "∃": "exists", "∈": "in", "∧": "and", "∨": "or", "¬": "not",
            "→": "->", "⇒": "->"}
_TOKEN = re.compile(r"\s*(?:(->)|([().:=])|([∀∃∈∧∨¬→⇒])|([A-Za-z_][A-Za-z0-9_']*))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        arrow, punct, uni, ident = m.groups()
        if arrow:
            toks.append(("op", "->", start))
        elif punct:
            toks.append(("op", punct, start))
        elif uni:
            word = _ALIASES[uni]
            toks.append(("op" if word == "->" else "kw", word, start))
        elif ident in KEYWORDS:
            toks.append(("kw", ident, start))
        else:
            toks.append(("id", ident, start))
        pos = m.end()
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, what: str):
        kind, val, pos = self.peek()
        got = "end of input" if kind == "eof" else repr(val)
        raise FormulaSyntaxError(f"expected {what}, got {got}", pos, self.text)

    def expect(self, kind: str, val: str | None = None):
        k, v, _ = self.peek()
        if k != kind or (val is not None and v != val):
            self.fail(repr(val) if val else ("identifier" if kind == "id" else kind))
        return self.take()[1]

    def at(self, kind: str, val: str) -> bool:
        k, v, _ = self.peek()
        return k == kind and v == val

    def formula(self) -> Formula:
        k, v, _ = self.peek()
        if k == "kw" and v in ("forall", "exists"):
            self.take()
            var = self.expect("id")
            bound = None
            if self.at("kw", "in"):
                self.take()
                bound = self.expect("id")
            self.expect("op", ".")
            body = self.formula()
            if bound is None:
                return Forall(var, body) if v == "forall" else Exists(var, body)
            return BoundedForall(var, bound, body) if v == "forall" else BoundedExists(var, bound, body)
        return self.impl()

    def impl(self) -> Formula:
        left = self.disj()
        if self.at("op", "->"):
            self.take()
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        out = self.conj()
        while self.at("kw", "or"):
            self.take()
            out = Or(out, self.conj())
        return out

    def conj(self) -> Formula:
        out = self.neg()
        while self.at("kw", "and"):
            self.take()
            out = And(out, self.neg())
        return out

    def neg(self) -> Formula:
        if self.at("kw", "not"):
            self.take()
            return Not(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        if self.at("op", "("):
            self.take()
            out = self.formula()
            self.expect("op", ")")
            return out
        k, _, _ = self.peek()
        if k != "id":
            self.fail("'(' or identifier")
        left = self.take()[1]
        if self.at("op", ":"):
            self.take()
            if self.at("kw", "atom"):
                self.take()
                return AtomPred(left)
            if self.at("kw", "set"):
                self.take()
                return SetPred(left)
            self.fail("'atom' or 'set'")
        if self.at("op", "="):
            self.take()
            return Eq(left, self.expect("id"))
        if self.at("kw", "in"):
            self.take()
            return Mem(left, self.expect("id"))
        self.fail("':', '=' or 'in'")


def parse(text: str, free: Iterable[str] | None = None) -> Formula:
    """Parse ``text``; with ``free`` given, any other free variable is an error."""
    p = _Parser(text)
    out = p.formula()
    if p.peek()[0] != "eof":
        p.fail("end of input")
    if free is not None:
        extra = free_vars(out) - set(free)
        if extra:
            raise UnboundVariableError(extra)
    return out


# --- printing ------------------------------------------------------------------

def _prec(phi: Formula) -> int:
    if isinstance(phi, (Forall, Exists, BoundedForall, BoundedExists)):
        return 0
    if isinstance(phi, Implies):
        return 1
    if isinstance(phi, Or):
        return 2
    if isinstance(phi, And):
        return 3
    if isinstance(phi, Not):
        return 4
    return 5


def to_text(phi: Formula, ctx: int = 0) -> str:
    """Canonical text form; ``parse(to_text(phi)) == phi``."""
    if isinstance(phi, AtomPred):
        s = f"{phi.var} : atom"
    elif isinstance(phi, SetPred):
        s = f"{phi.var} : set"
    elif isinstance(phi, Eq):
        s = f"{phi.left} = {phi.right}"
    elif isinstance(phi, Mem):
        s = f"{phi.left} in {phi.right}"
    elif isinstance(phi, Not):
        s = "not " + to_text(phi.body, 4)
    elif isinstance(phi, And):
        s = f"{to_text(phi.left, 3)} and {to_text(phi.right, 4)}"
    elif isinstance(phi, Or):
        s = f"{to_text(phi.left, 2)} or {to_text(phi.right, 3)}"
    elif isinstance(phi, Implies):
        s = f"{to_text(phi.left, 2)} -> {to_text(phi.right, 1)}"
    elif isinstance(phi, (Forall, Exists)):
        q = "forall" if isinstance(phi, Forall) else "exists"
        s = f"{q} {phi.var} . {to_text(phi.body, 0)}"
    elif isinstance(phi, (BoundedForall, BoundedExists)):
        q = "forall" if isinstance(phi, BoundedForall) else "exists"
        s = f"{q} {phi.var} in {phi.bound} . {to_text(phi.body, 0)}"
    else:
        raise TypeError(f"not a formula: {phi!r}")
    return f"({s})" if _prec(phi) < ctx else s


# --- syntactic utilities -------------------------------------------------------

def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, (AtomPred, SetPred)):
        return frozenset({phi.var})
    if isinstance(phi, (Eq, Mem)):
        return frozenset({phi.left, phi.right})
    if isinstance(phi, BINARY):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, QUANT):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, BOUNDED):
        return (free_vars(phi.body) - {phi.var}) | {phi.bound}
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, ATOMIC):
        return free_vars(phi)
    if isinstance(phi, BINARY):
        return all_vars(phi.left) | all_vars(phi.right)
    if isinstance(phi, Not):
        return all_vars(phi.body)
    if isinstance(phi, QUANT):
        return all_vars(phi.body) | {phi.var}
    return all_vars(phi.body) | {phi.var, phi.bound}


def fresh_var(avoid: Iterable[str], stem: str = "v") -> str:
    avoid = set(avoid)
    if stem not in avoid and stem not in KEYWORDS:
        return stem
    for i in count(1):
        cand = f"{stem}{i}"
        if cand not in avoid:
            return cand


def rename_free(phi: Formula, mapping: dict[str, str]) -> Formula:
    """Capture-avoiding renaming of free variables."""
    if not mapping:
        return phi
    r = lambda v: mapping.get(v, v)
    if isinstance(phi, AtomPred):
        return AtomPred(r(phi.var))
    if isinstance(phi, SetPred):
        return SetPred(r(phi.var))
    if isinstance(phi, Eq):
        return Eq(r(phi.left), r(phi.right))
    if isinstance(phi, Mem):
        return Mem(r(phi.left), r(phi.right))
    if isinstance(phi, BINARY):
        return type(phi)(rename_free(phi.left, mapping), rename_free(phi.right, mapping))
    if isinstance(phi, Not):
        return Not(rename_free(phi.body, mapping))
    inner = {k: v for k, v in mapping.items() if k != phi.var}
    var, body = phi.var, phi.body
    if var in inner.values() and any(k in free_vars(body) for k, v in inner.items() if v == var):
        new = fresh_var(all_vars(body) | set(inner) | set(inner.values()), var)
        body = rename_free(body, {var: new})
        var = new
    body = rename_free(body, inner)
    if isinstance(phi, QUANT):
        return type(phi)(var, body)
    return type(phi)(var, r(phi.bound), body)


def desugar(phi: Formula) -> Formula:
    """Unfold bounded quantifiers into ``∀x(x∈t → φ)`` and ``∃x(x∈t ∧ φ)``."""
    if isinstance(phi, ATOMIC):
        return phi
    if isinstance(phi, BINARY):
        return type(phi)(desugar(phi.left), desugar(phi.right))
    if isinstance(phi, Not):
        return Not(desugar(phi.body))
    if isinstance(phi, QUANT):
        return type(phi)(phi.var, desugar(phi.body))
    var, body = phi.var, desugar(phi.body)
    if var == phi.bound:
        new = fresh_var(all_vars(body) | {phi.bound}, var)
        body = rename_free(body, {var: new})
        var = new
    if isinstance(phi, BoundedForall):
        return Forall(var, Implies(Mem(var, phi.bound), body))
    return Exists(var, And(Mem(var, phi.bound), body))


def depth(phi: Formula) -> int:
    if isinstance(phi, ATOMIC):
        return 0
    if isinstance(phi, BINARY):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 1 + depth(phi.body)


def is_delta0(phi: Formula) -> bool:
    """Pure membership language with bounded quantifiers only."""
    if isinstance(phi, (Eq, Mem)):
        return True
    if isinstance(phi, (AtomPred, SetPred, Forall, Exists)):
        return False
    if isinstance(phi, BINARY):
        return is_delta0(phi.left) and is_delta0(phi.right)
    return is_delta0(phi.body)


def universal_closure(phi: Formula) -> Formula:
    for v in sorted(free_vars(phi), reverse=True):
        phi = Forall(v, phi)
    return phi


# --- derived connectives -----------------------------------------------------------

def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def forall_set(x: str, body: Formula) -> Formula:
    """``∀x:set φ`` read as ``∀x (x:set → φ)``."""
    return Forall(x, Implies(SetPred(x), body))


def exists_set(x: str, body: Formula) -> Formula:
    """``∃x:set φ`` read as ``∃x (x:set ∧ φ)``."""
    return Exists(x, And(SetPred(x), body))


def forall_atom(x: str, body: Formula) -> Formula:
    return Forall(x, Implies(AtomPred(x), body))


def conj(*parts: Formula) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def disj(*parts: Formula) -> Formula:
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def falsum(x: str) -> Formula:
    """A formula with bottom truth value everywhere: ``¬(x = x)``."""
    return Not(Eq(x, x))


def unique_set_exists(x: str, body: Formula) -> Formula:
    """``∃!x:set φ`` as ``∃x((x:set) ∧ φ(x) ∧ ∀y(((y:set) ∧ φ(y)) → y = x))``."""
    y = fresh_var(all_vars(body) | {x}, "y")
    return Exists(x, conj(SetPred(x), body,
                          Forall(y, Implies(And(SetPred(y), rename_free(body, {x: y})), Eq(y, x)))))


def substitute_var(phi: Formula, old: str, new: str) -> Formula:
    return rename_free(phi, {old: new})


# --- axioms ------------------------------------------------------------------------

@dataclass(frozen=True)
class Axiom:
    name: str
    formula: Formula
    kind: str = "full"          # "full" or "bounded-instance"
    params: tuple = ()          # (var, hereditarily finite set) pairs bound by check-names


def _p(text: str) -> Formula:
    return parse(text)


def set_existence() -> Formula:
    return exists_set("x", SetPred("x"))


def extensionality() -> Formula:
    z_iff = Forall("z", iff(Mem("z", "x"), Mem("z", "y")))
    return forall_set("x", forall_set("y", Implies(z_iff, Eq("x", "y"))))


def pairing() -> Formula:
    return _p("forall x . forall y . exists z . forall w . "
              "(w in z -> w = x or w = y) and (w = x or w = y -> w in z)")


def union() -> Formula:
    body = iff(Mem("x", "v"), BoundedExists("y", "u", Mem("x", "y")))
    return forall_set("u", exists_set("v", Forall("x", body)))


def power_set() -> Formula:
    body = iff(Mem("x", "v"), BoundedForall("y", "x", Mem("y", "u")))
    return forall_set("u", exists_set("v", Forall("x", body)))


def atom_no_members() -> Formula:
    return forall_atom("x", Forall("y", Not(Mem("y", "x"))))


def atom_or_set() -> Formula:
    return _p("forall x . x : atom or x : set")


def atom_not_set() -> Formula:
    return _p("forall x . not (x : atom and x : set)")


def is_empty(e: str, avoid=()) -> Formula:
    z = fresh_var(set(avoid) | {e}, "z")
    return BoundedForall(z, e, falsum(z))


def infinity_bounded(bound_var: str = "k") -> Formula:
    """Infinity cut off at a parameter: some set holds ∅ and is closed under
    ``x ↦ x ∪ {x}`` for members ``x`` of ``k``."""
    empty_in_u = BoundedExists("e", "u", And(SetPred("e"), is_empty("e", {"u", bound_var})))
    succ = BoundedExists("s", "u", conj(
        BoundedForall("z", "s", Or(Mem("z", "x"), Eq("z", "x"))),
        BoundedForall("z", "x", Mem("z", "s")),
        Mem("x", "s")))
    return exists_set("u", And(empty_in_u, BoundedForall("x", "u", Implies(Mem("x", bound_var), succ))))


def axiom_instances(schema: str, phi: Formula, x: str = "x", y: str = "y") -> list[Formula]:
    """Closed instances of a schema for the parameter formula ``phi``.

    ``phi`` has the schema variable ``x`` (and ``y`` for Collection) free;
    any other free variables are universally closed outside. The
    witness variable is renamed away from ``phi``.
    """
    schema = schema.lower().replace("-", "_").replace("∈", "in")
    params = set(free_vars(phi)) - {x, y}
    avoid = all_vars(phi) | {x, y}
    if schema == "separation":
        params = set(free_vars(phi)) - {x}
        u = fresh_var(avoid, "u")
        v = fresh_var(avoid | {u}, "v")
        xx = fresh_var(avoid | {u, v} | params, "x")
        body = rename_free(phi, {x: xx})
        core = forall_set(u, exists_set(v, Forall(xx, iff(Mem(xx, v), And(Mem(xx, u), body)))))
    elif schema == "collection":
        u = fresh_var(avoid, "u")
        v = fresh_var(avoid | {u}, "v")
        core = forall_set(u, Implies(
            BoundedForall(x, u, Exists(y, phi)),
            exists_set(v, BoundedForall(x, u, BoundedExists(y, v, phi)))))
    elif schema in ("in_induction", "epsilon_induction", "induction"):
        params = set(free_vars(phi)) - {x}
        yy = fresh_var(avoid | params, "y")
        step = Forall(x, Implies(BoundedForall(yy, x, rename_free(phi, {x: yy})), phi))
        core = Implies(step, Forall(x, phi))
    else:
        raise ValueError(f"unknown schema {schema!r}")
    for p in sorted(params, reverse=True):
        core = Forall(p, core)
    return [core]


def axiom_schedule(infinity_bound: int = 1) -> list[Axiom]:
    """The axioms checked by the CLI and the acceptance suite.

    Schemas appear through fixed parameter formulas; Infinity is cut at
    the numeral ``infinity_bound`` supplied as a check-name parameter.
    """
    from .hf import numeral

    out = [
        Axiom("SetExistence", set_existence()),
        Axiom("Extensionality", extensionality()),
        Axiom("Pairing", pairing()),
        Axiom("Union", union()),
        Axiom("Atom1", atom_no_members()),
        Axiom("Atom2", atom_or_set()),
        Axiom("Atom3", atom_not_set()),
        Axiom("PowerSet", power_set(), "bounded-instance"),
        Axiom("Infinity", infinity_bounded("k"), "bounded-instance", (("k", numeral(infinity_bound)),)),
    ]
    for label, schema, phi in (
        ("Separation[x:atom]", "separation", AtomPred("x")),
        ("Separation[x:set]", "separation", SetPred("x")),
        ("Collection[x=y]", "collection", Eq("x", "y")),
        ("EpsInduction[x:set or x:atom]", "in_induction", Or(SetPred("x"), AtomPred("x"))),
    ):
        out.append(Axiom(label, axiom_instances(schema, phi)[0], "bounded-instance"))
    return out


# --- logic suites --------------------------------------------------------------------

def tautology_suite() -> list[Formula]:
    """Sentences and open formulas provable in intuitionistic logic with equality."""
    texts = [
        "a = a -> a = a",
        "a = a",
        "a = b -> b = a",
        "a = b and b = c -> a = c",
        "a in b and a = c -> c in b",
        "a in b and b = c -> a in c",
        "a : atom and a = b -> b : atom",
        "a : set and a = b -> b : set",
        "a in b -> not not a in b",
        "not not not a in b -> not a in b",
        "not a in b -> not not not a in b",
        "a in b and a = c -> a in b or c in b",
        "(a in b -> a = c) -> (a = c -> a in c) -> a in b -> a in c",
        "a in b or a = c -> a = c or a in b",
        "not (a in b or a = c) -> not a in b and not a = c",
        "not a in b and not a = c -> not (a in b or a = c)",
        "a in b -> (not a in b -> a = c)",
        "(forall x . x in b -> a in b) -> (exists x . x in b) -> a in b",
        "(forall x . a in b -> x in b) -> a in b -> (forall x . x in b)",
        "forall x . (a in b -> x in b) -> (a in b -> x in b)",
        "(forall x . x in b) -> a in b",
        "a in b -> (exists x . x in b)",
        "not (exists x . x in b) -> (forall x . not x in b)",
        "(forall x . not x in b) -> not (exists x . x in b)",
        "exists x . x = a",
        "forall x . x = x",
        "(exists x . x in b and x = a) -> a in b",
    ]
    return [parse(t) for t in texts]


def non_theorem_suite() -> list[tuple[str, Formula]]:
    """Classically valid formulas that intuitionistic logic does not prove."""
    lem_atomic = Or(Mem("a", "b"), Not(Mem("a", "b")))
    ex = Exists("x", Mem("x", "b"))
    lem_exists = Or(ex, Not(ex))
    dne = Implies(Not(Not(ex)), ex)
    peirce = Implies(Implies(Implies(ex, falsum("b")), ex), ex)
    wlem = Or(Not(ex), Not(Not(ex)))
    return [
        ("LEM[a in b]", lem_atomic),
        ("LEM[exists x . x in b]", lem_exists),
        ("DNE[exists x . x in b]", dne),
        ("Peirce[exists x . x in b, bottom]", peirce),
        ("WLEM[exists x . x in b]", wlem),
    ]


# --- random Δ0 formulas -----------------------------------------------------------------

def random_delta0(rng, free: tuple[str, ...] = ("a", "b"), max_depth: int = 4) -> Formula:
    """A random Δ0 formula over ``free`` with :func:`depth` at most ``max_depth``.

    Bound variables are named ``x0, x1, ...`` and bounded by variables
    already in scope, so the result has no other free variables.
    """
    counter = [0]

    def build(scope: list[str], d: int) -> Formula:
        if d == 0 or rng.random() < 0.2:
            u, v = rng.choice(scope), rng.choice(scope)
            return Eq(u, v) if rng.random() < 0.3 else Mem(u, v)
        kind = rng.choice(("and", "or", "implies", "not", "forall", "exists"))
        if kind == "not":
            return Not(build(scope, d - 1))
        if kind in ("forall", "exists"):
            var = f"x{counter[0]}"
            counter[0] += 1
            bound = rng.choice(scope)
            body = build(scope + [var], d - 1)
            return (BoundedForall if kind == "forall" else BoundedExists)(var, bound, body)
        left, right = build(scope, d - 1), build(scope, d - 1)
        return {"and": And, "or": Or, "implies": Implies}[kind](left, right)

    return build(list(free), max_depth)
