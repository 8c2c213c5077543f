"""The forcing relation over a finite site and its truth-value sieves.

Atomic clauses recurse on name structure and are exact. Unbounded
quantifiers range over the finite stage ``U_n(dom f)``; each verdict
records whether it is guaranteed for the whole name universe:

* a true ``∃`` with an explicit witness and a false ``∀`` with an explicit
  counterexample are sound for the full model;
* a true ``∀`` or a false ``∃`` only speaks about ``U_n``.

Bounded quantifiers are evaluated through the entries of their bound,
which is exact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import count
from typing import Callable, Iterable, Mapping

from . import formula as F
from .hf import HF, hf_str, random_hf
from .names import Name, NameTypeError, check_name, enumerate_names, restrict
from .sieves import Sieve, Site, heyting_bottom, heyting_top, is_closed

MEMO_LIMIT = 1_000_000

# node kinds
_ATOMP, _SETP, _EQ, _MEM, _AND, _OR, _IMP, _NOT, _ALL, _EX, _BALL, _BEX = range(12)
_KIND = {F.AtomPred: _ATOMP, F.SetPred: _SETP, F.Eq: _EQ, F.Mem: _MEM, F.And: _AND,
         F.Or: _OR, F.Implies: _IMP, F.Not: _NOT, F.Forall: _ALL, F.Exists: _EX,
         F.BoundedForall: _BALL, F.BoundedExists: _BEX}


class UnboundVariable(KeyError):
    pass


@dataclass(frozen=True)
class Verdict:
    value: bool
    exact: bool
    rank: int

    @property
    def scope(self) -> str:
        return "exact" if self.exact else f"rank:{self.rank}"

    def to_json(self) -> dict:
        return {"value": self.value, "scope": self.scope}

    def __bool__(self) -> bool:
        return self.value


@dataclass(frozen=True)
class TruthSieve:
    """``‖φ‖_A`` together with a re-check of J-closedness."""

    sieve: Sieve
    closed: bool
    exact: bool

    @property
    def arrows(self) -> list[str]:
        return sorted(self.sieve.arrows)

    def to_json(self) -> list[str]:
        return self.arrows


class _Node:
    __slots__ = ("id", "kind", "a", "b", "left", "right", "var", "bound", "fv", "inner", "formula")


_ids = count()

# Skolem hints: var -> callable(engine, object, env) -> iterable of candidate names
Hints = Mapping[str, Callable[["Engine", str, dict], Iterable[Name]]]


class Engine:
    """Memoized evaluator for one site at one search rank."""

    def __init__(self, site: Site, rank: int, budget: int | None = None):
        self.site = site
        self.cat = site.cat
        self.rank = rank
        self.budget = budget
        self._deg = dict(site._degenerate)
        self._into = {A: site.hom_into(A) for A in site.objects}
        self._ids = {A: site.cat.identity(A) for A in site.objects}
        self._eq: dict = {}
        self._mem: dict = {}
        self._memo: dict = {}
        self._compiled: dict = {}
        self._universe: dict = {}
        self._table = None
        self.hints: dict = {}

    # -- atomic relations ---------------------------------------------------------

    def use_table(self, table) -> None:
        """Answer equality/membership between tabulated names from ``table``."""
        self._table = table

    def _covered(self, A: str, arrows) -> bool:
        return self.site.covered_by(A, arrows)

    def eq(self, a: Name, b: Name) -> bool:
        """``A ⊩ a = b`` for names at a common object ``A``."""
        key = (a, b)
        got = self._eq.get(key)
        if got is not None:
            return got
        if self._table is not None:
            got = self._table.lookup_eq(a, b)
            if got is not None:
                return got
        A = a.base
        if b.base != A:
            raise NameTypeError(f"names live at {A} and {b.base}")
        if self._deg[A]:
            out = True
        elif a.kind != b.kind:
            out = False
        elif a.kind == "atom":
            cat = self.cat
            agree = [f for f in self._into[A] if restrict(cat, a, f) is restrict(cat, b, f)]
            out = self._covered(A, agree)
        else:
            cat = self.cat
            out = (all(self.mem(x, restrict(cat, b, f)) for x, f in a.entries)
                   and all(self.mem(y, restrict(cat, a, f)) for y, f in b.entries))
        if len(self._eq) > MEMO_LIMIT:
            self._eq.clear()
        self._eq[key] = out
        return out

    def mem(self, a: Name, b: Name) -> bool:
        """``A ⊩ a ∈ b``."""
        key = (a, b)
        got = self._mem.get(key)
        if got is not None:
            return got
        if self._table is not None:
            got = self._table.lookup_mem(a, b)
            if got is not None:
                return got
        A = a.base
        if b.base != A:
            raise NameTypeError(f"names live at {A} and {b.base}")
        if self._deg[A]:
            out = True
        elif b.kind != "set":
            out = False
        else:
            cat = self.cat
            groups = b.by_arrow()
            hit = []
            for f in self._into[A]:
                ys = groups.get(f)
                if ys:
                    af = restrict(cat, a, f)
                    if any(self.eq(af, y) for y in ys):
                        hit.append(f)
            out = self._covered(A, hit)
        if len(self._mem) > MEMO_LIMIT:
            self._mem.clear()
        self._mem[key] = out
        return out

    def is_atom(self, a: Name) -> bool:
        return self._deg[a.base] or a.kind == "atom"

    def is_set(self, a: Name) -> bool:
        return self._deg[a.base] or a.kind == "set"

    # -- compilation ------------------------------------------------------------------

    def compile(self, phi: F.Formula) -> _Node:
        got = self._compiled.get(phi)
        if got is not None:
            return got
        n = _Node()
        n.id = next(_ids)
        n.formula = phi
        n.kind = _KIND[type(phi)]
        n.a = n.b = n.left = n.right = n.var = n.bound = None
        n.inner = ()
        if isinstance(phi, (F.AtomPred, F.SetPred)):
            n.a = phi.var
        elif isinstance(phi, (F.Eq, F.Mem)):
            n.a, n.b = phi.left, phi.right
        elif isinstance(phi, F.BINARY):
            n.left, n.right = self.compile(phi.left), self.compile(phi.right)
        elif isinstance(phi, F.Not):
            n.left = self.compile(phi.body)
        else:
            n.var = phi.var
            n.left = self.compile(phi.body)
            n.inner = tuple(v for v in n.left.fv if v != phi.var)
            if isinstance(phi, F.BOUNDED):
                n.bound = phi.bound
        n.fv = tuple(sorted(F.free_vars(phi)))
        self._compiled[phi] = n
        return n

    # -- universes ----------------------------------------------------------------------

    def universe(self, D: str) -> tuple[Name, ...]:
        got = self._universe.get(D)
        if got is None:
            got = self._universe[D] = enumerate_names(self.cat, D, self.rank, self.budget)
        return got

    # -- evaluation -----------------------------------------------------------------------

    def _restrict_env(self, env: dict, f: str, vars_) -> dict:
        cat = self.cat
        return {v: restrict(cat, env[v], f) for v in vars_}

    def evaluate(self, node: _Node, A: str, env: dict) -> tuple[bool, bool]:
        """``(value, sound)`` for ``A ⊩ node(env)``."""
        if self._deg[A]:
            return True, True
        k = node.kind
        try:
            if k == _EQ:
                return self.eq(env[node.a], env[node.b]), True
            if k == _MEM:
                return self.mem(env[node.a], env[node.b]), True
            if k == _ATOMP:
                return env[node.a].kind == "atom", True
            if k == _SETP:
                return env[node.a].kind == "set", True
            key = (node.id, A, tuple([env[v] for v in node.fv]))
        except KeyError as exc:
            raise UnboundVariable(exc.args[0]) from None
        got = self._memo.get(key)
        if got is not None:
            return got
        if k == _AND:
            out = self._and(node, A, env)
        elif k == _OR:
            out = self._or(node, A, env)
        elif k == _IMP or k == _NOT:
            out = self._implies(node, A, env)
        elif k == _ALL:
            out = self._forall(node, A, env)
        elif k == _EX:
            out = self._exists(node, A, env)
        elif k == _BALL:
            out = self._bforall(node, A, env)
        else:
            out = self._bexists(node, A, env)
        if len(self._memo) > MEMO_LIMIT:
            self._memo.clear()
        self._memo[key] = out
        return out

    def _and(self, node, A, env):
        v1, s1 = self.evaluate(node.left, A, env)
        if not v1 and s1:
            return False, True
        v2, s2 = self.evaluate(node.right, A, env)
        if v1 and v2:
            return True, s1 and s2
        return False, (not v2 and s2)

    def _or(self, node, A, env):
        v1, s1 = self.evaluate(node.left, A, env)
        if v1 and s1:
            return True, True
        v2, s2 = self.evaluate(node.right, A, env)
        if v1 or v2:
            return True, (v2 and s2)
        return False, s1 and s2

    def _implies(self, node, A, env):
        negation = node.kind == _NOT
        sound_true = True
        refuted = False
        for f in self._into[A]:
            D = self.cat.dom(f)
            if self._deg[D]:
                continue
            envf = env if f == self._ids[A] else self._restrict_env(env, f, node.fv)
            if negation:
                v2, s2 = False, True
            else:
                v2, s2 = self.evaluate(node.right, D, envf)
                if v2 and s2:
                    continue
            v1, s1 = self.evaluate(node.left, D, envf)
            if v2:
                if not (s2 or (not v1 and s1)):
                    sound_true = False
                continue
            if not v1:
                if not s1:
                    sound_true = False
                continue
            if s1 and s2:
                return False, True
            refuted = True
        if refuted:
            return False, False
        return True, sound_true

    def _forall(self, node, A, env):
        refuted = False
        var, body = node.var, node.left
        for f in self._into[A]:
            D = self.cat.dom(f)
            if self._deg[D]:
                continue
            envf = self._restrict_env(env, f, node.inner)
            for x in self.universe(D):
                envf[var] = x
                v, s = self.evaluate(body, D, envf)
                if not v:
                    if s:
                        return False, True
                    refuted = True
        return (False, False) if refuted else (True, False)

    def _candidates(self, var: str, D: str, envf: dict):
        hint = self.hints.get(var)
        if hint is not None:
            for x in hint(self, D, envf):
                yield x, True
        for x in self.universe(D):
            yield x, False

    def _exists(self, node, A, env):
        var, body = node.var, node.left
        hit, sound_hit = [], []
        for f in self._into[A]:
            D = self.cat.dom(f)
            if self._deg[D]:
                hit.append(f)
                sound_hit.append(f)
                continue
            envf = self._restrict_env(env, f, node.inner)
            found = False
            for x, _ in self._candidates(var, D, envf):
                envf[var] = x
                v, s = self.evaluate(body, D, envf)
                if v:
                    found = True
                    if s:
                        sound_hit.append(f)
                        break
            if found:
                hit.append(f)
        if not self._covered(A, hit):
            return False, False
        return True, self._covered(A, sound_hit)

    def _bforall(self, node, A, env):
        b = env[node.bound]
        if b.kind == "atom":
            return True, True
        var, body = node.var, node.left
        sound_true = True
        refuted = False
        for x, f in b.entries:
            D = self.cat.dom(f)
            if self._deg[D]:
                continue
            envf = env if f == self._ids[A] else self._restrict_env(env, f, node.inner)
            envx = dict(envf)
            envx[var] = x
            v, s = self.evaluate(body, D, envx)
            if not v:
                if s:
                    return False, True
                refuted = True
            elif not s:
                sound_true = False
        if refuted:
            return False, False
        return True, sound_true

    def _bexists(self, node, A, env):
        b = env[node.bound]
        if b.kind == "atom":
            degen = [f for f in self._into[A] if self._deg[self.cat.dom(f)]]
            return self._covered(A, degen), True
        var, body = node.var, node.left
        hit, sound_hit = set(), set()
        miss_sound = True
        for f in self._into[A]:
            if self._deg[self.cat.dom(f)]:
                hit.add(f)
                sound_hit.add(f)
        for x, f in sorted(b.entries, key=lambda e: (e[1], e[0].sort_key())):
            if f in sound_hit:
                continue
            D = self.cat.dom(f)
            envf = env if f == self._ids[A] else self._restrict_env(env, f, node.inner)
            envx = dict(envf)
            envx[var] = x
            v, s = self.evaluate(body, D, envx)
            if v:
                hit.add(f)
                if s:
                    sound_hit.add(f)
            elif not s:
                miss_sound = False
        if self._covered(A, hit):
            return True, self._covered(A, sound_hit)
        return False, miss_sound

    # -- public helpers ---------------------------------------------------------------

    def force(self, A: str, phi: F.Formula, env: Mapping[str, Name] | None = None) -> Verdict:
        env = dict(env or {})
        _check_env(self.cat, A, phi, env)
        v, s = self.evaluate(self.compile(phi), A, env)
        return Verdict(v, s, self.rank)

    def truth_value(self, A: str, phi: F.Formula, env: Mapping[str, Name] | None = None) -> TruthSieve:
        env = dict(env or {})
        _check_env(self.cat, A, phi, env)
        node = self.compile(phi)
        arrows = set()
        exact = True
        for f in self._into[A]:
            envf = {v: restrict(self.cat, a, f) for v, a in env.items()}
            v, s = self.evaluate(node, self.cat.dom(f), envf)
            exact = exact and s
            if v:
                arrows.add(f)
        S = Sieve(A, frozenset(arrows))
        return TruthSieve(S, is_closed(self.site, S), exact)

    def clear(self) -> None:
        self._memo.clear()


def _check_env(cat, A: str, phi: F.Formula, env: Mapping[str, Name]) -> None:
    missing = F.free_vars(phi) - set(env)
    if missing:
        raise UnboundVariable(", ".join(sorted(missing)))
    for v, a in env.items():
        if a.base != A:
            raise NameTypeError(f"variable {v} is bound to a name at {a.base}, expected {A}")


def engine(site: Site, rank: int, budget: int | None = None) -> Engine:
    """The shared engine for ``site`` at ``rank`` (created on first use)."""
    key = ("engine", rank, budget)
    got = site.cache.get(key)
    if got is None:
        got = site.cache[key] = Engine(site, rank, budget)
    return got


def force(site: Site, A: str, phi: F.Formula, env: Mapping[str, Name] | None = None,
          n: int = 1, budget: int | None = None) -> Verdict:
    """``A ⊩ φ(env)`` with unbounded quantifiers over ``U_n``."""
    return engine(site, n, budget).force(A, phi, env)


def truth_value(site: Site, A: str, phi: F.Formula, env: Mapping[str, Name] | None = None,
                n: int = 1, budget: int | None = None) -> TruthSieve:
    """``‖φ(env)‖_A``: the arrows ``f`` with ``dom f ⊩ φ(env·f)``."""
    return engine(site, n, budget).truth_value(A, phi, env)


def forces_eq(site: Site, a: Name, b: Name) -> bool:
    return engine(site, 0).eq(a, b)


def forces_mem(site: Site, a: Name, b: Name) -> bool:
    return engine(site, 0).mem(a, b)


def _fresh_bound(body: F.Formula, env) -> str:
    return F.fresh_var(set(F.all_vars(body)) | set(env), "bound")


def bounded_forall(site: Site, A: str, a: Name, var: str, body: F.Formula,
                   env: Mapping[str, Name] | None = None, n: int = 1) -> Verdict:
    """``A ⊩ ∀var∈a body`` through the entries of ``a``."""
    if a.kind != "set":
        raise NameTypeError("bounded quantifier needs a set-type bound")
    t = _fresh_bound(body, env or {})
    return force(site, A, F.BoundedForall(var, t, body), {**(env or {}), t: a}, n)


def bounded_exists(site: Site, A: str, a: Name, var: str, body: F.Formula,
                   env: Mapping[str, Name] | None = None, n: int = 1) -> Verdict:
    """``A ⊩ ∃var∈a body``: a covering sieve of entry witnesses."""
    if a.kind != "set":
        raise NameTypeError("bounded quantifier needs a set-type bound")
    t = _fresh_bound(body, env or {})
    return force(site, A, F.BoundedExists(var, t, body), {**(env or {}), t: a}, n)


# --- Δ0 formulas over hereditarily finite sets ---------------------------------------

class NotDelta0(ValueError):
    pass


def hf_holds(phi: F.Formula, env: Mapping[str, HF]) -> bool:
    """Truth of a Δ0 formula of the pure membership language in V."""
    if isinstance(phi, F.Eq):
        return env[phi.left] == env[phi.right]
    if isinstance(phi, F.Mem):
        return env[phi.left] in env[phi.right]
    if isinstance(phi, F.And):
        return hf_holds(phi.left, env) and hf_holds(phi.right, env)
    if isinstance(phi, F.Or):
        return hf_holds(phi.left, env) or hf_holds(phi.right, env)
    if isinstance(phi, F.Implies):
        return (not hf_holds(phi.left, env)) or hf_holds(phi.right, env)
    if isinstance(phi, F.Not):
        return not hf_holds(phi.body, env)
    if isinstance(phi, F.BoundedForall):
        return all(hf_holds(phi.body, {**env, phi.var: y}) for y in env[phi.bound])
    if isinstance(phi, F.BoundedExists):
        return any(hf_holds(phi.body, {**env, phi.var: y}) for y in env[phi.bound])
    raise NotDelta0(f"{type(phi).__name__} is not allowed in a Δ0 formula")


@dataclass(frozen=True)
class Delta0Result:
    holds: bool
    truth: TruthSieve
    is_top: bool
    is_bottom: bool

    @property
    def agrees(self) -> bool:
        return self.is_top if self.holds else self.is_bottom


def delta0_absolute(site: Site, A: str, phi: F.Formula, args: Mapping[str, HF]) -> Delta0Result:
    """Evaluate ``φ(args)`` in V and ``‖φ(ǎ…)‖_A`` side by side."""
    if not F.is_delta0(phi):
        raise NotDelta0("formula is not Δ0")
    holds = hf_holds(phi, args)
    env = {v: check_name(site.cat, A, x) for v, x in args.items()}
    tv = truth_value(site, A, phi, env, n=0)
    return Delta0Result(holds, tv, tv.sieve == heyting_top(site, A), tv.sieve == heyting_bottom(site, A))


@dataclass(frozen=True)
class Delta0Case:
    site: str
    obj: str
    formula: str
    args: tuple
    holds: bool
    truth: tuple
    agrees: bool

    def to_json(self) -> dict:
        return {"site": self.site, "object": self.obj, "formula": self.formula,
                "args": {v: hf_str(x) for v, x in self.args}, "holds": self.holds,
                "truth": list(self.truth), "agrees": self.agrees}


def delta0_suite(site: Site, count: int = 100, seed: int = 0, max_rank: int = 3,
                 max_depth: int = 4, free: tuple[str, ...] = ("a", "b")) -> list[Delta0Case]:
    """Seeded random Δ0 formulas and HF arguments, compared at every object in turn."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        phi = F.random_delta0(rng, free, max_depth)
        args = {v: random_hf(rng, max_rank) for v in free}
        A = site.objects[i % len(site.objects)]
        res = delta0_absolute(site, A, phi, args)
        out.append(Delta0Case(site.name, A, F.to_text(phi), tuple(sorted(args.items())), res.holds,
                              tuple(res.truth.arrows), res.agrees))
    return out


# --- sentences over every object ----------------------------------------------------

def param_env(site: Site, A: str, params) -> dict[str, Name]:
    return {v: check_name(site.cat, A, x) for v, x in params}


def object_verdicts(site: Site, phi: F.Formula, n: int, params=(), hints: Hints | None = None,
                    budget: int | None = None) -> dict[str, Verdict]:
    """Verdict of the sentence ``phi`` at every object (parameters via check-names)."""
    eng = engine(site, n, budget)
    old = eng.hints
    if hints:
        eng.hints = dict(hints)
        eng.clear()
    try:
        out = {}
        for A in site.objects:
            out[A] = eng.force(A, phi, param_env(site, A, params))
        return out
    finally:
        if hints:
            eng.hints = old
            eng.clear()


def forced_everywhere(site: Site, phi: F.Formula, n: int = 1, params=(), hints: Hints | None = None,
                      budget: int | None = None) -> bool:
    """``‖φ‖_A`` is the top sieve at every object ``A``."""
    eng = engine(site, n, budget)
    old = eng.hints
    if hints:
        eng.hints = dict(hints)
        eng.clear()
    try:
        for A in site.objects:
            tv = eng.truth_value(A, phi, param_env(site, A, params))
            if tv.sieve != heyting_top(site, A):
                return False
        return True
    finally:
        if hints:
            eng.hints = old
            eng.clear()
