"""Forced equality and membership on a whole stage as boolean matrices.

``RelationTable`` solves the recursive clauses for ``=`` and ``∈`` on
``U_n(D)`` for every object at once, iterating to the (unique) fixed point.
``GridEvaluator`` then evaluates a formula for every assignment of stage
names to its free variables, one array per object.
"""
from __future__ import annotations

import numpy as np

from . import formula as F
from .names import Name, enumerate_names, restrict
from .sieves import Site


def _any_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Boolean matrix product ``(a @ b) > 0``."""
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=bool)
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0.5


class RelationTable:
    """``Eq[D][i, j]`` is ``D ⊩ a_i = a_j`` and ``Mem[D][i, j]`` is ``D ⊩ a_i ∈ a_j``."""

    def __init__(self, site: Site, n: int, budget: int | None = None):
        self.site = site
        self.cat = cat = site.cat
        self.rank = n
        self.names = {D: enumerate_names(cat, D, n, budget) for D in site.objects}
        self.index = {D: {a: i for i, a in enumerate(ns)} for D, ns in self.names.items()}
        self.into = {D: sorted(site.hom_into(D)) for D in site.objects}
        self.is_set = {D: np.array([a.kind == "set" for a in ns], dtype=bool)
                       for D, ns in self.names.items()}
        self.degenerate = {D: site.degenerate(D) for D in site.objects}
        self.restriction = {}
        self.entries = {}
        for D in site.objects:
            for g in self.into[D]:
                C = cat.dom(g)
                idx = self.index[C]
                self.restriction[g] = np.array([idx[restrict(cat, a, g)] for a in self.names[D]],
                                               dtype=np.int64)
                ent = np.zeros((len(self.names[C]), len(self.names[D])), dtype=bool)
                for j, b in enumerate(self.names[D]):
                    if b.kind == "set":
                        for x in b.by_arrow().get(g, ()):
                            ent[idx[x], j] = True
                self.entries[g] = ent
        self.covers = {D: [sorted(S) for S in site.covers(D)] for D in site.objects}
        self._solve()

    def _atom_eq(self, D: str) -> np.ndarray:
        names = self.names[D]
        atoms = np.array([a.kind == "atom" for a in names], dtype=bool)
        agree = {g: self.restriction[g][:, None] == self.restriction[g][None, :] for g in self.into[D]}
        out = self._cover_or(D, agree)
        return out & atoms[:, None] & atoms[None, :]

    def _cover_or(self, D: str, per_arrow: dict) -> np.ndarray:
        N = len(self.names[D])
        out = np.zeros((N, N), dtype=bool)
        for S in self.covers[D]:
            acc = np.ones((N, N), dtype=bool)
            for g in S:
                acc &= per_arrow[g]
            out |= acc
        return out

    def _solve(self) -> None:
        objs = list(self.site.objects)
        size = {D: len(self.names[D]) for D in objs}
        atom_eq = {D: self._atom_eq(D) for D in objs}
        eq = {D: np.full((size[D], size[D]), self.degenerate[D]) for D in objs}
        mem = {D: np.full((size[D], size[D]), self.degenerate[D]) for D in objs}
        self.iterations = 0
        while True:
            self.iterations += 1
            new_eq, new_mem = {}, {}
            for D in objs:
                if self.degenerate[D]:
                    new_eq[D], new_mem[D] = eq[D], mem[D]
                    continue
                witness, sub = {}, np.ones((size[D], size[D]), dtype=bool)
                for g in self.into[D]:
                    C, R, ent = self.cat.dom(g), self.restriction[g], self.entries[g]
                    witness[g] = _any_matmul(eq[C][R, :], ent)
                    sub &= ~_any_matmul(ent.T, ~mem[C][:, R])
                new_mem[D] = self._cover_or(D, witness) & self.is_set[D][None, :]
                both = self.is_set[D][:, None] & self.is_set[D][None, :]
                new_eq[D] = (both & sub & sub.T) | atom_eq[D]
            done = all(np.array_equal(new_eq[D], eq[D]) and np.array_equal(new_mem[D], mem[D])
                       for D in objs)
            eq, mem = new_eq, new_mem
            if done:
                break
        self.eq, self.mem = eq, mem

    def lookup_eq(self, a: Name, b: Name) -> bool | None:
        idx = self.index.get(a.base)
        if idx is None:
            return None
        i, j = idx.get(a), idx.get(b)
        if i is None or j is None:
            return None
        return bool(self.eq[a.base][i, j])

    def lookup_mem(self, a: Name, b: Name) -> bool | None:
        idx = self.index.get(a.base)
        if idx is None:
            return None
        i, j = idx.get(a), idx.get(b)
        if i is None or j is None:
            return None
        return bool(self.mem[a.base][i, j])

    def restrict_array(self, arr: np.ndarray, g: str) -> np.ndarray:
        """Pull an array over ``U(dom g)^k`` back to ``U(cod g)^k``."""
        if arr.ndim == 0:
            return arr
        R = self.restriction[g]
        return arr[np.ix_(*([R] * arr.ndim))]


class Grid:
    """One boolean array per object, axes named by sorted variables."""

    __slots__ = ("axes", "values")

    def __init__(self, axes: tuple[str, ...], values: dict):
        self.axes = axes
        self.values = values


def _align(arr: np.ndarray, axes: tuple[str, ...], target: tuple[str, ...]) -> np.ndarray:
    """Transpose and expand ``arr`` so it broadcasts against ``target`` axes."""
    order = [axes.index(v) for v in target if v in axes]
    arr = np.transpose(arr, order) if order != list(range(arr.ndim)) else arr
    shape = []
    it = iter(arr.shape)
    for v in target:
        shape.append(next(it) if v in axes else 1)
    return arr.reshape(shape)


class GridEvaluator:
    """Evaluate a formula at every object for every assignment from ``U_n``."""

    def __init__(self, table: RelationTable):
        self.t = table
        self.cat = table.cat
        self._memo: dict = {}

    def _full(self, D: str, axes) -> tuple[int, ...]:
        return tuple(len(self.t.names[D]) for _ in axes)

    def evaluate(self, phi: F.Formula) -> Grid:
        got = self._memo.get(phi)
        if got is None:
            got = self._memo[phi] = self._eval(phi)
        return got

    def _eval(self, phi) -> Grid:
        t = self.t
        axes = tuple(sorted(F.free_vars(phi)))
        vals = {}
        if isinstance(phi, (F.Eq, F.Mem)):
            rel = t.eq if isinstance(phi, F.Eq) else t.mem
            for D in t.names:
                m = rel[D]
                if phi.left == phi.right:
                    vals[D] = np.diagonal(m).copy()
                elif axes == (phi.left, phi.right):
                    vals[D] = m
                else:
                    vals[D] = m.T
        elif isinstance(phi, (F.AtomPred, F.SetPred)):
            for D in t.names:
                vals[D] = ~t.is_set[D] if isinstance(phi, F.AtomPred) else t.is_set[D]
        elif isinstance(phi, (F.And, F.Or)):
            L, R = self.evaluate(phi.left), self.evaluate(phi.right)
            op = np.logical_and if isinstance(phi, F.And) else np.logical_or
            for D in t.names:
                v = op(_align(L.values[D], L.axes, axes), _align(R.values[D], R.axes, axes))
                vals[D] = np.broadcast_to(v, self._full(D, axes))
        elif isinstance(phi, (F.Implies, F.Not)):
            if isinstance(phi, F.Not):
                L = self.evaluate(phi.body)
                local = {D: ~_align(L.values[D], L.axes, axes) for D in t.names}
            else:
                L, R = self.evaluate(phi.left), self.evaluate(phi.right)
                local = {D: ~_align(L.values[D], L.axes, axes) | _align(R.values[D], R.axes, axes)
                         for D in t.names}
            local = {D: np.broadcast_to(v, self._full(D, axes)) for D, v in local.items()}
            vals = self._all_arrows(local, axes)
        elif isinstance(phi, (F.Forall, F.Exists)):
            B = self.evaluate(phi.body)
            local = {}
            for D in t.names:
                v = B.values[D]
                if phi.var in B.axes:
                    k = B.axes.index(phi.var)
                    v = v.all(axis=k) if isinstance(phi, F.Forall) else v.any(axis=k)
                v = _align(v, tuple(a for a in B.axes if a != phi.var), axes)
                local[D] = np.broadcast_to(v, self._full(D, axes))
            if isinstance(phi, F.Forall):
                vals = self._all_arrows(local, axes)
            else:
                vals = self._covered(lambda D, g: t.restrict_array(local[self.cat.dom(g)], g), axes)
        else:
            vals = self._bounded(phi, axes)
        for D in t.names:
            if t.degenerate[D]:
                vals[D] = np.ones(self._full(D, axes), dtype=bool)
        return Grid(axes, vals)

    def _all_arrows(self, local: dict, axes) -> dict:
        t = self.t
        out = {}
        for D in t.names:
            acc = np.ones(self._full(D, axes), dtype=bool)
            for g in t.into[D]:
                C = self.cat.dom(g)
                if t.degenerate[C]:
                    continue
                acc &= t.restrict_array(local[C], g)
            out[D] = acc
        return out

    def _covered(self, per_arrow, axes) -> dict:
        """OR over covering sieves of the AND of ``per_arrow(D, g)``."""
        t = self.t
        out = {}
        for D in t.names:
            parts = {}
            for g in t.into[D]:
                if t.degenerate[self.cat.dom(g)]:
                    parts[g] = np.ones(self._full(D, axes), dtype=bool)
                else:
                    parts[g] = np.broadcast_to(per_arrow(D, g), self._full(D, axes))
            acc_or = np.zeros(self._full(D, axes), dtype=bool)
            for S in t.covers[D]:
                acc = np.ones(self._full(D, axes), dtype=bool)
                for g in S:
                    acc &= parts[g]
                acc_or |= acc
            out[D] = acc_or
        return out

    def _entry_hits(self, phi, B: Grid, D: str, g: str, axes, want: bool) -> np.ndarray:
        """For each assignment: is there an entry ``(z, g)`` of the bound whose body is ``want``?"""
        t = self.t
        C = self.cat.dom(g)
        R = t.restriction[g]
        others = tuple(a for a in B.axes if a != phi.var)
        body = B.values[C]
        if phi.var in B.axes:
            k = B.axes.index(phi.var)
            body = np.moveaxis(body, k, 0)
        else:
            body = np.broadcast_to(body[None, ...], (len(t.names[C]),) + body.shape)
        if others:
            body = body[np.ix_(np.arange(body.shape[0]), *([R] * len(others)))]
        hit = body if want else ~body
        # float32 keeps BLAS in play; counts stay far below 2**24
        ent = t.entries[g].astype(np.float32)
        if phi.bound in others:
            k = others.index(phi.bound)
            hit = np.moveaxis(hit, k + 1, 1)
            rest = tuple(a for a in others if a != phi.bound)
            counts = np.einsum("zt,zt...->t...", ent, hit.astype(np.float32))
        else:
            rest = others
            counts = np.tensordot(ent, hit.astype(np.float32), axes=([0], [0]))
        return _align(counts > 0.5, (phi.bound,) + rest, axes)

    def _bounded(self, phi, axes) -> dict:
        t = self.t
        B = self.evaluate(phi.body)
        if isinstance(phi, F.BoundedForall):
            out = {}
            for D in t.names:
                acc = np.ones(self._full(D, axes), dtype=bool)
                for g in t.into[D]:
                    if t.degenerate[self.cat.dom(g)]:
                        continue
                    acc &= ~self._entry_hits(phi, B, D, g, axes, want=False)
                out[D] = acc
            return out
        return self._covered(lambda D, g: self._entry_hits(phi, B, D, g, axes, want=True), axes)

    def valid(self, phi: F.Formula) -> bool:
        """Forced at every object under every assignment from the stage."""
        g = self.evaluate(phi)
        return all(bool(np.all(v)) for v in g.values.values())

    def counterexamples(self, phi: F.Formula, limit: int = 5) -> list[tuple[str, dict]]:
        g = self.evaluate(phi)
        out = []
        for D, v in g.values.items():
            for pos in zip(*np.nonzero(~np.asarray(v))):
                out.append((D, {a: self.t.names[D][i] for a, i in zip(g.axes, pos)}))
                if len(out) >= limit:
                    return out
        return out


def relation_table(site: Site, n: int, budget: int | None = None) -> RelationTable:
    key = ("table", n, budget)
    got = site.cache.get(key)
    if got is None:
        got = site.cache[key] = RelationTable(site, n, budget)
    return got


# --- equality laws and closedness of atomic truth sieves --------------------------------

EQUALITY_LAWS = ("reflexivity", "symmetry", "transitivity", "member-substitution",
                 "set-substitution", "atom-substitution", "sort-substitution")


def _pulled(table: RelationTable, f: str):
    """Relations and sort vectors of ``U(cod f)`` read at ``dom f`` along ``f``."""
    C = table.cat.dom(f)
    R = table.restriction[f]
    E = table.eq[C][np.ix_(R, R)]
    M = table.mem[C][np.ix_(R, R)]
    deg = table.degenerate[C]
    is_set = table.is_set[C][R] | deg
    is_atom = ~table.is_set[C][R] | deg
    return E, M, is_atom, is_set


def equality_law_violations(table: RelationTable) -> dict[str, int]:
    """Count failures of the seven equality laws, arrow by arrow.

    ``‖φ‖ ≤ ‖ψ‖`` between truth sieves means every arrow ``f`` in the first
    is in the second, so each law is checked on the relations pulled back
    along every arrow into every object.
    """
    out = dict.fromkeys(EQUALITY_LAWS, 0)
    for A in table.names:
        for f in table.into[A]:
            E, M, at, st = _pulled(table, f)
            out["reflexivity"] += int(np.count_nonzero(~np.diagonal(E)))
            out["symmetry"] += int(np.count_nonzero(E & ~E.T))
            out["transitivity"] += int(np.count_nonzero(_any_matmul(E, E) & ~E))
            # a ∈ b, a = c  ⊢  c ∈ b
            out["member-substitution"] += int(np.count_nonzero(_any_matmul(E.T, M) & ~M))
            # a ∈ b, b = c  ⊢  a ∈ c
            out["set-substitution"] += int(np.count_nonzero(_any_matmul(M, E) & ~M))
            out["atom-substitution"] += int(np.count_nonzero(E & at[:, None] & ~at[None, :]))
            out["sort-substitution"] += int(np.count_nonzero(E & st[:, None] & ~st[None, :]))
    return out


def atomic_truth_sieves(table: RelationTable, A: str) -> dict[str, set]:
    """Distinct truth sieves of ``=``, ``∈``, ``:atom``, ``:set`` over ``U(A)``."""
    from .sieves import Sieve

    arrows = table.into[A]
    masks = {k: 0 for k in ("eq", "mem", "atom", "set")}
    for bit, f in enumerate(arrows):
        E, M, at, st = _pulled(table, f)
        w = np.int64(1) << bit
        masks["eq"] = masks["eq"] + E.astype(np.int64) * w
        masks["mem"] = masks["mem"] + M.astype(np.int64) * w
        masks["atom"] = masks["atom"] + at.astype(np.int64) * w
        masks["set"] = masks["set"] + st.astype(np.int64) * w
    out = {}
    for k, m in masks.items():
        out[k] = {Sieve(A, frozenset(f for bit, f in enumerate(arrows) if (int(v) >> bit) & 1))
                  for v in np.unique(np.asarray(m))}
    return out


def closedness_violations(table: RelationTable) -> int:
    """Atomic truth sieves over the stage that are not J-closed sieves."""
    from .sieves import is_closed, is_sieve

    bad = 0
    for A in table.names:
        for sieves in atomic_truth_sieves(table, A).values():
            for S in sieves:
                if not is_sieve(table.cat, S) or not is_closed(table.site, S):
                    bad += 1
    return bad
