"""Names over a finite site: atoms, restriction-closed set names, and the
finite cumulative stages U_n(A) of the name hierarchy.

Names are interned, so two structurally equal names are the same Python
object and ``a is b`` decides equality-as-data. Forced equality is a
different, coarser relation and lives in :mod:`sheafforcing.forcing`.
"""
from __future__ import annotations

import os
import itertools
import threading
import weakref
from typing import Iterable

from .fincat import FinCategory
from .hf import HF, hf_sorted

DEFAULT_BUDGET = 10_000


class NameTypeError(ValueError):
    """A name or entry whose arrows and base objects do not line up."""


class BudgetExceeded(RuntimeError):
    def __init__(self, obj: str, rank: int, budget: int):
        super().__init__(f"U_{rank}({obj}) has more than {budget} names")
        self.obj, self.rank, self.budget = obj, rank, budget


def enumeration_budget() -> int:
    raw = os.environ.get("SHEAF_FORCING_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


class Name:
    """A node of the name hierarchy living at object ``base``.

    Atoms carry an arrow ``arrow`` out of ``base``; set names carry a
    frozenset ``entries`` of ``(name, f)`` pairs with ``cod f == base``.
    Build them through :func:`atom` and :func:`set_name`.
    """

    __slots__ = ("kind", "base", "arrow", "entries", "uid", "rank", "_by_arrow", "_key",
                 "__weakref__")

    def __init__(self, kind, base, arrow, entries, uid, rank):
        self.kind = kind
        self.base = base
        self.arrow = arrow
        self.entries = entries
        self.uid = uid
        self.rank = rank
        self._by_arrow = None
        self._key = None

    @property
    def is_atom(self) -> bool:
        return self.kind == "atom"

    @property
    def is_set(self) -> bool:
        return self.kind == "set"

    def by_arrow(self) -> dict[str, tuple["Name", ...]]:
        """Entries grouped by their arrow (set names only)."""
        if self._by_arrow is None:
            groups: dict[str, list[Name]] = {}
            for y, f in self.entries:
                groups.setdefault(f, []).append(y)
            self._by_arrow = {f: tuple(sorted(ys, key=Name.sort_key)) for f, ys in groups.items()}
        return self._by_arrow

    def sort_key(self) -> tuple:
        """Structural order, independent of interning history."""
        if self._key is None:
            if self.kind == "atom":
                self._key = (0, 0, self.base, self.arrow)
            else:
                inner = tuple(sorted((y.sort_key(), f) for y, f in self.entries))
                self._key = (self.rank, 1, self.base, len(inner), inner)
        return self._key

    def __repr__(self) -> str:
        return f"Name[{self.base}]({show(self)})"

    def __reduce__(self):
        if self.kind == "atom":
            return (atom_at, (self.base, self.arrow))
        return (set_name, (self.base, tuple(self.entries)))


_lock = threading.Lock()
# weak values: names nobody refers to any more drop out of the table
_table: "weakref.WeakValueDictionary[tuple, Name]" = weakref.WeakValueDictionary()
_uids = itertools.count()


def _intern(key: tuple, kind: str, base: str, arrow, entries, rank: int) -> Name:
    got = _table.get(key)
    if got is not None:
        return got
    with _lock:
        got = _table.get(key)
        if got is None:
            got = Name(kind, base, arrow, entries, next(_uids), rank)
            _table[key] = got
        return got


def interned_count() -> int:
    return len(_table)


def atom_at(base: str, k: str) -> Name:
    return _intern(("atom", base, k), "atom", base, k, None, 0)


def atom(cat: FinCategory, k: str) -> Name:
    """The atom tagged by ``k``; it lives at ``dom k``."""
    return atom_at(cat.dom(k), k)


def set_name(base: str, entries: Iterable[tuple[Name, str]]) -> Name:
    """Intern a set name without checking closure (see :func:`close_name`)."""
    ents = frozenset(entries)
    rank = 1 + max((y.rank for y, _ in ents), default=0)
    return _intern(("set", base, ents), "set", base, None, ents, rank)


def empty_set(base: str) -> Name:
    return set_name(base, ())


def restrict(cat: FinCategory, a: Name, f: str) -> Name:
    """``a·f``, a name at ``dom f``."""
    if cat.cod(f) != a.base:
        raise NameTypeError(f"cannot restrict a name at {a.base} along {f}: "
                            f"{cat.dom(f)}->{cat.cod(f)}")
    memo = cat.cache.setdefault("restrict", {})
    key = (a, f)
    got = memo.get(key)
    if got is not None:
        return got
    if a.kind == "atom":
        out = atom_at(cat.dom(f), cat.compose(a.arrow, f))
    else:
        groups = a.by_arrow()
        ents = []
        for g in cat.hom_into(cat.dom(f)):
            for y in groups.get(cat.compose(f, g), ()):
                ents.append((y, g))
        out = set_name(cat.dom(f), ents)
    memo[key] = out
    return out


def _check_entry(cat: FinCategory, A: str, y: Name, f: str) -> None:
    if f not in cat._cod:
        raise NameTypeError(f"unknown arrow {f}")
    if cat.cod(f) != A:
        raise NameTypeError(f"entry arrow {f} does not land in {A}")
    if y.base != cat.dom(f):
        raise NameTypeError(f"entry name lives at {y.base}, expected dom {f} = {cat.dom(f)}")


def close_name(cat: FinCategory, A: str, generators: Iterable[tuple[Name, str]]) -> Name:
    """Least restriction-closed set name at ``A`` containing ``generators``."""
    seen: set[tuple[Name, str]] = set()
    todo = list(generators)
    for y, f in todo:
        _check_entry(cat, A, y, f)
    while todo:
        y, f = todo.pop()
        if (y, f) in seen:
            continue
        seen.add((y, f))
        for g in cat.hom_into(y.base):
            pair = (restrict(cat, y, g), cat.compose(f, g))
            if pair not in seen:
                todo.append(pair)
    return set_name(A, seen)


def is_closed_name(cat: FinCategory, a: Name) -> bool:
    if a.kind == "atom":
        return True
    for y, f in a.entries:
        for g in cat.hom_into(y.base):
            if (restrict(cat, y, g), cat.compose(f, g)) not in a.entries:
                return False
    return True


def name_problems(cat: FinCategory, a: Name) -> list[str]:
    """Typing and closure defects of ``a``, checked recursively."""
    out = []
    if a.kind == "atom":
        if a.arrow not in cat._dom or cat.dom(a.arrow) != a.base:
            out.append(f"atom {a.arrow} does not start at {a.base}")
        return out
    for y, f in a.entries:
        try:
            _check_entry(cat, a.base, y, f)
        except NameTypeError as exc:
            out.append(str(exc))
    if not out and not is_closed_name(cat, a):
        out.append("entries are not closed under restriction")
    for y, _ in a.entries:
        out.extend(name_problems(cat, y))
    return out


def check_name(cat: FinCategory, A: str, x: HF) -> Name:
    """The canonical name of the hereditarily finite set ``x`` at ``A``."""
    memo = cat.cache.setdefault("check", {})
    key = (A, x)
    got = memo.get(key)
    if got is None:
        ents = [(check_name(cat, cat.dom(f), y), f) for y in x for f in cat.hom_into(A)]
        got = memo[key] = set_name(A, ents)
    return got


def up(cat: FinCategory, A: str, a: Name, b: Name) -> Name:
    """Unordered pair name ``{a, b}`` at ``A``."""
    if a.base != A or b.base != A:
        raise NameTypeError(f"up at {A} needs names at {A}")
    ents = []
    for f in cat.hom_into(A):
        ents.append((restrict(cat, a, f), f))
        ents.append((restrict(cat, b, f), f))
    return set_name(A, ents)


def union_name(cat: FinCategory, u: Name) -> Name:
    """``⋃u``: entries ``(x, f∘g)`` for ``(y, f) ∈ u`` and ``(x, g) ∈ y``."""
    if u.kind != "set":
        raise NameTypeError("union of an atom name")
    ents = set()
    for y, f in u.entries:
        if y.kind == "set":
            for x, g in y.entries:
                ents.add((x, cat.compose(f, g)))
    return set_name(u.base, ents)


def op_pair(cat: FinCategory, A: str, a: Name, b: Name) -> Name:
    """Kuratowski pair ``{{a}, {a, b}}`` at ``A``."""
    return up(cat, A, up(cat, A, a, a), up(cat, A, a, b))


def _closed_subsets(pool: list[tuple[Name, str]], index: dict, cat: FinCategory, limit: int):
    """Yield bitmasks of the restriction-closed subsets of ``pool``.

    Requirements form a preorder; each decision propagates its whole
    up- or down-closure so every leaf of the search is a distinct valid set.
    """
    n = len(pool)
    succ = []
    for y, f in pool:
        m = 0
        for g in cat.hom_into(y.base):
            m |= 1 << index[(restrict(cat, y, g), cat.compose(f, g))]
        succ.append(m)
    req = list(succ)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            m = req[i]
            acc = m
            rest = m
            while rest:
                low = rest & -rest
                acc |= req[low.bit_length() - 1]
                rest ^= low
            if acc != m:
                req[i] = acc
                changed = True
    dep = [0] * n
    for i in range(n):
        rest = req[i]
        while rest:
            low = rest & -rest
            dep[low.bit_length() - 1] |= 1 << i
            rest ^= low
    produced = 0
    stack = [(0, 0, 0)]
    while stack:
        j, inc, exc = stack.pop()
        decided = inc | exc
        while j < n and (decided >> j) & 1:
            j += 1
        if j == n:
            produced += 1
            if produced > limit:
                raise _Overflow
            yield inc
            continue
        # push "exclude" first so "include" is explored first
        stack.append((j + 1, inc, exc | dep[j]))
        stack.append((j + 1, inc | req[j], exc))


class _Overflow(Exception):
    pass


def _stage(cat: FinCategory, A: str, n: int, budget: int) -> tuple[Name, ...]:
    memo = cat.cache.setdefault("stages", {})
    key = (A, n)
    if key in memo:
        got = memo[key]
        if isinstance(got, BudgetExceeded):
            if got.budget >= budget:
                raise got
        elif len(got) <= budget:
            return got
        else:
            raise BudgetExceeded(A, n, budget)
    atoms = tuple(atom_at(A, k) for k in cat.hom_from(A))
    if n == 0:
        out = atoms
    else:
        pool = []
        for f in cat.hom_into(A):
            pool.extend((y, f) for y in _stage(cat, cat.dom(f), n - 1, budget))
        index = {p: i for i, p in enumerate(pool)}
        out_list = list(atoms)
        try:
            for mask in _closed_subsets(pool, index, cat, budget - len(atoms)):
                ents = []
                rest = mask
                while rest:
                    low = rest & -rest
                    ents.append(pool[low.bit_length() - 1])
                    rest ^= low
                out_list.append(set_name(A, ents))
        except _Overflow:
            exc = BudgetExceeded(A, n, budget)
            memo[key] = exc
            raise exc from None
        out = tuple(out_list)
    if len(out) > budget:
        raise BudgetExceeded(A, n, budget)
    memo[key] = out
    return out


def enumerate_names(cat: FinCategory, A: str, n: int, budget: int | None = None) -> tuple[Name, ...]:
    """All names in the cumulative stage ``U_n(A)``.

    Atoms come first, then set names in a fixed enumeration order. Raises
    :class:`BudgetExceeded` if any stage involved exceeds ``budget``.
    """
    if n < 0:
        raise ValueError("rank must be non-negative")
    return _stage(cat, A, n, enumeration_budget() if budget is None else budget)


def stage_size(cat: FinCategory, A: str, n: int, budget: int | None = None) -> int | None:
    """``|U_n(A)|``, or ``None`` when the budget is exceeded."""
    try:
        return len(enumerate_names(cat, A, n, budget))
    except BudgetExceeded:
        return None


# --- text and document forms -------------------------------------------------

def show(a: Name) -> str:
    if a.kind == "atom":
        return f"@{a.arrow}"
    parts = sorted(f"({show(y)},{f})" for y, f in a.entries)
    return "{" + ",".join(parts) + "}"


def dump_name(a: Name) -> dict:
    if a.kind == "atom":
        return {"atom": a.arrow}
    ents = sorted(a.entries, key=lambda e: (e[0].sort_key(), e[1]))
    return {"set": [[dump_name(y), f] for y, f in ents], "autoclose": False}


def load_name(cat: FinCategory, doc, A: str) -> Name:
    """Read a name document living at ``A``.

    ``{"atom": k}`` or ``{"set": [[doc, f], ...], "autoclose": bool}``.
    Without ``autoclose`` the entries must already be closed.
    """
    if not isinstance(doc, dict):
        raise NameTypeError(f"name document must be an object, got {type(doc).__name__}")
    if "atom" in doc:
        k = doc["atom"]
        if k not in cat._dom:
            raise NameTypeError(f"unknown arrow {k}")
        if cat.dom(k) != A:
            raise NameTypeError(f"atom {k} starts at {cat.dom(k)}, not {A}")
        return atom_at(A, k)
    if "set" not in doc:
        raise NameTypeError("name document needs an 'atom' or 'set' key")
    ents = []
    for item in doc["set"]:
        if not (isinstance(item, (list, tuple)) and len(item) == 2):
            raise NameTypeError(f"set entry must be [name, arrow], got {item!r}")
        sub, f = item
        if f not in cat._cod:
            raise NameTypeError(f"unknown arrow {f}")
        if cat.cod(f) != A:
            raise NameTypeError(f"entry arrow {f} does not land in {A}")
        ents.append((load_name(cat, sub, cat.dom(f)), f))
    if doc.get("autoclose", False):
        return close_name(cat, A, ents)
    out = set_name(A, ents)
    if not is_closed_name(cat, out):
        raise NameTypeError("set entries are not closed under restriction (use autoclose)")
    return out


def check_names_of(cat: FinCategory, A: str, xs: Iterable[HF]) -> list[Name]:
    return [check_name(cat, A, x) for x in hf_sorted(xs)]
