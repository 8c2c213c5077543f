"""Small sites used throughout the tests, demos and the CLI."""
from __future__ import annotations

from .fincat import FinCategory
from .sieves import Sieve, Site, dense_topology, generate_topology, trivial_topology


def point_category() -> FinCategory:
    """The terminal category: one object ``*`` and its identity."""
    return FinCategory.build(["*"], {}, identities={"*": "id_*"})


def arrow_category() -> FinCategory:
    """``A --u--> B``."""
    return FinCategory.build(["A", "B"], {"u": ("A", "B")})


def chain_category(n: int = 3) -> FinCategory:
    """The poset ``0 < 1 < ... < n-1`` with arrows ``i<j`` named ``i_j``."""
    objs = [str(i) for i in range(n)]
    arrows = {f"{i}_{j}": (str(i), str(j)) for i in range(n) for j in range(i + 1, n)}
    comp = [(f"{j}_{k}", f"{i}_{j}", f"{i}_{k}")
            for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)]
    return FinCategory.build(objs, arrows, comp)


def parallel_pair_category() -> FinCategory:
    """Two arrows ``u, v: A -> B``."""
    return FinCategory.build(["A", "B"], {"u": ("A", "B"), "v": ("A", "B")})


def point_site() -> Site:
    cat = point_category()
    return Site(cat, trivial_topology(cat), "1")


def arrow_site_trivial() -> Site:
    cat = arrow_category()
    return Site(cat, trivial_topology(cat), "2")


def arrow_site_covered() -> Site:
    """``A -> B`` where ``{u}`` also covers ``B``."""
    cat = arrow_category()
    J = generate_topology(cat, {"B": [Sieve("B", frozenset({"u"}))]})
    return Site(cat, J, "2'")


def arrow_site_degenerate() -> Site:
    """``A -> B`` where the empty sieve covers ``A``."""
    cat = arrow_category()
    J = generate_topology(cat, {"A": [Sieve("A", frozenset())]})
    return Site(cat, J, "2-degenerate")


def chain_site(n: int = 3) -> Site:
    cat = chain_category(n)
    return Site(cat, dense_topology(cat), f"chain{n}")


def parallel_pair_site() -> Site:
    cat = parallel_pair_category()
    return Site(cat, trivial_topology(cat), "parallel")


CATALOG = {
    "1": point_site,
    "2": arrow_site_trivial,
    "2'": arrow_site_covered,
    "chain3": chain_site,
    "parallel": parallel_pair_site,
}


def catalog_sites() -> list[Site]:
    """The five acceptance sites, freshly built."""
    return [make() for make in CATALOG.values()]
