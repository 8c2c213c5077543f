"""Reading and writing site documents (JSON).

A document looks like::

    {"name": "2",
     "objects": ["A", "B"],
     "arrows": [{"name": "id_A", "dom": "A", "cod": "A"}, ...],
     "identities": {"A": "id_A", "B": "id_B"},
     "comp": [["f", "g", "f∘g"], ...],
     "unit_laws": "implicit",
     "topology": {"mode": "explicit" | "basis",
                  "sieves": {"B": [["id_B", "u"], ["u"]]}}}

``comp`` lists ``f ∘ g = h`` triples. With ``unit_laws: implicit`` (the
default) composites with identities may be left out. In ``explicit`` mode the
sieve lists are the full topology and are validated as given; in ``basis``
mode they generate the least topology containing them.
"""
from __future__ import annotations

import json
from pathlib import Path

from .fincat import FinCategory, ValidationReport, Violation, validate_category
from .sieves import Sieve, Site, Topology, generate_topology, sieve_problems, validate_topology


class SiteFormatError(ValueError):
    """The document is malformed (as opposed to describing an invalid site)."""


def _need(doc: dict, key: str, kind):
    if key not in doc:
        raise SiteFormatError(f"missing key {key!r}")
    val = doc[key]
    if not isinstance(val, kind):
        raise SiteFormatError(f"{key!r} must be a {kind.__name__}")
    return val


def category_from_doc(doc: dict) -> FinCategory:
    objects = _need(doc, "objects", list)
    arrows = {}
    for item in _need(doc, "arrows", list):
        if not isinstance(item, dict) or not {"name", "dom", "cod"} <= set(item):
            raise SiteFormatError(f"arrow entry needs name/dom/cod: {item!r}")
        arrows[str(item["name"])] = (str(item["dom"]), str(item["cod"]))
    identities = {str(k): str(v) for k, v in _need(doc, "identities", dict).items()}
    table = {}
    for item in doc.get("comp", []):
        if not (isinstance(item, list) and len(item) == 3):
            raise SiteFormatError(f"composition entry must be [f, g, h]: {item!r}")
        f, g, h = map(str, item)
        table[(f, g)] = h
    mode = doc.get("unit_laws", "implicit")
    if mode not in ("implicit", "explicit"):
        raise SiteFormatError(f"unit_laws must be implicit or explicit, got {mode!r}")
    if mode == "implicit":
        for f, (d, c) in arrows.items():
            if d in identities:
                table.setdefault((f, identities[d]), f)
            if c in identities:
                table.setdefault((identities[c], f), f)
    return FinCategory([str(o) for o in objects], arrows, table, identities)


def topology_from_doc(cat: FinCategory, doc: dict) -> Topology:
    top = doc.get("topology", {"mode": "basis", "sieves": {}})
    if not isinstance(top, dict):
        raise SiteFormatError("'topology' must be an object")
    mode = top.get("mode", "basis")
    if mode not in ("explicit", "basis"):
        raise SiteFormatError(f"topology mode must be explicit or basis, got {mode!r}")
    raw = top.get("sieves", {})
    if not isinstance(raw, dict):
        raise SiteFormatError("'sieves' must map objects to lists of arrow lists")
    sieves = {}
    for A, lists in raw.items():
        if not isinstance(lists, list) or not all(isinstance(s, list) for s in lists):
            raise SiteFormatError(f"sieves for {A!r} must be a list of arrow lists")
        sieves[str(A)] = [Sieve(str(A), frozenset(map(str, s))) for s in lists]
    if mode == "explicit":
        return Topology({A: frozenset(sieves.get(A, ())) for A in cat.objects})
    return generate_topology(cat, sieves)


def load_site_doc(doc: dict) -> tuple[Site, ValidationReport]:
    """Build the site and report whether it is valid.

    Raises :class:`SiteFormatError` only for malformed documents.
    """
    if not isinstance(doc, dict):
        raise SiteFormatError("site document must be a JSON object")
    cat = category_from_doc(doc)
    rep = validate_category(cat)
    if not rep.ok:
        return Site(cat, Topology({A: frozenset() for A in cat.objects}), doc.get("name", "")), rep
    top = doc.get("topology", {})
    if isinstance(top, dict) and top.get("mode", "basis") == "basis":
        for A, lists in (top.get("sieves") or {}).items():
            for s in lists:
                probs = sieve_problems(cat, Sieve(str(A), frozenset(map(str, s))))
                if probs:
                    return (Site(cat, Topology({B: frozenset() for B in cat.objects}), doc.get("name", "")),
                            ValidationReport((Violation("sieve", f"basis sieve {sorted(s)} on {A}: {probs[0]}"),)))
    J = topology_from_doc(cat, doc)
    return Site(cat, J, str(doc.get("name", ""))), validate_topology(cat, J)


def load_site(path: str | Path) -> tuple[Site, ValidationReport]:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SiteFormatError(f"not valid JSON: {exc}") from exc
    return load_site_doc(doc)


def site_to_doc(site: Site) -> dict:
    """The explicit-mode document of ``site``; round-trips through :func:`load_site_doc`."""
    cat = site.cat
    return {
        "name": site.name,
        "objects": list(cat.objects),
        "arrows": [{"name": f, "dom": cat.dom(f), "cod": cat.cod(f)} for f in cat.arrows],
        "identities": dict(cat.identities),
        "comp": [[f, g, h] for (f, g), h in sorted(cat.comp.items())],
        "unit_laws": "explicit",
        "topology": {"mode": "explicit",
                     "sieves": {A: [sorted(S) for S in sorted(site.covers(A), key=lambda s: (len(s), sorted(s)))]
                                for A in cat.objects}},
    }
