"""Print the axiom check table for every built-in site at rank 1."""
from sheafforcing.catalog import CATALOG
from sheafforcing.izfa import check_axioms

for key, make in CATALOG.items():
    site = make()
    print(f"site {key}")
    for r in check_axioms(site, 1):
        print(f"  {r.axiom:<32} {r.kind:<16} {r.status}")
