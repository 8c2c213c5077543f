"""Walk through the sheaf / (C,J)-set round trip on the covered arrow site."""
from sheafforcing.catalog import CATALOG
from sheafforcing.settopos import (check_equivalence, enumerate_sheaves, functor_K_obj,
                                   functor_L_obj, iso_sigma)

site = CATALOG["2'"]()
sheaves = enumerate_sheaves(site, 2)
print(f"{len(sheaves)} sheaves with at most 2 elements per object")

F = sheaves[-1]
KF = functor_K_obj(site, F)
for A, x in KF.reps.items():
    print(f"K F at {A}: a set name with {len(x.entries)} entries")

LKF = functor_L_obj(site, KF)
sigma, checks = iso_sigma(site, F, LKF)
print("sigma checks:", ", ".join(f"{name}={'ok' if ok else 'FAIL'}" for name, ok in checks))

rep = check_equivalence(site, bound=2)
print("full report:", rep.counts(), "ok" if rep.ok else "FAILED")
