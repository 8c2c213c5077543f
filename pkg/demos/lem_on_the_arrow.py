"""Excluded middle fails at B on the arrow category A -> B.

The name b = {(@u, u)} has a member only after restricting along u, so
"some x is in b" is true on the sieve {u} and neither it nor its negation
is forced at B.
"""
from sheafforcing import formula as F
from sheafforcing.catalog import CATALOG
from sheafforcing.forcing import force, truth_value
from sheafforcing.names import atom, set_name, show

site = CATALOG["2"]()
b = set_name("B", [(atom(site.cat, "u"), "u")])
ex = F.parse("exists x . x in b")

print("b =", show(b))
print("truth sieve of", F.to_text(ex), "at B:", truth_value(site, "B", ex, {"b": b}).arrows)
for phi in (ex, F.Not(ex), F.Or(ex, F.Not(ex)), F.Not(F.Not(F.Or(ex, F.Not(ex))))):
    v = force(site, "B", phi, {"b": b})
    print(f"B forces {F.to_text(phi)}: {v.value} ({v.scope})")

# once {u} covers B the same existential is forced outright
covered = CATALOG["2'"]()
print("with {u} covering B:", force(covered, "B", ex, {"b": b}).value)
