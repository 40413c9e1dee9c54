"""
Propagating bounds to a fixed point
===================================

Facts like ``r <= 769`` carry the rule that produced them, their premises,
and any assumption they rest on.  Rules run in rounds on a frozen snapshot,
so the result does not depend on rule order.
"""

from expdio.bounds import (C0, V_ONE, Fact, derive_all, exclusion_certificate, ge,
                           rederive_constants, b_floor_report)
from expdio.certificates import replay

d = derive_all([ge("c", C0, "seed")])
for key in ("r<=", "z<=", "y<=", "b>=", "u1>="):
    print(d.facts[key])
print("rounds:", d.rounds)

# where does y <= 634 come from?
print(d.ancestors(["y<="]))
for tag in d.assumptions():
    print("  assumes:", tag)

# %%
# Adding v = 1 makes the size test fire and the engine reports a contradiction.
cert = exclusion_certificate([ge("c", C0, "seed"), Fact(V_ONE, "flag", True, "seed")])
print(cert.verdict, replay(cert))

# %%
# Printed constants, re-derived; the elementary b floor is one place they differ.
for ch in rederive_constants():
    print(ch.line())
print(b_floor_report())
