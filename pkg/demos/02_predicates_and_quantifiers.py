"""Algebra-valued predicates on finite sets, with quantifiers as adjoints.

Predicates assign a truth value to each point. Reindexing along a map
pulls a predicate back; the quantifiers push forward by fiberwise join
and meet, and each is adjoint to reindexing on the appropriate side.
"""
import numpy as np

from tritopos.formats import load_algebra
from tritopos.tripos import (FinMap, FinSetObj, Predicate, all_predicates,
                             exists_along, forall_along, power_object,
                             reindex, validate_tripos)

H = load_algebra("chain3")
code = {name: H.index(name) for name in H.elements}

people = FinSetObj(("ada", "bob", "cleo"))
teams = FinSetObj(("red", "blue"))
team_of = FinMap.from_dict(people, teams,
                           {"ada": "red", "bob": "red", "cleo": "blue"})

# "is awake", with a hedge on bob
awake = Predicate(H, people, np.array([code["1"], code["h"], code["0"]],
                                      dtype=np.uint8))

# existential image: a team is awake as strongly as its most awake member
team_awake = exists_along(team_of, awake)
print("some member awake:",
      {t: H.name(int(v)) for t, v in zip(teams.elements, team_awake.values)})

# universal image: as strongly as its least awake member
all_awake = forall_along(team_of, awake)
print("every member awake:",
      {t: H.name(int(v)) for t, v in zip(teams.elements, all_awake.values)})

# Adjointness, one instance: exists(p) <= q on teams exactly when
# p <= reindex(q) on people.
for q in all_predicates(H, teams):
    lhs = team_awake.leq(q)
    rhs = awake.leq(reindex(team_of, q))
    assert lhs == rhs
print("existential adjunction holds for all", 3 ** len(teams),
      "team predicates")

# The power object names every predicate on a base; its evaluation
# predicate is generic: each predicate is recovered by reindexing along
# the map that picks out its name.
pw = power_object(H, teams)
print("predicate names on teams:", list(pw.carrier.elements))
name = pw.name_of(team_awake)
print("name of the existential image:", name)
back = pw.predicate_of(name)
assert back == team_awake

# The full law suite bundles both adjunctions, functoriality, stability
# under products, and the generic-predicate property.
report = validate_tripos(H, max_set=2)
print("\nlaw suites over sets of size <= 2:")
for c in report.checks:
    print(f"  {c.status:<5} {c.check}")
