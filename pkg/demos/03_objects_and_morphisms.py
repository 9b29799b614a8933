"""Objects with algebra-valued equality and the morphisms between them.

An object is a carrier with a partial equivalence relation: equality may
hold to an intermediate degree, and a point may fail to equal itself.
Morphisms are relations that are functional with respect to that
equality. Limits, images, and a truth-value classifier all exist.
"""
import numpy as np

from tritopos.formats import load_algebra
from tritopos.per_topos import (FunRel, PerObject, Relation, binary_product,
                                classify_mono, enumerate_funrels,
                                image_factorize, is_cover, is_iso, is_mono,
                                nabla, subobject_classifier)
from tritopos.tripos import FinSetObj

H = load_algebra("chain3")
code = {name: H.index(name) for name in H.elements}

def per(carrier_names, rows):
    carrier = FinSetObj(tuple(carrier_names))
    matrix = np.array([[code[v] for v in row] for row in rows],
                      dtype=np.uint8)
    return PerObject(carrier, Relation(H, carrier, carrier, matrix))

# Two points, each fully itself, equal to each other at the hedge value.
linked = per(("x0", "x1"), [["1", "h"], ["h", "1"]])
print("linked pair equality:")
print(linked.e.matrix)

# The constant object on two points: discrete equality.
flat = nabla(H, FinSetObj(("a", "b")))

# Every morphism between two objects, by exhaustive search.
to_flat = enumerate_funrels(linked, flat)
print(f"\nmorphisms linked -> constant pair: {len(to_flat)}")
endo = enumerate_funrels(linked, linked)
print(f"endomorphisms of the linked pair: {len(endo)}")
for f in endo:
    names = [[H.name(int(v)) for v in row] for row in f.matrix]
    tags = [t for t, hit in (("mono", is_mono(f)), ("cover", is_cover(f)),
                             ("iso", is_iso(f))) if hit]
    print("  ", names, " ".join(tags))

# Products exist; the projections of the square of the linked pair.
prod = binary_product(linked, linked)
print("\nsquare carrier size:", len(prod.obj.carrier))

# Image factorization: every morphism is a cover followed by a mono.
some = to_flat[0]
fact = image_factorize(some)
assert is_cover(fact.cover) and is_mono(fact.mono)
print("image of the first morphism has carrier",
      list(fact.image.carrier.elements))

# The classifier: truth values with biimplication as equality. Every
# mono has exactly one classifying morphism into it.
cls = subobject_classifier(H)
print("\nclassifier carrier:", list(cls.omega.carrier.elements))
mono = next(f for f in endo if is_mono(f))
chi = classify_mono(mono, cls)
print("classifying matrix of the identity-like mono:")
print([[H.name(int(v)) for v in row] for row in chi.matrix])
