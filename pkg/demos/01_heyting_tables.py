"""Build truth-value algebras from order data and inspect their tables.

Every operation table is derived from the declared partial order alone;
candidates without a genuine implication are rejected with a concrete
counterexample.
"""
import numpy as np

from tritopos.errors import NoResiduation
from tritopos.formats import load_algebra
from tritopos.heyting import build_heyting, validate_heyting

# The three-element chain 0 < h < 1. "h" is a middle truth value: neither
# false nor fully true.
H = load_algebra("chain3")
print("elements:", H.elements)

def show(title, table):
    print(title)
    header = "      " + "  ".join(f"{e:>2}" for e in H.elements)
    print(header)
    for i, row in enumerate(table):
        cells = "  ".join(f"{H.name(int(v)):>2}" for v in row)
        print(f"  {H.elements[i]:>2}  {cells}")

show("meet (conjunction):", H.meet)
show("implication:", H.imp)

# Implication is forced by residuation: c and a lies below b exactly when
# c lies below (a implies b). The validator checks that together with
# every lattice law, exhaustively.
report = validate_heyting(H)
print(f"\n{len(report.checks)} laws checked, all pass: {report.ok}")

# A four-element diamond: two incomparable middle values p and q.
D = load_algebra("diamond4")
p, q = D.index("p"), D.index("q")
print("\ndiamond4: p meet q =", D.name(int(D.meet[p, q])),
      " p join q =", D.name(int(D.join[p, q])),
      " p imp q =", D.name(int(D.imp[p, q])))

# The five-element lattice with three incomparable middles has no
# implication at all; construction fails and names a counterexample.
try:
    build_heyting(["0", "a", "b", "c", "1"],
                  [("0", "a"), ("0", "b"), ("0", "c"),
                   ("a", "1"), ("b", "1"), ("c", "1")])
except NoResiduation as err:
    print("\nrejected candidate:", err)
    print("counterexample:", err.witness)
