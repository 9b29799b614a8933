"""Finite Heyting algebras given by explicit order and operation tables.

Elements are named; all operations work on integer codes (positions in the
declared element order) so the rest of the package can push matrices of
codes through numpy lookups.
"""
from __future__ import annotations

import numpy as np

from .errors import NoResiduation, NotALattice, NotAPoset, UnknownElement
from .report import FAIL, PASS, Report


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class HeytingAlgebra:
    """Finite Heyting algebra with precomputed meet/join/implication tables.

    ``leq`` is a boolean matrix; ``meet``, ``join`` and ``imp`` hold element
    codes. Instances are immutable after construction. ``build_heyting`` is
    the validated constructor; this class accepts raw tables so validators
    can be pointed at deliberately corrupted data.
    """

    def __init__(self, elements, leq, meet, join, imp, bot: int, top: int):
        self.elements = tuple(elements)
        self.leq = _frozen(np.array(leq, dtype=bool))
        self.meet = _frozen(np.array(meet, dtype=np.uint8))
        self.join = _frozen(np.array(join, dtype=np.uint8))
        self.imp = _frozen(np.array(imp, dtype=np.uint8))
        self.bot = int(bot)
        self.top = int(top)
        self._index = {name: i for i, name in enumerate(self.elements)}
        # biimplication table, used by the subobject classifier and covers
        self.iff = _frozen(self.meet[self.imp, self.imp.T])

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other) -> bool:
        return (isinstance(other, HeytingAlgebra)
                and self.elements == other.elements
                and np.array_equal(self.leq, other.leq)
                and np.array_equal(self.meet, other.meet)
                and np.array_equal(self.join, other.join)
                and np.array_equal(self.imp, other.imp)
                and self.bot == other.bot and self.top == other.top)

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"HeytingAlgebra({list(self.elements)!r})"

    def index(self, name) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownElement(f"unknown algebra element {name!r}",
                                 witness=name) from None

    def name(self, code: int):
        return self.elements[int(code)]

    @property
    def bot_name(self):
        return self.elements[self.bot]

    @property
    def top_name(self):
        return self.elements[self.top]

    def le(self, a: int, b: int) -> bool:
        return bool(self.leq[a, b])

    def le_all(self, a: np.ndarray, b: np.ndarray) -> bool:
        """Pointwise order on equally shaped code arrays."""
        return bool(np.all(self.leq[a, b]))

    def meet_reduce(self, codes) -> int:
        """Meet of an iterable of codes; empty meet is top."""
        acc = self.top
        for c in codes:
            acc = int(self.meet[acc, c])
        return acc

    def join_reduce(self, codes) -> int:
        """Join of an iterable of codes; empty join is bottom."""
        acc = self.bot
        for c in codes:
            acc = int(self.join[acc, c])
        return acc


def _transitive_closure(leq: np.ndarray) -> np.ndarray:
    closed = leq.copy()
    while True:
        step = closed | (closed @ closed)
        if np.array_equal(step, closed):
            return closed
        closed = step


def _glb(leq: np.ndarray, a: int, b: int) -> int | None:
    lower = np.flatnonzero(leq[:, a] & leq[:, b])
    for g in lower:
        if np.all(leq[lower, g]):
            return int(g)
    return None


def _lub(leq: np.ndarray, a: int, b: int) -> int | None:
    upper = np.flatnonzero(leq[a, :] & leq[b, :])
    for g in upper:
        if np.all(leq[g, upper]):
            return int(g)
    return None


def build_heyting(elements, order_pairs) -> HeytingAlgebra:
    """Build and fully check a finite Heyting algebra.

    ``order_pairs`` lists generating (below, above) pairs of element names;
    the reflexive-transitive closure is applied. Raises ``NotAPoset`` when
    the closure breaks antisymmetry, ``NotALattice`` when some pair lacks a
    meet or join, and ``NoResiduation`` when the computed implication fails
    the residuation law (as it does on non-distributive lattices).
    """
    names = tuple(elements)
    if len(set(names)) != len(names):
        raise ValueError("element names must be distinct")
    n = len(names)
    if n == 0:
        raise NotALattice("empty carrier has no top or bottom")
    index = {name: i for i, name in enumerate(names)}

    leq = np.eye(n, dtype=bool)
    for a, b in order_pairs:
        ia = index.get(a)
        ib = index.get(b)
        if ia is None or ib is None:
            raise UnknownElement(
                f"order pair ({a!r}, {b!r}) mentions an unknown element",
                witness=[a, b])
        leq[ia, ib] = True
    leq = _transitive_closure(leq)

    for i in range(n):
        for j in range(n):
            if i != j and leq[i, j] and leq[j, i]:
                raise NotAPoset(
                    f"antisymmetry fails: {names[i]!r} and {names[j]!r} "
                    "are below each other", witness=[names[i], names[j]])

    meet = np.zeros((n, n), dtype=np.uint8)
    join = np.zeros((n, n), dtype=np.uint8)
    for a in range(n):
        for b in range(n):
            g = _glb(leq, a, b)
            if g is None:
                raise NotALattice(
                    f"no meet for ({names[a]!r}, {names[b]!r})",
                    witness=[names[a], names[b]])
            meet[a, b] = g
            u = _lub(leq, a, b)
            if u is None:
                raise NotALattice(
                    f"no join for ({names[a]!r}, {names[b]!r})",
                    witness=[names[a], names[b]])
            join[a, b] = u

    bot = 0
    top = 0
    for c in range(n):
        bot = int(meet[bot, c])
        top = int(join[top, c])

    imp = np.zeros((n, n), dtype=np.uint8)
    for a in range(n):
        for b in range(n):
            acc = bot
            for c in np.flatnonzero(leq[meet[:, a], b]):
                acc = int(join[acc, c])
            imp[a, b] = acc

    # residuation: c & a <= b  iff  c <= a -> b; fails exactly when the
    # underlying lattice is not distributive
    for a in range(n):
        for b in range(n):
            lhs = leq[meet[:, a], b]
            rhs = leq[:, imp[a, b]]
            if not np.array_equal(lhs, rhs):
                c = int(np.flatnonzero(lhs != rhs)[0])
                raise NoResiduation(
                    "residuation fails, the order is not a Heyting algebra: "
                    f"a={names[a]!r} b={names[b]!r} c={names[c]!r}",
                    witness={"a": names[a], "b": names[b], "c": names[c]})

    return HeytingAlgebra(names, leq, meet, join, imp, bot, top)


def implication(algebra: HeytingAlgebra, a, b):
    """Heyting implication on element names."""
    return algebra.name(algebra.imp[algebra.index(a), algebra.index(b)])


def _first_witness(mask: np.ndarray, algebra: HeytingAlgebra, labels):
    """First failing coordinate of a boolean condition array, as names."""
    flat = np.flatnonzero(~mask)
    if flat.size == 0:
        return None
    coords = np.unravel_index(int(flat[0]), mask.shape)
    return {lab: algebra.elements[int(c)] for lab, c in zip(labels, coords)}


def validate_heyting(algebra: HeytingAlgebra) -> Report:
    """Check every lattice and Heyting law on the tables of ``algebra``.

    Returns a report with one entry per law; the witness of a failing law
    is the first counterexample in declared element order.
    """
    H = algebra
    n = len(H)
    ar = np.arange(n)
    report = Report(config={"elements": list(H.elements)})

    def law(check: str, mask: np.ndarray, labels):
        witness = _first_witness(np.asarray(mask), H, labels)
        report.add(check, PASS if witness is None else FAIL, witness)

    law("poset.reflexive", H.leq[ar, ar], "a")
    law("poset.antisymmetric",
        ~(H.leq & H.leq.T & ~np.eye(n, dtype=bool)), "ab")
    law("poset.transitive", ~((H.leq @ H.leq) & ~H.leq), "ab")

    # meet[a,b] is a lower bound and dominates every lower bound
    is_lb = H.leq[H.meet, ar[:, None]] & H.leq[H.meet, ar[None, :]]
    law("lattice.meet.lower_bound", is_lb, "ab")
    dominated = np.ones((n, n), dtype=bool)
    for c in range(n):
        below_both = H.leq[c, :, None] & H.leq[c, None, :]
        dominated &= ~below_both | H.leq[c, H.meet]
    law("lattice.meet.greatest", dominated, "ab")
    is_ub = H.leq[ar[:, None], H.join] & H.leq[ar[None, :], H.join]
    law("lattice.join.upper_bound", is_ub, "ab")
    dominates = np.ones((n, n), dtype=bool)
    for c in range(n):
        above_both = H.leq[:, c, None] & H.leq[None, :, c]
        dominates &= ~above_both | H.leq[H.join, c]
    law("lattice.join.least", dominates, "ab")

    law("lattice.meet.commutative", H.meet == H.meet.T, "ab")
    law("lattice.join.commutative", H.join == H.join.T, "ab")
    law("lattice.meet.idempotent", H.meet[ar, ar] == ar, "a")
    law("lattice.join.idempotent", H.join[ar, ar] == ar, "a")
    assoc_m = H.meet[H.meet[:, :, None], ar[None, None, :]] \
        == H.meet[ar[:, None, None], H.meet[None, :, :]]
    law("lattice.meet.associative", assoc_m, "abc")
    assoc_j = H.join[H.join[:, :, None], ar[None, None, :]] \
        == H.join[ar[:, None, None], H.join[None, :, :]]
    law("lattice.join.associative", assoc_j, "abc")
    law("lattice.absorption.meet_join",
        H.meet[ar[:, None], H.join] == ar[:, None], "ab")
    law("lattice.absorption.join_meet",
        H.join[ar[:, None], H.meet] == ar[:, None], "ab")

    law("bounds.bot", H.leq[H.bot, :], "a")
    law("bounds.top", H.leq[:, H.top], "a")

    resid = np.empty((n, n, n), dtype=bool)
    for a in range(n):
        for b in range(n):
            resid[a, b, :] = H.leq[H.meet[:, a], b] == H.leq[:, H.imp[a, b]]
    law("heyting.residuation", resid.transpose(2, 0, 1), "cab")

    distrib = H.meet[ar[:, None, None], H.join[None, :, :]] \
        == H.join[H.meet[:, :, None], H.meet[:, None, :]]
    law("heyting.distributive", distrib, "abc")

    return report
