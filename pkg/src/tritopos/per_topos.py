"""Partial equivalence relations and the topos of functional relations.

Objects are finite carriers with an algebra-valued partial equivalence
matrix; morphisms are functional relations between them. Composition is
relational: compose then collapse the middle coordinate with a join of
meets. Morphism equality is literal matrix equality, which is what makes
exhaustive law checking tractable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (CarrierMismatch, HomBoundExceeded, InvalidResult,
                     NotComposable, NotMono, ShapeMismatch)
from .heyting import HeytingAlgebra
from .tripos import FinMap, FinSetObj, product_obj


class Relation:
    """Algebra-valued matrix between two finite carriers."""

    def __init__(self, algebra: HeytingAlgebra, source: FinSetObj,
                 target: FinSetObj, matrix):
        self.algebra = algebra
        self.source = source
        self.target = target
        self.matrix = np.asarray(matrix, dtype=np.uint8)
        if self.matrix.shape != (len(source), len(target)):
            raise ValueError("matrix shape must match the carriers")
        self.matrix.setflags(write=False)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Relation)
                and self.source == other.source
                and self.target == other.target
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        return hash((self.source, self.target, bytes(self.matrix)))

    def __repr__(self) -> str:
        rows = [[self.algebra.name(v) for v in row] for row in self.matrix]
        return f"Relation({rows!r})"

    def value(self, a, b) -> int:
        return int(self.matrix[self.source.index(a), self.target.index(b)])


# above this many scalar meet-join steps, compose through boolean products
_DENSE_WORK_CAP = 1 << 25


def _concentrated_diagonal(matrix: np.ndarray, bot: int) -> np.ndarray | None:
    """Diagonal of a square matrix that is bottom off the diagonal."""
    if matrix.shape[0] != matrix.shape[1]:
        return None
    off = matrix.copy()
    np.fill_diagonal(off, bot)
    if np.all(off == bot):
        return matrix.diagonal()
    return None


@lru_cache(maxsize=None)
def _join_primes(H) -> tuple[int, ...] | None:
    """Codes of the join-prime elements, or None when some
    join-irreducible fails primality (a non-distributive input)."""
    primes = []
    for j in range(len(H)):
        if j == H.bot:
            continue
        below = [x for x in range(len(H)) if H.le(x, j) and x != j]
        if below and int(H.join_reduce(np.array(below,
                                                dtype=np.uint8))) == j:
            continue
        for x in range(len(H)):
            for y in range(len(H)):
                if (H.le(j, int(H.join[x, y]))
                        and not (H.le(j, x) or H.le(j, y))):
                    return None
        primes.append(j)
    return tuple(primes)


def _compose_by_value(H, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Join of meets through boolean occurrence products.

    One product per join-prime of the algebra; an element is below the
    composite entry exactly when some middle index carries it on both
    sides. float32 products are exact below a 2**24 middle dimension.
    """
    acc = np.full((a.shape[0], b.shape[1]), H.bot, dtype=np.uint8)
    primes = _join_primes(H)
    if primes is not None:
        for j in primes:
            above = H.leq[j]
            hit = (above[a].astype(np.float32)
                   @ above[b].astype(np.float32)) > 0.5
            if hit.any():
                acc[hit] = H.join[acc[hit], j]
        return acc
    b_vals = [int(v) for v in np.unique(b)]
    b_masks = None
    if b.size <= (1 << 22):
        b_masks = {v: (b == v).astype(np.float32) for v in b_vals}
    for u in np.unique(a):
        u = int(u)
        if u == H.bot:
            continue
        mask_a = (a == u).astype(np.float32)
        for v in b_vals:
            w = int(H.meet[u, v])
            if w == H.bot:
                continue
            mask_b = b_masks[v] if b_masks is not None else (
                b == v).astype(np.float32)
            hit = (mask_a @ mask_b) > 0.5
            if hit.any():
                acc[hit] = H.join[acc[hit], w]
    return acc


def rel_compose(e: Relation, f: Relation) -> Relation:
    """Relational composite: (x, z) -> join_y e(x, y) meet f(y, z)."""
    if e.target != f.source or e.algebra is not f.algebra:
        raise CarrierMismatch("middle carriers do not match")
    H = e.algebra
    a, b = e.matrix, f.matrix
    # an equality matrix concentrated on its diagonal contributes one term
    diag = _concentrated_diagonal(a, H.bot)
    if diag is not None:
        return Relation(H, e.source, f.target, H.meet[diag[:, None], b])
    diag = _concentrated_diagonal(b, H.bot)
    if diag is not None:
        return Relation(H, e.source, f.target, H.meet[a, diag[None, :]])
    n, m, p = a.shape[0], a.shape[1], b.shape[1]
    if m > 256 or n * m * p > _DENSE_WORK_CAP:
        return Relation(H, e.source, f.target, _compose_by_value(H, a, b))
    acc = np.full((n, p), H.bot, dtype=np.uint8)
    for y in range(m):
        step = H.meet[a[:, y][:, None], b[y, :][None, :]]
        acc = H.join[acc, step]
    return Relation(H, e.source, f.target, acc)


def rel_inverse(e: Relation) -> Relation:
    return Relation(e.algebra, e.target, e.source, e.matrix.T)


def rel_leq(e: Relation, f: Relation) -> bool:
    if e.source != f.source or e.target != f.target:
        raise CarrierMismatch("relations compare only over equal carriers")
    return e.algebra.le_all(e.matrix, f.matrix)


def _first_violation(H, mask: np.ndarray, rows: FinSetObj, cols: FinSetObj):
    if mask.all():
        return None
    bad = np.argwhere(~mask)
    i, j = bad[0]
    return [rows.elements[int(i)], cols.elements[int(j)]]


class PerObject:
    """Carrier plus a symmetric and transitive algebra-valued matrix."""

    def __init__(self, carrier: FinSetObj, e: Relation, validate: bool = True):
        if e.source != carrier or e.target != carrier:
            raise CarrierMismatch("relation must be square over the carrier")
        self.carrier = carrier
        self.e = e
        if validate:
            failure = validate_per(self)
            if failure is not None:
                raise InvalidResult(failure["reason"], witness=failure)

    @property
    def algebra(self) -> HeytingAlgebra:
        return self.e.algebra

    @property
    def diag(self) -> np.ndarray:
        return self.e.matrix.diagonal()

    def __eq__(self, other) -> bool:
        return (isinstance(other, PerObject) and self.carrier == other.carrier
                and np.array_equal(self.e.matrix, other.e.matrix))

    def __hash__(self) -> int:
        return hash((self.carrier, bytes(self.e.matrix)))

    def __repr__(self) -> str:
        return f"PerObject({list(self.carrier.elements)!r}, {self.e!r})"


def validate_per(per: PerObject) -> dict | None:
    """None when the matrix is a partial equivalence, else a witness."""
    H = per.algebra
    e = per.e.matrix
    sym = H.leq[e.T, e]
    at = _first_violation(H, sym, per.carrier, per.carrier)
    if at is not None:
        return {"law": "symmetric", "at": at,
                "reason": f"symmetry fails at ({at[0]!r}, {at[1]!r})"}
    ee = rel_compose(per.e, per.e).matrix
    trans = H.leq[ee, e]
    at = _first_violation(H, trans, per.carrier, per.carrier)
    if at is not None:
        return {"law": "transitive", "at": at,
                "reason": f"transitivity fails at ({at[0]!r}, {at[1]!r})"}
    return None


class FunRel:
    """Functional relation between two partial equivalence objects."""

    def __init__(self, dom: PerObject, cod: PerObject, matrix,
                 validate: bool = True):
        self.dom = dom
        self.cod = cod
        self.matrix = np.asarray(matrix, dtype=np.uint8)
        if self.matrix.shape != (len(dom.carrier), len(cod.carrier)):
            raise ValueError("matrix shape must match the carriers")
        self.matrix.setflags(write=False)
        if validate:
            failure = validate_funrel(self)
            if failure is not None:
                raise InvalidResult(failure["reason"], witness=failure)

    @property
    def algebra(self) -> HeytingAlgebra:
        return self.dom.algebra

    @property
    def rel(self) -> Relation:
        return Relation(self.algebra, self.dom.carrier, self.cod.carrier,
                        self.matrix)

    def __eq__(self, other) -> bool:
        return (isinstance(other, FunRel) and self.dom == other.dom
                and self.cod == other.cod
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self) -> int:
        return hash((self.dom, self.cod, bytes(self.matrix)))

    def __repr__(self) -> str:
        rows = [[self.algebra.name(v) for v in row] for row in self.matrix]
        return f"FunRel({rows!r})"


def validate_funrel(f: FunRel) -> dict | None:
    """None when all five conditions hold, else the first failure.

    Conditions: strictness over the domain, absorption of the codomain
    and domain equalities, totality, and single-valuedness. Strictness
    over the codomain is a consequence and is not a separate axiom.
    """
    H = f.algebra
    e = f.dom.e
    e2 = f.cod.e
    m = f.matrix
    strict = H.leq[m, e.matrix.diagonal()[:, None]]
    at = _first_violation(H, strict, f.dom.carrier, f.cod.carrier)
    if at is not None:
        return {"law": "strict", "at": at,
                "reason": "value exceeds the domain diagonal at "
                          f"({at[0]!r}, {at[1]!r})"}
    left = rel_compose(f.rel, e2).matrix
    if not np.array_equal(left, m):
        at = _first_violation(H, left == m, f.dom.carrier, f.cod.carrier)
        return {"law": "left_absorb", "at": at,
                "reason": "codomain equality does not absorb at "
                          f"({at[0]!r}, {at[1]!r})"}
    right = rel_compose(e, f.rel).matrix
    if not np.array_equal(right, m):
        at = _first_violation(H, right == m, f.dom.carrier, f.cod.carrier)
        return {"law": "right_absorb", "at": at,
                "reason": "domain equality does not absorb at "
                          f"({at[0]!r}, {at[1]!r})"}
    diag = _concentrated_diagonal(e.matrix, H.bot)
    if diag is not None:
        # off-diagonal entries are bottom, so only row joins matter
        reach = np.full(m.shape[0], H.bot, dtype=np.uint8)
        for y in range(m.shape[1]):
            reach = H.join[reach, m[:, y]]
        mask = H.leq[diag, reach]
        if not mask.all():
            x = f.dom.carrier.elements[int(np.argmin(mask))]
            return {"law": "total", "at": [x, x],
                    "reason": f"totality fails at ({x!r}, {x!r})"}
    else:
        total = rel_compose(f.rel, rel_inverse(f.rel)).matrix
        mask = H.leq[e.matrix, total]
        at = _first_violation(H, mask, f.dom.carrier, f.dom.carrier)
        if at is not None:
            return {"law": "total", "at": at,
                    "reason": f"totality fails at ({at[0]!r}, {at[1]!r})"}
    single = rel_compose(rel_inverse(f.rel), f.rel).matrix
    mask = H.leq[single, e2.matrix]
    at = _first_violation(H, mask, f.cod.carrier, f.cod.carrier)
    if at is not None:
        return {"law": "single_valued", "at": at,
                "reason": f"single-valuedness fails at ({at[0]!r}, {at[1]!r})"}
    return None


def identity(per: PerObject) -> FunRel:
    """The equality matrix itself is the identity morphism."""
    return FunRel(per, per, per.e.matrix, validate=False)


def compose_morphisms(g: FunRel, f: FunRel) -> FunRel:
    """g after f; the composite is validated (InvalidResult on failure)."""
    if f.cod != g.dom:
        raise NotComposable("codomain of the first factor must match the "
                            "domain of the second")
    matrix = rel_compose(f.rel, g.rel).matrix
    return FunRel(f.dom, g.cod, matrix, validate=True)


def is_mono(f: FunRel) -> bool:
    back = rel_compose(f.rel, rel_inverse(f.rel)).matrix
    return np.array_equal(back, f.dom.e.matrix)


def is_cover(f: FunRel) -> bool:
    forth = rel_compose(rel_inverse(f.rel), f.rel).matrix
    return np.array_equal(forth, f.cod.e.matrix)


def is_iso(f: FunRel) -> bool:
    return is_mono(f) and is_cover(f)


def inverse(f: FunRel) -> FunRel:
    if not is_iso(f):
        raise InvalidResult("only isomorphisms invert")
    return FunRel(f.cod, f.dom, f.matrix.T)


# ---------------------------------------------------------------------------
# the embedding of finite sets


def nabla(algebra: HeytingAlgebra, x: FinSetObj) -> PerObject:
    """Constant-objects embedding: equality is top on the diagonal."""
    n = len(x)
    e = np.full((n, n), algebra.bot, dtype=np.uint8)
    np.fill_diagonal(e, algebra.top)
    return PerObject(x, Relation(algebra, x, x, e), validate=False)


def nabla_map(algebra: HeytingAlgebra, f: FinMap) -> FunRel:
    """Graph of a finite map as a functional relation."""
    src = nabla(algebra, f.source)
    tgt = nabla(algebra, f.target)
    m = np.full((len(f.source), len(f.target)), algebra.bot, dtype=np.uint8)
    for i, j in enumerate(f.idx):
        m[i, j] = algebra.top
    return FunRel(src, tgt, m, validate=False)


def terminal_object(algebra: HeytingAlgebra) -> PerObject:
    return nabla(algebra, FinSetObj(("*",)))


def to_terminal(per: PerObject, term: PerObject | None = None) -> FunRel:
    """The unique morphism into the terminal object."""
    term = term if term is not None else terminal_object(per.algebra)
    return FunRel(per, term, per.diag[:, None], validate=False)


# ---------------------------------------------------------------------------
# finite limits


@dataclass
class ProductResult:
    obj: PerObject
    p0: FunRel
    p1: FunRel


def binary_product(a: PerObject, b: PerObject) -> ProductResult:
    """Product object on the pair carrier with componentwise equality."""
    H = a.algebra
    n, m = len(a.carrier), len(b.carrier)
    carrier = product_obj(a.carrier, b.carrier)
    ea, eb = a.e.matrix, b.e.matrix
    e = H.meet[ea[:, None, :, None], eb[None, :, None, :]].reshape(n * m, n * m)
    obj = PerObject(carrier, Relation(H, carrier, carrier, e), validate=False)
    p0m = H.meet[ea[:, None, :], eb.diagonal()[None, :, None]].reshape(n * m, n)
    p1m = H.meet[ea.diagonal()[:, None, None], eb[None, :, :]].reshape(n * m, m)
    return ProductResult(obj, FunRel(obj, a, p0m, validate=False),
                         FunRel(obj, b, p1m, validate=False))


def pairing(u: FunRel, v: FunRel) -> FunRel:
    """Mediating morphism into the product of the two codomains."""
    if u.dom != v.dom:
        raise ShapeMismatch("pairing needs a common domain")
    H = u.algebra
    prod = binary_product(u.cod, v.cod)
    k = len(u.dom.carrier)
    matrix = H.meet[u.matrix[:, :, None], v.matrix[:, None, :]].reshape(
        k, len(prod.obj.carrier))
    w = FunRel(u.dom, prod.obj, matrix)
    if (compose_morphisms(prod.p0, w) != u
            or compose_morphisms(prod.p1, w) != v):
        raise InvalidResult("pairing does not mediate its own projections")
    return w


@dataclass
class EqualizerResult:
    obj: PerObject
    incl: FunRel


def equalizer(f: FunRel, g: FunRel) -> EqualizerResult:
    """Equalizer: cut equality down by agreement of the two morphisms."""
    if f.dom != g.dom or f.cod != g.cod:
        raise ShapeMismatch("equalizer needs a parallel pair")
    H = f.algebra
    agree = H.meet[f.matrix, g.matrix]
    q = np.full(len(f.dom.carrier), H.bot, dtype=np.uint8)
    for y in range(len(f.cod.carrier)):
        q = H.join[q, agree[:, y]]
    e = H.meet[H.meet[f.dom.e.matrix, q[:, None]], q[None, :]]
    carrier = f.dom.carrier
    obj = PerObject(carrier, Relation(H, carrier, carrier, e), validate=False)
    return EqualizerResult(obj, FunRel(obj, f.dom, e, validate=False))


def equalizer_mediate(eq: EqualizerResult, u: FunRel) -> FunRel:
    """Factor u through the equalizer inclusion; u must equalize."""
    if u.cod != eq.incl.cod:
        raise ShapeMismatch("the morphism must land in the equalized object")
    w = FunRel(u.dom, eq.obj, u.matrix)
    if compose_morphisms(eq.incl, w) != u:
        raise InvalidResult("mediator does not reproduce the morphism")
    return w


@dataclass
class PullbackResult:
    obj: PerObject
    p0: FunRel
    p1: FunRel
    _prod: ProductResult
    _eq: EqualizerResult


def pullback(f: FunRel, g: FunRel) -> PullbackResult:
    """Pullback of a cospan as an equalizer inside the product."""
    if f.cod != g.cod:
        raise ShapeMismatch("pullback needs a common codomain")
    prod = binary_product(f.dom, g.dom)
    eq = equalizer(compose_morphisms(f, prod.p0),
                   compose_morphisms(g, prod.p1))
    p0 = compose_morphisms(prod.p0, eq.incl)
    p1 = compose_morphisms(prod.p1, eq.incl)
    return PullbackResult(eq.obj, p0, p1, prod, eq)


def pullback_mediate(pb: PullbackResult, u: FunRel, v: FunRel) -> FunRel:
    """Mediator into a pullback from a commuting cone (u, v)."""
    w = pairing(u, v)
    med = equalizer_mediate(pb._eq, w)
    if (compose_morphisms(pb.p0, med) != u
            or compose_morphisms(pb.p1, med) != v):
        raise InvalidResult("pullback mediator does not commute")
    return med


# ---------------------------------------------------------------------------
# image factorization and the subobject classifier


@dataclass
class ImageFactorization:
    image: PerObject
    cover: FunRel
    mono: FunRel


def image_factorize(f: FunRel) -> ImageFactorization:
    """Cover followed by mono through the image equality f o f^-1."""
    H = f.algebra
    e_i = rel_compose(rel_inverse(f.rel), f.rel).matrix
    carrier = f.cod.carrier
    image = PerObject(carrier, Relation(H, carrier, carrier, e_i),
                      validate=False)
    cover = FunRel(f.dom, image, f.matrix)
    mono = FunRel(image, f.cod, e_i)
    if not is_cover(cover) or not is_mono(mono):
        raise InvalidResult("image factorization legs are not cover and mono")
    if compose_morphisms(mono, cover) != f:
        raise InvalidResult("image factorization does not recompose")
    return ImageFactorization(image, cover, mono)


@dataclass
class ClassifierResult:
    omega: PerObject
    truth: FunRel


def subobject_classifier(algebra: HeytingAlgebra) -> ClassifierResult:
    """Truth values with biimplication as equality; truth picks top."""
    carrier = FinSetObj(algebra.elements)
    omega = PerObject(carrier, Relation(algebra, carrier, carrier,
                                        algebra.iff), validate=False)
    term = terminal_object(algebra)
    t = np.arange(len(algebra), dtype=np.uint8)[None, :]
    return ClassifierResult(omega, FunRel(term, omega, t, validate=False))


def image_predicate(f: FunRel) -> np.ndarray:
    """Columnwise join: how strongly each codomain point is hit."""
    H = f.algebra
    p = np.full(len(f.cod.carrier), H.bot, dtype=np.uint8)
    for x in range(len(f.dom.carrier)):
        p = H.join[p, f.matrix[x, :]]
    return p


def classify_mono(m: FunRel,
                  classifier: ClassifierResult | None = None) -> FunRel:
    """The unique morphism into the classifier whose pullback of truth
    is the given mono."""
    if not is_mono(m):
        raise NotMono("classify_mono needs a monomorphism")
    H = m.algebra
    cls = classifier if classifier is not None else subobject_classifier(H)
    p = image_predicate(m)
    diag = m.cod.diag
    codes = np.arange(len(H), dtype=np.uint8)
    chi = H.meet[diag[:, None], H.iff[p[:, None], codes[None, :]]]
    result = FunRel(m.cod, cls.omega, chi)
    pulled = pullback(result, cls.truth)
    if not subobjects_equivalent(pulled.p0, m):
        raise InvalidResult("classifying morphism does not pull truth back "
                            "to the mono")
    return result


def factor_mono_through(m: FunRel, n: FunRel) -> FunRel | None:
    """The unique k with n o k = m when m factors through the mono n.

    For monos the candidate is forced to be the relational composite of m
    with the inverse of n, so existence reduces to checking it.
    """
    if m.cod != n.cod:
        raise ShapeMismatch("monos into different objects do not compare")
    k = rel_compose(m.rel, rel_inverse(n.rel)).matrix
    candidate = FunRel(m.dom, n.dom, k, validate=False)
    if validate_funrel(candidate) is not None:
        return None
    if compose_morphisms(n, candidate) != m:
        return None
    return candidate


def subobjects_equivalent(m: FunRel, n: FunRel) -> bool:
    """Mutual factorization of monos over a common target."""
    return (factor_mono_through(m, n) is not None
            and factor_mono_through(n, m) is not None)


# ---------------------------------------------------------------------------
# exhaustive enumeration at desk scale


def enumerate_pers(algebra: HeytingAlgebra, carrier: FinSetObj,
                   bound: int = 10 ** 6) -> list[PerObject]:
    """All partial equivalences on a carrier, in lexicographic order of
    the upper triangle."""
    n = len(carrier)
    slots = [(i, j) for i in range(n) for j in range(i, n)]
    total = len(algebra) ** len(slots)
    if total > bound:
        raise HomBoundExceeded(
            f"{total} candidate matrices exceed the bound {bound}",
            witness={"count": total, "bound": bound})
    out = []
    for values in itertools.product(range(len(algebra)), repeat=len(slots)):
        e = np.zeros((n, n), dtype=np.uint8)
        for (i, j), v in zip(slots, values):
            e[i, j] = v
            e[j, i] = v
        per = PerObject(carrier, Relation(algebra, carrier, carrier, e),
                        validate=False)
        if validate_per(per) is None:
            out.append(per)
    return out


def _row_candidates_scan(H, diag_code: int, cod: PerObject) -> list:
    """All admissible rows toward ``cod`` for one domain point, by scan."""
    m = len(cod.carrier)
    e2 = cod.e.matrix
    if m == 0:
        return [np.empty(0, dtype=np.uint8)] if diag_code == H.bot else []
    vecs = np.array(list(itertools.product(range(len(H)), repeat=m)),
                    dtype=np.uint8)
    keep = np.all(H.leq[vecs, diag_code], axis=1)
    # single-valuedness inside the row
    pair_ok = np.ones(len(vecs), dtype=bool)
    for y in range(m):
        for z in range(m):
            pair_ok &= H.leq[H.meet[vecs[:, y], vecs[:, z]], e2[y, z]]
    keep &= pair_ok
    # row join must give back the diagonal strength
    join = np.full(len(vecs), H.bot, dtype=np.uint8)
    for y in range(m):
        join = H.join[join, vecs[:, y]]
    keep &= join == diag_code
    # absorption of the codomain equality inside the row
    closed = np.ones(len(vecs), dtype=bool)
    for y in range(m):
        acc = np.full(len(vecs), H.bot, dtype=np.uint8)
        for z in range(m):
            acc = H.join[acc, H.meet[vecs[:, z], e2[z, y]]]
        closed &= acc == vecs[:, y]
    keep &= closed
    return [vecs[i] for i in np.flatnonzero(keep)]


def _row_candidates_dfs(H, diag_code: int, cod: PerObject,
                        node_bound: int) -> list:
    """Row enumeration by backtracking, for codomains too wide to scan.

    Sound pruning: values stay below the domain diagonal and the codomain
    diagonal, pairwise meets stay below the codomain equality, and the
    remaining slots must still be able to lift the running join to the
    diagonal strength. Meets against bottom entries always pass, so only
    the nonbottom support of the partial row is consulted. Full row
    conditions are re-checked at the leaves.
    """
    m = len(cod.carrier)
    e2 = cod.e.matrix
    cod_diag = e2.diagonal()
    if m == 0:
        return [np.empty(0, dtype=np.uint8)] if diag_code == H.bot else []
    potential = np.full(m + 1, H.bot, dtype=np.uint8)
    for y in range(m - 1, -1, -1):
        potential[y] = H.join[potential[y + 1],
                              H.meet[cod_diag[y], diag_code]]
    col_values = [[c for c in range(len(H))
                   if H.le(c, diag_code) and H.le(c, int(cod_diag[y]))]
                  for y in range(m)]
    rows: list = []
    row = np.full(m, H.bot, dtype=np.uint8)
    support: list[int] = []
    visited = 0

    def admissible(y: int, join_so_far: int) -> list:
        if not H.le(diag_code, int(H.join[join_so_far, potential[y]])):
            return []
        keep = []
        for c in col_values[y]:
            for z in support:
                meet = int(H.meet[c, row[z]])
                if not (H.le(meet, int(e2[z, y]))
                        and H.le(meet, int(e2[y, z]))):
                    break
            else:
                keep.append(c)
        return keep

    # frame per column: [column, candidate iterator, join below, assigned]
    frames = [[0, iter(admissible(0, H.bot)), H.bot, False]]
    while frames:
        frame = frames[-1]
        y, join_before = frame[0], frame[2]
        if frame[3]:
            if row[y] != H.bot:
                support.pop()
            row[y] = H.bot
            frame[3] = False
        c = next(frame[1], None)
        if c is None:
            frames.pop()
            continue
        visited += 1
        if visited > node_bound:
            raise HomBoundExceeded(
                f"row search exceeded {node_bound} nodes",
                witness={"bound": node_bound})
        row[y] = c
        if c != H.bot:
            support.append(y)
        frame[3] = True
        join_now = int(H.join[join_before, c])
        if y + 1 == m:
            if join_now == diag_code:
                rows.append(row.copy())
        else:
            frames.append([y + 1, iter(admissible(y + 1, join_now)),
                           join_now, False])
    # closure under the codomain equality is cheaper to re-check than to
    # thread through the search; bottom entries contribute nothing
    out = []
    for cand in rows:
        acc = np.full(m, H.bot, dtype=np.uint8)
        for z in np.flatnonzero(cand != H.bot):
            acc = H.join[acc, H.meet[cand[z], e2[z, :]]]
        if np.array_equal(acc, cand):
            out.append(cand)
    return out


ROW_SCAN_CAP = 250_000


def enumerate_funrels(dom: PerObject, cod: PerObject,
                      hom_bound: int = 500_000,
                      node_bound: int = 2_000_000) -> list[FunRel]:
    """All valid functional relations from dom to cod, in row-major
    lexicographic order of the matrices. Raises HomBoundExceeded when the
    search space is too large for the given bounds."""
    H = dom.algebra
    n = len(dom.carrier)
    m = len(cod.carrier)
    by_diag: dict[int, list] = {}
    for code in sorted(set(int(c) for c in dom.diag)):
        if len(H) ** m <= ROW_SCAN_CAP:
            by_diag[code] = _row_candidates_scan(H, code, cod)
        else:
            by_diag[code] = _row_candidates_dfs(H, code, cod, node_bound)
    row_lists = [by_diag[int(c)] for c in dom.diag]
    total = 1
    for rows in row_lists:
        total *= max(len(rows), 1)
        if total > hom_bound:
            raise HomBoundExceeded(
                f"more than {hom_bound} candidate matrices",
                witness={"bound": hom_bound})
    out = []
    if n == 0:
        f = FunRel(dom, cod, np.empty((0, m), dtype=np.uint8), validate=False)
        return [f] if validate_funrel(f) is None else []
    for combo in itertools.product(*row_lists):
        f = FunRel(dom, cod, np.stack(combo), validate=False)
        if validate_funrel(f) is None:
            out.append(f)
    return out


def sections(per: PerObject, **bounds) -> list[FunRel]:
    """Global points: morphisms from the terminal object."""
    return enumerate_funrels(terminal_object(per.algebra), per, **bounds)


def is_diagonal(per: PerObject) -> bool:
    """True when equality is concentrated on the diagonal."""
    H = per.algebra
    off = per.e.matrix.copy()
    np.fill_diagonal(off, H.bot)
    return bool(np.all(off == H.bot))
