"""The canonical set-indexed tripos over a finite Heyting algebra.

A base object is a finite set of named elements; a predicate on it is a
vector of algebra values. Reindexing is precomposition, the two
quantifiers are fiberwise joins and meets, and the power object carries
one name per predicate together with the generic evaluation predicate.
"""
from __future__ import annotations

import itertools
import random

import numpy as np

from .errors import BaseMismatch, BoundExceeded, CarrierMismatch
from .heyting import HeytingAlgebra
from .report import FAIL, PASS, SKIPPED, Report


class FinSetObj:
    """Finite set with a declared element order. Elements are hashable."""

    def __init__(self, elements):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("set elements must be distinct")
        self._index = {e: i for i, e in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinSetObj) and self.elements == other.elements

    def __hash__(self) -> int:
        return hash(self.elements)

    def __repr__(self) -> str:
        return f"FinSetObj({list(self.elements)!r})"

    def index(self, element) -> int:
        return self._index[element]


class FinMap:
    """Total map between finite sets, stored as a target-index vector."""

    def __init__(self, source: FinSetObj, target: FinSetObj, idx):
        self.source = source
        self.target = target
        self.idx = np.asarray(idx, dtype=np.intp)
        if self.idx.shape != (len(source),):
            raise ValueError("graph must assign exactly one value per element")
        if len(source) and (self.idx.min() < 0 or self.idx.max() >= len(target)):
            raise ValueError("graph points outside the target")
        self.idx.setflags(write=False)

    @classmethod
    def from_dict(cls, source: FinSetObj, target: FinSetObj, graph: dict):
        return cls(source, target,
                   [target.index(graph[e]) for e in source.elements])

    @classmethod
    def from_callable(cls, source: FinSetObj, target: FinSetObj, fn):
        return cls(source, target, [target.index(fn(e)) for e in source])

    @classmethod
    def identity(cls, obj: FinSetObj):
        return cls(obj, obj, np.arange(len(obj)))

    def __call__(self, element):
        return self.target.elements[self.idx[self.source.index(element)]]

    def __eq__(self, other) -> bool:
        return (isinstance(other, FinMap) and self.source == other.source
                and self.target == other.target
                and np.array_equal(self.idx, other.idx))

    def __hash__(self) -> int:
        return hash((self.source, self.target, bytes(self.idx)))

    def __repr__(self) -> str:
        pairs = {e: self(e) for e in self.source}
        return f"FinMap({pairs!r})"

    def compose(self, other: "FinMap") -> "FinMap":
        """self after other."""
        if other.target != self.source:
            raise CarrierMismatch("maps are not composable")
        return FinMap(other.source, self.target, self.idx[other.idx])

    def is_injective(self) -> bool:
        return len(set(self.idx.tolist())) == len(self.source)

    def is_surjective(self) -> bool:
        return set(self.idx.tolist()) == set(range(len(self.target)))


class Predicate:
    """Algebra-valued predicate on a finite base set."""

    def __init__(self, algebra: HeytingAlgebra, base: FinSetObj, values):
        self.algebra = algebra
        self.base = base
        self.values = np.asarray(values, dtype=np.uint8)
        if self.values.shape != (len(base),):
            raise ValueError("one value per base element required")
        self.values.setflags(write=False)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Predicate) and self.base == other.base
                and self.algebra == other.algebra
                and np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.base, bytes(self.values)))

    def __repr__(self) -> str:
        shown = {e: self.algebra.name(v)
                 for e, v in zip(self.base.elements, self.values)}
        return f"Predicate({shown!r})"

    def value(self, element) -> int:
        return int(self.values[self.base.index(element)])

    def leq(self, other: "Predicate") -> bool:
        _same_base(self, other)
        return self.algebra.le_all(self.values, other.values)

    def meet(self, other: "Predicate") -> "Predicate":
        _same_base(self, other)
        return Predicate(self.algebra, self.base,
                         self.algebra.meet[self.values, other.values])

    def join(self, other: "Predicate") -> "Predicate":
        _same_base(self, other)
        return Predicate(self.algebra, self.base,
                         self.algebra.join[self.values, other.values])

    def imp(self, other: "Predicate") -> "Predicate":
        _same_base(self, other)
        return Predicate(self.algebra, self.base,
                         self.algebra.imp[self.values, other.values])


def _same_base(p: Predicate, q: Predicate) -> None:
    if p.base != q.base or p.algebra != q.algebra:
        raise BaseMismatch("predicates live over different bases")


def constant_predicate(algebra: HeytingAlgebra, base: FinSetObj,
                       code: int) -> Predicate:
    return Predicate(algebra, base, np.full(len(base), code, dtype=np.uint8))


def top_predicate(algebra, base):
    return constant_predicate(algebra, base, algebra.top)


def bot_predicate(algebra, base):
    return constant_predicate(algebra, base, algebra.bot)


def product_obj(x: FinSetObj, y: FinSetObj) -> FinSetObj:
    """Cartesian product in row-major declared order; elements are pairs."""
    return FinSetObj(tuple(itertools.product(x.elements, y.elements)))


def product_proj(x: FinSetObj, y: FinSetObj) -> tuple[FinMap, FinMap]:
    xy = product_obj(x, y)
    fst = FinMap(xy, x, np.repeat(np.arange(len(x)), len(y)))
    snd = FinMap(xy, y, np.tile(np.arange(len(y)), len(x)))
    return fst, snd


def product_map(f: FinMap, g: FinMap) -> FinMap:
    """f x g on the row-major product carriers."""
    src = product_obj(f.source, g.source)
    tgt = product_obj(f.target, g.target)
    idx = (f.idx[:, None] * len(g.target) + g.idx[None, :]).reshape(-1)
    return FinMap(src, tgt, idx)


def reindex(f: FinMap, p: Predicate) -> Predicate:
    """Precomposition: the predicate x -> p(f(x))."""
    if p.base != f.target:
        raise BaseMismatch("predicate base must be the map's target")
    return Predicate(p.algebra, f.source, p.values[f.idx])


def exists_along(f: FinMap, p: Predicate) -> Predicate:
    """Left adjoint to reindex: fiberwise join, empty fiber gives bottom."""
    if p.base != f.source:
        raise BaseMismatch("predicate base must be the map's source")
    H = p.algebra
    out = np.full(len(f.target), H.bot, dtype=np.uint8)
    for i, j in enumerate(f.idx):
        out[j] = H.join[out[j], p.values[i]]
    return Predicate(H, f.target, out)


def forall_along(f: FinMap, p: Predicate) -> Predicate:
    """Right adjoint to reindex: fiberwise meet, empty fiber gives top."""
    if p.base != f.source:
        raise BaseMismatch("predicate base must be the map's source")
    H = p.algebra
    out = np.full(len(f.target), H.top, dtype=np.uint8)
    for i, j in enumerate(f.idx):
        out[j] = H.meet[out[j], p.values[i]]
    return Predicate(H, f.target, out)


def all_predicates(algebra: HeytingAlgebra, base: FinSetObj):
    """All predicates on ``base`` in lexicographic value order."""
    for values in itertools.product(range(len(algebra)), repeat=len(base)):
        yield Predicate(algebra, base, np.array(values, dtype=np.uint8))


def predicate_count(algebra: HeytingAlgebra, base: FinSetObj) -> int:
    return len(algebra) ** len(base)


class PowerObject:
    """Names for every predicate on a base, plus the evaluation predicate.

    Carrier elements are tuples of algebra element names in base order, so
    the name of a predicate is readable and canonical.
    """

    def __init__(self, algebra: HeytingAlgebra, base: FinSetObj,
                 bound: int = 10 ** 4):
        count = predicate_count(algebra, base)
        if count > bound:
            raise BoundExceeded(
                f"power object would carry {count} names, above the bound "
                f"{bound}", witness={"size": count, "bound": bound})
        self.algebra = algebra
        self.base = base
        names = []
        table = np.empty((count, max(len(base), 1)), dtype=np.uint8)
        for row, codes in enumerate(
                itertools.product(range(len(algebra)), repeat=len(base))):
            names.append(tuple(algebra.name(c) for c in codes))
            if len(base):
                table[row, :] = codes
        self.carrier = FinSetObj(tuple(names))
        self._table = table[:, :len(base)]
        self._table.setflags(write=False)
        eval_base = product_obj(self.carrier, base)
        self.eval = Predicate(algebra, eval_base, self._table.reshape(-1))

    def name_of(self, p: Predicate):
        """Carrier element naming a predicate on the base."""
        if p.base != self.base:
            raise BaseMismatch("predicate is not on the power object's base")
        return tuple(self.algebra.name(v) for v in p.values)

    def predicate_of(self, name) -> Predicate:
        row = self.carrier.index(name)
        return Predicate(self.algebra, self.base, self._table[row])

    def classify(self, y_obj: FinSetObj, alpha: Predicate) -> FinMap:
        """The unique map a with reindex(a x id, eval) = alpha.

        ``alpha`` must live on the row-major product of ``y_obj`` with the
        power object's base.
        """
        if alpha.base != product_obj(y_obj, self.base):
            raise BaseMismatch(
                "predicate must live on the product of the probe set with "
                "the power object's base")
        rows = alpha.values.reshape(len(y_obj), len(self.base))
        idx = []
        for row in rows:
            name = tuple(self.algebra.name(v) for v in row)
            idx.append(self.carrier.index(name))
        return FinMap(y_obj, self.carrier, np.asarray(idx, dtype=np.intp))


def power_object(algebra: HeytingAlgebra, base: FinSetObj,
                 bound: int = 10 ** 4) -> PowerObject:
    return PowerObject(algebra, base, bound)


# ---------------------------------------------------------------------------
# exhaustive validation of the tripos laws


def canonical_set(size: int, prefix: str = "x") -> FinSetObj:
    return FinSetObj(tuple(f"{prefix}{i}" for i in range(size)))


def all_maps(source: FinSetObj, target: FinSetObj):
    if len(source) == 0:
        yield FinMap(source, target, np.empty(0, dtype=np.intp))
        return
    if len(target) == 0:
        return
    for idx in itertools.product(range(len(target)), repeat=len(source)):
        yield FinMap(source, target, np.asarray(idx, dtype=np.intp))


class _Sampler:
    """Deterministic predicate supplier that samples above a cap."""

    def __init__(self, algebra, cap: int, seed):
        self.algebra = algebra
        self.cap = cap
        self.seed = seed
        self.sampled = False

    def predicates(self, base: FinSetObj):
        count = predicate_count(self.algebra, base)
        if count <= self.cap:
            return list(all_predicates(self.algebra, base))
        if self.seed is None:
            raise BoundExceeded(
                f"{count} predicates on a base of size {len(base)} exceed "
                f"the cap {self.cap}; a seed is required for sampling",
                witness={"count": count, "cap": self.cap})
        self.sampled = True
        rng = random.Random(f"{self.seed}:{len(base)}:{count}")
        n = len(self.algebra)
        picks = []
        for _ in range(self.cap):
            values = [rng.randrange(n) for _ in range(len(base))]
            picks.append(Predicate(self.algebra, base,
                                   np.array(values, dtype=np.uint8)))
        return picks


def check_exists_adjunction(f: FinMap, predicates_src, predicates_tgt,
                            exists_fn=exists_along):
    """First witness violating: exists(p) <= q iff p <= reindex(q)."""
    for p in predicates_src:
        ex = exists_fn(f, p)
        for q in predicates_tgt:
            if ex.leq(q) != p.leq(reindex(f, q)):
                return {"map": repr(f), "p": repr(p), "q": repr(q)}
    return None


def check_forall_adjunction(f: FinMap, predicates_src, predicates_tgt,
                            forall_fn=forall_along):
    """First witness violating: reindex(q) <= p iff q <= forall(p)."""
    for p in predicates_src:
        fa = forall_fn(f, p)
        for q in predicates_tgt:
            if reindex(f, q).leq(p) != q.leq(fa):
                return {"map": repr(f), "p": repr(p), "q": repr(q)}
    return None


def check_product_stability(algebra, f: FinMap, g: FinMap, predicates):
    """Quantification along f x id commutes with reindexing along id x g.

    Checks exists(f x id_C) after reindex(id_A x g) = reindex(id_B x g)
    after exists(f x id_D) on every supplied predicate over A x D.
    """
    id_a = FinMap.identity(f.source)
    id_b = FinMap.identity(f.target)
    id_c = FinMap.identity(g.source)
    f_idc = product_map(f, id_c)
    f_idd = product_map(f, FinMap.identity(g.target))
    ida_g = product_map(id_a, g)
    idb_g = product_map(id_b, g)
    for p in predicates:
        lhs = exists_along(f_idc, reindex(ida_g, p))
        rhs = reindex(idb_g, exists_along(f_idd, p))
        if lhs != rhs:
            return {"f": repr(f), "g": repr(g), "p": repr(p)}
    return None


def validate_tripos(algebra: HeytingAlgebra, max_set: int = 2,
                    predicate_cap: int = 10 ** 4, seed=None) -> Report:
    """Exhaustively check the tripos laws on sets of size <= max_set.

    Covers functoriality of reindexing, its Heyting-homomorphism property,
    both adjunctions with their unit/counit inequalities, monotonicity,
    product stability of the existential, and correctness of the generic
    predicate carried by each power object.
    """
    report = Report(config={
        "algebra": list(algebra.elements), "max_set": max_set,
        "predicate_cap": predicate_cap, "seed": seed})
    sampler = _Sampler(algebra, predicate_cap, seed)
    sets = [canonical_set(k) for k in range(max_set + 1)]
    maps = [f for x in sets for y in sets for f in all_maps(x, y)]
    preds = {x: sampler.predicates(x) for x in sets}

    witness = None
    for f in maps:
        for g in maps:
            if f.target != g.source:
                continue
            gf = g.compose(f)
            for p in preds[g.target]:
                if reindex(gf, p) != reindex(f, reindex(g, p)):
                    witness = {"f": repr(f), "g": repr(g), "p": repr(p)}
                    break
    for x in sets:
        ident = FinMap.identity(x)
        for p in preds[x]:
            if reindex(ident, p) != p:
                witness = witness or {"f": "id", "p": repr(p)}
    report.add("reindex.functorial", FAIL if witness else PASS, witness)

    witness = None
    for f in maps:
        ps = preds[f.target]
        for p in ps:
            for q in ps:
                ok = (reindex(f, p.meet(q)) == reindex(f, p).meet(reindex(f, q))
                      and reindex(f, p.join(q)) == reindex(f, p).join(
                          reindex(f, q))
                      and reindex(f, p.imp(q)) == reindex(f, p).imp(
                          reindex(f, q)))
                if not ok:
                    witness = {"f": repr(f), "p": repr(p), "q": repr(q)}
                    break
        top_t = top_predicate(algebra, f.target)
        bot_t = bot_predicate(algebra, f.target)
        if (reindex(f, top_t) != top_predicate(algebra, f.source)
                or reindex(f, bot_t) != bot_predicate(algebra, f.source)):
            witness = witness or {"f": repr(f), "p": "bounds"}
    report.add("reindex.heyting_hom", FAIL if witness else PASS, witness)

    witness = None
    for f in maps:
        w = check_exists_adjunction(f, preds[f.source], preds[f.target])
        if w is not None:
            witness = w
            break
    report.add("adjunction.exists", FAIL if witness else PASS, witness)

    witness = None
    for f in maps:
        w = check_forall_adjunction(f, preds[f.source], preds[f.target])
        if w is not None:
            witness = w
            break
    report.add("adjunction.forall", FAIL if witness else PASS, witness)

    witness = None
    for f in maps:
        for q in preds[f.target]:
            back = reindex(f, q)
            if not exists_along(f, back).leq(q):
                witness = {"law": "exists.counit", "f": repr(f), "q": repr(q)}
            if not q.leq(forall_along(f, back)):
                witness = {"law": "forall.unit", "f": repr(f), "q": repr(q)}
    report.add("quantifier.unit_counit", FAIL if witness else PASS, witness)

    witness = None
    for f in maps:
        ps = preds[f.source]
        for p in ps:
            for p2 in ps:
                if not p.leq(p2):
                    continue
                if not exists_along(f, p).leq(exists_along(f, p2)):
                    witness = {"law": "exists", "f": repr(f), "p": repr(p)}
                if not forall_along(f, p).leq(forall_along(f, p2)):
                    witness = {"law": "forall", "f": repr(f), "p": repr(p)}
    report.add("quantifier.monotone", FAIL if witness else PASS, witness)

    witness = None
    for f in maps:
        for g in maps:
            base = product_obj(f.source, g.target)
            w = check_product_stability(algebra, f, g,
                                        sampler.predicates(base))
            if w is not None:
                witness = w
                break
        if witness:
            break
    report.add("quantifier.product_stability", FAIL if witness else PASS,
               witness)

    witness = None
    skipped = None
    for x in sets:
        try:
            power = power_object(algebra, x)
        except BoundExceeded as exc:
            skipped = exc.witness
            continue
        for y in sets:
            base = product_obj(y, x)
            for alpha in sampler.predicates(base):
                a = power.classify(y, alpha)
                a_id = product_map(a, FinMap.identity(x))
                if reindex(a_id, power.eval) != alpha:
                    witness = {"x": repr(x), "y": repr(y),
                               "alpha": repr(alpha)}
                    break
    if witness is not None:
        report.add("power.generic_predicate", FAIL, witness)
    elif skipped is not None:
        report.add("power.generic_predicate", SKIPPED, skipped)
    else:
        report.add("power.generic_predicate", PASS)

    report.config["sampled"] = sampler.sampled
    return report
