"""Pseudoequivalence spans over pluggable computable categories.

The completion itself is never materialized: objects are represented one
at a time by a span with reflexivity, symmetry, and transitivity
witnesses, quotiented inside an exact instance, and transported along
finitely continuous functors. Three instances ship: finite sets, the
functional-relations topos, and indexed families over a lattice.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

import numpy as np

from .errors import (HomBoundExceeded, InfiniteHom, InvalidResult,
                     NotExactInstance, NotFinitelyContinuous,
                     ValidationError)
from .heyting import HeytingAlgebra
from . import per_topos as pt
from .report import FAIL, PASS, Report
from .resolvent import (Resolution, canonical_factorization,
                        identity_resolution, sigma_resolution)
from .tripos import FinMap, FinSetObj, all_maps, product_obj, product_proj


@dataclass
class LimitCone:
    obj: object
    legs: tuple
    raw: object = field(default=None, repr=False)


@dataclass
class Span:
    apex: object
    left: object
    right: object


@dataclass
class ComputableCategory:
    """A category presented by callables, total on desk-scale data."""
    name: str
    exact: bool
    dom: callable
    cod: callable
    identity: callable
    compose: callable
    homs: callable
    is_mono: callable
    is_regular_epi: callable
    is_iso: callable
    inverse: callable
    terminal: callable
    product: callable
    mediate_product: callable
    equalizer: callable
    mediate_equalizer: callable
    pullback: callable
    mediate_pullback: callable
    image: callable
    lift_pair: callable
    congruence_span: callable = None
    span_relation: callable = None
    quotient_of_congruence: callable = None
    induce_on_quotient: callable = None
    describe: callable = None


# ---------------------------------------------------------------------------
# the finite-sets instance


def _finset_homs(a: FinSetObj, b: FinSetObj, bound: int) -> list[FinMap]:
    if len(a) and len(b) == 0:
        return []
    count = max(len(b), 1) ** len(a)
    if count > bound:
        raise InfiniteHom(f"{count} maps exceed the hom bound {bound}",
                          witness={"count": count, "bound": bound})
    return list(all_maps(a, b))


def _finset_product(a: FinSetObj, b: FinSetObj) -> LimitCone:
    p0, p1 = product_proj(a, b)
    return LimitCone(product_obj(a, b), (p0, p1))


def _finset_mediate_product(cone: LimitCone, u: FinMap, v: FinMap) -> FinMap:
    width = len(cone.legs[1].target)
    return FinMap(u.source, cone.obj, u.idx * width + v.idx)


def _finset_equalizer(f: FinMap, g: FinMap) -> LimitCone:
    kept = tuple(el for el in f.source.elements if f(el) == g(el))
    obj = FinSetObj(kept)
    incl = FinMap.from_callable(obj, f.source, lambda el: el)
    return LimitCone(obj, (incl,))


def _finset_mediate_equalizer(cone: LimitCone, u: FinMap) -> FinMap:
    return FinMap.from_callable(u.source, cone.obj, u)


def _finset_pullback(f: FinMap, g: FinMap) -> LimitCone:
    kept = tuple((a, b) for a in f.source.elements for b in g.source.elements
                 if f(a) == g(b))
    obj = FinSetObj(kept)
    p0 = FinMap.from_callable(obj, f.source, lambda pair: pair[0])
    p1 = FinMap.from_callable(obj, g.source, lambda pair: pair[1])
    return LimitCone(obj, (p0, p1))


def _finset_mediate_pullback(cone: LimitCone, u: FinMap, v: FinMap) -> FinMap:
    return FinMap.from_callable(u.source, cone.obj,
                                lambda z: (u(z), v(z)))


def _finset_image(f: FinMap):
    hit = tuple(el for el in f.target.elements
                if any(f(a) == el for a in f.source.elements))
    obj = FinSetObj(hit)
    cover = FinMap.from_callable(f.source, obj, f)
    mono = FinMap.from_callable(obj, f.target, lambda el: el)
    return obj, cover, mono


def _finset_lift_pair(span_left: FinMap, span_right: FinMap,
                      a: FinMap, b: FinMap) -> FinMap | None:
    """Pointwise: each source element needs an apex element matching
    both components."""
    apex = span_left.source
    idx = []
    for z in a.source.elements:
        want = (a(z), b(z))
        found = next((i for i, w in enumerate(apex.elements)
                      if (span_left(w), span_right(w)) == want), None)
        if found is None:
            return None
        idx.append(found)
    return FinMap(a.source, apex, np.asarray(idx, dtype=np.intp))


def _finset_congruence_span(d0: FinMap, d1: FinMap) -> Span:
    seen = []
    for w in d0.source.elements:
        pair = (d0(w), d1(w))
        if pair not in seen:
            seen.append(pair)
    apex = FinSetObj(tuple(seen))
    l0 = FinMap.from_callable(apex, d0.target, lambda p: p[0])
    l1 = FinMap.from_callable(apex, d0.target, lambda p: p[1])
    return Span(apex, l0, l1)


def _finset_span_relation(span: Span):
    return frozenset((span.left(w), span.right(w))
                     for w in span.apex.elements)


def _finset_quotient(x0: FinSetObj, span: Span):
    parent = list(range(len(x0)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for w in span.apex.elements:
        i, j = find(x0.index(span.left(w))), find(x0.index(span.right(w)))
        if i != j:
            parent[max(i, j)] = min(i, j)
    classes: dict[int, list] = {}
    for i, el in enumerate(x0.elements):
        classes.setdefault(find(i), []).append(el)
    obj = FinSetObj(tuple(tuple(members) for members in classes.values()))
    cover = FinMap.from_callable(
        x0, obj, lambda el: tuple(classes[find(x0.index(el))]))
    return obj, cover


def _finset_induce(q: FinMap, h: FinMap) -> FinMap:
    idx = []
    for cls in q.target.elements:
        values = {h(member) for member in cls}
        if len(values) != 1:
            raise InvalidResult("morphism is not constant on a quotient "
                                "class", witness={"class": list(cls)})
        idx.append(h.target.index(values.pop()))
    return FinMap(q.target, h.target, np.asarray(idx, dtype=np.intp))


def finset_category(hom_bound: int = 500_000) -> ComputableCategory:
    return ComputableCategory(
        name="finset",
        exact=True,
        dom=lambda f: f.source,
        cod=lambda f: f.target,
        identity=FinMap.identity,
        compose=lambda g, f: g.compose(f),
        homs=lambda a, b: _finset_homs(a, b, hom_bound),
        is_mono=lambda f: f.is_injective(),
        is_regular_epi=lambda f: f.is_surjective(),
        is_iso=lambda f: f.is_injective() and f.is_surjective(),
        inverse=lambda f: FinMap(f.target, f.source,
                                 np.argsort(f.idx).astype(np.intp)),
        terminal=lambda: FinSetObj(("*",)),
        product=_finset_product,
        mediate_product=_finset_mediate_product,
        equalizer=_finset_equalizer,
        mediate_equalizer=_finset_mediate_equalizer,
        pullback=_finset_pullback,
        mediate_pullback=_finset_mediate_pullback,
        image=_finset_image,
        lift_pair=_finset_lift_pair,
        congruence_span=_finset_congruence_span,
        span_relation=_finset_span_relation,
        quotient_of_congruence=_finset_quotient,
        induce_on_quotient=_finset_induce,
        describe=lambda f: {"graph": {str(el): str(f(el))
                                      for el in f.source.elements}},
    )


# ---------------------------------------------------------------------------
# the functional-relations instance


def per_topos_category(algebra: HeytingAlgebra,
                       hom_bound: int = 500_000,
                       node_bound: int = 2_000_000) -> ComputableCategory:
    def homs(a, b):
        try:
            return pt.enumerate_funrels(a, b, hom_bound=hom_bound,
                                        node_bound=node_bound)
        except HomBoundExceeded as exc:
            raise InfiniteHom(str(exc), witness=exc.witness) from exc

    def product(a, b):
        res = pt.binary_product(a, b)
        return LimitCone(res.obj, (res.p0, res.p1), raw=res)

    def mediate_product(cone, u, v):
        return pt.pairing(u, v)

    def equalizer(f, g):
        res = pt.equalizer(f, g)
        return LimitCone(res.obj, (res.incl,), raw=res)

    def mediate_equalizer(cone, u):
        return pt.equalizer_mediate(cone.raw, u)

    def pullback(f, g):
        res = pt.pullback(f, g)
        return LimitCone(res.obj, (res.p0, res.p1), raw=res)

    def mediate_pullback(cone, u, v):
        return pt.pullback_mediate(cone.raw, u, v)

    def image(f):
        res = pt.image_factorize(f)
        return res.image, res.cover, res.mono

    def lift_pair(span_left, span_right, a, b):
        for cand in homs(a.dom, span_left.dom):
            if (pt.compose_morphisms(span_left, cand) == a
                    and pt.compose_morphisms(span_right, cand) == b):
                return cand
        return None

    def congruence_span(d0, d1):
        paired = pt.pairing(d0, d1)
        img = pt.image_factorize(paired)
        prod = pt.binary_product(d0.cod, d1.cod)
        l0 = pt.compose_morphisms(prod.p0, img.mono)
        l1 = pt.compose_morphisms(prod.p1, img.mono)
        return Span(img.image, l0, l1)

    def span_relation(span):
        sigma = pt.rel_compose(pt.rel_inverse(span.left.rel),
                               span.right.rel)
        return bytes(sigma.matrix)

    def quotient_of_congruence(x0, span):
        sigma = pt.rel_compose(pt.rel_inverse(span.left.rel),
                               span.right.rel).matrix
        q_obj = pt.PerObject(x0.carrier,
                             pt.Relation(algebra, x0.carrier, x0.carrier,
                                         sigma))
        cover = pt.FunRel(x0, q_obj, sigma)
        return q_obj, cover

    def induce_on_quotient(q, h):
        matrix = pt.rel_compose(pt.rel_inverse(q.rel), h.rel).matrix
        w = pt.FunRel(q.cod, h.cod, matrix)
        if pt.compose_morphisms(w, q) != h:
            raise InvalidResult("induced morphism does not factor the "
                                "original through the quotient")
        return w

    def describe(f):
        return {"dom": list(f.dom.carrier.elements),
                "cod": list(f.cod.carrier.elements),
                "matrix": [[algebra.name(v) for v in row]
                           for row in f.matrix]}

    return ComputableCategory(
        name="btopos",
        exact=True,
        dom=lambda f: f.dom,
        cod=lambda f: f.cod,
        identity=pt.identity,
        compose=pt.compose_morphisms,
        homs=homs,
        is_mono=pt.is_mono,
        is_regular_epi=pt.is_cover,
        is_iso=pt.is_iso,
        inverse=pt.inverse,
        terminal=lambda: pt.terminal_object(algebra),
        product=product,
        mediate_product=mediate_product,
        equalizer=equalizer,
        mediate_equalizer=mediate_equalizer,
        pullback=pullback,
        mediate_pullback=mediate_pullback,
        image=image,
        lift_pair=lift_pair,
        congruence_span=congruence_span,
        span_relation=span_relation,
        quotient_of_congruence=quotient_of_congruence,
        induce_on_quotient=induce_on_quotient,
        describe=describe,
    )


# ---------------------------------------------------------------------------
# indexed families over a finite lattice


@dataclass(frozen=True)
class FamObj:
    index: FinSetObj
    labels: tuple


@dataclass(frozen=True)
class FamMap:
    src: FamObj
    tgt: FamObj
    idx: tuple

    def __call__(self, element):
        return self.tgt.index.elements[self.idx[self.src.index.index(element)]]


def _fam_increasing(algebra, src: FamObj, tgt: FamObj, idx) -> bool:
    return all(algebra.le(src.labels[i], tgt.labels[j])
               for i, j in enumerate(idx))


def fam_category(algebra: HeytingAlgebra,
                 hom_bound: int = 500_000) -> ComputableCategory:
    """Families of lattice elements; maps may only increase the label."""

    def homs(a, b):
        if len(a.index) and len(b.index) == 0:
            return []
        count = max(len(b.index), 1) ** len(a.index)
        if count > hom_bound:
            raise InfiniteHom(f"{count} maps exceed the hom bound "
                              f"{hom_bound}")
        out = []
        for idx in itertools.product(range(len(b.index)),
                                     repeat=len(a.index)):
            if _fam_increasing(algebra, a, b, idx):
                out.append(FamMap(a, b, idx))
        return out

    def compose(g, f):
        return FamMap(f.src, g.tgt, tuple(g.idx[j] for j in f.idx))

    def identity(a):
        return FamMap(a, a, tuple(range(len(a.index))))

    def is_iso(f):
        return (len(set(f.idx)) == len(f.idx)
                and len(f.idx) == len(f.tgt.index)
                and all(f.src.labels[i] == f.tgt.labels[j]
                        for i, j in enumerate(f.idx)))

    def inverse(f):
        back = [0] * len(f.tgt.index)
        for i, j in enumerate(f.idx):
            back[j] = i
        return FamMap(f.tgt, f.src, tuple(back))

    def is_regular_epi(f):
        if set(f.idx) != set(range(len(f.tgt.index))):
            return False
        for j, label in enumerate(f.tgt.labels):
            fiber = [f.src.labels[i] for i, k in enumerate(f.idx) if k == j]
            if int(algebra.join_reduce(np.array(fiber,
                                                dtype=np.uint8))) != label:
                return False
        return True

    def product(a, b):
        pairs = product_obj(a.index, b.index)
        labels = tuple(int(algebra.meet[la, lb])
                       for la in a.labels for lb in b.labels)
        obj = FamObj(pairs, labels)
        width = len(b.index)
        p0 = FamMap(obj, a, tuple(k // width for k in range(len(pairs))))
        p1 = FamMap(obj, b, tuple(k % width for k in range(len(pairs))))
        return LimitCone(obj, (p0, p1))

    def mediate_product(cone, u, v):
        width = len(cone.legs[1].tgt.index)
        return FamMap(u.src, cone.obj,
                      tuple(i * width + j for i, j in zip(u.idx, v.idx)))

    def equalizer(f, g):
        kept = [i for i in range(len(f.src.index)) if f.idx[i] == g.idx[i]]
        obj = FamObj(FinSetObj(tuple(f.src.index.elements[i] for i in kept)),
                     tuple(f.src.labels[i] for i in kept))
        incl = FamMap(obj, f.src, tuple(kept))
        return LimitCone(obj, (incl,))

    def mediate_equalizer(cone, u):
        positions = {j: k for k, j in enumerate(cone.legs[0].idx)}
        return FamMap(u.src, cone.obj, tuple(positions[j] for j in u.idx))

    def pullback(f, g):
        prod = product(f.src, g.src)
        fp = compose(f, prod.legs[0])
        gp = compose(g, prod.legs[1])
        eq = equalizer(fp, gp)
        p0 = compose(prod.legs[0], eq.legs[0])
        p1 = compose(prod.legs[1], eq.legs[0])
        return LimitCone(eq.obj, (p0, p1), raw=(prod, eq))

    def mediate_pullback(cone, u, v):
        prod, eq = cone.raw
        w = mediate_product(prod, u, v)
        return mediate_equalizer(eq, w)

    def image(f):
        hit = sorted(set(f.idx))
        labels = []
        for j in hit:
            fiber = [f.src.labels[i] for i, k in enumerate(f.idx) if k == j]
            labels.append(int(algebra.join_reduce(np.array(fiber,
                                                           dtype=np.uint8))))
        obj = FamObj(FinSetObj(tuple(f.tgt.index.elements[j] for j in hit)),
                     tuple(labels))
        pos = {j: k for k, j in enumerate(hit)}
        cover = FamMap(f.src, obj, tuple(pos[j] for j in f.idx))
        mono = FamMap(obj, f.tgt, tuple(hit))
        return obj, cover, mono

    def lift_pair(span_left, span_right, a, b):
        for i in range(len(a.src.index)):
            if not any(span_left.idx[w] == a.idx[i]
                       and span_right.idx[w] == b.idx[i]
                       and algebra.le(a.src.labels[i],
                                      span_left.src.labels[w])
                       for w in range(len(span_left.src.index))):
                return None
        idx = []
        for i in range(len(a.src.index)):
            idx.append(next(
                w for w in range(len(span_left.src.index))
                if span_left.idx[w] == a.idx[i]
                and span_right.idx[w] == b.idx[i]
                and algebra.le(a.src.labels[i], span_left.src.labels[w])))
        return FamMap(a.src, span_left.src, tuple(idx))

    def exact_stub(*_args, **_kwargs):
        raise NotExactInstance("families over a lattice are not an exact "
                               "instance")

    return ComputableCategory(
        name="fam",
        exact=False,
        dom=lambda f: f.src,
        cod=lambda f: f.tgt,
        identity=identity,
        compose=compose,
        homs=homs,
        is_mono=lambda f: len(set(f.idx)) == len(f.idx),
        is_regular_epi=is_regular_epi,
        is_iso=is_iso,
        inverse=inverse,
        terminal=lambda: FamObj(FinSetObj(("*",)), (algebra.top,)),
        product=product,
        mediate_product=mediate_product,
        equalizer=equalizer,
        mediate_equalizer=mediate_equalizer,
        pullback=pullback,
        mediate_pullback=mediate_pullback,
        image=image,
        lift_pair=lift_pair,
        congruence_span=exact_stub,
        span_relation=exact_stub,
        quotient_of_congruence=exact_stub,
        induce_on_quotient=exact_stub,
        describe=lambda f: {"map": list(f.idx),
                            "labels": [algebra.name(v)
                                       for v in f.src.labels]},
    )


# ---------------------------------------------------------------------------
# category law checking


def validate_category(cat: ComputableCategory, objects: list) -> Report:
    """Identity, associativity, and factorization laws over the homs of
    the probe objects, exhaustively."""
    report = Report(config={"category": cat.name, "objects": len(objects)})
    hom: dict = {}
    for a in objects:
        for b in objects:
            hom[(id(a), id(b))] = cat.homs(a, b)

    identity_failure = None
    for a in objects:
        ia = cat.identity(a)
        for b in objects:
            for f in hom[(id(a), id(b))]:
                if (cat.compose(f, ia) != f
                        or cat.compose(cat.identity(b), f) != f):
                    identity_failure = {"morphism": cat.describe(f)}
                    break
    report.add("category.identity", PASS if identity_failure is None
               else FAIL, witness=identity_failure)

    assoc_failure = None
    for a, b, c, d in itertools.product(objects, repeat=4):
        for f in hom[(id(a), id(b))]:
            for g in hom[(id(b), id(c))]:
                gf = cat.compose(g, f)
                for h in hom[(id(c), id(d))]:
                    if cat.compose(h, gf) != cat.compose(cat.compose(h, g),
                                                         f):
                        assoc_failure = {"f": cat.describe(f),
                                         "g": cat.describe(g),
                                         "h": cat.describe(h)}
                        break
    report.add("category.associative", PASS if assoc_failure is None
               else FAIL, witness=assoc_failure)

    image_failure = None
    for a in objects:
        for b in objects:
            for f in hom[(id(a), id(b))]:
                _, cover, mono = cat.image(f)
                if (not cat.is_regular_epi(cover) or not cat.is_mono(mono)
                        or cat.compose(mono, cover) != f):
                    image_failure = {"morphism": cat.describe(f)}
                    break
    report.add("category.image_factorization",
               PASS if image_failure is None else FAIL,
               witness=image_failure)
    return report


def check_category_laws(cat: ComputableCategory, objects: list,
                        max_triples: int = 100_000,
                        seed: int | None = None) -> Report:
    """Associativity and identity over composable triples, exhaustive
    when small and seeded-sampled otherwise."""
    hom: dict = {}
    for a in objects:
        for b in objects:
            hom[(id(a), id(b))] = cat.homs(a, b)
    keys = [(a, b, c, d) for a in objects for b in objects
            for c in objects for d in objects]
    total = 0
    for a, b, c, d in keys:
        total += (len(hom[(id(a), id(b))]) * len(hom[(id(b), id(c))])
                  * len(hom[(id(c), id(d))]))
    sampled = total > max_triples
    report = Report(config={"category": cat.name, "triples": total,
                            "sampled": sampled, "seed": seed,
                            "max_triples": max_triples})
    failure = None
    checked = 0
    if not sampled:
        for a, b, c, d in keys:
            for f in hom[(id(a), id(b))]:
                for g in hom[(id(b), id(c))]:
                    gf = cat.compose(g, f)
                    for h in hom[(id(c), id(d))]:
                        checked += 1
                        if (cat.compose(h, gf)
                                != cat.compose(cat.compose(h, g), f)):
                            failure = {"f": cat.describe(f),
                                       "g": cat.describe(g),
                                       "h": cat.describe(h)}
    else:
        if seed is None:
            raise ValidationError(
                "sampling composable triples requires a seed")
        rng = random.Random(f"{seed}:{total}")
        weighted = [(a, b, c, d,
                     len(hom[(id(a), id(b))]) * len(hom[(id(b), id(c))])
                     * len(hom[(id(c), id(d))]))
                    for a, b, c, d in keys]
        weighted = [w for w in weighted if w[4] > 0]
        weights = [w[4] for w in weighted]
        for _ in range(max_triples):
            a, b, c, d, _n = rng.choices(weighted, weights=weights)[0]
            f = rng.choice(hom[(id(a), id(b))])
            g = rng.choice(hom[(id(b), id(c))])
            h = rng.choice(hom[(id(c), id(d))])
            checked += 1
            if cat.compose(h, cat.compose(g, f)) != cat.compose(
                    cat.compose(h, g), f):
                failure = {"f": cat.describe(f), "g": cat.describe(g),
                           "h": cat.describe(h)}
    report.add("category.associative_triples",
               PASS if failure is None else FAIL, witness=failure)
    report.config["checked"] = checked

    id_failure = None
    for a in objects:
        for b in objects:
            for f in hom[(id(a), id(b))]:
                if (cat.compose(f, cat.identity(a)) != f
                        or cat.compose(cat.identity(b), f) != f):
                    id_failure = {"morphism": cat.describe(f)}
    report.add("category.identity", PASS if id_failure is None else FAIL,
               witness=id_failure)
    return report


# ---------------------------------------------------------------------------
# pseudoequivalence spans


@dataclass
class PseudoEquivalence:
    cat: ComputableCategory
    x1: object
    x0: object
    d0: object
    d1: object
    r: object
    s: object
    t: object
    pairs: LimitCone


def _verify_pseq(cat, x1, x0, d0, d1, r, s, t, pairs) -> dict | None:
    ix0 = cat.identity(x0)
    if cat.compose(d0, r) != ix0 or cat.compose(d1, r) != ix0:
        return {"clause": "reflexivity",
                "reason": "section does not split both legs"}
    if cat.compose(d0, s) != d1 or cat.compose(d1, s) != d0:
        return {"clause": "symmetry",
                "reason": "swap does not exchange the legs"}
    p0, p1 = pairs.legs
    if (cat.compose(d0, t) != cat.compose(d0, p0)
            or cat.compose(d1, t) != cat.compose(d1, p1)):
        return {"clause": "transitivity",
                "reason": "composite witness has the wrong endpoints"}
    return None


def validate_pseudoeq(cat: ComputableCategory, x1, x0, d0, d1,
                      witnesses: tuple | None = None) -> PseudoEquivalence:
    """Check or search the three witnesses; ValidationError names the
    first clause that cannot be satisfied."""
    if cat.dom(d0) != x1 or cat.dom(d1) != x1:
        raise ValidationError("legs must share the span object as domain")
    if cat.cod(d0) != x0 or cat.cod(d1) != x0:
        raise ValidationError("legs must land in the base object")
    pairs = cat.pullback(d1, d0)
    if witnesses is not None:
        r, s, t = witnesses
    else:
        ix0 = cat.identity(x0)
        r = cat.lift_pair(d0, d1, ix0, ix0)
        if r is None:
            raise ValidationError(
                "no reflexivity witness", witness={"clause": "reflexivity"})
        s = cat.lift_pair(d0, d1, d1, d0)
        if s is None:
            raise ValidationError(
                "no symmetry witness", witness={"clause": "symmetry"})
        p0, p1 = pairs.legs
        t = cat.lift_pair(d0, d1, cat.compose(d0, p0), cat.compose(d1, p1))
        if t is None:
            raise ValidationError(
                "no transitivity witness",
                witness={"clause": "transitivity"})
    failure = _verify_pseq(cat, x1, x0, d0, d1, r, s, t, pairs)
    if failure is not None:
        raise ValidationError(failure["reason"], witness=failure)
    return PseudoEquivalence(cat, x1, x0, d0, d1, r, s, t, pairs)


@dataclass
class PseqMorphism:
    f0: object
    f1: object


def validate_pseq_morphism(src: PseudoEquivalence, tgt: PseudoEquivalence,
                           f0, f1) -> PseqMorphism:
    cat = src.cat
    if (cat.compose(tgt.d0, f1) != cat.compose(f0, src.d0)
            or cat.compose(tgt.d1, f1) != cat.compose(f0, src.d1)):
        raise ValidationError("component maps do not commute with the legs")
    return PseqMorphism(f0, f1)


def pseq_map_equivalent(src: PseudoEquivalence, tgt: PseudoEquivalence,
                        m1: PseqMorphism,
                        m2: PseqMorphism) -> tuple[bool, object | None]:
    """Homotopy search: a lift of the pair (f0, g0) through the target
    span. In exact instances equivalent maps are asserted to induce the
    same quotient morphism."""
    cat = src.cat
    eta = cat.lift_pair(tgt.d0, tgt.d1, m1.f0, m2.f0)
    if eta is None:
        return False, None
    if cat.exact:
        q_src = quotient(src)
        q_tgt = quotient(tgt)
        w1 = cat.induce_on_quotient(
            q_src.cover, cat.compose(q_tgt.cover, m1.f0))
        w2 = cat.induce_on_quotient(
            q_src.cover, cat.compose(q_tgt.cover, m2.f0))
        if w1 != w2:
            raise InvalidResult("equivalent span maps induced different "
                                "quotient morphisms")
    return True, eta


@dataclass
class QuotientResult:
    obj: object
    cover: object
    span: Span


def quotient(pseq: PseudoEquivalence) -> QuotientResult:
    """Coequalize the congruence generated by the span legs.

    The returned cover is checked to be a regular epi whose kernel pair
    generates exactly the congruence.
    """
    cat = pseq.cat
    if not cat.exact:
        raise NotExactInstance(
            f"{cat.name} does not provide pseudoequivalence quotients")
    span = cat.congruence_span(pseq.d0, pseq.d1)
    obj, cover = cat.quotient_of_congruence(pseq.x0, span)
    if cat.compose(cover, pseq.d0) != cat.compose(cover, pseq.d1):
        raise InvalidResult("quotient cover does not coequalize the span")
    if not cat.is_regular_epi(cover):
        raise InvalidResult("quotient cover is not a regular epimorphism")
    kp = cat.pullback(cover, cover)
    kp_span = cat.congruence_span(kp.legs[0], kp.legs[1])
    if cat.span_relation(kp_span) != cat.span_relation(span):
        raise InvalidResult("kernel pair of the quotient cover differs "
                            "from the congruence")
    return QuotientResult(obj, cover, span)


# ---------------------------------------------------------------------------
# representing an object by a span over assemblies


@dataclass
class Representation:
    pseq: PseudoEquivalence
    resolution: Resolution
    kernel: LimitCone
    quotient: QuotientResult
    comparison: object


def default_resolver(per: pt.PerObject) -> Resolution:
    if pt.is_diagonal(per):
        return identity_resolution(per)
    return sigma_resolution(per)


def represent(per: pt.PerObject, cat: ComputableCategory,
              resolver=default_resolver) -> Representation:
    """Present an object as the quotient of a span between assemblies.

    The base is the resolution source; the span object is the kernel
    pair of the resolution cover, which is again an assembly. All three
    witnesses are built from pullback mediators, never searched.
    """
    res = resolver(per)
    cover = res.cover
    x0 = res.sigma
    kernel = cat.pullback(cover, cover)
    w0, w1 = kernel.legs
    x1 = kernel.obj
    ix0 = cat.identity(x0)
    r = cat.mediate_pullback(kernel, ix0, ix0)
    s = cat.mediate_pullback(kernel, w1, w0)
    pairs = cat.pullback(w1, w0)
    t = cat.mediate_pullback(kernel,
                             cat.compose(w0, pairs.legs[0]),
                             cat.compose(w1, pairs.legs[1]))
    pseq = validate_pseudoeq(cat, x1, x0, w0, w1, witnesses=(r, s, t))
    qres = quotient(pseq)
    comparison = cat.induce_on_quotient(qres.cover, cover)
    if not cat.is_iso(comparison):
        raise InvalidResult("quotient of the representing span is not "
                            "isomorphic to the object")
    return Representation(pseq, res, kernel, qres, comparison)


# ---------------------------------------------------------------------------
# functors and the left Kan extension


@dataclass
class FunctorHandle:
    """Object and morphism actions between two computable categories.

    Actions must be pure: the same input object or morphism always maps
    to the same output.
    """
    name: str
    source: ComputableCategory
    target: ComputableCategory
    obj_map: callable
    mor_map: callable


def identity_embedding(cat: ComputableCategory) -> FunctorHandle:
    return FunctorHandle("identity", cat, cat,
                         obj_map=lambda a: a, mor_map=lambda f: f)


def global_sections(cat_b: ComputableCategory,
                    cat_fin: ComputableCategory) -> FunctorHandle:
    """Points functor: morphisms from the terminal object, as a finite
    set of value rows."""
    cache: dict = {}

    def obj_map(per: pt.PerObject) -> FinSetObj:
        if per not in cache:
            secs = cat_b.homs(cat_b.terminal(), per)
            obj = FinSetObj(tuple(tuple(int(v) for v in s.matrix[0])
                                  for s in secs))
            cache[per] = (obj, secs)
        return cache[per][0]

    def mor_map(f: pt.FunRel) -> FinMap:
        src_obj = obj_map(f.dom)
        tgt_obj = obj_map(f.cod)
        idx = []
        for s in cache[f.dom][1]:
            composite = pt.compose_morphisms(f, s)
            idx.append(tgt_obj.index(tuple(int(v)
                                           for v in composite.matrix[0])))
        return FinMap(src_obj, tgt_obj, np.asarray(idx, dtype=np.intp))

    return FunctorHandle("global-sections", cat_b, cat_fin, obj_map, mor_map)


def hom_functor(cat_b: ComputableCategory, probe: pt.PerObject,
                cat_fin: ComputableCategory) -> FunctorHandle:
    """Morphisms out of a fixed probe object, as a finite set of
    flattened matrices."""
    cache: dict = {}

    def obj_map(per: pt.PerObject) -> FinSetObj:
        if per not in cache:
            ms = cat_b.homs(probe, per)
            obj = FinSetObj(tuple(tuple(int(v) for v in m.matrix.reshape(-1))
                                  for m in ms))
            cache[per] = (obj, ms)
        return cache[per][0]

    def mor_map(f: pt.FunRel) -> FinMap:
        src_obj = obj_map(f.dom)
        tgt_obj = obj_map(f.cod)
        idx = []
        for m in cache[f.dom][1]:
            composite = pt.compose_morphisms(f, m)
            idx.append(tgt_obj.index(
                tuple(int(v) for v in composite.matrix.reshape(-1))))
        return FinMap(src_obj, tgt_obj, np.asarray(idx, dtype=np.intp))

    return FunctorHandle(f"hom({list(probe.carrier.elements)})",
                         cat_b, cat_fin, obj_map, mor_map)


def check_finite_continuity(G: FunctorHandle, probe_objects: list,
                            max_parallel_pairs: int = 40) -> Report:
    """Preservation of the terminal object, binary products, and
    equalizers over the probes; raises NotFinitelyContinuous on failure.
    """
    src, tgt = G.source, G.target
    report = Report(config={"functor": G.name,
                            "probes": len(probe_objects)})

    g_term = G.obj_map(src.terminal())
    term_iso = any(tgt.is_iso(h)
                   for h in tgt.homs(g_term, tgt.terminal()))
    report.add("continuity.terminal", PASS if term_iso else FAIL)

    prod_failure = None
    for a, b in itertools.product(probe_objects, repeat=2):
        cone = src.product(a, b)
        t_cone = tgt.product(G.obj_map(a), G.obj_map(b))
        comparison = tgt.mediate_product(t_cone,
                                         G.mor_map(cone.legs[0]),
                                         G.mor_map(cone.legs[1]))
        if not tgt.is_iso(comparison):
            prod_failure = {"pair_index": [probe_objects.index(a),
                                           probe_objects.index(b)]}
            break
    report.add("continuity.products", PASS if prod_failure is None else FAIL,
               witness=prod_failure)

    eq_failure = None
    tried = 0
    for a, b in itertools.product(probe_objects, repeat=2):
        if eq_failure or tried >= max_parallel_pairs:
            break
        fs = src.homs(a, b)
        for f, g in itertools.product(fs, repeat=2):
            tried += 1
            if tried > max_parallel_pairs:
                break
            cone = src.equalizer(f, g)
            t_cone = tgt.equalizer(G.mor_map(f), G.mor_map(g))
            comparison = tgt.mediate_equalizer(t_cone,
                                               G.mor_map(cone.legs[0]))
            if not tgt.is_iso(comparison):
                eq_failure = {"f": src.describe(f), "g": src.describe(g)}
                break
    report.add("continuity.equalizers", PASS if eq_failure is None else FAIL,
               witness=eq_failure)

    if not report.ok:
        raise NotFinitelyContinuous(
            f"functor {G.name} fails finite continuity",
            witness=[c.to_dict() for c in report.failures()])
    return report


@dataclass
class KanExtension:
    functor: FunctorHandle
    rep: Representation
    pseq_e: PseudoEquivalence
    obj: object
    cover: object


def _transport_pseq(G: FunctorHandle, rep: Representation):
    """Apply the functor to a representing span and rebuild the witnesses
    on the target side, routing the composite witness through the
    target's own pairs object."""
    tgt = G.target
    x1 = G.obj_map(rep.pseq.x1)
    x0 = G.obj_map(rep.pseq.x0)
    d0 = G.mor_map(rep.pseq.d0)
    d1 = G.mor_map(rep.pseq.d1)
    pairs_t = tgt.pullback(d1, d0)
    src_pairs = rep.pseq.pairs
    comparison = tgt.mediate_pullback(pairs_t,
                                      G.mor_map(src_pairs.legs[0]),
                                      G.mor_map(src_pairs.legs[1]))
    if not tgt.is_iso(comparison):
        raise NotFinitelyContinuous(
            f"functor {G.name} does not preserve the pairs pullback")
    t = tgt.compose(G.mor_map(rep.pseq.t), tgt.inverse(comparison))
    return validate_pseudoeq(tgt, x1, x0, d0, d1,
                             witnesses=(G.mor_map(rep.pseq.r),
                                        G.mor_map(rep.pseq.s), t))


def kan_extend(G: FunctorHandle, per: pt.PerObject,
               resolver=default_resolver,
               continuity_probes: list | None = None) -> KanExtension:
    """Left extension along the assemblies embedding at one object: the
    quotient, in the target, of the image of the representing span."""
    if not G.target.exact:
        raise NotExactInstance(
            f"{G.target.name} cannot hold the extension quotient")
    if continuity_probes:
        check_finite_continuity(G, continuity_probes)
    rep = represent(per, G.source, resolver=resolver)
    pseq_e = _transport_pseq(G, rep)
    qres = quotient(pseq_e)
    return KanExtension(G, rep, pseq_e, qres.obj, qres.cover)


def kan_unit(G: FunctorHandle, assembly_per: pt.PerObject,
             resolver=default_resolver) -> tuple[KanExtension, object, bool]:
    """Unit comparison at an assembly: the extension's quotient cover
    from the functor value itself. Expected to be an isomorphism."""
    if not pt.is_diagonal(assembly_per):
        raise InvalidResult("unit components live on assembly objects")
    ext = kan_extend(G, assembly_per, resolver=resolver)
    eta = ext.cover
    return ext, eta, G.target.is_iso(eta)


def kan_map(G: FunctorHandle, ext_x: KanExtension, ext_y: KanExtension,
            u: pt.FunRel):
    """Morphism action of the extension, through canonical
    factorizations and the induced quotient map."""
    cat = G.source
    f0 = canonical_factorization(
        cat.compose(u, ext_x.rep.resolution.cover),
        ext_y.rep.resolution).morphism
    f1 = cat.mediate_pullback(ext_y.rep.kernel,
                              cat.compose(f0, ext_x.rep.pseq.d0),
                              cat.compose(f0, ext_x.rep.pseq.d1))
    validate_pseq_morphism(ext_x.rep.pseq, ext_y.rep.pseq, f0, f1)
    h = G.target.compose(ext_y.cover, G.mor_map(f0))
    return G.target.induce_on_quotient(ext_x.cover, h)


def counit_check(H: FunctorHandle, resolutions: list[Resolution],
                 cat_d: ComputableCategory) -> Report:
    """Per resolution: does the functor send the cover to a regular epi,
    and is the rebuilt comparison onto the functor value an iso? The two
    answers must agree; both are recorded."""
    tgt = H.target
    report = Report(config={"functor": H.name,
                            "instances": len(resolutions)})
    for i, res in enumerate(resolutions):
        h_cover = H.mor_map(res.cover)
        epi = bool(tgt.is_regular_epi(h_cover))
        rep = _resolution_span(res, cat_d)
        pseq_e = _transport_pseq(H, rep)
        qres = quotient(pseq_e)
        epsilon = tgt.induce_on_quotient(qres.cover, h_cover)
        iso = bool(tgt.is_iso(epsilon))
        report.add(
            f"counit.instance_{i}",
            PASS if epi == iso else FAIL,
            witness={"target": [str(e) for e in
                                res.target.carrier.elements],
                     "sends_cover_to_regular_epi": epi,
                     "comparison_iso": iso})
    if not resolutions:
        report.add("counit.vacuous", PASS)
    return report


def _resolution_span(res: Resolution, cat: ComputableCategory):
    """Representation-shaped bundle from a given resolution, without the
    quotient comparison."""
    cover = res.cover
    kernel = cat.pullback(cover, cover)
    w0, w1 = kernel.legs
    ix0 = cat.identity(res.sigma)
    r = cat.mediate_pullback(kernel, ix0, ix0)
    s = cat.mediate_pullback(kernel, w1, w0)
    pairs = cat.pullback(w1, w0)
    t = cat.mediate_pullback(kernel,
                             cat.compose(w0, pairs.legs[0]),
                             cat.compose(w1, pairs.legs[1]))
    pseq = validate_pseudoeq(cat, kernel.obj, res.sigma, w0, w1,
                             witnesses=(r, s, t))
    return Representation(pseq, res, kernel, None, None)
