"""Resolutions, assemblies, orthogonality, and the constant-objects
subobject comparison.

A resolution of an object is a cover from an assembly through which
every morphism out of an assembly factors. The central construction
builds that cover on the name space of predicates over the carrier: a
name is related to a carrier point exactly as strongly as the named
predicate agrees with the equality row of that point.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (BoundExceeded, HomBoundExceeded, InvalidResult,
                     ResolutionUnavailable, ShapeMismatch)
from .heyting import HeytingAlgebra
from .per_topos import (FunRel, PerObject, Relation, compose_morphisms,
                        enumerate_funrels, enumerate_pers,
                        factor_mono_through, identity, image_factorize,
                        image_predicate, is_cover, is_diagonal, is_iso,
                        is_mono, nabla, nabla_map, pullback, rel_compose,
                        rel_inverse, subobjects_equivalent)
from .report import FAIL, PASS, SKIPPED, Report
from .tripos import (FinMap, FinSetObj, PowerObject, Predicate, all_maps,
                     all_predicates, canonical_set, power_object, reindex)


@dataclass
class Assembly:
    """A carrier with a strength predicate; equality lives on the
    diagonal only."""
    carrier: FinSetObj
    alpha: Predicate

    def __post_init__(self):
        if self.alpha.base != self.carrier:
            raise ShapeMismatch("strength predicate must live on the carrier")

    @property
    def algebra(self) -> HeytingAlgebra:
        return self.alpha.algebra

    def to_per(self) -> PerObject:
        n = len(self.carrier)
        e = np.full((n, n), self.algebra.bot, dtype=np.uint8)
        np.fill_diagonal(e, self.alpha.values)
        return PerObject(self.carrier,
                         Relation(self.algebra, self.carrier, self.carrier, e),
                         validate=False)

    def inclusion(self) -> FunRel:
        """The mono into the constant object on the same carrier."""
        per = self.to_per()
        return FunRel(per, nabla(self.algebra, self.carrier), per.e.matrix,
                      validate=False)


def assembly_from_per(per: PerObject) -> Assembly:
    if not is_diagonal(per):
        raise ResolutionUnavailable(
            "object is not in assembly form: equality is not diagonal")
    return Assembly(per.carrier, Predicate(per.algebra, per.carrier,
                                           per.diag))


@dataclass
class Resolution:
    """A cover from an assembly onto the target.

    names carries the predicate name space when the source was built on
    one; the identity resolution of an assembly has no name space.
    """
    target: PerObject
    sigma: PerObject
    embed: FunRel
    cover: FunRel
    names: PowerObject | None = field(repr=False, default=None)


def sigma_resolution(per: PerObject, name_bound: int = 10 ** 4) -> Resolution:
    """Resolution on predicate names.

    The cover relates a name to a carrier point by how strongly the
    named predicate coincides with that point's equality row, cut down
    by the point's own strength so the result is a valid morphism.
    """
    H = per.algebra
    pw = power_object(H, per.carrier, bound=name_bound)
    e = per.e.matrix
    n = len(per.carrier)
    count = len(pw.carrier)
    r = np.full((count, n), H.top, dtype=np.uint8)
    for y in range(n):
        agree = H.iff[pw._table[:, y][:, None], e[y, :][None, :]]
        r = H.meet[r, agree]
    r = H.meet[r, e.diagonal()[None, :]]
    strength = np.full(count, H.bot, dtype=np.uint8)
    for x in range(n):
        strength = H.join[strength, r[:, x]]
    sigma_e = np.full((count, count), H.bot, dtype=np.uint8)
    np.fill_diagonal(sigma_e, strength)
    sigma = PerObject(pw.carrier, Relation(H, pw.carrier, pw.carrier,
                                           sigma_e), validate=False)
    embed = FunRel(sigma, nabla(H, pw.carrier), sigma_e)
    cover = FunRel(sigma, per, r)
    return Resolution(per, sigma, embed, cover, pw)


def identity_resolution(per: PerObject) -> Resolution:
    """An assembly resolves itself: the cover is its identity."""
    if not is_diagonal(per):
        raise ResolutionUnavailable(
            "identity resolution needs an assembly-shaped object")
    embed = FunRel(per, nabla(per.algebra, per.carrier), per.e.matrix,
                   validate=False)
    return Resolution(per, per, embed, identity(per))


@dataclass
class Factorization:
    """A morphism through the resolution cover, with the name-level map
    that induces it when a name space is present."""
    morphism: FunRel
    base_map: FinMap | None


def canonical_factorization(f: FunRel, res: Resolution) -> Factorization:
    """Factor a morphism from an assembly through the resolution cover.

    Each domain point is sent, at its own strength, to the name of its
    value row. No search is involved; the choice is deterministic.
    """
    if f.cod != res.target:
        raise ShapeMismatch("morphism does not land in the resolved object")
    if not is_diagonal(f.dom):
        raise ResolutionUnavailable(
            "canonical factorization needs an assembly-shaped domain")
    if res.names is None:
        morphism = FunRel(f.dom, res.sigma, f.matrix)
        if compose_morphisms(res.cover, morphism) != f:
            raise InvalidResult("factorization through the identity "
                                "resolution does not recompose")
        return Factorization(morphism, None)
    H = f.algebra
    idx = []
    for y in range(len(f.dom.carrier)):
        row = Predicate(H, res.target.carrier, f.matrix[y])
        idx.append(res.names.carrier.index(res.names.name_of(row)))
    base_map = FinMap(f.dom.carrier, res.names.carrier,
                      np.asarray(idx, dtype=np.intp))
    g = np.full((len(f.dom.carrier), len(res.names.carrier)), H.bot,
                dtype=np.uint8)
    alpha = f.dom.diag
    for y, j in enumerate(idx):
        g[y, j] = alpha[y]
    morphism = FunRel(f.dom, res.sigma, g)
    if compose_morphisms(res.cover, morphism) != f:
        raise InvalidResult("canonical factorization does not recompose")
    return Factorization(morphism, base_map)


def default_probe_assemblies(algebra: HeytingAlgebra,
                             max_carrier: int = 2) -> list[PerObject]:
    """All assembly-form objects on canonical carriers up to a size."""
    out = []
    for size in range(max_carrier + 1):
        carrier = canonical_set(size, prefix="p")
        for alpha in all_predicates(algebra, carrier):
            out.append(Assembly(carrier, alpha).to_per())
    return out


def rel_image_defect(f: FunRel) -> dict:
    """Witness for a non-surjective morphism: the codomain pair where
    the image equality falls short."""
    H = f.algebra
    forth = rel_compose(rel_inverse(f.rel), f.rel).matrix
    at = np.argwhere(forth != f.cod.e.matrix)
    if at.size == 0:
        return {}
    i, j = at[0]
    return {"at": [f.cod.carrier.elements[int(i)],
                   f.cod.carrier.elements[int(j)]],
            "have": H.name(int(forth[i, j])),
            "need": H.name(int(f.cod.e.matrix[i, j]))}


def check_resolution(res: Resolution, probes: list[PerObject] | None = None,
                     hom_bound: int = 500_000) -> Report:
    """Both defining clauses, exhaustively over the probe assemblies."""
    H = res.target.algebra
    if probes is None:
        probes = default_probe_assemblies(H)
    report = Report(config={"probes": len(probes), "hom_bound": hom_bound})

    report.add("resolution.source_assembly",
               PASS if is_diagonal(res.sigma) else FAIL)
    report.add("resolution.embed_mono",
               PASS if is_mono(res.embed) else FAIL)
    if is_cover(res.cover):
        report.add("resolution.cover_surjective", PASS)
    else:
        report.add("resolution.cover_surjective", FAIL,
                   witness=rel_image_defect(res.cover))

    kp = pullback(res.cover, res.cover)
    square = (compose_morphisms(res.cover, kp.p0)
              == compose_morphisms(res.cover, kp.p1))
    img = image_factorize(res.cover)
    if square and is_iso(img.mono):
        report.add("resolution.cover_coequalizes", PASS)
    else:
        report.add("resolution.cover_coequalizes", FAIL,
                   witness={"kernel_square": bool(square),
                            "image_mono_iso": bool(is_iso(img.mono))})

    failures = []
    tried = 0
    skipped = None
    for probe in probes:
        try:
            fs = enumerate_funrels(probe, res.target, hom_bound=hom_bound)
        except HomBoundExceeded as exc:
            skipped = {"probe_carrier": len(probe.carrier),
                       "detail": exc.witness}
            continue
        for f in fs:
            tried += 1
            try:
                fac = canonical_factorization(f, res)
            except InvalidResult as exc:
                failures.append({"probe": list(probe.carrier.elements),
                                 "morphism": f.matrix.tolist(),
                                 "reason": str(exc)})
                continue
            if compose_morphisms(res.cover, fac.morphism) != f:
                failures.append({"probe": list(probe.carrier.elements),
                                 "morphism": f.matrix.tolist()})
    if failures:
        report.add("resolution.factorization", FAIL,
                   witness={"failures": failures[:5],
                            "count": len(failures)})
    elif skipped is not None and tried == 0:
        report.add("resolution.factorization", SKIPPED, witness=skipped)
    else:
        report.add("resolution.factorization", PASS,
                   witness={"morphisms_checked": tried})
    return report


def section_of_cover(res: Resolution, hom_bound: int = 500_000,
                     node_bound: int = 2_000_000) -> FunRel | None:
    """A right inverse of the resolution cover, when one exists.

    Assembly-shaped targets get the canonical factorization of their
    identity; anything else falls back to exhaustive search.
    """
    ident = identity(res.target)
    if is_diagonal(res.target):
        return canonical_factorization(ident, res).morphism
    for cand in enumerate_funrels(res.target, res.sigma, hom_bound=hom_bound,
                                  node_bound=node_bound):
        if compose_morphisms(res.cover, cand) == ident:
            return cand
    return None


def assembly_test(per: PerObject,
                  probe_targets: list[FinSetObj] | None = None,
                  hom_bound: int = 500_000,
                  node_bound: int = 2_000_000) -> tuple[bool, FunRel | None]:
    """Bounded search for a mono into a constant object.

    Assembly-form objects return their own inclusion immediately. The
    verdict for everything else is only as strong as the probe list.
    """
    if is_diagonal(per):
        return True, assembly_from_per(per).inclusion()
    if probe_targets is None:
        sizes = range(max(2, len(per.carrier)) + 1)
        probe_targets = [canonical_set(k, prefix="z") for k in sizes]
        probe_targets.append(per.carrier)
    H = per.algebra
    for target in probe_targets:
        for cand in enumerate_funrels(per, nabla(H, target),
                                      hom_bound=hom_bound,
                                      node_bound=node_bound):
            if is_mono(cand):
                return True, cand
    return False, None


# ---------------------------------------------------------------------------
# orthogonality


def orthogonality_test(left, right, cat) -> tuple[bool, dict | None]:
    """Unique-diagonal check for every commuting square from left to
    right, over a computable category handle.

    The handle must provide dom, cod, homs, compose, and describe;
    morphisms must compare with ==. False comes with the first square
    that lacks or duplicates a diagonal.
    """
    a, b = cat.dom(left), cat.cod(left)
    c, d = cat.dom(right), cat.cod(right)
    for f in cat.homs(a, c):
        rf = cat.compose(right, f)
        for g in cat.homs(b, d):
            if cat.compose(g, left) != rf:
                continue
            diagonals = [h for h in cat.homs(b, c)
                         if cat.compose(h, left) == f
                         and cat.compose(right, h) == g]
            if len(diagonals) != 1:
                return False, {"square": {"top": cat.describe(f),
                                          "bottom": cat.describe(g)},
                               "diagonals": len(diagonals)}
    return True, None


def open_mono_test(mono, regular_epi_probes, cat) -> tuple[bool, dict | None]:
    """Right orthogonality against every probe cover; bounded verdict."""
    if not cat.is_mono(mono):
        return False, {"reason": "not a monomorphism"}
    for e in regular_epi_probes:
        ok, witness = orthogonality_test(e, mono, cat)
        if not ok:
            witness = dict(witness or {})
            witness["probe"] = cat.describe(e)
            return False, witness
    return True, None


# ---------------------------------------------------------------------------
# subobjects of constant objects against the predicate fibre


def predicate_inclusion(algebra: HeytingAlgebra, alpha: Predicate) -> FunRel:
    return Assembly(alpha.base, alpha).inclusion()


def subobject_tripos_iso(algebra: HeytingAlgebra, x: FinSetObj,
                         probe_sizes: tuple[int, ...] = (0, 1, 2),
                         predicate_bound: int = 10 ** 4,
                         hom_bound: int = 500_000) -> Report:
    """Compare predicates on a finite set with subobjects of its
    constant object: order isomorphism plus naturality of reindexing."""
    count = len(algebra) ** len(x)
    if count > predicate_bound:
        raise BoundExceeded(
            f"{count} predicates exceed the bound {predicate_bound}",
            witness={"count": count, "bound": predicate_bound})
    report = Report(config={"set_size": len(x),
                            "probe_sizes": list(probe_sizes)})
    target = nabla(algebra, x)
    alphas = list(all_predicates(algebra, x))
    incls = [predicate_inclusion(algebra, a) for a in alphas]

    bad = next((i for i, m in enumerate(incls) if not is_mono(m)), None)
    report.add("sub_nabla.inclusions_mono", PASS if bad is None else FAIL,
               witness=None if bad is None
               else {"predicate": [algebra.name(v)
                                   for v in alphas[bad].values]})

    order_failure = None
    for i, a in enumerate(alphas):
        for j, b in enumerate(alphas):
            factors = factor_mono_through(incls[i], incls[j]) is not None
            if factors != a.leq(b):
                order_failure = {
                    "alpha": [algebra.name(v) for v in a.values],
                    "beta": [algebra.name(v) for v in b.values],
                    "factors": factors}
                break
        if order_failure:
            break
    report.add("sub_nabla.order_embedding",
               PASS if order_failure is None else FAIL,
               witness=order_failure)

    complete_failure = None
    checked = 0
    for size in probe_sizes:
        carrier = canonical_set(size, prefix="s")
        for per in enumerate_pers(algebra, carrier):
            for m in enumerate_funrels(per, target, hom_bound=hom_bound):
                if not is_mono(m):
                    continue
                checked += 1
                alpha = Predicate(algebra, x, image_predicate(m))
                i = next(k for k, a in enumerate(alphas) if a == alpha)
                if not subobjects_equivalent(m, incls[i]):
                    complete_failure = {"mono": m.matrix.tolist(),
                                        "carrier": list(carrier.elements)}
                    break
            if complete_failure:
                break
        if complete_failure:
            break
    report.add("sub_nabla.complete",
               PASS if complete_failure is None else FAIL,
               witness=complete_failure or {"monos_checked": checked})

    natural_failure = None
    probe_sets = [canonical_set(s, prefix="n") for s in probe_sizes] + [x]
    for y in probe_sets:
        for f in all_maps(y, x):
            nf = nabla_map(algebra, f)
            for a in alphas:
                lhs = predicate_inclusion(algebra, reindex(f, a))
                pb = pullback(nf, predicate_inclusion(algebra, a))
                if not subobjects_equivalent(lhs, pb.p0):
                    natural_failure = {
                        "map": [f(el) for el in y.elements],
                        "alpha": [algebra.name(v) for v in a.values]}
                    break
            if natural_failure:
                break
        if natural_failure:
            break
    report.add("sub_nabla.natural",
               PASS if natural_failure is None else FAIL,
               witness=natural_failure)
    return report
