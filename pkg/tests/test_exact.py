"""Span quotients, category law checks, functors, and left extensions.

Oracles come first: the quotient of a relation span over finite sets is
recomputed below with a plain union-find, and the frozen constants in
this file were read off the oracle before being asserted against the
engine.
"""
import itertools

import numpy as np
import pytest

from tritopos.errors import (InvalidResult, NotExactInstance,
                             NotFinitelyContinuous, ValidationError)
from tritopos.exact_completion import (FamObj, FunctorHandle,
                                       check_category_laws,
                                       check_finite_continuity, counit_check,
                                       fam_category, finset_category,
                                       global_sections, hom_functor,
                                       identity_embedding, kan_extend,
                                       kan_map, kan_unit, per_topos_category,
                                       pseq_map_equivalent, quotient,
                                       represent, validate_category,
                                       validate_pseq_morphism,
                                       validate_pseudoeq)
from tritopos.formats import load_algebra
from tritopos.per_topos import (FunRel, PerObject, Relation, identity,
                                is_diagonal, nabla, nabla_map)
from tritopos.resolvent import sigma_resolution
from tritopos.tripos import FinMap, FinSetObj, canonical_set

H3 = load_algebra("chain3")

# chain3 codes: 0 -> 0, 1 -> h, 2 -> 1
A_SYM = [[2, 1], [1, 2]]
A_DIAG_H = [[1, 0], [0, 1]]
A_MIXED = [[2, 0], [0, 1]]
A_POINT_H = [[1]]


def oracle_partition(size, pairs):
    """Equivalence classes of the reflexive-symmetric-transitive closure,
    recomputed by repeated merging; classes keep declared element order."""
    classes = [{i} for i in range(size)]
    changed = True
    while changed:
        changed = False
        for a, b in pairs:
            ca = next(c for c in classes if a in c)
            cb = next(c for c in classes if b in c)
            if ca is not cb:
                ca |= cb
                classes.remove(cb)
                changed = True
    out = sorted((tuple(sorted(c)) for c in classes), key=lambda c: c[0])
    return tuple(out)


def oracle_closure(size, generators):
    """All pairs of the generated equivalence relation, row-major order."""
    classes = oracle_partition(size, generators)
    member = {}
    for c in classes:
        for x in c:
            member[x] = c
    return tuple((x, y) for x in range(size) for y in range(size)
                 if y in member[x])


def mk_per(H, mat, names=None):
    mat = np.array(mat, dtype=np.uint8)
    carrier = FinSetObj(tuple(names or (f"x{i}" for i in range(len(mat)))))
    return PerObject(carrier, Relation(H, carrier, carrier, mat))


def finset_span(elements, pairs):
    x0 = FinSetObj(tuple(elements))
    x1 = FinSetObj(tuple(pairs))
    d0 = FinMap.from_callable(x1, x0, lambda w: w[0])
    d1 = FinMap.from_callable(x1, x0, lambda w: w[1])
    return x0, x1, d0, d1


FIN = finset_category()
EXAMPLE_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 0))


class TestFinsetQuotient:
    def test_example_span_frozen(self):
        x0, x1, d0, d1 = finset_span((0, 1, 2), EXAMPLE_PAIRS)
        pseq = validate_pseudoeq(FIN, x1, x0, d0, d1)
        assert pseq.r.idx.tolist() == [0, 1, 2]
        assert pseq.s.idx.tolist() == [0, 1, 2, 4, 3]
        assert pseq.t.idx.tolist() == [0, 3, 1, 4, 2, 3, 0, 4, 1]
        q = quotient(pseq)
        assert q.obj.elements == ((0, 1), (2,))
        assert q.cover.idx.tolist() == [0, 0, 1]
        assert q.obj.elements == oracle_partition(3, EXAMPLE_PAIRS)

    def test_quotients_match_union_find(self):
        for size in range(4):
            generators = list(itertools.combinations(range(size), 2))
            for take in range(len(generators) + 1):
                for chosen in itertools.combinations(generators, take):
                    closure = oracle_closure(size, chosen)
                    x0, x1, d0, d1 = finset_span(range(size), closure)
                    pseq = validate_pseudoeq(FIN, x1, x0, d0, d1)
                    q = quotient(pseq)
                    assert q.obj.elements == oracle_partition(size, chosen)
                    for x in range(size):
                        assert x in q.cover(x)

    def test_diagonal_span_gives_iso_cover(self):
        elems = (0, 1, 2)
        x0, x1, d0, d1 = finset_span(elems, tuple((x, x) for x in elems))
        q = quotient(validate_pseudoeq(FIN, x1, x0, d0, d1))
        assert FIN.is_iso(q.cover)
        assert len(q.obj) == len(elems)


class TestPseudoEquivalenceClauses:
    def test_missing_reflexivity(self):
        x0, x1, d0, d1 = finset_span((0, 1), ((0, 1),))
        with pytest.raises(ValidationError) as err:
            validate_pseudoeq(FIN, x1, x0, d0, d1)
        assert err.value.witness == {"clause": "reflexivity"}

    def test_missing_symmetry(self):
        x0, x1, d0, d1 = finset_span((0, 1), ((0, 0), (1, 1), (0, 1)))
        with pytest.raises(ValidationError) as err:
            validate_pseudoeq(FIN, x1, x0, d0, d1)
        assert err.value.witness == {"clause": "symmetry"}

    def test_bad_composite_witness(self):
        x0, x1, d0, d1 = finset_span((0, 1, 2), EXAMPLE_PAIRS)
        good = validate_pseudoeq(FIN, x1, x0, d0, d1)
        t_bad = FIN.compose(good.r, FIN.compose(d0, good.pairs.legs[0]))
        with pytest.raises(ValidationError) as err:
            validate_pseudoeq(FIN, x1, x0, d0, d1,
                              witnesses=(good.r, good.s, t_bad))
        assert err.value.witness["clause"] == "transitivity"

    def test_leg_shape_guard(self):
        x0, x1, d0, d1 = finset_span((0, 1), ((0, 0), (1, 1)))
        other = FinSetObj(("stray",))
        with pytest.raises(ValidationError):
            validate_pseudoeq(FIN, other, x0, d0, d1)
        with pytest.raises(ValidationError):
            validate_pseudoeq(FIN, x1, other, d0, d1)


class TestSpanMorphisms:
    def setup_method(self):
        self.x0, self.x1, d0, d1 = finset_span((0, 1, 2), EXAMPLE_PAIRS)
        self.pseq = validate_pseudoeq(FIN, self.x1, self.x0, d0, d1)
        self.ident = validate_pseq_morphism(
            self.pseq, self.pseq, FIN.identity(self.x0),
            FIN.identity(self.x1))

    def _swap(self):
        flip = {0: 1, 1: 0, 2: 2}
        f0 = FinMap(self.x0, self.x0, np.array([1, 0, 2]))
        f1 = FinMap.from_callable(self.x1, self.x1,
                                  lambda w: (flip[w[0]], flip[w[1]]))
        return validate_pseq_morphism(self.pseq, self.pseq, f0, f1)

    def test_commuting_guard(self):
        f0 = FinMap(self.x0, self.x0, np.array([1, 0, 2]))
        with pytest.raises(ValidationError):
            validate_pseq_morphism(self.pseq, self.pseq, f0,
                                   FIN.identity(self.x1))

    def test_swap_is_homotopic_to_identity(self):
        ok, eta = pseq_map_equivalent(self.pseq, self.pseq, self.ident,
                                      self._swap())
        assert ok
        assert eta.idx.tolist() == [3, 4, 2]

    def test_collapse_is_not_homotopic(self):
        f0 = FinMap(self.x0, self.x0, np.array([2, 2, 2]))
        f1 = FinMap.from_callable(self.x1, self.x1, lambda w: (2, 2))
        collapse = validate_pseq_morphism(self.pseq, self.pseq, f0, f1)
        assert pseq_map_equivalent(self.pseq, self.pseq, self.ident,
                                   collapse) == (False, None)


class TestCategoryInstances:
    def test_finset_laws(self):
        objs = [canonical_set(k, prefix=f"f{k}") for k in range(3)]
        report = validate_category(FIN, objs)
        assert report.ok, report.failures()
        assert [c.check for c in report.checks] == [
            "category.identity", "category.associative",
            "category.image_factorization"]

    def test_btopos_laws(self):
        cat = per_topos_category(H3)
        objs = [nabla(H3, FinSetObj(("p",))), mk_per(H3, A_SYM)]
        assert validate_category(cat, objs).ok

    def test_fam_laws_and_missing_quotients(self):
        cat = fam_category(H3)
        objs = [FamObj(FinSetObj(()), ()),
                FamObj(FinSetObj(("a",)), (2,)),
                FamObj(FinSetObj(("b0", "b1")), (1, 2))]
        assert validate_category(cat, objs).ok
        ident = cat.identity(objs[2])
        pseq = validate_pseudoeq(cat, objs[2], objs[2], ident, ident)
        with pytest.raises(NotExactInstance):
            quotient(pseq)

    def test_law_check_exhaustive(self):
        objs = [canonical_set(k, prefix=f"f{k}") for k in range(3)]
        report = check_category_laws(FIN, objs)
        assert report.ok
        assert report.config["sampled"] is False
        assert report.config["checked"] == report.config["triples"]

    def test_law_check_sampling_needs_seed(self):
        objs = [canonical_set(k, prefix=f"f{k}") for k in range(3)]
        with pytest.raises(ValidationError):
            check_category_laws(FIN, objs, max_triples=50)
        report = check_category_laws(FIN, objs, max_triples=50, seed=11)
        assert report.ok
        assert report.config["sampled"] is True
        assert report.config["checked"] == 50


class TestRepresentation:
    def setup_method(self):
        self.cat = per_topos_category(H3)

    def test_assembly_uses_identity_resolution(self):
        rep = represent(mk_per(H3, A_DIAG_H), self.cat)
        assert rep.resolution.names is None
        assert self.cat.is_iso(rep.comparison)
        assert is_diagonal(rep.pseq.x0) and is_diagonal(rep.pseq.x1)

    def test_symmetric_object_roundtrip(self):
        per = mk_per(H3, A_SYM)
        rep = represent(per, self.cat)
        assert rep.resolution.names is not None
        assert self.cat.is_iso(rep.comparison)
        assert rep.comparison.cod == per
        assert is_diagonal(rep.pseq.x0) and is_diagonal(rep.pseq.x1)
        assert self.cat.is_regular_epi(rep.quotient.cover)


class TestGlobalSections:
    def setup_method(self):
        self.cat = per_topos_category(H3)
        self.G = global_sections(self.cat, FIN)

    def test_section_counts_on_constants(self):
        for k in range(4):
            assert len(self.G.obj_map(nabla(H3, canonical_set(k)))) == k

    def test_morphism_action_is_functorial(self):
        x, y = canonical_set(2), canonical_set(3, prefix="y")
        u = nabla_map(H3, FinMap(x, y, np.array([2, 0])))
        gu = self.G.mor_map(u)
        assert gu.source == self.G.obj_map(u.dom)
        assert gu.target == self.G.obj_map(u.cod)
        assert self.G.mor_map(identity(u.dom)) == FIN.identity(gu.source)

    def test_finite_continuity(self):
        probes = [nabla(H3, canonical_set(k)) for k in range(3)]
        probes.append(mk_per(H3, A_MIXED))
        report = check_finite_continuity(self.G, probes)
        assert report.ok
        assert [c.check for c in report.checks] == [
            "continuity.terminal", "continuity.products",
            "continuity.equalizers"]

    def test_pinned_value_functor_is_rejected(self):
        two = canonical_set(2, prefix="c")
        pinned = FunctorHandle("pinned-pair", self.cat, FIN,
                               obj_map=lambda per: two,
                               mor_map=lambda f: FinMap(two, two,
                                                        np.arange(2)))
        probes = [nabla(H3, canonical_set(k)) for k in range(3)]
        with pytest.raises(NotFinitelyContinuous) as err:
            check_finite_continuity(pinned, probes)
        failed = [w["check"] for w in err.value.witness]
        assert "continuity.terminal" in failed
        assert "continuity.products" in failed


class TestKanExtension:
    def setup_method(self):
        self.cat = per_topos_category(H3)
        self.G = global_sections(self.cat, FIN)

    def test_unit_iso_on_assemblies(self):
        for mat, size in [(A_MIXED, 1), (A_POINT_H, 0), (A_DIAG_H, 0)]:
            ext, eta, iso = kan_unit(self.G, mk_per(H3, mat))
            assert iso
            assert len(ext.obj) == size
        with pytest.raises(InvalidResult):
            kan_unit(self.G, mk_per(H3, A_SYM))

    def test_extension_of_constants_recovers_the_set(self):
        for k in range(4):
            ext = kan_extend(self.G, nabla(H3, canonical_set(k)))
            assert len(ext.obj) == k
            assert FIN.is_regular_epi(ext.cover)

    def test_name_space_resolver_agrees(self):
        per = nabla(H3, canonical_set(2))
        ext = kan_extend(self.G, per, resolver=sigma_resolution)
        assert len(ext.obj) == 2

    def test_morphism_action_frozen_graph(self):
        x, y = canonical_set(2), canonical_set(3, prefix="y")
        u = nabla_map(H3, FinMap(x, y, np.array([2, 0])))
        ext_x = kan_extend(self.G, u.dom)
        ext_y = kan_extend(self.G, u.cod)
        induced = kan_map(self.G, ext_x, ext_y, u)
        graph = {str(e): str(induced(e)) for e in induced.source.elements}
        assert graph == {"((0, 2),)": "((2, 0, 0),)",
                         "((2, 0),)": "((0, 0, 2),)"}
        assert kan_map(self.G, ext_x, ext_x,
                       identity(u.dom)) == FIN.identity(ext_x.obj)

    def test_target_must_be_exact(self):
        fam = fam_category(H3)
        probe = FamObj(FinSetObj(("a",)), (2,))
        with pytest.raises(NotExactInstance):
            kan_extend(identity_embedding(fam), probe)


class TestCounit:
    def setup_method(self):
        self.cat = per_topos_category(H3)
        self.G = global_sections(self.cat, FIN)

    def test_vacuous_without_instances(self):
        report = counit_check(self.G, [], self.cat)
        assert report.ok
        assert report.checks[0].check == "counit.vacuous"

    def test_sections_functor_on_weak_point(self):
        res = sigma_resolution(mk_per(H3, A_POINT_H))
        report = counit_check(self.G, [res], self.cat)
        assert report.ok
        wit = report.checks[0].witness
        assert wit["sends_cover_to_regular_epi"] is True
        assert wit["comparison_iso"] is True

    def test_hom_functor_on_symmetric_object(self):
        per = mk_per(H3, A_SYM)
        functor = hom_functor(self.cat, per, FIN)
        report = counit_check(functor, [sigma_resolution(per)], self.cat)
        assert report.ok
        wit = report.checks[0].witness
        assert wit["sends_cover_to_regular_epi"] is False
        assert wit["comparison_iso"] is False
