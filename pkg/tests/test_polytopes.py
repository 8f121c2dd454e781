import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from bellvol.polytopes import (
    Behavior,
    DegeneratePolytope,
    Halfspace,
    JointProbabilityTable,
    NoSignalingViolation,
    RationalPolytope,
    UnboundedPolytope,
    behavior_from_table,
    check_no_signaling,
    correlation_polytope_C,
    cube_polytope_h,
    deterministic_behaviors,
    enumerate_facets,
    enumerate_vertices,
    exact_volume,
    local_polytope_v,
    ns_polytope_h,
    pr_box,
    project_to_correlations,
    signaling_example,
    table_from_behavior,
)
from bellvol.regions import in_box_L, in_local, in_quantum_arcsin, in_tsirelson_T

PM = (-1, 1)
SETTINGS = ((0, 0), (0, 1), (1, 0), (1, 1))


def zero_behavior():
    return Behavior(*([Fraction(0)] * 8))


def random_behaviors(count, seed=0):
    """Valid behaviors with coordinates on the grid k/8 (rejection sampling)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        fields = [Fraction(rng.randint(-8, 8), 8) for _ in range(8)]
        try:
            out.append(Behavior(*fields))
        except ValueError:
            continue
    return out


# --------------------------------------------------------------------------
# behaviors and tables
# --------------------------------------------------------------------------

class TestBehavior:
    def test_rejects_negative_probability(self):
        # perfect correlation with contradictory marginals
        with pytest.raises(ValueError, match=r"P\(A0"):
            Behavior(1, 0, -1, 0, 1, 0, 0, 0)

    def test_probability_parametrization(self):
        b = zero_behavior()
        for (i, j), a, bb in itertools.product(SETTINGS, PM, PM):
            assert b.probability(i, j, a, bb) == Fraction(1, 4)


class TestDeterministicBehaviors:
    def test_sixteen_distinct(self):
        dets = deterministic_behaviors()
        assert len(dets) == 16
        assert len({d.as_vector() for d in dets}) == 16

    def test_all_plus_assignment(self):
        b = Behavior(1, 1, 1, 1, 1, 1, 1, 1)
        assert b in deterministic_behaviors()

    def test_mixed_assignment_correlations(self):
        # assignment (a0, a1, b0, b1) = (+1, -1, +1, +1)
        match = [d for d in deterministic_behaviors()
                 if (d.mA0, d.mA1, d.mB0, d.mB1) == (1, -1, 1, 1)]
        assert len(match) == 1
        assert (match[0].c00, match[0].c01, match[0].c10, match[0].c11) \
            == (1, 1, -1, -1)

    def test_correlations_are_products(self):
        for d in deterministic_behaviors():
            for i, j in SETTINGS:
                assert d.correlation(i, j) == d.marginal_a(i) * d.marginal_b(j)


class TestTables:
    def test_zero_behavior_uniform_blocks(self):
        t = table_from_behavior(zero_behavior())
        assert all(e == Fraction(1, 4) for e in t.entries)

    def test_deterministic_table(self):
        t = table_from_behavior(Behavior(1, 1, 1, 1, 1, 1, 1, 1))
        for (i, j), a, b in itertools.product(SETTINGS, PM, PM):
            expected = Fraction(1) if (a, b) == (1, 1) else Fraction(0)
            assert t.entry(i, j, a, b) == expected

    def test_table_validation(self):
        bad = [Fraction(1, 4)] * 16
        bad[0] = Fraction(1, 2)  # block (0, 0) sums to 5/4
        with pytest.raises(ValueError, match="sums to"):
            JointProbabilityTable(tuple(bad))
        bad = [Fraction(1, 4)] * 16
        bad[0], bad[1] = Fraction(-1, 4), Fraction(3, 4)
        with pytest.raises(ValueError, match="negative"):
            JointProbabilityTable(tuple(bad))

    def test_round_trip_on_random_behaviors(self):
        for b in random_behaviors(25, seed=5):
            assert behavior_from_table(table_from_behavior(b)) == b

    def test_uniform_table_gives_zero_behavior(self):
        t = JointProbabilityTable(tuple([Fraction(1, 4)] * 16))
        assert behavior_from_table(t) == zero_behavior()


class TestNoSignaling:
    def test_pr_box_passes(self):
        ok, worst = check_no_signaling(pr_box())
        assert ok and worst == 0

    def test_signaling_example_fails_with_unit_discrepancy(self):
        ok, worst = check_no_signaling(signaling_example())
        assert not ok
        assert worst == 1

    def test_behavior_tables_always_pass(self):
        for b in random_behaviors(10, seed=6):
            ok, worst = check_no_signaling(table_from_behavior(b))
            assert ok and worst == 0

    def test_behavior_from_signaling_table_raises(self):
        with pytest.raises(NoSignalingViolation) as err:
            behavior_from_table(signaling_example())
        assert err.value.max_discrepancy == 1


class TestReferenceTables:
    def test_pr_box_entries(self):
        t = pr_box()
        half = Fraction(1, 2)
        assert t.entry(0, 0, 1, 1) == half and t.entry(0, 0, -1, -1) == half
        assert t.entry(1, 1, 1, -1) == half and t.entry(1, 1, -1, 1) == half
        assert t.entry(1, 1, 1, 1) == 0
        assert sum(1 for e in t.entries if e == half) == 8

    def test_pr_box_behavior_and_projection(self):
        b = behavior_from_table(pr_box())
        assert (b.mA0, b.mA1, b.mB0, b.mB1) == (0, 0, 0, 0)
        assert (b.c00, b.c01, b.c10, b.c11) == (1, 1, 1, -1)
        p = project_to_correlations(b)
        assert p.as_tuple() == (1.0, 1.0, 1.0, -1.0)
        assert not in_quantum_arcsin(p).inside

    def test_signaling_example_projection_is_local(self):
        t = signaling_example()
        # all entries nonnegative and each block normalized is enforced by
        # the JointProbabilityTable constructor; the projection must be local
        corr = [sum(a * b * t.entry(i, j, a, b) for a in PM for b in PM)
                for i, j in SETTINGS]
        assert corr == [0, 0, 0, 0]
        assert in_local([float(c) for c in corr]).inside

    def test_projection_of_deterministic_behaviors(self):
        match = [d for d in deterministic_behaviors()
                 if (d.mA0, d.mA1, d.mB0, d.mB1) == (1, -1, 1, 1)]
        assert project_to_correlations(match[0]).as_tuple() == (1.0, 1.0, -1.0, -1.0)
        assert project_to_correlations(zero_behavior()).as_tuple() == (0, 0, 0, 0)


# --------------------------------------------------------------------------
# polytopes
# --------------------------------------------------------------------------

class TestNsPolytope:
    def test_sixteen_facets(self):
        assert len(ns_polytope_h().halfspaces) == 16

    def test_zero_behavior_strictly_interior_with_unit_slack(self):
        # facets are scaled to 1 + a*mA + b*mB + ab*c >= 0 (4x probability)
        zero = (Fraction(0),) * 8
        for h in ns_polytope_h().halfspaces:
            assert h.slack(zero) == 1

    def test_pr_behavior_tight_on_eight_facets(self):
        vec = behavior_from_table(pr_box()).as_vector()
        slacks = [h.slack(vec) for h in ns_polytope_h().halfspaces]
        assert all(s >= 0 for s in slacks)
        assert sum(1 for s in slacks if s == 0) == 8


class TestEnumerateVertices:
    def test_ns_polytope_has_24_vertices(self):
        poly = enumerate_vertices(ns_polytope_h())
        assert len(poly.vertices) == 24

    def test_ns_vertex_classification(self):
        verts = enumerate_vertices(ns_polytope_h()).vertices
        det = {b.as_vector() for b in deterministic_behaviors()}
        deterministic = [v for v in verts if v in det]
        others = [v for v in verts if v not in det]
        assert len(deterministic) == 16 and len(others) == 8
        for v in others:
            marginals, corr = v[:4], v[4:]
            assert marginals == (0, 0, 0, 0)
            assert all(abs(c) == 1 for c in corr)
            assert sum(1 for c in corr if c == -1) % 2 == 1

    def test_cube_vertices(self):
        poly = enumerate_vertices(cube_polytope_h(4))
        assert len(poly.vertices) == 16
        assert set(poly.vertices) == {
            tuple(Fraction(s) for s in signs)
            for signs in itertools.product(PM, repeat=4)}

    def test_unbounded_quadrant_detected(self):
        h = RationalPolytope(dim=2, halfspaces=(
            Halfspace.normalized((1, 0), 1), Halfspace.normalized((0, 1), 1)))
        with pytest.raises(UnboundedPolytope):
            enumerate_vertices(h)

    def test_rank_deficient_slab_detected(self):
        h = RationalPolytope(dim=2, halfspaces=(
            Halfspace.normalized((1, 0), 1), Halfspace.normalized((-1, 0), 1)))
        with pytest.raises(UnboundedPolytope):
            enumerate_vertices(h)

    def test_vertices_sorted_canonically(self):
        verts = enumerate_vertices(ns_polytope_h()).vertices
        assert list(verts) == sorted(verts)


def chsh_halfspaces():
    """The eight normalized CHSH facet inequalities in correlation space."""
    out = set()
    for k in range(4):
        normal = [1, 1, 1, 1]
        normal[k] = -1
        out.add((tuple(normal), Fraction(2)))
        out.add((tuple(-n for n in normal), Fraction(2)))
    return out


def box_halfspaces(dim):
    out = set()
    for k in range(dim):
        for s in (1, -1):
            normal = [0] * dim
            normal[k] = s
            out.add((tuple(normal), Fraction(1)))
    return out


class TestEnumerateFacets:
    def test_local_polytope_has_24_facets(self):
        facets = enumerate_facets(local_polytope_v()).halfspaces
        assert len(facets) == 24

    def test_local_polytope_facet_classification(self):
        facets = enumerate_facets(local_polytope_v()).halfspaces
        positivity = {(h.normal, h.offset) for h in ns_polytope_h().halfspaces}
        got = {(h.normal, h.offset) for h in facets}
        # 16 positivity facets, shared with the no-signaling polytope
        assert positivity <= got
        chsh = got - positivity
        assert len(chsh) == 8
        for normal, offset in chsh:
            assert normal[:4] == (0, 0, 0, 0)      # no marginal terms
            assert sorted(abs(n) for n in normal[4:]) == [1, 1, 1, 1]
            assert offset == 2

    def test_correlation_hull_facets(self):
        # The hull is a linear image of the 4D cross-polytope: its facet
        # list is the 8 CHSH inequalities plus the 8 coordinate bounds.
        facets = enumerate_facets(correlation_polytope_C()).halfspaces
        got = {(h.normal, h.offset) for h in facets}
        assert got == chsh_halfspaces() | box_halfspaces(4)
        assert len(got & chsh_halfspaces()) == 8

    def test_cube_facets(self):
        cube_v = enumerate_vertices(cube_polytope_h(4))
        facets = enumerate_facets(
            RationalPolytope(dim=4, vertices=cube_v.vertices)).halfspaces
        assert {(h.normal, h.offset) for h in facets} == box_halfspaces(4)

    def test_degenerate_input_raises(self):
        square_in_3d = RationalPolytope(dim=3, vertices=(
            (Fraction(0), Fraction(0), Fraction(0)),
            (Fraction(1), Fraction(0), Fraction(0)),
            (Fraction(0), Fraction(1), Fraction(0)),
            (Fraction(1), Fraction(1), Fraction(0))))
        with pytest.raises(DegeneratePolytope):
            enumerate_facets(square_in_3d)


class TestDuality:
    def test_cube_round_trip(self):
        h = cube_polytope_h(4)
        recon = enumerate_facets(
            RationalPolytope(dim=4, vertices=enumerate_vertices(h).vertices))
        assert {(f.normal, f.offset) for f in recon.halfspaces} \
            == {(f.normal, f.offset) for f in h.halfspaces}

    def test_ns_polytope_round_trip(self):
        h = ns_polytope_h()
        verts = enumerate_vertices(h).vertices
        recon = enumerate_facets(RationalPolytope(dim=8, vertices=verts))
        assert {(f.normal, f.offset) for f in recon.halfspaces} \
            == {(f.normal, f.offset) for f in h.halfspaces}


class TestProjectionConsistency:
    def test_each_correlation_vertex_hit_twice(self):
        images = Counter(tuple(b.as_vector()[4:])
                         for b in deterministic_behaviors())
        assert len(images) == 8
        assert all(count == 2 for count in images.values())
        assert set(images) == set(correlation_polytope_C().vertices)

    def test_vertex_signs_and_products(self):
        for v in correlation_polytope_C().vertices:
            assert all(abs(x) == 1 for x in v)
            assert v[0] * v[1] * v[2] * v[3] == 1

    def test_vertices_saturate_some_chsh_functional(self):
        for v in correlation_polytope_C().vertices:
            s = sum(v)
            values = [abs(s - 2 * x) for x in v]
            assert max(values) == 2  # exact rational arithmetic

    def test_ns_vertices_project_into_cube_and_pr_family_outside_T(self):
        verts = enumerate_vertices(ns_polytope_h()).vertices
        det = {b.as_vector() for b in deterministic_behaviors()}
        outside_t = 0
        for v in verts:
            corr = [float(x) for x in v[4:]]
            assert in_box_L(corr).inside
            if not in_tsirelson_T(corr).inside:
                outside_t += 1
                assert v not in det
        assert outside_t == 8


class TestExactVolume:
    def test_correlation_hull_volume(self):
        assert exact_volume(correlation_polytope_C()) == Fraction(32, 3)

    def test_cube_volume(self):
        cube = enumerate_vertices(cube_polytope_h(4))
        assert exact_volume(cube) == 16

    def test_unit_simplex_volume(self):
        verts = [tuple(Fraction(0) for _ in range(4))]
        for k in range(4):
            v = [Fraction(0)] * 4
            v[k] = Fraction(1)
            verts.append(tuple(v))
        simplex = RationalPolytope(dim=4, vertices=tuple(verts))
        assert exact_volume(simplex) == Fraction(1, 24)

    def test_degenerate_raises(self):
        flat = RationalPolytope(dim=3, vertices=(
            (Fraction(0), Fraction(0), Fraction(0)),
            (Fraction(1), Fraction(0), Fraction(0)),
            (Fraction(0), Fraction(1), Fraction(0)),
            (Fraction(1), Fraction(1), Fraction(0))))
        with pytest.raises(DegeneratePolytope):
            exact_volume(flat)

    def test_invariant_under_vertex_permutation(self):
        verts = list(correlation_polytope_C().vertices)
        rng = random.Random(3)
        for _ in range(3):
            rng.shuffle(verts)
            poly = RationalPolytope(dim=4, vertices=tuple(verts))
            assert exact_volume(poly) == Fraction(32, 3)

    def test_invariant_under_relabelings(self):
        # coordinate permutations and paired sign flips map the hull to itself
        def transform(v, perm, signs):
            return tuple(signs[k] * v[perm[k]] for k in range(4))

        cases = [((2, 3, 0, 1), (1, 1, 1, 1)),      # swap Alice's settings
                 ((1, 0, 3, 2), (1, 1, 1, 1)),      # swap Bob's settings
                 ((0, 2, 1, 3), (1, 1, 1, 1)),      # swap parties
                 ((0, 1, 2, 3), (-1, -1, 1, 1)),    # flip one row
                 ((0, 1, 2, 3), (-1, 1, -1, 1))]    # flip one column
        for perm, signs in cases:
            verts = tuple(sorted(transform(v, perm, signs)
                                 for v in correlation_polytope_C().vertices))
            poly = RationalPolytope(dim=4, vertices=verts)
            assert exact_volume(poly) == Fraction(32, 3)


class TestAgainstFloatingPointHull:
    """Cross-check the exact engine against scipy's qhull on random hulls."""

    @pytest.mark.parametrize("dim,seed", [(3, 0), (3, 1), (4, 2), (4, 3)])
    def test_random_hulls_match_qhull(self, dim, seed):
        scipy_spatial = pytest.importorskip("scipy.spatial")
        rng = random.Random(seed)
        pts = [tuple(Fraction(rng.randint(-8, 8), 4) for _ in range(dim))
               for _ in range(10)]
        pts = sorted(set(pts))
        hull = scipy_spatial.ConvexHull([[float(x) for x in p] for p in pts])
        extreme = tuple(pts[i] for i in sorted(hull.vertices))
        poly = RationalPolytope(dim=dim, vertices=extreme)
        faceted = enumerate_facets(poly)
        import numpy as np
        qhull_planes = len(np.unique(np.round(hull.equations, 8), axis=0))
        assert len(faceted.halfspaces) == qhull_planes
        assert float(exact_volume(poly)) == pytest.approx(hull.volume, rel=1e-9)


class TestSerialization:
    def test_vertex_round_trip(self):
        poly = correlation_polytope_C()
        text = poly.to_text("V")
        lines = text.strip().splitlines()
        assert lines[0] == "V 4 8"
        parsed = RationalPolytope.from_text(text)
        assert parsed.vertices == poly.vertices

    def test_halfspace_round_trip(self):
        poly = ns_polytope_h()
        text = poly.to_text("H")
        assert text.startswith("H 8 16\n")
        parsed = RationalPolytope.from_text(text)
        assert {(h.normal, h.offset) for h in parsed.halfspaces} \
            == {(h.normal, h.offset) for h in poly.halfspaces}

    def test_fractions_serialized_as_p_over_q(self):
        poly = RationalPolytope(dim=2, vertices=(
            (Fraction(1, 3), Fraction(-2, 7)), (Fraction(0), Fraction(1))))
        text = poly.to_text("V")
        assert "1/3" in text and "-2/7" in text
        assert RationalPolytope.from_text(text).vertices == poly.vertices

    def test_mutual_containment_of_dual_representations(self):
        poly = enumerate_vertices(ns_polytope_h())
        for v in poly.vertices:
            assert all(h.slack(v) >= 0 for h in poly.halfspaces)
        # every facet supports the polytope: slack 0 on >= 8 vertices
        for h in poly.halfspaces:
            tight = sum(1 for v in poly.vertices if h.slack(v) == 0)
            assert tight >= 8
