"""Planar absolute norms: evaluation, duality, extreme structure,
V-points, the transfer predicate, and supporting slices."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import slicecert.absnorm as an


def _pt(a, b):
    return (Fraction(a), Fraction(b))


FIG = an.named_norm("figure-alpha")
L1 = an.named_norm("l1")
L2 = an.named_norm("l2")
LINF = an.named_norm("linf")

coords = st.fractions(min_value=-3, max_value=3, max_denominator=12)
scalars = st.fractions(min_value=-2, max_value=2, max_denominator=8)


class TestConstruction:
    def test_named_norms(self):
        assert FIG.kind == "polyhedral"
        assert FIG.cone_vertices == (
            _pt(1, 0),
            _pt(Fraction(3, 4), Fraction(1, 2)),
            _pt(Fraction(1, 2), Fraction(3, 4)),
            _pt(0, 1),
        )
        assert L2.p == 2 and LINF.p == "inf"
        with pytest.raises(ValueError):
            an.named_norm("l3-ish")

    def test_lp_requires_p_at_least_one(self):
        with pytest.raises(ValueError):
            an.lp_norm(Fraction(1, 2))

    @pytest.mark.parametrize(
        "chain, message",
        [
            ([(1, 0)], "at least"),
            ([(1, 0), (1, 1)], "chain must run"),
            ([(Fraction(1, 2), 0), (0, 1)], "chain must run"),
            ([(1, 0), (1, 0), (0, 1)], "must differ"),
            ([(1, 0), (Fraction(5, 4), Fraction(1, 2)), (0, 1)], "monotone"),
            ([(1, 0), (Fraction(3, 4), Fraction(1, 4)), (0, 1)], "left"),
            ([(1, 0), (Fraction(1, 2), Fraction(1, 2)), (0, 1)], "left"),
        ],
    )
    def test_chain_validation(self, chain, message):
        with pytest.raises(ValueError, match=message):
            an.polyhedral_norm(chain)

    def test_polyhedral_conversions(self):
        assert an.is_polyhedral(FIG)
        assert an.is_polyhedral(L1) and an.is_polyhedral(LINF)
        assert not an.is_polyhedral(L2)
        assert an.as_polyhedral(L1).cone_vertices == (_pt(1, 0), _pt(0, 1))
        assert an.as_polyhedral(LINF).cone_vertices == (
            _pt(1, 0),
            _pt(1, 1),
            _pt(0, 1),
        )
        with pytest.raises(ValueError):
            an.as_polyhedral(L2)


class TestEvaluation:
    def test_hand_values(self):
        assert an.norm_eval(FIG, _pt(2, 1)) == Fraction(5, 2)
        assert an.norm_eval(FIG, _pt(-2, -1)) == Fraction(5, 2)
        assert an.norm_eval(L2, _pt(3, 4)) == 5
        assert an.norm_eval(L1, _pt(3, -4)) == 7
        assert an.norm_eval(LINF, _pt(3, -4)) == 4

    def test_irrational_values_are_refused(self):
        with pytest.raises(an.NotExactlyRepresentable):
            an.norm_eval(L2, _pt(1, 1))

    def test_exact_comparisons(self):
        assert an.norm_cmp(FIG, _pt(2, 1), Fraction(5, 2)) == 0
        # sqrt(2) against nearby rationals, never materialized.
        assert an.norm_cmp(L2, _pt(1, 1), Fraction(3, 2)) == -1
        assert an.norm_cmp(L2, _pt(1, 1), Fraction(7, 5)) == 1
        # 2^(2/3) for p = 3/2 via the half-integer comparison path.
        n32 = an.lp_norm(Fraction(3, 2))
        assert an.norm_cmp(n32, _pt(1, 1), Fraction(8, 5)) == -1
        assert an.norm_cmp(n32, _pt(1, 1), Fraction(11, 7)) == 1
        with pytest.raises(ValueError, match="denominator 1 or 2"):
            an.norm_cmp(an.lp_norm(Fraction(5, 3)), _pt(1, 1), 1)

    def test_sphere_membership(self):
        assert an.is_on_sphere(FIG, _pt(Fraction(5, 8), Fraction(5, 8)))
        assert not an.is_on_sphere(FIG, _pt(Fraction(1, 2), Fraction(1, 2)))

    @settings(max_examples=60, deadline=None)
    @given(a=coords, b=coords, c=coords, d=coords, lam=scalars)
    def test_norm_axioms_polyhedral(self, a, b, c, d, lam):
        for norm in (FIG, L1, LINF):
            na = an.norm_eval(norm, (a, b))
            assert (na == 0) == (a == 0 and b == 0)
            assert an.norm_eval(norm, (lam * a, lam * b)) == abs(lam) * na
            assert an.norm_eval(norm, (abs(a), abs(b))) == na
            nsum = an.norm_eval(norm, (a + c, b + d))
            assert nsum <= na + an.norm_eval(norm, (c, d))

    @settings(max_examples=40, deadline=None)
    @given(a=coords, b=coords)
    def test_monotone_in_the_positive_cone(self, a, b):
        a, b = abs(a), abs(b)
        for norm in (FIG, L1, LINF):
            assert an.norm_eval(norm, (a, b)) >= an.norm_eval(
                norm, (a / 2, b)
            ) - an.norm_eval(norm, (a / 2, 0))


class TestDuality:
    def test_figure_dual_chain(self):
        dual = an.dual_norm(FIG)
        assert dual.cone_vertices == (
            _pt(1, 0),
            _pt(1, Fraction(1, 2)),
            _pt(Fraction(4, 5), Fraction(4, 5)),
            _pt(Fraction(1, 2), 1),
            _pt(0, 1),
        )

    def test_facet_functionals(self):
        assert an.facet_functionals(FIG) == [
            _pt(1, Fraction(1, 2)),
            _pt(Fraction(4, 5), Fraction(4, 5)),
            _pt(Fraction(1, 2), 1),
        ]

    def test_bipolar_identity(self):
        assert an.dual_norm(an.dual_norm(FIG)).cone_vertices == FIG.cone_vertices
        assert an.dual_norm(L1).p == "inf"
        assert an.dual_norm(LINF).p == 1
        assert an.dual_norm(L2).p == 2

    def test_duality_pairing_bound(self):
        dual = an.dual_norm(FIG)
        points = [_pt(1, 0), _pt(Fraction(3, 4), Fraction(1, 2)), _pt(2, 1)]
        functionals = [_pt(1, Fraction(1, 2)), _pt(Fraction(4, 5), Fraction(4, 5))]
        for x in points:
            for f in functionals:
                pairing = f[0] * x[0] + f[1] * x[1]
                assert pairing <= an.norm_eval(dual, f) * an.norm_eval(FIG, x)


class TestExtremePoints:
    def test_figure_has_twelve(self):
        ext = an.extreme_points(FIG)
        assert len(ext) == 12
        assert ext[:4] == [
            _pt(1, 0),
            _pt(Fraction(3, 4), Fraction(1, 2)),
            _pt(Fraction(1, 2), Fraction(3, 4)),
            _pt(0, 1),
        ]
        assert all(an.is_on_sphere(FIG, e) for e in ext)

    def test_axis_vertices_drop_when_facets_are_axis_parallel(self):
        assert _pt(1, 0) in an.extreme_points(L1)
        assert len(an.extreme_points(L1)) == 4
        assert _pt(1, 0) not in an.extreme_points(LINF)
        assert len(an.extreme_points(LINF)) == 4

    def test_strictly_convex_norms_are_refused(self):
        with pytest.raises(ValueError, match="not polyhedral"):
            an.extreme_points(L2)


class TestVPoints:
    def test_vertex_witness(self):
        x = _pt(Fraction(3, 4), Fraction(1, 2))
        witness = an.v_point_witness(FIG, x)
        assert witness == (_pt(Fraction(1, 2), Fraction(3, 4)), _pt(1, 0))
        y, z = witness
        assert an.norm_cmp(FIG, (x[0] + y[0], x[1] + y[1]), 2) == 0
        assert an.norm_cmp(FIG, (x[0] + z[0], x[1] + z[1]), 2) == 0
        assert an.norm_cmp(FIG, (y[0] + z[0], y[1] + z[1]), 2) == -1

    def test_facet_interior_points_are_not_v_points(self):
        assert an.v_point_witness(FIG, _pt(Fraction(5, 8), Fraction(5, 8))) is None
        assert not an.is_v_point(FIG, _pt(Fraction(5, 8), Fraction(5, 8)))
        assert not an.is_v_point_direction(L1, _pt(1, 1))
        assert an.is_v_point_direction(L1, _pt(1, 0))

    def test_strictly_convex_norms_have_none(self):
        assert an.v_point_witness(L2, _pt(Fraction(3, 5), Fraction(4, 5))) is None
        for direction in [_pt(1, 0), _pt(1, 1), _pt(2, 5)]:
            assert not an.is_v_point_direction(L2, direction)
        n32 = an.lp_norm(Fraction(3, 2))
        assert not an.is_v_point_direction(n32, _pt(3, 4))

    def test_off_sphere_points_are_rejected(self):
        with pytest.raises(ValueError, match="not on the unit sphere"):
            an.v_point_witness(FIG, _pt(Fraction(1, 2), Fraction(1, 2)))


class TestDecomposition:
    def test_facet_point_splits_through_its_endpoints(self):
        dec = an.vpoint_decomposition(FIG, _pt(Fraction(5, 8), Fraction(5, 8)))
        v1, v2, lam = dec
        assert dec == (
            _pt(Fraction(3, 4), Fraction(1, 2)),
            _pt(Fraction(1, 2), Fraction(3, 4)),
            Fraction(1, 2),
        )
        x = (lam * v1[0] + (1 - lam) * v2[0], lam * v1[1] + (1 - lam) * v2[1])
        assert x == _pt(Fraction(5, 8), Fraction(5, 8))

    def test_vertex_decomposes_degenerately(self):
        x = _pt(Fraction(3, 4), Fraction(1, 2))
        assert an.vpoint_decomposition(FIG, x) == (x, x, Fraction(1))

    def test_strictly_convex_points_do_not_decompose(self):
        assert an.vpoint_decomposition(L2, _pt(Fraction(3, 5), Fraction(4, 5))) is None

    def test_recombination_identity_across_the_positive_sphere(self):
        eighths = [Fraction(k, 8) for k in range(17)]
        checked = 0
        for a in eighths:
            for b in eighths:
                if (a, b) == (0, 0) or not an.is_on_sphere(FIG, (a, b)):
                    continue
                v1, v2, lam = an.vpoint_decomposition(FIG, (a, b))
                assert lam >= 0 and lam <= 1
                assert (lam * v1[0] + (1 - lam) * v2[0]) == a
                assert (lam * v1[1] + (1 - lam) * v2[1]) == b
                checked += 1
        assert checked >= 5


class TestTransfer:
    def test_true_across_the_figure_positive_sphere(self):
        spots = [
            _pt(1, 0),
            _pt(Fraction(7, 8), Fraction(1, 4)),
            _pt(Fraction(3, 4), Fraction(1, 2)),
            _pt(Fraction(5, 8), Fraction(5, 8)),
            _pt(Fraction(1, 2), Fraction(3, 4)),
            _pt(0, 1),
        ]
        for x in spots:
            assert an.transfer_predicate(FIG, x)

    def test_false_on_strictly_convex_spheres(self):
        assert not an.transfer_predicate(L2, _pt(Fraction(3, 5), Fraction(4, 5)))
        assert not an.transfer_predicate_direction(L2, _pt(1, 1))
        assert not an.transfer_predicate_direction(L2, _pt(1, 0))

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            an.transfer_predicate(FIG, _pt(-1, 0))
        with pytest.raises(ValueError):
            an.transfer_predicate_direction(FIG, _pt(0, 0))


class TestSupportingSlices:
    def test_vertex_case(self):
        x = _pt(Fraction(3, 4), Fraction(1, 2))
        rep = an.supporting_slice_construction(FIG, x)
        assert rep.case == "vertex"
        assert rep.functional == _pt(Fraction(9, 10), Fraction(13, 20))
        assert rep.alpha == Fraction(1, 32)
        assert rep.slice_extremes == [x]
        assert rep.verified

    def test_facet_case(self):
        rep = an.supporting_slice_construction(
            FIG, _pt(Fraction(5, 8), Fraction(5, 8))
        )
        assert rep.case == "facet"
        assert rep.functional == _pt(Fraction(4, 5), Fraction(4, 5))
        assert rep.alpha == Fraction(1, 32)
        assert sorted(rep.anchors) == [
            _pt(Fraction(1, 2), Fraction(3, 4)),
            _pt(Fraction(3, 4), Fraction(1, 2)),
        ]
        assert rep.verified

    def test_l1_vertex_and_linf_facet(self):
        rep = an.supporting_slice_construction(L1, _pt(1, 0))
        assert (rep.case, rep.functional, rep.alpha) == (
            "vertex",
            _pt(1, 0),
            Fraction(1, 2),
        )
        assert rep.verified
        rep = an.supporting_slice_construction(LINF, _pt(1, Fraction(1, 2)))
        assert (rep.case, rep.functional, rep.alpha) == (
            "facet",
            _pt(1, 0),
            Fraction(1, 4),
        )
        assert rep.anchors == (_pt(1, -1), _pt(1, 1))
        assert rep.verified

    def test_every_extreme_and_midpoint_verifies(self):
        ext = an.extreme_points(FIG)
        positive = [e for e in ext if e[0] >= 0 and e[1] >= 0]
        assert len(positive) == 4
        for e in positive:
            assert an.supporting_slice_construction(FIG, e).verified
        for e1, e2 in zip(positive, positive[1:]):
            mid = ((e1[0] + e2[0]) / 2, (e1[1] + e2[1]) / 2)
            value = an.norm_eval(FIG, mid)
            x = (mid[0] / value, mid[1] / value)
            assert an.supporting_slice_construction(FIG, x).verified

    def test_slice_extreme_points_threshold_is_strict(self):
        inside = an.slice_extreme_points(FIG, _pt(1, Fraction(1, 2)), Fraction(1, 4))
        assert _pt(1, 0) in inside and _pt(Fraction(3, 4), Fraction(1, 2)) in inside
        # <functional, (1/2, 3/4)> = 7/8 = 1 - 1/8 exactly: excluded.
        boundary = an.slice_extreme_points(
            FIG, _pt(1, Fraction(1, 2)), Fraction(1, 8)
        )
        assert _pt(Fraction(1, 2), Fraction(3, 4)) not in boundary

    def test_negative_cone_is_rejected(self):
        with pytest.raises(ValueError, match="positive cone"):
            an.supporting_slice_construction(FIG, _pt(0, -1))


class TestJson:
    def test_round_trips(self):
        for norm in (FIG, L1, L2, LINF, an.lp_norm(Fraction(3, 2))):
            assert an.norm_from_json(an.norm_to_json(norm)) == norm

    def test_frozen_documents(self):
        assert an.norm_to_json(FIG) == {
            "kind": "polyhedral",
            "cone_vertices": [
                ["1", "0"],
                ["3/4", "1/2"],
                ["1/2", "3/4"],
                ["0", "1"],
            ],
        }
        assert an.norm_to_json(an.lp_norm(Fraction(3, 2))) == {
            "kind": "lp",
            "p": "3/2",
        }
        assert an.norm_to_json(LINF) == {"kind": "lp", "p": "inf"}

    @pytest.mark.parametrize(
        "payload",
        [
            [],
            {},
            {"kind": "poly"},
            {"kind": "polyhedral"},
            {"kind": "polyhedral", "cone_vertices": [["1", "0"]]},
            {"kind": "polyhedral", "cone_vertices": [["1", "0"], ["0", "x"]]},
            {"kind": "lp"},
            {"kind": "lp", "p": "0"},
            {"kind": "lp", "p": "nan"},
        ],
    )
    def test_malformed_documents_raise(self, payload):
        with pytest.raises(ValueError):
            an.norm_from_json(payload)
