"""Tree geometry, projection identities, norming functions,
recombination, and the slice-separating witness."""

from __future__ import annotations

from fractions import Fraction
from random import Random

import pytest

import slicecert.freespace as fs
import slicecert.instances as ins
import slicecert.rtree as rt


def _make_tree() -> rt.WeightedTree:
    return rt.WeightedTree(
        vertices=("r", "a", "b", "c"),
        edges={
            ("r", "a"): Fraction(1),
            ("a", "b"): Fraction(2),
            ("a", "c"): Fraction(3, 2),
        },
        base="r",
    )


def _full_subset(tree: rt.WeightedTree) -> rt.RTreeSubset:
    return rt.RTreeSubset(
        tree=tree,
        members=frozenset(tree.vertices),
        full_edges=frozenset(tree.edges),
    )


@pytest.fixture
def tree() -> rt.WeightedTree:
    return _make_tree()


@pytest.fixture
def subset(tree) -> rt.RTreeSubset:
    return _full_subset(tree)


class TestTreeGeometry:
    def test_vertex_distances(self, tree):
        assert tree.vertex_distance("r", "b") == 3
        assert tree.vertex_distance("c", "b") == Fraction(7, 2)
        assert tree.vertex_distance("b", "c") == Fraction(7, 2)

    def test_edge_point_distances(self, tree):
        p = rt.edge_point(tree, "a", "b", Fraction(1, 2))
        q = rt.edge_point(tree, "a", "c", Fraction(1, 2))
        assert rt.tree_distance(tree, p, q) == 1
        assert rt.tree_distance(tree, p, rt.vertex_point("r")) == Fraction(3, 2)

    def test_walk_endpoints_and_interior(self, tree):
        x, y = rt.vertex_point("r"), rt.vertex_point("b")
        assert rt.walk_path(tree, x, y, Fraction(0)) == x
        assert rt.walk_path(tree, x, y, Fraction(3)) == y
        assert rt.walk_path(tree, x, y, Fraction(1)) == rt.vertex_point("a")
        mid = rt.walk_path(tree, x, y, Fraction(3, 2))
        assert mid == rt.edge_point(tree, "a", "b", Fraction(1, 2))

    def test_walk_between_points_sharing_a_junction(self, tree):
        # Both endpoints hang off the same vertex; the junction itself
        # is reached exactly at the shared arclength.
        p = rt.edge_point(tree, "a", "b", Fraction(1, 2))
        q = rt.edge_point(tree, "a", "c", Fraction(1, 2))
        assert rt.walk_path(tree, p, q, Fraction(1, 2)) == rt.vertex_point("a")

    def test_walk_rejects_arclengths_outside_the_segment(self, tree):
        x, y = rt.vertex_point("r"), rt.vertex_point("b")
        with pytest.raises(ValueError):
            rt.walk_path(tree, x, y, Fraction(-1))
        with pytest.raises(ValueError):
            rt.walk_path(tree, x, y, Fraction(4))

    def test_retract_projects_branches_to_the_junction(self, tree):
        x, y = rt.vertex_point("r"), rt.vertex_point("b")
        assert rt.retract(tree, x, y, rt.vertex_point("c")) == rt.vertex_point("a")
        on_segment = rt.edge_point(tree, "a", "b", Fraction(1, 2))
        assert rt.retract(tree, x, y, on_segment) == on_segment

    def test_retraction_identities_both_cases(self, tree):
        x, y = rt.vertex_point("r"), rt.vertex_point("b")
        distinct = rt.retraction_identities_check(
            tree, x, y, rt.vertex_point("r"), rt.vertex_point("c")
        )
        assert distinct.case == "distinct" and distinct.ok
        p = rt.edge_point(tree, "a", "c", Fraction(1, 4))
        q = rt.edge_point(tree, "a", "c", Fraction(5, 4))
        coincident = rt.retraction_identities_check(tree, x, y, p, q)
        assert coincident.case == "coincident" and coincident.ok

    def test_random_identities(self):
        rng = Random(11)
        for _ in range(25):
            tr = ins.random_weighted_tree(rng)
            pts = [ins.random_tree_point(rng, tr) for _ in range(4)]
            if rt.tree_distance(tr, pts[0], pts[1]) == 0:
                continue
            rep = rt.retraction_identities_check(tr, *pts)
            assert rep.ok, rep.details

    def test_tree_shape_validation(self):
        with pytest.raises(ValueError):
            rt.WeightedTree(vertices=("r",), edges={}, base="z")
        with pytest.raises(ValueError):
            rt.WeightedTree(
                vertices=("r", "a"), edges={("r", "a"): Fraction(0)}, base="r"
            )
        with pytest.raises(ValueError):
            rt.WeightedTree(
                vertices=("r", "a", "b"), edges={("r", "a"): Fraction(1)}, base="r"
            )


class TestSubset:
    def test_segment_containment(self, subset):
        assert rt.segment_in_subset(subset, "b", "c")
        partial = rt.RTreeSubset(
            tree=subset.tree,
            members=frozenset({"r", "a", "b"}),
            full_edges=frozenset({("r", "a")}),
        )
        assert rt.segment_in_subset(partial, "r", "a")
        assert not rt.segment_in_subset(partial, "r", "b")
        with pytest.raises(ValueError):
            rt.segment_in_subset(partial, "r", "c")

    def test_member_space_matches_tree_metric(self, subset):
        space = rt.member_space(subset)
        assert space.d("b", "c") == Fraction(7, 2)
        assert space.base == "r"

    def test_full_edge_validation(self, tree):
        with pytest.raises(ValueError):
            rt.RTreeSubset(
                tree=tree,
                members=frozenset({"r", "b"}),
                full_edges=frozenset({("r", "b")}),
            )
        with pytest.raises(ValueError):
            rt.RTreeSubset(
                tree=tree,
                members=frozenset({"r"}),
                full_edges=frozenset({("r", "a")}),
            )


class TestProjectionSplit:
    def test_hand_values(self, subset):
        space = rt.member_space(subset)
        m_br = fs.molecule(space, "b", "r")
        rep = rt.l_projection_split(subset, "r", "a", m_br)
        assert dict(rep.head.coeffs) == {"a": Fraction(1, 3)}
        assert (rep.norm_head, rep.norm_tail, rep.norm_total) == (
            Fraction(1, 3),
            Fraction(2, 3),
            Fraction(1),
        )
        assert rep.additive

    def test_cross_branch_split(self, subset):
        space = rt.member_space(subset)
        m_bc = fs.molecule(space, "b", "c")
        rep = rt.l_projection_split(subset, "a", "b", m_bc)
        assert (rep.norm_head, rep.norm_tail) == (Fraction(4, 7), Fraction(3, 7))
        assert rep.additive

    def test_random_splits_are_additive(self):
        rng = Random(23)
        for _ in range(25):
            tr = ins.random_weighted_tree(rng, min_vertices=3)
            sub = ins.full_subset(tr)
            space = rt.member_space(sub)
            mu = ins.random_free_element(rng, space)
            members = sorted(sub.members)
            x, y = rng.sample(members, 2)
            rep = rt.l_projection_split(sub, x, y, mu)
            assert rep.additive
            assert rep.norm_total == fs.free_norm(mu)

    def test_projection_must_land_on_members(self, tree):
        partial = rt.RTreeSubset(
            tree=tree, members=frozenset({"r", "b", "c"}), full_edges=frozenset()
        )
        space = rt.member_space(partial)
        mu = fs.molecule(space, "c", "r")
        with pytest.raises(ValueError):
            rt.l_projection_split(partial, "r", "b", mu)


class TestNormingFunction:
    def test_hand_values(self, subset):
        space = rt.member_space(subset)
        f = fs.mcshane_extend(space, {"b": Fraction(3), "r": Fraction(0)})
        combination = [(Fraction(1), "b", "r")]
        g = rt.g_mu_build(subset, combination, f)
        assert {p: g.values[p] for p in space.points} == {
            "a": Fraction(1),
            "b": Fraction(3),
            "c": Fraction(1),
            "r": Fraction(0),
        }
        mu = rt.combination_element(subset, combination)
        assert fs.eval_functional(g, mu) == 1
        assert fs.lip_norm(g) <= 1

    def test_rejects_non_norming_input(self, subset):
        space = rt.member_space(subset)
        zero = fs.mcshane_extend(space, {"r": Fraction(0)})
        with pytest.raises(ValueError):
            rt.g_mu_build(subset, [(Fraction(1), "b", "r")], zero)
        good = fs.mcshane_extend(space, {"b": Fraction(3), "r": Fraction(0)})
        with pytest.raises(ValueError):
            rt.g_mu_build(subset, [(Fraction(1, 2), "b", "r")], good)

    def test_slice_projection_witness(self, subset):
        space = rt.member_space(subset)
        f = fs.mcshane_extend(space, {"b": Fraction(3), "r": Fraction(0)})
        combination = [(Fraction(1), "b", "r")]
        g = rt.g_mu_build(subset, combination, f)
        res = rt.g_mu_property_check(
            subset, combination, g, "b", "r", Fraction(1, 4)
        )
        assert res.in_slice and res.witness == (0, 0) and res.ok
        vacuous = rt.g_mu_property_check(
            subset, combination, g, "r", "c", Fraction(1, 4)
        )
        assert not vacuous.in_slice and vacuous.ok and vacuous.witness is None

    def test_random_instances_admit_witnesses(self):
        rng = Random(31)
        for _ in range(20):
            tr = ins.random_weighted_tree(rng, min_vertices=3)
            sub = ins.full_subset(tr)
            inst = ins.path_aligned_instance(rng, sub)
            assert inst is not None
            combination, f = inst
            g = rt.g_mu_build(sub, combination, f)
            alpha = ins.random_slice_width(rng)
            for _, xi, yi in combination:
                res = rt.g_mu_property_check(sub, combination, g, xi, yi, alpha)
                assert res.in_slice and res.ok


class TestRecombination:
    def test_hand_instance(self, subset):
        combination = [
            (Fraction(1, 2), "b", "a"),
            (Fraction(1, 2), "a", "r"),
        ]
        res = rt.recombine(subset, combination)
        assert res.combination == [
            (Fraction(1, 2), "b", "a"),
            (Fraction(1, 2), "a", "r"),
        ]
        assert res.element_preserved and res.property2_ok

    def test_overlapping_segments_are_cut(self, subset):
        combination = [
            (Fraction(1, 2), "b", "r"),
            (Fraction(1, 2), "a", "r"),
        ]
        res = rt.recombine(subset, combination)
        assert res.element_preserved and res.property2_ok
        mu = rt.combination_element(subset, combination)
        assert fs.free_norm(mu) == 1
        # Every output segment projects cleanly onto every other.
        for _, u, v in res.combination:
            assert rt.segment_in_subset(subset, u, v)

    def test_cancelling_combination_is_refused(self, subset):
        with pytest.raises(ValueError):
            rt.recombine(
                subset,
                [(Fraction(1, 2), "b", "a"), (Fraction(1, 2), "a", "b")],
            )

    def test_succeeds_exactly_on_the_unit_sphere(self):
        rng = Random(41)
        seen_refusal = False
        for _ in range(40):
            tr = ins.random_weighted_tree(rng, min_vertices=3)
            sub = ins.full_subset(tr)
            combination = ins.random_combination(rng, sub)
            assert combination is not None
            mu = rt.combination_element(sub, combination)
            norm = fs.free_norm(mu)
            try:
                res = rt.recombine(sub, combination)
            except ValueError:
                seen_refusal = True
                assert norm != 1
                continue
            assert norm == 1
            assert res.element_preserved and res.property2_ok
        assert seen_refusal

    def test_weight_validation(self, subset):
        with pytest.raises(ValueError):
            rt.recombine(subset, [])
        with pytest.raises(ValueError):
            rt.recombine(subset, [(Fraction(1, 2), "b", "r")])
        with pytest.raises(ValueError):
            rt.recombine(subset, [(Fraction(1), "b", "b")])


class TestDaugavetWitness:
    def _instance(self, subset):
        space = rt.member_space(subset)
        f = fs.mcshane_extend(space, {"b": Fraction(3), "r": Fraction(0)})
        mu = fs.molecule(space, "b", "r")
        return space, f, mu

    def test_hand_values(self, subset):
        _, f, mu = self._instance(subset)
        rep = rt.daugavet_witness_h(subset, mu, f, "r", "c", Fraction(1, 8))
        assert rep.g_mu == 0
        assert rep.obstruction is None
        assert rep.lip_one
        assert rep.h_mu == 1
        assert rep.g_values["c"] == Fraction(7, 4)
        assert rep.h.values["c"] == Fraction(5, 4)
        # gap = 2 - 4 eps and the pushed molecule sits at 1 - 4 eps.
        assert rep.gap == Fraction(3, 2)
        assert rep.h_m_yx == Fraction(1, 2)

    def test_easy_case_raises(self, subset):
        _, f, mu = self._instance(subset)
        for y in ("a", "b"):
            with pytest.raises(ValueError, match="easy case"):
                rt.daugavet_witness_h(subset, mu, f, "r", y, Fraction(1, 8))

    def test_precondition_validation(self, subset):
        space, f, mu = self._instance(subset)
        with pytest.raises(ValueError):
            rt.daugavet_witness_h(subset, mu, f, "r", "c", Fraction(1, 2))
        with pytest.raises(ValueError):
            rt.daugavet_witness_h(subset, mu, f, "a", "c", Fraction(1, 8))
        not_norming = fs.mcshane_extend(space, {"r": Fraction(0)})
        with pytest.raises(ValueError):
            rt.daugavet_witness_h(subset, mu, not_norming, "r", "c", Fraction(1, 8))
        small = fs.scale_element(mu, Fraction(1, 2))
        with pytest.raises(ValueError):
            rt.daugavet_witness_h(subset, small, f, "r", "c", Fraction(1, 8))

    def test_identities_whenever_unobstructed(self):
        rng = Random(53)
        exercised = 0
        for _ in range(30):
            tr = ins.random_weighted_tree(rng, min_vertices=3)
            sub = ins.full_subset(tr)
            inst = ins.path_aligned_instance(rng, sub)
            assert inst is not None
            combination, f = inst
            mu = rt.combination_element(sub, combination)
            eps = ins.random_epsilon(rng)
            space = rt.member_space(sub)
            base = sub.tree.base
            for y in sorted(sub.members):
                if y == base:
                    continue
                if (1 - 4 * eps) * space.d(base, y) - f.values[y] <= 0:
                    continue
                rep = rt.daugavet_witness_h(sub, mu, f, base, y, eps)
                exercised += 1
                assert fs.lip_norm(rep.h) <= 1
                assert rep.h_m_yx == 1 - 4 * eps
                if rep.g_mu == 0:
                    assert rep.lip_one
                    assert rep.h_mu == 1
                    assert rep.gap == 2 - 4 * eps
                else:
                    assert rep.obstruction is not None
                break
        assert exercised >= 10


class TestJson:
    def test_tree_round_trip(self, tree):
        back = rt.tree_from_json(rt.tree_to_json(tree))
        assert set(back.vertices) == set(tree.vertices)
        assert back.edges == tree.edges
        assert back.base == tree.base

    def test_subset_round_trip(self, subset):
        back = rt.subset_from_json(rt.subset_to_json(subset))
        assert back.members == subset.members
        assert back.full_edges == subset.full_edges

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda doc: doc.pop("base"),
            lambda doc: doc["edges"].append(["r", "c", "1"]),
            lambda doc: doc["edges"][0].__setitem__(2, "-1"),
            lambda doc: doc["edges"][0].__setitem__(2, "x"),
            lambda doc: doc.__setitem__("vertices", ["r"]),
        ],
    )
    def test_malformed_tree_documents_raise(self, tree, mutate):
        doc = rt.tree_to_json(tree)
        mutate(doc)
        with pytest.raises(ValueError):
            rt.tree_from_json(doc)

    def test_malformed_subset_documents_raise(self, subset):
        doc = rt.subset_to_json(subset)
        doc["members"].append("zz")
        with pytest.raises(ValueError):
            rt.subset_from_json(doc)
