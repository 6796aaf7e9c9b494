"""End-to-end acceptance gate.

Each test exercises one advertised capability of the package at its full
budget, records a PASS/FAIL line for the terminal summary, and asserts
the exact claims.  Budgets are wall-clock bounds measured around the
whole computation.
"""

from __future__ import annotations

import json
import time
from fractions import Fraction
from random import Random

import slicecert.absnorm as an
import slicecert.freespace as fs
import slicecert.instances as ins
import slicecert.suites as su

from conftest import record_criterion


def _check(report: dict, name: str) -> dict:
    matches = [c for c in report["checks"] if c["name"] == name]
    assert matches, f"missing check {name!r}"
    return matches[0]


class TestCriterion1:
    def test_transport_duality_on_random_spaces(self):
        ok = False
        try:
            start = time.monotonic()
            rng = Random(2024)
            spaces = 0
            pairs = 0
            while spaces < 200:
                space = ins.random_metric_space(rng)
                assert len(space.points) <= 8
                for p, q in space.pairs():
                    diff = fs.element_from_coeffs(
                        space, {p: Fraction(1), q: Fraction(-1)}
                    )
                    value, potential = fs.free_norm_certificate(diff)
                    assert value == space.d(p, q)
                    assert fs.lip_norm(potential) <= 1
                    assert fs.eval_functional(potential, diff) == value
                    assert fs.free_norm(fs.molecule(space, p, q)) == 1
                    pairs += 1
                spaces += 1
            elapsed = time.monotonic() - start
            assert spaces >= 200 and pairs >= 200
            assert elapsed <= 30, f"took {elapsed:.1f}s"
            ok = True
        finally:
            record_criterion(
                1, "exact transport duality on 200 random spaces", ok
            )
        assert ok


class TestCriterion2:
    def test_first_grid_family_level_three_claims(self):
        ok = False
        try:
            start = time.monotonic()
            report = su.example_a_report(3)
            claims = report["claims"]
            distance = Fraction(claims["m_xy_m_uv_distance"]["exact"])
            assert distance < 2
            assert claims["m_xy_m_uv_distance_below_two"] is True
            assert claims["other_denting_distances_exactly_two"] is True
            assert claims["functional_norm"]["exact"] == "1"
            assert claims["functional_norm_is_one"] is True
            assert claims["functional_value_on_m_uv"]["exact"] == "0"
            assert claims["m_uv_outside_slice"] is True
            assert report["denting_pairs"] == 34
            rows = report["denting_table"]
            assert len(rows) == 34
            assert (
                sum(1 for r in rows if Fraction(r["distance"]["exact"]) == 2)
                == 33
            )
            assert report["ok"] is True
            elapsed = time.monotonic() - start
            assert elapsed <= 60, f"took {elapsed:.1f}s"
            ok = True
        finally:
            record_criterion(
                2, "level-3 grid family separates one denting direction", ok
            )
        assert ok


class TestCriterion3:
    def test_second_grid_family_level_four_slices(self):
        ok = False
        try:
            report = su.example_b_report(4, samples=20, seed=0)
            pairs = report["adjacent_pairs"]
            assert pairs and all(2 <= row["row"] <= 4 for row in pairs)
            assert all(row["certified"] for row in pairs)
            assert all(
                Fraction(row["distance"]["exact"]) < 2 for row in pairs
            )
            assert report["all_pairs_certified_below_two"] is True
            slices = report["sampled_slices"]
            assert len(slices) == 20
            assert all(entry["hit"] is not None for entry in slices)
            assert report["every_slice_contains_a_pair"] is True
            assert report["ok"] is True
            ok = True
        finally:
            record_criterion(
                3, "level-4 grid family keeps adjacent pairs in slices", ok
            )
        assert ok


class TestCriterion4:
    def test_tree_projection_and_witness_suite(self):
        ok = False
        try:
            report = su.rtree_suite()
            identities = _check(report, "projection-identities-hold")
            assert identities["ok"] and identities["count"] >= 200
            splits = _check(
                report, "linearized-projection-splits-norms-additively"
            )
            assert splits["ok"] and splits["count"] >= 200
            norming = _check(report, "norming-function-attains-one")
            assert norming["ok"] and norming["count"] >= 100
            witnesses = _check(
                report, "slice-molecules-admit-projection-witnesses"
            )
            assert witnesses["ok"] and witnesses["witnessed"] >= 100
            recombine = _check(
                report, "recombination-preserves-aligned-combinations"
            )
            assert recombine["ok"]
            sphere = _check(
                report, "recombination-succeeds-exactly-on-the-sphere"
            )
            assert sphere["ok"] and sphere["succeeded"] >= 1
            witness = _check(report, "slice-separating-witness-identities")
            assert witness["ok"] and witness["exercised"] >= 1
            assert report["ok"] is True
            ok = True
        finally:
            record_criterion(
                4, "tree projections, norming functions, witnesses", ok
            )
        assert ok


class TestCriterion5:
    def test_plane_norm_suite(self):
        ok = False
        try:
            report = su.absnorm_suite()
            enum = _check(report, "polyhedral-extreme-points-enumerate")
            assert enum["ok"] and enum["l1_count"] == 4 and enum["linf_count"] == 4
            figure = _check(report, "figure-norm-cone-vertices-and-v-points")
            assert figure["ok"] and figure["extreme_count"] == 12
            assert len(an.FIGURE_ALPHA_VERTICES) == 4
            smooth = _check(report, "strictly-convex-norms-have-no-v-points")
            assert smooth["ok"] and smooth["count"] >= 150
            assert _check(report, "direct-sum-transfer-predicate")["ok"]
            assert _check(report, "bipolar-identity")["ok"]
            slices = _check(report, "supporting-slices-pin-their-extremes")
            assert slices["ok"] and slices["count"] >= 8
            assert report["ok"] is True
            ok = True
        finally:
            record_criterion(
                5, "plane norm extreme structure and slice transfer", ok
            )
        assert ok


class TestCriterion6:
    def test_dyadic_span_suite(self):
        ok = False
        try:
            start = time.monotonic()
            report = su.dyadic_suite()
            units = _check(report, "unit-norms-at-every-node")
            assert units["ok"]
            assert units["f_count"] == units["h_count"] == 126
            formula = _check(report, "closed-norm-formula-matches-integration")
            assert formula["ok"] and formula["count"] >= 500
            assert formula["depth"] == 5
            cascade = _check(report, "cascade-inequality")
            assert cascade["ok"] and cascade["count"] >= 1000
            tightness = _check(
                report, "concentration-bound-with-exact-tightness"
            )
            assert tightness["ok"] and tightness["tight_cases"] >= 1
            assert _check(report, "martingale-identity-and-level-isometry")["ok"]
            separation = _check(report, "separation-functional-case-table")
            assert separation["ok"] and separation["count"] >= 100
            exposure = _check(report, "exposed-slices-stay-close")
            assert exposure["ok"] and exposure["budget"] >= 100
            near = _check(report, "every-attained-slice-contains-a-near-step")
            assert near["ok"] and near["count"] >= 20
            diametral = _check(report, "distance-two-witnesses-inside-slices")
            assert diametral["ok"] and diametral["count"] >= 20
            assert report["ok"] is True
            elapsed = time.monotonic() - start
            assert elapsed <= 300, f"took {elapsed:.1f}s"
            ok = True
        finally:
            record_criterion(
                6, "dyadic span geometry and both slice witnesses", ok
            )
        assert ok


class TestCriterion7:
    def test_reports_are_byte_identical(self):
        ok = False
        try:
            first = su.run_suites(list(su.SUITE_ORDER), seed=42)
            second = su.run_suites(list(su.SUITE_ORDER), seed=42)
            blob_a = json.dumps(first, sort_keys=True, indent=2)
            blob_b = json.dumps(second, sort_keys=True, indent=2)
            assert blob_a == blob_b
            assert first["ok"] is True
            ok = True
        finally:
            record_criterion(7, "seeded reports serialize byte-identically", ok)
        assert ok
