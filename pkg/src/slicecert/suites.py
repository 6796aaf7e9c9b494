"""Deterministic check suites and example report builders.

Each suite runs a fixed list of named checks, drawing randomized
instances from a seeded generator, and returns a JSON-ready report::

    {"suite": ..., "seed": ..., "samples": ..., "checks": [...],
     "counts": {"checks": n, "passed": m}, "ok": bool}

Check rows carry only JSON-safe values.  Exact rational quantities are
``{"exact": "p/q", "approx": "<20-digit decimal>"}`` pairs; the decimal
member is always an approximation, the exact member is authoritative.
Reports are pure functions of (suite, seed, sample counts), so a rerun
with the same arguments serializes byte-identically.
"""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from random import Random

from . import absnorm as an
from . import dyadic as dy
from . import freespace as fs
from . import instances as ins
from . import metric as me
from . import rtree as rt
from .rational import fmt_rat


def _approx(x: Fraction) -> str:
    with localcontext() as ctx:
        ctx.prec = 20
        return str(Decimal(x.numerator) / Decimal(x.denominator))


def _rat(x: Fraction) -> dict:
    return {"exact": fmt_rat(x), "approx": _approx(x)}


def _check(name: str, ok: bool, **fields: object) -> dict:
    row: dict = {"name": name, "ok": bool(ok)}
    row.update(fields)
    return row


def _finish(suite: str, seed: int, samples: int | None, checks: list[dict]) -> dict:
    passed = sum(1 for c in checks if c["ok"])
    return {
        "suite": suite,
        "seed": seed,
        "samples": samples,
        "checks": checks,
        "counts": {"checks": len(checks), "passed": passed},
        "ok": passed == len(checks),
    }


def _failures(items: list[str], cap: int = 3) -> list[str]:
    return items[:cap]


# ---------------------------------------------------------------------------
# metric


def metric_suite(seed: int = 0, samples: int | None = None) -> dict:
    """Axioms on random shortest-path spaces, the grid families, and the
    JSON round trip."""
    n = samples or 100
    rng = Random(seed)
    checks: list[dict] = []

    spaces = [ins.random_metric_space(rng) for _ in range(n)]
    bad = [
        f"space {i}: {rep.kind}"
        for i, sp in enumerate(spaces)
        if not (rep := me.validate_metric(sp)).ok
    ]
    checks.append(
        _check(
            "random-shortest-path-spaces-satisfy-axioms",
            not bad,
            count=n,
            failures=_failures(bad),
        )
    )

    a3 = me.example_space_a(3)
    frozen_ok = (
        me.validate_metric(a3).ok
        and a3.d(a3.x, a3.u) == Fraction(1, 2)
        and a3.d(a3.x, "1,1/4") == Fraction(5, 4)
        and a3.d(a3.x, a3.y) == 1
        and len(a3.points) == 18
    )
    checks.append(
        _check(
            "first-grid-family-level-3",
            frozen_ok,
            points=len(a3.points),
            d_x_u=_rat(a3.d(a3.x, a3.u)),
        )
    )

    b4 = me.example_space_b(4)
    rows_ok = [len(b4.rows[r]) for r in sorted(b4.rows)] == [2, 2, 3, 5, 9]
    checks.append(
        _check(
            "second-grid-family-level-4",
            me.validate_metric(b4).ok and rows_ok and len(b4.points) == 21,
            points=len(b4.points),
            row_sizes=[len(b4.rows[r]) for r in sorted(b4.rows)],
        )
    )

    seg_bad: list[str] = []
    for space in (a3, b4):
        for r in sorted(space.rows):
            if r == 0:
                continue
            row = space.rows[r]
            for p, q in zip(row, row[1:]):
                if me.metric_segment(space, p, q) != frozenset({p, q}):
                    seg_bad.append(f"{p}|{q}")
            for p, q in zip(row, row[2:]):
                if me.metric_segment(space, p, q) == frozenset({p, q}):
                    seg_bad.append(f"non-adjacent {p}|{q}")
    checks.append(
        _check(
            "row-segments-are-trivial-exactly-for-adjacent-pairs",
            not seg_bad,
            failures=_failures(seg_bad),
        )
    )

    tampered = me.space_to_json(spaces[0])
    if len(spaces[0].points) >= 3:
        tampered["dist"][0][1] = "1000000"
        tampered["dist"][1][0] = "1000000"
        broken = me.space_from_json(tampered)
        axiom_flagged = (rep := me.validate_metric(broken)).kind == "axiom"
    else:
        axiom_flagged = True
    malformed_rejected = False
    try:
        me.space_from_json({"points": ["a"], "base": "a"})
    except ValueError:
        malformed_rejected = True
    checks.append(
        _check(
            "validation-flags-axiom-breaks-and-malformed-documents",
            axiom_flagged and malformed_rejected,
        )
    )

    rt_bad: list[str] = []
    for i, sp in enumerate(spaces[: min(n, 25)]):
        back = me.space_from_json(me.space_to_json(sp))
        if back.points != sp.points or any(
            back.d(p, q) != sp.d(p, q) for p, q in sp.pairs()
        ):
            rt_bad.append(f"space {i}")
    checks.append(
        _check("space-json-round-trip", not rt_bad, failures=_failures(rt_bad))
    )

    return _finish("metric", seed, samples, checks)


# ---------------------------------------------------------------------------
# freespace


def freespace_suite(seed: int = 0, samples: int | None = None) -> dict:
    """Transport duality certificates, unit molecules, the extension
    operator, and the first grid example's distance table."""
    n = samples or 200
    rng = Random(seed)
    checks: list[dict] = []

    spaces = [ins.random_metric_space(rng) for _ in range(n)]
    elements = [ins.random_free_element(rng, sp) for sp in spaces]

    dual_bad: list[str] = []
    for i, (sp, el) in enumerate(zip(spaces, elements)):
        value, potential = fs.free_norm_certificate(el)
        if fs.lip_norm(potential) > 1 or fs.eval_functional(potential, el) != value:
            dual_bad.append(f"instance {i}")
    checks.append(
        _check(
            "transport-norm-matches-dual-certificate",
            not dual_bad,
            count=n,
            failures=_failures(dual_bad),
        )
    )

    pair_bad: list[str] = []
    molecule_bad: list[str] = []
    pair_count = 0
    for i, sp in enumerate(spaces):
        for p, q in sp.pairs():
            pair_count += 1
            diff = fs.element_from_coeffs(sp, {p: Fraction(1), q: Fraction(-1)})
            if fs.free_norm(diff) != sp.d(p, q):
                pair_bad.append(f"space {i}: {p}|{q}")
            if fs.free_norm(fs.molecule(sp, p, q)) != 1:
                molecule_bad.append(f"space {i}: {p}|{q}")
    checks.append(
        _check(
            "point-difference-norms-equal-distances",
            not pair_bad,
            count=pair_count,
            failures=_failures(pair_bad),
        )
    )
    checks.append(
        _check(
            "molecules-have-unit-norm",
            not molecule_bad,
            count=pair_count,
            failures=_failures(molecule_bad),
        )
    )

    ext_bad: list[str] = []
    for i, sp in enumerate(spaces[: min(n, 50)]):
        others = [p for p in sp.points if p != sp.base]
        anchor = rng.choice(others)
        f = ins.supporting_functional(rng, sp, anchor, sp.base)
        if fs.lip_norm(f) > 1:
            ext_bad.append(f"space {i}: extension inflated the constant")
        if fs.eval_functional(f, fs.molecule(sp, anchor, sp.base)) != 1:
            ext_bad.append(f"space {i}: extension lost the attained pair")
    checks.append(
        _check(
            "largest-lipschitz-extension-preserves-attained-pairs",
            not ext_bad,
            failures=_failures(ext_bad),
        )
    )

    a3 = me.example_space_a(3)
    report = example_a_report(3)
    checks.append(
        _check(
            "first-grid-example-level-3-claims",
            report["ok"],
            m_xy_m_uv_distance=report["claims"]["m_xy_m_uv_distance"],
            certified_pairs=report["denting_pairs"],
        )
    )

    el = ins.random_free_element(rng, a3)
    back = fs.element_from_json(a3, fs.element_to_json(el))
    f_rand = ins.supporting_functional(rng, a3, a3.y, a3.x)
    f_back = fs.function_from_json(a3, fs.function_to_json(f_rand))
    checks.append(
        _check(
            "element-and-function-json-round-trip",
            back.coeffs == el.coeffs and f_back.values == f_rand.values,
        )
    )

    return _finish("freespace", seed, samples, checks)


# ---------------------------------------------------------------------------
# rtree


def rtree_suite(seed: int = 0, samples: int | None = None) -> dict:
    """Projection identities, splitting additivity, norming functions,
    recombination, and the slice-separation witness on random trees."""
    n_identity = samples or 200
    n_norming = samples or 120
    n_mixed = samples or 100
    rng = Random(seed)
    checks: list[dict] = []

    ident_bad: list[str] = []
    for i in range(n_identity):
        tree = ins.random_weighted_tree(rng)
        x = ins.random_tree_point(rng, tree)
        y = ins.random_tree_point(rng, tree)
        if rt.tree_distance(tree, x, y) == 0:
            y = rt.vertex_point(
                next(v for v in sorted(tree.vertices) if rt.tree_distance(tree, x, rt.vertex_point(v)) > 0)
            )
        p = ins.random_tree_point(rng, tree)
        q = ins.random_tree_point(rng, tree)
        rep = rt.retraction_identities_check(tree, x, y, p, q)
        if not rep.ok:
            ident_bad.append(f"instance {i}: {rep.case}")
    checks.append(
        _check(
            "projection-identities-hold",
            not ident_bad,
            count=n_identity,
            failures=_failures(ident_bad),
        )
    )

    split_bad: list[str] = []
    for i in range(n_identity):
        tree = ins.random_weighted_tree(rng)
        subset = ins.random_subset(rng, tree)
        space = rt.member_space(subset)
        mu = ins.random_free_element(rng, space)
        members = sorted(subset.members)
        x = rng.choice(members)
        y = rng.choice([v for v in members if v != x]) if len(members) > 1 else x
        if x == y:
            continue
        rep = rt.l_projection_split(subset, x, y, mu)
        if not rep.additive or rep.norm_total != fs.free_norm(mu):
            split_bad.append(f"instance {i}")
    checks.append(
        _check(
            "linearized-projection-splits-norms-additively",
            not split_bad,
            count=n_identity,
            failures=_failures(split_bad),
        )
    )

    norming_bad: list[str] = []
    witness_bad: list[str] = []
    witnessed = 0
    for i in range(n_norming):
        tree = ins.random_weighted_tree(rng, min_vertices=3)
        subset = ins.full_subset(tree)
        inst = ins.path_aligned_instance(rng, subset)
        assert inst is not None
        combination, f = inst
        mu = rt.combination_element(subset, combination)
        g = rt.g_mu_build(subset, combination, f)
        if fs.eval_functional(g, mu) != 1 or fs.lip_norm(g) > 1:
            norming_bad.append(f"instance {i}")
            continue
        alpha = ins.random_slice_width(rng)
        for _, xi, yi in combination:
            res = rt.g_mu_property_check(subset, combination, g, xi, yi, alpha)
            if not res.in_slice:
                witness_bad.append(f"instance {i}: atom molecule left the slice")
            elif not res.ok:
                witness_bad.append(f"instance {i}: no witness for ({xi}, {yi})")
            else:
                witnessed += 1
        members = sorted(subset.members)
        u = rng.choice(members)
        v = rng.choice([w for w in members if w != u])
        res = rt.g_mu_property_check(subset, combination, g, u, v, alpha)
        if res.in_slice and not res.ok:
            witness_bad.append(f"instance {i}: no witness for sampled pair")
    checks.append(
        _check(
            "norming-function-attains-one",
            not norming_bad,
            count=n_norming,
            failures=_failures(norming_bad),
        )
    )
    checks.append(
        _check(
            "slice-molecules-admit-projection-witnesses",
            not witness_bad and witnessed >= n_norming,
            witnessed=witnessed,
            failures=_failures(witness_bad),
        )
    )

    recomb_bad: list[str] = []
    for i in range(n_mixed):
        tree = ins.random_weighted_tree(rng, min_vertices=3)
        subset = ins.full_subset(tree)
        inst = ins.path_aligned_instance(rng, subset)
        assert inst is not None
        combination, _ = inst
        res = rt.recombine(subset, combination)
        if not (res.element_preserved and res.property2_ok):
            recomb_bad.append(f"instance {i}")
    checks.append(
        _check(
            "recombination-preserves-aligned-combinations",
            not recomb_bad,
            count=n_mixed,
            failures=_failures(recomb_bad),
        )
    )

    deficit_bad: list[str] = []
    succeeded = 0
    refused = 0
    for i in range(n_mixed):
        tree = ins.random_weighted_tree(rng, min_vertices=3)
        subset = ins.full_subset(tree)
        combination = ins.random_combination(rng, subset)
        assert combination is not None
        mu = rt.combination_element(subset, combination)
        norm = fs.free_norm(mu)
        try:
            res = rt.recombine(subset, combination)
        except ValueError:
            refused += 1
            if norm == 1:
                deficit_bad.append(f"instance {i}: refused a norm-one combination")
            continue
        succeeded += 1
        if norm != 1:
            deficit_bad.append(f"instance {i}: accepted a norm-deficient combination")
        if not (res.element_preserved and res.property2_ok):
            deficit_bad.append(f"instance {i}: bad output")
    checks.append(
        _check(
            "recombination-succeeds-exactly-on-the-sphere",
            not deficit_bad,
            count=n_mixed,
            succeeded=succeeded,
            refused=refused,
            failures=_failures(deficit_bad),
        )
    )

    witness_fail: list[str] = []
    exercised = 0
    obstructed = 0
    for i in range(n_mixed):
        tree = ins.random_weighted_tree(rng, min_vertices=3)
        subset = ins.full_subset(tree)
        inst = ins.path_aligned_instance(rng, subset)
        assert inst is not None
        combination, f = inst
        mu = rt.combination_element(subset, combination)
        eps = ins.random_epsilon(rng)
        base = subset.tree.base
        for y in sorted(subset.members):
            if y == base:
                continue
            space = rt.member_space(subset)
            cap = (1 - 4 * eps) * space.d(base, y) - f.values[y]
            if cap <= 0:
                continue
            rep = rt.daugavet_witness_h(subset, mu, f, base, y, eps)
            exercised += 1
            if fs.lip_norm(rep.h) > 1:
                witness_fail.append(f"instance {i}: witness left the dual ball")
            if rep.h_m_yx != 1 - 4 * eps:
                witness_fail.append(f"instance {i}: pushed molecule value drifted")
            if rep.g_mu == 0:
                if not rep.lip_one or rep.gap != 2 - 4 * eps or rep.h_mu != 1:
                    witness_fail.append(f"instance {i}: gap identity failed")
            else:
                obstructed += 1
                if rep.obstruction is None:
                    witness_fail.append(f"instance {i}: silent obstruction")
            break
    checks.append(
        _check(
            "slice-separating-witness-identities",
            not witness_fail and exercised > 0,
            exercised=exercised,
            obstructed=obstructed,
            failures=_failures(witness_fail),
        )
    )

    tree = ins.random_weighted_tree(rng, min_vertices=4)
    subset = ins.random_subset(rng, tree)
    tree_back = rt.tree_from_json(rt.tree_to_json(tree))
    subset_back = rt.subset_from_json(rt.subset_to_json(subset))
    round_ok = (
        set(tree_back.vertices) == set(tree.vertices)
        and tree_back.edges == tree.edges
        and subset_back.members == subset.members
        and subset_back.full_edges == subset.full_edges
    )
    checks.append(_check("tree-json-round-trip", round_ok))

    return _finish("rtree", seed, samples, checks)


# ---------------------------------------------------------------------------
# absnorm


def absnorm_suite(seed: int = 0, samples: int | None = None) -> dict:
    """Extreme points, v-points, duality, and supporting slices of
    absolute plane norms."""
    n = samples or 50
    rng = Random(seed)
    checks: list[dict] = []

    l1 = an.named_norm("l1")
    linf = an.named_norm("linf")
    l2 = an.named_norm("l2")
    figure = an.named_norm("figure-alpha")

    l1_ext = an.extreme_points(l1)
    linf_ext = an.extreme_points(linf)
    enum_ok = (
        len(l1_ext) == 4
        and len(linf_ext) == 4
        and all(an.is_v_point(l1, e) for e in l1_ext)
        and all(an.is_v_point(linf, e) for e in linf_ext)
        and not an.is_v_point(l1, (Fraction(1, 2), Fraction(1, 2)))
        and not an.is_v_point(linf, (Fraction(1), Fraction(0)))
    )
    checks.append(
        _check(
            "polyhedral-extreme-points-enumerate",
            enum_ok,
            l1_count=len(l1_ext),
            linf_count=len(linf_ext),
        )
    )

    fig_ext = an.extreme_points(figure)
    fig_ok = (
        figure.cone_vertices == an.FIGURE_ALPHA_VERTICES
        and len(fig_ext) == 12
        and all(an.is_v_point(figure, e) for e in fig_ext)
    )
    checks.append(
        _check(
            "figure-norm-cone-vertices-and-v-points",
            fig_ok,
            extreme_count=len(fig_ext),
        )
    )

    lp_bad: list[str] = []
    for p in (Fraction(3, 2), Fraction(2), Fraction(3)):
        norm = an.lp_norm(p)
        for i in range(n):
            direction = ins.random_positive_direction(rng)
            if rng.random() < 0.5:
                direction = (direction[0], -direction[1])
            if an.is_v_point_direction(norm, direction):
                lp_bad.append(f"p={p}: direction {direction}")
    checks.append(
        _check(
            "strictly-convex-norms-have-no-v-points",
            not lp_bad,
            count=3 * n,
            failures=_failures(lp_bad),
        )
    )

    transfer_bad: list[str] = []
    probes = list(fig_ext[:4])
    probes += [
        (Fraction(7, 8), Fraction(1, 4)),
        (Fraction(5, 8), Fraction(5, 8)),
        (Fraction(1, 4), Fraction(7, 8)),
    ]
    for pt in probes:
        if not an.transfer_predicate(figure, pt):
            transfer_bad.append(f"figure point {pt}")
    for _ in range(n):
        direction = ins.random_positive_direction(rng, strict=False)
        if not an.transfer_predicate_direction(figure, direction):
            transfer_bad.append(f"figure direction {direction}")
    for _ in range(n):
        direction = ins.random_positive_direction(rng, strict=True)
        if an.transfer_predicate_direction(l2, direction):
            transfer_bad.append(f"round direction {direction}")
    if an.transfer_predicate(l2, (Fraction(3, 5), Fraction(4, 5))):
        transfer_bad.append("round rational sphere point")
    checks.append(
        _check(
            "direct-sum-transfer-predicate",
            not transfer_bad,
            failures=_failures(transfer_bad),
        )
    )

    bipolar_ok = (
        an.dual_norm(an.dual_norm(figure)).cone_vertices == figure.cone_vertices
        and an.as_polyhedral(an.dual_norm(an.dual_norm(l1))).cone_vertices
        == an.as_polyhedral(l1).cone_vertices
        and an.dual_norm(an.dual_norm(l2)).p == 2
        and an.dual_norm(an.lp_norm(Fraction(3, 2))).p == 3
        and an.dual_norm(an.lp_norm(3)).p == Fraction(3, 2)
    )
    checks.append(_check("bipolar-identity", bipolar_ok))

    slice_bad: list[str] = []
    slice_count = 0
    for norm, label in ((figure, "figure"), (l1, "l1"), (linf, "linf")):
        poly = an.as_polyhedral(norm)
        ext = an.extreme_points(poly)
        for e in ext:
            slice_count += 1
            if e[0] < 0 or e[1] < 0:
                continue
            rep = an.supporting_slice_construction(poly, e)
            if not (rep.case == "vertex" and rep.verified):
                slice_bad.append(f"{label} vertex {e}")
        m = len(ext)
        for i in range(m):
            a, b = ext[i], ext[(i + 1) % m]
            mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
            if mid[0] < 0 or mid[1] < 0:
                continue
            slice_count += 1
            rep = an.supporting_slice_construction(poly, mid)
            if not (rep.case == "facet" and rep.verified):
                slice_bad.append(f"{label} midpoint {mid}")
    checks.append(
        _check(
            "supporting-slices-pin-their-extremes",
            not slice_bad,
            count=slice_count,
            failures=_failures(slice_bad),
        )
    )

    cmp_bad: list[str] = []
    for p in (Fraction(3, 2), Fraction(3)):
        norm = an.lp_norm(p)
        for i in range(n):
            a = Fraction(rng.randint(-16, 16), 8)
            b = Fraction(rng.randint(-16, 16), 8)
            theta = Fraction(rng.randint(0, 40), 8)
            got = an.norm_cmp(norm, (a, b), theta)
            value = (abs(float(a)) ** float(p) + abs(float(b)) ** float(p)) ** (
                1 / float(p)
            )
            drift = value - float(theta)
            if abs(drift) > 1e-9 and got != (1 if drift > 0 else -1):
                cmp_bad.append(f"p={p}: ({a}, {b}) vs {theta}")
    checks.append(
        _check(
            "exact-comparison-agrees-with-floating-point",
            not cmp_bad,
            count=2 * n,
            failures=_failures(cmp_bad),
        )
    )

    round_ok = True
    for norm in (l1, l2, figure, an.lp_norm(Fraction(3, 2))):
        back = an.norm_from_json(an.norm_to_json(norm))
        round_ok = round_ok and back == norm
    checks.append(_check("norm-json-round-trip", round_ok))

    return _finish("absnorm", seed, samples, checks)


# ---------------------------------------------------------------------------
# dyadic


def _h_approx_span(t: dy.Node, m: int) -> dy.TreeSpanElement:
    """The depth-m martingale approximation written in the step span."""
    e = dy.span_element()
    for w in dy.descendants(t, m):
        e = e + dy.f_element(w) * Fraction(1, 2**m)
    return e


def dyadic_suite(
    seed: int = 0, samples: int | None = None, depth: int | None = None
) -> dict:
    """Norm identities, the closed norm formula, inequality families, and
    the slice witnesses of the dyadic step construction."""
    if depth is not None and not 1 <= depth <= 8:
        raise ValueError("depth out of range (1..8)")
    span_depth = depth or 5
    n_span = samples or 500
    n_cascade = 2 * n_span
    exposure_budget = max(10, n_span // 5)
    n_witness = max(5, n_span // 25)
    rng = Random(seed)
    checks: list[dict] = []

    measure_bad: list[str] = []
    for depth in range(0, 5):
        for t in dy.descendants((), depth):
            for n in range(1, 7):
                ((lo, hi),) = dy.b_set(t, n)
                if hi - lo != Fraction(1, 2 ** (depth + n + 1)):
                    measure_bad.append(f"block {t}, {n}")
                ((clo, chi),) = dy.c_set(t, n)
                if (clo - lo, chi - hi) != (Fraction(1, 2), Fraction(1, 2)):
                    measure_bad.append(f"mirror {t}, {n}")
    for n in range(1, 7):
        tiles = sorted(dy.b_set(t, n)[0] for t in dy.descendants((), 3))
        ((root_lo, root_hi),) = dy.b_set((), n)
        joined = tiles[0][0] == root_lo and tiles[-1][1] == root_hi
        for (a_lo, a_hi), (b_lo, b_hi) in zip(tiles, tiles[1:]):
            joined = joined and a_hi == b_lo
        if not joined:
            measure_bad.append(f"tiling at {n}")
        total = Fraction(1, 2 ** (n + 1)) + sum(
            Fraction(1, 2 ** (i + 1)) for i in range(1, n + 1)
        )
        if total != Fraction(1, 2):
            measure_bad.append(f"half mass at {n}")
    checks.append(
        _check(
            "block-measures-and-tilings",
            not measure_bad,
            failures=_failures(measure_bad),
        )
    )

    unit_bad: list[str] = []
    f_count = h_count = 0
    for depth in range(1, 7):
        for t in dy.descendants((), depth):
            f_count += 1
            if dy.l1_norm(dy.f_element(t)) != 1:
                unit_bad.append(f"step {t}")
            h_count += 1
            if dy.l1_norm(dy.h_element(t)) != 1:
                unit_bad.append(f"limit {t}")
    checks.append(
        _check(
            "unit-norms-at-every-node",
            not unit_bad,
            f_count=f_count,
            h_count=h_count,
            failures=_failures(unit_bad),
        )
    )

    approx_bad: list[str] = []
    for depth in range(1, 4):
        for t in dy.descendants((), depth):
            for m in range(1, 4):
                diff = dy.h_element(t) + _h_approx_span(t, m) * Fraction(-1)
                if dy.l1_norm(diff) != Fraction(2, 2 ** (m + depth)):
                    approx_bad.append(f"node {t}, depth {m}")
    checks.append(
        _check(
            "martingale-approximation-error",
            not approx_bad,
            failures=_failures(approx_bad),
        )
    )

    formula_bad: list[str] = []
    for i in range(n_span):
        e = ins.random_f_span(rng, max_depth=span_depth)
        if dy.span_norm_formula(e) != dy.l1_norm(e):
            formula_bad.append(f"instance {i}")
    checks.append(
        _check(
            "closed-norm-formula-matches-integration",
            not formula_bad,
            count=n_span,
            depth=span_depth,
            failures=_failures(formula_bad),
        )
    )

    cascade_bad: list[str] = []
    for i in range(n_cascade):
        alpha, m, n = ins.random_cascade_vector(rng)
        if not dy.cascade_inequality_check(alpha, m, n):
            cascade_bad.append(f"instance {i}")
    checks.append(
        _check(
            "cascade-inequality",
            not cascade_bad,
            count=n_cascade,
            failures=_failures(cascade_bad),
        )
    )

    conc_bad: list[str] = []
    tight = 0
    for i in range(max(50, n_span // 10)):
        e = ins.random_f_span(rng, max_depth=4)
        m = rng.randint(1, 4)
        res = dy.concentration_check(e, m)
        if not res.holds:
            conc_bad.append(f"instance {i}")
    for depth in range(1, 5):
        for t in dy.descendants((), depth):
            res = dy.concentration_check(dy.f_element(t), depth)
            if res.restricted != res.bound:
                conc_bad.append(f"tightness at {t}")
            else:
                tight += 1
    checks.append(
        _check(
            "concentration-bound-with-exact-tightness",
            not conc_bad,
            tight_cases=tight,
            failures=_failures(conc_bad),
        )
    )

    mart_bad: list[str] = []
    for level in range(1, 7):
        coeffs = {
            t: Fraction(rng.randint(-8, 8), 4) for t in dy.descendants((), level)
        }
        rep = dy.martingale_and_isometry_check(level, coeffs)
        if not rep.ok:
            mart_bad.append(f"level {level}")
    checks.append(
        _check(
            "martingale-identity-and-level-isometry",
            not mart_bad,
            failures=_failures(mart_bad),
        )
    )

    sep_bad: list[str] = []
    sep_count = 0
    for dt in range(1, 5):
        for t in dy.descendants((), dt):
            for ds in range(1, 7):
                for s in dy.descendants((), ds):
                    sep_count += 1
                    value = dy.separation_functional_values(t, s)
                    if s == t:
                        want = -Fraction(1, 2**dt)
                    elif len(s) == dt + 1 and s[:dt] == t:
                        want = Fraction(1, 2**dt)
                    elif len(s) > dt + 1 and s[:dt] == t:
                        want = Fraction(1, 2 ** (dt + 1))
                    else:
                        want = Fraction(0)
                    if value != want:
                        sep_bad.append(f"t={t}, s={s}: {value} != {want}")
    checks.append(
        _check(
            "separation-functional-case-table",
            not sep_bad,
            count=sep_count,
            failures=_failures(sep_bad),
        )
    )

    split_bad: list[str] = []
    for i in range(max(50, n_span // 10)):
        pool = dy.descendants((), 2)
        u, w = rng.sample(pool, 2)
        x = dy.f_element(u) * Fraction(rng.randint(1, 8), 4)
        y = dy.f_element(w) * Fraction(rng.randint(1, 8), 4)
        eps = Fraction(rng.randint(1, 15), 16)
        res = dy.norm_split_equivalences(x, y, eps)
        flags = {res.head_small, res.tail_large, res.ratio_bound}
        if len(flags) != 1:
            split_bad.append(f"instance {i}")
    checks.append(
        _check(
            "norm-split-equivalences-agree",
            not split_bad,
            failures=_failures(split_bad),
        )
    )

    expo_bad: list[str] = []
    for t in ((0,), (0, 1), (1, 1)):
        for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
            rep = dy.exposure_experiment(t, eps, exposure_budget, seed=seed)
            if not rep.all_within_bound:
                expo_bad.append(f"node {t}, eps {eps}")
            if rep.boundary_distance >= rep.distance_bound:
                expo_bad.append(f"node {t}, eps {eps}: boundary escaped")
    checks.append(
        _check(
            "exposed-slices-stay-close",
            not expo_bad,
            budget=exposure_budget,
            failures=_failures(expo_bad),
        )
    )

    nrd_bad: list[str] = []
    for i in range(n_witness):
        g = ins.random_sphere_h_span(rng)
        x_star = dy.sign_pattern_functional(g)
        eps = ins.random_epsilon(rng)
        rep = dy.not_relative_daugavet_witness(g, x_star, eps)
        if not rep.strict:
            nrd_bad.append(f"instance {i}: no near point in the slice")
        if rep.slice_value <= 1 - eps:
            nrd_bad.append(f"instance {i}: witness left the slice")
    checks.append(
        _check(
            "every-attained-slice-contains-a-near-step",
            not nrd_bad,
            count=n_witness,
            failures=_failures(nrd_bad),
        )
    )

    delta_bad: list[str] = []
    frozen = dy.delta_witness(
        dy.h_element((0,)), dy.sign_pattern_functional(dy.h_element((0,))),
        Fraction(1, 2), Fraction(1, 4),
    )
    if frozen.distance != Fraction(7, 4) or frozen.node != (0, 0, 0, 0):
        delta_bad.append("frozen witness drifted")
    for i in range(n_witness):
        g = ins.random_sphere_h_span(rng)
        x_star = dy.sign_pattern_functional(g)
        for eps in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)):
            rep = dy.delta_witness(g, x_star, Fraction(1, 2), eps)
            if not rep.meets_bound or rep.distance < 2 - eps:
                delta_bad.append(f"instance {i}, eps {eps}")
            if rep.slice_value <= 1 - Fraction(1, 2):
                delta_bad.append(f"instance {i}, eps {eps}: left the slice")
    checks.append(
        _check(
            "distance-two-witnesses-inside-slices",
            not delta_bad,
            count=n_witness,
            failures=_failures(delta_bad),
        )
    )

    e = ins.random_h_span(rng) + ins.random_f_span(rng, max_depth=3)
    back = dy.element_from_json(dy.element_to_json(e))
    checks.append(
        _check(
            "span-json-round-trip",
            back.f_part == e.f_part and back.h_part == e.h_part,
        )
    )

    return _finish("dyadic", seed, samples, checks)


SUITES = {
    "metric": metric_suite,
    "freespace": freespace_suite,
    "rtree": rtree_suite,
    "absnorm": absnorm_suite,
    "dyadic": dyadic_suite,
}

SUITE_ORDER = ("metric", "freespace", "rtree", "absnorm", "dyadic")


def run_suites(
    names: list[str],
    seed: int = 0,
    samples: int | None = None,
    depth: int | None = None,
) -> dict:
    """Run the named suites in canonical order and combine their reports."""
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite: {', '.join(sorted(unknown))}")
    if depth is not None and not 1 <= depth <= 8:
        raise ValueError("depth out of range (1..8)")
    ordered = [n for n in SUITE_ORDER if n in names]
    reports = []
    for name in ordered:
        if name == "dyadic":
            reports.append(dyadic_suite(seed=seed, samples=samples, depth=depth))
        else:
            reports.append(SUITES[name](seed=seed, samples=samples))
    return {
        "command": "verify",
        "seed": seed,
        "samples": samples,
        "depth": depth,
        "reports": reports,
        "ok": all(r["ok"] for r in reports),
    }


# ---------------------------------------------------------------------------
# example reports


def example_a_report(level: int) -> dict:
    """The first grid family at a truncation level: the special molecule
    stays strictly inside distance 2, every other certified denting
    molecule sits at exactly 2, and the named functional's slice excludes
    the special molecule."""
    if not 1 <= level <= 6:
        raise ValueError("level out of range (1..6)")
    space = me.example_space_a(level)
    m_xy = fs.molecule(space, space.x, space.y)
    m_uv = fs.molecule(space, space.u, space.v)
    d_uv = fs.free_norm(fs.sub_elements(m_xy, m_uv))

    partial = {
        space.x: Fraction(0),
        space.y: Fraction(1),
        space.u: Fraction(1, 2),
        space.v: Fraction(1, 2),
    }
    f = fs.mcshane_extend(space, partial)
    lip = fs.lip_norm(f)
    f_uv = fs.eval_functional(f, m_uv)
    sl = fs.Slice(f, Fraction(1))
    (uv_in_slice,) = fs.slice_members(sl, [m_uv])

    table = fs.distance_to_denting_report(space, m_xy, sl)
    rows = []
    others_at_two = True
    for row in table.rows:
        rows.append(
            {
                "p": row.p,
                "q": row.q,
                "distance": _rat(row.distance),
                "in_slice": row.in_slice,
            }
        )
        if (row.p, row.q) != (space.u, space.v) and row.distance != 2:
            others_at_two = False

    claims = {
        "m_xy_m_uv_distance": _rat(d_uv),
        "m_xy_m_uv_distance_below_two": d_uv < 2,
        "functional_norm": _rat(lip),
        "functional_norm_is_one": lip == 1,
        "functional_value_on_m_uv": _rat(f_uv),
        "m_uv_outside_slice": not uv_in_slice,
        "other_denting_distances_exactly_two": others_at_two,
        "in_slice_distances_all_two": table.all_two and not table.exceptions,
    }
    ok = (
        claims["m_xy_m_uv_distance_below_two"]
        and claims["functional_norm_is_one"]
        and f_uv == 0
        and claims["m_uv_outside_slice"]
        and others_at_two
        and claims["in_slice_distances_all_two"]
    )
    return {
        "command": "example-a",
        "level": level,
        "points": len(space.points),
        "denting_pairs": len(table.rows),
        "claims": claims,
        "denting_table": rows,
        "ok": ok,
    }


def example_b_report(level: int, samples: int = 20, seed: int = 0) -> dict:
    """The second grid family at a truncation level: adjacent same-row
    molecules are denting points strictly inside distance 2, and every
    sampled supporting slice at the base molecule contains one."""
    if not 2 <= level <= 6:
        raise ValueError("level out of range (2..6)")
    if samples < 1:
        raise ValueError("need at least one sampled slice")
    space = me.example_space_b(level)
    rng = Random(seed)
    m_xy = fs.molecule(space, space.x, space.y)

    pair_rows = []
    candidates: list[tuple[str, str, Fraction]] = []
    pairs_ok = True
    for n in range(2, level + 1):
        row = space.rows[n]
        for p, q in zip(row, row[1:]):
            cert = fs.denting_molecule_certificate(space, p, q)
            distance = fs.free_norm(fs.sub_elements(m_xy, fs.molecule(space, p, q)))
            pair_rows.append(
                {
                    "row": n,
                    "p": p,
                    "q": q,
                    "certified": cert.ok,
                    "distance": _rat(distance),
                    "below_two": distance < 2,
                }
            )
            if not (cert.ok and distance < 2):
                pairs_ok = False
            else:
                candidates.append((p, q, distance))

    low_32nds = max(2, 2 ** (6 - level) + 1) if level <= 6 else 2
    slice_rows = []
    slices_ok = True
    for index in range(samples):
        f = ins.supporting_functional(rng, space, space.x, space.y)
        alpha = ins.random_slice_width(rng, low_32nds=low_32nds)
        hit = None
        for p, q, distance in candidates:
            value = fs.eval_functional(f, fs.molecule(space, p, q))
            if value > 1 - alpha:
                hit = {
                    "p": p,
                    "q": q,
                    "slice_value": _rat(value),
                    "distance": _rat(distance),
                }
                break
        slice_rows.append(
            {
                "sample": index,
                "width": _rat(alpha),
                "hit": hit,
            }
        )
        if hit is None:
            slices_ok = False
    return {
        "command": "example-b",
        "level": level,
        "points": len(space.points),
        "samples": samples,
        "seed": seed,
        "adjacent_pairs": pair_rows,
        "sampled_slices": slice_rows,
        "all_pairs_certified_below_two": pairs_ok,
        "every_slice_contains_a_pair": slices_ok,
        "ok": pairs_ok and slices_ok,
    }


# ---------------------------------------------------------------------------
# user-supplied inputs


def space_report(space: me.FiniteMetricSpace) -> dict:
    """Deterministic certificate battery for a user-supplied space:
    metric axioms, transport duality on every point difference, and unit
    molecules."""
    validation = me.validate_metric(space)
    checks: list[dict] = [
        _check(
            "metric-axioms",
            validation.ok,
            kind=validation.kind,
            failures=_failures(validation.failures),
        )
    ]
    if validation.ok:
        pair_bad: list[str] = []
        dual_bad: list[str] = []
        pair_count = 0
        for p, q in space.pairs():
            pair_count += 1
            diff = fs.element_from_coeffs(
                space, {p: Fraction(1), q: Fraction(-1)}
            )
            value, potential = fs.free_norm_certificate(diff)
            if value != space.d(p, q) or fs.free_norm(fs.molecule(space, p, q)) != 1:
                pair_bad.append(f"{p}|{q}")
            if (
                fs.lip_norm(potential) > 1
                or fs.eval_functional(potential, diff) != value
            ):
                dual_bad.append(f"{p}|{q}")
        checks.append(
            _check(
                "point-difference-norms-equal-distances",
                not pair_bad,
                count=pair_count,
                failures=_failures(pair_bad),
            )
        )
        checks.append(
            _check(
                "transport-norm-matches-dual-certificate",
                not dual_bad,
                count=pair_count,
                failures=_failures(dual_bad),
            )
        )
    return {
        "input": "space",
        "points": len(space.points),
        "base": space.base,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }


def norm_report(norm: an.AbsNorm2) -> dict:
    """Deterministic certificate battery for a user-supplied absolute
    plane norm: the JSON round trip, bipolarity, and (for polyhedral
    representations) extreme points with verified supporting slices."""
    checks: list[dict] = []
    back = an.norm_from_json(an.norm_to_json(norm))
    checks.append(_check("norm-json-round-trip", back == norm))

    description: dict = {"kind": norm.kind}
    if norm.kind == "lp":
        description["p"] = "inf" if norm.p == "inf" else fmt_rat(norm.p)

    if an.is_polyhedral(norm):
        poly = an.as_polyhedral(norm)
        bipolar_ok = (
            an.dual_norm(an.dual_norm(poly)).cone_vertices == poly.cone_vertices
        )
    else:
        poly = None
        bipolar_ok = an.dual_norm(an.dual_norm(norm)) == norm
    checks.append(_check("bipolar-identity", bipolar_ok))

    if poly is not None:
        ext = an.extreme_points(poly)
        description["extreme_points"] = [[fmt_rat(a), fmt_rat(b)] for a, b in ext]
        vpoint_bad = [
            f"({a}, {b})" for a, b in ext if not an.is_v_point(poly, (a, b))
        ]
        checks.append(
            _check(
                "extreme-points-are-v-points",
                not vpoint_bad,
                count=len(ext),
                failures=_failures(vpoint_bad),
            )
        )
        slice_bad: list[str] = []
        slice_count = 0
        for e in ext:
            if e[0] < 0 or e[1] < 0:
                continue
            slice_count += 1
            rep = an.supporting_slice_construction(poly, e)
            if not (rep.case == "vertex" and rep.verified):
                slice_bad.append(f"vertex ({e[0]}, {e[1]})")
        for i in range(len(ext)):
            a, b = ext[i], ext[(i + 1) % len(ext)]
            mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
            if mid[0] < 0 or mid[1] < 0:
                continue
            slice_count += 1
            rep = an.supporting_slice_construction(poly, mid)
            if not (rep.case == "facet" and rep.verified):
                slice_bad.append(f"midpoint ({mid[0]}, {mid[1]})")
        checks.append(
            _check(
                "supporting-slices-pin-their-extremes",
                not slice_bad,
                count=slice_count,
                failures=_failures(slice_bad),
            )
        )

    return {
        "input": "norm",
        "norm": description,
        "checks": checks,
        "ok": all(c["ok"] for c in checks),
    }
