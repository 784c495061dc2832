"""Acceptance suite: one test per criterion, exact (zero-tolerance) checks.

Each test prints a single pass/fail line (visible with ``pytest -s``); the
assertions themselves are exact identities over the rationals, so there are
no numeric tolerances anywhere.
"""

import json
import random
from fractions import Fraction

import pytest
from helpers import random_form, random_point, random_polynomial, random_vector_field

from msk.algebroid import (
    algebroid_from_frame,
    check_algebroid_axioms,
    check_im_form,
    check_im_nondeg,
)
from msk.catalog import (
    CEComplex,
    build_scenario,
    canonical_multiphase,
    ce_cartan,
    ce_differential,
    full_vertical,
    graph_of_form,
    graph_of_top_multivector,
    line_bundle_frame,
    pair_groupoid,
    scaled_family,
    so3_complex,
    vertical_subbundle,
    wedge_product_structure,
)
from msk.cli import main as cli_main
from msk.courant import (
    CourantSection,
    SubbundleFrame,
    check_morphism,
    check_nondeg_l,
    direct_product,
    dorfman_bracket,
    from_dl,
    is_involutive,
    is_isotropic,
    leaf_form_at,
    orthogonal_profile,
    spans_match,
    to_dl,
)
from msk.forms import (
    Chart,
    DiffForm,
    SmoothMap,
    exterior_derivative,
    form_into_multivector,
    interior_product,
    lie_derivative,
    poisson_jacobiator,
    pullback,
    scalar_bracket,
    wedge,
)
from msk.groupoid import (
    check_multiplicative,
    check_right_translation,
    check_unit_inversion,
    extract_algebroid,
    induced_im_form,
)
from msk.plectic import (
    JACOBIATOR_SIGN,
    PlecticCandidate,
    check_nondegenerate,
    hamiltonian_vector_field,
    is_closed,
    jacobiator_check,
    symplectic_poisson_bracket,
)
from msk.sampling import sample_points
from msk.scalars import RationalFunction, SamplePoint
from msk.verdicts import SAMPLED


def _report(number: int, label: str, ok: bool):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {label}")
    assert ok, f"criterion {number} failed: {label}"


def multiphase_32():
    space = canonical_multiphase(3, 2)
    return space.chart, space.omega


# -- 1 -------------------------------------------------------------------------


def test_criterion_1_calculus_identity_suite():
    rng = random.Random(20260810)
    charts = {
        dim: Chart(f"c{dim}", [f"x{i}" for i in range(dim)]) for dim in (2, 3, 4, 5)
    }
    maps = {}
    for dim in (2, 3):
        source = charts[dim]
        target = Chart(f"t{dim}", [f"u{i}" for i in range(dim)])
        comps = [
            RationalFunction(random_polynomial(rng, source.coords, degree=2, terms=2))
            for _ in range(dim)
        ]
        maps[dim] = SmoothMap(source, target, comps)

    ok = True
    for trial in range(500):
        dim = (2, 3, 4, 5)[trial % 4]
        chart = charts[dim]
        k = rng.randint(0, dim - 1)
        a = random_form(rng, chart, k, coeff_degree=3)
        # d compose d = 0
        if not exterior_derivative(exterior_derivative(a)).is_zero:
            ok = False
            break
        # graded antisymmetry of the wedge
        l = rng.randint(0, dim - k)
        b = random_form(rng, chart, l, coeff_degree=3)
        sign = -1 if (k * l) % 2 else 1
        if not (wedge(a, b) - wedge(b, a).scaled(sign)).is_zero:
            ok = False
            break
        # double contraction vanishes
        x = random_vector_field(rng, chart)
        if k >= 2 and not x.is_zero:
            if not interior_product(x, interior_product(x, a)).is_zero:
                ok = False
                break
        # the Lie derivative commutes with d
        if not (
            lie_derivative(x, exterior_derivative(a))
            - exterior_derivative(lie_derivative(x, a))
        ).is_zero:
            ok = False
            break
        # pullback naturality (both with d and with the wedge)
        if dim in maps:
            phi = maps[dim]
            target_chart = phi.target
            ta = random_form(rng, target_chart, k if k < dim else dim - 1, coeff_degree=2)
            tb = random_form(rng, target_chart, rng.randint(0, 1), coeff_degree=2)
            if not (
                pullback(phi, exterior_derivative(ta))
                - exterior_derivative(pullback(phi, ta))
            ).is_zero:
                ok = False
                break
            if not (
                pullback(phi, wedge(ta, tb)) - wedge(pullback(phi, ta), pullback(phi, tb))
            ).is_zero:
                ok = False
                break
    _report(1, "calculus identities on 500 randomized inputs", ok)


# -- 2 -------------------------------------------------------------------------


def test_criterion_2_canonical_multiphase():
    ok = True
    for n, k in [(1, 1), (2, 1), (3, 2), (2, 2)]:
        space = canonical_multiphase(n, k)
        if space.omega != space.theta.d():
            ok = False
        if not is_closed(space.omega).ok:
            ok = False
        if not check_nondegenerate(PlecticCandidate(space.omega)).ok:
            ok = False
        points = tuple(sample_points(space.chart, seed=20 * n + k, count=20, box=5))
        sampled = check_nondegenerate(
            PlecticCandidate(space.omega, mode=SAMPLED, points=points)
        )
        if not (sampled.ok and len(sampled.points) == 20):
            ok = False
    _report(2, "canonical multiphase spaces closed and nondegenerate", ok)


# -- 3 -------------------------------------------------------------------------

HAMILTONIAN_POOL = [
    "q1*d(q2)",
    "q3*d(q1)",
    "q2*d(q3)",
    "-(p12*d(q2) + p13*d(q3))",
    "-q1*d(p12) + q3*d(p23)",
    "q1**2*d(q2)",
    "p12*d(q1) - p23*d(q3)",
    "p13*d(q1) + p23*d(q2)",
    "(q1*q3 + q2)*d(q1)",
    "q2**2*d(q3) - 2*q1*d(q2)",
    "q3*(p12*d(q1) - p23*d(q3))",
    "q1*(p13*d(q1) + p23*d(q2))",
]


def test_criterion_3_jacobiator_defect():
    chart, omega = multiphase_32()
    cand = PlecticCandidate(omega)
    ok = JACOBIATOR_SIGN == 1

    # the sign is pinned by expanding both sides on an explicit triple
    alpha = chart.form("q1**2*d(q2)")
    beta = chart.form("-(p12*d(q2) + p13*d(q3))")
    gamma = chart.form("-q1*d(p12) + q3*d(p23)")
    from msk.plectic import semibracket

    lhs = (
        semibracket(cand, alpha, semibracket(cand, beta, gamma))
        + semibracket(cand, gamma, semibracket(cand, alpha, beta))
        + semibracket(cand, beta, semibracket(cand, gamma, alpha))
    )
    xa = hamiltonian_vector_field(cand, alpha).field
    xb = hamiltonian_vector_field(cand, beta).field
    xg = hamiltonian_vector_field(cand, gamma).field
    triple = interior_product(xa, interior_product(xb, interior_product(xg, omega)))
    rhs = exterior_derivative(triple).scaled(-JACOBIATOR_SIGN)
    ok = ok and lhs == chart.form("2*d(q1)") and (lhs - rhs).is_zero

    # the explicit catalog triple
    ok = ok and jacobiator_check(
        cand,
        chart.form("q3*d(q1)"),
        chart.form("-(p12*d(q2) + p13*d(q3))"),
        chart.form("q1*d(q2)"),
    ).ok

    rng = random.Random(31415)
    count = 0
    while count < 10:
        texts = rng.sample(HAMILTONIAN_POOL, 3)
        if not jacobiator_check(cand, *(chart.form(t) for t in texts)).ok:
            ok = False
            break
        count += 1
    _report(3, "jacobiator-defect identity with one frozen global sign", ok)


# -- 4 -------------------------------------------------------------------------


def test_criterion_4_poisson_coherence():
    ok = True
    # the Lie-Poisson bivector of the rotation algebra is Poisson
    dual = Chart("dual", ["x1", "x2", "x3"])
    lie_poisson = dual.multivector(
        "x1*e(x2)^e(x3) + x2*e(x3)^e(x1) + x3*e(x1)^e(x2)"
    )
    ok = ok and poisson_jacobiator(lie_poisson).is_zero

    four = Chart("four", ["x", "y", "z", "w"])
    counter = four.multivector("e(x)^e(y) + x*e(z)^e(w)")
    jac = poisson_jacobiator(counter)
    ok = ok and (not jac.is_zero) and jac.coefficient((1, 2, 3)) == four.scalar("-1")

    # Dorfman form part against the cotangent-algebroid bracket on basis
    # covectors, for graphs of Poisson bivectors
    for chart, pi in [
        (dual, lie_poisson),
        (Chart("plane", ["x", "y"]), Chart("plane", ["x", "y"]).multivector("e(x)^e(y)")),
    ]:
        sections = [
            CourantSection(
                form_into_multivector(chart.basis_covector(name), pi),
                chart.basis_covector(name),
            )
            for name in chart.coords
        ]
        frame = SubbundleFrame(chart, 1, sections)
        for i, si in enumerate(frame.sections):
            for j, sj in enumerate(frame.sections):
                bracket = dorfman_bracket(si, sj)
                expected = (
                    lie_derivative(si.vector, sj.form)
                    - lie_derivative(sj.vector, si.form)
                    - exterior_derivative(
                        DiffForm(
                            chart,
                            0,
                            {
                                (): scalar_bracket(
                                    pi,
                                    chart.coordinate(chart.coords[i]),
                                    chart.coordinate(chart.coords[j]),
                                )
                            },
                        )
                    )
                )
                if not (bracket.form - expected).is_zero:
                    ok = False

    # the Leibniz rule under the symplectic bracket, 100 random triples
    plane = Chart("plane", ["x", "y"])
    w = plane.form("d(x)^d(y)")
    rng = random.Random(161803)
    for _ in range(100):
        f = RationalFunction(random_polynomial(rng, plane.coords, degree=3, terms=3))
        g = RationalFunction(random_polynomial(rng, plane.coords, degree=3, terms=3))
        h = RationalFunction(random_polynomial(rng, plane.coords, degree=3, terms=3))
        lhs = symplectic_poisson_bracket(w, f, g * h)
        rhs = (
            symplectic_poisson_bracket(w, f, g) * h
            + symplectic_poisson_bracket(w, f, h) * g
        )
        if not (lhs - rhs).is_zero:
            ok = False
            break
    _report(4, "bivector jacobiator, bracket coherence, and the Leibniz rule", ok)


# -- 5 -------------------------------------------------------------------------


def test_criterion_5_multiplicativity_suite():
    chart, omega0 = multiphase_32()
    data = pair_groupoid(omega0)
    g = data.groupoid
    ok = check_multiplicative(g, data.omega).ok
    ok = ok and check_unit_inversion(g, data.omega).ok
    ok = ok and check_right_translation(g, data.omega).ok

    wrong = pullback(g.target_map, omega0) + pullback(g.source_map, omega0)
    mult = check_multiplicative(g, wrong)
    ok = ok and (not mult.ok) and mult.residual is not None and not mult.residual.is_zero
    unit = check_unit_inversion(g, wrong)
    ok = ok and not unit.item("unit_pullback").ok
    ok = ok and unit.item("unit_pullback").residual == omega0.scaled(2)
    _report(5, "multiplicativity suite on the pair groupoid", ok)


# -- 6 -------------------------------------------------------------------------


def test_criterion_6_nondegeneracy_coherence():
    from msk.catalog import vb_groupoid

    ok = True
    # pair groupoid: both sides pass
    chart, omega0 = multiphase_32()
    data = pair_groupoid(omega0)
    groupoid_side = check_nondegenerate(PlecticCandidate(data.omega)).ok
    im = induced_im_form(data.groupoid, data.omega)
    im_side = check_im_nondeg(im).ok
    ok = ok and groupoid_side and im_side

    # the full vertical bundle: both sides pass
    full = vb_groupoid(full_vertical(3, 2))
    groupoid_side = check_nondegenerate(PlecticCandidate(full.omega)).ok
    im_side = check_im_nondeg(induced_im_form(full.groupoid, full.omega)).ok
    ok = ok and groupoid_side and im_side

    # a proper vertical subbundle: both sides fail, with the missing
    # direction as the witness
    space = Chart("r3", ["x1", "x2", "x3"])
    partial = vb_groupoid(vertical_subbundle(space, [space.form("d(x1)^d(x2)")]))
    groupoid_verdict = check_nondegenerate(PlecticCandidate(partial.omega))
    im_verdict = check_im_nondeg(induced_im_form(partial.groupoid, partial.omega))
    ok = ok and (not groupoid_verdict.ok) and (not im_verdict.ok)
    ok = ok and im_verdict.item("injective").ok
    witness = im_verdict.item("annihilator").residual
    ok = ok and witness is not None and not witness.coefficient((2,)).is_zero
    _report(6, "groupoid and infinitesimal nondegeneracy verdicts agree", ok)


# -- 7 -------------------------------------------------------------------------


def test_criterion_7_k_poisson_corpus():
    ok = True
    chart, omega = multiphase_32()

    def full_suite(frame):
        return (
            is_isotropic(frame).ok
            and is_involutive(frame).ok
            and check_nondeg_l(frame).ok
        )

    graph = graph_of_form(omega)
    ok = ok and full_suite(graph)
    pts = tuple(sample_points(chart, seed=77, count=3, box=4))
    profile = orthogonal_profile(graph, pts)
    ok = ok and profile.equals_perp_generically

    top = Chart("r3t", ["x", "y", "z"])
    top_frame = graph_of_top_multivector(top.multivector("e(x)^e(y)^e(z)"))
    ok = ok and full_suite(top_frame)
    ok = ok and to_dl(top_frame).rank == 3  # the form projection is onto

    vertical = full_vertical(3, 2)
    ok = ok and full_suite(vertical)
    vpts = tuple(sample_points(vertical.chart, seed=78, count=3, box=4))
    vprofile = orthogonal_profile(vertical, vpts)
    ok = ok and vprofile.generic_perp_dim == 3
    ok = ok and all(dim_p == 3 and dim_t == 0 for _, dim_p, dim_t in vprofile.per_point)

    line = line_bundle_frame(4)
    ok = ok and full_suite(line)
    lpts = tuple(sample_points(line.chart, seed=79, count=2, box=4))
    lprofile = orthogonal_profile(line, lpts)
    ok = ok and all(dim_p == 6 for _, dim_p, _ in lprofile.per_point)

    plane_a = Chart("wa", ["x1", "y1"])
    plane_b = Chart("wb", ["x2", "y2"])
    wedge_frame = wedge_product_structure(
        plane_a.form("d(x1)^d(y1)"), plane_b.form("d(x2)^d(y2)")
    )
    ok = ok and full_suite(wedge_frame)
    wpts = sample_points(wedge_frame.chart, seed=80, count=10, box=4)
    ok = ok and all(leaf_form_at(wedge_frame, pt).values == {} for pt in wpts)

    product = direct_product(
        graph_of_form(plane_a.form("d(x1)^d(y1)")), full_vertical(2, 1, suffix="v")
    )
    ok = ok and full_suite(product)
    product2 = direct_product(
        graph_of_form(canonical_multiphase(2, 2, suffix="dp").omega),
        full_vertical(2, 2, suffix="v"),
    )
    ok = ok and full_suite(product2)
    _report(7, "k-Poisson example corpus passes its advertised checks", ok)


# -- 8 -------------------------------------------------------------------------


def test_criterion_8_rigidity_remark():
    chart, omega = multiphase_32()
    fiber = Chart("n2", ["t1", "t2"])
    constant = scaled_family(omega, fiber, fiber.scalar("1"))
    ok = is_involutive(constant).ok

    varying = scaled_family(omega, fiber, fiber.scalar("t1"))
    verdict = is_involutive(varying)
    ok = ok and not verdict.ok
    residual = verdict.residual
    ok = ok and residual is not None and residual.vector.is_zero
    # the reported residual form is d(t1) wedged into a double contraction
    total = varying.chart
    t1 = total.index("t1")
    dt1 = DiffForm(total, 1, {(t1,): total.constant(1)})
    matched = False
    for i, name_i in enumerate(omega.chart.coords):
        for j, name_j in enumerate(omega.chart.coords):
            if i == j:
                continue
            double = interior_product(
                omega.chart.basis_vector(name_j),
                interior_product(omega.chart.basis_vector(name_i), omega),
            )
            from msk.courant import extend_form

            candidate = wedge(dt1, extend_form(double, total, 0))
            if candidate.is_zero:
                continue
            for scale in (1, -1):
                if (residual.form - candidate.scaled(scale)).is_zero:
                    matched = True
    ok = ok and matched
    _report(8, "family involutivity is equivalent to a constant scaling", ok)


# -- 9 -------------------------------------------------------------------------


def test_criterion_9_cartan_three_form():
    data = ce_cartan(so3_complex())
    ok = data.differential.is_zero and data.nondegenerate.ok

    corrupted = CEComplex(
        3,
        {(0, 1, 2): 1, (0, 2, 1): -1, (1, 2, 0): 1, (0, 1, 1): 1},
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    )
    d_once = ce_differential(corrupted, corrupted.chart.form("d(a1)"))
    d_twice = ce_differential(corrupted, d_once)
    ok = ok and not d_twice.is_zero
    _report(9, "invariant 3-form closed and nondegenerate; corruption detected", ok)


# -- 10 ------------------------------------------------------------------------


def test_criterion_10_morphism_check():
    chart, omega0 = multiphase_32()
    data = pair_groupoid(omega0)
    arrow_pair = to_dl(graph_of_form(data.omega))
    base_pair = to_dl(graph_of_form(omega0))
    ok = check_morphism(data.groupoid.target_map, arrow_pair, base_pair).ok

    constant = SmoothMap(
        chart, chart, [chart.constant(v) for v in (1, 0, 0, 0, 0, 0)]
    )
    ok = ok and not check_morphism(constant, base_pair, base_pair).ok
    _report(10, "target map is a morphism; the constant control case is not", ok)


# -- 11 ------------------------------------------------------------------------


def test_criterion_11_round_trips(tmp_path, capsys):
    ok = True
    chart, omega = multiphase_32()
    for frame in (
        graph_of_form(omega),
        graph_of_top_multivector(
            Chart("r3z", ["x", "y", "z"]).multivector("e(x)^e(y)^e(z)")
        ),
    ):
        algebroid, im = algebroid_from_frame(frame)
        ok = ok and check_algebroid_axioms(algebroid).ok
        ok = ok and check_im_form(im).ok
        ok = ok and check_im_nondeg(im).ok
        ok = ok and spans_match(frame, from_dl(to_dl(frame)))

    # CLI catalog output re-runs to identical verdicts, byte for byte
    scen_path = tmp_path / "scenario.json"
    code = cli_main(
        ["catalog", "pair-groupoid", "base=canonical-multiphase(3,2)", "--json", str(scen_path)]
    )
    ok = ok and code == 0
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    ok = ok and cli_main(["check", str(scen_path), "--seed", "5", "--json", str(r1)]) == 0
    ok = ok and cli_main(["check", str(scen_path), "--seed", "5", "--json", str(r2)]) == 0
    capsys.readouterr()

    def stripped(path):
        data = json.loads(path.read_text())
        for c in data["checks"]:
            c.pop("millis")
        return json.dumps(data, sort_keys=True)

    ok = ok and stripped(r1) == stripped(r2)
    with capsys.disabled():
        print()
    _report(11, "structure extraction and CLI round trips are exact", ok)
