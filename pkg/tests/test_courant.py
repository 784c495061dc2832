import random
from fractions import Fraction

import pytest
from helpers import random_form, random_vector_field

from msk.courant import (
    CourantSection,
    DLPair,
    SubbundleFrame,
    check_dl,
    check_morphism,
    check_nondeg_l,
    direct_product,
    distribution_frame,
    dorfman_bracket,
    from_dl,
    is_isotropic,
    is_involutive,
    lambda_bracket,
    leaf_form_at,
    orthogonal_profile,
    pairing,
    spans_match,
    to_dl,
)
from msk.errors import FrameDependent, NotInD, ProjectionNotInjective
from msk.forms import (
    Chart,
    SmoothMap,
    exterior_derivative,
    form_into_multivector,
    interior_product,
    lie_derivative,
    scalar_bracket,
    wedge,
)
from msk.linalg import fraction_rank
from msk.scalars import SamplePoint


def graph_frame(omega):
    """Frame (e_i, i_{e_i} omega) of the graph of a form."""
    chart = omega.chart
    sections = []
    for name in chart.coords:
        v = chart.basis_vector(name)
        sections.append(CourantSection(v, interior_product(v, omega)))
    return SubbundleFrame(chart, omega.degree - 1, sections)


def vertical_frame(chart, forms):
    k = forms[0].degree
    zero = chart.zero_multivector(1)
    return SubbundleFrame(chart, k, [CourantSection(zero, f) for f in forms])


def multiphase_32():
    chart = Chart("hemi", ["q1", "q2", "q3", "p12", "p13", "p23"])
    omega = chart.form("d(p12)^d(q1)^d(q2) + d(p13)^d(q1)^d(q3) + d(p23)^d(q2)^d(q3)")
    return chart, omega


def test_pairing_example():
    c = Chart("space", ["x", "y", "z"])
    s1 = CourantSection(c.basis_vector("x"), c.form("d(x)^d(y)"))
    s2 = CourantSection(c.basis_vector("y"), c.zero_form(2))
    assert pairing(s1, s2) == c.form("-d(x)")
    # symmetric
    assert pairing(s2, s1) == c.form("-d(x)")
    s3 = CourantSection(c.basis_vector("z"), c.zero_form(2))
    assert pairing(s2, s3).is_zero


def test_dorfman_examples():
    c = Chart("plane", ["x", "y"])
    s1 = CourantSection(c.basis_vector("x"), c.zero_form(1))
    s2 = CourantSection(c.zero_multivector(1), c.form("x*d(y)"))
    out = dorfman_bracket(s1, s2)
    assert out.vector.is_zero and out.form == c.form("d(y)")

    s3 = CourantSection(c.basis_vector("x"), c.form("d(x)"))
    out = dorfman_bracket(s3, s3)
    assert out.is_zero


def test_dorfman_defect_and_leibniz_jacobi():
    rng = random.Random(21)
    chart = Chart("three", ["x", "y", "z"])
    k = 2
    for _ in range(12):
        sections = [
            CourantSection(random_vector_field(rng, chart), random_form(rng, chart, k))
            for _ in range(3)
        ]
        s1, s2, s3 = sections
        # non-skew defect
        defect = dorfman_bracket(s1, s1)
        assert defect.vector.is_zero
        expected = (
            exterior_derivative(interior_product(s1.vector, s1.form))
            if not s1.vector.is_zero and not s1.form.is_zero
            else chart.zero_form(k)
        )
        assert defect.form == expected
        # left Leibniz identity
        lhs = dorfman_bracket(s1, dorfman_bracket(s2, s3))
        rhs = dorfman_bracket(dorfman_bracket(s1, s2), s3) + dorfman_bracket(
            s2, dorfman_bracket(s1, s3)
        )
        assert lhs == rhs


def test_graph_frames_are_isotropic():
    chart, omega = multiphase_32()
    frame = graph_frame(omega)
    assert is_isotropic(frame).ok


def test_vertical_frames_isotropic_involutive():
    c = Chart("space", ["x", "y", "z"])
    forms = [c.form("d(x)^d(y)"), c.form("d(x)^d(z)"), c.form("d(y)^d(z)")]
    frame = vertical_frame(c, forms)
    assert is_isotropic(frame).ok
    assert is_involutive(frame).ok


def test_single_section_isotropy_failure():
    c = Chart("line2", ["x", "y"])
    frame = SubbundleFrame(
        c, 1, [CourantSection(c.basis_vector("x"), c.form("d(x)"))]
    )
    verdict = is_isotropic(frame)
    assert not verdict.ok
    assert verdict.residual == c.form("2")
    inv = is_involutive(frame)
    assert not inv.ok and "isotropy" in inv.notes


def test_involutivity_of_closed_graph_and_nonclosed_failure():
    chart, omega = multiphase_32()
    assert is_involutive(graph_frame(omega)).ok

    c = Chart("space", ["x", "y", "z"])
    w = c.form("x*d(y)^d(z)")
    frame = graph_frame(w)
    verdict = is_involutive(frame)
    assert not verdict.ok
    # residual of the first failing pair (e_x, e_y) is i_Y i_X dw
    dw = exterior_derivative(w)
    expected = interior_product(c.basis_vector("y"), interior_product(c.basis_vector("x"), dw))
    assert "0 and 1" in verdict.notes
    assert verdict.residual.vector.is_zero
    assert verdict.residual.form == expected


def test_nondeg_l():
    c = Chart("space", ["x", "y", "z"])
    full = vertical_frame(
        c, [c.form("d(x)^d(y)"), c.form("d(x)^d(z)"), c.form("d(y)^d(z)")]
    )
    assert check_nondeg_l(full).ok

    partial = vertical_frame(c, [c.form("d(x)^d(y)")])
    verdict = check_nondeg_l(partial)
    assert not verdict.ok
    assert not verdict.residual.coefficient((2,)).is_zero

    chart, omega = multiphase_32()
    assert check_nondeg_l(graph_frame(omega)).ok


def test_orthogonal_profile_cases():
    pts = [SamplePoint({"x": 1, "y": 2, "z": Fraction(1, 3)})]
    c = Chart("space", ["x", "y", "z"])
    partial = vertical_frame(c, [c.form("d(x)^d(y)")])
    profile = orthogonal_profile(partial, pts)
    assert profile.generic_perp_dim == 4
    assert not profile.equals_perp_generically
    assert profile.per_point[0][1] == 4
    assert profile.per_point[0][2] == 1

    full = vertical_frame(
        c, [c.form("d(x)^d(y)"), c.form("d(x)^d(z)"), c.form("d(y)^d(z)")]
    )
    profile = orthogonal_profile(full, pts)
    assert profile.generic_perp_dim == 3
    assert profile.equals_perp_generically
    assert profile.per_point[0][2] == 0

    plane = Chart("plane", ["x", "y"])
    sym = graph_frame(plane.form("d(x)^d(y)"))
    profile = orthogonal_profile(sym, [SamplePoint({"x": 5, "y": -2})])
    assert profile.equals_perp_generically
    assert profile.per_point[0][1] == 2

    zero_frame = SubbundleFrame(c, 2, [])
    profile = orthogonal_profile(zero_frame, pts)
    assert profile.generic_perp_dim == 3 + 3


def test_frame_dependence_rejected():
    c = Chart("plane", ["x", "y"])
    s = CourantSection(c.basis_vector("x"), c.form("d(x)"))
    with pytest.raises(FrameDependent):
        SubbundleFrame(c, 1, [s, s])


def test_to_dl_from_dl_round_trip():
    chart, omega = multiphase_32()
    frame = graph_frame(omega)
    pair = to_dl(frame)
    assert pair.rank == 6
    back = from_dl(pair)
    assert spans_match(frame, back)

    # vertical: anchor is zero
    c = Chart("space", ["x", "y", "z"])
    vert = vertical_frame(
        c, [c.form("d(x)^d(y)"), c.form("d(x)^d(z)"), c.form("d(y)^d(z)")]
    )
    pair = to_dl(vert)
    for i in range(3):
        assert pair.anchor_field(i).is_zero
    assert spans_match(vert, from_dl(pair))


def test_to_dl_requires_injective_projection():
    c = Chart("plane", ["x", "y"])
    # tangent-only section projects to zero
    frame = SubbundleFrame(
        c, 1, [CourantSection(c.basis_vector("x"), c.zero_form(1))]
    )
    with pytest.raises(ProjectionNotInjective):
        to_dl(frame)


def test_graph_of_bivector_dl():
    # graph of a top bivector on the plane: D = all of T*M, anchor = contraction
    c = Chart("plane", ["x", "y"])
    pi = c.multivector("x*e(x)^e(y)")
    sections = []
    for name in c.coords:
        alpha = c.basis_covector(name)
        sections.append(CourantSection(form_into_multivector(alpha, pi), alpha))
    frame = SubbundleFrame(c, 1, sections)
    assert is_isotropic(frame).ok
    assert is_involutive(frame).ok
    pair = to_dl(frame)
    verdict = check_dl(pair)
    assert verdict.ok
    # eq-style bracket agreement: the form part of the frame bracket equals
    # the cotangent-algebroid bracket on basis covectors
    for i, si in enumerate(frame.sections):
        for j, sj in enumerate(frame.sections):
            bracket = dorfman_bracket(si, sj)
            direct = (
                lie_derivative(si.vector, sj.form)
                - lie_derivative(sj.vector, si.form)
                - exterior_derivative(
                    c.zero_form(0)
                    + type(si.form)(
                        c, 0, {(): scalar_bracket(pi, _covector_scalar(c, i), _covector_scalar(c, j))}
                    )
                )
            )
            assert bracket.form == direct


def _covector_scalar(chart, index):
    return chart.coordinate(chart.coords[index])


def test_check_dl_failures():
    c = Chart("space", ["x", "y", "z"])
    pair = to_dl(vertical_frame(c, [c.form("d(x)^d(y)")]))
    verdict = check_dl(pair)
    assert not verdict.ok
    assert not verdict.item("annihilator").ok
    assert verdict.item("antisymmetry").ok
    assert verdict.item("involutivity").ok


def test_lambda_bracket_values():
    # graph of the symplectic plane: bracket of dx, dy via the anchor
    c = Chart("plane", ["x", "y"])
    omega = c.form("d(x)^d(y)")
    pair = to_dl(graph_frame(omega))
    out = lambda_bracket(pair, c.form("d(x)"), c.form("d(y)"))
    assert out.is_zero  # constant forms, constant anchors

    with pytest.raises(NotInD):
        lambda_bracket(
            to_dl(vertical_frame(Chart("s", ["x", "y", "z"]), [Chart("s", ["x", "y", "z"]).form("d(x)^d(y)")])),
            Chart("s", ["x", "y", "z"]).form("d(x)^d(z)"),
            Chart("s", ["x", "y", "z"]).form("d(x)^d(y)"),
        )


def test_lambda_bracket_poisson_consistency():
    # for the graph of a Poisson bivector the bracket reproduces the
    # cotangent-algebroid bracket computed directly from the bivector
    c = Chart("dual", ["x1", "x2", "x3"])
    pi = c.multivector("x1*e(x2)^e(x3) + x2*e(x3)^e(x1) + x3*e(x1)^e(x2)")
    sections = []
    for name in c.coords:
        alpha = c.basis_covector(name)
        sections.append(CourantSection(form_into_multivector(alpha, pi), alpha))
    frame = SubbundleFrame(c, 1, sections)
    pair = to_dl(frame)
    for i in range(3):
        for j in range(3):
            alpha, beta = c.basis_covector(c.coords[i]), c.basis_covector(c.coords[j])
            lhs = lambda_bracket(pair, alpha, beta)
            xi = form_into_multivector(alpha, pi)
            xj = form_into_multivector(beta, pi)
            from msk.forms import DiffForm

            rhs = (
                lie_derivative(xi, beta)
                - lie_derivative(xj, alpha)
                - exterior_derivative(
                    DiffForm(c, 0, {(): scalar_bracket(pi, c.coordinate(c.coords[i]), c.coordinate(c.coords[j]))})
                )
            )
            assert lhs == rhs


def test_distribution_frame():
    chart, omega = multiphase_32()
    fields, rank = distribution_frame(graph_frame(omega))
    assert rank == 6
    c = Chart("space", ["x", "y", "z"])
    _, rank = distribution_frame(vertical_frame(c, [c.form("d(x)^d(y)")]))
    assert rank == 0


def test_leaf_form_recovers_plectic_form():
    chart, omega = multiphase_32()
    frame = graph_frame(omega)
    pt = SamplePoint(
        {c: Fraction(v, 2) for c, v in zip(chart.coords, (1, -2, 3, 5, 7, -1))}
    )
    leaf = leaf_form_at(frame, pt)
    assert len(leaf.basis) == 6
    from msk.forms import apply_alternating

    numeric = omega.evaluate_at(pt)
    for key, value in leaf.values.items():
        vectors = [leaf.basis[b] for b in key]
        assert value == apply_alternating(numeric, vectors)
    assert leaf.values  # the recovered tensor is not zero


def test_leaf_form_vertical_is_empty():
    c = Chart("space", ["x", "y", "z"])
    vert = vertical_frame(c, [c.form("d(x)^d(y)")])
    leaf = leaf_form_at(vert, SamplePoint({"x": 1, "y": 1, "z": 1}))
    assert leaf.basis == ()
    assert leaf.values == {}


def test_morphism_identity_and_constant():
    chart, omega = multiphase_32()
    pair = to_dl(graph_frame(omega))
    ident = SmoothMap.identity(chart)
    assert check_morphism(ident, pair, pair).ok

    # constant maps cannot match a nonzero anchor
    point_chart = Chart("pt", ["t"])
    values = ["1", "0", "0", "0", "0", "0"]
    const = SmoothMap(point_chart, chart, [point_chart.scalar(v) for v in values])
    vert_line = SubbundleFrame(
        point_chart,
        2,
        [],
    )
    # build a source structure with nothing in it: pullbacks of the target
    # frame forms vanish on a 1-dim chart, so membership passes while the
    # anchor condition fails
    source_pair = DLPair(
        chart=point_chart,
        k=2,
        forms=(),
        anchor=__import__("msk.linalg", fromlist=["SymMatrix"]).SymMatrix(point_chart.coords, [[]]),
    )
    verdict = check_morphism(const, source_pair, pair)
    assert not verdict.ok


def test_direct_product_of_plectic_graphs():
    c1 = Chart("left", ["x1", "y1"])
    c2 = Chart("right", ["x2", "y2"])
    f1 = graph_frame(c1.form("d(x1)^d(y1)"))
    f2 = graph_frame(c2.form("d(x2)^d(y2)"))
    product = direct_product(f1, f2)
    assert product.declared_rank == 4
    assert is_isotropic(product).ok
    assert is_involutive(product).ok
    assert check_nondeg_l(product).ok
    # product of two symplectic graphs is the graph of the block bivector
    # inverse to the forms (the contraction conventions put a sign here)
    pc = product.chart
    pi = pc.multivector("-e(x1)^e(y1) - e(x2)^e(y2)")
    sections = []
    for name in pc.coords:
        alpha = pc.basis_covector(name)
        sections.append(CourantSection(form_into_multivector(alpha, pi), alpha))
    graph_pi = SubbundleFrame(pc, 1, sections)
    assert spans_match(product, graph_pi)


def test_direct_product_with_zero_rank_factor():
    c1 = Chart("left", ["x1", "y1"])
    c2 = Chart("right", ["x2", "y2"])
    f1 = graph_frame(c1.form("d(x1)^d(y1)"))
    f2 = SubbundleFrame(c2, 1, [])
    product = direct_product(f1, f2)
    assert product.declared_rank == 2
    assert is_involutive(product).ok


def test_pointwise_independence_report():
    plane = Chart("plane", ["x", "y"])
    pi = plane.multivector("x*e(x)^e(y)")
    sections = []
    for name in plane.coords:
        alpha = plane.basis_covector(name)
        sections.append(CourantSection(form_into_multivector(alpha, pi), alpha))
    frame = SubbundleFrame(plane, 1, sections)
    good = frame.pointwise_independent([SamplePoint({"x": 1, "y": 2})])
    assert good.ok
    # the form parts keep the frame independent even where the bivector
    # vanishes, so check the tangent-degenerate point on a graph frame
    graph = graph_frame(plane.form("d(x)^d(y)"))
    assert graph.pointwise_independent([SamplePoint({"x": 0, "y": 0})]).ok


def test_lambda_self_bracket_is_exact_term():
    from msk.forms import exterior_derivative, interior_product

    chart = Chart("hemi2", ["q1", "q2", "q3", "p12", "p13", "p23"])
    omega = chart.form(
        "d(p12)^d(q1)^d(q2) + d(p13)^d(q1)^d(q3) + d(p23)^d(q2)^d(q3)"
    )
    pair = to_dl(graph_frame(omega))
    alpha = pair.forms[0]
    anchored = pair.anchor_field(0)
    lhs = lambda_bracket(pair, alpha, alpha)
    rhs = exterior_derivative(interior_product(anchored, alpha))
    assert (lhs - rhs).is_zero


def test_check_dl_on_plectic_graph_all_pass():
    chart, omega = multiphase_32()
    pair = to_dl(graph_frame(omega))
    verdict = check_dl(pair)
    assert verdict.ok
    assert verdict.item("annihilator").ok
    assert verdict.item("antisymmetry").ok
    assert verdict.item("involutivity").ok


def test_check_dl_zero_anchor_full_basis():
    c = Chart("space", ["x", "y", "z"])
    full = vertical_frame(
        c, [c.form("d(x)^d(y)"), c.form("d(x)^d(z)"), c.form("d(y)^d(z)")]
    )
    pair = to_dl(full)
    verdict = check_dl(pair)
    assert verdict.ok


def test_product_with_vertical_factor_has_first_factor_leaves():
    from msk.catalog import canonical_multiphase, full_vertical, graph_of_form

    space = canonical_multiphase(2, 2, suffix="pl")
    product = direct_product(graph_of_form(space.omega), full_vertical(2, 2, suffix="v"))
    fields, rank = distribution_frame(product)
    assert rank == space.chart.dim
    # tangent parts live purely in the first factor
    offset = space.chart.dim
    for field in fields:
        for (j,), coeff in field.coeffs.items():
            assert j < offset or coeff.is_zero
