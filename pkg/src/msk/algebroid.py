"""Lie algebroids in coordinates and infinitesimally multiplicative forms.

An algebroid is frame-presented: an anchor matrix whose columns are the
anchor images of the frame sections, and structure functions expanded over
the frame.  Bundle maps into the k-th exterior power are frames of k-forms,
one per algebroid frame element.  All checks are exact identities of
rational functions; rank conditions carry the usual generic/sampled labels.
"""

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .courant import SubbundleFrame, dorfman_bracket
from .errors import DegreeMismatch, InvariantViolation
from .forms import (
    Chart,
    DiffForm,
    MultiVectorField,
    exterior_derivative,
    interior_product,
    lie_bracket_vf,
    lie_derivative,
)
from .linalg import Residual, SymMatrix, in_span, rank_at_points, rref
from .plectic import form_keys, form_vector
from .scalars import Polynomial, RationalFunction
from .verdicts import GENERIC, IDENTICAL, SAMPLED, Verdict


class LieAlgebroid:
    """Anchor matrix plus structure functions over a base chart.

    ``anchor`` is dim x rank; ``structure`` maps (i, j, l) with i < j to the
    coefficient of frame element l in the bracket of frame elements i, j.
    Antisymmetry in (i, j) is part of the storage convention.
    """

    __slots__ = ("base", "rank", "anchor", "structure")

    def __init__(self, base: Chart, rank: int, anchor: SymMatrix, structure: Mapping):
        if anchor.rows != base.dim or anchor.cols != rank:
            raise DegreeMismatch("anchor matrix must be dim x rank")
        clean = {}
        for (i, j, l), value in structure.items():
            if not (0 <= i < rank and 0 <= j < rank and 0 <= l < rank):
                raise ValueError(f"structure index {(i, j, l)} out of range")
            if i == j:
                raise ValueError("diagonal structure functions must vanish")
            if i > j:
                raise ValueError("store structure functions with i < j only")
            v = value if isinstance(value, RationalFunction) else base.constant(value)
            if not v.is_zero:
                clean[(i, j, l)] = v
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "structure", clean)

    def __setattr__(self, name, value):
        raise AttributeError("LieAlgebroid is immutable")

    def structure_coefficient(self, i: int, j: int, l: int) -> RationalFunction:
        if i == j:
            return self.base.constant(0)
        if i < j:
            return self.structure.get((i, j, l), self.base.constant(0))
        c = self.structure.get((j, i, l), self.base.constant(0))
        return -c

    def anchor_field(self, i: int) -> MultiVectorField:
        return MultiVectorField(
            self.base, 1, {(j,): self.anchor.entry(j, i) for j in range(self.base.dim)}
        )

    def anchor_of(self, coefficients) -> MultiVectorField:
        chart = self.base
        coeffs = {}
        for j in range(chart.dim):
            total = chart.constant(0)
            for i, c in enumerate(coefficients):
                total = total + c * self.anchor.entry(j, i)
            if not total.is_zero:
                coeffs[(j,)] = total
        return MultiVectorField(chart, 1, coeffs)

    def bracket_frame(self, i: int, j: int):
        """Coefficients of the bracket of frame elements i and j."""
        return [self.structure_coefficient(i, j, l) for l in range(self.rank)]

    def bracket_sections(self, a: Sequence, b: Sequence):
        """Bracket of function-coefficient sections, expanded over the frame.

        Uses bilinearity plus the defining Leibniz rule in both slots.
        """
        chart = self.base
        out = [chart.constant(0) for _ in range(self.rank)]
        for i in range(self.rank):
            ai = a[i]
            if ai.is_zero:
                continue
            rho_i = self.anchor_field(i)
            for j in range(self.rank):
                bj = b[j]
                if not bj.is_zero:
                    for l in range(self.rank):
                        c = self.structure_coefficient(i, j, l)
                        if not c.is_zero:
                            out[l] = out[l] + ai * bj * c
                derived = _apply_field(rho_i, b[j])
                if not derived.is_zero:
                    out[j] = out[j] + ai * derived
        for j in range(self.rank):
            bj = b[j]
            if bj.is_zero:
                continue
            rho_j = self.anchor_field(j)
            for i in range(self.rank):
                derived = _apply_field(rho_j, a[i])
                if not derived.is_zero:
                    out[i] = out[i] - bj * derived
        return out


def _apply_field(field: MultiVectorField, scalar: RationalFunction) -> RationalFunction:
    chart = field.chart
    total = chart.constant(0)
    for (j,), coeff in field.coeffs.items():
        total = total + coeff * scalar.derivative(chart.coords[j])
    return total


@dataclass(frozen=True)
class IMFormMap:
    """A bundle map into the k-th exterior power: one k-form per frame element."""

    algebroid: LieAlgebroid
    k: int
    forms: tuple

    def __post_init__(self):
        if len(self.forms) != self.algebroid.rank:
            raise DegreeMismatch("one form per algebroid frame element required")
        for f in self.forms:
            if f.degree != self.k:
                raise DegreeMismatch(f"expected degree {self.k}, got {f.degree}")
            if f.chart != self.algebroid.base:
                raise DegreeMismatch("form on a different chart")


def check_algebroid_axioms(algebroid: LieAlgebroid, seed: int = 0) -> Verdict:
    """Leibniz rule (random coefficient functions), Jacobi, anchor morphism."""
    chart = algebroid.base
    rank = algebroid.rank
    rng = random.Random(seed)

    leibniz = Verdict.passing(IDENTICAL)
    for i in range(rank):
        if not leibniz.ok:
            break
        for j in range(rank):
            f = _random_base_function(rng, chart)
            lhs = algebroid.bracket_sections(_unit(chart, rank, i), _scaled_unit(chart, rank, j, f))
            direct = algebroid.bracket_frame(i, j)
            rho_f = _apply_field(algebroid.anchor_field(i), f)
            ok = True
            for l in range(rank):
                expected = f * direct[l]
                if l == j:
                    expected = expected + rho_f
                if not (lhs[l] - expected).is_zero:
                    ok = False
                    break
            if not ok:
                leibniz = Verdict.failing(
                    IDENTICAL, notes=f"Leibniz rule fails on frame pair ({i}, {j})"
                )
                break

    jacobi = Verdict.passing(IDENTICAL)
    for i in range(rank):
        if not jacobi.ok:
            break
        for j in range(i + 1, rank):
            if not jacobi.ok:
                break
            for l in range(j + 1, rank):
                total = _jacobi_sum(algebroid, i, j, l)
                if any(not t.is_zero for t in total):
                    jacobi = Verdict.failing(
                        IDENTICAL, notes=f"Jacobi identity fails on ({i}, {j}, {l})"
                    )
                    break

    anchor = Verdict.passing(IDENTICAL)
    for i in range(rank):
        if not anchor.ok:
            break
        for j in range(i + 1, rank):
            lhs = algebroid.anchor_of(algebroid.bracket_frame(i, j))
            rhs = lie_bracket_vf(algebroid.anchor_field(i), algebroid.anchor_field(j))
            if not (lhs - rhs).is_zero:
                anchor = Verdict.failing(
                    IDENTICAL,
                    residual=lhs - rhs,
                    notes=f"anchor fails to intertwine the bracket on ({i}, {j})",
                )
                break

    return Verdict.combine(
        [("leibniz", leibniz), ("jacobi", jacobi), ("anchor_morphism", anchor)]
    )


def _unit(chart, rank, i):
    return [chart.constant(1 if l == i else 0) for l in range(rank)]


def _scaled_unit(chart, rank, i, f):
    return [f if l == i else chart.constant(0) for l in range(rank)]


def _random_base_function(rng, chart):
    if chart.dim == 0:
        return chart.constant(rng.randint(-3, 3))
    poly = Polynomial.zero(chart.coords)
    for _ in range(2):
        expo = [0] * chart.dim
        for _ in range(rng.randint(0, 2)):
            expo[rng.randrange(chart.dim)] += 1
        poly = poly + Polynomial(chart.coords, {tuple(expo): rng.randint(-3, 3)})
    if poly.is_zero:
        poly = Polynomial.constant(chart.coords, 1)
    return RationalFunction(poly)


def _jacobi_sum(algebroid, i, j, l):
    chart = algebroid.base
    rank = algebroid.rank
    total = [chart.constant(0) for _ in range(rank)]
    for a, b, c in ((i, j, l), (j, l, i), (l, i, j)):
        inner = algebroid.bracket_frame(b, c)
        outer = algebroid.bracket_sections(_unit(chart, rank, a), inner)
        for m in range(rank):
            total[m] = total[m] + outer[m]
    return total


def check_im_form(im: IMFormMap) -> Verdict:
    """The two defining identities; the first is a prerequisite of the second.

    Frame-pair verification of the second identity is only conclusive once
    the first holds, so it is reported as skipped otherwise.
    """
    algebroid = im.algebroid
    chart = algebroid.base
    rank = algebroid.rank
    first = Verdict.passing(IDENTICAL)
    for i in range(rank):
        if not first.ok:
            break
        for j in range(i, rank):
            left = _contract(algebroid.anchor_field(i), im.forms[j])
            right = _contract(algebroid.anchor_field(j), im.forms[i])
            total = left + right
            if not total.is_zero:
                first = Verdict.failing(
                    IDENTICAL,
                    residual=total,
                    notes=f"antisymmetry of contractions fails on ({i}, {j})",
                )
                break
    if not first.ok:
        return Verdict.combine(
            [
                ("antisymmetric_contraction", first),
                (
                    "bracket_derivation",
                    Verdict.failing(notes="skipped: the contraction condition failed"),
                ),
            ]
        )
    second = Verdict.passing(IDENTICAL)
    for i in range(rank):
        if not second.ok:
            break
        for j in range(rank):
            coeffs = algebroid.bracket_frame(i, j)
            lhs = chart.zero_form(im.k)
            for l, c in enumerate(coeffs):
                if not c.is_zero:
                    lhs = lhs + im.forms[l].scaled(c)
            rhs = lie_derivative(algebroid.anchor_field(i), im.forms[j])
            d_mu = exterior_derivative(im.forms[i])
            rho_j = algebroid.anchor_field(j)
            if not rho_j.is_zero and not d_mu.is_zero:
                rhs = rhs - interior_product(rho_j, d_mu)
            if not (lhs - rhs).is_zero:
                second = Verdict.failing(
                    IDENTICAL,
                    residual=lhs - rhs,
                    notes=f"derivation identity fails on ({i}, {j})",
                )
                break
    return Verdict.combine(
        [("antisymmetric_contraction", first), ("bracket_derivation", second)]
    )


def _contract(field: MultiVectorField, form: DiffForm) -> DiffForm:
    if field.is_zero or form.is_zero:
        return form.chart.zero_form(form.degree - 1)
    return interior_product(field, form)


def check_im_nondeg(im: IMFormMap, mode: str = GENERIC, points=()) -> Verdict:
    """Injectivity of the bundle map and triviality of its image annihilator."""
    algebroid = im.algebroid
    chart = algebroid.base
    keys = form_keys(chart, im.k)
    columns = [form_vector(f, keys) for f in im.forms]
    inject_matrix = SymMatrix(
        chart.coords,
        [[columns[i][r] for i in range(algebroid.rank)] for r in range(len(keys))],
    )
    from .courant import _annihilator_matrix

    ann_matrix = _annihilator_matrix(chart, im.k, list(im.forms))

    def rank_check(matrix, full):
        if mode == SAMPLED:
            ranks = rank_at_points(matrix, points)
            ok = all(r == full for r in ranks)
            return (
                Verdict.passing(SAMPLED, points=tuple(points))
                if ok
                else Verdict.failing(
                    SAMPLED,
                    points=tuple(points),
                    notes="; ".join(
                        f"rank {r} at {pt.format()}" for pt, r in zip(points, ranks) if r != full
                    ),
                )
            )
        data = rref(matrix)
        if data.rank != full:
            witness = data.kernel_basis[0] if data.kernel_basis else None
            return Verdict.failing(
                GENERIC, residual=witness, loci=data.pivot_denominators
            )
        return Verdict.passing(GENERIC, loci=data.pivot_denominators)

    injective = rank_check(inject_matrix, algebroid.rank)
    annihilator = rank_check(ann_matrix, chart.dim)
    if not annihilator.ok and annihilator.residual is not None and mode != SAMPLED:
        witness = MultiVectorField(
            chart, 1, {(j,): v for j, v in enumerate(annihilator.residual)}
        )
        annihilator = Verdict.failing(
            GENERIC,
            residual=witness,
            loci=annihilator.loci,
            notes=annihilator.notes,
        )
    return Verdict.combine(
        [("injective", injective), ("annihilator", annihilator)],
        validity=injective.validity,
    )


def algebroid_from_frame(frame: SubbundleFrame):
    """Algebroid structure carried by an isotropic involutive frame.

    Anchor columns are the tangent parts; structure functions are the span
    coefficients of the section brackets; the bundle map collects the form
    parts.  Non-involutive input surfaces as a span failure.
    """
    chart = frame.chart
    rank = frame.declared_rank
    anchor = SymMatrix(
        chart.coords,
        [[s.vector.coefficient((j,)) for s in frame.sections] for j in range(chart.dim)],
    )
    rows = [frame.section_vector(s) for s in frame.sections]
    structure = {}
    for i in range(rank):
        for j in range(i + 1, rank):
            bracket = dorfman_bracket(frame.sections[i], frame.sections[j])
            out = in_span(rows, frame.section_vector(bracket), coords=chart.coords)
            if isinstance(out, Residual):
                raise InvariantViolation(
                    f"frame is not involutive: bracket ({i}, {j}) leaves the span"
                )
            for l, c in enumerate(out):
                if not c.is_zero:
                    structure[(i, j, l)] = c
    algebroid = LieAlgebroid(chart, rank, anchor, structure)
    im = IMFormMap(algebroid=algebroid, k=frame.k, forms=tuple(s.form for s in frame.sections))
    return algebroid, im


def check_equivalence(im1: IMFormMap, im2: IMFormMap, mapping: SymMatrix) -> Verdict:
    """A frame map intertwining anchors, brackets, and bundle maps exactly."""
    a1, a2 = im1.algebroid, im2.algebroid
    chart = a1.base
    if a1.rank != a2.rank:
        raise DegreeMismatch("ranks differ")
    if mapping.rows != a2.rank or mapping.cols != a1.rank:
        raise DegreeMismatch("mapping matrix must be rank2 x rank1")
    rank = a1.rank

    invertible = (
        Verdict.passing(GENERIC, loci=rref(mapping).pivot_denominators)
        if rref(mapping).rank == rank
        else Verdict.failing(GENERIC, notes="mapping matrix is generically singular")
    )

    anchors = Verdict.passing(IDENTICAL)
    for i in range(rank):
        image = a2.anchor_of([mapping.entry(a, i) for a in range(rank)])
        if not (image - a1.anchor_field(i)).is_zero:
            anchors = Verdict.failing(
                IDENTICAL, notes=f"anchors disagree on frame element {i}"
            )
            break

    brackets = Verdict.passing(IDENTICAL)
    for i in range(rank):
        if not brackets.ok:
            break
        for j in range(i + 1, rank):
            lhs = [chart.constant(0) for _ in range(rank)]
            for l, c in enumerate(im1.algebroid.bracket_frame(i, j)):
                if not c.is_zero:
                    for a in range(rank):
                        lhs[a] = lhs[a] + c * mapping.entry(a, l)
            rhs = a2.bracket_sections(
                [mapping.entry(a, i) for a in range(rank)],
                [mapping.entry(a, j) for a in range(rank)],
            )
            if any(not (x - y).is_zero for x, y in zip(lhs, rhs)):
                brackets = Verdict.failing(
                    IDENTICAL, notes=f"brackets disagree on frame pair ({i}, {j})"
                )
                break

    forms = Verdict.passing(IDENTICAL)
    for i in range(rank):
        image = chart.zero_form(im2.k)
        for a in range(rank):
            c = mapping.entry(a, i)
            if not c.is_zero:
                image = image + im2.forms[a].scaled(c)
        if not (image - im1.forms[i]).is_zero:
            forms = Verdict.failing(
                IDENTICAL, notes=f"bundle maps disagree on frame element {i}"
            )
            break

    return Verdict.combine(
        [
            ("invertible", invertible),
            ("anchors", anchors),
            ("brackets", brackets),
            ("forms", forms),
        ]
    )
