"""The bundle TM + k-th exterior power of T*M: pairing, bracket, subbundles.

Sections are pairs (X, alpha) of a vector field and a k-form.  Subbundles
are presented by explicit frames of sections on a single chart; constant
rank is an input contract verified generically at construction and at
sample points on request.  Involutivity is checked on frame pairs, which
suffices for function-linear combinations exactly when the frame is
isotropic (the bracket's first-slot anomaly is d(f) wedge the pairing), so
isotropy failures are reported first.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import (
    ChartMismatch,
    DegreeMismatch,
    FrameDependent,
    InvariantViolation,
    NotInD,
    PointNotOnLeafSpan,
    ProjectionNotInjective,
)
from .forms import (
    Chart,
    DiffForm,
    MultiVectorField,
    SmoothMap,
    differential_apply,
    exterior_derivative,
    interior_product,
    lie_bracket_vf,
    lie_derivative,
    pullback,
)
from .linalg import (
    Residual,
    SymMatrix,
    fraction_rank,
    fraction_solve,
    in_span,
    rank_at_points,
    rref,
)
from .plectic import form_keys, form_vector
from .verdicts import GENERIC, IDENTICAL, SAMPLED, Verdict


@dataclass(frozen=True)
class CourantSection:
    """A section (X, alpha) of TM + the k-th exterior power of T*M."""

    vector: MultiVectorField
    form: DiffForm

    def __post_init__(self):
        if self.vector.chart != self.form.chart:
            raise ChartMismatch("vector and form parts live on different charts")
        if self.vector.degree != 1:
            raise DegreeMismatch("vector part must have degree 1")

    @property
    def chart(self) -> Chart:
        return self.vector.chart

    @property
    def k(self) -> int:
        return self.form.degree

    @property
    def is_zero(self) -> bool:
        return self.vector.is_zero and self.form.is_zero

    def __add__(self, other: "CourantSection") -> "CourantSection":
        return CourantSection(self.vector + other.vector, self.form + other.form)

    def __sub__(self, other: "CourantSection") -> "CourantSection":
        return CourantSection(self.vector - other.vector, self.form - other.form)

    def __neg__(self) -> "CourantSection":
        return CourantSection(-self.vector, -self.form)

    def scaled(self, factor) -> "CourantSection":
        return CourantSection(self.vector.scaled(factor), self.form.scaled(factor))

    def __eq__(self, other):
        if not isinstance(other, CourantSection):
            return NotImplemented
        return self.vector == other.vector and self.form == other.form


def pairing(s1: CourantSection, s2: CourantSection) -> DiffForm:
    """Symmetric (k-1)-form-valued pairing i_X beta + i_Y alpha."""
    _check_sections(s1, s2)
    chart = s1.chart
    total = chart.zero_form(s1.k - 1)
    if not s1.vector.is_zero and not s2.form.is_zero:
        total = total + interior_product(s1.vector, s2.form)
    if not s2.vector.is_zero and not s1.form.is_zero:
        total = total + interior_product(s2.vector, s1.form)
    return total


def dorfman_bracket(s1: CourantSection, s2: CourantSection) -> CourantSection:
    """([X, Y], L_X beta - i_Y d alpha); non-skew with defect (0, d i_X alpha)."""
    _check_sections(s1, s2)
    chart = s1.chart
    vector = lie_bracket_vf(s1.vector, s2.vector)
    form = lie_derivative(s1.vector, s2.form)
    d_alpha = exterior_derivative(s1.form)
    if not s2.vector.is_zero and not d_alpha.is_zero:
        form = form - interior_product(s2.vector, d_alpha)
    return CourantSection(vector, form)


def _check_sections(s1: CourantSection, s2: CourantSection):
    if s1.chart != s2.chart:
        raise ChartMismatch(f"{s1.chart!r} vs {s2.chart!r}")
    if s1.k != s2.k:
        raise DegreeMismatch(f"form degrees {s1.k} vs {s2.k}")


class SubbundleFrame:
    """A subbundle of TM + the k-th exterior power, presented by a frame.

    The sections must be generically independent; the declared rank is the
    frame length.  Pointwise independence at samples is a separate check.
    """

    __slots__ = ("chart", "k", "sections")

    def __init__(self, chart: Chart, k: int, sections: Sequence[CourantSection]):
        sections = tuple(sections)
        for s in sections:
            if s.chart != chart:
                raise ChartMismatch("section on a different chart")
            if s.k != k:
                raise DegreeMismatch("section of a different form degree")
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "sections", sections)
        if sections:
            data = rref(self._stacked())
            if data.rank != len(sections):
                raise FrameDependent(
                    f"declared rank {len(sections)}, generic rank {data.rank}"
                )

    def __setattr__(self, name, value):
        raise AttributeError("SubbundleFrame is immutable")

    @property
    def declared_rank(self) -> int:
        return len(self.sections)

    def section_vector(self, s: CourantSection):
        keys = form_keys(self.chart, self.k)
        return [s.vector.coefficient((j,)) for j in range(self.chart.dim)] + [
            s.form.coefficient(key) for key in keys
        ]

    def vector_to_section(self, vec) -> CourantSection:
        dim = self.chart.dim
        keys = form_keys(self.chart, self.k)
        vector = MultiVectorField(
            self.chart, 1, {(j,): vec[j] for j in range(dim)}
        )
        form = DiffForm(self.chart, self.k, dict(zip(keys, vec[dim:])))
        return CourantSection(vector, form)

    def _stacked(self) -> SymMatrix:
        return SymMatrix(
            self.chart.coords, [self.section_vector(s) for s in self.sections]
        )

    def pointwise_independent(self, points) -> Verdict:
        matrix = self._stacked()
        ranks = rank_at_points(matrix, points)
        bad = [pt for pt, r in zip(points, ranks) if r != len(self.sections)]
        if bad:
            return Verdict.failing(
                SAMPLED,
                points=tuple(points),
                notes="frame rank drops at " + "; ".join(pt.format() for pt in bad),
            )
        return Verdict.passing(SAMPLED, points=tuple(points))

    def __repr__(self):
        return f"SubbundleFrame(chart={self.chart.name!r}, k={self.k}, rank={self.declared_rank})"


@dataclass(frozen=True)
class DLPair:
    """A k-Poisson candidate as a form subbundle D with an anchor map into TM.

    ``forms`` frames D; ``anchor`` is the dim x rank matrix whose column i
    holds the vector field attached to the i-th frame form.
    """

    chart: Chart
    k: int
    forms: tuple
    anchor: SymMatrix

    def __post_init__(self):
        if self.anchor.rows != self.chart.dim or self.anchor.cols != len(self.forms):
            raise DegreeMismatch("anchor matrix must be dim x rank")
        stack = SymMatrix(
            self.chart.coords,
            [form_vector(f, form_keys(self.chart, self.k)) for f in self.forms],
        )
        if self.forms and rref(stack).rank != len(self.forms):
            raise FrameDependent("form frame is generically dependent")

    @property
    def rank(self) -> int:
        return len(self.forms)

    def anchor_field(self, i: int) -> MultiVectorField:
        return MultiVectorField(
            self.chart, 1, {(j,): self.anchor.entry(j, i) for j in range(self.chart.dim)}
        )

    def anchor_of(self, coefficients) -> MultiVectorField:
        """Anchor applied to a frame combination with scalar coefficients."""
        chart = self.chart
        coeffs = {}
        for j in range(chart.dim):
            total = chart.constant(0)
            for i, c in enumerate(coefficients):
                total = total + c * self.anchor.entry(j, i)
            if not total.is_zero:
                coeffs[(j,)] = total
        return MultiVectorField(chart, 1, coeffs)

    def coefficients_of(self, form: DiffForm):
        """Express a k-form over the D frame; NotInD when outside the span."""
        keys = form_keys(self.chart, self.k)
        rows = [form_vector(f, keys) for f in self.forms]
        out = in_span(rows, form_vector(form, keys), coords=self.chart.coords)
        if isinstance(out, Residual):
            raise NotInD("form lies outside the declared subbundle")
        return out


# ---------------------------------------------------------------------------
# Frame checks
# ---------------------------------------------------------------------------


def is_isotropic(frame: SubbundleFrame) -> Verdict:
    """Pairing of every frame pair vanishes identically."""
    for i, si in enumerate(frame.sections):
        for j in range(i, len(frame.sections)):
            p = pairing(si, frame.sections[j])
            if not p.is_zero:
                return Verdict.failing(
                    IDENTICAL,
                    residual=p,
                    notes=f"pairing of frame sections {i} and {j} is nonzero",
                )
    return Verdict.passing(IDENTICAL)


def is_involutive(frame: SubbundleFrame) -> Verdict:
    """Brackets of frame pairs stay in the frame's function-linear span.

    Frame-pair checking is only conclusive on isotropic frames (the
    first-slot Leibniz anomaly of the bracket is d(f) wedge the pairing),
    so isotropy is verified first and reported on failure.
    """
    iso = is_isotropic(frame)
    if not iso.ok:
        return Verdict.failing(
            IDENTICAL,
            residual=iso.residual,
            notes="isotropy fails, involutivity on frame pairs is inconclusive; "
            + iso.notes,
        )
    rows = [frame.section_vector(s) for s in frame.sections]
    for i, si in enumerate(frame.sections):
        for j, sj in enumerate(frame.sections):
            bracket = dorfman_bracket(si, sj)
            if bracket.is_zero:
                continue
            out = in_span(rows, frame.section_vector(bracket), coords=frame.chart.coords)
            if isinstance(out, Residual):
                residual = frame.vector_to_section(out.vector)
                return Verdict.failing(
                    IDENTICAL,
                    residual=residual,
                    notes=f"bracket of frame sections {i} and {j} leaves the span",
                )
    return Verdict.passing(IDENTICAL)


def _annihilator_matrix(chart: Chart, k: int, forms) -> SymMatrix:
    """Rows index (form, (k-1)-tuple); columns index tangent components."""
    keys = form_keys(chart, k - 1)
    entries = []
    for f in forms:
        rows = [[chart.constant(0) for _ in range(chart.dim)] for _ in keys]
        key_pos = {key: r for r, key in enumerate(keys)}
        for j in range(chart.dim):
            if f.is_zero:
                continue
            contracted = interior_product(chart.basis_vector(chart.coords[j]), f)
            for key, value in contracted.coeffs.items():
                rows[key_pos[key]][j] = value
        entries.extend(rows)
    return SymMatrix(chart.coords, entries)


def check_nondeg_l(frame: SubbundleFrame, mode: str = GENERIC, points=()) -> Verdict:
    """No tangent vector annihilates every form part of the frame."""
    chart = frame.chart
    matrix = _annihilator_matrix(chart, frame.k, [s.form for s in frame.sections])
    if mode == SAMPLED:
        ranks = rank_at_points(matrix, points)
        bad = [(pt, r) for pt, r in zip(points, ranks) if r != chart.dim]
        if bad:
            return Verdict.failing(
                SAMPLED,
                points=tuple(points),
                notes="; ".join(f"rank {r} at {pt.format()}" for pt, r in bad),
            )
        return Verdict.passing(SAMPLED, points=tuple(points))
    data = rref(matrix)
    if data.kernel_basis:
        witness = MultiVectorField(
            chart, 1, {(j,): v for j, v in enumerate(data.kernel_basis[0])}
        )
        return Verdict.failing(GENERIC, residual=witness, loci=data.pivot_denominators)
    return Verdict.passing(GENERIC, loci=data.pivot_denominators)


def _perp_matrix(frame: SubbundleFrame) -> SymMatrix:
    """Constraint matrix for (Y, beta) orthogonal to every frame section.

    Unknown layout: dim tangent components, then form components on the
    increasing k-tuples.  One row per (section, (k-1)-tuple).
    """
    chart = frame.chart
    k = frame.k
    km1 = form_keys(chart, k - 1)
    kk = form_keys(chart, k)
    width = chart.dim + len(kk)
    entries = []
    for s in frame.sections:
        rows = [[chart.constant(0) for _ in range(width)] for _ in km1]
        pos = {key: r for r, key in enumerate(km1)}
        for j in range(chart.dim):
            if s.form.is_zero:
                continue
            contracted = interior_product(chart.basis_vector(chart.coords[j]), s.form)
            for key, value in contracted.coeffs.items():
                rows[pos[key]][j] = rows[pos[key]][j] + value
        if not s.vector.is_zero:
            for c, key in enumerate(kk):
                basis = DiffForm(chart, k, {key: chart.constant(1)})
                contracted = interior_product(s.vector, basis)
                for key2, value in contracted.coeffs.items():
                    rows[pos[key2]][chart.dim + c] = rows[pos[key2]][chart.dim + c] + value
        entries.extend(rows)
    return SymMatrix(chart.coords, entries)


@dataclass(frozen=True)
class OrthogonalProfile:
    """Exact pointwise dimensions of the orthogonal and its tangent slice."""

    generic_perp_dim: int
    equals_perp_generically: bool
    per_point: tuple  # (point, dim perp, dim perp intersect TM)


def orthogonal_profile(frame: SubbundleFrame, points) -> OrthogonalProfile:
    chart = frame.chart
    matrix = _perp_matrix(frame)
    total = chart.dim + len(form_keys(chart, frame.k))
    generic_rank = rref(matrix).rank
    generic_perp = total - generic_rank
    iso = is_isotropic(frame)
    equal = iso.ok and generic_perp == frame.declared_rank
    rows = []
    for pt in points:
        numeric = matrix.evaluate_at(pt)
        rank_full = fraction_rank(numeric)
        tangent_block = [row[: chart.dim] for row in numeric]
        rank_tangent = fraction_rank(tangent_block)
        rows.append((pt, total - rank_full, chart.dim - rank_tangent))
    return OrthogonalProfile(
        generic_perp_dim=generic_perp,
        equals_perp_generically=equal,
        per_point=tuple(rows),
    )


# ---------------------------------------------------------------------------
# The (D, anchor) description
# ---------------------------------------------------------------------------


def to_dl(frame: SubbundleFrame) -> DLPair:
    """Project a frame onto its form parts; needs that projection injective."""
    chart = frame.chart
    keys = form_keys(chart, frame.k)
    stack = SymMatrix(
        chart.coords, [form_vector(s.form, keys) for s in frame.sections]
    )
    if frame.sections and rref(stack).rank != len(frame.sections):
        raise ProjectionNotInjective(
            "form parts of the frame are generically dependent"
        )
    anchor = SymMatrix(
        chart.coords,
        [
            [s.vector.coefficient((j,)) for s in frame.sections]
            for j in range(chart.dim)
        ],
    )
    return DLPair(chart=chart, k=frame.k, forms=tuple(s.form for s in frame.sections), anchor=anchor)


def from_dl(pair: DLPair) -> SubbundleFrame:
    sections = [
        CourantSection(pair.anchor_field(i), pair.forms[i]) for i in range(pair.rank)
    ]
    return SubbundleFrame(pair.chart, pair.k, sections)


def spans_match(f1: SubbundleFrame, f2: SubbundleFrame) -> bool:
    """Two-sided membership of each frame in the span of the other."""
    rows1 = [f1.section_vector(s) for s in f1.sections]
    rows2 = [f2.section_vector(s) for s in f2.sections]
    for v in rows2:
        if isinstance(in_span(rows1, v, coords=f1.chart.coords), Residual):
            return False
    for v in rows1:
        if isinstance(in_span(rows2, v, coords=f1.chart.coords), Residual):
            return False
    return True


def lambda_bracket(pair: DLPair, alpha: DiffForm, beta: DiffForm) -> DiffForm:
    """L_{anchor(alpha)} beta - i_{anchor(beta)} d alpha on sections of D.

    The equivalent second expression (antisymmetrized, with an exact
    correction) is recomputed as an internal consistency assertion; it
    agrees exactly when the pair satisfies the antisymmetry condition.
    """
    ca = pair.coefficients_of(alpha)
    cb = pair.coefficients_of(beta)
    xa = pair.anchor_of(ca)
    xb = pair.anchor_of(cb)
    first = lie_derivative(xa, beta)
    d_alpha = exterior_derivative(alpha)
    if not xb.is_zero and not d_alpha.is_zero:
        first = first - interior_product(xb, d_alpha)
    alt = lie_derivative(xa, beta) - lie_derivative(xb, alpha)
    if not xa.is_zero and not beta.is_zero:
        alt = alt - exterior_derivative(interior_product(xa, beta))
    if not (first - alt).is_zero:
        raise InvariantViolation(
            "bracket expressions disagree; the pair violates antisymmetry"
        )
    return first


def check_dl(pair: DLPair, mode: str = GENERIC, points=()) -> Verdict:
    """Itemized annihilator, antisymmetry, and involutivity conditions."""
    chart = pair.chart
    matrix = _annihilator_matrix(chart, pair.k, pair.forms)
    if mode == SAMPLED:
        ranks = rank_at_points(matrix, points)
        ok = all(r == chart.dim for r in ranks)
        annihilator = (
            Verdict.passing(SAMPLED, points=tuple(points))
            if ok
            else Verdict.failing(SAMPLED, points=tuple(points))
        )
    else:
        data = rref(matrix)
        if data.kernel_basis:
            witness = MultiVectorField(
                chart, 1, {(j,): v for j, v in enumerate(data.kernel_basis[0])}
            )
            annihilator = Verdict.failing(
                GENERIC, residual=witness, loci=data.pivot_denominators
            )
        else:
            annihilator = Verdict.passing(GENERIC, loci=data.pivot_denominators)

    antisym = Verdict.passing(IDENTICAL)
    for i in range(pair.rank):
        xi = pair.anchor_field(i)
        for j in range(i, pair.rank):
            xj = pair.anchor_field(j)
            left = (
                interior_product(xi, pair.forms[j])
                if not xi.is_zero
                else chart.zero_form(pair.k - 1)
            )
            right = (
                interior_product(xj, pair.forms[i])
                if not xj.is_zero
                else chart.zero_form(pair.k - 1)
            )
            total = left + right
            if not total.is_zero:
                antisym = Verdict.failing(
                    IDENTICAL,
                    residual=total,
                    notes=f"antisymmetry fails on frame forms {i} and {j}",
                )
                break
        if not antisym.ok:
            break

    if antisym.ok:
        involutive = Verdict.passing(IDENTICAL)
        for i in range(pair.rank):
            for j in range(pair.rank):
                bracket = lambda_bracket(pair, pair.forms[i], pair.forms[j])
                try:
                    coeffs = pair.coefficients_of(bracket)
                except NotInD:
                    involutive = Verdict.failing(
                        IDENTICAL,
                        residual=bracket,
                        notes=f"bracket of frame forms {i} and {j} leaves the subbundle",
                    )
                    break
                anchored = pair.anchor_of(coeffs)
                direct = lie_bracket_vf(pair.anchor_field(i), pair.anchor_field(j))
                if not (anchored - direct).is_zero:
                    involutive = Verdict.failing(
                        IDENTICAL,
                        residual=anchored - direct,
                        notes=f"anchor does not intertwine the bracket on forms {i}, {j}",
                    )
                    break
            if not involutive.ok:
                break
    else:
        involutive = Verdict.failing(notes="skipped: antisymmetry failed")

    return Verdict.combine(
        [("annihilator", annihilator), ("antisymmetry", antisym), ("involutivity", involutive)],
        validity=annihilator.validity,
    )


def distribution_frame(frame: SubbundleFrame):
    """Tangent parts of the frame with their generic rank."""
    chart = frame.chart
    fields = [s.vector for s in frame.sections]
    matrix = SymMatrix(
        chart.coords,
        [[v.coefficient((j,)) for j in range(chart.dim)] for v in fields],
    )
    rank = rref(matrix).rank if frame.sections else 0
    return fields, rank


@dataclass(frozen=True)
class LeafForm:
    """Numeric leafwise (k+1)-tensor on a basis of the distribution at a point."""

    point: object
    basis: tuple
    degree: int
    values: dict


def leaf_form_at(frame: SubbundleFrame, point) -> LeafForm:
    """Evaluate the induced leafwise form on the distribution at a point.

    The first argument of the tensor is fed through an anchor preimage;
    when the preimage is not unique, the value is recomputed with a second
    preimage and must agree (well-definedness of the leaf form).
    """
    chart = frame.chart
    pt = chart.point(point)
    k = frame.k
    tangents = [
        [s.vector.coefficient((j,)).evaluate(pt) for j in range(chart.dim)]
        for s in frame.sections
    ]
    forms_numeric = [s.form.evaluate_at(pt) for s in frame.sections]
    # greedy independent subset of the tangent parts
    basis = []
    basis_sections = []
    for idx, vec in enumerate(tangents):
        if fraction_rank(basis + [vec]) > len(basis):
            basis.append(vec)
            basis_sections.append(idx)
    degree = k + 1
    values = {}
    if len(basis) >= degree:
        columns = list(zip(*tangents)) if tangents else []
        for key in combinations(range(len(basis)), degree):
            lead = key[0]
            rest_vectors = [basis[b] for b in key[1:]]
            section_idx = basis_sections[lead]
            value = _apply_numeric_form(forms_numeric[section_idx], rest_vectors)
            # preimage ambiguity check: any kernel combination of the tangent
            # parts must contract to the same value
            solved = fraction_solve(
                [list(row) for row in columns], basis[lead]
            )
            if solved is None:
                raise PointNotOnLeafSpan("basis vector escapes the anchored span")
            _, kernel = solved
            for kv in kernel[:1]:
                shifted = {}
                for i, c in enumerate(kv):
                    if not c:
                        continue
                    for fkey, fval in forms_numeric[i].items():
                        shifted[fkey] = shifted.get(fkey, Fraction(0)) + c * fval
                alt = value + _apply_numeric_form(shifted, rest_vectors)
                if alt != value:
                    raise InvariantViolation(
                        "leaf form value depends on the anchor preimage"
                    )
            if value:
                values[key] = value
    return LeafForm(point=pt, basis=tuple(tuple(v) for v in basis), degree=degree, values=values)


def _apply_numeric_form(values: dict, vectors) -> Fraction:
    from .forms import apply_alternating

    return apply_alternating(values, vectors)


def check_morphism(mapping: SmoothMap, source_pair: DLPair, target_pair: DLPair) -> Verdict:
    """Pullbacks of target frame forms land in the source subbundle and the
    differential intertwines the anchors, both as exact identities."""
    if mapping.source != source_pair.chart or mapping.target != target_pair.chart:
        raise ChartMismatch("map endpoints do not match the structures")
    items = []
    for i, beta in enumerate(target_pair.forms):
        pulled = pullback(mapping, beta)
        try:
            coeffs = source_pair.coefficients_of(pulled)
        except NotInD:
            items.append(
                (
                    f"pullback[{i}]",
                    Verdict.failing(
                        IDENTICAL,
                        residual=pulled,
                        notes="pullback leaves the source subbundle",
                    ),
                )
            )
            continue
        items.append((f"pullback[{i}]", Verdict.passing(IDENTICAL)))
        pushed = differential_apply(mapping, source_pair.anchor_of(coeffs))
        target_field = target_pair.anchor_field(i)
        subs = mapping.substitution()
        ok = True
        for j in range(target_pair.chart.dim):
            expected = target_field.coefficient((j,)).substitute(
                subs, coords=mapping.source.coords
            )
            if not (pushed.components[j] - expected).is_zero:
                ok = False
                break
        items.append(
            (
                f"anchor[{i}]",
                Verdict.passing(IDENTICAL)
                if ok
                else Verdict.failing(
                    IDENTICAL, notes="differential does not match the target anchor"
                ),
            )
        )
    return Verdict.combine(items)


def product_chart(c1: Chart, c2: Chart, name: str | None = None) -> Chart:
    overlap = set(c1.coords) & set(c2.coords)
    if overlap:
        raise ChartMismatch(f"product factors share coordinates {sorted(overlap)}")
    return Chart(name or f"{c1.name}*{c2.name}", c1.coords + c2.coords)


def factor_projection(product: Chart, factor: Chart, offset: int) -> SmoothMap:
    comps = [product.coordinate(factor.coords[i]) for i in range(factor.dim)]
    return SmoothMap(product, factor, comps)


def extend_vector(field: MultiVectorField, product: Chart, offset: int) -> MultiVectorField:
    """Lift a factor vector field to the product (zero in the other factor)."""
    source = field.chart
    subs = {name: product.coordinate(name) for name in source.coords}
    coeffs = {}
    for key, value in field.coeffs.items():
        new_key = tuple(i + offset for i in key)
        coeffs[new_key] = value.substitute(subs, coords=product.coords)
    return MultiVectorField(product, field.degree, coeffs)


def extend_form(form: DiffForm, product: Chart, offset: int) -> DiffForm:
    source = form.chart
    subs = {name: product.coordinate(name) for name in source.coords}
    coeffs = {}
    for key, value in form.coeffs.items():
        new_key = tuple(i + offset for i in key)
        coeffs[new_key] = value.substitute(subs, coords=product.coords)
    return DiffForm(product, form.degree, coeffs)


def direct_product(f1: SubbundleFrame, f2: SubbundleFrame, name: str | None = None) -> SubbundleFrame:
    """Frame of the product structure: factor sections lifted and unioned."""
    if f1.k != f2.k:
        raise DegreeMismatch(f"factors have k = {f1.k} and {f2.k}")
    product = product_chart(f1.chart, f2.chart, name)
    offset = f1.chart.dim
    sections = [
        CourantSection(extend_vector(s.vector, product, 0), extend_form(s.form, product, 0))
        for s in f1.sections
    ] + [
        CourantSection(
            extend_vector(s.vector, product, offset), extend_form(s.form, product, offset)
        )
        for s in f2.sections
    ]
    return SubbundleFrame(product, f1.k, sections)
