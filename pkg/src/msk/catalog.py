"""Constructors for the example structures the engine verifies.

Every constructor returns fully populated live objects for the other
modules to check; ``build_scenario`` serializes the same objects into the
scenario format (charts, grammar-text payloads, default checks) so the CLI
can reproduce each instance byte-for-byte.  Group examples are realized at
the invariant, constant-coefficient level of the structure-constant
complex, where bi-invariant statements become finite computations.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .courant import (
    CourantSection,
    SubbundleFrame,
    extend_form,
    extend_vector,
    product_chart,
)
from .errors import (
    BadDegree,
    BadParameters,
    JacobiFails,
    NonConstantFrame,
    PairingNotInvariant,
    UnknownCatalogName,
)
from .forms import (
    Chart,
    DiffForm,
    MultiVectorField,
    SmoothMap,
    form_into_multivector,
    format_form,
    format_multivector,
    format_scalar,
    interior_product,
    wedge,
)
from .groupoid import GroupoidChart
from .linalg import SymMatrix, rref
from .plectic import PlecticCandidate, form_keys
from .scalars import RationalFunction
from .verdicts import GENERIC, Verdict


# ---------------------------------------------------------------------------
# Multiphase spaces, volumes, the flat quaternionic example
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultiphaseSpace:
    chart: Chart
    theta: DiffForm
    omega: DiffForm

    @property
    def k(self) -> int:
        return self.theta.degree


def _p_name(indices, wide: bool) -> str:
    sep = "_" if wide else ""
    return "p" + sep.join(str(i + 1) for i in indices)


def canonical_multiphase(n: int, k: int, suffix: str = "") -> MultiphaseSpace:
    """Chart of the k-th exterior power over an n-dim base, with its
    tautological k-form and the canonical (k+1)-form, its differential."""
    if not (1 <= k <= n):
        raise BadDegree(f"need 1 <= k <= n, got k={k}, n={n}")
    wide = n > 9
    q_names = [f"q{i + 1}{suffix}" for i in range(n)]
    p_names = [f"{_p_name(idx, wide)}{suffix}" for idx in combinations(range(n), k)]
    chart = Chart(f"multiphase{n}{k}{suffix}", q_names + p_names)
    coeffs = {}
    for pos, idx in enumerate(combinations(range(n), k)):
        coeffs[idx] = chart.coordinate(p_names[pos])
    theta = DiffForm(chart, k, coeffs)
    omega = theta.d()
    return MultiphaseSpace(chart=chart, theta=theta, omega=omega)


def volume_plectic(n: int, scale: str | None = None, suffix: str = "") -> PlecticCandidate:
    """The top form on an n-chart, optionally scaled by a nonvanishing factor."""
    if n < 2:
        raise BadDegree("volume forms need dimension >= 2")
    chart = Chart(f"vol{n}{suffix}", [f"x{i + 1}{suffix}" for i in range(n)])
    coeff = chart.constant(1) if scale is None else chart.scalar(scale)
    omega = DiffForm(chart, n, {tuple(range(n)): coeff})
    return PlecticCandidate(omega)


@dataclass(frozen=True)
class QuaternionicSpace:
    chart: Chart
    omega1: DiffForm
    omega2: DiffForm
    omega3: DiffForm
    omega: DiffForm


def flat_hyperkahler(suffix: str = "") -> QuaternionicSpace:
    """Constant-coefficient quaternionic triple on a 4-chart; the sum of the
    squares is a degree-4 form proportional to the volume, hence 3-plectic."""
    chart = Chart(f"hk4{suffix}", [f"x{i}{suffix}" for i in range(4)])
    w1 = chart.form(f"d(x0{suffix})^d(x1{suffix}) + d(x2{suffix})^d(x3{suffix})")
    w2 = chart.form(f"d(x0{suffix})^d(x2{suffix}) - d(x1{suffix})^d(x3{suffix})")
    w3 = chart.form(f"d(x0{suffix})^d(x3{suffix}) + d(x1{suffix})^d(x2{suffix})")
    omega = wedge(w1, w1) + wedge(w2, w2) + wedge(w3, w3)
    return QuaternionicSpace(chart=chart, omega1=w1, omega2=w2, omega3=w3, omega=omega)


# ---------------------------------------------------------------------------
# Constant-coefficient structure-constant complex (invariant group calculus)
# ---------------------------------------------------------------------------


class CEComplex:
    """Structure constants with a symmetric pairing on a constant chart.

    ``structure`` maps (i, j, l) with i < j to rational constants; the
    chart hosts constant-coefficient forms on which the structure
    differential acts.
    """

    __slots__ = ("dim", "structure", "pairing", "chart")

    def __init__(self, dim: int, structure: Mapping, pairing: Sequence[Sequence]):
        clean = {}
        for (i, j, l), value in structure.items():
            if i >= j:
                raise ValueError("store structure constants with i < j")
            if not (0 <= i < dim and 0 <= j < dim and 0 <= l < dim):
                raise ValueError("structure index out of range")
            v = Fraction(value)
            if v:
                clean[(i, j, l)] = v
        rows = tuple(tuple(Fraction(x) for x in row) for row in pairing)
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ValueError("pairing matrix must be dim x dim")
        for i in range(dim):
            for j in range(dim):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("pairing matrix must be symmetric")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "structure", clean)
        object.__setattr__(self, "pairing", rows)
        object.__setattr__(self, "chart", Chart(f"ce{dim}", [f"a{i + 1}" for i in range(dim)]))

    def __setattr__(self, name, value):
        raise AttributeError("CEComplex is immutable")

    def constant(self, i: int, j: int, l: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if i < j:
            return self.structure.get((i, j, l), Fraction(0))
        return -self.structure.get((j, i, l), Fraction(0))

    def jacobi_holds(self) -> bool:
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k in range(j + 1, self.dim):
                    for l in range(self.dim):
                        total = Fraction(0)
                        for m in range(self.dim):
                            total += (
                                self.constant(i, j, m) * self.constant(m, k, l)
                                + self.constant(j, k, m) * self.constant(m, i, l)
                                + self.constant(k, i, m) * self.constant(m, j, l)
                            )
                        if total:
                            return False
        return True

    def pairing_invariant(self) -> bool:
        for l in range(self.dim):
            for i in range(self.dim):
                for j in range(self.dim):
                    total = Fraction(0)
                    for m in range(self.dim):
                        total += (
                            self.constant(l, i, m) * self.pairing[m][j]
                            + self.constant(l, j, m) * self.pairing[i][m]
                        )
                    if total:
                        return False
        return True


def so3_complex() -> CEComplex:
    structure = {(0, 1, 2): 1, (0, 2, 1): -1, (1, 2, 0): 1}
    pairing = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    return CEComplex(3, structure, pairing)


def ce_differential(cx: CEComplex, form: DiffForm) -> DiffForm:
    """Degree-one derivation with d(basis covector) built from the constants.

    Defined for constant-coefficient forms on the complex's chart; squares
    to zero exactly when the Jacobi identity holds.
    """
    chart = cx.chart
    if form.chart != chart:
        raise ValueError("form must live on the complex's chart")
    for coeff in form.coeffs.values():
        if not coeff.is_constant():
            raise NonConstantFrame("the structure differential acts on constant forms")
    basis_d = {}

    def d_basis(m: int) -> DiffForm:
        if m not in basis_d:
            coeffs = {}
            for i in range(cx.dim):
                for j in range(i + 1, cx.dim):
                    c = cx.constant(i, j, m)
                    if c:
                        coeffs[(i, j)] = chart.constant(-c)
            basis_d[m] = DiffForm(chart, 2, coeffs)
        return basis_d[m]

    result = chart.zero_form(form.degree + 1)
    for key, coeff in form.coeffs.items():
        for pos, m in enumerate(key):
            rest_before = key[:pos]
            rest_after = key[pos + 1 :]
            part = d_basis(m)
            if part.is_zero:
                continue
            for i in reversed(rest_before):
                part = wedge(DiffForm(chart, 1, {(i,): chart.constant(1)}), part)
            for i in rest_after:
                part = wedge(part, DiffForm(chart, 1, {(i,): chart.constant(1)}))
            sign = coeff if pos % 2 == 0 else -coeff
            result = result + part.scaled(sign)
    return result


@dataclass(frozen=True)
class CartanData:
    three_form: DiffForm
    differential: DiffForm
    nondegenerate: Verdict


def ce_cartan(cx: CEComplex) -> CartanData:
    """The invariant 3-form pairing each element against brackets.

    Requires the Jacobi identity and the invariance of the pairing; the
    returned differential is computed (not assumed) and the contraction
    nondegeneracy is decided by exact elimination over the constants.
    """
    if not cx.jacobi_holds():
        raise JacobiFails("structure constants violate the Jacobi identity")
    if not cx.pairing_invariant():
        raise PairingNotInvariant("pairing is not invariant under the bracket")
    chart = cx.chart
    coeffs = {}
    for i in range(cx.dim):
        for j in range(i + 1, cx.dim):
            for k in range(j + 1, cx.dim):
                value = Fraction(0)
                for m in range(cx.dim):
                    value += cx.constant(j, k, m) * cx.pairing[i][m]
                if value:
                    coeffs[(i, j, k)] = chart.constant(value)
    three_form = DiffForm(chart, 3, coeffs)
    differential = ce_differential(cx, three_form)
    rows = []
    keys = form_keys(chart, 2)
    for key in keys:
        rows.append(
            [
                interior_product(chart.basis_vector(chart.coords[u]), three_form).coefficient(key)
                for u in range(cx.dim)
            ]
        )
    data = rref(SymMatrix(chart.coords, rows, cols=cx.dim))
    if data.kernel_basis:
        witness = MultiVectorField(
            chart, 1, {(j,): v for j, v in enumerate(data.kernel_basis[0])}
        )
        nondeg = Verdict.failing(GENERIC, residual=witness)
    else:
        nondeg = Verdict.passing(GENERIC)
    return CartanData(three_form=three_form, differential=differential, nondegenerate=nondeg)


# ---------------------------------------------------------------------------
# Frame constructors
# ---------------------------------------------------------------------------


def graph_of_form(omega: DiffForm) -> SubbundleFrame:
    """Frame (e_i, i_{e_i} omega): always isotropic; involutive iff closed."""
    chart = omega.chart
    sections = []
    for name in chart.coords:
        v = chart.basis_vector(name)
        sections.append(CourantSection(v, interior_product(v, omega)))
    return SubbundleFrame(chart, omega.degree - 1, sections)


def graph_of_top_multivector(pi: MultiVectorField) -> SubbundleFrame:
    """Frame (i_alpha pi, alpha) over the basis k-forms, for top-degree pi."""
    chart = pi.chart
    if pi.degree != chart.dim:
        raise BadDegree(
            f"need a top multivector: degree {pi.degree} on a {chart.dim}-chart"
        )
    k = chart.dim - 1
    sections = []
    for key in combinations(range(chart.dim), k):
        alpha = DiffForm(chart, k, {key: chart.constant(1)})
        vector = (
            form_into_multivector(alpha, pi)
            if not pi.is_zero
            else chart.zero_multivector(1)
        )
        sections.append(CourantSection(vector, alpha))
    return SubbundleFrame(chart, k, sections)


def vertical_subbundle(chart: Chart, forms: Sequence[DiffForm]) -> SubbundleFrame:
    """Frame (0, alpha_i): automatically isotropic and involutive."""
    k = forms[0].degree
    zero = chart.zero_multivector(1)
    return SubbundleFrame(chart, k, [CourantSection(zero, f) for f in forms])


def full_vertical(n: int, k: int, suffix: str = "") -> SubbundleFrame:
    if not (1 <= k <= n):
        raise BadDegree(f"need 1 <= k <= n, got k={k}, n={n}")
    chart = Chart(f"r{n}{suffix}", [f"x{i + 1}{suffix}" for i in range(n)])
    forms = [
        DiffForm(chart, k, {key: chart.constant(1)}) for key in combinations(range(n), k)
    ]
    return vertical_subbundle(chart, forms)


def line_bundle_frame(n: int = 4, xi_text: str | None = None, suffix: str = "") -> SubbundleFrame:
    """Line subbundle generated by one nondegenerate constant 2-form."""
    if n < 2 or n % 2:
        raise BadDegree("the default generator needs an even dimension >= 2")
    chart = Chart(f"r{n}{suffix}", [f"x{i + 1}{suffix}" for i in range(n)])
    if xi_text is None:
        pieces = [
            f"d(x{2 * i + 1}{suffix})^d(x{2 * i + 2}{suffix})" for i in range(n // 2)
        ]
        xi_text = " + ".join(pieces)
    xi = chart.form(xi_text, degree=2)
    return vertical_subbundle(chart, [xi])


def scaled_family(
    omega: DiffForm, fiber: Chart, factor: RationalFunction
) -> SubbundleFrame:
    """Graph sections scaled by a base-of-fiber function, plus fiber forms.

    The fiber block of vertical k-forms is present only when the fiber is
    wide enough to carry them.  The frame is involutive exactly when the
    scaling function is constant.
    """
    if factor.coords != fiber.coords:
        raise BadParameters("scaling factor must be a function on the fiber chart")
    base = omega.chart
    k = omega.degree - 1
    total = product_chart(base, fiber)
    lifted_factor = factor.substitute(
        {name: total.coordinate(name) for name in fiber.coords}, coords=total.coords
    )
    sections = []
    for name in base.coords:
        v = base.basis_vector(name)
        alpha = extend_form(interior_product(v, omega), total, 0).scaled(lifted_factor)
        sections.append(CourantSection(extend_vector(v, total, 0), alpha))
    if fiber.dim >= k:
        offset = base.dim
        zero = total.zero_multivector(1)
        for key in combinations(range(fiber.dim), k):
            shifted = tuple(i + offset for i in key)
            sections.append(
                CourantSection(zero, DiffForm(total, k, {shifted: total.constant(1)}))
            )
    return SubbundleFrame(total, k, sections)


def wedge_product_structure(omega1: DiffForm, omega2: DiffForm) -> SubbundleFrame:
    """Sections (X, (i_X omega1) wedge omega2) over the first factor's tangent."""
    total = product_chart(omega1.chart, omega2.chart)
    lifted2 = extend_form(omega2, total, omega1.chart.dim)
    k = omega1.degree + omega2.degree - 1
    sections = []
    for name in omega1.chart.coords:
        v = omega1.chart.basis_vector(name)
        alpha = wedge(extend_form(interior_product(v, omega1), total, 0), lifted2)
        sections.append(CourantSection(extend_vector(v, total, 0), alpha))
    return SubbundleFrame(total, k, sections)


# ---------------------------------------------------------------------------
# Groupoid constructors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupoidWithForm:
    groupoid: GroupoidChart
    omega: DiffForm


def pair_groupoid(omega0: DiffForm, suffix: str = "") -> GroupoidWithForm:
    """Two copies of the base with concatenation; the form is the difference
    of the two pullbacks of the given form."""
    base = omega0.chart
    g_names = [f"{c}_1{suffix}" for c in base.coords] + [
        f"{c}_2{suffix}" for c in base.coords
    ]
    p_names = (
        [f"{c}_1{suffix}" for c in base.coords]
        + [f"{c}_2{suffix}" for c in base.coords]
        + [f"{c}_3{suffix}" for c in base.coords]
    )
    arrows = Chart(f"{base.name}.pair{suffix}", g_names)
    pairs = Chart(f"{base.name}.pair2{suffix}", p_names)
    n = base.dim

    def arrow_coord(block: int, i: int):
        return arrows.coordinate(g_names[block * n + i])

    def pair_coord(block: int, i: int):
        return pairs.coordinate(p_names[block * n + i])

    target_map = SmoothMap(arrows, base, [arrow_coord(0, i) for i in range(n)])
    source_map = SmoothMap(arrows, base, [arrow_coord(1, i) for i in range(n)])
    unit_map = SmoothMap(
        base, arrows, [base.coordinate(c) for c in base.coords] * 2
    )
    inversion_map = SmoothMap(
        arrows,
        arrows,
        [arrow_coord(1, i) for i in range(n)] + [arrow_coord(0, i) for i in range(n)],
    )
    pr1 = SmoothMap(
        pairs, arrows, [pair_coord(0, i) for i in range(n)] + [pair_coord(1, i) for i in range(n)]
    )
    pr2 = SmoothMap(
        pairs, arrows, [pair_coord(1, i) for i in range(n)] + [pair_coord(2, i) for i in range(n)]
    )
    mult_map = SmoothMap(
        pairs, arrows, [pair_coord(0, i) for i in range(n)] + [pair_coord(2, i) for i in range(n)]
    )
    inv_pairing = SmoothMap(
        arrows,
        pairs,
        [arrow_coord(0, i) for i in range(n)]
        + [arrow_coord(1, i) for i in range(n)]
        + [arrow_coord(0, i) for i in range(n)],
    )
    unit_complement = tuple(
        tuple(
            base.constant(1 if a == i else 0) for a in range(2 * n)
        )
        for i in range(n)
    )
    right_ext = tuple(arrows.basis_vector(g_names[i]) for i in range(n))
    groupoid = GroupoidChart(
        arrows=arrows,
        base=base,
        source_map=source_map,
        target_map=target_map,
        unit_map=unit_map,
        inversion_map=inversion_map,
        pair_space=pairs,
        pr1=pr1,
        pr2=pr2,
        mult_map=mult_map,
        unit_complement=unit_complement,
        right_ext=right_ext,
        inv_pairing=inv_pairing,
    )
    from .forms import pullback

    omega = pullback(target_map, omega0) - pullback(source_map, omega0)
    return GroupoidWithForm(groupoid=groupoid, omega=omega)


def vb_groupoid(frame: SubbundleFrame, suffix: str = "") -> GroupoidWithForm:
    """Fibrewise addition on a constant vertical subbundle, with the pullback
    of the canonical multiphase form through the inclusion."""
    base = frame.chart
    k = frame.k
    for s in frame.sections:
        if not s.vector.is_zero:
            raise NonConstantFrame("the frame must be vertical")
        for coeff in s.form.coeffs.values():
            if not coeff.is_constant():
                raise NonConstantFrame("the frame must have constant coefficients")
    r = frame.declared_rank
    fiber_names = [f"c{i + 1}{suffix}" for i in range(r)]
    arrows = Chart(f"{base.name}.vb{suffix}", list(base.coords) + fiber_names)
    p_names = (
        list(base.coords)
        + [f"c{i + 1}_1{suffix}" for i in range(r)]
        + [f"c{i + 1}_2{suffix}" for i in range(r)]
    )
    pairs = Chart(f"{base.name}.vb2{suffix}", p_names)
    n = base.dim

    base_in_arrows = [arrows.coordinate(c) for c in base.coords]
    fiber_in_arrows = [arrows.coordinate(c) for c in fiber_names]
    base_in_pairs = [pairs.coordinate(c) for c in base.coords]
    first_fiber = [pairs.coordinate(p_names[n + i]) for i in range(r)]
    second_fiber = [pairs.coordinate(p_names[n + r + i]) for i in range(r)]

    projection = SmoothMap(arrows, base, base_in_arrows)
    unit_map = SmoothMap(
        base, arrows, [base.coordinate(c) for c in base.coords] + [base.constant(0)] * r
    )
    inversion_map = SmoothMap(
        arrows, arrows, base_in_arrows + [-c for c in fiber_in_arrows]
    )
    pr1 = SmoothMap(pairs, arrows, base_in_pairs + first_fiber)
    pr2 = SmoothMap(pairs, arrows, base_in_pairs + second_fiber)
    mult_map = SmoothMap(
        pairs, arrows, base_in_pairs + [a + b for a, b in zip(first_fiber, second_fiber)]
    )
    inv_pairing = SmoothMap(
        arrows, pairs, base_in_arrows + fiber_in_arrows + [-c for c in fiber_in_arrows]
    )
    unit_complement = tuple(
        tuple(base.constant(1 if a == n + j else 0) for a in range(n + r))
        for j in range(r)
    )
    right_ext = tuple(arrows.basis_vector(fiber_names[j]) for j in range(r))
    groupoid = GroupoidChart(
        arrows=arrows,
        base=base,
        source_map=projection,
        target_map=projection,
        unit_map=unit_map,
        inversion_map=inversion_map,
        pair_space=pairs,
        pr1=pr1,
        pr2=pr2,
        mult_map=mult_map,
        unit_complement=unit_complement,
        right_ext=right_ext,
        inv_pairing=inv_pairing,
    )
    # inclusion into the multiphase chart: p_I = sum_j c_j xi_j[I]
    phase = canonical_multiphase(n, k, suffix=f"{suffix}i")
    components = base_in_arrows[:]
    for key in combinations(range(n), k):
        total = arrows.constant(0)
        for j, s in enumerate(frame.sections):
            c = s.form.coefficient(key)
            if not c.is_zero:
                total = total + fiber_in_arrows[j] * c.constant_value()
        components.append(total)
    inclusion = SmoothMap(arrows, phase.chart, components)
    from .forms import pullback

    omega = pullback(inclusion, phase.omega)
    return GroupoidWithForm(groupoid=groupoid, omega=omega)


def trivial_groupoid(base: Chart) -> GroupoidChart:
    """Only identity arrows: every structure map is the identity."""
    ident = SmoothMap.identity(base)
    return GroupoidChart(
        arrows=base,
        base=base,
        source_map=ident,
        target_map=ident,
        unit_map=ident,
        inversion_map=ident,
        pair_space=base,
        pr1=ident,
        pr2=ident,
        mult_map=ident,
        unit_complement=(),
        right_ext=(),
        inv_pairing=ident,
    )


# ---------------------------------------------------------------------------
# Scenario emission (the CLI catalog surface)
# ---------------------------------------------------------------------------

CATALOG_NAMES = (
    "canonical-multiphase",
    "volume",
    "flat-hyperkahler",
    "cartan-so3",
    "graph-form",
    "graph-top-multivector",
    "vertical",
    "line-bundle",
    "scaled-family",
    "wedge-product",
    "pair-groupoid",
    "vb-groupoid",
    "direct-product",
)


def _int_param(params, name, default=None):
    if name not in params:
        if default is None:
            raise BadParameters(f"missing parameter {name!r}")
        return default
    try:
        return int(params[name])
    except ValueError:
        raise BadParameters(f"parameter {name!r} must be an integer")


def _parse_ref(text: str):
    text = text.strip()
    if "(" not in text:
        return text, []
    if not text.endswith(")"):
        raise BadParameters(f"malformed reference {text!r}")
    head, _, inner = text.partition("(")
    inner = inner[:-1].strip()
    args = _split_args(inner) if inner else []
    return head.strip(), args


def _split_args(inner: str):
    args = []
    depth = 0
    current = ""
    for ch in inner:
        if ch == "," and depth == 0:
            args.append(current.strip())
            current = ""
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        current += ch
    args.append(current.strip())
    return args


def _plectic_ref(text: str, suffix: str = ""):
    """Resolve a reference to a closed nondegenerate form instance."""
    head, args = _parse_ref(text)
    if head == "canonical-multiphase":
        if len(args) != 2:
            raise BadParameters("canonical-multiphase(n, k) takes two arguments")
        space = canonical_multiphase(int(args[0]), int(args[1]), suffix=suffix)
        return space.chart, space.omega
    if head == "volume":
        if len(args) != 1:
            raise BadParameters("volume(n) takes one argument")
        cand = volume_plectic(int(args[0]), suffix=suffix)
        return cand.chart, cand.omega
    if head == "flat-hyperkahler":
        if args:
            raise BadParameters("flat-hyperkahler() takes no arguments")
        space = flat_hyperkahler(suffix=suffix)
        return space.chart, space.omega
    raise BadParameters(f"unknown base reference {text!r}")


def _frame_ref(text: str, suffix: str = "") -> SubbundleFrame:
    head, args = _parse_ref(text)
    if head == "graph":
        if len(args) != 1:
            raise BadParameters("graph(<base>) takes one argument")
        _, omega = _plectic_ref(args[0], suffix=suffix)
        return graph_of_form(omega)
    if head == "top":
        if len(args) != 1:
            raise BadParameters("top(n) takes one argument")
        n = int(args[0])
        chart = Chart(f"r{n}{suffix}", [f"x{i + 1}{suffix}" for i in range(n)])
        pi = MultiVectorField(chart, n, {tuple(range(n)): chart.constant(1)})
        return graph_of_top_multivector(pi)
    if head == "vertical":
        if len(args) != 2:
            raise BadParameters("vertical(n, k) takes two arguments")
        return full_vertical(int(args[0]), int(args[1]), suffix=suffix)
    if head == "line-bundle":
        if len(args) != 1:
            raise BadParameters("line-bundle(n) takes one argument")
        return line_bundle_frame(int(args[0]), suffix=suffix)
    raise BadParameters(f"unknown frame reference {text!r}")


def _serialize_frame(frame: SubbundleFrame) -> dict:
    return {
        "kind": "frame",
        "chart": frame.chart.name,
        "k": frame.k,
        "sections": [
            {
                "vector": format_multivector(s.vector),
                "form": format_form(s.form),
            }
            for s in frame.sections
        ],
    }


def _serialize_map(mapping: SmoothMap) -> dict:
    return {
        "source": mapping.source.name,
        "target": mapping.target.name,
        "components": [format_scalar(c) for c in mapping.components],
    }


def _serialize_groupoid(g: GroupoidChart) -> dict:
    return {
        "kind": "groupoid",
        "arrows": g.arrows.name,
        "base": g.base.name,
        "pairs": g.pair_space.name,
        "source": _serialize_map(g.source_map)["components"],
        "target": _serialize_map(g.target_map)["components"],
        "unit": _serialize_map(g.unit_map)["components"],
        "inversion": _serialize_map(g.inversion_map)["components"],
        "pr1": _serialize_map(g.pr1)["components"],
        "pr2": _serialize_map(g.pr2)["components"],
        "mult": _serialize_map(g.mult_map)["components"],
        "unit_complement": [[format_scalar(v) for v in u] for u in g.unit_complement],
        "right_ext": [format_multivector(f) for f in g.right_ext],
        "inv_pairing": _serialize_map(g.inv_pairing)["components"]
        if g.inv_pairing is not None
        else None,
    }


def _frame_checks(name: str, extra=()):
    checks = [
        {"name": "isotropic", "op": "isotropic", "args": [name]},
        {"name": "involutive", "op": "involutive", "args": [name]},
        {"name": "nondegenerate", "op": "nondeg_l", "args": [name], "mode": "generic"},
    ]
    checks.extend(extra)
    return checks


def build_scenario(name: str, params: Mapping[str, str]) -> dict:
    """Construct a catalog instance and serialize it as a runnable scenario."""
    params = dict(params)
    if name == "canonical-multiphase":
        n = _int_param(params, "n")
        k = _int_param(params, "k")
        space = canonical_multiphase(n, k)
        return {
            "name": f"canonical-multiphase-{n}-{k}",
            "charts": {space.chart.name: list(space.chart.coords)},
            "objects": {
                "theta": {
                    "kind": "form",
                    "chart": space.chart.name,
                    "degree": k,
                    "text": format_form(space.theta),
                },
                "omega": {
                    "kind": "form",
                    "chart": space.chart.name,
                    "degree": k + 1,
                    "text": format_form(space.omega),
                },
            },
            "checks": [
                {"name": "closed", "op": "is_closed", "args": ["omega"]},
                {
                    "name": "nondegenerate-generic",
                    "op": "nondegenerate",
                    "args": ["omega"],
                    "mode": "generic",
                },
                {
                    "name": "nondegenerate-sampled",
                    "op": "nondegenerate",
                    "args": ["omega"],
                    "mode": "sampled",
                },
            ],
            "sampling": {"seed": 0, "count": 20, "box": 5},
        }
    if name == "volume":
        n = _int_param(params, "n")
        cand = volume_plectic(n, params.get("scale"))
        return {
            "name": f"volume-{n}",
            "charts": {cand.chart.name: list(cand.chart.coords)},
            "objects": {
                "omega": {
                    "kind": "form",
                    "chart": cand.chart.name,
                    "degree": n,
                    "text": format_form(cand.omega),
                },
            },
            "checks": [
                {"name": "closed", "op": "is_closed", "args": ["omega"]},
                {
                    "name": "nondegenerate",
                    "op": "nondegenerate",
                    "args": ["omega"],
                    "mode": "generic",
                },
            ],
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "flat-hyperkahler":
        space = flat_hyperkahler()
        return {
            "name": "flat-hyperkahler",
            "charts": {space.chart.name: list(space.chart.coords)},
            "objects": {
                "omega": {
                    "kind": "form",
                    "chart": space.chart.name,
                    "degree": 4,
                    "text": format_form(space.omega),
                },
            },
            "checks": [
                {"name": "closed", "op": "is_closed", "args": ["omega"]},
                {
                    "name": "nondegenerate",
                    "op": "nondegenerate",
                    "args": ["omega"],
                    "mode": "generic",
                },
            ],
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "cartan-so3":
        cx = so3_complex()
        return {
            "name": "cartan-so3",
            "charts": {},
            "objects": {
                "so3": {
                    "kind": "ce",
                    "rank": 3,
                    "structure": {
                        f"{i},{j},{l}": format_scalar(v)
                        for (i, j, l), v in cx.structure.items()
                    },
                    "pairing": [[format_scalar(x) for x in row] for row in cx.pairing],
                },
            },
            "checks": [{"name": "cartan", "op": "cartan", "args": ["so3"]}],
            "sampling": {"seed": 0, "count": 5, "box": 5},
        }
    if name == "graph-form":
        if "base" in params:
            chart, omega = _plectic_ref(params["base"])
        else:
            coords = [c.strip() for c in params.get("coords", "").split(",") if c.strip()]
            if not coords or "omega" not in params:
                raise BadParameters("graph-form needs base= or coords= and omega=")
            chart = Chart("M", coords)
            omega = chart.form(params["omega"])
        frame = graph_of_form(omega)
        return {
            "name": "graph-form",
            "charts": {chart.name: list(chart.coords)},
            "objects": {"L": _serialize_frame(frame)},
            "checks": _frame_checks("L"),
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "graph-top-multivector":
        n = _int_param(params, "n")
        chart = Chart(f"r{n}", [f"x{i + 1}" for i in range(n)])
        pi = (
            chart.multivector(params["pi"], degree=n)
            if "pi" in params
            else MultiVectorField(chart, n, {tuple(range(n)): chart.constant(1)})
        )
        frame = graph_of_top_multivector(pi)
        return {
            "name": "graph-top-multivector",
            "charts": {chart.name: list(chart.coords)},
            "objects": {"L": _serialize_frame(frame)},
            "checks": _frame_checks("L"),
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "vertical":
        n = _int_param(params, "n")
        k = _int_param(params, "k")
        frame = full_vertical(n, k)
        return {
            "name": f"vertical-{n}-{k}",
            "charts": {frame.chart.name: list(frame.chart.coords)},
            "objects": {"L": _serialize_frame(frame)},
            "checks": _frame_checks("L"),
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "line-bundle":
        n = _int_param(params, "n", 4)
        frame = line_bundle_frame(n, params.get("xi"))
        return {
            "name": f"line-bundle-{n}",
            "charts": {frame.chart.name: list(frame.chart.coords)},
            "objects": {"L": _serialize_frame(frame)},
            "checks": _frame_checks("L"),
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "scaled-family":
        base_ref = params.get("base")
        if base_ref is None:
            raise BadParameters("scaled-family needs base=")
        m = _int_param(params, "m", 2)
        chart, omega = _plectic_ref(base_ref)
        fiber = Chart(f"n{m}", [f"t{i + 1}" for i in range(m)])
        factor = fiber.scalar(params.get("f", "1"))
        frame = scaled_family(omega, fiber, factor)
        return {
            "name": "scaled-family",
            "charts": {frame.chart.name: list(frame.chart.coords)},
            "objects": {"L": _serialize_frame(frame)},
            "checks": _frame_checks("L"),
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "wedge-product":
        left = params.get("left")
        right = params.get("right")
        if left is None or right is None:
            raise BadParameters("wedge-product needs left= and right=")
        _, omega1 = _plectic_ref(left, suffix="a")
        _, omega2 = _plectic_ref(right, suffix="b")
        frame = wedge_product_structure(omega1, omega2)
        return {
            "name": "wedge-product",
            "charts": {frame.chart.name: list(frame.chart.coords)},
            "objects": {"L": _serialize_frame(frame)},
            "checks": _frame_checks(
                "L",
                extra=[
                    {"name": "leaf-forms", "op": "leaf_forms_zero", "args": ["L"], "mode": "sampled"}
                ],
            ),
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    if name == "pair-groupoid":
        base_ref = params.get("base")
        if base_ref is None:
            raise BadParameters("pair-groupoid needs base=")
        chart, omega0 = _plectic_ref(base_ref)
        data = pair_groupoid(omega0)
        return _groupoid_scenario("pair-groupoid", chart, data)
    if name == "vb-groupoid":
        n = _int_param(params, "n")
        k = _int_param(params, "k")
        if "forms" in params:
            chart = Chart(f"r{n}", [f"x{i + 1}" for i in range(n)])
            forms = [
                chart.form(text.strip(), degree=k)
                for text in params["forms"].split(";")
                if text.strip()
            ]
            frame = vertical_subbundle(chart, forms)
        else:
            frame = full_vertical(n, k)
        data = vb_groupoid(frame)
        return _groupoid_scenario(f"vb-groupoid-{n}-{k}", frame.chart, data)
    if name == "direct-product":
        left = params.get("left")
        right = params.get("right")
        if left is None or right is None:
            raise BadParameters("direct-product needs left= and right=")
        f1 = _frame_ref(left, suffix="a")
        f2 = _frame_ref(right, suffix="b")
        from .courant import direct_product

        frame = direct_product(f1, f2)
        return {
            "name": "direct-product",
            "charts": {frame.chart.name: list(frame.chart.coords)},
            "objects": {"L": _serialize_frame(frame)},
            "checks": _frame_checks("L"),
            "sampling": {"seed": 0, "count": 10, "box": 5},
        }
    raise UnknownCatalogName(f"unknown catalog name {name!r}")


def _groupoid_scenario(name: str, base: Chart, data: GroupoidWithForm) -> dict:
    g = data.groupoid
    return {
        "name": name,
        "charts": {
            g.arrows.name: list(g.arrows.coords),
            base.name: list(base.coords),
            g.pair_space.name: list(g.pair_space.coords),
        },
        "objects": {
            "G": _serialize_groupoid(g),
            "omega": {
                "kind": "form",
                "chart": g.arrows.name,
                "degree": data.omega.degree,
                "text": format_form(data.omega),
            },
        },
        "checks": [
            {"name": "axioms", "op": "groupoid_axioms", "args": ["G"]},
            {"name": "multiplicative", "op": "multiplicative", "args": ["G", "omega"]},
            {"name": "unit-inversion", "op": "unit_inversion", "args": ["G", "omega"]},
            {"name": "right-translation", "op": "right_translation", "args": ["G", "omega"]},
            {
                "name": "nondegenerate",
                "op": "nondegenerate",
                "args": ["omega"],
                "mode": "generic",
            },
            {
                "name": "im-nondegenerate",
                "op": "induced_im_nondeg",
                "args": ["G", "omega"],
                "mode": "generic",
            },
        ],
        "sampling": {"seed": 0, "count": 10, "box": 5},
    }
