"""Differential forms and multivector fields on coordinate charts.

Conventions (fixed once, used by every downstream identity):

* Alternating coefficients are stored on strictly increasing index tuples;
  all sign bookkeeping funnels through ``sort_with_sign`` (a duplicated
  index means zero).
* Basis k-forms act by determinants: dx_I(v_1, ..., v_k) is the determinant
  of the matrix whose (a, b) entry is component i_a of v_b.
* Interior products insert front-first: for decomposable X = X_1 ^ ... ^ X_m,
  (i_X w)(Y_1, ...) = w(X_1, ..., X_m, Y_1, ...).  Contraction of a form
  into a multivector uses the mirrored convention.
* Lie derivatives are computed by the Cartan formula d i_X + i_X d.
"""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import (
    ChartMismatch,
    DegreeMismatch,
    DegreeUnderflow,
    ParseError,
    UnknownCoordinate,
)
from .scalars import (
    Polynomial,
    RationalFunction,
    SamplePoint,
    ScalarParser,
    format_scalar,
    tokenize,
)


class Chart:
    """A named coordinate chart: the local model of a manifold."""

    __slots__ = ("name", "coords")

    def __init__(self, name: str, coords: Sequence[str]):
        coords = tuple(coords)
        if len(set(coords)) != len(coords):
            raise ValueError(f"duplicate coordinate names in {coords}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("Chart is immutable")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise UnknownCoordinate(f"{name!r} is not a coordinate of chart {self.name!r}")

    def __eq__(self, other):
        if not isinstance(other, Chart):
            return NotImplemented
        return self.name == other.name and self.coords == other.coords

    def __hash__(self):
        return hash((self.name, self.coords))

    def __repr__(self):
        return f"Chart({self.name!r}, {list(self.coords)})"

    # -- scalar/form builders ------------------------------------------------

    def constant(self, value) -> RationalFunction:
        return RationalFunction.constant(self.coords, value)

    def coordinate(self, name: str) -> RationalFunction:
        self.index(name)
        return RationalFunction.coordinate(self.coords, name)

    def scalar(self, text: str) -> RationalFunction:
        from .scalars import parse_scalar

        return parse_scalar(self.coords, text)

    def zero_form(self, degree: int) -> "DiffForm":
        return DiffForm(self, degree, {})

    def zero_multivector(self, degree: int) -> "MultiVectorField":
        return MultiVectorField(self, degree, {})

    def basis_covector(self, name: str) -> "DiffForm":
        return DiffForm(self, 1, {(self.index(name),): self.constant(1)})

    def basis_vector(self, name: str) -> "MultiVectorField":
        return MultiVectorField(self, 1, {(self.index(name),): self.constant(1)})

    def form(self, text: str, degree: int | None = None) -> "DiffForm":
        return parse_form(self, text, degree)

    def multivector(self, text: str, degree: int | None = None) -> "MultiVectorField":
        return parse_multivector(self, text, degree)

    def point(self, assignment) -> SamplePoint:
        pt = assignment if isinstance(assignment, SamplePoint) else SamplePoint(assignment)
        missing = [c for c in self.coords if c not in pt]
        extra = [c for c in pt.names() if c not in self.coords]
        if missing or extra:
            raise UnknownCoordinate(
                f"point does not match chart {self.name!r}: missing {missing}, extra {extra}"
            )
        return pt


def sort_with_sign(indices):
    """(sorted tuple, sign) of an index tuple, or None on a duplicate."""
    items = list(indices)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return None
    return tuple(items), sign


def contraction_sign(outer, inner):
    """Sign of filling the front slots of basis tuple ``outer`` with ``inner``.

    Returns (rest, sign) where rest = outer minus inner in increasing order,
    or None when inner is not a subset of outer.  Both inputs are increasing.
    """
    outer_set = set(outer)
    if not set(inner) <= outer_set:
        return None
    rest = tuple(i for i in outer if i not in set(inner))
    rearranged = tuple(inner) + rest
    # parity of the permutation taking `outer` (sorted) to `rearranged`
    sign = 1
    seq = list(rearranged)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return rest, sign


class _Alternating:
    """Shared storage for graded alternating tensors with scalar coefficients."""

    __slots__ = ("chart", "degree", "coeffs")

    def __init__(self, chart: Chart, degree: int, coeffs: Mapping[tuple, object]):
        if degree < 0:
            raise DegreeMismatch("degree must be nonnegative")
        clean = {}
        for key, value in coeffs.items():
            key = tuple(int(i) for i in key)
            if len(key) != degree:
                raise DegreeMismatch(f"index tuple {key} has length != {degree}")
            if any(i < 0 or i >= chart.dim for i in key):
                raise ValueError(f"index tuple {key} out of range for {chart!r}")
            if any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"index tuple {key} is not strictly increasing")
            v = value if isinstance(value, RationalFunction) else _lift_scalar(chart, value)
            if not v.is_zero:
                clean[key] = v
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, key) -> RationalFunction:
        return self.coeffs.get(tuple(key), self.chart.constant(0))

    def _check_compatible(self, other):
        if self.chart != other.chart:
            raise ChartMismatch(f"{self.chart!r} vs {other.chart!r}")
        if self.degree != other.degree:
            raise DegreeMismatch(f"degree {self.degree} vs {other.degree}")

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        self._check_compatible(other)
        coeffs = dict(self.coeffs)
        for key, value in other.coeffs.items():
            coeffs[key] = coeffs.get(key, self.chart.constant(0)) + value
        return type(self)(self.chart, self.degree, coeffs)

    def __sub__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return type(self)(self.chart, self.degree, {k: -v for k, v in self.coeffs.items()})

    def scaled(self, factor):
        factor = _lift_scalar(self.chart, factor)
        return type(self)(
            self.chart, self.degree, {k: v * factor for k, v in self.coeffs.items()}
        )

    def __mul__(self, factor):
        if isinstance(factor, (int, Fraction, Polynomial, RationalFunction)):
            return self.scaled(factor)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        if self.chart != other.chart or self.degree != other.degree:
            return False
        if set(self.coeffs) != set(other.coeffs):
            return False
        return all(v == other.coeffs[k] for k, v in self.coeffs.items())

    def evaluate_at(self, point) -> dict:
        """Numeric alternating tensor at the point: index tuple -> Fraction."""
        pt = self.chart.point(point)
        values = {}
        for key, coeff in self.coeffs.items():
            v = coeff.evaluate(pt)
            if v:
                values[key] = v
        return values


class DiffForm(_Alternating):
    """Differential k-form with RationalFunction coefficients."""

    def wedge(self, other: "DiffForm") -> "DiffForm":
        return wedge(self, other)

    def d(self) -> "DiffForm":
        return exterior_derivative(self)

    def __repr__(self):
        return f"DiffForm({format_form(self)!r})"


class MultiVectorField(_Alternating):
    """Alternating multivector field; degree 1 is an ordinary vector field."""

    def __init__(self, chart, degree, coeffs):
        if degree < 1:
            raise DegreeMismatch("multivector degree must be >= 1")
        super().__init__(chart, degree, coeffs)

    def component(self, j: int) -> RationalFunction:
        if self.degree != 1:
            raise DegreeMismatch("components index degree-1 fields")
        return self.coefficient((j,))

    def __repr__(self):
        return f"MultiVectorField({format_multivector(self)!r})"


def _lift_scalar(chart: Chart, value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.coords != chart.coords:
            raise ChartMismatch("scalar over a different chart")
        return value
    if isinstance(value, Polynomial):
        if value.coords != chart.coords:
            raise ChartMismatch("scalar over a different chart")
        return RationalFunction(value)
    return chart.constant(value)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def wedge(a, b):
    """Wedge product; operands must be two forms or two multivectors."""
    if type(a) is not type(b):
        raise DegreeMismatch("wedge requires operands of the same kind")
    if a.chart != b.chart:
        raise ChartMismatch(f"{a.chart!r} vs {b.chart!r}")
    coeffs = {}
    for i_key, i_val in a.coeffs.items():
        for j_key, j_val in b.coeffs.items():
            sorted_sign = sort_with_sign(i_key + j_key)
            if sorted_sign is None:
                continue
            key, sign = sorted_sign
            term = i_val * j_val if sign > 0 else -(i_val * j_val)
            coeffs[key] = coeffs.get(key, a.chart.constant(0)) + term
    return type(a)(a.chart, a.degree + b.degree, coeffs)


def exterior_derivative(a: DiffForm) -> DiffForm:
    """d, the unique degree +1 derivation with d(coordinate) = basis covector."""
    chart = a.chart
    coeffs = {}
    for key, coeff in a.coeffs.items():
        key_set = set(key)
        for i, name in enumerate(chart.coords):
            if i in key_set:
                continue
            dc = coeff.derivative(name)
            if dc.is_zero:
                continue
            sorted_sign = sort_with_sign((i,) + key)
            new_key, sign = sorted_sign
            term = dc if sign > 0 else -dc
            coeffs[new_key] = coeffs.get(new_key, chart.constant(0)) + term
    return DiffForm(chart, a.degree + 1, coeffs)


def interior_product(field: MultiVectorField, form: DiffForm) -> DiffForm:
    """Front-slot contraction i_X of a degree-m multivector into a k-form."""
    if field.chart != form.chart:
        raise ChartMismatch(f"{field.chart!r} vs {form.chart!r}")
    if form.degree == 0:
        raise DegreeUnderflow("interior product into a scalar")
    if field.degree > form.degree:
        raise DegreeUnderflow(
            f"cannot contract degree {field.degree} into degree {form.degree}"
        )
    chart = form.chart
    coeffs = {}
    for j_key, x_val in field.coeffs.items():
        for i_key, a_val in form.coeffs.items():
            hit = contraction_sign(i_key, j_key)
            if hit is None:
                continue
            rest, sign = hit
            term = x_val * a_val if sign > 0 else -(x_val * a_val)
            coeffs[rest] = coeffs.get(rest, chart.constant(0)) + term
    return DiffForm(chart, form.degree - field.degree, coeffs)


def form_into_multivector(form: DiffForm, field: MultiVectorField) -> MultiVectorField:
    """Front-slot contraction i_alpha of a k-form into a degree-m multivector.

    For decomposable alpha, (i_alpha P) pairs alpha's factors with the first
    k slots of P, mirroring ``interior_product``.
    """
    if field.chart != form.chart:
        raise ChartMismatch(f"{field.chart!r} vs {form.chart!r}")
    if form.degree > field.degree:
        raise DegreeUnderflow(
            f"cannot contract degree {form.degree} into degree {field.degree}"
        )
    if form.degree == field.degree:
        raise DegreeUnderflow("full contraction of a multivector yields a scalar")
    chart = form.chart
    coeffs = {}
    for a_key, a_val in form.coeffs.items():
        for p_key, p_val in field.coeffs.items():
            hit = contraction_sign(p_key, a_key)
            if hit is None:
                continue
            rest, sign = hit
            term = a_val * p_val if sign > 0 else -(a_val * p_val)
            coeffs[rest] = coeffs.get(rest, chart.constant(0)) + term
    return MultiVectorField(chart, field.degree - form.degree, coeffs)


def pair_full(form: DiffForm, field: MultiVectorField) -> RationalFunction:
    """Full contraction of a k-form with a degree-k multivector."""
    if field.chart != form.chart:
        raise ChartMismatch(f"{field.chart!r} vs {form.chart!r}")
    if form.degree != field.degree:
        raise DegreeMismatch("full pairing needs equal degrees")
    total = form.chart.constant(0)
    for key, a_val in form.coeffs.items():
        p_val = field.coeffs.get(key)
        if p_val is not None:
            total = total + a_val * p_val
    return total


def lie_derivative(field: MultiVectorField, form: DiffForm) -> DiffForm:
    """Cartan formula: L_X = d i_X + i_X d (degree-1 fields only)."""
    if field.degree != 1:
        raise DegreeMismatch("Lie derivative along a degree-1 field only")
    if field.chart != form.chart:
        raise ChartMismatch(f"{field.chart!r} vs {form.chart!r}")
    second = interior_product(field, exterior_derivative(form))
    if form.degree == 0:
        return second
    first = exterior_derivative(interior_product(field, form))
    return first + second


def lie_bracket_vf(x: MultiVectorField, y: MultiVectorField) -> MultiVectorField:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i for degree-1 fields."""
    if x.degree != 1 or y.degree != 1:
        raise DegreeMismatch("Lie bracket of degree-1 fields only")
    if x.chart != y.chart:
        raise ChartMismatch(f"{x.chart!r} vs {y.chart!r}")
    chart = x.chart
    coeffs = {}
    for i in range(chart.dim):
        total = chart.constant(0)
        for j, name in enumerate(chart.coords):
            xj = x.coefficient((j,))
            yj = y.coefficient((j,))
            if not xj.is_zero:
                total = total + xj * y.coefficient((i,)).derivative(name)
            if not yj.is_zero:
                total = total - yj * x.coefficient((i,)).derivative(name)
        if not total.is_zero:
            coeffs[(i,)] = total
    return MultiVectorField(chart, 1, coeffs)


class SmoothMap:
    """Polynomial (or rational) map between charts, one component per target coordinate."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source: Chart, target: Chart, components: Sequence):
        components = tuple(_lift_scalar(source, c) for c in components)
        if len(components) != target.dim:
            raise DegreeMismatch(
                f"map into {target!r} needs {target.dim} components, got {len(components)}"
            )
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):
        raise AttributeError("SmoothMap is immutable")

    @classmethod
    def identity(cls, chart: Chart) -> "SmoothMap":
        return cls(chart, chart, [chart.coordinate(c) for c in chart.coords])

    def substitution(self) -> dict:
        return dict(zip(self.target.coords, self.components))

    def compose(self, inner: "SmoothMap") -> "SmoothMap":
        """self after inner: source of ``inner`` to target of ``self``."""
        if inner.target != self.source:
            raise ChartMismatch(f"cannot compose {self.source!r} after {inner.target!r}")
        subs = inner.substitution()
        comps = [c.substitute(subs, coords=inner.source.coords) for c in self.components]
        return SmoothMap(inner.source, self.target, comps)

    def apply(self, point) -> SamplePoint:
        pt = self.source.point(point)
        values = {name: c.evaluate(pt) for name, c in zip(self.target.coords, self.components)}
        return SamplePoint(values)

    def __eq__(self, other):
        if not isinstance(other, SmoothMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and all(a == b for a, b in zip(self.components, other.components))
        )

    def __repr__(self):
        comps = ", ".join(format_scalar(c) for c in self.components)
        return f"SmoothMap({self.source.name!r} -> {self.target.name!r}; {comps})"


@dataclass(frozen=True)
class VectorAlongMap:
    """Vector field along a map: target-indexed components over the source chart."""

    mapping: SmoothMap
    components: tuple

    def __eq__(self, other):
        if not isinstance(other, VectorAlongMap):
            return NotImplemented
        return self.mapping == other.mapping and all(
            a == b for a, b in zip(self.components, other.components)
        )


def pullback(mapping: SmoothMap, form: DiffForm) -> DiffForm:
    """phi^* as the algebra morphism commuting with d."""
    if form.chart != mapping.target:
        raise ChartMismatch(f"form lives on {form.chart!r}, not {mapping.target!r}")
    source = mapping.source
    subs = mapping.substitution()
    if form.degree == 0:
        value = form.coefficient(())
        if value.is_zero:
            return source.zero_form(0)
        return DiffForm(source, 0, {(): value.substitute(subs, coords=source.coords)})
    differentials = {}

    def d_component(j: int) -> DiffForm:
        if j not in differentials:
            comp = mapping.components[j]
            coeffs = {}
            for i, name in enumerate(source.coords):
                dc = comp.derivative(name)
                if not dc.is_zero:
                    coeffs[(i,)] = dc
            differentials[j] = DiffForm(source, 1, coeffs)
        return differentials[j]

    result = source.zero_form(form.degree)
    for key, coeff in form.coeffs.items():
        pulled = coeff.substitute(subs, coords=source.coords)
        if pulled.is_zero:
            continue
        wedge_part = None
        for j in key:
            dj = d_component(j)
            wedge_part = dj if wedge_part is None else wedge(wedge_part, dj)
            if wedge_part.is_zero:
                break
        if wedge_part is None or wedge_part.is_zero:
            continue
        result = result + wedge_part.scaled(pulled)
    return result


def differential_apply(mapping: SmoothMap, field: MultiVectorField) -> VectorAlongMap:
    """Jacobian of the map applied to a vector field, over the source chart."""
    if field.degree != 1:
        raise DegreeMismatch("differentials push forward degree-1 fields")
    if field.chart != mapping.source:
        raise ChartMismatch(f"field lives on {field.chart!r}, not {mapping.source!r}")
    source = mapping.source
    comps = []
    for j in range(mapping.target.dim):
        total = source.constant(0)
        for i, name in enumerate(source.coords):
            xi = field.coefficient((i,))
            if not xi.is_zero:
                total = total + xi * mapping.components[j].derivative(name)
        comps.append(total)
    return VectorAlongMap(mapping=mapping, components=tuple(comps))


def scalar_bracket(pi: MultiVectorField, f: RationalFunction, g: RationalFunction):
    """{f, g} = pi(df, dg) for a bivector field pi."""
    if pi.degree != 2:
        raise DegreeMismatch("scalar bracket needs a bivector")
    chart = pi.chart
    f = _lift_scalar(chart, f)
    g = _lift_scalar(chart, g)
    total = chart.constant(0)
    for (a, b), coeff in pi.coeffs.items():
        na, nb = chart.coords[a], chart.coords[b]
        total = total + coeff * (
            f.derivative(na) * g.derivative(nb) - f.derivative(nb) * g.derivative(na)
        )
    return total


def poisson_jacobiator(pi: MultiVectorField) -> MultiVectorField:
    """Trivector of cyclic double brackets of coordinates; zero iff pi is Poisson."""
    if pi.degree != 2:
        raise DegreeMismatch("jacobiator is defined for bivectors")
    chart = pi.chart
    coords = [chart.coordinate(name) for name in chart.coords]
    coeffs = {}
    for i, j, l in combinations(range(chart.dim), 3):
        value = (
            scalar_bracket(pi, coords[i], scalar_bracket(pi, coords[j], coords[l]))
            + scalar_bracket(pi, coords[j], scalar_bracket(pi, coords[l], coords[i]))
            + scalar_bracket(pi, coords[l], scalar_bracket(pi, coords[i], coords[j]))
        )
        if not value.is_zero:
            coeffs[(i, j, l)] = value
    return MultiVectorField(chart, 3, coeffs)


def apply_alternating(values: Mapping[tuple, Fraction], vectors: Sequence[Sequence[Fraction]]):
    """Numeric tensor (index tuple -> Fraction) applied to numeric vectors."""
    k = len(vectors)
    total = Fraction(0)
    for key, coeff in values.items():
        if len(key) != k:
            raise DegreeMismatch("argument count does not match tensor degree")
        total += coeff * _det([[vectors[b][i] for b in range(k)] for i in key])
    return total


def _det(rows):
    n = len(rows)
    work = [list(map(Fraction, r)) for r in rows]
    sign = 1
    det = Fraction(1)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if work[r][col]:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            sign = -sign
        pv = work[col][col]
        det *= pv
        for r in range(col + 1, n):
            if work[r][col]:
                f = work[r][col] / pv
                work[r] = [a - f * b for a, b in zip(work[r], work[col])]
    return det * sign


# ---------------------------------------------------------------------------
# Form/vector grammar: extends the scalar grammar with d(x) basis covectors,
# e(x) basis vectors, ^ for wedge, * for scalar multiplication.  Expressions
# are homogeneous: every summand must have the same kind and degree.
# ---------------------------------------------------------------------------

_SCALAR, _FORM, _MV = "scalar", "form", "multivector"


class _Tagged:
    __slots__ = ("kind", "value")

    def __init__(self, kind, value):
        self.kind = kind
        self.value = value


class _FormParser(ScalarParser):
    def __init__(self, chart: Chart, tokens):
        super().__init__(chart.coords, tokens)
        self.chart = chart

    def expr(self):
        value = self.term()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.term()
                if rhs.kind != value.kind:
                    raise ParseError(
                        f"cannot add {value.kind} and {rhs.kind}", pos
                    )
                if value.kind != _SCALAR and rhs.value.degree != value.value.degree:
                    raise ParseError(
                        f"cannot add degrees {value.value.degree} and {rhs.value.degree}",
                        pos,
                    )
                merged = value.value + rhs.value if text == "+" else value.value - rhs.value
                value = _Tagged(value.kind, merged)
            else:
                return value

    def term(self):
        value = self.unary()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "*/^":
                self.advance()
                rhs = self.unary()
                value = self._combine(value, rhs, text, pos)
            else:
                return value

    def _combine(self, lhs, rhs, op, pos):
        if op == "^":
            if lhs.kind == _FORM and rhs.kind == _FORM:
                return _Tagged(_FORM, wedge(lhs.value, rhs.value))
            if lhs.kind == _MV and rhs.kind == _MV:
                return _Tagged(_MV, wedge(lhs.value, rhs.value))
            raise ParseError(f"cannot wedge {lhs.kind} and {rhs.kind}", pos)
        if op == "*":
            if lhs.kind == _SCALAR and rhs.kind == _SCALAR:
                return _Tagged(_SCALAR, lhs.value * rhs.value)
            if lhs.kind == _SCALAR:
                return _Tagged(rhs.kind, rhs.value.scaled(lhs.value))
            if rhs.kind == _SCALAR:
                return _Tagged(lhs.kind, lhs.value.scaled(rhs.value))
            raise ParseError("use ^ to multiply forms", pos)
        if lhs.kind == _SCALAR and rhs.kind == _SCALAR:
            if rhs.value.is_zero:
                from .errors import DivisionByZero

                raise DivisionByZero("division by the zero function")
            return _Tagged(_SCALAR, lhs.value / rhs.value)
        raise ParseError("division is defined for scalars only", pos)

    def negate(self, value):
        return _Tagged(value.kind, -value.value)

    def raise_power(self, value, exponent, pos):
        if value.kind != _SCALAR:
            raise ParseError("powers are defined for scalars only", pos)
        return _Tagged(_SCALAR, value.value**exponent)

    def atom(self):
        kind, text, pos = self.peek()
        if kind == "name" and text in ("d", "e"):
            nxt = self.tokens[self.i + 1]
            if nxt[0] == "op" and nxt[1] == "(":
                self.advance()
                self.advance()
                nk, ntext, npos = self.advance()
                if nk != "name":
                    raise ParseError("expected a coordinate name", npos)
                if ntext not in self.chart.coords:
                    raise ParseError(f"unknown coordinate {ntext!r}", npos)
                self.expect_op(")")
                if text == "d":
                    return _Tagged(_FORM, self.chart.basis_covector(ntext))
                return _Tagged(_MV, self.chart.basis_vector(ntext))
        value = super().atom()
        if isinstance(value, _Tagged):
            return value
        return _Tagged(_SCALAR, value)

    def name_atom(self, text, pos):
        if text not in self.coords:
            raise ParseError(f"unknown coordinate {text!r}", pos)
        return _Tagged(_SCALAR, RationalFunction.coordinate(self.coords, text))

    def combine_mul(self, lhs, rhs, op, pos):  # pragma: no cover - unused override
        raise AssertionError("scalar-only path not used by the form parser")


def parse_expression(chart: Chart, text: str):
    """Parse into a RationalFunction, DiffForm, or MultiVectorField."""
    tagged = _FormParser(chart, tokenize(text)).parse()
    return tagged.value


def parse_form(chart: Chart, text: str, degree: int | None = None) -> DiffForm:
    value = parse_expression(chart, text)
    if isinstance(value, RationalFunction):
        if degree in (None, 0):
            return DiffForm(chart, 0, {(): value})
        if value.is_zero:
            return chart.zero_form(degree)
        raise ParseError(f"expected a form of degree {degree}, got a scalar", 0)
    if isinstance(value, DiffForm):
        if degree is not None and value.degree != degree:
            raise ParseError(f"expected degree {degree}, got {value.degree}", 0)
        return value
    raise ParseError("expected a form, got a multivector", 0)


def parse_multivector(chart: Chart, text: str, degree: int | None = None) -> MultiVectorField:
    value = parse_expression(chart, text)
    if isinstance(value, RationalFunction):
        if value.is_zero and degree is not None:
            return chart.zero_multivector(degree)
        raise ParseError("expected a multivector, got a scalar", 0)
    if isinstance(value, MultiVectorField):
        if degree is not None and value.degree != degree:
            raise ParseError(f"expected degree {degree}, got {value.degree}", 0)
        return value
    raise ParseError("expected a multivector, got a form", 0)


def _format_alternating(value, basis_symbol: str) -> str:
    chart = value.chart
    if value.degree == 0:
        return format_scalar(value.coefficient(()))
    if value.is_zero:
        return "0"
    pieces = []
    for key in sorted(value.coeffs):
        coeff = value.coeffs[key]
        basis = "^".join(f"{basis_symbol}({chart.coords[i]})" for i in key)
        text = format_scalar(coeff)
        if text == "1":
            pieces.append(basis)
        elif text == "-1":
            pieces.append(f"-{basis}")
        else:
            den_is_one = coeff.den == Polynomial.constant(chart.coords, 1)
            if den_is_one and len(coeff.num.terms) > 1:
                text = f"({text})"
            pieces.append(f"{text}*{basis}")
    out = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            out += f" - {piece[1:]}"
        else:
            out += f" + {piece}"
    return out


def format_form(form: DiffForm) -> str:
    return _format_alternating(form, "d")


def format_multivector(field: MultiVectorField) -> str:
    return _format_alternating(field, "e")
