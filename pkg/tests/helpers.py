"""Shared generators and independent oracles for the test suite.

The oracle functions evaluate forms as multilinear machines on explicit
argument vectors (determinant expansion, slot filling, coordinate formula
for d on constant frames).  They share no code path with the coefficient
algebra in msk.forms, so agreement is a genuine cross-check.
"""

import random
from fractions import Fraction
from itertools import combinations, permutations

from msk.forms import Chart, DiffForm, MultiVectorField
from msk.scalars import Polynomial, RationalFunction, SamplePoint


def random_fraction(rng: random.Random, bound: int = 6) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 4))


def random_polynomial(rng, coords, degree=3, terms=4, bound=6) -> Polynomial:
    n = len(coords)
    data = {}
    for _ in range(terms):
        expo = [0] * n
        for _ in range(rng.randint(0, degree)):
            if n:
                expo[rng.randrange(n)] += 1
        data[tuple(expo)] = random_fraction(rng, bound)
    return Polynomial(coords, data)


def random_rational(rng, coords, degree=2) -> RationalFunction:
    num = random_polynomial(rng, coords, degree=degree)
    den = Polynomial.zero(coords)
    while den.is_zero:
        den = random_polynomial(rng, coords, degree=1, terms=2, bound=3)
    return RationalFunction(num, den)


def random_form(rng, chart: Chart, degree: int, coeff_degree=3) -> DiffForm:
    keys = list(combinations(range(chart.dim), degree))
    coeffs = {}
    for key in keys:
        if rng.random() < 0.7:
            coeffs[key] = RationalFunction(
                random_polynomial(rng, chart.coords, degree=coeff_degree, terms=3)
            )
    return DiffForm(chart, degree, coeffs)


def random_vector_field(rng, chart: Chart, coeff_degree=2) -> MultiVectorField:
    coeffs = {}
    for i in range(chart.dim):
        if rng.random() < 0.8:
            coeffs[(i,)] = RationalFunction(
                random_polynomial(rng, chart.coords, degree=coeff_degree, terms=3)
            )
    return MultiVectorField(chart, 1, coeffs)


def random_point(rng, chart: Chart, bound: int = 5) -> SamplePoint:
    return SamplePoint(
        {name: Fraction(rng.randint(-bound, bound), rng.randint(1, 5)) for name in chart.coords}
    )


def point_avoiding(rng, chart: Chart, scalars, bound: int = 7, tries: int = 200) -> SamplePoint:
    """A sample point where none of the given polynomials/denominators vanish."""
    for _ in range(tries):
        pt = random_point(rng, chart, bound)
        ok = True
        for s in scalars:
            poly = s if isinstance(s, Polynomial) else s
            if poly.evaluate(pt) == 0:
                ok = False
                break
        if ok:
            return pt
    raise AssertionError("could not find a pole-free sample point")


# ---------------------------------------------------------------------------
# Independent evaluation oracles
# ---------------------------------------------------------------------------


def basis_arg(dim: int, i: int):
    return [Fraction(int(j == i)) for j in range(dim)]


def eval_form_on_vectors(form: DiffForm, point, vectors) -> Fraction:
    """Multilinear evaluation by determinant expansion at a point."""
    values = form.evaluate_at(point)
    k = form.degree
    assert len(vectors) == k
    total = Fraction(0)
    for key, coeff in values.items():
        # det of the matrix whose (a, b) entry is component key[a] of vectors[b]
        mat = [[Fraction(vectors[b][i]) for b in range(k)] for i in key]
        total += coeff * _det(mat)
    return total


def _det(rows):
    n = len(rows)
    if n == 0:
        return Fraction(1)
    total = Fraction(0)
    for perm in permutations(range(n)):
        sign = _perm_sign(perm)
        prod = Fraction(1)
        for i, j in enumerate(perm):
            prod *= rows[i][j]
        total += sign * prod
    return total


def _perm_sign(perm):
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def oracle_d_coefficient(form: DiffForm, key) -> RationalFunction:
    """Coefficient of the exterior derivative via the coordinate formula.

    For the constant coordinate frame, (dw)(e_{i0}, ..., e_{ik}) equals the
    alternating sum of partial derivatives of w's evaluations with one
    argument removed.
    """
    chart = form.chart
    total = chart.constant(0)
    for pos, i in enumerate(key):
        rest = tuple(j for j in key if j != i)
        coeff = form.coeffs.get(rest, chart.constant(0))
        term = coeff.derivative(chart.coords[i])
        total = total + term if pos % 2 == 0 else total - term
    return total


def oracle_wedge_eval(a: DiffForm, b: DiffForm, point, vectors) -> Fraction:
    """(a ^ b)(v_1..v_{p+q}) via the shuffle formula, independent of wedge()."""
    p, q = a.degree, b.degree
    total = Fraction(0)
    idx = range(p + q)
    for left in combinations(idx, p):
        right = tuple(i for i in idx if i not in left)
        sign = _perm_sign(left + right)
        total += (
            sign
            * eval_form_on_vectors(a, point, [vectors[i] for i in left])
            * eval_form_on_vectors(b, point, [vectors[i] for i in right])
        )
    return total


def eval_vector_field(field: MultiVectorField, point):
    assert field.degree == 1
    dim = field.chart.dim
    return [field.coefficient((i,)).evaluate(point) for i in range(dim)]
