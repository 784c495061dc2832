"""Verification of k-plectic structure on a chart.

A candidate is a (k+1)-form; the checks are closedness, injectivity of the
contraction map X -> i_X w, existence and uniqueness of hamiltonian vector
fields for (k-1)-forms, the induced semibracket, and the cyclic-jacobiator
identity whose global sign ``JACOBIATOR_SIGN`` was pinned once by expanding
both sides on an explicit triple and is asserted by the test suite.
"""

from dataclasses import dataclass
from itertools import combinations

from .errors import Degenerate, DegreeMismatch, NotHamiltonian
from .forms import (
    Chart,
    DiffForm,
    MultiVectorField,
    exterior_derivative,
    interior_product,
)
from .linalg import Inconsistent, SymMatrix, rank_at_points, rref, solve_linear
from .scalars import RationalFunction
from .verdicts import GENERIC, IDENTICAL, SAMPLED, Verdict

# Sign relating the cyclic sum {a,{b,c}} + {c,{a,b}} + {b,{c,a}} to
# -d i_{X_a} i_{X_b} i_{X_c} w.  Determined empirically during development by
# brute-force expansion of both sides on an explicit triple over the degree-3
# canonical form (see tests), then frozen.
JACOBIATOR_SIGN = 1


@dataclass(frozen=True)
class PlecticCandidate:
    """A (k+1)-form to be verified, with the requested verdict mode."""

    omega: DiffForm
    mode: str = GENERIC
    points: tuple = ()

    def __post_init__(self):
        if self.omega.degree < 2:
            raise DegreeMismatch("candidate forms have degree >= 2")
        if self.omega.degree > self.omega.chart.dim:
            raise DegreeMismatch("candidate degree exceeds the chart dimension")

    @property
    def chart(self) -> Chart:
        return self.omega.chart

    @property
    def k(self) -> int:
        return self.omega.degree - 1


@dataclass(frozen=True)
class HamiltonianPair:
    """A (k-1)-form together with the unique field contracting to its differential."""

    alpha: DiffForm
    field: MultiVectorField


def form_keys(chart: Chart, degree: int):
    return list(combinations(range(chart.dim), degree))


def form_vector(form: DiffForm, keys=None):
    keys = keys if keys is not None else form_keys(form.chart, form.degree)
    return [form.coefficient(key) for key in keys]


def form_from_vector(chart: Chart, degree: int, vector, keys=None) -> DiffForm:
    keys = keys if keys is not None else form_keys(chart, degree)
    return DiffForm(chart, degree, dict(zip(keys, vector)))


def sharp_matrix(omega: DiffForm) -> SymMatrix:
    """Matrix of X -> i_X w: rows over basis k-index tuples, columns over X components."""
    chart = omega.chart
    k = omega.degree - 1
    keys = form_keys(chart, k)
    key_pos = {key: r for r, key in enumerate(keys)}
    zero = chart.constant(0)
    entries = [[zero for _ in range(chart.dim)] for _ in keys]
    for j in range(chart.dim):
        contracted = interior_product(chart.basis_vector(chart.coords[j]), omega)
        for key, value in contracted.coeffs.items():
            entries[key_pos[key]][j] = value
    return SymMatrix(chart.coords, entries)


def is_closed(omega: DiffForm) -> Verdict:
    """Pass iff dw vanishes identically; the residual is dw itself."""
    residual = exterior_derivative(omega)
    if residual.is_zero:
        return Verdict.passing(IDENTICAL)
    return Verdict.failing(IDENTICAL, residual=residual)


def check_nondegenerate(candidate: PlecticCandidate) -> Verdict:
    """Trivial kernel of X -> i_X w, generically or at the candidate's samples."""
    matrix = sharp_matrix(candidate.omega)
    if candidate.mode == SAMPLED:
        dim = candidate.chart.dim
        ranks = rank_at_points(matrix, candidate.points)
        bad = [
            (pt, r) for pt, r in zip(candidate.points, ranks) if r != dim
        ]
        if bad:
            return Verdict.failing(
                SAMPLED,
                points=tuple(candidate.points),
                notes="; ".join(f"rank {r} at {pt.format()}" for pt, r in bad),
            )
        return Verdict.passing(SAMPLED, points=tuple(candidate.points))
    data = rref(matrix)
    if data.kernel_basis:
        witness = MultiVectorField(
            candidate.chart, 1, {(j,): v for j, v in enumerate(data.kernel_basis[0])}
        )
        return Verdict.failing(GENERIC, residual=witness, loci=data.pivot_denominators)
    return Verdict.passing(GENERIC, loci=data.pivot_denominators)


def hamiltonian_vector_field(candidate: PlecticCandidate, alpha: DiffForm) -> HamiltonianPair:
    """Solve i_X w = d(alpha) exactly; uniqueness requires a trivial kernel."""
    if alpha.degree != candidate.k - 1:
        raise DegreeMismatch(
            f"hamiltonian candidates have degree {candidate.k - 1}, got {alpha.degree}"
        )
    chart = candidate.chart
    matrix = sharp_matrix(candidate.omega)
    keys = form_keys(chart, candidate.k)
    rhs = form_vector(exterior_derivative(alpha), keys)
    solution = solve_linear(matrix, rhs)
    if isinstance(solution, Inconsistent):
        raise NotHamiltonian(
            "differential lies outside the image of the contraction map",
            solution.certificate,
        )
    data = rref(matrix)
    if data.kernel_basis:
        raise Degenerate("contraction map has a kernel; the solving field is not unique")
    field = MultiVectorField(chart, 1, {(j,): v for j, v in enumerate(solution)})
    return HamiltonianPair(alpha=alpha, field=field)


def semibracket(candidate: PlecticCandidate, alpha: DiffForm, beta: DiffForm) -> DiffForm:
    """i_{X_alpha} i_{X_beta} w on hamiltonian (k-1)-forms; antisymmetric."""
    xa = hamiltonian_vector_field(candidate, alpha).field
    xb = hamiltonian_vector_field(candidate, beta).field
    return _double_contraction(candidate.omega, xa, xb)


def _double_contraction(omega: DiffForm, xa: MultiVectorField, xb: MultiVectorField) -> DiffForm:
    if xb.is_zero or xa.is_zero:
        return omega.chart.zero_form(omega.degree - 2)
    return interior_product(xa, interior_product(xb, omega))


def jacobiator_check(
    candidate: PlecticCandidate, alpha: DiffForm, beta: DiffForm, gamma: DiffForm
) -> Verdict:
    """Cyclic jacobiator against the exact-term correction, both sides exact.

    Inner semibrackets are re-solved rather than assumed hamiltonian.
    """
    xa = hamiltonian_vector_field(candidate, alpha).field
    xb = hamiltonian_vector_field(candidate, beta).field
    xg = hamiltonian_vector_field(candidate, gamma).field
    double_bg = _double_contraction(candidate.omega, xb, xg)
    cyclic = (
        semibracket(candidate, alpha, double_bg)
        + semibracket(candidate, gamma, _double_contraction(candidate.omega, xa, xb))
        + semibracket(candidate, beta, _double_contraction(candidate.omega, xg, xa))
    )
    if candidate.k >= 2 and not (xa.is_zero or double_bg.is_zero):
        triple = interior_product(xa, double_bg)
        exact_term = exterior_derivative(triple).scaled(-JACOBIATOR_SIGN)
    else:
        # for k = 1 the triple contraction is already below degree zero
        exact_term = candidate.chart.zero_form(candidate.k - 1)
    residual = cyclic - exact_term
    if residual.is_zero:
        return Verdict.passing(IDENTICAL)
    return Verdict.failing(IDENTICAL, residual=residual)


def symplectic_poisson_bracket(
    omega: DiffForm, f: RationalFunction, g: RationalFunction
) -> RationalFunction:
    """{f, g} from a symplectic 2-form, via two exact hamiltonian solves.

    Satisfies antisymmetry and the Leibniz rule; the sign of {x, y} on
    dx^dy is a fixed convention of the contraction order.
    """
    if omega.degree != 2:
        raise DegreeMismatch("the scalar bracket needs a 2-form")
    chart = omega.chart
    candidate = PlecticCandidate(omega)
    nondeg = check_nondegenerate(candidate)
    if not nondeg.ok:
        raise Degenerate("2-form is degenerate; the bracket is undefined")
    falpha = DiffForm(chart, 0, {(): f})
    fbeta = DiffForm(chart, 0, {(): g})
    result = semibracket(candidate, falpha, fbeta)
    return result.coefficient(())
