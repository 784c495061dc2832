"""Exact linear algebra over the fraction field of the polynomial ring.

Elimination is fraction-free: rows are cleared to polynomial entries and
reduced by single-step Gauss-Jordan with exact division by the previous
pivot (Bareiss), so intermediate entries are minors of the cleared matrix
instead of exponentially growing quotients.  Pivot selection is the first
(row-major) entry that is not identically zero, decided by the exact
scalar-ring test, so results are deterministic.

Symbolic results are *generic*: they hold off the zero loci of the recorded
polynomials (input denominators and elimination pivots).  The pointwise
Fraction twin at the bottom of the module evaluates exact ranks and solves
at sample points, so callers can label verdicts as "generic" or "sampled"
without ever conflating the two.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvariantViolation
from .scalars import Polynomial, RationalFunction, _grlex_key, format_scalar


class SymMatrix:
    """Rectangular matrix of RationalFunction entries over one chart."""

    __slots__ = ("coords", "rows", "cols", "entries")

    def __init__(self, coords, entries: Sequence[Sequence], cols: int | None = None):
        coords = tuple(coords)
        rows = tuple(tuple(_lift(coords, e) for e in row) for row in entries)
        ncols = {len(r) for r in rows}
        if len(ncols) > 1:
            raise ValueError("ragged rows")
        width = ncols.pop() if ncols else (cols or 0)
        if cols is not None and width != cols:
            raise ValueError(f"rows have {width} entries, expected {cols}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", width)

    def __setattr__(self, name, value):
        raise AttributeError("SymMatrix is immutable")

    @classmethod
    def identity(cls, coords, n: int) -> "SymMatrix":
        one = RationalFunction.constant(coords, 1)
        zero = RationalFunction.constant(coords, 0)
        return cls(coords, [[one if i == j else zero for j in range(n)] for i in range(n)])

    def entry(self, i: int, j: int) -> RationalFunction:
        return self.entries[i][j]

    def column(self, j: int):
        return [row[j] for row in self.entries]

    def transpose(self) -> "SymMatrix":
        return SymMatrix(
            self.coords,
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def evaluate_at(self, point):
        """Fraction matrix at the point; PoleAtPoint on vanishing denominators."""
        return [[e.evaluate(point) for e in row] for row in self.entries]

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return (
            self.coords == other.coords
            and self.rows == other.rows
            and self.cols == other.cols
            and all(
                a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
            )
        )

    def __repr__(self):
        body = "; ".join(", ".join(format_scalar(e) for e in row) for row in self.entries)
        return f"SymMatrix[{self.rows}x{self.cols}]({body})"


def _lift(coords, value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.coords != coords:
            raise ValueError("entry over unexpected coordinates")
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return RationalFunction.constant(coords, value)


@dataclass(frozen=True)
class EchelonData:
    """Reduced echelon summary of a symbolic matrix.

    ``rank``, ``pivots`` and ``kernel_basis`` are generic: they are valid
    wherever no polynomial in ``pivot_denominators`` vanishes (input-entry
    denominators are recorded there as well).  ``reduced`` holds the
    normalized reduced rows over the fraction field.
    """

    rank: int
    pivots: tuple
    kernel_basis: tuple
    pivot_denominators: tuple
    reduced: tuple


@dataclass(frozen=True)
class Inconsistent:
    """Left-null certificate y with y.M = 0 and y.b != 0."""

    certificate: tuple


@dataclass(frozen=True)
class Residual:
    """What remains of a vector after reduction against a span."""

    vector: tuple


def div_exact(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact polynomial quotient p/q; raises if the division is not exact.

    Used only for Bareiss divisions, which are exact by construction.
    """
    if q.is_zero:
        raise InvariantViolation("exact division by zero polynomial")
    if p.is_zero:
        return p
    if q.is_constant():
        return p._scaled(1 / q.constant_value())
    quotient = {}
    remainder = p
    lq = max(q.terms, key=_grlex_key)
    cq = q.terms[lq]
    while remainder.terms:
        lr = max(remainder.terms, key=_grlex_key)
        expo = tuple(a - b for a, b in zip(lr, lq))
        if any(e < 0 for e in expo):
            raise InvariantViolation("non-exact division in fraction-free elimination")
        coeff = remainder.terms[lr] / cq
        quotient[expo] = quotient.get(expo, Fraction(0)) + coeff
        mono = Polynomial(p.coords, {expo: coeff})
        remainder = remainder - mono * q
    return Polynomial(p.coords, quotient)


def _normalize_locus(poly: Polynomial) -> Polynomial:
    if poly.leading_coefficient() < 0:
        poly = -poly
    return poly


def _record_locus(loci: list, poly: Polynomial):
    if poly.is_constant():
        return
    poly = _normalize_locus(poly)
    if poly not in loci:
        loci.append(poly)


def _clear_rows(rows, loci: list):
    """Polynomial rows obtained by scaling each row with its denominators.

    Scaling factors are products of the row's distinct entry denominators;
    those denominators are recorded as validity loci, after which row
    scaling does not disturb generic ranks, kernels, or solution sets.
    """
    cleared = []
    for row in rows:
        # canonical denominators are 1 or nonconstant primitive polynomials
        dens = []
        for e in row:
            _record_locus(loci, e.den)
            if not e.den.is_constant() and e.den not in dens:
                dens.append(e.den)
        cleared_row = []
        for e in row:
            value = e.num
            skipped = False
            for d in dens:
                if not skipped and d == e.den:
                    skipped = True
                    continue
                value = value * d
            cleared_row.append(value)
        cleared.append(cleared_row)
    return cleared


def _fraction_free_jordan(rows, width: int, loci: list):
    """Fraction-free reduction restricted to the first ``width`` columns.

    Mutates ``rows`` (polynomial entries).  Forward pass is classical
    Bareiss (divisions by the previous pivot are exact minors); the backward
    pass eliminates above pivots projectively, cross-multiplying rows
    instead of dividing.  Returns the pivot columns; afterwards rows
    0..rank-1 are the pivot rows in order and every other row vanishes on
    the first ``width`` columns.
    """
    nrows = len(rows)
    pivots = []
    pivot_row = 0
    prev = None
    for col in range(width):
        found = None
        for r in range(pivot_row, nrows):
            if not rows[r][col].is_zero:
                found = r
                break
        if found is None:
            continue
        if found != pivot_row:
            rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        pivot = rows[pivot_row][col]
        _record_locus(loci, pivot)
        for r in range(pivot_row + 1, nrows):
            factor = rows[r][col]
            # every row is rescaled even when factor is zero: the Bareiss
            # divisibility invariant needs uniform minors in all rows
            new_row = [pivot * a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
            if prev is not None:
                new_row = [div_exact(e, prev) for e in new_row]
            rows[r] = new_row
        pivots.append(col)
        prev = pivot
        pivot_row += 1
        if pivot_row == nrows:
            break
    rank = len(pivots)
    for i in range(rank - 1, -1, -1):
        for j in range(i + 1, rank):
            factor = rows[i][pivots[j]]
            if factor.is_zero:
                continue
            pivot = rows[j][pivots[j]]
            rows[i] = [pivot * a - factor * b for a, b in zip(rows[i], rows[j])]
        rows[i] = _primitive_row(rows[i])
    return pivots


def _primitive_row(row):
    """Divide a polynomial row by its common rational content."""
    content = _content_of(row)
    if content in (0, 1):
        return row
    scale = 1 / content
    return [e._scaled(scale) for e in row]


def _content_of(polys) -> Fraction:
    num = 0
    den = 1
    for p in polys:
        for c in p.terms.values():
            num = _gcd(num, abs(c.numerator))
            den = _lcm(den, c.denominator)
    return Fraction(num, den) if num else Fraction(0)


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _lcm(a, b):
    return a * b // _gcd(a, b) if a and b else a or b


def _reduced_rows(rows, pivots, coords):
    """Normalize fraction-free output to reduced rows with unit pivots."""
    zero = RationalFunction.constant(coords, 0)
    normalized = []
    for i in range(len(rows)):
        if i < len(pivots):
            pivot_value = rows[i][pivots[i]]
            normalized.append(
                tuple(RationalFunction(e, pivot_value) for e in rows[i])
            )
        else:
            normalized.append(
                tuple(RationalFunction(e) if not e.is_zero else zero for e in rows[i])
            )
    return normalized


def rref(matrix: SymMatrix) -> EchelonData:
    """Reduced row echelon over the fraction field, with generic-rank data."""
    loci: list = []
    rows = _clear_rows(matrix.entries, loci)
    pivots = _fraction_free_jordan(rows, matrix.cols, loci)
    reduced = _reduced_rows(rows, pivots, matrix.coords)
    rank = len(pivots)
    pivot_set = set(pivots)
    zero = RationalFunction.constant(matrix.coords, 0)
    one = RationalFunction.constant(matrix.coords, 1)
    kernel = []
    for free in range(matrix.cols):
        if free in pivot_set:
            continue
        vec = [zero] * matrix.cols
        vec[free] = one
        for i, pcol in enumerate(pivots):
            vec[pcol] = -reduced[i][free]
        kernel.append(tuple(vec))
    return EchelonData(
        rank=rank,
        pivots=tuple(pivots),
        kernel_basis=tuple(kernel),
        pivot_denominators=tuple(loci),
        reduced=tuple(reduced),
    )


def solve_linear(matrix: SymMatrix, rhs: Sequence) -> list | Inconsistent:
    """One exact solution of M.x = b, or an inconsistency certificate.

    The certificate is a left-null covector found in the kernel of the
    transpose, normalized so that its pairing with b is nonzero.
    """
    b = [_lift(matrix.coords, v) for v in rhs]
    if len(b) != matrix.rows:
        raise ValueError("right-hand side length mismatch")
    zero = RationalFunction.constant(matrix.coords, 0)
    if matrix.rows == 0:
        return [zero] * matrix.cols
    loci: list = []
    rows = _clear_rows(
        [list(r) + [bv] for r, bv in zip(matrix.entries, b)], loci
    )
    pivots = _fraction_free_jordan(rows, matrix.cols, loci)
    rank = len(pivots)
    inconsistent = any(not rows[r][matrix.cols].is_zero for r in range(rank, matrix.rows))
    if inconsistent:
        transpose_kernel = rref(matrix.transpose()).kernel_basis
        for y in transpose_kernel:
            pairing = zero
            for c, bv in zip(y, b):
                pairing = pairing + c * bv
            if not pairing.is_zero:
                return Inconsistent(certificate=tuple(y))
        raise InvariantViolation("inconsistent system without a certificate")
    reduced = _reduced_rows(rows, pivots, matrix.coords)
    solution = [zero] * matrix.cols
    for i, pcol in enumerate(pivots):
        solution[pcol] = reduced[i][matrix.cols]
    return solution


def in_span(rows: Sequence[Sequence], vector: Sequence, coords=None) -> list | Residual:
    """Coefficients expressing ``vector`` over ``rows``, or the residual.

    The residual is the remainder of the vector after reduction against the
    reduced echelon form of the rows; it is zero exactly when the vector
    lies in the span, in which case the coefficients come from an exact
    solve of the transposed system.
    """
    if coords is None:
        probe = None
        for row in rows:
            for e in row:
                probe = e
                break
            if probe is not None:
                break
        if probe is None:
            for e in vector:
                probe = e
                break
        if isinstance(probe, (RationalFunction, Polynomial)):
            coords = probe.coords
        else:
            raise ValueError("coordinates cannot be inferred")
    coords = tuple(coords)
    lifted_rows = [[_lift(coords, e) for e in row] for row in rows]
    target = [_lift(coords, e) for e in vector]
    width = len(target)
    if any(len(r) != width for r in lifted_rows):
        raise ValueError("row length mismatch")
    if not lifted_rows:
        if all(e.is_zero for e in target):
            return []
        return Residual(vector=tuple(target))
    span = SymMatrix(coords, lifted_rows)
    data = rref(span)
    w = list(target)
    for i, pcol in enumerate(data.pivots):
        c = w[pcol]
        if c.is_zero:
            continue
        w = [a - c * b for a, b in zip(w, data.reduced[i])]
    if any(not e.is_zero for e in w):
        return Residual(vector=tuple(w))
    solution = solve_linear(span.transpose(), target)
    if isinstance(solution, Inconsistent):  # pragma: no cover - excluded by residual test
        raise InvariantViolation("span membership with inconsistent transpose solve")
    return solution


def rank_at_points(matrix: SymMatrix, points) -> list:
    """Exact numeric rank of the matrix at each sample point."""
    ranks = []
    for pt in points:
        ranks.append(fraction_rank(matrix.evaluate_at(pt)))
    return ranks


# -- numeric (Fraction) twin used for pointwise verdicts ---------------------


def fraction_rank(rows) -> int:
    work = [[Fraction(e) for e in row] for row in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, len(work)):
            if work[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pv = work[rank][col]
        work[rank] = [e / pv for e in work[rank]]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                f = work[r][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[rank])]
        rank += 1
        if rank == len(work):
            break
    return rank


def fraction_solve(rows, rhs):
    """Particular solution and kernel basis of a Fraction system, or None."""
    work = [[Fraction(e) for e in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    pivot_row = 0
    for col in range(ncols):
        pivot = None
        for r in range(pivot_row, len(work)):
            if work[r][col]:
                pivot = r
                break
        if pivot is None:
            continue
        work[pivot_row], work[pivot] = work[pivot], work[pivot_row]
        pv = work[pivot_row][col]
        work[pivot_row] = [e / pv for e in work[pivot_row]]
        for r in range(len(work)):
            if r != pivot_row and work[r][col]:
                f = work[r][col]
                work[r] = [a - f * b for a, b in zip(work[r], work[pivot_row])]
        pivots.append(col)
        pivot_row += 1
    for r in range(pivot_row, len(work)):
        if work[r][ncols]:
            return None
    solution = [Fraction(0)] * ncols
    for i, pcol in enumerate(pivots):
        solution[pcol] = work[i][ncols]
    kernel = []
    pivot_set = set(pivots)
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for i, pcol in enumerate(pivots):
            vec[pcol] = -work[i][free]
        kernel.append(vec)
    return solution, kernel
