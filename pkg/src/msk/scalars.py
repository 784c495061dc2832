"""Exact scalar arithmetic over coordinate charts.

Polynomials are maps from exponent vectors to nonzero rational coefficients
over a fixed, ordered tuple of coordinate names.  The representation is
canonical (no stored zero coefficients, graded-lexicographic term order for
formatting and leading-term queries), so structural equality is semantic
equality.  The fraction field is represented by numerator/denominator pairs
reduced by common monomial and rational content only; equality of fractions
is decided by cross-multiplication, never by floating point.
"""

import re
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Union

from .errors import DivisionByZero, ParseError, PoleAtPoint, UnknownCoordinate

Scalarish = Union["RationalFunction", "Polynomial", Fraction, int]


def _grlex_key(expo):
    # graded lexicographic: total degree first, then left-to-right exponents
    return (sum(expo), expo)


class Polynomial:
    """Multivariate polynomial with Fraction coefficients.

    ``coords`` is the ordered tuple of coordinate names; ``terms`` maps
    exponent tuples (one entry per coordinate) to nonzero Fractions.
    Instances are immutable after construction.
    """

    __slots__ = ("coords", "terms")

    def __init__(self, coords: Iterable[str], terms: Mapping[tuple, Scalarish]):
        coords = tuple(coords)
        n = len(coords)
        clean = {}
        for expo, coeff in terms.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != n:
                raise ValueError(f"exponent vector {expo} has length != {n}")
            if any(e < 0 for e in expo):
                raise ValueError(f"negative exponent in {expo}")
            c = Fraction(coeff)
            if c:
                clean[expo] = c
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, coords) -> "Polynomial":
        return cls(coords, {})

    @classmethod
    def constant(cls, coords, value: Scalarish) -> "Polynomial":
        coords = tuple(coords)
        return cls(coords, {(0,) * len(coords): Fraction(value)})

    @classmethod
    def coordinate(cls, coords, name: str) -> "Polynomial":
        coords = tuple(coords)
        if name not in coords:
            raise UnknownCoordinate(f"{name!r} is not a coordinate of {coords}")
        expo = tuple(1 if c == name else 0 for c in coords)
        return cls(coords, {expo: Fraction(1)})

    # -- predicates and views ------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def total_degree(self) -> int:
        """Degree of the leading term; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def leading_coefficient(self) -> Fraction:
        """Coefficient of the graded-lex largest term; 0 for zero."""
        if not self.terms:
            return Fraction(0)
        return self.terms[max(self.terms, key=_grlex_key)]

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        if not self.terms:
            return Fraction(0)
        return next(iter(self.terms.values()))

    # -- arithmetic ----------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, Polynomial):
            if other.coords != self.coords:
                raise ValueError("polynomials over different coordinates")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.coords, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for expo, c in other.terms.items():
            terms[expo] = terms.get(expo, Fraction(0)) + c
        return Polynomial(self.coords, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.coords, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                terms[expo] = terms.get(expo, Fraction(0)) + c1 * c2
        return Polynomial(self.coords, terms)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if not isinstance(power, int) or power < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.coords, 1)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.coords, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coords == other.coords and self.terms == other.terms

    def __hash__(self):
        return hash((self.coords, frozenset(self.terms.items())))

    # -- calculus ------------------------------------------------------------

    def derivative(self, name: str) -> "Polynomial":
        if name not in self.coords:
            raise UnknownCoordinate(f"{name!r} is not a coordinate of {self.coords}")
        i = self.coords.index(name)
        terms = {}
        for expo, c in self.terms.items():
            if expo[i] == 0:
                continue
            new = list(expo)
            new[i] -= 1
            key = tuple(new)
            terms[key] = terms.get(key, Fraction(0)) + c * expo[i]
        return Polynomial(self.coords, terms)

    def evaluate(self, assignment) -> Fraction:
        values = _coerce_assignment(assignment)
        missing = [c for c in self.coords if c not in values]
        if missing:
            raise UnknownCoordinate(f"sample point misses coordinates {missing}")
        total = Fraction(0)
        for expo, c in self.terms.items():
            v = c
            for name, e in zip(self.coords, expo):
                if e:
                    v *= values[name] ** e
            total += v
        return total

    def substitute(self, values: Mapping[str, Scalarish], coords=None) -> "RationalFunction":
        """Evaluate at RationalFunction values, e.g. for map composition.

        ``coords`` names the target coordinate tuple; it may be omitted when
        at least one substituted value determines it.
        """
        if coords is None:
            for v in values.values():
                if isinstance(v, RationalFunction):
                    coords = v.coords
                    break
                if isinstance(v, Polynomial):
                    coords = v.coords
                    break
        if coords is None:
            raise ValueError("target coordinates cannot be inferred")
        coords = tuple(coords)
        lifted = {}
        total = RationalFunction.constant(coords, 0)
        for expo, c in self.terms.items():
            term = RationalFunction.constant(coords, c)
            for name, e in zip(self.coords, expo):
                if not e:
                    continue
                if name not in values:
                    raise UnknownCoordinate(f"no substitution supplied for {name!r}")
                if name not in lifted:
                    lifted[name] = _as_rational(values[name], coords)
                term = term * lifted[name] ** e
            total = total + term
        return total

    # -- content helpers (used by RationalFunction reduction) ----------------

    def _monomial_content(self):
        if not self.terms:
            return None
        mins = None
        for expo in self.terms:
            if mins is None:
                mins = list(expo)
            else:
                mins = [min(a, b) for a, b in zip(mins, expo)]
        return tuple(mins)

    def _divide_monomial(self, shift) -> "Polynomial":
        terms = {tuple(a - b for a, b in zip(e, shift)): c for e, c in self.terms.items()}
        return Polynomial(self.coords, terms)

    def _scaled(self, factor: Fraction) -> "Polynomial":
        factor = Fraction(factor)
        return Polynomial(self.coords, {e: c * factor for e, c in self.terms.items()})

    def __repr__(self):
        return f"Polynomial({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _content_of(polys) -> Fraction:
    """Positive rational content of the union of all coefficients."""
    num = 0
    den = 1
    for p in polys:
        for c in p.terms.values():
            num = gcd(num, abs(c.numerator))
            den = lcm(den, c.denominator)
    return Fraction(num, den)


class RationalFunction:
    """Quotient of polynomials in a canonical reduced-pair form.

    Reduction removes the common monomial content of numerator and
    denominator, scales the pair so the denominator is integer-primitive
    (removing the rational content they share through it), and fixes the
    sign so that the denominator's graded-lex leading coefficient is
    positive.  Full multivariate gcd is deliberately not attempted: ``==``
    decides equality by cross-multiplication, which is exact and cheap.
    """

    __slots__ = ("num", "den")
    __hash__ = None  # semantic equality is coarser than the representation

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.constant(num.coords, 1)
        if num.coords != den.coords:
            raise ValueError("numerator and denominator over different coordinates")
        if den.is_zero:
            raise DivisionByZero("denominator is identically zero")
        if num.is_zero:
            den = Polynomial.constant(num.coords, 1)
        else:
            shift = tuple(
                min(a, b)
                for a, b in zip(num._monomial_content(), den._monomial_content())
            )
            if any(shift):
                num = num._divide_monomial(shift)
                den = den._divide_monomial(shift)
            # scale so the denominator is an integer-primitive polynomial;
            # the numerator keeps whatever rational coefficients remain
            content = _content_of((den,))
            if content != 1:
                num = num._scaled(1 / content)
                den = den._scaled(1 / content)
            if den.leading_coefficient() < 0:
                num = -num
                den = -den
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def constant(cls, coords, value: Scalarish) -> "RationalFunction":
        return cls(Polynomial.constant(coords, value))

    @classmethod
    def coordinate(cls, coords, name: str) -> "RationalFunction":
        return cls(Polynomial.coordinate(coords, name))

    @property
    def coords(self):
        return self.num.coords

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self):
        return not self.num.is_zero

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    # -- arithmetic ----------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            if other.coords != self.coords:
                raise ValueError("rational functions over different coordinates")
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.coords, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.is_zero:
            raise DivisionByZero("division by the zero function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, power: int):
        if not isinstance(power, int):
            raise ValueError("powers must be integers")
        if power < 0:
            if self.is_zero:
                raise DivisionByZero("negative power of the zero function")
            return RationalFunction(self.den, self.num) ** (-power)
        return RationalFunction(self.num**power, self.den**power)

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero

    # -- calculus ------------------------------------------------------------

    def derivative(self, name: str) -> "RationalFunction":
        dn = self.num.derivative(name)
        dd = self.den.derivative(name)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, assignment) -> Fraction:
        d = self.den.evaluate(assignment)
        if d == 0:
            raise PoleAtPoint(f"denominator {format_scalar(self.den)} vanishes at the point")
        return self.num.evaluate(assignment) / d

    def substitute(self, values: Mapping[str, Scalarish], coords=None) -> "RationalFunction":
        num = self.num.substitute(values, coords)
        den = self.den.substitute(values, coords)
        if den.is_zero:
            raise DivisionByZero("denominator vanishes identically under substitution")
        return num / den

    def __repr__(self):
        return f"RationalFunction({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _as_rational(value: Scalarish, coords) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.coords != tuple(coords):
            raise ValueError("value over unexpected coordinates")
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return RationalFunction.constant(coords, value)


class SamplePoint:
    """One exact rational value per coordinate name."""

    __slots__ = ("assignment",)

    def __init__(self, assignment: Mapping[str, Scalarish]):
        values = {str(k): Fraction(v) for k, v in assignment.items()}
        object.__setattr__(self, "assignment", values)

    def __setattr__(self, name, value):
        raise AttributeError("SamplePoint is immutable")

    def __getitem__(self, name: str) -> Fraction:
        return self.assignment[name]

    def __contains__(self, name: str) -> bool:
        return name in self.assignment

    def names(self):
        return tuple(sorted(self.assignment))

    def __eq__(self, other):
        if not isinstance(other, SamplePoint):
            return NotImplemented
        return self.assignment == other.assignment

    def __hash__(self):
        return hash(frozenset(self.assignment.items()))

    def format(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in sorted(self.assignment.items()))

    def __repr__(self):
        return f"SamplePoint({self.format()})"


def _coerce_assignment(pt) -> Mapping[str, Fraction]:
    if isinstance(pt, SamplePoint):
        return pt.assignment
    return {k: Fraction(v) for k, v in dict(pt).items()}


# ---------------------------------------------------------------------------
# Grammar: tokenizing is shared with the form grammar in forms.py.
# Scalar grammar: identifiers are coordinates, integer literals, + - * /,
# ** with a nonnegative integer exponent, parentheses.
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)|(?P<pow>\*\*)|(?P<op>[-+*/^()])"
)


def tokenize(text: str):
    """Token stream of (kind, text, position); kinds: name/int/pow/op/end."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class ScalarParser:
    """Recursive-descent parser producing RationalFunction values.

    Precedence (loosest first): + - ; * / ; unary - ; ** ; atoms.
    """

    def __init__(self, coords, tokens):
        self.coords = tuple(coords)
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, text):
        kind, value, pos = self.peek()
        if kind != "op" or value != text:
            raise ParseError(f"expected {text!r}", pos)
        return self.advance()

    def parse(self):
        value = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {text!r}", pos)
        return value

    def expr(self):
        value = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.term()
                value = value + rhs if text == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.unary()
        while True:
            kind, text, pos = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.unary()
                value = self.combine_mul(value, rhs, text, pos)
            else:
                return value

    def combine_mul(self, lhs, rhs, op, pos):
        if op == "*":
            return lhs * rhs
        if rhs.is_zero:
            raise DivisionByZero("division by the zero function")
        return lhs / rhs

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text in "+-":
            self.advance()
            value = self.unary()
            return value if text == "+" else self.negate(value)
        return self.power()

    def negate(self, value):
        return -value

    def power(self):
        value = self.atom()
        kind, _, pos = self.peek()
        if kind == "pow":
            self.advance()
            ek, etext, epos = self.peek()
            if ek != "int":
                raise ParseError("exponent must be a nonnegative integer", epos)
            self.advance()
            value = self.raise_power(value, int(etext), pos)
        return value

    def raise_power(self, value, exponent, pos):
        return value**exponent

    def atom(self):
        kind, text, pos = self.advance()
        if kind == "int":
            return RationalFunction.constant(self.coords, int(text))
        if kind == "name":
            return self.name_atom(text, pos)
        if kind == "op" and text == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)

    def name_atom(self, text, pos):
        if text not in self.coords:
            raise ParseError(f"unknown coordinate {text!r}", pos)
        return RationalFunction.coordinate(self.coords, text)


def parse_scalar(coords, text: str) -> RationalFunction:
    return ScalarParser(coords, tokenize(text)).parse()


# ---------------------------------------------------------------------------
# Formatting.  format/parse round-trips are exact: both sides are canonical.
# ---------------------------------------------------------------------------


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _format_monomial(coords, expo) -> str:
    parts = []
    for name, e in zip(coords, expo):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}**{e}")
    return "*".join(parts)


def _format_poly(p: Polynomial) -> str:
    if p.is_zero:
        return "0"
    pieces = []
    for expo in sorted(p.terms, key=_grlex_key, reverse=True):
        coeff = p.terms[expo]
        mono = _format_monomial(p.coords, expo)
        if not mono:
            pieces.append(_format_fraction(coeff))
        elif coeff == 1:
            pieces.append(mono)
        elif coeff == -1:
            pieces.append(f"-{mono}")
        else:
            pieces.append(f"{_format_fraction(coeff)}*{mono}")
    out = pieces[0]
    for piece in pieces[1:]:
        if piece.startswith("-"):
            out += f" - {piece[1:]}"
        else:
            out += f" + {piece}"
    return out


def format_scalar(value: Scalarish) -> str:
    if isinstance(value, (int, Fraction)):
        return _format_fraction(Fraction(value))
    if isinstance(value, Polynomial):
        return _format_poly(value)
    if isinstance(value, RationalFunction):
        if value.den == Polynomial.constant(value.coords, 1):
            return _format_poly(value.num)
        return f"({_format_poly(value.num)})/({_format_poly(value.den)})"
    raise TypeError(f"cannot format {type(value).__name__}")
