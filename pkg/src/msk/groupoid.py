"""Chart-presented groupoids with polynomial structure maps.

The arrow space, base, and composable-pair space are separate charts; all
structure maps are polynomial maps between them, so every compatibility
identity is a decidable polynomial identity.  The algebroid direction along
units is supplied as an explicit complement frame inside ker(ds) (verified,
not assumed), which keeps the induced bundle map deterministic.
"""

from dataclasses import dataclass
from typing import Sequence

from .algebroid import IMFormMap, LieAlgebroid
from .errors import (
    ChartMismatch,
    ComplementNotInKernel,
    InvariantViolation,
    MissingRightExtension,
    MissingUnitComplement,
)
from .forms import (
    Chart,
    DiffForm,
    MultiVectorField,
    SmoothMap,
    interior_product,
    lie_bracket_vf,
    pullback,
)
from .linalg import Residual, SymMatrix, in_span
from .verdicts import IDENTICAL, Verdict


@dataclass(frozen=True)
class GroupoidChart:
    """Arrows over a base with polynomial structure maps.

    ``pair_space`` parametrizes composable pairs through ``pr1``/``pr2``;
    ``unit_complement`` frames the algebroid directions inside the arrow
    tangent space along units (components over the base chart);
    ``right_ext`` optionally extends each of those directions to a vector
    field on the whole arrow chart by right translations.
    """

    arrows: Chart
    base: Chart
    source_map: SmoothMap
    target_map: SmoothMap
    unit_map: SmoothMap
    inversion_map: SmoothMap
    pair_space: Chart
    pr1: SmoothMap
    pr2: SmoothMap
    mult_map: SmoothMap
    unit_complement: tuple | None = None
    right_ext: tuple = ()
    inv_pairing: SmoothMap | None = None

    def __post_init__(self):
        pairs = [
            (self.source_map, self.arrows, self.base),
            (self.target_map, self.arrows, self.base),
            (self.unit_map, self.base, self.arrows),
            (self.inversion_map, self.arrows, self.arrows),
            (self.pr1, self.pair_space, self.arrows),
            (self.pr2, self.pair_space, self.arrows),
            (self.mult_map, self.pair_space, self.arrows),
        ]
        for mapping, source, target in pairs:
            if mapping.source != source or mapping.target != target:
                raise ChartMismatch("structure map endpoints are inconsistent")
        for u in self.unit_complement or ():
            if len(u) != self.arrows.dim:
                raise ChartMismatch("unit complement vectors index arrow coordinates")
        for field in self.right_ext:
            if field.chart != self.arrows or field.degree != 1:
                raise ChartMismatch("right extensions are vector fields on arrows")
        if self.right_ext and len(self.right_ext) != len(self.unit_complement or ()):
            raise MissingRightExtension(
                "one right extension per unit-complement element required"
            )

    @property
    def algebroid_rank(self) -> int:
        return len(self.unit_complement or ())


def _maps_equal(a: SmoothMap, b: SmoothMap) -> bool:
    return all((x - y).is_zero for x, y in zip(a.components, b.components))


def check_groupoid_axioms(g: GroupoidChart) -> Verdict:
    """Each declared structure-map identity, exactly."""
    ident_base = SmoothMap.identity(g.base)
    ident_arrows = SmoothMap.identity(g.arrows)
    items = [
        ("source_unit", g.source_map.compose(g.unit_map), ident_base),
        ("target_unit", g.target_map.compose(g.unit_map), ident_base),
        ("source_mult", g.source_map.compose(g.mult_map), g.source_map.compose(g.pr2)),
        ("target_mult", g.target_map.compose(g.mult_map), g.target_map.compose(g.pr1)),
        ("composability", g.source_map.compose(g.pr1), g.target_map.compose(g.pr2)),
        ("source_inversion", g.source_map.compose(g.inversion_map), g.target_map),
        ("target_inversion", g.target_map.compose(g.inversion_map), g.source_map),
        ("inversion_involutive", g.inversion_map.compose(g.inversion_map), ident_arrows),
    ]
    verdicts = []
    for name, lhs, rhs in items:
        ok = _maps_equal(lhs, rhs)
        verdicts.append(
            (name, Verdict.passing(IDENTICAL) if ok else Verdict.failing(IDENTICAL))
        )
    if g.inv_pairing is not None:
        checks = (
            _maps_equal(g.pr1.compose(g.inv_pairing), ident_arrows)
            and _maps_equal(g.pr2.compose(g.inv_pairing), g.inversion_map)
            and _maps_equal(
                g.mult_map.compose(g.inv_pairing), g.unit_map.compose(g.target_map)
            )
        )
        verdicts.append(
            (
                "inversion_law",
                Verdict.passing(IDENTICAL) if checks else Verdict.failing(IDENTICAL),
            )
        )
    return Verdict.combine(verdicts)


def check_multiplicative(g: GroupoidChart, omega: DiffForm) -> Verdict:
    """Pullback identity over the composable chart, exactly."""
    if omega.chart != g.arrows:
        raise ChartMismatch("form must live on the arrow chart")
    residual = (
        pullback(g.mult_map, omega)
        - pullback(g.pr1, omega)
        - pullback(g.pr2, omega)
    )
    if residual.is_zero:
        return Verdict.passing(IDENTICAL)
    return Verdict.failing(IDENTICAL, residual=residual)


def check_unit_inversion(g: GroupoidChart, omega: DiffForm) -> Verdict:
    """Unit pullback vanishes; inversion pullback negates."""
    if omega.chart != g.arrows:
        raise ChartMismatch("form must live on the arrow chart")
    unit_residual = pullback(g.unit_map, omega)
    unit = (
        Verdict.passing(IDENTICAL)
        if unit_residual.is_zero
        else Verdict.failing(IDENTICAL, residual=unit_residual)
    )
    inv_residual = pullback(g.inversion_map, omega) + omega
    inversion = (
        Verdict.passing(IDENTICAL)
        if inv_residual.is_zero
        else Verdict.failing(IDENTICAL, residual=inv_residual)
    )
    return Verdict.combine([("unit_pullback", unit), ("inversion_pullback", inversion)])


def _retracted_extension(g: GroupoidChart, components) -> MultiVectorField:
    """Extend a unit-complement vector over the arrow chart through the source.

    Only the restriction to units matters for unit-side contractions, so any
    retraction works; the source map is a canonical one.
    """
    subs = g.source_map.substitution()
    coeffs = {}
    for a, value in enumerate(components):
        lifted = value.substitute(subs, coords=g.arrows.coords)
        if not lifted.is_zero:
            coeffs[(a,)] = lifted
    return MultiVectorField(g.arrows, 1, coeffs)


def _restrict_to_units(g: GroupoidChart, scalar):
    """Compose a function on arrows with the unit embedding."""
    subs = g.unit_map.substitution()
    return scalar.substitute(subs, coords=g.base.coords)


def extract_algebroid(g: GroupoidChart, structure=None) -> LieAlgebroid:
    """Algebroid of the groupoid: unit complement with the target differential.

    The unit complement is verified to lie inside ker(ds) along units.
    Structure functions come from brackets of the right extensions
    restricted to units; if both the extensions and explicit structure
    functions are supplied they must agree.
    """
    if g.unit_complement is None:
        raise MissingUnitComplement("no unit complement supplied")
    rank = g.algebroid_rank
    base = g.base
    # kernel condition: ds(u) = 0 along units
    for idx, u in enumerate(g.unit_complement):
        for b in range(base.dim):
            total = base.constant(0)
            for a in range(g.arrows.dim):
                if u[a].is_zero:
                    continue
                partial = g.source_map.components[b].derivative(g.arrows.coords[a])
                total = total + u[a] * _restrict_to_units(g, partial)
            if not total.is_zero:
                raise ComplementNotInKernel(
                    f"unit complement element {idx} leaves ker(ds) along units"
                )
    anchor_entries = [[base.constant(0) for _ in range(rank)] for _ in range(base.dim)]
    for i, u in enumerate(g.unit_complement):
        for b in range(base.dim):
            total = base.constant(0)
            for a in range(g.arrows.dim):
                if u[a].is_zero:
                    continue
                partial = g.target_map.components[b].derivative(g.arrows.coords[a])
                total = total + u[a] * _restrict_to_units(g, partial)
            anchor_entries[b][i] = total
    anchor = SymMatrix(base.coords, anchor_entries, cols=rank)

    derived = {} if rank == 0 else None
    if g.right_ext:
        derived = {}
        rows = [
            [_restrict_to_units(g, u_val) for u_val in u] for u in g.unit_complement
        ]
        for i in range(rank):
            for j in range(i + 1, rank):
                bracket = lie_bracket_vf(g.right_ext[i], g.right_ext[j])
                restricted = [
                    _restrict_to_units(g, bracket.coefficient((a,)))
                    for a in range(g.arrows.dim)
                ]
                out = in_span(rows, restricted, coords=base.coords)
                if isinstance(out, Residual):
                    raise InvariantViolation(
                        "bracket of right extensions leaves the unit complement "
                        f"span on pair ({i}, {j})"
                    )
                for l, c in enumerate(out):
                    if not c.is_zero:
                        derived[(i, j, l)] = c
    if derived is None and structure is None:
        raise MissingRightExtension(
            "structure functions require right extensions or explicit data"
        )
    if structure is not None:
        declared = LieAlgebroid(base, rank, anchor, structure)
        if derived is not None:
            computed = LieAlgebroid(base, rank, anchor, derived)
            for i in range(rank):
                for j in range(i + 1, rank):
                    for l in range(rank):
                        lhs = declared.structure_coefficient(i, j, l)
                        rhs = computed.structure_coefficient(i, j, l)
                        if not (lhs - rhs).is_zero:
                            raise InvariantViolation(
                                "declared structure functions disagree with "
                                f"right-extension brackets on ({i}, {j}, {l})"
                            )
        return declared
    return LieAlgebroid(base, rank, anchor, derived)


def induced_im_form(g: GroupoidChart, omega: DiffForm, structure=None) -> IMFormMap:
    """Unit-side contraction of the form along the algebroid directions.

    Each bundle-map form is the pullback through the unit embedding of the
    contraction of the form with the (arbitrarily extended) algebroid
    direction; the extension choice is invisible after restriction.
    """
    if omega.chart != g.arrows:
        raise ChartMismatch("form must live on the arrow chart")
    if g.unit_complement is None:
        raise MissingUnitComplement("no unit complement supplied")
    algebroid = extract_algebroid(g, structure)
    k = omega.degree - 1
    forms = []
    for u in g.unit_complement:
        extended = _retracted_extension(g, u)
        contracted = (
            interior_product(extended, omega)
            if not extended.is_zero
            else g.arrows.zero_form(k)
        )
        forms.append(pullback(g.unit_map, contracted))
    return IMFormMap(algebroid=algebroid, k=k, forms=tuple(forms))


def check_right_translation(g: GroupoidChart, omega: DiffForm, structure=None) -> Verdict:
    """Contraction identities for right and left translated frames.

    Right: i along the right extension equals the target pullback of the
    induced form.  Left: the inversion pushforward of the right extension
    contracts to minus the source pullback.
    """
    if not g.right_ext:
        raise MissingRightExtension("right extensions are required for this check")
    im = induced_im_form(g, omega, structure)
    right = Verdict.passing(IDENTICAL)
    left = Verdict.passing(IDENTICAL)
    inv_subs = g.inversion_map.substitution()
    for i, field in enumerate(g.right_ext):
        target_side = interior_product(field, omega) - pullback(g.target_map, im.forms[i])
        if not target_side.is_zero:
            right = Verdict.failing(
                IDENTICAL,
                residual=target_side,
                notes=f"right-translation identity fails on frame element {i}",
            )
            break
    if right.ok:
        for i, field in enumerate(g.right_ext):
            # pushforward through the inversion: differential then relabel
            coeffs = {}
            for b in range(g.arrows.dim):
                total = g.arrows.constant(0)
                for a in range(g.arrows.dim):
                    xa = field.coefficient((a,))
                    if xa.is_zero:
                        continue
                    total = total + xa * g.inversion_map.components[b].derivative(
                        g.arrows.coords[a]
                    )
                if not total.is_zero:
                    coeffs[(b,)] = total.substitute(inv_subs, coords=g.arrows.coords)
            pushed = MultiVectorField(g.arrows, 1, coeffs)
            left_side = (
                interior_product(pushed, omega)
                if not pushed.is_zero
                else g.arrows.zero_form(omega.degree - 1)
            ) + pullback(g.source_map, im.forms[i])
            if not left_side.is_zero:
                left = Verdict.failing(
                    IDENTICAL,
                    residual=left_side,
                    notes=f"left-translation identity fails on frame element {i}",
                )
                break
    else:
        left = Verdict.failing(notes="skipped: right-translation identity failed")
    return Verdict.combine([("right_contraction", right), ("left_contraction", left)])
