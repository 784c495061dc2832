"""Scenario documents and the batch check runner.

A scenario is a JSON document declaring charts, named objects (with all
mathematical payloads as grammar text), and an ordered list of checks.
Catalog instantiations expand inline under a name prefix.  Reports are
deterministic for a fixed seed: per-check sample streams derive from the
global seed and the check index, and every residual is rendered through
the canonical formatters.
"""

import time
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field

from . import algebroid as algebroid_mod
from . import catalog as catalog_mod
from . import courant as courant_mod
from . import groupoid as groupoid_mod
from . import plectic as plectic_mod
from .courant import CourantSection, DLPair, SubbundleFrame
from .errors import EngineError, ScenarioError, UnknownName
from .forms import (
    Chart,
    DiffForm,
    MultiVectorField,
    SmoothMap,
    format_form,
    format_multivector,
    format_scalar,
)
from .linalg import SymMatrix
from .sampling import derive_seed, sample_points
from .scalars import Polynomial, RationalFunction
from .verdicts import GENERIC, SAMPLED, Verdict

# -- declarations ------------------------------------------------------------


class ScalarDecl(BaseModel):
    kind: Literal["scalar"]
    chart: str
    text: str


class FormDecl(BaseModel):
    kind: Literal["form"]
    chart: str
    text: str
    degree: Optional[int] = None


class MultivectorDecl(BaseModel):
    kind: Literal["multivector"]
    chart: str
    text: str
    degree: Optional[int] = None


class SectionDecl(BaseModel):
    vector: str = "0"
    form: str = "0"


class FrameDecl(BaseModel):
    kind: Literal["frame"]
    chart: str
    k: int
    sections: list[SectionDecl] = Field(default_factory=list)


class MapDecl(BaseModel):
    kind: Literal["map"]
    source: str
    target: str
    components: list[str]


class DLDecl(BaseModel):
    kind: Literal["dl_pair"]
    chart: str
    k: int
    forms: list[str]
    anchor: list[list[str]]


class AlgebroidDecl(BaseModel):
    kind: Literal["algebroid"]
    chart: str
    rank: int
    anchor: list[list[str]]
    structure: dict[str, str] = Field(default_factory=dict)


class IMDecl(BaseModel):
    kind: Literal["im_form"]
    algebroid: str
    k: int
    forms: list[str]


class GroupoidDecl(BaseModel):
    kind: Literal["groupoid"]
    arrows: str
    base: str
    pairs: str
    source: list[str]
    target: list[str]
    unit: list[str]
    inversion: list[str]
    pr1: list[str]
    pr2: list[str]
    mult: list[str]
    unit_complement: Optional[list[list[str]]] = None
    right_ext: list[str] = Field(default_factory=list)
    inv_pairing: Optional[list[str]] = None


class CEDecl(BaseModel):
    kind: Literal["ce"]
    rank: int
    structure: dict[str, str] = Field(default_factory=dict)
    pairing: list[list[str]]


class MatrixDecl(BaseModel):
    kind: Literal["matrix"]
    chart: str
    rows: list[list[str]]


class CatalogDecl(BaseModel):
    kind: Literal["catalog"]
    name: str
    params: dict[str, str] = Field(default_factory=dict)


ObjectDecl = Annotated[
    Union[
        ScalarDecl,
        FormDecl,
        MultivectorDecl,
        FrameDecl,
        MapDecl,
        DLDecl,
        AlgebroidDecl,
        IMDecl,
        GroupoidDecl,
        CEDecl,
        MatrixDecl,
        CatalogDecl,
    ],
    Field(discriminator="kind"),
]


class CheckDecl(BaseModel):
    op: str
    args: list[str] = Field(default_factory=list)
    name: Optional[str] = None
    mode: Optional[Literal["identical", "generic", "sampled"]] = None


class SamplingDecl(BaseModel):
    seed: int = 0
    count: int = 10
    box: int = 5


class ScenarioModel(BaseModel):
    name: str = "scenario"
    charts: dict[str, list[str]] = Field(default_factory=dict)
    objects: dict[str, ObjectDecl] = Field(default_factory=dict)
    checks: list[CheckDecl] = Field(default_factory=list)
    sampling: SamplingDecl = Field(default_factory=SamplingDecl)


# -- report ------------------------------------------------------------------


class CheckResult(BaseModel):
    name: str
    op: str
    verdict: Literal["pass", "fail", "error"]
    validity: Optional[str] = None
    residual: Optional[str] = None
    locus: list[str] = Field(default_factory=list)
    points: list[str] = Field(default_factory=list)
    items: dict[str, str] = Field(default_factory=dict)
    notes: Optional[str] = None
    millis: float = 0.0


class ReportModel(BaseModel):
    scenario: str
    seed: int
    checks: list[CheckResult]
    passed: bool

    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def human_lines(self) -> list[str]:
        lines = [f"scenario {self.scenario!r} (seed {self.seed})"]
        for c in self.checks:
            mark = {"pass": "pass", "fail": "FAIL", "error": "ERROR"}[c.verdict]
            extra = f" [{c.validity}]" if c.validity else ""
            lines.append(f"  [{mark}] {c.name} ({c.op}){extra}")
            if c.items:
                for key, value in c.items.items():
                    lines.append(f"      - {key}: {value}")
            if c.residual:
                lines.append(f"      residual: {c.residual}")
            if c.notes:
                lines.append(f"      note: {c.notes}")
            if c.locus:
                lines.append(f"      valid off: {', '.join(c.locus)}")
        lines.append("result: " + ("all checks passed" if self.passed else "failures present"))
        return lines


# -- environment building ------------------------------------------------------


class Environment:
    def __init__(self):
        self.charts: dict[str, Chart] = {}
        self.objects: dict[str, tuple[str, object]] = {}

    def chart(self, name: str) -> Chart:
        if name not in self.charts:
            raise UnknownName(f"unknown chart {name!r}")
        return self.charts[name]

    def resolve(self, name: str, kind: str):
        if name not in self.objects:
            raise UnknownName(f"unknown object {name!r}")
        actual, value = self.objects[name]
        if actual != kind:
            raise ScenarioError(f"object {name!r} is a {actual}, expected {kind}")
        return value


def _wrap_parse(fn, what: str):
    try:
        return fn()
    except EngineError as err:
        raise ScenarioError(f"{what}: {err}") from err


def _build_object(env: Environment, name: str, decl) -> None:
    if isinstance(decl, CatalogDecl):
        sub = _wrap_parse(
            lambda: catalog_mod.build_scenario(decl.name, decl.params),
            f"catalog object {name!r}",
        )
        sub_model = ScenarioModel.model_validate(sub)
        rename_charts = {old: f"{name}.{old}" for old in sub_model.charts}
        for old, coords in sub_model.charts.items():
            env.charts[rename_charts[old]] = Chart(rename_charts[old], coords)
        for sub_name, sub_decl in sub_model.objects.items():
            remapped = _remap_chart_names(sub_decl, rename_charts, name)
            _build_object(env, f"{name}.{sub_name}", remapped)
        return
    if isinstance(decl, ScalarDecl):
        chart = env.chart(decl.chart)
        env.objects[name] = ("scalar", _wrap_parse(lambda: chart.scalar(decl.text), name))
        return
    if isinstance(decl, FormDecl):
        chart = env.chart(decl.chart)
        env.objects[name] = (
            "form",
            _wrap_parse(lambda: chart.form(decl.text, degree=decl.degree), name),
        )
        return
    if isinstance(decl, MultivectorDecl):
        chart = env.chart(decl.chart)
        env.objects[name] = (
            "multivector",
            _wrap_parse(lambda: chart.multivector(decl.text, degree=decl.degree), name),
        )
        return
    if isinstance(decl, FrameDecl):
        chart = env.chart(decl.chart)

        def build():
            sections = []
            for s in decl.sections:
                vector = chart.multivector(s.vector, degree=1)
                form = chart.form(s.form, degree=decl.k)
                sections.append(CourantSection(vector, form))
            return SubbundleFrame(chart, decl.k, sections)

        env.objects[name] = ("frame", _wrap_parse(build, name))
        return
    if isinstance(decl, MapDecl):
        source = env.chart(decl.source)
        target = env.chart(decl.target)
        env.objects[name] = (
            "map",
            _wrap_parse(
                lambda: SmoothMap(source, target, [source.scalar(t) for t in decl.components]),
                name,
            ),
        )
        return
    if isinstance(decl, DLDecl):
        chart = env.chart(decl.chart)

        def build():
            forms = tuple(chart.form(t, degree=decl.k) for t in decl.forms)
            anchor = SymMatrix(
                chart.coords,
                [[chart.scalar(t) for t in row] for row in decl.anchor],
                cols=len(forms),
            )
            return DLPair(chart=chart, k=decl.k, forms=forms, anchor=anchor)

        env.objects[name] = ("dl_pair", _wrap_parse(build, name))
        return
    if isinstance(decl, AlgebroidDecl):
        chart = env.chart(decl.chart)

        def build():
            anchor = SymMatrix(
                chart.coords,
                [[chart.scalar(t) for t in row] for row in decl.anchor],
                cols=decl.rank,
            )
            structure = {}
            for key, text in decl.structure.items():
                i, j, l = (int(p) for p in key.split(","))
                structure[(i, j, l)] = chart.scalar(text)
            return algebroid_mod.LieAlgebroid(chart, decl.rank, anchor, structure)

        env.objects[name] = ("algebroid", _wrap_parse(build, name))
        return
    if isinstance(decl, IMDecl):
        parent = env.resolve(decl.algebroid, "algebroid")

        def build():
            forms = tuple(parent.base.form(t, degree=decl.k) for t in decl.forms)
            return algebroid_mod.IMFormMap(algebroid=parent, k=decl.k, forms=forms)

        env.objects[name] = ("im_form", _wrap_parse(build, name))
        return
    if isinstance(decl, GroupoidDecl):
        arrows = env.chart(decl.arrows)
        base = env.chart(decl.base)
        pairs = env.chart(decl.pairs)

        def build():
            def to_map(source, target, comps):
                return SmoothMap(source, target, [source.scalar(t) for t in comps])

            unit_complement = None
            if decl.unit_complement is not None:
                unit_complement = tuple(
                    tuple(base.scalar(t) for t in row) for row in decl.unit_complement
                )
            right_ext = tuple(
                arrows.multivector(t, degree=1) for t in decl.right_ext
            )
            inv_pairing = (
                to_map(arrows, pairs, decl.inv_pairing)
                if decl.inv_pairing is not None
                else None
            )
            return groupoid_mod.GroupoidChart(
                arrows=arrows,
                base=base,
                source_map=to_map(arrows, base, decl.source),
                target_map=to_map(arrows, base, decl.target),
                unit_map=to_map(base, arrows, decl.unit),
                inversion_map=to_map(arrows, arrows, decl.inversion),
                pair_space=pairs,
                pr1=to_map(pairs, arrows, decl.pr1),
                pr2=to_map(pairs, arrows, decl.pr2),
                mult_map=to_map(pairs, arrows, decl.mult),
                unit_complement=unit_complement,
                right_ext=right_ext,
                inv_pairing=inv_pairing,
            )

        env.objects[name] = ("groupoid", _wrap_parse(build, name))
        return
    if isinstance(decl, CEDecl):

        def build():
            structure = {}
            for key, text in decl.structure.items():
                i, j, l = (int(p) for p in key.split(","))
                structure[(i, j, l)] = _as_fraction(text)
            pairing = [[_as_fraction(t) for t in row] for row in decl.pairing]
            return catalog_mod.CEComplex(decl.rank, structure, pairing)

        env.objects[name] = ("ce", _wrap_parse(build, name))
        return
    if isinstance(decl, MatrixDecl):
        chart = env.chart(decl.chart)
        env.objects[name] = (
            "matrix",
            _wrap_parse(
                lambda: SymMatrix(
                    chart.coords, [[chart.scalar(t) for t in row] for row in decl.rows]
                ),
                name,
            ),
        )
        return
    raise ScenarioError(f"unsupported object kind for {name!r}")


def _as_fraction(text: str):
    from fractions import Fraction

    return Fraction(text)


def _remap_chart_names(decl, rename: dict, prefix: str):
    data = decl.model_dump()
    for field in ("chart", "arrows", "base", "pairs", "source", "target"):
        if field in data and isinstance(data[field], str) and data[field] in rename:
            data[field] = rename[data[field]]
    if data.get("kind") == "im_form":
        data["algebroid"] = f"{prefix}.{data['algebroid']}"
    return ScenarioModel.model_validate(
        {"objects": {"x": data}}
    ).objects["x"]


def build_environment(model: ScenarioModel) -> Environment:
    env = Environment()
    for name, coords in model.charts.items():
        env.charts[name] = Chart(name, coords)
    for name, decl in model.objects.items():
        _build_object(env, name, decl)
    return env


# -- check execution -----------------------------------------------------------


def _fmt_residual(value) -> str | None:
    if value is None:
        return None
    if isinstance(value, DiffForm):
        return format_form(value)
    if isinstance(value, MultiVectorField):
        return format_multivector(value)
    if isinstance(value, CourantSection):
        return f"({format_multivector(value.vector)}; {format_form(value.form)})"
    if isinstance(value, (RationalFunction, Polynomial)):
        return format_scalar(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_fmt_residual(v) or "?" for v in value) + ")"
    return str(value)


def _verdict_result(name, op, verdict: Verdict, millis: float) -> CheckResult:
    return CheckResult(
        name=name,
        op=op,
        verdict="pass" if verdict.ok else "fail",
        validity=verdict.validity,
        residual=_fmt_residual(verdict.residual),
        locus=[format_scalar(p) for p in verdict.loci],
        points=[pt.format() for pt in verdict.points],
        items={key: ("pass" if v.ok else "fail") for key, v in verdict.items},
        notes=verdict.notes or None,
        millis=millis,
    )


def _collect_denominators(*objects):
    dens = []

    def add(scalar):
        if isinstance(scalar, RationalFunction) and not scalar.den.is_constant():
            if scalar.den not in dens:
                dens.append(scalar.den)

    for obj in objects:
        if isinstance(obj, DiffForm) or isinstance(obj, MultiVectorField):
            for c in obj.coeffs.values():
                add(c)
        elif isinstance(obj, SubbundleFrame):
            for s in obj.sections:
                for c in s.vector.coeffs.values():
                    add(c)
                for c in s.form.coeffs.values():
                    add(c)
        elif isinstance(obj, DLPair):
            for f in obj.forms:
                for c in f.coeffs.values():
                    add(c)
            for row in obj.anchor.entries:
                for e in row:
                    add(e)
    return dens


def _points_for(env_chart: Chart, sampling: SamplingDecl, check_index: int, avoid):
    return tuple(
        sample_points(
            env_chart,
            derive_seed(sampling.seed, check_index),
            sampling.count,
            sampling.box,
            avoid=avoid,
        )
    )


def _run_check(env: Environment, check: CheckDecl, sampling: SamplingDecl, index: int) -> Verdict:
    op = check.op
    mode = check.mode or "generic"
    if op == "is_closed":
        form = env.resolve(check.args[0], "form")
        return plectic_mod.is_closed(form)
    if op == "nondegenerate":
        form = env.resolve(check.args[0], "form")
        if mode == "sampled":
            points = _points_for(form.chart, sampling, index, _collect_denominators(form))
            return plectic_mod.check_nondegenerate(
                plectic_mod.PlecticCandidate(form, mode=SAMPLED, points=points)
            )
        return plectic_mod.check_nondegenerate(plectic_mod.PlecticCandidate(form))
    if op == "hamiltonian":
        omega = env.resolve(check.args[0], "form")
        alpha = env.resolve(check.args[1], "form")
        from .errors import NotHamiltonian

        try:
            plectic_mod.hamiltonian_vector_field(plectic_mod.PlecticCandidate(omega), alpha)
        except NotHamiltonian as err:
            return Verdict.failing(residual=tuple(err.certificate), notes=str(err))
        return Verdict.passing()
    if op == "jacobiator":
        omega = env.resolve(check.args[0], "form")
        forms = [env.resolve(a, "form") for a in check.args[1:4]]
        return plectic_mod.jacobiator_check(plectic_mod.PlecticCandidate(omega), *forms)
    if op == "poisson_jacobiator_zero":
        from .forms import poisson_jacobiator

        pi = env.resolve(check.args[0], "multivector")
        jac = poisson_jacobiator(pi)
        if jac.is_zero:
            return Verdict.passing()
        return Verdict.failing(residual=jac)
    if op == "isotropic":
        return courant_mod.is_isotropic(env.resolve(check.args[0], "frame"))
    if op == "involutive":
        return courant_mod.is_involutive(env.resolve(check.args[0], "frame"))
    if op == "nondeg_l":
        frame = env.resolve(check.args[0], "frame")
        if mode == "sampled":
            points = _points_for(frame.chart, sampling, index, _collect_denominators(frame))
            return courant_mod.check_nondeg_l(frame, mode=SAMPLED, points=points)
        return courant_mod.check_nondeg_l(frame)
    if op == "orthogonal_profile":
        frame = env.resolve(check.args[0], "frame")
        points = _points_for(frame.chart, sampling, index, _collect_denominators(frame))
        profile = courant_mod.orthogonal_profile(frame, points)
        notes = "; ".join(
            f"dim perp {dim_p}, tangent slice {dim_t} at {pt.format()}"
            for pt, dim_p, dim_t in profile.per_point
        )
        return Verdict.passing(
            SAMPLED,
            points=points,
            notes=f"equals orthogonal generically: {profile.equals_perp_generically}; "
            + notes,
        )
    if op == "leaf_forms_zero":
        frame = env.resolve(check.args[0], "frame")
        points = _points_for(frame.chart, sampling, index, _collect_denominators(frame))
        for pt in points:
            leaf = courant_mod.leaf_form_at(frame, pt)
            if leaf.values:
                return Verdict.failing(
                    SAMPLED, points=points, notes=f"nonzero leaf tensor at {pt.format()}"
                )
        return Verdict.passing(SAMPLED, points=points)
    if op == "dl_conditions":
        pair = env.resolve(check.args[0], "dl_pair")
        if mode == "sampled":
            points = _points_for(pair.chart, sampling, index, _collect_denominators(pair))
            return courant_mod.check_dl(pair, mode=SAMPLED, points=points)
        return courant_mod.check_dl(pair)
    if op == "morphism":
        mapping = env.resolve(check.args[0], "map")
        source_pair = env.resolve(check.args[1], "dl_pair")
        target_pair = env.resolve(check.args[2], "dl_pair")
        return courant_mod.check_morphism(mapping, source_pair, target_pair)
    if op == "algebroid_axioms":
        return algebroid_mod.check_algebroid_axioms(
            env.resolve(check.args[0], "algebroid"), seed=derive_seed(sampling.seed, index)
        )
    if op == "im_form":
        return algebroid_mod.check_im_form(env.resolve(check.args[0], "im_form"))
    if op == "im_nondeg":
        im = env.resolve(check.args[0], "im_form")
        if mode == "sampled":
            points = _points_for(
                im.algebroid.base, sampling, index, _collect_denominators(*im.forms)
            )
            return algebroid_mod.check_im_nondeg(im, mode=SAMPLED, points=points)
        return algebroid_mod.check_im_nondeg(im)
    if op == "equivalence":
        im1 = env.resolve(check.args[0], "im_form")
        im2 = env.resolve(check.args[1], "im_form")
        phi = env.resolve(check.args[2], "matrix")
        return algebroid_mod.check_equivalence(im1, im2, phi)
    if op == "groupoid_axioms":
        return groupoid_mod.check_groupoid_axioms(env.resolve(check.args[0], "groupoid"))
    if op == "multiplicative":
        g = env.resolve(check.args[0], "groupoid")
        omega = env.resolve(check.args[1], "form")
        return groupoid_mod.check_multiplicative(g, omega)
    if op == "unit_inversion":
        g = env.resolve(check.args[0], "groupoid")
        omega = env.resolve(check.args[1], "form")
        return groupoid_mod.check_unit_inversion(g, omega)
    if op == "right_translation":
        g = env.resolve(check.args[0], "groupoid")
        omega = env.resolve(check.args[1], "form")
        return groupoid_mod.check_right_translation(g, omega)
    if op == "induced_im_nondeg":
        g = env.resolve(check.args[0], "groupoid")
        omega = env.resolve(check.args[1], "form")
        im = groupoid_mod.induced_im_form(g, omega)
        if mode == "sampled":
            points = _points_for(
                im.algebroid.base, sampling, index, _collect_denominators(*im.forms)
            )
            return algebroid_mod.check_im_nondeg(im, mode=SAMPLED, points=points)
        return algebroid_mod.check_im_nondeg(im)
    if op == "cartan":
        cx = env.resolve(check.args[0], "ce")
        from .errors import JacobiFails, PairingNotInvariant

        try:
            data = catalog_mod.ce_cartan(cx)
        except (JacobiFails, PairingNotInvariant) as err:
            return Verdict.failing(notes=str(err))
        closed = (
            Verdict.passing()
            if data.differential.is_zero
            else Verdict.failing(residual=data.differential)
        )
        return Verdict.combine(
            [("closed", closed), ("nondegenerate", data.nondegenerate)]
        )
    raise ScenarioError(f"unknown operation {check.op!r}")


OP_ARGS = {
    "is_closed": ("form",),
    "nondegenerate": ("form",),
    "hamiltonian": ("form", "form"),
    "jacobiator": ("form", "form", "form", "form"),
    "poisson_jacobiator_zero": ("multivector",),
    "isotropic": ("frame",),
    "involutive": ("frame",),
    "nondeg_l": ("frame",),
    "orthogonal_profile": ("frame",),
    "leaf_forms_zero": ("frame",),
    "dl_conditions": ("dl_pair",),
    "morphism": ("map", "dl_pair", "dl_pair"),
    "algebroid_axioms": ("algebroid",),
    "im_form": ("im_form",),
    "im_nondeg": ("im_form",),
    "equivalence": ("im_form", "im_form", "matrix"),
    "groupoid_axioms": ("groupoid",),
    "multiplicative": ("groupoid", "form"),
    "unit_inversion": ("groupoid", "form"),
    "right_translation": ("groupoid", "form"),
    "induced_im_nondeg": ("groupoid", "form"),
    "cartan": ("ce",),
}


def validate_checks(env: Environment, model: ScenarioModel) -> None:
    for check in model.checks:
        if check.op not in OP_ARGS:
            raise ScenarioError(f"unknown operation {check.op!r}")
        expected = OP_ARGS[check.op]
        if len(check.args) != len(expected):
            raise ScenarioError(
                f"operation {check.op!r} takes {len(expected)} arguments, got {len(check.args)}"
            )
        for arg, kind in zip(check.args, expected):
            env.resolve(arg, kind)


def run_scenario(document, seed: int | None = None, samples: int | None = None) -> ReportModel:
    """Validate and execute a scenario document (dict or model)."""
    try:
        model = (
            document
            if isinstance(document, ScenarioModel)
            else ScenarioModel.model_validate(document)
        )
    except Exception as err:  # pydantic validation error
        raise ScenarioError(f"scenario does not validate: {err}") from err
    if seed is not None:
        model = model.model_copy(
            update={"sampling": model.sampling.model_copy(update={"seed": seed})}
        )
    if samples is not None:
        model = model.model_copy(
            update={"sampling": model.sampling.model_copy(update={"count": samples})}
        )
    env = build_environment(model)
    validate_checks(env, model)
    results = []
    all_ok = True
    for index, check in enumerate(model.checks):
        name = check.name or f"check-{index}"
        start = time.perf_counter()
        try:
            verdict = _run_check(env, check, model.sampling, index)
            millis = (time.perf_counter() - start) * 1000.0
            result = _verdict_result(name, check.op, verdict, millis)
        except EngineError as err:
            millis = (time.perf_counter() - start) * 1000.0
            result = CheckResult(
                name=name,
                op=check.op,
                verdict="error",
                notes=str(err),
                millis=millis,
            )
        results.append(result)
        if result.verdict != "pass":
            all_ok = False
    return ReportModel(
        scenario=model.name, seed=model.sampling.seed, checks=results, passed=all_ok
    )
