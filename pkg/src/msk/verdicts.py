"""Verdict values returned by every check operation.

A verdict never conflates symbolic and pointwise certainty: ``validity`` is
"identical" for exact identities, "generic" for fraction-field eliminations
(valid off the recorded denominator loci), or "sampled" for pointwise checks
at the recorded sample points.
"""

from dataclasses import dataclass, field

IDENTICAL = "identical"
GENERIC = "generic"
SAMPLED = "sampled"


@dataclass(frozen=True)
class Verdict:
    ok: bool
    validity: str = IDENTICAL
    residual: object = None
    loci: tuple = ()
    points: tuple = ()
    items: tuple = ()
    notes: str = ""

    @staticmethod
    def passing(validity: str = IDENTICAL, **kw) -> "Verdict":
        return Verdict(ok=True, validity=validity, **kw)

    @staticmethod
    def failing(validity: str = IDENTICAL, **kw) -> "Verdict":
        return Verdict(ok=False, validity=validity, **kw)

    @staticmethod
    def combine(items, validity: str = IDENTICAL, notes: str = "") -> "Verdict":
        """Fold named sub-verdicts; passes iff every item passes."""
        items = tuple(items)
        ok = all(v.ok for _, v in items)
        loci = tuple(dict.fromkeys(l for _, v in items for l in v.loci))
        points = tuple(dict.fromkeys(p for _, v in items for p in v.points))
        return Verdict(
            ok=ok, validity=validity, items=items, loci=loci, points=points, notes=notes
        )

    def item(self, name: str) -> "Verdict":
        for key, verdict in self.items:
            if key == name:
                return verdict
        raise KeyError(name)
