"""Exact symbolic verification engine for multisymplectic structures.

Everything is computed over the rationals: polynomial coefficient rings,
fraction-field linear algebra, exterior calculus on coordinate charts, and
the structure checks built on top of them.  No floating point is used.
"""

from .errors import EngineError
from .forms import Chart, DiffForm, MultiVectorField, SmoothMap
from .scalars import Polynomial, RationalFunction, SamplePoint
from .verdicts import Verdict

__all__ = [
    "Chart",
    "DiffForm",
    "EngineError",
    "MultiVectorField",
    "Polynomial",
    "RationalFunction",
    "SamplePoint",
    "SmoothMap",
    "Verdict",
]

__version__ = "0.1.0"
