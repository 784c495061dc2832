"""Deterministic rational sample points for pointwise verdicts.

Points are drawn from a seeded generator over fractions p/q with bounded
numerator and denominator; candidates on any of the supplied avoidance
loci (typically recorded pivot denominators) are rejected with a capped
retry count, so runs are reproducible and always pole-free.
"""

import random

from fractions import Fraction

from .errors import ScenarioError
from .forms import Chart
from .scalars import SamplePoint

MAX_DENOMINATOR = 64


def derive_seed(global_seed: int, index: int) -> int:
    # per-check seeds: concurrency or reordering never changes the stream
    return (global_seed * 1000003 + index * 7919 + 12345) & 0x7FFFFFFF


def rational_sample(rng: random.Random, box: int) -> Fraction:
    return Fraction(rng.randint(-box, box), rng.randint(1, MAX_DENOMINATOR))


def sample_points(
    chart: Chart,
    seed: int,
    count: int,
    box: int,
    avoid=(),
    max_tries: int = 80,
):
    """``count`` points on the chart avoiding the zero loci of ``avoid``."""
    rng = random.Random(seed)
    points = []
    for _ in range(count):
        accepted = None
        for _ in range(max_tries):
            candidate = SamplePoint(
                {name: rational_sample(rng, box) for name in chart.coords}
            )
            if all(poly.evaluate(candidate) != 0 for poly in avoid):
                accepted = candidate
                break
        if accepted is None:
            raise ScenarioError(
                f"could not sample a point off the recorded loci on chart {chart.name!r}"
            )
        points.append(accepted)
    return points
