from __future__ import annotations

import math
from statistics import NormalDist

Z99 = NormalDist().inv_cdf(0.995)


def wilson_interval(successes: int, trials: int, z: float = Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (99% by default)."""
    if trials <= 0:
        return 0.0, 1.0
    phat = successes / trials
    z2 = z * z
    denom = 1 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials))
    # clamp so rounding never pushes phat outside its own interval
    return max(0.0, min(phat, center - half)), min(1.0, max(phat, center + half))
