import numpy as np
from scipy.optimize import brentq

from .law import Law, LawKind


def iterate_generating_function(law: Law, n: int, s: float = 0.0) -> float:
    """n-fold composition g o ... o g evaluated at s."""
    if n < 0:
        raise ValueError(f"iteration count must be nonnegative, got {n}")
    value = float(s)
    for _ in range(n):
        value = float(law.generating_function(value))
    return value


def extinction_probability(law: Law) -> float:
    """Smallest fixed point of the generating function on [0, 1]."""
    if float(law.generating_function(0.0)) == 0:
        return 0.0

    def gap(s):
        return float(law.generating_function(s)) - s

    # critical laws only touch the diagonal at 1
    if law.mean() <= 1 + 1e-12 or gap(1 - 1e-9) >= 0:
        return 1.0
    return brentq(gap, 0.0, 1 - 1e-9, xtol=1e-14)


def fractional_linear_iterate(law: Law, n: int, s: float = 0.0) -> float:
    """Closed form for geometric laws, whose generating function is a Moebius map."""
    if law.kind != LawKind.GEOMETRIC:
        raise ValueError("closed form only exists for geometric laws")
    q = law.params[0]
    m = np.linalg.matrix_power(np.array([[0.0, q], [-(1 - q), 1.0]]), n)
    return float((m[0, 0] * s + m[0, 1]) / (m[1, 0] * s + m[1, 1]))
