"""Student-t, chi-squared and F distribution functions.

All CDFs reduce to the regularized incomplete beta ``I_x(a, b)`` or the
regularized incomplete gamma ``P(a, x)``, provided by :mod:`scipy.special`.
"""

import math

from scipy import special


def t_cdf(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * special.betainc(0.5 * df, 0.5, df / (df + t * t))
    return float(1.0 - tail if t > 0 else tail)


def t_two_sided_p(t: float, df: float) -> float:
    """``P(|T| >= |t|)``."""
    if math.isinf(t):
        return 0.0
    return float(special.betainc(0.5 * df, 0.5, df / (df + t * t)))


def chi2_cdf(x: float, df: float) -> float:
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if x <= 0:
        return 0.0
    return float(special.gammainc(0.5 * df, 0.5 * x))


def chi2_sf(x: float, df: float) -> float:
    if x <= 0:
        return 1.0
    return float(special.gammaincc(0.5 * df, 0.5 * x))


def f_cdf(x: float, d1: float, d2: float) -> float:
    if d1 <= 0 or d2 <= 0:
        raise ValueError("degrees of freedom must be positive")
    if x <= 0:
        return 0.0
    return float(special.betainc(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2)))


def f_sf(x: float, d1: float, d2: float) -> float:
    if x <= 0:
        return 1.0
    return float(special.betainc(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x)))


def f_ppf(q: float, d1: float, d2: float) -> float:
    """Quantile of the F distribution via the inverse incomplete beta."""
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    z = float(special.betaincinv(0.5 * d1, 0.5 * d2, q))
    return d2 * z / (d1 * (1.0 - z))


def f_critical(d1: float, d2: float, alpha: float = 0.05) -> float:
    return f_ppf(1.0 - alpha, d1, d2)
