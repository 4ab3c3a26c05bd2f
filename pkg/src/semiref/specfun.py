"""Complete elliptic integrals via the arithmetic-geometric mean.

Arguments follow the PARAMETER convention: ``m`` is the square of the
modulus k, so

    K(m) = integral_0^{pi/2} dt / sqrt(1 - m sin^2 t),
    E(m) = integral_0^{pi/2} dt * sqrt(1 - m sin^2 t).

The AGM iteration converges quadratically; it stops once successive
means agree to 1e-15 relative, i.e. machine precision.
"""

from __future__ import annotations

import math

from .errors import DomainError

__all__ = ["elliptic_k", "elliptic_e"]

_AGM_RTOL = 1e-15


def elliptic_k(m: float) -> float:
    """Complete elliptic integral of the first kind, K(m) for 0 <= m < 1.

    K diverges logarithmically as m -> 1, hence m = 1 is rejected.
    """
    if not 0.0 <= m < 1.0:
        raise DomainError(f"K(m) requires 0 <= m < 1, got {m!r}")
    a, b = 1.0, math.sqrt(1.0 - m)
    while abs(a - b) > _AGM_RTOL * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def elliptic_e(m: float) -> float:
    """Complete elliptic integral of the second kind, E(m) for 0 <= m <= 1.

    Uses the AGM together with the accumulated sum of squared half
    differences: E = K * (1 - sum_n 2^{n-1} c_n^2) with c_0^2 = m.
    """
    if not 0.0 <= m <= 1.0:
        raise DomainError(f"E(m) requires 0 <= m <= 1, got {m!r}")
    if m == 1.0:
        return 1.0
    a, b = 1.0, math.sqrt(1.0 - m)
    csum = 0.5 * m
    pow2 = 0.5
    while abs(a - b) > _AGM_RTOL * a:
        c = 0.5 * (a - b)
        pow2 *= 2.0
        csum += pow2 * c * c
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b) * (1.0 - csum)
