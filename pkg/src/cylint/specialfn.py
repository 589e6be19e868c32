"""Arithmetic-geometric mean, complete elliptic integral K and Jacobi sn, cn, dn.

The Jacobi functions use the descending Landen (AGM) scheme: run the AGM
from (1, k') recording c_n, start from phi_N = 2^N a_N u and walk back with
phi_{n-1} = (phi_n + asin(c_n / a_n * sin(phi_n))) / 2.
"""

import logging
import math

from cylint.geometry import DomainError

logger = logging.getLogger(__name__)

AGM_RTOL = 1e-15
AGM_MAX_ITER = 64


def agm(a: float, b: float) -> float:
    """
    Arithmetic-geometric mean of two positive numbers.

    Args:
        a: First argument, > 0
        b: Second argument, > 0

    Returns:
        Common limit of the arithmetic and geometric mean sequences, to
        relative accuracy 1e-15

    Raises:
        DomainError: If an argument is not a positive finite number
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a <= 0.0 or b <= 0.0:
        raise DomainError(f"agm requires positive finite arguments, got ({a}, {b})")
    for _ in range(AGM_MAX_ITER):
        if abs(a - b) <= AGM_RTOL * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellip_K(k: float) -> float:
    """
    Complete elliptic integral of the first kind, K(k) = pi / (2 agm(1, k')).

    Args:
        k: Modulus, 0 <= k < 1

    Returns:
        K(k); exactly pi/2 for k = 0

    Raises:
        DomainError: If k is outside [0, 1) (K diverges at k = 1)
    """
    if not math.isfinite(k) or k < 0.0 or k > 1.0:
        raise DomainError(f"modulus must lie in [0, 1], got {k}")
    if k == 1.0:
        raise DomainError("K(k) diverges at k = 1")
    if k == 0.0:
        return math.pi / 2.0
    return math.pi / (2.0 * agm(1.0, math.sqrt(1.0 - k * k)))


def _landen_amplitude(u: float, k: float) -> float:
    """Jacobi amplitude am(u, k) for 0 < k < 1 via the descending Landen scheme."""
    a = [1.0]
    c = [k]
    b = math.sqrt(1.0 - k * k)
    while abs(c[-1]) > AGM_RTOL * a[-1] and len(a) < AGM_MAX_ITER:
        a_next = 0.5 * (a[-1] + b)
        c.append(0.5 * (a[-1] - b))
        b = math.sqrt(a[-1] * b)
        a.append(a_next)

    n = len(a) - 1
    phi = math.ldexp(a[n] * u, n)
    while n > 0:
        phi = 0.5 * (phi + math.asin(c[n] / a[n] * math.sin(phi)))
        n -= 1
    return phi


def jacobi_sn_cn_dn(u: float, k: float) -> tuple[float, float, float]:
    """
    Jacobi elliptic functions sn, cn, dn for real argument and modulus.

    Args:
        u: Real argument
        k: Modulus, 0 <= k <= 1. The endpoints give the elementary
            degenerations (sin, cos, 1) and (tanh, sech, sech)

    Returns:
        Tuple (sn, cn, dn)

    Raises:
        DomainError: If k is outside [0, 1] or u is not finite
    """
    if not math.isfinite(u):
        raise DomainError(f"argument must be finite, got {u}")
    if not math.isfinite(k) or k < 0.0 or k > 1.0:
        raise DomainError(f"modulus must lie in [0, 1], got {k}")

    if k == 0.0:
        return math.sin(u), math.cos(u), 1.0
    if k == 1.0:
        # 2 e^-|u| / (1 + e^-2|u|) stays finite for any finite u
        e = math.exp(-abs(u))
        sech = 2.0 * e / (1.0 + e * e)
        return math.tanh(u), sech, sech

    phi = _landen_amplitude(u, k)
    sn = math.sin(phi)
    cn = math.cos(phi)
    dn = math.sqrt(max(0.0, 1.0 - k * k * sn * sn))
    return sn, cn, dn


def jacobi_sn(u: float, k: float) -> float:
    return jacobi_sn_cn_dn(u, k)[0]


def jacobi_cn(u: float, k: float) -> float:
    return jacobi_sn_cn_dn(u, k)[1]


def jacobi_dn(u: float, k: float) -> float:
    return jacobi_sn_cn_dn(u, k)[2]
