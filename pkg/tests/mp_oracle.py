"""High-precision resolvent at large x, independent of the double-precision curve code."""

import mpmath


def mp_w0(curve, x, dps=60):
    # M is rebuilt as the polynomial part of -V'/(2 sqrt(sigma)) at infinity
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        pot = curve.potential
        a, b = mpmath.mpf(curve.a), mpmath.mpf(curve.b)
        s, p = a + b, a * b
        t1, t2, t3, t4 = (mpmath.mpf(t) for t in (pot.t1, pot.t2, pot.t3, pot.t4))
        m2 = -t4 / 2
        m1 = -(t3 + t4 * s / 2) / 2
        m0 = -(t2 + t3 * s / 2 + t4 * (3 * s * s / 8 - p / 2)) / 2
        dv = ((t4 * x + t3) * x + t2) * x + t1
        return +(dv / 2 + ((m2 * x + m1) * x + m0) * mpmath.sqrt((x - a) * (x - b)))


def scaled_tail(curve, x, dps=60):
    """``x^2 (W0(x) - t0/x)``, which stays bounded when the tail is O(1/x^2)."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        return float((mp_w0(curve, x, dps) - curve.potential.t0 / x) * x * x)
