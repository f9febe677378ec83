"""Small numeric helpers shared across the package."""

import math

import numpy as np

TWO_PI = 2.0 * math.pi
GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0


def frac(x):
    """Fractional part in [0, 1), ufunc-style."""
    return x - np.floor(x)


def circle_dist(a, b):
    """Distance on the circle of circumference 1: min(|a-b|, 1-|a-b|)."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def circular_span(values):
    """Length of the shortest arc containing all values (mod 1).

    Equals the circle diameter of the set whenever it fits in a half circle.
    """
    v = np.sort(np.asarray(values, dtype=float) % 1.0)
    if v.size <= 1:
        return 0.0
    gaps = np.diff(v)
    wrap_gap = 1.0 - (v[-1] - v[0])
    return 1.0 - max(float(gaps.max()), wrap_gap)


def bisect_vec(f, lo, hi, target, increasing=True, iters=60):
    """Vectorized bisection: solve f(x) = target on brackets [lo, hi].

    f must be monotone on each bracket with the given direction and accept
    ndarray input. 60 halvings take a unit bracket below 1e-18.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    target = np.asarray(target, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = (f(mid) < target) == increasing
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def bisect_scalar(f, lo, hi, target=0.0, iters=200, xtol=1e-15):
    """Scalar bisection for f(x) = target given a sign-change bracket."""
    flo = f(lo) - target
    if flo == 0.0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid) - target
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo = mid
        else:
            hi = mid
        if hi - lo < xtol:
            break
    return 0.5 * (lo + hi)


def golden_refine(f, lo, hi, minimize=True, iters=80):
    """Golden-section refinement of an extremum bracketed in [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    if not minimize:
        fc, fd = -fc, -fd
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c) if minimize else -f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d) if minimize else -f(d)
        if b - a < 1e-14:
            break
    x = 0.5 * (a + b)
    return x, f(x)


def convergents(x, q_max=100, max_terms=64):
    """Continued-fraction convergents p/q of x with q <= q_max.

    Returns a list of (p, q) pairs, best approximations last.
    """
    out = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = int(math.floor(x)), 1
    out.append((p_cur, q_cur))
    rem = x - math.floor(x)
    for _ in range(max_terms):
        if rem < 1e-15:
            break
        rem = 1.0 / rem
        a = int(math.floor(rem))
        rem -= a
        p_next = a * p_cur + p_prev
        q_next = a * q_cur + q_prev
        if q_next > q_max:
            break
        out.append((p_next, q_next))
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
    return out


def best_convergent(x, q_max=100):
    """The convergent of x with the smallest denominator achieving the best
    accuracy among q <= q_max (i.e. the last convergent in range)."""
    return convergents(x, q_max=q_max)[-1]


class ScalarPPoly:
    """Piecewise cubic with a fast pure-scalar __call__.

    scipy's PPoly evaluation carries array overhead that dominates per-step
    orbit iteration; this flattens the coefficients once and uses Horner.
    """

    def __init__(self, pchip):
        self.breaks = pchip.x
        self.coefs = pchip.c  # shape (4, ncells)
        self._b = self.breaks.tolist()
        self._c = self.coefs.T.tolist()  # ncells rows of [c3, c2, c1, c0]
        self._n = len(self._b) - 1

    def __call__(self, r):
        b = self._b
        # binary search for the cell containing r
        lo, hi = 0, self._n
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if b[mid] <= r:
                lo = mid
            else:
                hi = mid
        t = r - b[lo]
        c3, c2, c1, c0 = self._c[lo]
        return ((c3 * t + c2) * t + c1) * t + c0
