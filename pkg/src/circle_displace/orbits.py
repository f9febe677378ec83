"""Orbit iteration, displacement sequences, and rotation-number estimation.

Orbits are stored as (fractional part, integer winding) pairs so positions
stay exact to the last bit of the fractional part no matter how long the
run. The displacement sequence eta_n = Phi^n(x) - Phi^{n-1}(x) mod 1 is the
arc length of each orbit step; its mean telescopes to the rotation-number
estimator, which is classified rational/irrational by continued-fraction
snapping backed by a periodic-point existence check.
"""

import math
from dataclasses import dataclass

import numpy as np

from .maps import Lift
from .util import best_convergent, circle_dist, circular_span, frac


@dataclass(frozen=True)
class Orbit:
    """Forward or backward orbit as parallel frac/winding arrays."""

    x0: float
    fracs: np.ndarray    # float64 in [0, 1)
    windings: np.ndarray  # int64, exact
    direction: str        # "forward" | "backward"

    def __len__(self):
        return len(self.fracs)

    def points(self):
        """Real lift coordinates Phi^k(x0) (Phi^{-k} for backward orbits)."""
        return self.fracs + self.windings.astype(float)


@dataclass(frozen=True)
class DisplacementSeries:
    """Successive orbit steps mod 1, plus the true (unwrapped) step lengths.

    Forward: values[k-1] = eta_k for k = 1..n. Backward: values[k] is the
    step from Phi^{-(k+1)}(x0) to Phi^{-k}(x0), k = 0..n-1.
    """

    values: np.ndarray
    true_steps: np.ndarray
    x0: float
    direction: str
    map: Lift

    def __len__(self):
        return len(self.values)

    @property
    def seed(self):
        return self.x0 % 1.0


@dataclass(frozen=True)
class RotationEstimate:
    value: float
    n_used: int
    rational_approx: tuple  # (p, q) best convergent with q <= q_max
    classification: str     # "rational" | "irrational_like"
    residual: float


def _split(x):
    w = math.floor(x)
    return x - w, int(w)


def _iterate_generic(lift, x0, n, direction):
    fracs = np.empty(n + 1)
    winds = np.empty(n + 1, dtype=np.int64)
    f, w = _split(x0)
    fracs[0], winds[0] = f, w
    if direction == "forward":
        step = lift.scalar
        for i in range(1, n + 1):
            y = step(f)  # in [c, c+1) subset [0, 2)
            k = math.floor(y)
            f = y - k
            w += k
            fracs[i], winds[i] = f, w
    else:
        c = lift.phi0
        inv = lift.inverse_scalar
        for i in range(1, n + 1):
            y = inv(f)   # in (-1, 1)
            k = math.floor(y)
            f = y - k
            w += k
            fracs[i], winds[i] = f, w
    return fracs, winds


def _iterate_conjugated(lift, x0, n, direction):
    """Closed-form orbit x_k = Gamma^{-1}(Gamma(x0) + k*rho).

    The winding of Gamma(x0) + k*rho is reduced in 80-bit floats so the
    orbit consistency invariant survives million-step runs.
    """
    g = lift.meta["conjugacy"]
    rho = lift.meta["rho"]
    if direction == "backward":
        rho = -rho
    u0 = float(g(np.asarray([x0], dtype=float))[0])
    ks = np.arange(n + 1, dtype=np.longdouble)
    u = np.longdouble(u0) + ks * np.longdouble(rho)
    cg = g.phi0
    m = np.floor(u - np.longdouble(cg))
    t = np.asarray(u - m, dtype=float)          # in [cg, cg+1)
    winds = np.asarray(m, dtype=np.int64)
    # invert the base of Gamma on [0, 1]
    lo = np.zeros_like(t)
    hi = np.ones_like(t)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = g.base(mid) < t
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    fracs = 0.5 * (lo + hi)
    # land exactly in [0, 1)
    spill = fracs >= 1.0
    fracs[spill] -= 1.0
    winds[spill] += 1
    return fracs, winds


def _iterate_rotation(lift, x0, n, direction):
    rho = lift.meta["rho"]
    if direction == "backward":
        rho = -rho
    ks = np.arange(n + 1, dtype=np.longdouble)
    x = np.longdouble(x0) + ks * np.longdouble(rho)
    w = np.floor(x)
    fracs = np.asarray(x - w, dtype=float)
    winds = np.asarray(w, dtype=np.int64)
    spill = fracs >= 1.0  # extended-precision frac can round up to 1.0
    fracs[spill] -= 1.0
    winds[spill] += 1
    return fracs, winds


def iterate(lift, x0, n, direction="forward", force_generic=False):
    """Orbit of x0 under the lift: n steps forward or backward.

    Rotations and conjugated maps use their closed-form orbits unless
    force_generic is set (used by consistency checks that must not trust the
    closed-form metadata they are checking).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction {direction!r}")
    if force_generic:
        fracs, winds = _iterate_generic(lift, x0, n, direction)
    elif lift.family == "rotation":
        fracs, winds = _iterate_rotation(lift, x0, n, direction)
    elif lift.family == "conjugated" and "conjugacy" in lift.meta:
        fracs, winds = _iterate_conjugated(lift, x0, n, direction)
    else:
        fracs, winds = _iterate_generic(lift, x0, n, direction)
    return Orbit(x0=float(x0), fracs=fracs, windings=winds, direction=direction)


def displacement_sequence(lift, x0, n, direction="forward"):
    """The displacement sequence along the orbit of x0 (n values).

    Values are lift-choice independent. Rigid rotations return the exact
    constant rho: the sequence is constant in exact arithmetic, and the
    closed form keeps it constant to the bit.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if lift.family == "rotation":
        rho = lift.meta["rho"]
        values = np.full(n, rho)
        return DisplacementSeries(values=values, true_steps=values.copy(),
                                  x0=float(x0), direction=direction, map=lift)
    orbit = iterate(lift, x0, n, direction)
    d_f = np.diff(orbit.fracs)
    d_w = np.diff(orbit.windings).astype(float)
    if direction == "forward":
        true_steps = d_f + d_w
    else:
        true_steps = -(d_f + d_w)  # step from Phi^{-(k+1)} up to Phi^{-k}
    values = true_steps % 1.0
    values[values == 1.0] = 0.0
    return DisplacementSeries(values=values, true_steps=true_steps,
                              x0=float(x0), direction=direction, map=lift)


# -- rotation number ---------------------------------------------------------


def _estimate_at(orbit, m):
    x0 = orbit.fracs[0] + float(orbit.windings[0])
    xm = orbit.fracs[m] + float(orbit.windings[m])
    return ((xm - x0) / m) % 1.0


def _tail_periodicity_ok(values, q, eps, burn_in):
    tail = values[burn_in:]
    if len(tail) < 2 * q:
        return True
    for r in range(q):
        if circular_span(tail[r::q]) >= eps:
            return False
    return True


def _has_periodic_points(lift, p, q, grid=4096, tol=1e-9):
    """Existence gate for rho = p/q: a sign change or a refined tangency of
    g(x) = Phi^q(x) - x - p on [0, 1]."""
    xs = np.linspace(0.0, 1.0, grid + 1)
    y = xs.copy()
    for _ in range(q):
        y = lift(y)
    g = y - xs - p
    if np.max(np.abs(g)) <= 1e-10:  # conjugate to the rigid rotation
        return True
    if np.any(np.sign(g[:-1]) * np.sign(g[1:]) <= 0.0):
        return True
    # refine the closest approach: tangency slips through a coarse grid
    i = int(np.argmin(np.abs(g)))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, grid)]
    from .util import golden_refine

    def absg(x):
        y = x
        for _ in range(q):
            y = lift.eval_scalar(y)
        return abs(y - x - p)

    _, gmin = golden_refine(absg, lo, hi, minimize=True)
    return gmin < tol


def rotation_number(lift, x0, n, q_max=100):
    """Orbit-based rotation number (Phi^n(x0) - x0)/n mod 1 with
    rational/irrational classification.

    Classification requires three pieces of evidence for "rational":
    a convergent p/q (q <= q_max) within 10/n of the estimate, an actual
    periodic point of Phi^q - p, and (when the orbit is long enough past
    burn-in) a q-periodic displacement tail at tolerance 1e-8.
    """
    if n < 100:
        raise ValueError("n must be >= 100")
    if lift.family == "rotation":
        rho = lift.meta["rho"]
        p, q = best_convergent(rho, q_max=q_max)
        rational = abs(rho - p / q) < 10.0 / n and _has_periodic_points(lift, p, q)
        return RotationEstimate(value=rho, n_used=n, rational_approx=(p, q),
                                classification="rational" if rational else "irrational_like",
                                residual=0.0)
    orbit = iterate(lift, x0, n)
    value = _estimate_at(orbit, n)
    residual = float(circle_dist(value, _estimate_at(orbit, n // 2)))
    p, q = best_convergent(value, q_max=q_max)
    rational = float(circle_dist(value, p / q % 1.0)) < 10.0 / n
    if rational:
        # the estimate mod 1 pins p only up to a full turn per period: an
        # orbit converging to a fixed point from below reads 1 - O(1/n)
        for cand in (p, p - q, p + q):
            if _has_periodic_points(lift, cand, q):
                p = cand
                break
        else:
            rational = False
    burn_in = max(1000, n // 10)
    if rational and n >= 2 * burn_in + 10 * q:
        d_f = np.diff(orbit.fracs)
        d_w = np.diff(orbit.windings).astype(float)
        values = (d_f + d_w) % 1.0
        rational = _tail_periodicity_ok(values, q, 1e-8, burn_in)
    return RotationEstimate(value=value, n_used=n, rational_approx=(p, q),
                            classification="rational" if rational else "irrational_like",
                            residual=residual)


def rotation_number_via_displacements(lift, x0, n):
    """Mean displacement (1/n) sum Psi(Phi^{k-1}(x0)) mod 1.

    Telescopes to the orbit-based estimator, so the two agree to within the
    mod-1 bookkeeping (<= 2/n).
    """
    if n < 100:
        raise ValueError("n must be >= 100")
    series = displacement_sequence(lift, x0, n)
    return float(np.sum(series.true_steps) / n) % 1.0


def rotation_number_weighted(lift, x0, n, force_generic=False):
    """Refined estimator: exponentially-weighted Birkhoff average of the
    displacement function along the orbit.

    For smooth maps with Diophantine rotation number this converges far
    faster than O(1/n); it backs the exact-vs-estimated rho agreement gate
    in the measure operations (with force_generic, so the orbit cannot lean
    on the very metadata under check).
    """
    if lift.family == "rotation" and not force_generic:
        return lift.meta["rho"]
    orbit = iterate(lift, x0, n, force_generic=force_generic)
    steps = np.diff(orbit.fracs) + np.diff(orbit.windings).astype(float)
    t = np.arange(1, n + 1, dtype=float) / (n + 1)
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return float(np.sum(w * steps) / np.sum(w)) % 1.0


# -- recurrence ---------------------------------------------------------------


def recurrence_gap_bound(series, eps, window):
    """Worst waiting time for eps-returns of eta_n, over base indices n < window.

    For each n the return set R_n = {j > n : circle_dist(eta_j, eta_n) < eps}
    is scanned; the bound is the largest run of consecutive non-returns. A
    sequence is almost strongly recurrent exactly when this stays bounded
    uniformly in n. Returns None (unbounded flag) when some base index has
    no return within len/10.
    """
    values = np.asarray(series.values if isinstance(series, DisplacementSeries) else series,
                        dtype=float)
    length = len(values)
    if length < 10 * window:
        raise ValueError(f"series too short: need >= {10 * window}, got {length}")
    cap = length // 10
    worst = 0
    for n in range(window):
        ret = np.nonzero(circle_dist(values[n + 1:], values[n]) < eps)[0]
        if len(ret) == 0:
            return None
        gap = int(ret[0])                       # wait before the first return
        if len(ret) > 1:
            gap = max(gap, int(np.max(np.diff(ret)) - 1))
        if gap > cap:
            return None
        worst = max(worst, gap)
    return worst
