"""Semi-periodic machinery: periodic orbits, approach-time functions, basin
shreds, and the universal iteration bound.

For a map with rotation number p/q every non-periodic point is squeezed
between two consecutive periodic points, forward-asymptotic to one endpoint
orbit and backward-asymptotic to the other. tau_plus(m, z) measures the
worst distance, over one period block, of the (mq+i)-th forward iterate from
the attracting endpoint orbit; tau_minus the backward analog toward the
repelling orbit. The shred point balances the two at the smallest level m
where an eps-sublevel set of each overlaps, and the maximum such m over all
gaps is a single iteration budget N valid for every point of the circle.

Distances here live in lifted-interval coordinates: the point and the
periodic endpoint are iterated together in the lift and their real
difference is taken. That agrees with circle distance whenever the gap
between consecutive periodic points is at most a half circle and stays
strictly monotone (as required for the bisections) even when it is not,
e.g. for maps with a single fixed point.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ClassificationError, ConvergenceError, VerificationError
from .orbits import DisplacementSeries, rotation_number
from .util import circular_span, golden_refine

BOUNDARY_TOL = 1e-13
ROOT_TOL = 1e-12


@dataclass(frozen=True)
class IntervalInfo:
    """Open interval between consecutive periodic points, in lifted reals
    (lo < hi <= lo + 1; hi may exceed 1 when the interval wraps 0)."""

    lo: float
    hi: float
    attracting: str  # "lo" | "hi": the forward-attracting endpoint under Phi^q

    @property
    def attractor(self):
        return self.lo if self.attracting == "lo" else self.hi

    @property
    def repeller(self):
        return self.hi if self.attracting == "lo" else self.lo

    def clamp(self, z):
        """Lift z (mod 1) into [lo, hi]; error when it lies outside.

        Values already given in lifted coordinates pass through unchanged:
        on a wrap interval the endpoints differ by a full turn and must not
        be collapsed by the mod.
        """
        if self.lo - 1e-9 <= z <= self.hi + 1e-9:
            return min(max(z, self.lo), self.hi)
        zl = z % 1.0
        if zl < self.lo - 1e-12:
            zl += 1.0
        if not (self.lo - 1e-9 <= zl <= self.hi + 1e-9):
            raise ValueError(f"z={z} outside interval ({self.lo}, {self.hi})")
        return min(max(zl, self.lo), self.hi)


@dataclass(frozen=True)
class PeriodicStructure:
    q: int
    p: int
    points: np.ndarray            # sorted periodic points in [0, 1)
    intervals: tuple              # IntervalInfo per gap (last one wraps)
    degenerate: bool = False      # Phi^q == id + p: conjugate to a rotation

    def stability(self, i):
        """(left, right) side-stability of points[i], each 'attracting' or
        'repelling' as seen from inside the adjacent interval."""
        r = len(self.points)
        left = self.intervals[(i - 1) % r]
        right = self.intervals[i]
        return ("attracting" if left.attracting == "hi" else "repelling",
                "attracting" if right.attracting == "lo" else "repelling")


@dataclass(frozen=True)
class ShredResult:
    interval: IntervalInfo
    eps: float
    m_tilde: int
    a: float                      # overlap interval, lifted reals, a <= b
    b: float
    shred: float
    basin_plus: tuple             # forward-fast sub-basin (lifted reals)
    basin_minus: tuple            # backward-fast sub-basin
    tau_plus_at_shred: float
    tau_minus_at_shred: float
    plateau: bool = False


# -- periodic points ----------------------------------------------------------


def _compose_q(lift, x, q):
    y = np.asarray(x, dtype=float).copy()
    for _ in range(q):
        y = lift(y)
    return y


def find_periodic_points(lift, q, p, grid=2 ** 14):
    """Locate all periodic points of period q / winding p on [0, 1).

    Scans g(x) = Phi^q(x) - x - p on a grid, bisects sign changes to 1e-12,
    and golden-refines near-tangencies so one-sided (parabolic) points are
    kept. Raises ClassificationError when nothing is found (the map cannot
    have rotation number p/q then).
    """
    xs = np.linspace(0.0, 1.0, grid + 1)
    g = _compose_q(lift, xs, q) - xs - p
    if np.max(np.abs(g)) <= 1e-10:
        return PeriodicStructure(q=q, p=p, points=np.empty(0), intervals=(),
                                 degenerate=True)

    roots = list(xs[np.abs(g) <= 1e-13])
    sign = np.sign(g)
    crossings = np.nonzero((sign[:-1] * sign[1:] < 0.0))[0]
    if len(crossings):
        lo = xs[crossings].copy()
        hi = xs[crossings + 1].copy()
        glo = g[crossings]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            gm = _compose_q(lift, mid, q) - mid - p
            same = (gm < 0.0) == (glo < 0.0)
            lo = np.where(same, mid, lo)
            glo = np.where(same, gm, glo)
            hi = np.where(same, hi, mid)
        roots.extend(0.5 * (lo + hi))

    # tangencies: local minima of |g| well below grid scale but no crossing
    absg = np.abs(g)
    candidates = np.nonzero((absg < 1e-5)
                            & (absg <= np.roll(absg, 1))
                            & (absg <= np.roll(absg, -1)))[0]
    for i in candidates:
        if i == 0 or i == grid:
            continue

        def local_abs(x):
            y = x
            for _ in range(q):
                y = lift.eval_scalar(y)
            return abs(y - x - p)

        x_ref, g_ref = golden_refine(local_abs, xs[i - 1], xs[i + 1], minimize=True)
        if g_ref < 1e-10:
            roots.append(x_ref)

    pts = np.sort(np.asarray(roots, dtype=float) % 1.0)
    if len(pts):
        keep = np.concatenate([[True], np.diff(pts) > 1e-9])
        pts = pts[keep]
        if len(pts) > 1 and (pts[0] + 1.0) - pts[-1] <= 1e-9:
            pts = pts[:-1]
    if len(pts) == 0:
        raise ClassificationError(
            f"no periodic points for (p, q)=({p}, {q}); rational classification is wrong")

    intervals = []
    r = len(pts)
    for i in range(r):
        lo = pts[i]
        hi = pts[i + 1] if i + 1 < r else pts[0] + 1.0
        mids = lo + (hi - lo) * np.array([0.2, 0.5, 0.8])
        gm = _compose_q(lift, mids, q) - mids - p
        j = int(np.argmax(np.abs(gm)))
        if not np.all(np.sign(gm) == np.sign(gm[j])):
            warnings.warn("periodic-point gap with mixed sign of Phi^q - id - p; "
                          "possible sub-grid periodic points", stacklevel=2)
        intervals.append(IntervalInfo(lo=float(lo), hi=float(hi),
                                      attracting="hi" if gm[j] > 0 else "lo"))
    return PeriodicStructure(q=q, p=p, points=pts, intervals=tuple(intervals))


# -- tau functions ------------------------------------------------------------


def _pair_forward(lift, z, e, steps):
    step = lift.eval_scalar
    for _ in range(steps):
        z = step(z)
        e = step(e)
    return z, e


def _pair_backward(lift, z, e, steps):
    inv = lift.inverse_scalar
    for _ in range(steps):
        z = inv(z)
        e = inv(e)
    return z, e


def tau_plus(lift, structure, interval, m, z):
    """Worst distance of the (mq+i)-th forward iterates of z from the
    attracting endpoint orbit, over one period block i = 0..q-1."""
    q = structure.q
    z = interval.clamp(z)
    e = interval.attractor
    z, e = _pair_forward(lift, z, e, m * q)
    worst = abs(z - e)
    for _ in range(q - 1):
        z, e = _pair_forward(lift, z, e, 1)
        worst = max(worst, abs(z - e))
    return worst


def tau_minus(lift, structure, interval, m, z):
    """Backward analog of tau_plus, toward the repelling endpoint orbit."""
    q = structure.q
    z = interval.clamp(z)
    e = interval.repeller
    z, e = _pair_backward(lift, z, e, m * q)
    worst = abs(z - e)
    for _ in range(q - 1):
        z, e = _pair_backward(lift, z, e, 1)
        worst = max(worst, abs(z - e))
    return worst


def _endpoint_gap(lift, structure, interval):
    """max_i |Phi^i(hi) - Phi^i(lo)|: the largest image of the gap."""
    lo, hi = interval.lo, interval.hi
    worst = hi - lo
    for _ in range(structure.q - 1):
        lo, hi = lift.eval_scalar(lo), lift.eval_scalar(hi)
        worst = max(worst, hi - lo)
    return worst


def _sublevel_boundary(tau_fn, zero_end, full_end, eps):
    """Boundary of {tau < eps} on the segment [zero_end, full_end], where tau
    runs monotonically from 0 to its maximum."""
    if tau_fn(full_end) < eps:
        return full_end
    near, far = zero_end, full_end
    for _ in range(120):
        mid = 0.5 * (near + far)
        if tau_fn(mid) < eps:
            near = mid
        else:
            far = mid
        if abs(far - near) < BOUNDARY_TOL:
            break
    return 0.5 * (near + far)


def u_plus_boundary(lift, structure, interval, m, eps):
    """Endpoint a_m of U_m^+(eps) = {z : tau_plus < eps} (adjacent to the
    attracting endpoint)."""
    return _sublevel_boundary(lambda z: tau_plus(lift, structure, interval, m, z),
                              interval.attractor, interval.repeller, eps)


def u_minus_boundary(lift, structure, interval, m, eps):
    """Endpoint b_m of U_m^-(eps) (adjacent to the repelling endpoint)."""
    return _sublevel_boundary(lambda z: tau_minus(lift, structure, interval, m, z),
                              interval.repeller, interval.attractor, eps)


def find_m_tilde(lift, structure, interval, eps, m_cap=10 ** 6):
    """Smallest m with U_m^+(eps) and U_m^-(eps) overlapping, plus the
    overlap interval (a, b) in lifted reals.

    eps >= max gap returns (0, lo, hi) without iterating. Raises
    ConvergenceError past m_cap (near-parabolic points approach their
    endpoints polynomially slowly).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if eps >= _endpoint_gap(lift, structure, interval):
        return 0, interval.lo, interval.hi
    for m in range(m_cap + 1):
        bp = u_plus_boundary(lift, structure, interval, m, eps)
        bm = u_minus_boundary(lift, structure, interval, m, eps)
        if abs(bp - bm) > BOUNDARY_TOL:
            mid = 0.5 * (bp + bm)
            if (tau_plus(lift, structure, interval, m, mid) < eps
                    and tau_minus(lift, structure, interval, m, mid) < eps):
                return m, min(bp, bm), max(bp, bm)
    raise ConvergenceError(f"no overlap up to m={m_cap}; near-parabolic periodic point?")


def compute_shred(lift, structure, interval, eps, m_cap=10 ** 6):
    """The eps-basins-shred of the interval: the unique point where forward
    and backward approach times balance at level m-tilde.

    Splits the interval into the forward-fast sub-basin (on the attracting
    side) and the backward-fast one. A flat plateau of the difference
    tau_plus - tau_minus (possible in finite precision only) is reported by
    its midpoint and flagged.
    """
    m, a, b = find_m_tilde(lift, structure, interval, eps, m_cap=m_cap)

    def h(z):
        return (tau_plus(lift, structure, interval, m, z)
                - tau_minus(lift, structure, interval, m, z))

    ha, hb = h(a), h(b)
    if ha == 0.0 and hb == 0.0:
        shred, plateau = 0.5 * (a + b), True
    else:
        lo, hi = a, b
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            hm = h(mid)
            if hm == 0.0:
                lo = hi = mid
                break
            if (hm < 0.0) == (ha < 0.0):
                lo = mid
            else:
                hi = mid
            if hi - lo < BOUNDARY_TOL:
                break
        shred = 0.5 * (lo + hi)
        plateau = abs(h(shred - 1e-9)) < 1e-13 and abs(h(shred + 1e-9)) < 1e-13
    if interval.attracting == "hi":
        basin_plus = (shred, interval.hi)
        basin_minus = (interval.lo, shred)
    else:
        basin_plus = (interval.lo, shred)
        basin_minus = (shred, interval.hi)
    return ShredResult(interval=interval, eps=eps, m_tilde=m, a=a, b=b,
                       shred=shred, basin_plus=basin_plus, basin_minus=basin_minus,
                       tau_plus_at_shred=tau_plus(lift, structure, interval, m, shred),
                       tau_minus_at_shred=tau_minus(lift, structure, interval, m, shred),
                       plateau=plateau)


# -- the universal bound ------------------------------------------------------


def _classify_for(lift, x0, n):
    est = rotation_number(lift, x0, n)
    if est.classification != "rational":
        raise ClassificationError(
            f"rotation number {est.value} classified irrational; no periodic machinery")
    return est.rational_approx


def universal_N(lift, eps, structure=None, x0=0.17, n=10 ** 5,
                grid=2 ** 14, m_cap=10 ** 6):
    """Iteration budget N: every circle point is within eps of a periodic
    orbit after N*q forward or N*q backward iterations.

    N is the maximum m-tilde over the gaps between consecutive periodic
    points; the conjugate-to-rotation case returns 0 (every point periodic),
    and a grid-dense periodic set falls back to the trivially satisfied
    branch with a warning.
    """
    if structure is None:
        p, q = _classify_for(lift, x0, n)
        structure = find_periodic_points(lift, q, p, grid=grid)
    if structure.degenerate:
        return 0
    if len(structure.points) > grid // 8:
        warnings.warn("periodic points at grid density; treating as the dense case "
                      "(every gap below resolution), N = 0", stacklevel=2)
        return 0
    return max(find_m_tilde(lift, structure, iv, eps, m_cap=m_cap)[0]
               for iv in structure.intervals)


def shred_table(lift, eps_values, structure=None, x0=0.17, n=10 ** 5, m_cap=10 ** 6):
    """ShredResult rows for every (eps, interval) pair; CLI/plot feed."""
    if structure is None:
        p, q = _classify_for(lift, x0, n)
        structure = find_periodic_points(lift, q, p)
    if structure.degenerate:
        raise ClassificationError("conjugate to a rotation: no shreds, every point periodic")
    return [compute_shred(lift, structure, iv, eps, m_cap=m_cap)
            for eps in eps_values for iv in structure.intervals]


def tau_grid(lift, structure, interval, m, npts=512):
    """(z, tau_plus, tau_minus) sampled across the interval at level m."""
    zs = np.linspace(interval.lo, interval.hi, npts)
    tp = np.array([tau_plus(lift, structure, interval, m, z) for z in zs])
    tm = np.array([tau_minus(lift, structure, interval, m, z) for z in zs])
    return zs, tp, tm


# -- verification -------------------------------------------------------------


def verify_asymptotic_periodicity(series, q, eps, burn_in):
    """True iff circle_dist(eta_{n+kq}, eta_n) < eps for all n > burn_in and
    all admissible k: each residue class of the tail fits in an eps-arc."""
    values = np.asarray(series.values if isinstance(series, DisplacementSeries) else series,
                        dtype=float)
    if len(values) < burn_in + 10 * q:
        raise ValueError(f"series too short: need >= {burn_in + 10 * q}, got {len(values)}")
    tail = values[burn_in:]
    return all(circular_span(tail[r::q]) < eps for r in range(q))


def _locate_interval(structure, x0):
    pts = structure.points
    x = x0 % 1.0
    idx = int(np.searchsorted(pts, x, side="right")) - 1
    return structure.intervals[idx % len(pts)]


def verify_forward_backward(lift, x0, eps, N, q, p=None, structure=None,
                            extra_blocks=8):
    """Which of the two orbit conditions holds at x0 for the budget N: the
    forward orbit eps-close to the attracting endpoint orbit from block N on,
    the backward orbit eps-close to the repelling one, or both.

    Block distances contract monotonically inside the gap, so checking a few
    blocks from N certifies the tail. Points in the forward-fast sub-basin
    report forward, backward-fast ones backward, overlap points both; a point
    satisfying neither can only mean an implementation bug.
    """
    if structure is None:
        if p is None:
            p, q = _classify_for(lift, x0, 10 ** 5)
        structure = find_periodic_points(lift, q, p)
    if structure.degenerate:
        return "both"
    x = x0 % 1.0
    d = np.abs(structure.points - x)
    if min(np.min(d), np.min(np.abs(1.0 - d))) < 1e-12:
        return "both"
    iv = _locate_interval(structure, x0)
    z = iv.clamp(x0)

    def blocks_ok(pair_step, endpoint):
        zz, ee = pair_step(lift, z, endpoint, N * q)
        for _ in range(extra_blocks):
            worst = abs(zz - ee)
            for _ in range(q - 1):
                zz, ee = pair_step(lift, zz, ee, 1)
                worst = max(worst, abs(zz - ee))
            if worst >= eps:
                return False
            zz, ee = pair_step(lift, zz, ee, 1)
        return True

    fwd = blocks_ok(_pair_forward, iv.attractor)
    bwd = blocks_ok(_pair_backward, iv.repeller)
    if fwd and bwd:
        return "both"
    if fwd:
        return "forward"
    if bwd:
        return "backward"
    raise VerificationError(
        f"neither forward nor backward condition holds at x0={x0} with N={N}")
