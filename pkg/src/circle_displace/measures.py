"""Displacement distributions for the irrational (uniquely ergodic) case.

A transitive map with irrational rotation number is conjugate to the rigid
rotation; its unique invariant measure has CDF equal to the conjugacy lift,
and the long-run distribution of displacements is the Lebesgue pushforward
under Omega(x) = Gamma^{-1}(x + rho) - Gamma^{-1}(x). This module makes all
of that computable: the concentration interval of displacement values, the
empirical conjugacy from an orbit, the pushforward and sampled distributions
with an exact Fortet-Mourier (Wasserstein-1) metric between them, the
explicit density for C^1 data, Birkhoff frequencies, and a perturbation
stability check.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ClassificationError, SingularMeasureError
from .maps import Lift
from .orbits import (displacement_sequence, iterate, rotation_number,
                     rotation_number_weighted)
from .util import golden_refine

COALESCE_TOL = 1e-12


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Probability measure with finitely many atoms on [0, 1), sorted."""

    atoms: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_samples(cls, values):
        values = np.sort(np.asarray(values, dtype=float))
        weights = np.full(len(values), 1.0 / len(values))
        return cls._coalesce(values, weights)

    @classmethod
    def from_atoms(cls, atoms, weights):
        atoms = np.asarray(atoms, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if np.any(weights < 0.0):
            raise ValueError("negative weights")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {weights.sum()!r}, not 1")
        order = np.argsort(atoms)
        return cls._coalesce(atoms[order], weights[order])

    @classmethod
    def _coalesce(cls, atoms, weights):
        if len(atoms) == 0:
            raise ValueError("empty measure")
        # group atoms closer than the coalescing tolerance; the group atom is
        # its weighted mean, written base + offset so bit-identical samples
        # coalesce to exactly their common value
        starts = np.concatenate([[True], np.diff(atoms) > COALESCE_TOL])
        group = np.cumsum(starts) - 1
        n_groups = group[-1] + 1
        base = atoms[starts]
        w = np.zeros(n_groups)
        np.add.at(w, group, weights)
        off = np.zeros(n_groups)
        np.add.at(off, group, (atoms - base[group]) * weights)
        safe = np.where(w > 0.0, w, 1.0)
        a = base + off / safe
        w = np.where(w > 0.0, w, 0.0)
        return cls(atoms=a, weights=w / w.sum())

    def cdf(self, t):
        """Right-continuous CDF evaluated at t (scalar or array)."""
        idx = np.searchsorted(self.atoms, np.asarray(t, dtype=float), side="right")
        cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        out = cum[idx]
        return out if out.ndim else float(out)

    @property
    def support(self):
        return float(self.atoms[0]), float(self.atoms[-1])

    def mean(self):
        return float(self.atoms @ self.weights)


def distribution_mean(measure):
    """First moment of an EmpiricalMeasure; equals the rotation number for
    displacement distributions of irrational maps."""
    if abs(measure.weights.sum() - 1.0) > 1e-9:
        raise ValueError("unnormalized measure")
    return measure.mean()


def fortet_mourier(mu, nu):
    """Fortet-Mourier (Wasserstein-1) distance between atom measures on [0, 1]:
    the L1 distance between the CDFs, which is the exact 1-Lipschitz dual on
    an interval.

    The merged-breakpoint evaluation is symmetric in the arguments to the
    bit, so the metric axioms hold exactly.
    """
    for m in (mu, nu):
        if abs(m.weights.sum() - 1.0) > 1e-9:
            raise ValueError("unnormalized measure")
        if m.atoms[0] < -1e-12 or m.atoms[-1] > 1.0 + 1e-12:
            raise ValueError("atoms outside [0, 1]")
    ts = np.unique(np.concatenate([mu.atoms, nu.atoms]))
    if len(ts) == 1:
        return 0.0
    fa = mu.cdf(ts[:-1])
    fb = nu.cdf(ts[:-1])
    return float(np.sum(np.abs(fa - fb) * np.diff(ts)))


# -- concentration interval ---------------------------------------------------


def concentration_interval(lift, grid=2 ** 16):
    """[min Psi mod 1, max Psi mod 1] over the circle, grid scan plus
    golden-section refinement of both extrema.

    For a transitive irrational map this is the closure of the displacement
    values of every orbit; a rigid rotation collapses it to one point.
    """
    xs = np.linspace(0.0, 1.0, grid + 1)
    psi = (lift(xs) - xs) % 1.0

    def psi_at(x):
        return (lift.eval_scalar(x % 1.0) - (x % 1.0)) % 1.0

    jump = np.abs(np.diff(psi)) > 0.5  # wrap of the mod: skip refinement there
    i_min = int(np.argmin(psi))
    i_max = int(np.argmax(psi))
    lo = psi[i_min]
    if 0 < i_min < grid and not (jump[i_min - 1] or jump[i_min]):
        _, lo = golden_refine(psi_at, xs[i_min - 1], xs[i_min + 1], minimize=True)
    hi = psi[i_max]
    if 0 < i_max < grid and not (jump[i_max - 1] or jump[i_max]):
        _, hi = golden_refine(psi_at, xs[i_max - 1], xs[i_max + 1], minimize=False)
    return float(lo), float(hi)


# -- conjugacy estimation -----------------------------------------------------


@dataclass(frozen=True)
class ConjugacyEstimate:
    """Empirical CDF of orbit fractional parts: the invariant measure's CDF,
    hence an estimate of the conjugacy lift on [0, 1]."""

    grid: np.ndarray
    gamma_hat: np.ndarray
    n_samples: int

    def __call__(self, x):
        val = np.interp(np.asarray(x, dtype=float), self.grid, self.gamma_hat)
        return val if val.ndim else float(val)

    def inverse(self, u):
        """Generalized inverse, degree-one in the winding."""
        u = np.asarray(u, dtype=float)
        m = np.floor(u)
        r = np.interp(u - m, self.gamma_hat, self.grid)
        val = m + r
        return val if val.ndim else float(val)


def _require_irrational(lift, x0, n):
    est = rotation_number(lift, x0, min(n, 10 ** 5))
    if est.classification == "rational":
        raise ClassificationError(
            f"rotation number ~ {est.rational_approx} is rational: no unique "
            "non-atomic invariant measure")
    return est


def empirical_conjugacy(lift, x0, n, grid_size=512):
    """Estimate the conjugacy lift from n orbit points.

    Unique ergodicity makes the estimate seed-independent in the limit;
    endpoints are pinned to Gamma(0)=0, Gamma(1)=1 exactly.
    """
    if n < 10 ** 4:
        raise ValueError("n must be >= 1e4 for a usable estimate")
    _require_irrational(lift, x0, n)
    fracs = np.sort(iterate(lift, x0, n - 1).fracs)
    grid = np.linspace(0.0, 1.0, grid_size + 1)
    gamma_hat = np.searchsorted(fracs, grid, side="right") / n
    gamma_hat[0] = 0.0
    gamma_hat[-1] = 1.0
    return ConjugacyEstimate(grid=grid, gamma_hat=gamma_hat, n_samples=n)


# -- displacement distributions ----------------------------------------------


def _exact_rho(lift):
    return lift.meta.get("rho") if lift.family in ("conjugated", "rotation") else None


def _resolve_rho(lift, x0, n_est):
    """Rotation number used inside Omega: exact metadata when present, else
    the refined estimator; with both, they must agree to 1e-6 or we refuse
    (the pushforward formula is exact only at the true rho)."""
    exact = _exact_rho(lift)
    if exact is not None:
        est = rotation_number_weighted(lift, 0.2, n_est, force_generic=True)
        if abs(est - exact) > 1e-6:
            raise ClassificationError(
                f"estimated rotation number {est} disagrees with exact metadata "
                f"{exact} beyond 1e-6")
        return exact
    return rotation_number_weighted(lift, 0.2, n_est)


def displacement_pushforward(lift, conj, grid=2 ** 16, n_est=2 * 10 ** 4):
    """The displacement distribution as the Lebesgue pushforward under
    Omega(x) = Gamma^{-1}(x + rho) - Gamma^{-1}(x), realized on a uniform
    midpoint grid with uniform weights.

    ``conj`` is the exact conjugacy lift (a Lift, e.g. from the conjugated
    family metadata) or a ConjugacyEstimate.
    """
    rho = _resolve_rho(lift, 0.2, n_est)
    u = (np.arange(grid) + 0.5) / grid
    if isinstance(conj, Lift):
        atoms = conj.inverse(u + rho) - conj.inverse(u)
    else:
        atoms = conj.inverse(u + rho) - conj.inverse(u)
    atoms = np.clip(atoms, 0.0, np.nextafter(1.0, 0.0)) % 1.0
    return EmpiricalMeasure.from_samples(atoms)


def sample_displacement_distribution(lift, x0, n):
    """Equal-weight atoms at the first n displacement values of the orbit."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return EmpiricalMeasure.from_samples(displacement_sequence(lift, x0, n).values)


def birkhoff_frequency(lift, x0, n, intervals):
    """Fraction of the first n displacement values landing in a finite union
    of intervals [(lo, hi), ...]; converges to the distribution's mass,
    uniformly in the seed, for irrational maps."""
    if n < 1:
        raise ValueError("n must be >= 1")
    values = displacement_sequence(lift, x0, n).values
    if np.ndim(intervals[0]) == 0:
        intervals = [intervals]
    mask = np.zeros(len(values), dtype=bool)
    for lo, hi in intervals:
        mask |= (values >= lo) & (values <= hi)
    return float(np.mean(mask))


def stability_check(lift, lift_perturbed, n, x0=0.2, grid=4096):
    """(d_F between the two long-run sampled displacement distributions,
    sup-norm distance between the lifts on [0, 1]).

    Weak stability of the displacement distribution under C^0 perturbation
    shows up as the first component shrinking with the second.
    """
    xs = np.linspace(0.0, 1.0, grid + 1)
    sup_delta = float(np.max(np.abs(lift(xs) - lift_perturbed(xs))))
    mu = sample_displacement_distribution(lift, x0, n)
    nu = sample_displacement_distribution(lift_perturbed, x0, n)
    return fortet_mourier(mu, nu), sup_delta


# -- explicit density ---------------------------------------------------------


@dataclass(frozen=True)
class DensityProfile:
    """Grid samples of the displacement density on its support."""

    grid: np.ndarray
    density: np.ndarray
    support: tuple
    excluded: tuple  # critical values of Psi (density undefined there)

    def quadrature(self):
        """Trapezoidal integral over the stored grid; ~1 within 2e-3."""
        return float(np.trapezoid(self.density, self.grid))


def _critical_points(lift, grid=2 ** 14):
    """Roots of Phi' - 1 on [0, 1) (critical points of the displacement
    function), located by sign change plus bisection."""
    xs = np.linspace(0.0, 1.0, grid + 1)
    d = lift.deriv(xs) - 1.0
    if np.mean(np.abs(d) < 1e-9) > 0.5:
        raise SingularMeasureError(
            "Phi' == 1 on a positive-measure set: displacement distribution is "
            "singular (rigid rotation), no density exists")
    roots = list(xs[:-1][np.abs(d[:-1]) <= 1e-13])
    crossings = np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0.0)[0]
    for i in crossings:
        lo, hi = xs[i], xs[i + 1]
        dlo = d[i]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            dm = float(lift.deriv(np.asarray([mid]))[0]) - 1.0
            if (dm < 0.0) == (dlo < 0.0):
                lo, dlo = mid, dm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    pts = np.sort(np.asarray(roots) % 1.0)
    if len(pts) > 1:
        pts = pts[np.concatenate([[True], np.diff(pts) > 1e-9])]
    return pts


def _psi_mod(lift, x):
    x = np.asarray(x, dtype=float) % 1.0
    return (lift(x) - x) % 1.0


def displacement_density(lift, gamma_lift, ys, crit=None):
    """Pointwise density sum over the finitely many preimages of each y:
    Delta(y) = sum_{x in Psi^{-1}(y)} Gamma'(x) / |Phi'(x) - 1|.

    [0, 1) is split into monotone pieces of Psi at the critical points and
    each piece is solved by bisection, vectorized over the y grid. Values
    of y outside the support get density 0.
    """
    if not lift.has_analytic_deriv:
        warnings.warn("density on finite-difference Phi'; supply an analytic "
                      "derivative for full accuracy", stacklevel=2)
    if not (isinstance(gamma_lift, Lift) and gamma_lift.has_analytic_deriv):
        raise ValueError("gamma_lift must be a Lift with an analytic derivative")
    ys = np.asarray(ys, dtype=float)
    if crit is None:
        crit = _critical_points(lift)
    if len(crit) == 0:
        raise SingularMeasureError("no critical points found; Psi is monotone on the "
                                   "circle, which contradicts periodicity")
    total = np.zeros_like(ys)
    pieces = [(crit[i], crit[i + 1] if i + 1 < len(crit) else crit[0] + 1.0)
              for i in range(len(crit))]
    for lo, hi in pieces:
        vlo = float(_psi_mod(lift, np.asarray([lo]))[0])
        vhi = float(_psi_mod(lift, np.asarray([hi]))[0])
        increasing = vhi > vlo
        a, b = (vlo, vhi) if increasing else (vhi, vlo)
        mask = (ys >= a) & (ys <= b)
        if not mask.any():
            continue
        yt = ys[mask]
        left = np.full(yt.shape, lo)
        right = np.full(yt.shape, hi)
        for _ in range(70):
            mid = 0.5 * (left + right)
            below = (_psi_mod(lift, mid) < yt) == increasing
            left = np.where(below, mid, left)
            right = np.where(below, right, mid)
        x = (0.5 * (left + right)) % 1.0
        total[mask] += gamma_lift.deriv(x) / np.abs(lift.deriv(x) - 1.0)
    return total


def density_profile(lift, gamma_lift, y_grid=None, grid_points=4097,
                    edge_margin=1e-8, exclusion=1e-6):
    """DensityProfile of the displacement distribution for C^1 data.

    The default grid clusters toward the support endpoints (cosine spacing,
    stopping edge_margin short of the integrable 1/sqrt singularities) and
    drops points within ``exclusion`` of interior critical values of Psi.
    Rigid rotations raise SingularMeasureError.
    """
    xs = np.linspace(0.0, 1.0, 2 ** 14 + 1)
    psi = _psi_mod(lift, xs)
    if float(np.max(psi) - np.min(psi)) < 1e-9:
        raise SingularMeasureError("constant displacement function: the distribution "
                                   "is a Dirac mass, no density exists")
    crit = _critical_points(lift)
    crit_values = np.sort(_psi_mod(lift, crit))
    lo, hi = concentration_interval(lift)
    if y_grid is None:
        t = np.linspace(0.0, 1.0, grid_points)
        y_grid = (lo + edge_margin) + (hi - lo - 2 * edge_margin) * 0.5 * (1.0 - np.cos(math.pi * t))
    else:
        y_grid = np.asarray(y_grid, dtype=float)
    interior = crit_values[(crit_values > lo + exclusion) & (crit_values < hi - exclusion)]
    keep = np.ones(len(y_grid), dtype=bool)
    for cv in interior:
        keep &= np.abs(y_grid - cv) > exclusion
    y_grid = y_grid[keep & (y_grid >= lo) & (y_grid <= hi)]
    dens = displacement_density(lift, gamma_lift, y_grid, crit=crit)
    return DensityProfile(grid=y_grid, density=dens, support=(lo, hi),
                          excluded=tuple(float(v) for v in crit_values))


def density_bin_masses(lift, gamma_lift, edges, gl_points=48):
    """Integrals of the density over histogram bins.

    Bins touching the support endpoints are integrated under the square-root
    substitution that removes the 1/sqrt singularity; interior bins use
    plain Gauss-Legendre.
    """
    lo, hi = concentration_interval(lift)
    crit = _critical_points(lift)
    gx, gw = np.polynomial.legendre.leggauss(gl_points)
    masses = []
    for a, b in zip(edges[:-1], edges[1:]):
        a, b = max(float(a), lo), min(float(b), hi)
        if b <= a:
            masses.append(0.0)
            continue
        if a - lo < 1e-12:
            u2 = math.sqrt(b - lo)
            u = 0.5 * u2 * (gx + 1.0)
            vals = displacement_density(lift, gamma_lift, lo + u * u, crit=crit) * 2.0 * u
            masses.append(float(0.5 * u2 * (vals @ gw)))
        elif hi - b < 1e-12:
            u2 = math.sqrt(hi - a)
            u = 0.5 * u2 * (gx + 1.0)
            vals = displacement_density(lift, gamma_lift, hi - u * u, crit=crit) * 2.0 * u
            masses.append(float(0.5 * u2 * (vals @ gw)))
        else:
            y = 0.5 * (b - a) * gx + 0.5 * (b + a)
            masses.append(float(0.5 * (b - a) * (displacement_density(lift, gamma_lift, y, crit=crit) @ gw)))
    return np.asarray(masses)
