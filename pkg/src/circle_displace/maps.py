"""Lifts of orientation-preserving circle homeomorphisms.

A degree-one lift satisfies Phi(x+1) = Phi(x) + 1 and represents the circle
map through the covering projection x -> exp(2*pi*i*x). Every lift here is
normalized so Phi(0) lies in [0, 1) and is evaluated through the
fractional-part decomposition Phi(x) = floor(x) + Phi({x}): the integer
winding is carried exactly, so million-step orbits do not lose mantissa
bits.

Built-in families: rigid rotations, the standard sine (Arnold) circle map,
unit-graph maps (a strictly increasing f on [0,1] with f(0)=0, f(1)=1 copied
into every integer cell), sine-perturbed identities used as conjugacies, and
conjugated maps Gamma^{-1} o (x + rho) o Gamma which retain their exact
conjugacy for oracle use.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidMapError, InverseError
from .util import TWO_PI, ScalarPPoly, bisect_scalar, frac

VALIDATION_GRID = 4096
DEGREE_ONE_TOL = 1e-12
UNIT_GRAPH_NAMES = ("x_squared", "arcsin_scaled")


@dataclass(frozen=True)
class Lift:
    """Normalized degree-one lift of a circle homeomorphism.

    ``base`` is the vectorized restriction of Phi to [0, 1] (mapping onto
    [c, c+1] with c = Phi(0) in [0, 1)); ``scalar`` is a fast pure-float
    version of the same function used by sequential orbit loops.
    """

    family: str
    params: dict
    base: Callable
    scalar: Callable
    deriv_base: Optional[Callable] = None
    inverse_base: Optional[Callable] = None  # maps [c, c+1] -> [0, 1]
    meta: dict = field(default_factory=dict)
    monotonicity_certificate: int = 0  # grid size the lift was validated on

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        k = np.floor(x)
        val = k + self.base(x - k)
        return val if val.ndim else float(val)

    def eval(self, x):
        return self(x)

    def eval_scalar(self, x):
        k = math.floor(x)
        return k + self.scalar(x - k)

    @property
    def phi0(self):
        """Phi(0) in [0, 1)."""
        return float(self.base(np.zeros(1))[0])

    @property
    def has_analytic_deriv(self):
        return self.deriv_base is not None

    def deriv(self, x):
        """Phi'(x); analytic when registered, else central differences."""
        x = np.asarray(x, dtype=float)
        if self.deriv_base is not None:
            val = self.deriv_base(frac(x))
        else:
            h = 1e-6
            val = (self(x + h) - self(x - h)) / (2.0 * h)
        return val if np.ndim(val) else float(val)

    # -- inversion ----------------------------------------------------------

    def inverse(self, y):
        """Phi^{-1}(y), vectorized. Satisfies Phi^{-1}(y+1) = Phi^{-1}(y)+1."""
        y = np.asarray(y, dtype=float)
        c = self.phi0
        m = np.floor(y - c)
        t = y - m  # in [c, c+1)
        if self.inverse_base is not None:
            r = self.inverse_base(t)
        else:
            lo = np.zeros_like(t)
            hi = np.ones_like(t)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                below = self.base(mid) < t
                lo = np.where(below, mid, lo)
                hi = np.where(below, hi, mid)
            r = 0.5 * (lo + hi)
            bad = (self.base(r) - t) ** 2 > 1e-16
            if np.any(bad):
                raise InverseError("bisection failed to bracket; corrupted lift")
        val = m + r
        return val if val.ndim else float(val)

    def inverse_scalar(self, y):
        c = self.phi0
        m = math.floor(y - c)
        t = y - m
        if self.inverse_base is not None:
            return m + float(self.inverse_base(np.asarray([t]))[0])
        return m + bisect_scalar(self.scalar, 0.0, 1.0, target=t)


def lift_inverse(lift, y):
    """Solve Phi(x) = y for a single y (|Phi(x) - y| <= 1e-13 for smooth maps)."""
    return float(lift.inverse(np.asarray([y], dtype=float))[0])


# -- construction and validation -------------------------------------------


def _validate_base(base, family, grid=VALIDATION_GRID):
    xs = np.linspace(0.0, 1.0, grid + 1)
    vals = base(xs)
    if not np.all(np.isfinite(vals)):
        raise InvalidMapError(f"{family}: lift evaluates to non-finite values")
    if abs(vals[-1] - vals[0] - 1.0) > DEGREE_ONE_TOL:
        raise InvalidMapError(
            f"{family}: degree-one violated, Phi(1)-Phi(0)={vals[-1] - vals[0]!r}"
        )
    if not np.all(np.diff(vals) > 0.0):
        raise InvalidMapError(f"{family}: not strictly increasing on a {grid}-point grid")
    c = vals[0]
    if not 0.0 <= c < 1.0:
        raise InvalidMapError(f"{family}: normalization bug, Phi(0)={c!r}")


def _build_lift(family, params, base, scalar, deriv_base=None, inverse_base=None,
                meta=None, grid=VALIDATION_GRID):
    _validate_base(base, family, grid=grid)
    return Lift(family=family, params=dict(params), base=base, scalar=scalar,
                deriv_base=deriv_base, inverse_base=inverse_base,
                meta=dict(meta or {}), monotonicity_certificate=grid)


def lift_from_callable(f, deriv=None, family="custom", params=None, grid=VALIDATION_GRID):
    """Wrap a raw degree-one callable on the reals as a normalized Lift.

    Checks Phi(x+1) = Phi(x) + 1 on the validation grid before adopting the
    fractional-part decomposition, then shifts by an integer so Phi(0) lands
    in [0, 1).
    """
    xs = np.linspace(0.0, 1.0, grid + 1)
    gap = np.asarray(f(xs + 1.0), dtype=float) - np.asarray(f(xs), dtype=float) - 1.0
    if np.max(np.abs(gap)) > DEGREE_ONE_TOL:
        raise InvalidMapError(f"{family}: callable is not a degree-one lift")
    shift = math.floor(float(np.asarray(f(np.zeros(1)), dtype=float)[0]))

    def base(r, _f=f, _s=shift):
        return np.asarray(_f(r), dtype=float) - _s

    def scalar(r, _f=f, _s=shift):
        return float(_f(r)) - _s

    deriv_base = None
    if deriv is not None:
        deriv_base = lambda r, _d=deriv: np.asarray(_d(r), dtype=float)
    return _build_lift(family, params or {}, base, scalar, deriv_base=deriv_base, grid=grid)


def make_rotation(rho):
    """Rigid rotation lift Phi(x) = x + rho (normalized to rho mod 1)."""
    rho_n = float(rho) % 1.0

    def base(r):
        return np.asarray(r, dtype=float) + rho_n

    return _build_lift(
        "rotation", {"rho": float(rho)},
        base,
        lambda r: r + rho_n,
        deriv_base=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        inverse_base=lambda t: np.asarray(t, dtype=float) - rho_n,
        meta={"rho": rho_n, "exact_rotation": True},
    )


def make_arnold(omega, k):
    """Standard sine circle map Phi(x) = x + omega + (k/2pi) sin(2pi x).

    Requires 0 <= k < 1 so the circle map stays a homeomorphism.
    """
    if not 0.0 <= k < 1.0:
        raise InvalidMapError(f"arnold: k={k} outside [0, 1)")
    omega_n = float(omega) % 1.0
    amp = k / TWO_PI

    def base(r):
        r = np.asarray(r, dtype=float)
        return r + omega_n + amp * np.sin(TWO_PI * r)

    def scalar(r):
        return r + omega_n + amp * math.sin(TWO_PI * r)

    def deriv_base(r):
        return 1.0 + k * np.cos(TWO_PI * np.asarray(r, dtype=float))

    return _build_lift("arnold", {"omega": float(omega), "k": float(k)},
                       base, scalar, deriv_base=deriv_base)


def _named_unit_graph(name):
    if name == "x_squared":
        return (lambda r: np.square(np.asarray(r, dtype=float)),
                lambda r: r * r,
                lambda r: 2.0 * np.asarray(r, dtype=float),
                lambda t: np.sqrt(np.asarray(t, dtype=float)))
    if name == "arcsin_scaled":
        two_over_pi = 2.0 / math.pi

        def deriv(r):
            r = np.asarray(r, dtype=float)
            with np.errstate(divide="ignore"):
                return two_over_pi / np.sqrt(1.0 - r * r)

        return (lambda r: two_over_pi * np.arcsin(np.asarray(r, dtype=float)),
                lambda r: two_over_pi * math.asin(r),
                deriv,
                lambda t: np.sin(0.5 * math.pi * np.asarray(t, dtype=float)))
    raise InvalidMapError(f"unit_graph: unknown built-in {name!r}")


def make_unit_graph(f, deriv=None, inverse=None, name=None):
    """Lift whose graph on [l, l+1] is a copy of f on [0, 1] shifted l up.

    f must be strictly increasing with f(0)=0 and f(1)=1 (within 1e-12).
    Pass one of the built-in names ("x_squared", "arcsin_scaled") or a
    vectorized callable.
    """
    if isinstance(f, str):
        name = f
        base, scalar, deriv_base, inverse_base = _named_unit_graph(f)
    else:
        base = lambda r: np.asarray(f(r), dtype=float)
        scalar = lambda r: float(f(r))
        deriv_base = (lambda r: np.asarray(deriv(r), dtype=float)) if deriv else None
        inverse_base = (lambda t: np.asarray(inverse(t), dtype=float)) if inverse else None
    e0 = float(base(np.zeros(1))[0])
    e1 = float(base(np.ones(1))[0])
    if abs(e0) > 1e-12 or abs(e1 - 1.0) > 1e-12:
        raise InvalidMapError(f"unit_graph: endpoints f(0)={e0!r}, f(1)={e1!r} not (0, 1)")
    return _build_lift("unit_graph", {"f": name or getattr(f, "__name__", "callable")},
                       base, scalar, deriv_base=deriv_base, inverse_base=inverse_base)


def make_sine_perturb(a):
    """Sine-perturbed identity Gamma(x) = x + (a/2pi) sin(2pi x), |a| < 1.

    Strictly increasing, Gamma(0) = 0; the stock conjugacy family.
    """
    if not abs(a) < 1.0:
        raise InvalidMapError(f"sine_perturb: |a|={abs(a)} >= 1 is not increasing")
    amp = a / TWO_PI

    def base(r):
        r = np.asarray(r, dtype=float)
        return r + amp * np.sin(TWO_PI * r)

    def deriv_base(r):
        return 1.0 + a * np.cos(TWO_PI * np.asarray(r, dtype=float))

    return _build_lift("sine_perturb", {"a": float(a)},
                       base, lambda r: r + amp * math.sin(TWO_PI * r),
                       deriv_base=deriv_base)


def make_conjugated(gamma_lift, rho):
    """Lift of Gamma^{-1} o (x + rho) o Gamma for a valid conjugacy lift Gamma.

    The exact conjugacy and rotation number are retained in ``meta`` for
    oracle use; derivative uses Phi'(x) = Gamma'(x)/Gamma'(Phi(x)) when Gamma
    carries an analytic derivative.
    """
    if not 0.0 < rho < 1.0:
        raise InvalidMapError(f"conjugated: rho={rho} outside (0, 1)")
    g = gamma_lift

    def base(r):
        return g.inverse(g(np.asarray(r, dtype=float)) + rho)

    def scalar(r):
        return g.inverse_scalar(g.eval_scalar(r) + rho)

    def inverse_base(t):
        return g.inverse(g(np.asarray(t, dtype=float)) - rho)

    deriv_base = None
    if g.has_analytic_deriv:
        def deriv_base(r):
            r = np.asarray(r, dtype=float)
            return g.deriv(r) / g.deriv(base(r))

    return _build_lift(
        "conjugated",
        {"rho": float(rho), "gamma_family": g.family, **{f"gamma_{k}": v for k, v in g.params.items()}},
        base, scalar, deriv_base=deriv_base, inverse_base=inverse_base,
        meta={"conjugacy": g, "rho": float(rho)},
    )


def perturb_lift(lift, delta, freq=2, table_grid=2 ** 14):
    """C^1-small perturbation Phi(x) + delta*sin(2pi*freq*x) of a lift.

    The base map is tabulated once and replayed through a monotone cubic, so
    perturbed orbits run at closed-form speed; table error ~1e-14 is far
    below any delta of interest. Raises if the perturbation destroys
    monotonicity.
    """
    xs = np.linspace(0.0, 1.0, table_grid + 1)
    vals = lift(xs)
    pch = PchipInterpolator(xs, vals)
    sp = ScalarPPoly(pch)
    w = TWO_PI * freq

    def base(r):
        return pch(np.asarray(r, dtype=float)) + delta * np.sin(w * np.asarray(r, dtype=float))

    def scalar(r):
        return sp(r) + delta * math.sin(w * r)

    dp = pch.derivative()

    def deriv_base(r):
        return dp(np.asarray(r, dtype=float)) + delta * w * np.cos(w * np.asarray(r, dtype=float))

    params = {"delta": float(delta), "freq": int(freq), "of": lift.family}
    return _build_lift("perturbed", params, base, scalar, deriv_base=deriv_base)


# -- MapSpec: JSON wire format ----------------------------------------------


@dataclass(frozen=True)
class MapSpec:
    """Declarative description of a map, the CLI/JSON wire format.

    Examples: {"family": "arnold", "omega": 0.25, "k": 0.9},
    {"family": "conjugated", "rho": 0.618, "gamma": {"family": "sine_perturb", "a": 0.5}},
    {"family": "unit_graph", "f": "x_squared"}.
    """

    family: str
    params: dict
    aux: Optional["MapSpec"] = None

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        family = d.pop("family", None)
        if family is None:
            raise InvalidMapError("map spec missing 'family'")
        aux = None
        if "gamma" in d:
            aux = cls.from_dict(d.pop("gamma"))
        if "inner" in d:
            aux = cls.from_dict(d.pop("inner"))
        return cls(family=family, params=d, aux=aux)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        d = {"family": self.family, **self.params}
        if self.aux is not None:
            d["gamma"] = self.aux.to_dict()
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def build(self):
        f = self.family
        p = self.params
        try:
            if f == "rotation":
                return make_rotation(p["rho"])
            if f == "arnold":
                return make_arnold(p["omega"], p["k"])
            if f == "unit_graph":
                return make_unit_graph(p["f"])
            if f == "sine_perturb":
                return make_sine_perturb(p["a"])
            if f == "conjugated":
                if self.aux is None:
                    raise InvalidMapError("conjugated spec needs a 'gamma' sub-spec")
                return make_conjugated(self.aux.build(), p["rho"])
            if f == "firing":
                from .ifm import FiringModel
                return FiringModel.from_dict(p).lift
        except KeyError as e:
            raise InvalidMapError(f"map spec {f!r} missing parameter {e}") from None
        raise InvalidMapError(f"unknown map family {f!r}")
