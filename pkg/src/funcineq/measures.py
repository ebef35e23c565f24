"""Base measures ``Z^-1 exp(-V) dx``, perturbations ``exp(-F)``, and moments.

Densities are stored unnormalized throughout: every downstream formula
consumes ratios, so normalizing constants only ever appear inside the
quadrature routines (and are cached there).  Metadata a calculator needs
(Lipschitz constants, oscillations, generator suprema) is certified at
construction time for the closed-form families.  ``None`` always means
"unknown"; it is never a stand-in for zero, and calculators are expected to
refuse rather than fabricate a value.

All objects are immutable after construction and all operations are pure,
so instances can be shared freely between concurrent workers.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "DimensionMismatch",
    "MomentDiverges",
    "QuadratureUnstable",
    "MeasureModel",
    "Perturbation",
    "MomentSet",
    "QuadratureSpec",
    "gaussian",
    "exponential",
    "subbotin",
    "uniform",
    "double_well",
    "product",
    "custom",
    "dilate",
    "zero_perturbation",
    "linear_perturbation",
    "abs_perturbation",
    "half_quadratic_perturbation",
    "bump_perturbation",
    "separable_perturbation",
    "evaluate_log_density",
    "compute_moments",
    "fd_gradient",
    "fd_gradient_checked",
    "integration_interval",
    "quadrature_grid",
]


class DimensionMismatch(ValueError):
    """Point dimension does not match the measure's dimension."""


class MomentDiverges(ArithmeticError):
    """A requested (exponential) moment is not integrable.

    Raised instead of returning a silently truncated number.  ``tag`` names
    the offending request.
    """

    def __init__(self, tag, message=""):
        self.tag = tag
        super().__init__(message or f"moment request {tag!r} diverges")


class QuadratureUnstable(ArithmeticError):
    """Doubling the node count moved a moment by more than 0.1%."""


# --------------------------------------------------------------------------
# measure models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MeasureModel:
    """A probability measure ``mu = Z^-1 exp(-V) dx`` on R^n.

    ``potential`` evaluates V (vectorized; ``+inf`` outside the support),
    ``grad_potential`` its gradient when available.  ``known`` maps constant
    names ("poincare", "log_sobolev", "cheeger_mean", "cheeger_median") to
    canonical values for the named families.  ``support`` is a 1D interval
    ``(lo, hi)`` with ``None`` for an unbounded side; ``kinks`` lists points
    where V is non-smooth so quadrature panels and oracle grids can align
    with them.
    """

    family: str
    dimension: int
    potential: Callable
    grad_potential: Optional[Callable] = None
    log_concave: bool = False
    even: bool = False
    unconditional: bool = False
    params: dict = field(default_factory=dict)
    known: dict = field(default_factory=dict)
    support: tuple = (None, None)
    kinks: tuple = ()
    components: tuple = ()

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be a positive integer")
        if self.components and self.dimension != sum(
            c.dimension for c in self.components
        ):
            raise ValueError("product dimension must equal the sum of components")


def gaussian(rho: float, dimension: int = 1) -> MeasureModel:
    """Centered Gaussian with potential ``rho |x|^2 / 2`` (curvature rho > 0)."""
    if rho <= 0:
        raise ValueError("rho must be positive")

    def pot(x):
        x = np.asarray(x, dtype=float)
        if dimension == 1:
            return 0.5 * rho * x**2
        return 0.5 * rho * np.sum(x**2, axis=-1)

    def grad(x):
        return rho * np.asarray(x, dtype=float)

    return MeasureModel(
        family="gaussian",
        dimension=dimension,
        potential=pot,
        grad_potential=grad,
        log_concave=True,
        even=True,
        unconditional=True,
        params={"rho": float(rho)},
        known={"poincare": 1.0 / rho, "log_sobolev": 2.0 / rho},
    )


def exponential(alpha: float) -> MeasureModel:
    """Two-sided exponential ``exp(-alpha |x|)`` on R (rate alpha > 0)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")

    def pot(x):
        return alpha * np.abs(np.asarray(x, dtype=float))

    def grad(x):
        return alpha * np.sign(np.asarray(x, dtype=float))

    return MeasureModel(
        family="exponential",
        dimension=1,
        potential=pot,
        grad_potential=grad,
        log_concave=True,
        even=True,
        unconditional=True,
        params={"alpha": float(alpha)},
        known={"poincare": 4.0 / alpha**2, "cheeger_median": 1.0 / alpha},
        kinks=(0.0,),
    )


def subbotin(p: float) -> MeasureModel:
    """Exponential-power density ``exp(-|x|^p)`` on R, exponent p >= 1."""
    if p < 1:
        raise ValueError("p must be at least 1")

    def pot(x):
        return np.abs(np.asarray(x, dtype=float)) ** p

    def grad(x):
        x = np.asarray(x, dtype=float)
        return p * np.sign(x) * np.abs(x) ** (p - 1.0)

    return MeasureModel(
        family="subbotin",
        dimension=1,
        potential=pot,
        grad_potential=grad,
        log_concave=True,
        even=True,
        unconditional=True,
        params={"p": float(p)},
        kinks=(0.0,) if p < 2 else (),
    )


def uniform(lo: float, hi: float) -> MeasureModel:
    """Uniform distribution on ``[lo, hi]``."""
    if not hi > lo:
        raise ValueError("need hi > lo")
    lo, hi = float(lo), float(hi)

    def pot(x):
        x = np.asarray(x, dtype=float)
        return np.where((x < lo) | (x > hi), np.inf, 0.0)

    length = hi - lo
    return MeasureModel(
        family="uniform",
        dimension=1,
        potential=pot,
        grad_potential=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        log_concave=True,
        even=(abs(lo + hi) < 1e-15),
        unconditional=(abs(lo + hi) < 1e-15),
        params={"lo": lo, "hi": hi},
        known={"poincare": length**2 / math.pi**2},
        support=(lo, hi),
    )


def double_well(a: float) -> MeasureModel:
    """Potential ``x^4 - a x^2``; non log-concave for a > 0."""

    def pot(x):
        x = np.asarray(x, dtype=float)
        return x**4 - a * x**2

    def grad(x):
        x = np.asarray(x, dtype=float)
        return 4.0 * x**3 - 2.0 * a * x

    return MeasureModel(
        family="double_well",
        dimension=1,
        potential=pot,
        grad_potential=grad,
        log_concave=(a <= 0),
        even=True,
        unconditional=(a <= 0),
        params={"a": float(a)},
    )


def product(components: Sequence[MeasureModel]) -> MeasureModel:
    """Product measure of 1D (or lower-dimensional) factors."""
    components = tuple(components)
    if not components:
        raise ValueError("need at least one component")
    dims = [c.dimension for c in components]
    n = sum(dims)
    offsets = np.cumsum([0] + dims)

    def pot(x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != n:
            raise DimensionMismatch(f"expected last axis {n}, got {x.shape[-1]}")
        total = 0.0
        for c, o in zip(components, offsets[:-1]):
            block = x[..., o : o + c.dimension]
            total = total + c.potential(block if c.dimension > 1 else block[..., 0])
        return total

    known = {}
    if all("poincare" in c.known for c in components):
        known["poincare"] = max(c.known["poincare"] for c in components)
    return MeasureModel(
        family="product",
        dimension=n,
        potential=pot,
        log_concave=all(c.log_concave for c in components),
        even=all(c.even for c in components),
        unconditional=all(c.even for c in components),
        known=known,
        components=components,
    )


def custom(
    potential: Callable,
    grad_potential: Optional[Callable] = None,
    dimension: int = 1,
    log_concave: bool = False,
    even: bool = False,
    unconditional: bool = False,
    support: tuple = (None, None),
    kinks: tuple = (),
    known: Optional[dict] = None,
    family: str = "custom",
) -> MeasureModel:
    """Wrap caller-supplied potential evaluators in a MeasureModel."""
    return MeasureModel(
        family=family,
        dimension=dimension,
        potential=potential,
        grad_potential=grad_potential,
        log_concave=log_concave,
        even=even,
        unconditional=unconditional,
        support=support,
        kinks=tuple(kinks),
        known=dict(known or {}),
    )


def dilate(m: MeasureModel, sigma: float) -> MeasureModel:
    """Distribution of ``sigma * X`` for ``X ~ m`` (1D only)."""
    if m.dimension != 1:
        raise DimensionMismatch("dilate is 1D-only")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    base_pot, base_grad = m.potential, m.grad_potential

    def pot(x):
        return base_pot(np.asarray(x, dtype=float) / sigma)

    grad = None
    if base_grad is not None:

        def grad(x):
            return base_grad(np.asarray(x, dtype=float) / sigma) / sigma

    lo, hi = m.support
    support = (
        None if lo is None else lo * sigma,
        None if hi is None else hi * sigma,
    )
    known = {}
    if "poincare" in m.known:
        known["poincare"] = sigma**2 * m.known["poincare"]
    if "log_sobolev" in m.known:
        known["log_sobolev"] = sigma**2 * m.known["log_sobolev"]
    return replace(
        m,
        family=f"dilated_{m.family}",
        potential=pot,
        grad_potential=grad,
        params={**m.params, "dilation": float(sigma)},
        known=known,
        support=support,
        kinks=tuple(k * sigma for k in m.kinks),
    )


# --------------------------------------------------------------------------
# perturbations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Perturbation:
    """A perturbation F defining ``mu_F = Z_F^-1 exp(-F) mu``.

    Metadata fields are certified values, not estimates: ``lipschitz`` is a
    global Lipschitz constant, ``oscillation`` is sup F - inf F,
    ``sup_above`` is sup F *after the normalization min F = 0*, and
    ``sup_generator_plus`` is ``sup (AF - |grad F|^2 / 2)_+`` for the paired
    base measure (it depends on the measure through A).  ``math.inf`` is a
    certified infinite value; ``None`` is unknown.
    """

    fn: Callable
    grad: Optional[Callable] = None
    hess: Optional[Callable] = None
    lipschitz: Optional[float] = None
    oscillation: Optional[float] = None
    sup_above: Optional[float] = None
    sup_generator_plus: Optional[float] = None
    convex: bool = False
    even: bool = False
    label: str = "perturbation"
    coordinates: tuple = ()

    def __post_init__(self):
        osc, m = self.oscillation, self.sup_above
        if osc is not None and math.isfinite(osc):
            if m is None:
                object.__setattr__(self, "sup_above", osc)
            elif m > osc + 1e-12:
                raise ValueError("sup_above exceeds oscillation after min F = 0")

    def gradient(self, x):
        """Gradient of F, finite-differenced when no evaluator was given."""
        if self.grad is not None:
            return self.grad(x)
        return fd_gradient(self.fn, x)

    def second_derivative(self, x):
        """F'' for 1D perturbations (needed by generator-form moments)."""
        if self.hess is None:
            raise ValueError(
                f"{self.label}: no certified second derivative; "
                "generator quantities are refused for non-C2 perturbations"
            )
        return self.hess(x)


def zero_perturbation() -> Perturbation:
    z = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return Perturbation(
        fn=z,
        grad=z,
        hess=z,
        lipschitz=0.0,
        oscillation=0.0,
        sup_above=0.0,
        sup_generator_plus=0.0,
        convex=True,
        even=True,
        label="zero",
    )


def linear_perturbation(c: float) -> Perturbation:
    """F(x) = c x on R; Lipschitz |c|, unbounded oscillation."""
    return Perturbation(
        fn=lambda x: c * np.asarray(x, dtype=float),
        grad=lambda x: np.full_like(np.asarray(x, dtype=float), c),
        hess=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        lipschitz=abs(c),
        oscillation=math.inf if c != 0 else 0.0,
        sup_above=math.inf if c != 0 else 0.0,
        convex=True,
        even=(c == 0),
        label=f"linear({c})",
    )


def abs_perturbation(c: float) -> Perturbation:
    """F(x) = c |x|; Lipschitz |c|.  Not C2, so no generator metadata."""
    return Perturbation(
        fn=lambda x: c * np.abs(np.asarray(x, dtype=float)),
        grad=lambda x: c * np.sign(np.asarray(x, dtype=float)),
        lipschitz=abs(c),
        oscillation=math.inf if c != 0 else 0.0,
        sup_above=math.inf if c > 0 else (0.0 if c == 0 else math.inf),
        convex=(c >= 0),
        even=True,
        label=f"abs({c})",
    )


def half_quadratic_perturbation(c: float) -> Perturbation:
    """F(x) = c x^2 / 2; not Lipschitz, smooth."""
    return Perturbation(
        fn=lambda x: 0.5 * c * np.asarray(x, dtype=float) ** 2,
        grad=lambda x: c * np.asarray(x, dtype=float),
        hess=lambda x: np.full_like(np.asarray(x, dtype=float), c),
        lipschitz=math.inf if c != 0 else 0.0,
        oscillation=math.inf if c != 0 else 0.0,
        convex=(c >= 0),
        even=True,
        label=f"half_quadratic({c})",
    )


def bump_perturbation(height: float, center: float = 0.0, width: float = 1.0) -> Perturbation:
    """Gaussian bump F(x) = height * exp(-(x-center)^2 / (2 width^2)).

    Bounded with oscillation |height| and Lipschitz constant
    |height| / (width sqrt(e)).
    """
    if width <= 0:
        raise ValueError("width must be positive")
    b, c, w = float(height), float(center), float(width)

    def fn(x):
        u = (np.asarray(x, dtype=float) - c) / w
        return b * np.exp(-0.5 * u**2)

    def grad(x):
        u = (np.asarray(x, dtype=float) - c) / w
        return -b * u / w * np.exp(-0.5 * u**2)

    def hess(x):
        u = (np.asarray(x, dtype=float) - c) / w
        return b * (u**2 - 1.0) / w**2 * np.exp(-0.5 * u**2)

    return Perturbation(
        fn=fn,
        grad=grad,
        hess=hess,
        lipschitz=abs(b) / (w * math.sqrt(math.e)),
        oscillation=abs(b),
        sup_above=abs(b),
        convex=False,
        even=(c == 0.0),
        label=f"bump({b},{c},{w})",
    )


def separable_perturbation(components: Sequence[Perturbation]) -> Perturbation:
    """F(x) = sum_i F_i(x_i) acting coordinate-wise on a product measure."""
    components = tuple(components)

    def fn(x):
        x = np.asarray(x, dtype=float)
        return sum(comp.fn(x[..., i]) for i, comp in enumerate(components))

    def grad(x):
        x = np.asarray(x, dtype=float)
        return np.stack(
            [comp.gradient(x[..., i]) for i, comp in enumerate(components)], axis=-1
        )

    lips = None
    if all(c.lipschitz is not None for c in components):
        lips = math.sqrt(sum(c.lipschitz**2 for c in components))
    osc = None
    if all(c.oscillation is not None for c in components):
        osc = sum(c.oscillation for c in components)
    return Perturbation(
        fn=fn,
        grad=grad,
        lipschitz=lips,
        oscillation=osc,
        convex=all(c.convex for c in components),
        even=all(c.even for c in components),
        label="separable(" + ",".join(c.label for c in components) + ")",
        coordinates=components,
    )


# --------------------------------------------------------------------------
# finite differences
# --------------------------------------------------------------------------


def fd_gradient(fn, x, h: float = 1e-6):
    """Central finite-difference gradient with step ``h``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape == ():
        return (fn(x + h) - fn(x - h)) / (2.0 * h)
    if x.ndim == 1:
        g = np.empty_like(x)
        for i in range(x.size):
            e = np.zeros_like(x)
            e[i] = h
            g[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
        return g
    # vectorized over a trailing coordinate axis is not supported here
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


def fd_gradient_checked(fn, x, h: float = 1e-6):
    """Gradient plus a Richardson-style error estimate (h vs h/2)."""
    g1 = np.asarray(fd_gradient(fn, x, h), dtype=float)
    g2 = np.asarray(fd_gradient(fn, x, h / 2.0), dtype=float)
    err = np.max(np.abs(g2 - g1) / np.maximum(1.0, np.abs(g2)))
    return g2, float(err)


def _fd_second(fn, x, h: float = 1e-4):
    x = np.asarray(x, dtype=float)
    return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / h**2


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre settings for 1D moment integrals."""

    nodes_per_axis: int = 2048
    panel_order: int = 16
    truncation_tol: float = 1e-12
    radius: Optional[float] = None


def _auto_side(logf, side: float, tol: float, start: float = 1.0):
    """Truncation point on one side: unnormalized discarded mass < tol.

    Uses a doubling ladder; a log-integrand that keeps rising along the
    ladder is reported as divergent.
    """
    T = start
    best = -math.inf
    last_end = None
    rising = 0
    log_tol = math.log(tol)
    for _ in range(60):
        xs = np.linspace(0.0, side * T, 257)
        vals = np.asarray(logf(xs), dtype=float)
        vals = vals[np.isfinite(vals)]
        if vals.size:
            best = max(best, float(np.max(vals)))
        end = float(np.asarray(logf(np.array([side * T])), dtype=float)[0])
        if not math.isfinite(end):
            end = -math.inf
        if end - best < log_tol - math.log1p(2.0 * T):
            return T
        # a rising endpoint only signals divergence when it rises near the
        # running maximum; merely climbing toward an interior peak does not.
        # The patience covers density peaks out to ~2^12 * start.
        if last_end is not None and end >= last_end - 1e-12 and end >= best - 20.0:
            rising += 1
            if rising >= 12:
                raise MomentDiverges("integrand", "log-integrand keeps rising")
        else:
            rising = 0
        last_end = end
        T *= 2.0
    raise MomentDiverges("integrand", "no integrable truncation radius found")


def integration_interval(logf, support=(None, None), tol: float = 1e-12):
    """Interval (lo, hi) outside which ``exp(logf)`` carries < tol mass."""
    lo, hi = support
    if hi is None:
        hi = _auto_side(logf, +1.0, tol)
    if lo is None:
        lo = -_auto_side(logf, -1.0, tol)
    return float(lo), float(hi)


def quadrature_grid(lo: float, hi: float, kinks=(), n_nodes: int = 2048, order: int = 16):
    """Composite Gauss-Legendre nodes/weights with kinks on panel edges."""
    inner = sorted(k for k in set(kinks) if lo < k < hi)
    edges = [lo] + inner + [hi]
    pieces = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    total_panels = max(len(pieces), int(round(n_nodes / order)))
    span = hi - lo
    ref_x, ref_w = leggauss(order)
    xs, ws = [], []
    for a, b in pieces:
        npan = max(1, int(round(total_panels * (b - a) / span)))
        bounds = np.linspace(a, b, npan + 1)
        for j in range(npan):
            c0, c1 = bounds[j], bounds[j + 1]
            half = 0.5 * (c1 - c0)
            xs.append(0.5 * (c0 + c1) + half * ref_x)
            ws.append(half * ref_w)
    return np.concatenate(xs), np.concatenate(ws)


def _log_integral(x, w, logf):
    v = np.asarray(logf(x), dtype=float)
    m = float(np.max(v[np.isfinite(v)], initial=-math.inf))
    if not math.isfinite(m):
        return -math.inf
    dens = np.where(np.isfinite(v), np.exp(v - m), 0.0)
    s = float(np.sum(w * dens))
    if s <= 0:
        return -math.inf
    return m + math.log(s)


def _expectation(x, w, logf, phi):
    v = np.asarray(logf(x), dtype=float)
    m = float(np.max(v[np.isfinite(v)], initial=-math.inf))
    dens = np.where(np.isfinite(v), np.exp(v - m), 0.0) * w
    z = float(np.sum(dens))
    return float(np.sum(dens * np.asarray(phi(x), dtype=float)) / z)


# --------------------------------------------------------------------------
# moments
# --------------------------------------------------------------------------

_SCALAR_TAGS = ("first_abs", "second", "sigma2", "grad_F_l1", "grad_F_l2sq", "generator_plus")


@dataclass(frozen=True)
class MomentSet:
    """Moment values of a perturbed measure, each entry optional.

    ``exp_moments`` maps ``(tag, coefficient)`` to a log moment:
    ``("sF", s)`` is ``ln mu_F(e^{s F})``, ``("grad2", t)`` is
    ``ln mu_F(e^{t |grad F|^2})``, ``("gen", t)`` is
    ``ln mu_F(e^{t (AF - |grad F|^2/2)})`` and ``("negF", s)`` is
    ``ln mu(e^{-s F})`` under the *base* measure.  ``self_check`` reports
    the relative movement of each entry under node-count doubling;
    ``diverged`` lists requests refused as non-integrable.
    """

    mean: Optional[float] = None
    first_abs: Optional[float] = None
    second: Optional[float] = None
    sigma2: Optional[float] = None
    grad_F_l1: Optional[float] = None
    grad_F_l2sq: Optional[float] = None
    generator_plus: Optional[float] = None
    exp_moments: dict = field(default_factory=dict)
    self_check: dict = field(default_factory=dict)
    diverged: frozenset = frozenset()

    def __post_init__(self):
        for name in ("first_abs", "second", "sigma2", "grad_F_l1", "grad_F_l2sq", "generator_plus"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative, got {v}")
        if self.sigma2 is not None and self.second is not None:
            if self.sigma2 > self.second * (1 + 1e-12) + 1e-300:
                raise ValueError("sigma2 (top eigenvalue) cannot exceed the trace")

    def exp_log(self, tag: str, coeff: float) -> Optional[float]:
        for (t, c), v in self.exp_moments.items():
            if t == tag and abs(c - coeff) <= 1e-12 * max(1.0, abs(coeff)):
                return v
        return None

    def coefficients(self, tag: str):
        return sorted(c for (t, c) in self.exp_moments if t == tag)

    def m_ratio(self) -> Optional[float]:
        """mu^{1/2}(e^{-2F}) / mu(e^{-F}), at least 1 by Cauchy-Schwarz."""
        l2 = self.exp_log("negF", 2.0)
        l1 = self.exp_log("negF", 1.0)
        if l2 is None or l1 is None:
            return None
        return math.exp(0.5 * l2 - l1)


def _tag_key(req):
    return req if isinstance(req, str) else f"{req[0]}:{req[1]:g}"


def compute_moments(model: MeasureModel, pert: Optional[Perturbation] = None,
                    requests: Sequence = ("second",),
                    spec: Optional[QuadratureSpec] = None) -> MomentSet:
    """Quadrature moments of ``mu_F`` (and base-measure exponential moments).

    ``requests`` mixes scalar tags from ``{"first_abs", "second", "sigma2",
    "grad_F_l1", "grad_F_l2sq", "generator_plus"}`` with exponential-moment
    pairs ``(tag, coefficient)``; see :class:`MomentSet`.  Every value is
    recomputed with doubled node count and the relative movement recorded;
    movement beyond 0.1% raises :class:`QuadratureUnstable`.  Non-integrable
    exponential requests are listed in ``diverged`` rather than filled.

    Supports 1D models, and product models when the perturbation is absent
    or coordinate-separable (additive tags only).
    """
    spec = spec or QuadratureSpec()
    pert = pert or zero_perturbation()
    if model.family == "product" or model.components:
        return _product_moments(model, pert, requests, spec)
    if model.dimension == 1:
        return _moments_1d(model, pert, requests, spec)
    if model.dimension <= 3:
        return _moments_tensor(model, pert, requests, spec)
    raise DimensionMismatch(
        "tensor quadrature is limited to n <= 3; use product models beyond"
    )


def _moments_1d(model, pert, requests, spec):
    V, F = model.potential, pert.fn

    def log_muf(x):
        return -np.asarray(V(x), dtype=float) - np.asarray(F(x), dtype=float)

    if spec.radius is not None:
        lo, hi = -spec.radius, spec.radius
        slo, shi = model.support
        if slo is not None:
            lo = max(lo, slo)
        if shi is not None:
            hi = min(hi, shi)
    else:
        lo, hi = integration_interval(log_muf, model.support, spec.truncation_tol)

    kinks = model.kinks
    grids = {
        1: quadrature_grid(lo, hi, kinks, spec.nodes_per_axis, spec.panel_order),
        2: quadrature_grid(lo, hi, kinks, 2 * spec.nodes_per_axis, spec.panel_order),
    }

    values = {}
    checks = {}
    diverged = set()

    def both(fn_of_grid):
        coarse = fn_of_grid(*grids[1])
        fine = fn_of_grid(*grids[2])
        return coarse, fine

    mean_c, mean_f = both(lambda x, w: _expectation(x, w, log_muf, lambda t: t))
    mean = mean_f

    def record(key, coarse, fine, log_scale=False):
        if log_scale:
            err = abs(fine - coarse) / max(1.0, abs(fine))
        else:
            err = abs(fine - coarse) / max(abs(fine), 1e-12)
        checks[key] = err
        if err > 1e-3:
            raise QuadratureUnstable(f"{key}: relative movement {err:.2e} on doubling")
        values[key] = fine

    for req in requests:
        key = _tag_key(req)
        if isinstance(req, str):
            if req == "first_abs":
                c, f = both(lambda x, w: _expectation(x, w, log_muf, lambda t: np.abs(t - mean)))
            elif req in ("second", "sigma2"):
                c, f = both(lambda x, w: _expectation(x, w, log_muf, lambda t: (t - mean) ** 2))
            elif req == "grad_F_l1":
                c, f = both(lambda x, w: _expectation(x, w, log_muf, lambda t: np.abs(pert.gradient(t))))
            elif req == "grad_F_l2sq":
                c, f = both(lambda x, w: _expectation(x, w, log_muf, lambda t: pert.gradient(t) ** 2))
            elif req == "generator_plus":
                gen = _generator_quantity(model, pert)
                c, f = both(lambda x, w: _expectation(x, w, log_muf, lambda t: np.maximum(gen(t), 0.0)))
            else:
                raise ValueError(f"unknown moment tag {req!r}")
            record(key, c, f)
        else:
            tag, coeff = req
            try:
                c, f = _exp_moment(model, pert, tag, float(coeff), log_muf, grids, spec)
            except MomentDiverges:
                diverged.add(key)
                continue
            record(key, c, f, log_scale=True)

    second = values.get("second", values.get("sigma2"))
    exp_moments = {}
    for req in requests:
        if not isinstance(req, str):
            key = _tag_key(req)
            if key in values:
                exp_moments[(req[0], float(req[1]))] = values[key]

    return MomentSet(
        mean=mean,
        first_abs=values.get("first_abs"),
        second=second,
        sigma2=values.get("sigma2", second),
        grad_F_l1=values.get("grad_F_l1"),
        grad_F_l2sq=values.get("grad_F_l2sq"),
        generator_plus=values.get("generator_plus"),
        exp_moments=exp_moments,
        self_check=checks,
        diverged=frozenset(diverged),
    )


def _generator_quantity(model, pert):
    """x -> (AF - |F'|^2 / 2)(x) for 1D models, A = d^2/dx^2 - V' d/dx.

    Refuses perturbations with kinks (their AF carries Dirac terms a
    pointwise formula would silently drop).
    """
    if pert.hess is None and pert.label.startswith("abs"):
        raise ValueError("generator quantity undefined for |x|-type kinks")
    gradV = model.grad_potential
    if gradV is None:
        gradV = lambda x: fd_gradient(model.potential, x)

    def gen(x):
        x = np.asarray(x, dtype=float)
        fp = np.asarray(pert.gradient(x), dtype=float)
        if pert.hess is not None:
            fpp = np.asarray(pert.hess(x), dtype=float)
        else:
            fpp = np.asarray(_fd_second(pert.fn, x), dtype=float)
        return fpp - np.asarray(gradV(x), dtype=float) * fp - 0.5 * fp**2

    return gen


def _exp_moment(model, pert, tag, coeff, log_muf, grids, spec):
    """(coarse, fine) values of one exponential-moment log request."""
    V, F = model.potential, pert.fn
    if tag == "sF":
        def logg(x):
            return log_muf(x) + coeff * np.asarray(F(x), dtype=float)
        base = log_muf
    elif tag == "grad2":
        def logg(x):
            g = np.asarray(pert.gradient(x), dtype=float)
            return log_muf(x) + coeff * g**2
        base = log_muf
    elif tag == "gen":
        gen = _generator_quantity(model, pert)
        def logg(x):
            return log_muf(x) + coeff * np.asarray(gen(x), dtype=float)
        base = log_muf
    elif tag == "negF":
        def base(x):
            return -np.asarray(V(x), dtype=float)
        def logg(x):
            return base(x) - coeff * np.asarray(F(x), dtype=float)
    else:
        raise ValueError(f"unknown exponential-moment tag {tag!r}")

    # the numerator integrand may have fatter tails than mu_F: find its own
    # radius (this is where divergence is detected) and re-check at 1.25 T.
    # The window must also carry the full denominator mass, hence the union.
    lo, hi = integration_interval(logg, model.support, spec.truncation_tol)
    blo, bhi = integration_interval(base, model.support, spec.truncation_tol)
    lo, hi = min(lo, blo), max(hi, bhi)
    out = []
    for factor in (1, 2):
        x, w = quadrature_grid(lo, hi, model.kinks, factor * spec.nodes_per_axis, spec.panel_order)
        num = _log_integral(x, w, logg)
        den = _log_integral(x, w, base)
        out.append(num - den)
    # truncation-radius sensitivity: a quarter-wider window must not move it
    slo = lo if model.support[0] is not None else 1.25 * lo
    shi = hi if model.support[1] is not None else 1.25 * hi
    xw = quadrature_grid(slo, shi, model.kinks, 2 * spec.nodes_per_axis, spec.panel_order)
    wide = _log_integral(*xw, logg) - _log_integral(*xw, base)
    if abs(wide - out[1]) > 1e-6 + 1e-4 * abs(out[1]):
        raise MomentDiverges((tag, coeff), "truncation-radius sensitive")
    return out[0], out[1]


def _tensor_grid(lo, hi, kinks, per_axis, order, n):
    x1, w1 = quadrature_grid(lo, hi, kinks, per_axis, order)
    axes = [x1] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    w = w1
    for _ in range(n - 1):
        w = np.multiply.outer(w, w1)
    return pts, w.ravel()


def _moments_tensor(model, pert, requests, spec):
    """Full tensor quadrature for 2D and 3D models.

    The per-axis budget is capped (nodes scale like per_axis^n); the
    self-check doubles the total node count (factor 2^{1/n} per axis).
    Generator-form requests are 1D-only and refused here.
    """
    n = model.dimension
    V = model.potential
    if pert.label == "zero":
        # the 1D zero family returns per-coordinate zeros; flatten it here
        F = lambda pts: np.zeros(np.asarray(pts, dtype=float).shape[:-1])
        grad_eval = lambda pts: np.zeros_like(np.asarray(pts, dtype=float))
    else:
        F = pert.fn
        grad_eval = pert.grad

    def log_muf(pts):
        return -np.asarray(V(pts), dtype=float) - np.asarray(F(pts), dtype=float)

    def gradF(pts):
        if grad_eval is not None:
            return np.asarray(grad_eval(pts), dtype=float)
        out = np.empty_like(pts)
        h = 1e-6
        for i in range(n):
            e = np.zeros(n)
            e[i] = h
            out[:, i] = (np.asarray(F(pts + e), dtype=float)
                         - np.asarray(F(pts - e), dtype=float)) / (2 * h)
        return out

    def axis_scan(direction):
        direction = np.asarray(direction, dtype=float)
        direction /= np.linalg.norm(direction)
        return lambda t: log_muf(np.multiply.outer(np.atleast_1d(t), direction))

    if spec.radius is not None:
        T = float(spec.radius)
    else:
        T = 1.0
        dirs = [np.eye(n)[i] for i in range(n)] + [np.ones(n)]
        for d in dirs:
            T = max(T, _auto_side(axis_scan(d), +1.0, spec.truncation_tol),
                    _auto_side(axis_scan(d), -1.0, spec.truncation_tol))
    per_axis = min(spec.nodes_per_axis, 160 if n == 2 else 56)
    factor = 2.0 ** (1.0 / n)
    grids = {
        1: _tensor_grid(-T, T, model.kinks, per_axis, spec.panel_order, n),
        2: _tensor_grid(-T, T, model.kinks, int(round(per_axis * factor)),
                        spec.panel_order, n),
    }

    def expect(pts, w, phi):
        v = log_muf(pts)
        m = float(np.max(v[np.isfinite(v)], initial=-math.inf))
        dens = np.where(np.isfinite(v), np.exp(v - m), 0.0) * w
        vals = np.asarray(phi(pts), dtype=float)
        if vals.ndim == 1:
            return float(np.sum(dens * vals) / np.sum(dens))
        return np.sum(dens[:, None] * vals, axis=0) / np.sum(dens)

    values, checks, diverged = {}, {}, set()
    means = [expect(*grids[k], lambda p: p) for k in (1, 2)]
    mean = means[1]

    def record(key, c, f, log_scale=False):
        err = abs(f - c) / (max(1.0, abs(f)) if log_scale else max(abs(f), 1e-12))
        checks[key] = err
        if err > 1e-3:
            raise QuadratureUnstable(f"{key}: relative movement {err:.2e} on doubling")
        values[key] = f

    cov = None
    for req in requests:
        key = _tag_key(req)
        if isinstance(req, str):
            if req == "second":
                c, f = [expect(*grids[k], lambda p: np.sum((p - mean) ** 2, axis=-1))
                        for k in (1, 2)]
            elif req == "sigma2":
                covs = []
                for k in (1, 2):
                    pts, w = grids[k]
                    entries = expect(pts, w, lambda p: np.stack(
                        [(p[:, i] - mean[i]) * (p[:, j] - mean[j])
                         for i in range(n) for j in range(n)], axis=-1))
                    covs.append(np.linalg.eigvalsh(entries.reshape(n, n))[-1])
                c, f = float(covs[0]), float(covs[1])
                cov = f
            elif req == "first_abs":
                c, f = [expect(*grids[k], lambda p: np.linalg.norm(p - mean, axis=-1))
                        for k in (1, 2)]
            elif req == "grad_F_l1":
                c, f = [expect(*grids[k], lambda p: np.linalg.norm(gradF(p), axis=-1))
                        for k in (1, 2)]
            elif req == "grad_F_l2sq":
                c, f = [expect(*grids[k], lambda p: np.sum(gradF(p) ** 2, axis=-1))
                        for k in (1, 2)]
            elif req == "generator_plus":
                raise DimensionMismatch("generator moments are 1D-only")
            else:
                raise ValueError(f"unknown moment tag {req!r}")
            record(key, c, f)
        else:
            tag, coeff = req
            if tag == "gen":
                raise DimensionMismatch("generator moments are 1D-only")
            if tag == "sF":
                shift = lambda p: coeff * np.asarray(F(p), dtype=float)
                base = log_muf
            elif tag == "grad2":
                shift = lambda p: coeff * np.sum(gradF(p) ** 2, axis=-1)
                base = log_muf
            elif tag == "negF":
                base = lambda p: -np.asarray(V(p), dtype=float)
                shift = lambda p: -coeff * np.asarray(F(p), dtype=float)
            else:
                raise ValueError(f"unknown exponential-moment tag {tag!r}")
            try:
                # divergence check along axes and the diagonal
                for d in [np.eye(n)[i] for i in range(n)] + [np.ones(n)]:
                    scan = axis_scan(d)
                    gscan = lambda t: scan(t) + shift(
                        np.multiply.outer(np.atleast_1d(t),
                                          np.asarray(d, float) / np.linalg.norm(d)))
                    _auto_side(gscan, +1.0, spec.truncation_tol)
                    _auto_side(gscan, -1.0, spec.truncation_tol)
            except MomentDiverges:
                diverged.add(key)
                continue
            out = []
            for k in (1, 2):
                pts, w = grids[k]
                num_log = base(pts) + shift(pts)
                m = float(np.max(num_log))
                num = m + math.log(float(np.sum(w * np.exp(num_log - m))))
                bv = base(pts)
                mb = float(np.max(bv))
                den = mb + math.log(float(np.sum(w * np.exp(bv - mb))))
                out.append(num - den)
            record(key, out[0], out[1], log_scale=True)

    second = values.get("second")
    exp_moments = {(r[0], float(r[1])): values[_tag_key(r)]
                   for r in requests
                   if not isinstance(r, str) and _tag_key(r) in values}
    return MomentSet(
        mean=mean,
        first_abs=values.get("first_abs"),
        second=second,
        sigma2=values.get("sigma2"),
        grad_F_l1=values.get("grad_F_l1"),
        grad_F_l2sq=values.get("grad_F_l2sq"),
        exp_moments=exp_moments,
        self_check=checks,
        diverged=frozenset(diverged),
    )


def _product_moments(model, pert, requests, spec):
    comps = model.components
    if pert.coordinates:
        if len(pert.coordinates) != len(comps):
            raise DimensionMismatch("separable perturbation arity mismatch")
        pairs = list(zip(comps, pert.coordinates))
    elif pert.label == "zero":
        pairs = [(c, zero_perturbation()) for c in comps]
    else:
        raise DimensionMismatch(
            "product models need a separable (or zero) perturbation"
        )

    allowed = {"second", "sigma2"}
    exp_ok = {"sF", "grad2", "gen", "negF"}
    per = []
    sub_requests = ["second"]
    for req in requests:
        if isinstance(req, str):
            if req not in allowed:
                raise DimensionMismatch(f"tag {req!r} is not additive over products")
        else:
            if req[0] not in exp_ok:
                raise ValueError(f"unknown exponential-moment tag {req[0]!r}")
            sub_requests.append(req)
    for m1, p1 in pairs:
        per.append(_moments_1d(m1, p1, sub_requests, spec))

    variances = [ms.second for ms in per]
    exp_moments = {}
    diverged = set()
    for req in requests:
        if not isinstance(req, str):
            key = (req[0], float(req[1]))
            if any(_tag_key(req) in ms.diverged for ms in per):
                diverged.add(_tag_key(req))
                continue
            vals = [ms.exp_log(req[0], float(req[1])) for ms in per]
            if any(v is None for v in vals):
                diverged.add(_tag_key(req))
                continue
            exp_moments[key] = float(sum(vals))

    checks = {}
    for ms in per:
        for k, v in ms.self_check.items():
            checks[k] = max(checks.get(k, 0.0), v)

    return MomentSet(
        mean=None,
        second=float(sum(variances)),
        sigma2=float(max(variances)),
        exp_moments=exp_moments,
        self_check=checks,
        diverged=frozenset(diverged),
    )


# --------------------------------------------------------------------------
# log-density evaluation
# --------------------------------------------------------------------------


def evaluate_log_density(model: MeasureModel, x) -> float:
    """Unnormalized log-density ``-V(x)``; ``-inf`` outside the support."""
    arr = np.asarray(x, dtype=float)
    if model.dimension == 1:
        if arr.ndim > 0 and arr.size != 1:
            raise DimensionMismatch(f"expected a scalar point, got shape {arr.shape}")
        v = float(model.potential(float(arr)))
    else:
        if arr.shape != (model.dimension,):
            raise DimensionMismatch(
                f"expected shape ({model.dimension},), got {arr.shape}"
            )
        v = float(model.potential(arr))
    return -v
