"""Calculators turning certified constants and moments into explicit bounds.

Each calculator consumes certified inputs (known constants, Lipschitz or
oscillation data, quadrature moments) and emits a :class:`BoundResult`: the
bound value, an applicability verdict with the hypothesis margins, and the
free parameters chosen by a deterministic optimizer.  Free parameters are
always minimized over; closed forms are used where derivable (the
``(1+1/eps)/(1-c(1+eps))`` family has ``eps* = 1/sqrt(c) - 1``), otherwise
golden-section or grid search.  Boundary limits (eps -> inf and friends)
are explicit limit branches, never large finite surrogates.

A calculator never fabricates a missing input: unknown metadata produces a
not-applicable verdict, and no value is ever emitted alongside one.  A few
results depend on universal constants the literature leaves untraced
(Barthe-Klartag type product bounds, the sparse-regression gates); those
default to 1.0 and every consuming result lists them in ``untraced``.

For reference only (never asserted by any calculator): conjectured
Kannan-Lovasz-Simonovits style envelopes ``C n^{1/2} sigma^2`` and
``e^{C sqrt(ln n ln(1+ln n))} sigma^2`` are available through
:func:`kls_reference`.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gamma as gamma_fn

from .measures import MomentSet

__all__ = [
    "BoundResult",
    "ParamSearch",
    "golden_section",
    "minimize_box",
    "optimized_prefactor",
    "bound_holley_stroock",
    "bound_lipschitz_poincare",
    "bound_lipschitz_cheeger",
    "bound_generator_poincare",
    "bound_entropy_poincare",
    "bound_logsob",
    "bound_mollified",
    "relate_cheeger_poincare",
    "weak_to_strong",
    "bound_logconcave_perturbation",
    "bound_concentration_transfer",
    "concentration_transfer_objective",
    "concentration_profile_decay",
    "transferred_profile_inverse",
    "bound_brascamp_lieb_perturbed",
    "bound_from_moments",
    "bound_subbotin",
    "subbotin_sp_constants",
    "bound_gaussian_perturbation_forward",
    "kls_reference",
]

LN2 = math.log(2.0)
_SLACK = 1e-9


@dataclass(frozen=True)
class BoundResult:
    """Outcome of one calculator.

    ``value`` is present exactly when ``applicable``.  Margins record each
    strict hypothesis as a pair ``name`` / ``name_cap`` so the strictness is
    auditable.  ``provenance`` lists every calculator that fed this result
    (composition is explicit); ``untraced`` names universal constants whose
    numeric value is a configuration default rather than a traced bound.
    """

    theorem_id: str
    applicable: bool
    value: Optional[float] = None
    hypothesis_margins: dict = field(default_factory=dict)
    chosen_params: dict = field(default_factory=dict)
    provenance: tuple = ()
    reason: Optional[str] = None
    missing: tuple = ()
    untraced: tuple = ()
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.applicable and self.value is None:
            raise ValueError("applicable results must carry a value")
        if not self.applicable and self.value is not None:
            raise ValueError("no value may be emitted alongside applicable=False")
        if self.value is not None and self.value < 0:
            raise ValueError("bound values are nonnegative")

    def to_record(self) -> dict:
        """Flat record for CSV/JSON emitters."""
        rec = {
            "theorem_id": self.theorem_id,
            "applicable": self.applicable,
            "value": self.value,
            "reason": self.reason or "",
            "untraced": ";".join(self.untraced),
            "provenance": ";".join(self.provenance),
        }
        for k, v in sorted(self.chosen_params.items()):
            rec[f"param_{k}"] = v
        for k, v in sorted(self.hypothesis_margins.items()):
            rec[f"margin_{k}"] = v
        for k, v in sorted(self.extras.items()):
            rec[f"extra_{k}"] = v
        return rec


def _refused(theorem_id, reason, missing=(), margins=None, provenance=()):
    return BoundResult(
        theorem_id=theorem_id,
        applicable=False,
        reason=reason,
        missing=tuple(missing),
        hypothesis_margins=margins or {},
        provenance=tuple(provenance),
    )


# --------------------------------------------------------------------------
# deterministic optimization
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamSearch:
    """Deterministic search settings for the free theorem parameters."""

    strategy: str = "golden_section"  # or "closed_form", "grid"
    grid_resolution: int = 129
    slack: float = _SLACK
    rel_tol: float = 1e-6
    max_iter: int = 200
    cycles: int = 12


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(fn: Callable[[float], float], lo: float, hi: float,
                   rel_tol: float = 1e-6, max_iter: int = 200):
    """Minimize a 1D function on [lo, hi]; returns (x*, f(x*)).

    Assumes unimodality on the bracket; callers that cannot guarantee it
    should pre-scan with a grid (see :func:`minimize_box`).
    """
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if b - a <= rel_tol * max(1.0, abs(a) + abs(b)):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = fn(d)
    x = c if fc < fd else d
    return x, min(fc, fd)


def minimize_box(fn, boxes: Sequence, search: Optional[ParamSearch] = None):
    """Cyclic coordinate descent with per-axis golden section on a box.

    ``boxes`` is a sequence of (lo, hi) pairs; each axis is pre-scanned on a
    coarse grid to pick the unimodal bracket (grid fallback), then refined by
    golden section.  The objective may return +inf at jointly infeasible
    points; boxes themselves are shrunk by the strict-inequality slack so
    the search never evaluates outside them.  Fully deterministic.
    """
    search = search or ParamSearch()
    boxes = [(lo + search.slack, hi - search.slack) for lo, hi in boxes]
    if any(hi <= lo for lo, hi in boxes):
        return None, math.inf
    x = np.array([0.5 * (lo + hi) for lo, hi in boxes])

    def axis_min(i, xi_lo, xi_hi):
        def f1(t):
            y = x.copy()
            y[i] = t
            return fn(y)

        grid = np.linspace(xi_lo, xi_hi, search.grid_resolution)
        vals = np.array([f1(t) for t in grid])
        k = int(np.argmin(vals))
        lo_b = grid[max(k - 1, 0)]
        hi_b = grid[min(k + 1, grid.size - 1)]
        t, v = golden_section(f1, lo_b, hi_b, search.rel_tol, search.max_iter)
        if vals[k] < v:
            return grid[k], vals[k]
        return t, v

    best = fn(x)
    for _ in range(search.cycles):
        moved = 0.0
        for i, (lo, hi) in enumerate(boxes):
            t, v = axis_min(i, lo, hi)
            if v < best - 1e-15:
                moved = max(moved, abs(t - x[i]))
                x[i] = t
                best = v
        if moved <= search.rel_tol:
            break
    if not math.isfinite(best):
        return None, math.inf
    return x, best


def optimized_prefactor(c: float):
    """Minimize ``(1 + 1/eps) / (1 - c (1 + eps))`` over eps > 0.

    Feasible iff c < 1; the closed-form optimum is ``eps* = 1/sqrt(c) - 1``
    with value ``1 / (1 - sqrt(c))^2``.  At c = 0 the infimum is the
    eps -> inf limit, value 1.  Returns (value, eps_star, s_at_optimum).
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    if c >= 1.0:
        return None
    if c == 0.0:
        return 1.0, math.inf, 0.0
    rc = math.sqrt(c)
    return 1.0 / (1.0 - rc) ** 2, 1.0 / rc - 1.0, rc


# --------------------------------------------------------------------------
# bounded and Lipschitz perturbations
# --------------------------------------------------------------------------


def bound_holley_stroock(constant: float, oscillation: Optional[float],
                         which: str = "poincare") -> BoundResult:
    """Oscillation transfer: the constant inflates by at most e^{Osc F}."""
    tid = "holley_stroock"
    if oscillation is None:
        return _refused(tid, "oscillation unknown", missing=("oscillation",))
    if not math.isfinite(oscillation):
        return _refused(tid, "oscillation infinite",
                        margins={"osc": oscillation, "osc_cap": math.inf})
    return BoundResult(
        theorem_id=tid,
        applicable=True,
        value=math.exp(oscillation) * constant,
        hypothesis_margins={"osc": oscillation},
        chosen_params={},
        provenance=(tid,),
        extras={"which": 0.0 if which == "poincare" else 1.0},
    )


def bound_lipschitz_poincare(C_P_mu: float, L: float,
                             search: Optional[ParamSearch] = None) -> BoundResult:
    """Poincare transfer for an L-Lipschitz perturbation.

    Needs ``s = (1+eps) C_P L^2 / 4 < 1`` for some eps > 0, i.e.
    ``C_P L^2 < 4``; emits ``inf_eps (1+1/eps) C_P / (1-s)`` with the
    closed-form minimizer.
    """
    tid = "lipschitz_poincare"
    if C_P_mu < 0 or L < 0:
        raise ValueError("inputs must be nonnegative")
    if not (math.isfinite(L) and math.isfinite(C_P_mu)):
        return _refused(tid, "non-finite input",
                        margins={"s0": math.inf, "s_cap": 1.0})
    c = 0.25 * C_P_mu * L**2
    if c >= 1.0:
        return _refused(tid, "C_P L^2 >= 4: no feasible eps",
                        margins={"s0": c, "s_cap": 1.0})
    value, eps, s = optimized_prefactor(c)
    return BoundResult(
        theorem_id=tid,
        applicable=True,
        value=value * C_P_mu,
        hypothesis_margins={"s": s, "s_cap": 1.0},
        chosen_params={"eps": eps},
        provenance=(tid,),
    )


def bound_lipschitz_cheeger(C_C_mu: float, L: float) -> BoundResult:
    """Cheeger transfer: C'_C(mu_F) <= C_C / (1 - C_C L) when C_C L < 1."""
    tid = "lipschitz_cheeger"
    if C_C_mu < 0 or L < 0:
        raise ValueError("inputs must be nonnegative")
    s = C_C_mu * L
    if s >= 1.0:
        return _refused(tid, "C_C L >= 1", margins={"s": s, "s_cap": 1.0})
    return BoundResult(
        theorem_id=tid,
        applicable=True,
        value=C_C_mu / (1.0 - s),
        hypothesis_margins={"s": s, "s_cap": 1.0},
        provenance=(tid,),
    )


def bound_generator_poincare(C_P_mu: float, G_plus_sup: float,
                             boundary_ok: bool = True) -> BoundResult:
    """Generator-condition transfer for C^2 perturbations.

    ``G_plus_sup`` is the caller-certified ``sup (AF - |grad F|^2/2)_+``.
    Applicable at the largest ``eps = 1 - C_P G_sup / 2 > 0``; when the
    support is restricted, the caller must also certify the outward normal
    derivative condition through ``boundary_ok``.
    """
    tid = "generator_poincare"
    if C_P_mu < 0 or G_plus_sup < 0:
        raise ValueError("inputs must be nonnegative")
    if not boundary_ok:
        return _refused(tid, "normal derivative condition fails on the boundary")
    eps = 1.0 - 0.5 * C_P_mu * G_plus_sup
    if eps <= 0.0:
        return _refused(tid, "C_P sup(AF - |grad F|^2/2)_+ >= 2",
                        margins={"eps": eps, "eps_floor": 0.0})
    return BoundResult(
        theorem_id=tid,
        applicable=True,
        value=C_P_mu / eps,
        hypothesis_margins={"eps": eps, "eps_floor": 0.0},
        chosen_params={"eps": eps},
        provenance=(tid,),
    )


# --------------------------------------------------------------------------
# entropy-method Poincare (exponential-moment route)
# --------------------------------------------------------------------------


def bound_entropy_poincare(C_P_mu: float, C_LS_mu: float, moments: MomentSet,
                           variant: str = "i",
                           search: Optional[ParamSearch] = None) -> BoundResult:
    """Poincare transfer through entropy and exponential moments.

    Variant "i" consumes ``ln mu_F(e^{a |grad F|^2})`` (coefficients a and
    t), ``ln mu_F(e^{s F})`` and ``ln mu(e^{-F})``; variant "ii" the
    generator analogues.  The exponential moments exist only at the
    coefficients stored in ``moments``, so (s, t, alpha) range over those,
    while theta and eps are optimized continuously inside the feasible box
    ``{D < 1, T' < 1}``.
    """
    tid = f"entropy_poincare_{variant}"
    search = search or ParamSearch()
    grad_tag = "grad2" if variant == "i" else "gen"
    missing = []
    s_coeffs = [s for s in moments.coefficients("sF") if s > 0]
    t_coeffs = [t for t in moments.coefficients(grad_tag) if t > 0]
    ln_mu_negF = moments.exp_log("negF", 1.0)
    if not s_coeffs:
        missing.append("exp_sF")
    if not t_coeffs:
        missing.append("exp_grad2" if variant == "i" else "exp_gen")
    if ln_mu_negF is None:
        missing.append("exp_negF")
    if missing:
        return _refused(tid, "missing exponential moments: " + ",".join(missing),
                        missing=tuple(missing))

    best = None
    for s in s_coeffs:
        if s <= 1.0:
            continue  # D = 1/s + ... < 1 needs s > 1
        ln_sF = moments.exp_log("sF", s)
        for t in t_coeffs:
            ln_t = moments.exp_log(grad_tag, t)
            for a in t_coeffs:
                ln_a = moments.exp_log(grad_tag, a)
                cand = _entropy_inner(
                    variant, C_P_mu, C_LS_mu, s, t, a,
                    ln_sF, ln_t, ln_a, ln_mu_negF, search,
                )
                if cand is not None and (best is None or cand[0] < best[0]):
                    best = cand
    if best is None:
        return _refused(tid, "feasible box empty for the supplied coefficients")
    value, params, margins = best
    return BoundResult(
        theorem_id=tid,
        applicable=True,
        value=value,
        hypothesis_margins=margins,
        chosen_params=params,
        provenance=(tid,),
    )


def _entropy_inner(variant, C_P, C_LS, s, t, a, ln_sF, ln_t, ln_a, ln_negF, search):
    """Optimize (theta, eps) (variant i) or check (variant ii) at fixed coefficients."""
    if variant == "ii":
        D = 1.0 / s + C_LS / t
        if D >= 1.0 - _SLACK:
            return None
        T2 = ln_a + (1.0 / (1.0 - D)) * (
            ln_sF / s + ln_negF + (C_LS / t) * ln_t
        )
        Tp = C_P / (2.0 * a) * T2
        if Tp >= 1.0 - _SLACK:
            return None
        value = (1.0 / (1.0 - Tp)) * C_P * (1.0 + C_LS / a)
        return value, {"s": s, "t": t, "alpha": a}, {
            "D2": D, "D2_cap": 1.0, "Tprime": Tp, "Tprime_cap": 1.0}

    # variant i: theta capped by D_1 < 1, eps capped by T'_1 < 1
    theta_cap = (4.0 * t / C_LS) * (1.0 - 1.0 / s) - 1.0
    if theta_cap <= _SLACK:
        return None

    def at(theta, eps):
        D = 1.0 / s + (1.0 + theta) * C_LS / (4.0 * t)
        if D >= 1.0 - _SLACK:
            return math.inf, None
        T1 = ln_a + (1.0 / (1.0 - D)) * (
            ln_sF / s + ln_negF + ((1.0 + theta) * C_LS / (4.0 * t)) * ln_t
        )
        Tp = (1.0 + eps) * C_P / (4.0 * a) * T1
        if Tp >= 1.0 - _SLACK:
            return math.inf, None
        value = (1.0 / (1.0 - Tp)) * C_P * (
            (1.0 + 1.0 / eps) + (1.0 + 1.0 / theta) * (1.0 + eps) * C_LS / (4.0 * a)
        )
        return value, (D, Tp)

    res = minimize_box(
        lambda v: at(v[0], math.exp(v[1]))[0],
        [(_SLACK, theta_cap), (math.log(1e-6), math.log(1e6))],
        search,
    )
    if res[0] is None:
        return None
    theta, eps = res[0][0], math.exp(res[0][1])
    value, (D, Tp) = at(theta, eps)
    return value, {"s": s, "t": t, "alpha": a, "theta": theta, "eps": eps}, {
        "D1": D, "D1_cap": 1.0, "Tprime": Tp, "Tprime_cap": 1.0}


# --------------------------------------------------------------------------
# log-Sobolev transfers
# --------------------------------------------------------------------------


def _resolve(bound_or_value, provenance):
    """Accept either a float or an upstream BoundResult as a constant input."""
    if isinstance(bound_or_value, BoundResult):
        if not bound_or_value.applicable:
            return None, provenance
        return bound_or_value.value, provenance + bound_or_value.provenance
    return float(bound_or_value), provenance


def bound_logsob(C_LS_mu: float, C_P_mu_F, inputs: Optional[dict] = None,
                 variant: str = "bounded_above",
                 search: Optional[ParamSearch] = None) -> BoundResult:
    """Log-Sobolev transfer, four routes.

    ``C_P_mu_F`` may itself be a BoundResult (composition is recorded in the
    provenance).  All variants assume the normalization ``mu(e^{-F}) = 1``.

    * ``bounded_above``: needs ``L`` and ``M = sup F``.
    * ``herbst``: needs ``L`` and ``mean_F = mu(F)``.
    * ``integrability``: needs log moments ``("sF", alpha)`` (alpha > 1) and
      ``("grad2", beta)`` from ``inputs["moments"]`` with
      ``delta = C_LS (1+theta)/(4 beta) + 1/alpha < 1``.
    * ``generator``: same with ``("gen", beta)`` and
      ``delta = C_LS/(2 beta) + 1/alpha < 1``.
    """
    tid = f"logsob_{variant}"
    inputs = inputs or {}
    search = search or ParamSearch()
    prov = (tid,)
    cpf, prov = _resolve(C_P_mu_F, prov)
    if cpf is None:
        return _refused(tid, "upstream Poincare bound not applicable", provenance=prov)

    if variant == "bounded_above":
        L, M = inputs.get("L"), inputs.get("M")
        if L is None or M is None:
            return _refused(tid, "needs L and M = sup F",
                            missing=tuple(k for k in ("L", "M") if inputs.get(k) is None))
        cL2 = cpf * L**2 * C_LS_mu / 4.0
        tail = cpf * (M + 2.0)
        if cL2 == 0.0:
            theta, value = math.inf, C_LS_mu + tail
        else:
            theta = math.sqrt(C_LS_mu / cL2)
            value = (1.0 + 1.0 / theta) * C_LS_mu + cL2 * (1.0 + theta) + tail
        return BoundResult(tid, True, value, {"M": M},
                           {"theta": theta}, prov)

    if variant == "herbst":
        L, mean_F = inputs.get("L"), inputs.get("mean_F")
        if L is None or mean_F is None:
            return _refused(tid, "needs L and mean_F = mu(F)",
                            missing=tuple(k for k in ("L", "mean_F") if inputs.get(k) is None))
        base = cpf * (2.0 + mean_F)

        def obj(v):
            beta, theta = math.exp(v[0]), math.exp(v[1])
            return ((beta + 1.0) * (1.0 + 1.0 / theta) / beta * C_LS_mu + base
                    + L**2 * cpf * C_LS_mu
                    * ((1.0 + theta) * (1.0 + beta) / (4.0 * beta) + beta**2 / 2.0))

        if L == 0.0:
            # beta, theta -> inf limit
            return BoundResult(tid, True, C_LS_mu + base, {},
                               {"beta": math.inf, "theta": math.inf}, prov)
        x, val = minimize_box(obj, [(math.log(1e-4), math.log(1e4))] * 2, search)
        if x is None:
            return _refused(tid, "optimizer found no finite point", provenance=prov)
        return BoundResult(tid, True, val, {},
                           {"beta": math.exp(x[0]), "theta": math.exp(x[1])}, prov)

    moments = inputs.get("moments")
    if moments is None:
        return _refused(tid, "needs a MomentSet in inputs['moments']",
                        missing=("moments",))
    alphas = [a for a in moments.coefficients("sF") if a > 1.0]
    tag = "grad2" if variant == "integrability" else "gen"
    betas = [b for b in moments.coefficients(tag) if b > 0]
    if not alphas or not betas:
        miss = [n for n, ok in (("exp_sF_alpha_gt1", alphas), (f"exp_{tag}", betas)) if not ok]
        return _refused(tid, "missing exponential moments: " + ",".join(miss),
                        missing=tuple(miss))

    best = None
    for a in alphas:
        ln_aF = moments.exp_log("sF", a)
        for b in betas:
            ln_b = moments.exp_log(tag, b)
            if variant == "integrability":
                theta_cap = (4.0 * b / C_LS_mu) * (1.0 - 1.0 / a) - 1.0
                if theta_cap <= _SLACK:
                    continue

                def obj(v, a=a, b=b, ln_aF=ln_aF, ln_b=ln_b):
                    theta = v[0]
                    delta = C_LS_mu * (1.0 + theta) / (4.0 * b) + 1.0 / a
                    if delta >= 1.0 - _SLACK:
                        return math.inf
                    return (1.0 / (1.0 - delta)) * (
                        C_LS_mu * (1.0 + 1.0 / theta)
                        + cpf * (2.0 + C_LS_mu * (1.0 + theta) / (4.0 * b) * ln_b
                                 + ln_aF / a))

                x, val = minimize_box(obj, [(_SLACK, theta_cap)], search)
                if x is None:
                    continue
                theta = float(x[0])
                delta = C_LS_mu * (1.0 + theta) / (4.0 * b) + 1.0 / a
                params = {"alpha": a, "beta": b, "theta": theta}
            else:
                delta = C_LS_mu / (2.0 * b) + 1.0 / a
                if delta >= 1.0 - _SLACK:
                    continue
                val = (1.0 / (1.0 - delta)) * (
                    C_LS_mu + cpf * (2.0 + C_LS_mu / (2.0 * b) * ln_b + ln_aF / a))
                params = {"alpha": a, "beta": b}
            if best is None or val < best[0]:
                best = (val, params, delta)
    if best is None:
        return _refused(tid, "delta < 1 infeasible at the supplied coefficients")
    val, params, delta = best
    return BoundResult(tid, True, val, {"delta": delta, "delta_cap": 1.0},
                       params, prov)


# --------------------------------------------------------------------------
# mollified measures
# --------------------------------------------------------------------------


def bound_mollified(R: float, sigma: float = 1.0, variant: str = "gaussian_poincare",
                    K: Optional[float] = None, C_P_mu: Optional[float] = None,
                    search: Optional[ParamSearch] = None) -> BoundResult:
    """Bounds for compactly supported measures mollified by convolution.

    ``gaussian_poincare``: support radius R, Gaussian window sigma; needs
    R < 2 sigma and gives ``sigma^2 / (1 - R/(2 sigma))^2`` at the
    closed-form eps.  ``gaussian_logsob`` is the companion log-Sobolev
    display minimized over (theta, beta, eps).  ``general_hessian`` replaces
    the Gaussian by a window with ``sup |Hess| = K`` and Poincare constant
    C_P_mu; ``scaled`` additionally dilates that window by sigma.
    """
    search = search or ParamSearch()
    if R < 0 or sigma <= 0:
        raise ValueError("need R >= 0 and sigma > 0")
    if variant == "gaussian_poincare":
        tid = "mollified_gaussian_poincare"
        c = R**2 / (4.0 * sigma**2)
        if c >= 1.0:
            return _refused(tid, "needs R < 2 sigma", margins={"s0": c, "s_cap": 1.0})
        pref, eps, s = optimized_prefactor(c)
        return BoundResult(tid, True, pref * sigma**2,
                           {"s": s, "s_cap": 1.0}, {"eps": eps}, (tid,))

    if variant == "gaussian_logsob":
        tid = "mollified_gaussian_logsob"
        c = R**2 / (4.0 * sigma**2)
        if c >= 1.0:
            return _refused(tid, "needs R < 2 sigma", margins={"s0": c, "s_cap": 1.0})
        if R == 0.0:
            value = 7.0 * sigma**2  # theta, beta, eps -> inf limits
            return BoundResult(tid, True, value, {},
                               {"theta": math.inf, "beta": math.inf, "eps": math.inf},
                               (tid,))

        def obj(v):
            theta, beta, eps = (math.exp(u) for u in v)
            s = (1.0 + eps) * c
            if s >= 1.0 - _SLACK:
                return math.inf
            pre = (1.0 + 1.0 / eps) / (1.0 - s)
            a = 2.0 * (beta + 1.0) * (1.0 + 1.0 / theta) / beta + 5.0 * pre
            b = 2.0 * pre * ((1.0 + theta) * (1.0 + beta) / (4.0 * beta) + beta**2 / 2.0)
            return a * sigma**2 + b * R**2

        lo, hi = math.log(1e-5), math.log(1e5)
        x, val = minimize_box(obj, [(lo, hi)] * 3, search)
        if x is None:
            return _refused(tid, "optimizer found no finite point")
        theta, beta, eps = (math.exp(u) for u in x)
        return BoundResult(tid, True, val,
                           {"s": (1.0 + eps) * c, "s_cap": 1.0},
                           {"theta": theta, "beta": beta, "eps": eps}, (tid,))

    if variant in ("general_hessian", "scaled"):
        tid = f"mollified_{variant}"
        if K is None or C_P_mu is None:
            return _refused(tid, "needs K = sup |Hess H| and C_P of the window",
                            missing=tuple(k for k, v in (("K", K), ("C_P_mu", C_P_mu)) if v is None))
        scale = sigma**2 if variant == "scaled" else 1.0
        c = K**2 * R**2 * C_P_mu / (4.0 * scale)
        if c >= 1.0:
            return _refused(tid, "contraction condition fails",
                            margins={"s0": c, "s_cap": 1.0})
        pref, eps, s = optimized_prefactor(c)
        return BoundResult(tid, True, pref * C_P_mu * scale,
                           {"s": s, "s_cap": 1.0}, {"eps": eps}, (tid,))

    raise ValueError(f"unknown variant {variant!r}")


# --------------------------------------------------------------------------
# Cheeger / Poincare relations and weak-to-strong
# --------------------------------------------------------------------------


def relate_cheeger_poincare(C_C: Optional[float] = None,
                            C_C_median: Optional[float] = None,
                            C_P: Optional[float] = None,
                            log_concave: bool = False):
    """All constants derivable from one of C_C, C'_C, C_P.

    Always valid: ``C_P <= 4 (C'_C)^2 <= 4 C_C^2`` and
    ``C_C/2 <= C'_C <= C_C``.  The converse ``C_C <= (16/pi) sqrt(C_P)``
    needs log-concavity and is refused without the flag.
    """
    out = []
    if C_C_median is not None:
        out.append(BoundResult("poincare_from_median_cheeger", True,
                               4.0 * C_C_median**2, {}, {},
                               ("poincare_from_median_cheeger",)))
        out.append(BoundResult("mean_from_median_cheeger", True,
                               2.0 * C_C_median, {}, {},
                               ("mean_from_median_cheeger",)))
    if C_C is not None:
        out.append(BoundResult("poincare_from_mean_cheeger", True,
                               4.0 * C_C**2, {}, {}, ("poincare_from_mean_cheeger",)))
        out.append(BoundResult("median_from_mean_cheeger", True,
                               C_C, {}, {}, ("median_from_mean_cheeger",)))
    if C_P is not None:
        tid = "cheeger_from_poincare"
        if log_concave:
            v = (16.0 / math.pi) * math.sqrt(C_P)
            out.append(BoundResult(tid, True, v, {}, {}, (tid,),
                                   extras={"also_bounds_median_constant": 1.0}))
        else:
            out.append(_refused(tid, "converse direction requires log-concavity"))
    if not out:
        raise ValueError("supply at least one of C_C, C_C_median, C_P")
    return out


def weak_to_strong(beta_s: float, s: float, variant: str = "l1") -> BoundResult:
    """Weak inequality (with an oscillation leak s) to a full Cheeger bound.

    ``l1``: needs 0 <= s < 1/2, gives ``4 beta / (pi (1/2 - s)^2)``.
    ``l2``: needs 0 <= s < 1/6, gives ``4 sqrt(beta ln 2) / (1 - 6 s)``.
    Extras carry the induced ``C_P <= 4 (C'_C)^2``.  The target measure must
    be log-concave (caller-certified).
    """
    tid = f"weak_to_strong_{variant}"
    if beta_s < 0 or s < 0:
        raise ValueError("inputs must be nonnegative")
    cap = 0.5 if variant == "l1" else 1.0 / 6.0
    if s >= cap:
        return _refused(tid, f"s must be below {cap}", margins={"s": s, "s_cap": cap})
    if variant == "l1":
        v = 4.0 * beta_s / (math.pi * (0.5 - s) ** 2)
    elif variant == "l2":
        v = 4.0 * math.sqrt(beta_s * LN2) / (1.0 - 6.0 * s)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return BoundResult(tid, True, v, {"s": s, "s_cap": cap}, {}, (tid,),
                       extras={"poincare_upper": 4.0 * v**2})


# --------------------------------------------------------------------------
# log-concave perturbation family
# --------------------------------------------------------------------------


def bound_logconcave_perturbation(C_mu: float, moments: MomentSet,
                                  variant: str = "l2",
                                  log_concave_muF: bool = False,
                                  C_C_mu: Optional[float] = None,
                                  search: Optional[ParamSearch] = None) -> BoundResult:
    """Perturbation bounds that trade sup-norm control for moment control,
    available when the perturbed measure is log-concave.

    * ``perths``: value is the C'_C bound ``(32/pi) M sqrt(C_P)`` with
      ``M = mu^{1/2}(e^{-2F})/mu(e^{-F})`` from the moment set; extras carry
      the squared Poincare form ``(4*32^2/pi^2) M^2 C_P``.
    * ``l2``: needs ``s = (1+eps) C_P mu_F(|grad F|^2)/4 < 1/6``; value
      ``inf_eps 64 ln2 (1+1/eps) C_P / (1-6s)^2`` (closed-form eps).
    * ``cheeger``: needs ``s = C_C mu_F(|grad F|) < 1/2`` (pass C_C_mu);
      value ``16 C_C / (pi (1-2s)^2)`` bounding C'_C(mu_F), with the induced
      ``C_P <= 4 value^2`` in extras.
    * ``generator``: needs ``s = C_P mu_F([AF - |grad F|^2/2]_+) < 1/3``;
      value ``64 ln2 C_P / (1-3s)^2``.
    """
    if not log_concave_muF:
        return _refused(f"logconcave_{variant}",
                        "perturbed measure not certified log-concave")

    if variant == "perths":
        tid = "logconcave_moment_ratio"
        M = moments.m_ratio()
        if M is None:
            return _refused(tid, "missing negF exponential moments",
                            missing=("exp_negF_1", "exp_negF_2"))
        v = (32.0 / math.pi) * M * math.sqrt(C_mu)
        return BoundResult(tid, True, v, {"M_ratio": M}, {}, (tid,),
                           extras={"poincare_upper":
                                   (4.0 * 32.0**2 / math.pi**2) * M**2 * C_mu})

    if variant == "l2":
        tid = "logconcave_grad2"
        g2 = moments.grad_F_l2sq
        if g2 is None:
            return _refused(tid, "missing mu_F(|grad F|^2)", missing=("grad_F_l2sq",))
        c0 = 0.25 * C_mu * g2  # s = (1+eps) c0, needs s < 1/6
        if 6.0 * c0 >= 1.0:
            return _refused(tid, "s >= 1/6 for every eps",
                            margins={"s0": c0, "s_cap": 1.0 / 6.0})
        if c0 == 0.0:
            return BoundResult(tid, True, 64.0 * LN2 * C_mu,
                               {"s": 0.0, "s_cap": 1.0 / 6.0},
                               {"eps": math.inf}, (tid,))
        # minimize (1+1/eps)/(1-6 c0 (1+eps))^2: with a = 6 c0 the optimal
        # u = 1 + eps solves 2 a u^2 - a u - 1 = 0
        a = 6.0 * c0
        u = (1.0 + math.sqrt(1.0 + 8.0 / a)) / 4.0
        eps = u - 1.0
        s = c0 * u
        value = 64.0 * LN2 * (1.0 + 1.0 / eps) * C_mu / (1.0 - 6.0 * s) ** 2
        return BoundResult(tid, True, value,
                           {"s": s, "s_cap": 1.0 / 6.0}, {"eps": eps}, (tid,))

    if variant == "cheeger":
        tid = "logconcave_grad1_cheeger"
        g1 = moments.grad_F_l1
        if g1 is None:
            return _refused(tid, "missing mu_F(|grad F|)", missing=("grad_F_l1",))
        if C_C_mu is None:
            return _refused(tid, "needs the mean Cheeger constant C_C_mu",
                            missing=("C_C_mu",))
        s = C_C_mu * g1
        if s >= 0.5:
            return _refused(tid, "s >= 1/2", margins={"s": s, "s_cap": 0.5})
        v = 16.0 * C_C_mu / (math.pi * (1.0 - 2.0 * s) ** 2)
        return BoundResult(tid, True, v, {"s": s, "s_cap": 0.5}, {}, (tid,),
                           extras={"poincare_upper": 4.0 * v**2})

    if variant == "generator":
        tid = "logconcave_generator"
        gp = moments.generator_plus
        if gp is None:
            return _refused(tid, "missing mu_F([AF - |grad F|^2/2]_+)",
                            missing=("generator_plus",))
        s = C_mu * gp
        if s >= 1.0 / 3.0:
            return _refused(tid, "s >= 1/3", margins={"s": s, "s_cap": 1.0 / 3.0})
        v = 64.0 * LN2 * C_mu / (1.0 - 3.0 * s) ** 2
        return BoundResult(tid, True, v, {"s": s, "s_cap": 1.0 / 3.0}, {}, (tid,))

    raise ValueError(f"unknown variant {variant!r}")


# --------------------------------------------------------------------------
# concentration-profile transfer
# --------------------------------------------------------------------------

CONCENTRATION_CAP = (64.0 * math.sqrt(2.0) / math.pi) ** 2
# composing the traced pieces (profile decay 16 e^{-r/sqrt(2 C_P)}, transfer
# 2 M alpha^{1/2}(r/2), profile-to-Cheeger, C_P <= 4 C_C'^2) actually yields
# the larger prefactor below; the headline display uses the cap above
TRACED_CONCENTRATION_PREFACTOR = 4.0 * CONCENTRATION_CAP


def concentration_profile_decay(r: float, C_P_mu: float) -> float:
    """Exponential profile decay ``16 e^{-r / sqrt(2 C_P)}`` of the base."""
    return 16.0 * math.exp(-r / math.sqrt(2.0 * C_P_mu))


def transferred_profile_inverse(s: float, C_P_mu: float, M_ratio: float) -> float:
    """Inverse profile of the perturbed measure after the two-step transfer."""
    return 4.0 * math.sqrt(2.0 * C_P_mu) * (3.0 * LN2 + math.log(1.0 / s) + math.log(M_ratio))


def concentration_transfer_objective(s: float, M_ratio: float, C_P_mu: float) -> float:
    """The display minimized by :func:`bound_concentration_transfer`."""
    if not 0.0 < s < 0.25:
        return math.inf
    log_term = 3.0 * LN2 + math.log(1.0 / s) + math.log(M_ratio)
    return CONCENTRATION_CAP / (1.0 - 4.0 * s) ** 4 * log_term**2 * C_P_mu


def bound_concentration_transfer(C_P_mu: float, M_ratio: float,
                                 mean_F: Optional[float] = None,
                                 search: Optional[ParamSearch] = None) -> BoundResult:
    """Profile-based Poincare transfer for log-concave perturbed measures.

    Minimizes ``cap/(1-4s)^4 (3 ln2 + ln(1/s) + ln M)^2 C_P`` over
    0 < s < 1/4 by golden section.  When ``mean_F`` is supplied the result
    also carries the companion form ``(C1 + C2 mean_F^2) C_P`` obtained from
    ``M <= e^{mean_F/2}`` and the split ``(a+b)^2 <= 2a^2 + 2b^2``; C1 and
    C2 are derived from our traced chain, not quoted constants.
    """
    tid = "concentration_transfer"
    search = search or ParamSearch()
    if M_ratio < 1.0:
        raise ValueError("M_ratio < 1 is impossible (Jensen)")
    s, val = golden_section(
        lambda t: concentration_transfer_objective(t, M_ratio, C_P_mu),
        _SLACK, 0.25 - _SLACK, search.rel_tol, search.max_iter)
    extras = {
        "profile_decay_at_1": concentration_profile_decay(1.0, C_P_mu),
        "profile_inverse_at_s": transferred_profile_inverse(s, C_P_mu, M_ratio),
        "traced_prefactor": TRACED_CONCENTRATION_PREFACTOR,
    }
    untraced = ()
    if mean_F is not None:
        lnM = 0.5 * mean_F

        def split_obj(t):
            if not 0.0 < t < 0.25:
                return math.inf
            a = 3.0 * LN2 + math.log(1.0 / t)
            return CONCENTRATION_CAP / (1.0 - 4.0 * t) ** 4 * (
                2.0 * a**2 + 2.0 * lnM**2)

        s2, v2 = golden_section(split_obj, _SLACK, 0.25 - _SLACK,
                                search.rel_tol, search.max_iter)
        a = 3.0 * LN2 + math.log(1.0 / s2)
        C1 = 2.0 * CONCENTRATION_CAP * a**2 / (1.0 - 4.0 * s2) ** 4
        C2 = CONCENTRATION_CAP / (2.0 * (1.0 - 4.0 * s2) ** 4)
        extras.update({
            "remark_value": (C1 + C2 * mean_F**2) * C_P_mu,
            "C1": C1, "C2": C2, "s_remark": s2,
        })
    return BoundResult(tid, True, val, {"s": s, "s_cap": 0.25},
                       {"s": s}, (tid,), untraced=untraced, extras=extras)


# --------------------------------------------------------------------------
# perturbed Brascamp-Lieb
# --------------------------------------------------------------------------


def bound_brascamp_lieb_perturbed(kappa: float, hs_integral: Optional[float] = None,
                                  log_concave_muF: bool = False,
                                  search: Optional[ParamSearch] = None) -> BoundResult:
    """Brascamp-Lieb form under perturbation.

    ``kappa`` is the certified ``sup (grad F)^t Hess(V)^{-1} grad F``; the
    value is the variance-inequality prefactor
    ``inf_eps (1+1/eps)/(1 - kappa(1+eps)/4)`` (needs kappa < 4).  When the
    perturbed measure is log-concave and the Hilbert-Schmidt integral
    ``int |Hess(V)^{-1}|_HS dmu`` is supplied, extras carry the Poincare
    bound ``64 ln2 * prefactor * hs_integral``.

    The same prefactor controls exponential concentration of mu_F for test
    functions with ``(grad f)^t Hess(V)^{-1} grad f <= 1`` (moment
    generating functions are finite up to ``sqrt(4 (1-s)/(1+1/eps))``); that
    corollary is recorded here for reference, not implemented as an
    operation.
    """
    tid = "brascamp_lieb_perturbed"
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    c = kappa / 4.0
    if c >= 1.0:
        return _refused(tid, "kappa >= 4", margins={"s0": c, "s_cap": 1.0})
    pref, eps, s = optimized_prefactor(c)
    extras = {}
    if log_concave_muF and hs_integral is not None:
        extras["poincare_upper"] = 64.0 * LN2 * pref * hs_integral
    return BoundResult(tid, True, pref, {"s": s, "s_cap": 1.0},
                       {"eps": eps}, (tid,), extras=extras)


# --------------------------------------------------------------------------
# moment-only bounds for log-concave measures
# --------------------------------------------------------------------------

VARIANCE_POINCARE_CONSTANT = 32.0 * 81.0 * LN2  # = 2592 ln 2


def bound_from_moments(moments: MomentSet, variant: str = "variance",
                       log_concave: bool = True) -> BoundResult:
    """Bounds needing only a moment of the (log-concave) measure itself.

    * ``variance``: ``C_P <= 2592 ln2 * trace covariance``.
    * ``hess_dominated``: same constant against ``mu(|grad H|^2)`` for any
      C^2 ``H`` with ``Hess H >= Id`` (pass the moment in grad_F_l2sq).
    * ``cheeger_first_moment``: ``C'_C <= (16/pi) mu(|x - mean|)``, with the
      weaker route ``(100 sqrt10 / pi^2) mu(|x - mean|)`` in extras.
    """
    if not log_concave:
        return _refused(f"moments_{variant}", "measure not certified log-concave")
    if variant == "variance":
        tid = "poincare_from_variance"
        if moments.second is None:
            return _refused(tid, "missing trace covariance", missing=("second",))
        return BoundResult(tid, True, VARIANCE_POINCARE_CONSTANT * moments.second,
                           {}, {}, (tid,))
    if variant == "hess_dominated":
        tid = "poincare_from_hessian_dominator"
        if moments.grad_F_l2sq is None:
            return _refused(tid, "missing mu(|grad H|^2)", missing=("grad_F_l2sq",))
        return BoundResult(tid, True, VARIANCE_POINCARE_CONSTANT * moments.grad_F_l2sq,
                           {}, {}, (tid,))
    if variant == "cheeger_first_moment":
        tid = "cheeger_from_first_moment"
        if moments.first_abs is None:
            return _refused(tid, "missing mu(|x - mean|)", missing=("first_abs",))
        v = (16.0 / math.pi) * moments.first_abs
        weaker = (100.0 * math.sqrt(10.0) / math.pi**2) * moments.first_abs
        return BoundResult(tid, True, v, {}, {}, (tid,),
                           extras={"weaker_route": weaker})
    raise ValueError(f"unknown variant {variant!r}")


# --------------------------------------------------------------------------
# Subbotin (exponential-power) perturbation route
# --------------------------------------------------------------------------

SUBBOTIN_OPTIMAL_CONSTANT = 512.0 * math.e**2 * LN2
SUBBOTIN_BASE_CONSTANT = 512.0 * LN2


def subbotin_sp_constants(p: float):
    """Two 1D Poincare bounds for the exponential-power density e^{-|x|^p}.

    Returns ``(variance_route, dilation_route)``: twelve times the variance
    ``12 Gamma(3/p)/Gamma(1/p)``, and the sharper
    ``p^{1-2/p} / (2 (1+p)^{1-2/p})``.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    bobkov = 12.0 * gamma_fn(3.0 / p) / gamma_fn(1.0 / p)
    bjm = p ** (1.0 - 2.0 / p) / (2.0 * (1.0 + p) ** (1.0 - 2.0 / p))
    return float(bobkov), float(bjm)


def _subbotin_lambda(p: float, C_P_window: float, n: int, sigma2: float) -> float:
    lam2 = (1.0 / (6.0 * p**2 * C_P_window * n)) ** (1.0 / (p - 1.0)) \
        / ((p - 1.0) ** 2 * sigma2)
    return math.sqrt(lam2)


def bound_subbotin(n: int, sigma2: float, variant: str = "unconditional_optimal",
                   p: Optional[float] = None, C_P_nu: Optional[float] = None,
                   unconditional: bool = False, log_concave: bool = True) -> BoundResult:
    """Dimensional Poincare bounds through exponential-power perturbations.

    ``unconditional_optimal`` picks ``p - 1 = ln(3n)/2`` and gives
    ``512 e^2 ln2 * ln^2(3n) * sigma^2`` (needs the unconditional flag and
    n >= 2).  ``unconditional_at_p`` evaluates the same route at a caller
    p > 2 using the sharper 1D window constant; ``general_at_p`` takes the
    window constant C_P_nu from the caller.  Every result reports the
    dilation ``lambda`` implied by the balancing equation.
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    if not log_concave:
        return _refused(f"subbotin_{variant}", "measure not certified log-concave")

    if variant == "unconditional_optimal":
        tid = "subbotin_unconditional_optimal"
        if not unconditional:
            return _refused(tid, "requires the unconditional flag")
        if n < 2:
            return _refused(tid, "needs n >= 2 so the optimal exponent exceeds 1",
                            margins={"n": float(n), "n_floor": 2.0})
        p_star = 1.0 + 0.5 * math.log(3.0 * n)
        value = SUBBOTIN_OPTIMAL_CONSTANT * math.log(3.0 * n) ** 2 * sigma2
        _, window = subbotin_sp_constants(p_star)
        lam = _subbotin_lambda(p_star, window, n, sigma2)
        return BoundResult(tid, True, value, {}, {"p": p_star, "lambda": lam},
                           (tid,))

    if p is None:
        return _refused(f"subbotin_{variant}", "needs an exponent p", missing=("p",))
    if p <= 2.0:
        return _refused(f"subbotin_{variant}",
                        "moment comparison needs p > 2",
                        margins={"p": p, "p_floor": 2.0})

    if variant == "unconditional_at_p":
        tid = "subbotin_unconditional_at_p"
        if not unconditional:
            return _refused(tid, "requires the unconditional flag")
        value = (4.0 * SUBBOTIN_BASE_CONSTANT * 3.0 ** (1.0 / (p - 1.0))
                 * (p - 1.0) ** 2 * n ** (1.0 / (p - 1.0)) * sigma2)
        bobkov, window = subbotin_sp_constants(p)
        lam = _subbotin_lambda(p, window, n, sigma2)
        return BoundResult(tid, True, value, {}, {"p": p, "lambda": lam}, (tid,),
                           extras={"window_poincare_bjm": window,
                                   "window_poincare_bobkov": bobkov})

    if variant == "general_at_p":
        tid = "subbotin_general_at_p"
        if C_P_nu is None:
            return _refused(tid, "needs the window constant C_P_nu", missing=("C_P_nu",))
        value = (SUBBOTIN_BASE_CONSTANT * 6.0 ** (1.0 / (p - 1.0))
                 * p ** (2.0 / (p - 1.0)) * (p - 1.0) ** 2
                 * n ** (1.0 / (p - 1.0)) * C_P_nu ** (p / (p - 1.0)) * sigma2)
        lam = _subbotin_lambda(p, C_P_nu, n, sigma2)
        return BoundResult(tid, True, value, {}, {"p": p, "lambda": lam}, (tid,))

    raise ValueError(f"unknown variant {variant!r}")


# --------------------------------------------------------------------------
# forward Gaussian perturbation
# --------------------------------------------------------------------------


def bound_gaussian_perturbation_forward(C_P_mu: float, n: int, rho: float,
                                        mean_F: Optional[float] = None,
                                        search: Optional[ParamSearch] = None) -> BoundResult:
    """Quadratic perturbation ``F = rho |x|^2 / 2`` of a log-concave base.

    Emits the minimum of the strong-convexity branch ``1/rho`` (dropped when
    rho <= 0) and the profile-transfer branch ``(C1 + C2 mean_F^2) C_P``
    with C1, C2 traced from :func:`bound_concentration_transfer`.  Also
    reports the rho-free envelope ``sup_rho min(...)`` for an isotropic base
    (``mean_F = rho n / 2``), whose ``C`` in ``C n^{2/3} C_P^{1/3}`` is
    derived, not quoted.
    """
    tid = "gaussian_perturbation_forward"
    search = search or ParamSearch()
    if mean_F is None:
        mean_F = 0.5 * max(rho, 0.0) * n  # isotropic default mu(|x|^2) = n
    transfer = bound_concentration_transfer(C_P_mu, 1.0, mean_F=mean_F, search=search)
    branch_transfer = transfer.extras["remark_value"]
    C1, C2 = transfer.extras["C1"], transfer.extras["C2"]
    candidates = {"transfer": branch_transfer}
    if rho > 0:
        candidates["bakry_emery"] = 1.0 / rho
    value = min(candidates.values())
    chosen = min(candidates, key=candidates.get)

    def envelope_obj(lr):
        r = math.exp(lr)
        mf = 0.5 * r * n
        return -min(1.0 / r, (C1 + C2 * mf**2) * C_P_mu)

    lr, neg = golden_section(envelope_obj, math.log(1e-8), math.log(1e8),
                             search.rel_tol, search.max_iter)
    envelope = -neg
    traced_C = envelope / (n ** (2.0 / 3.0) * C_P_mu ** (1.0 / 3.0))
    return BoundResult(
        tid, True, value, {},
        {"rho": rho, "branch": 1.0 if chosen == "bakry_emery" else 0.0},
        (tid,) + transfer.provenance,
        extras={
            "branch_transfer": branch_transfer,
            "branch_bakry_emery": candidates.get("bakry_emery", math.inf),
            "envelope": envelope,
            "envelope_rho": math.exp(lr),
            "traced_envelope_constant": traced_C,
            "C1": C1, "C2": C2,
        },
    )


# --------------------------------------------------------------------------
# reference-only envelopes
# --------------------------------------------------------------------------


def kls_reference(n: int, sigma2: float, variant: str = "sqrt_n", C: float = 1.0):
    """Reference formulas from the spectral-gap literature; never asserted.

    ``sqrt_n``: ``C n^{1/2} sigma^2``; ``polylog``:
    ``e^{C sqrt(ln n ln(1 + ln n))} sigma^2``.  ``C`` is an untraced
    universal constant (default 1.0).
    """
    if variant == "sqrt_n":
        return C * math.sqrt(n) * sigma2
    if variant == "polylog":
        return math.exp(C * math.sqrt(math.log(n) * math.log(1.0 + math.log(n)))) * sigma2
    raise ValueError(f"unknown variant {variant!r}")
