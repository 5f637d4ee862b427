"""Right-hand sides f(x, t) with linear growth, their primitives and audits.

Built-in families are asymptotically linear with slope m: affine
f = m*t + g(x), saturating f = m*t + delta*arctan(t) + g(x), and a bounded
oscillatory perturbation f = m*t + c*sin(t) + g(x).  Each declares its
growth data (a(x), b), its asymptotic slopes, and (when derivable) the
range of difference quotients used by the uniqueness condition.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import InvalidParameterError, NumericError, UnauditableError
from .quadrature import gauss_points
from .spectral import Spectrum

#: margin used for strict spectral-gap comparisons
GAP_MARGIN = 1.0e-9

#: widening applied to the degenerate affine slope range in gap checks
AFFINE_SLOPE_EPS = 1.0e-12


class Family(enum.Enum):
    AFFINE = "affine"
    SATURATING = "saturating"
    BOUNDED_PERTURBATION = "bounded_perturbation"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SourceProfile:
    """Source-term profile g(x): constant, polynomial, or nodal samples."""

    kind: str
    value: float = 0.0
    coeffs: tuple = ()
    sample_x: tuple = ()
    sample_values: tuple = ()

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full_like(x, self.value)
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs))
        if self.kind == "nodal":
            return np.interp(x, np.asarray(self.sample_x),
                             np.asarray(self.sample_values))
        raise InvalidParameterError(f"unknown profile kind {self.kind!r}")


def constant_profile(value: float) -> SourceProfile:
    return SourceProfile(kind="constant", value=float(value))


def polynomial_profile(coeffs) -> SourceProfile:
    return SourceProfile(kind="polynomial", coeffs=tuple(float(c) for c in coeffs))


def nodal_profile(x, values) -> SourceProfile:
    x = tuple(float(v) for v in x)
    values = tuple(float(v) for v in values)
    if len(x) != len(values):
        raise InvalidParameterError("nodal profile needs matching x/value lists")
    return SourceProfile(kind="nodal", sample_x=x, sample_values=values)


@dataclass(frozen=True)
class NonlinearitySpec:
    family: Family
    g: SourceProfile
    m: float = 0.0
    delta: float = 0.0
    c: float = 0.0
    # growth data |f| <= a(x) + b|t|
    a_profile: Callable = field(default=None, repr=False)
    b: float = 0.0
    alpha_lower: Callable = field(default=None, repr=False)
    alpha_upper: Callable = field(default=None, repr=False)
    slope_range: tuple | None = None
    # custom family hooks
    f: Callable = field(default=None, repr=False)
    f_t: Callable = field(default=None, repr=False)
    F: Callable = field(default=None, repr=False)


def _const(v: float) -> Callable:
    def profile(x):
        return np.full_like(np.asarray(x, dtype=float), v)
    return profile


def affine(m: float, g: SourceProfile) -> NonlinearitySpec:
    return NonlinearitySpec(
        family=Family.AFFINE, g=g, m=float(m),
        a_profile=lambda x: np.abs(g(x)), b=abs(m),
        alpha_lower=_const(m), alpha_upper=_const(m),
        slope_range=(float(m), float(m)))


def saturating(m: float, delta: float, g: SourceProfile) -> NonlinearitySpec:
    if delta < 0.0:
        raise InvalidParameterError(f"delta must be nonnegative, got {delta}")
    return NonlinearitySpec(
        family=Family.SATURATING, g=g, m=float(m), delta=float(delta),
        a_profile=lambda x: np.abs(g(x)) + delta * math.pi / 2.0, b=abs(m),
        alpha_lower=_const(m), alpha_upper=_const(m),
        slope_range=(float(m), float(m + delta)))


def bounded_perturbation(m: float, c: float, g: SourceProfile) -> NonlinearitySpec:
    return NonlinearitySpec(
        family=Family.BOUNDED_PERTURBATION, g=g, m=float(m), c=float(c),
        a_profile=lambda x: np.abs(g(x)) + abs(c), b=abs(m),
        alpha_lower=_const(m), alpha_upper=_const(m),
        slope_range=(float(m - abs(c)), float(m + abs(c))))


def custom(f: Callable, a_profile: Callable, b: float,
           alpha_lower: Callable, alpha_upper: Callable,
           slope_range: tuple | None = None, f_t: Callable = None,
           F: Callable = None,
           g: SourceProfile | None = None) -> NonlinearitySpec:
    if b < 0.0:
        raise InvalidParameterError(f"growth slope b must be >= 0, got {b}")
    return NonlinearitySpec(
        family=Family.CUSTOM, g=g or constant_profile(0.0),
        a_profile=a_profile, b=float(b),
        alpha_lower=alpha_lower, alpha_upper=alpha_upper,
        slope_range=tuple(slope_range) if slope_range else None,
        f=f, f_t=f_t, F=F)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_f(spec: NonlinearitySpec, x, t):
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if spec.family is Family.AFFINE:
        return spec.m * t + spec.g(x)
    if spec.family is Family.SATURATING:
        return spec.m * t + spec.delta * np.arctan(t) + spec.g(x)
    if spec.family is Family.BOUNDED_PERTURBATION:
        return spec.m * t + spec.c * np.sin(t) + spec.g(x)
    return np.asarray(spec.f(x, t), dtype=float)


def eval_f_t(spec: NonlinearitySpec, x, t):
    """Partial derivative of f in t (central difference for custom specs)."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if spec.family is Family.AFFINE:
        return np.full(np.broadcast(x, t).shape, spec.m)
    if spec.family is Family.SATURATING:
        return spec.m + spec.delta / (1.0 + t * t)
    if spec.family is Family.BOUNDED_PERTURBATION:
        return spec.m + spec.c * np.cos(t)
    if spec.f_t is not None:
        return np.asarray(spec.f_t(x, t), dtype=float)
    eps = 1.0e-6 * np.maximum(1.0, np.abs(t))
    return (eval_f(spec, x, t + eps) - eval_f(spec, x, t - eps)) / (2.0 * eps)


def eval_F(spec: NonlinearitySpec, x, t):
    """Primitive of f from 0 in the t variable."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if spec.family is Family.AFFINE:
        return spec.m * t * t / 2.0 + spec.g(x) * t
    if spec.family is Family.SATURATING:
        return (spec.m * t * t / 2.0
                + spec.delta * (t * np.arctan(t) - np.log1p(t * t) / 2.0)
                + spec.g(x) * t)
    if spec.family is Family.BOUNDED_PERTURBATION:
        return spec.m * t * t / 2.0 + spec.c * (1.0 - np.cos(t)) + spec.g(x) * t
    if spec.F is not None:
        return np.asarray(spec.F(x, t), dtype=float)
    flat_x = np.broadcast_to(x, np.broadcast(x, t).shape).ravel()
    flat_t = np.broadcast_to(t, np.broadcast(x, t).shape).ravel()
    out = np.empty(flat_t.shape)
    for i, (xi, ti) in enumerate(zip(flat_x, flat_t)):
        val, err = quad(lambda tau: float(eval_f(spec, xi, tau)), 0.0, ti,
                        epsabs=1.0e-12, epsrel=1.0e-12)
        if not math.isfinite(val):
            raise NumericError(f"primitive quadrature failed at (x={xi}, t={ti})")
        out[i] = val
    return out.reshape(np.broadcast(x, t).shape)


# ---------------------------------------------------------------------------
# audits and classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GrowthReport:
    passed: bool
    worst_slack: float
    worst_x: float
    worst_t: float


def audit_growth(spec: NonlinearitySpec, x_points,
                 t_max: float = 1.0e6, n_t: int = 81) -> GrowthReport:
    """Sampled check of |f(x,t)| <= a(x) + b|t| over a log grid in t."""
    if t_max < 1.0e4:
        raise InvalidParameterError(f"t_max must be at least 1e4, got {t_max}")
    x = np.asarray(x_points, dtype=float)
    t_pos = np.concatenate(([0.0], np.logspace(-3.0, math.log10(t_max), n_t)))
    t = np.concatenate((-t_pos[::-1], t_pos))
    xx = x[:, None]
    tt = t[None, :]
    slack = spec.a_profile(xx) + spec.b * np.abs(tt) - np.abs(eval_f(spec, xx, tt))
    idx = np.unravel_index(int(np.argmin(slack)), slack.shape)
    worst = float(slack[idx])
    return GrowthReport(passed=worst >= -GAP_MARGIN, worst_slack=worst,
                        worst_x=float(x[idx[0]]), worst_t=float(t[idx[1]]))


class Case(enum.Enum):
    COERCIVE = "coercive"
    GAP = "gap"
    UNSUPPORTED = "unsupported"


@dataclass(frozen=True)
class CaseClassification:
    case: Case
    k: int | None = None
    reason: str | None = None
    alpha_inf: float = math.nan
    alpha_sup: float = math.nan

    def to_dict(self) -> dict:
        return {"case": self.case.value, "k": self.k, "reason": self.reason,
                "alpha_inf": self.alpha_inf, "alpha_sup": self.alpha_sup}


def _alpha_bounds(spec: NonlinearitySpec, mesh) -> tuple[float, float]:
    """inf of the lower slope / sup of the upper slope over nodes and
    element Gauss points (the checkable version of an a.e. condition)."""
    pts = [mesh.interior_nodes]
    for e in range(mesh.n_elements):
        lo, hi = mesh.element(e)
        xg, _ = gauss_points(lo, hi, 4)
        pts.append(xg)
    x = np.concatenate(pts)
    return (float(np.min(spec.alpha_lower(x))),
            float(np.max(spec.alpha_upper(x))))


def classify_slopes(alpha_inf: float, alpha_sup: float,
                    eigenvalues: np.ndarray) -> CaseClassification:
    """Pure classification from slope bounds against an ascending spectrum."""
    if alpha_sup < alpha_inf:
        return CaseClassification(Case.UNSUPPORTED,
                                  reason="upper slope below lower slope",
                                  alpha_inf=alpha_inf, alpha_sup=alpha_sup)
    vals = np.asarray(eigenvalues, dtype=float)
    if alpha_sup < vals[0] - GAP_MARGIN:
        return CaseClassification(Case.COERCIVE, alpha_inf=alpha_inf,
                                  alpha_sup=alpha_sup)
    for k in range(1, vals.size):
        if (vals[k - 1] + GAP_MARGIN < alpha_inf
                and alpha_sup < vals[k] - GAP_MARGIN):
            return CaseClassification(Case.GAP, k=k, alpha_inf=alpha_inf,
                                      alpha_sup=alpha_sup)
    straddled = [j + 1 for j, lam in enumerate(vals)
                 if alpha_inf - GAP_MARGIN <= lam <= alpha_sup + GAP_MARGIN]
    if straddled:
        names = ", ".join(f"lambda_{j}" for j in straddled[:3])
        return CaseClassification(Case.UNSUPPORTED,
                                  reason=f"slope range straddles {names}",
                                  alpha_inf=alpha_inf, alpha_sup=alpha_sup)
    return CaseClassification(Case.UNSUPPORTED,
                              reason="slopes exceed the computed spectrum",
                              alpha_inf=alpha_inf, alpha_sup=alpha_sup)


def classify(spec: NonlinearitySpec, spectrum: Spectrum) -> CaseClassification:
    lo, hi = _alpha_bounds(spec, spectrum.op.mesh)
    return classify_slopes(lo, hi, spectrum.eigenvalues)


@dataclass(frozen=True)
class SlopeGapReport:
    passed: bool
    k: int
    slope_range: tuple
    gap: tuple
    lower_margin: float
    upper_margin: float


def check_f2_gap(spec: NonlinearitySpec, spectrum: Spectrum,
                 k: int) -> SlopeGapReport:
    """Check that all difference quotients of f sit strictly inside the
    k-th spectral gap (the uniqueness condition)."""
    if spec.slope_range is None:
        raise UnauditableError(
            "custom nonlinearity with no declared slope range")
    lo, hi = spec.slope_range
    if lo == hi:  # degenerate affine range, widened for a strict check
        lo -= AFFINE_SLOPE_EPS
        hi += AFFINE_SLOPE_EPS
    gap_lo, gap_hi = spectrum.gap(k)
    lower_margin = lo - (gap_lo + GAP_MARGIN)
    upper_margin = (gap_hi - GAP_MARGIN) - hi
    return SlopeGapReport(passed=lower_margin > 0.0 and upper_margin > 0.0,
                          k=k, slope_range=(lo, hi), gap=(gap_lo, gap_hi),
                          lower_margin=lower_margin, upper_margin=upper_margin)
