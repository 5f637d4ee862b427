"""Energy functional, weak-form residuals, and the two existence-case solvers.

The energy is J(u) = 1/2 u'Au - int F(x, u_h) dx; a zero gradient
A u - b(u) = 0 is exactly the discrete weak form.  The coercive case is
solved by damped Newton minimization; the gap case by Newton on the
gradient, which is nonresonant (hence undamped-safe) whenever all slopes
of f stay strictly inside the spectral gap.  The geometry probe samples
the saddle structure that underpins the gap-case existence argument, and
the uniqueness probe multi-starts the solver to test the slope-gap
uniqueness prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .assembly import AssembledOperator, norm_Z
from .errors import (InvalidParameterError, NonConvergenceError,
                     NonResonanceContradictionError, ResonanceError,
                     UnsupportedCaseError)
from .nonlinearity import (Case, CaseClassification, NonlinearitySpec,
                           check_f2_gap, classify, eval_F, eval_f, eval_f_t)
from .quadrature import gauss_rule
from .spectral import Spectrum

#: pivot ratio below which a Newton/linear system counts as singular
SINGULAR_PIVOT_RATIO = 1.0e-12


@dataclass(frozen=True)
class SolverOptions:
    tol: float = 1.0e-9
    max_iter: int = 200
    starts: int = 1
    seed: int = 42
    line_search_contraction: float = 0.5
    trust_radius: float | None = None


@dataclass(frozen=True)
class UniquenessVerdict:
    kind: str  # "Unique" | "MultipleFound" | "Inconclusive" | "NotChecked"
    max_pairwise_z: float = math.nan
    representatives: tuple = ()
    n_starts: int = 0
    seed: int = 0
    f2_passed: bool | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "max_pairwise_z": self.max_pairwise_z,
                "n_starts": self.n_starts, "seed": self.seed,
                "f2_passed": self.f2_passed}


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray = field(repr=False)
    case: CaseClassification | None
    j_value: float
    residual_inf: float
    iterations: int
    converged: bool
    uniqueness: UniquenessVerdict | None = None
    geometry: "GeometryProbe | None" = None
    seed: int = 42
    tol: float = 1.0e-9


# ---------------------------------------------------------------------------
# element-level quadrature of the nonlinear terms
# ---------------------------------------------------------------------------

def _element_data(op: AssembledOperator):
    mesh = op.mesh
    xi, wref = gauss_rule(op.quad_order)
    xg = mesh.nodes[:-1, None] + mesh.h * xi[None, :]
    wg = mesh.h * wref[None, :] * np.ones((mesh.n_elements, 1))
    return xg, wg, xi


def _interp_elements(op: AssembledOperator, u: np.ndarray, xi: np.ndarray):
    full = np.concatenate(([0.0], u, [0.0]))
    return full[:-1, None] * (1.0 - xi[None, :]) + full[1:, None] * xi[None, :]


def _check_dim(op: AssembledOperator, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (op.size,):
        raise InvalidParameterError(
            f"coefficient vector has shape {u.shape}, expected ({op.size},)")
    return u


def eval_J(op: AssembledOperator, spec: NonlinearitySpec, u) -> float:
    u = _check_dim(op, u)
    xg, wg, xi = _element_data(op)
    uh = _interp_elements(op, u, xi)
    f_int = float(np.sum(wg * eval_F(spec, xg, uh)))
    return 0.5 * float(u @ op.stiffness @ u) - f_int


def load_vector(op: AssembledOperator, spec: NonlinearitySpec,
                u) -> np.ndarray:
    """b(u)_i = int f(x, u_h(x)) phi_i(x) dx over interior hats."""
    u = _check_dim(op, u)
    xg, wg, xi = _element_data(op)
    fvals = wg * eval_f(spec, xg, _interp_elements(op, u, xi))
    full = np.zeros(op.mesh.n_elements + 1)
    np.add.at(full, np.arange(op.mesh.n_elements),
              np.sum(fvals * (1.0 - xi[None, :]), axis=1))
    np.add.at(full, np.arange(1, op.mesh.n_elements + 1),
              np.sum(fvals * xi[None, :], axis=1))
    return full[1:-1]


def eval_gradient(op: AssembledOperator, spec: NonlinearitySpec,
                  u) -> np.ndarray:
    u = _check_dim(op, u)
    return op.stiffness @ u - load_vector(op, spec, u)


def _weighted_mass_from_values(op: AssembledOperator,
                               wvals: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Mass matrix weighted by per-Gauss-point values wvals (n_elem, q)."""
    _, wg, _ = _element_data(op)
    phi = np.stack([1.0 - xi, xi])  # (2, q)
    n = op.mesh.n_elements
    full = np.zeros((n + 1, n + 1))
    loc = np.einsum("pg,qg,eg->epq", phi, phi, wg * wvals)
    e = np.arange(n)
    for p in range(2):
        for q in range(2):
            full[e + p, e + q] += loc[:, p, q]
    return full[1:-1, 1:-1]


def jacobian_mass(op: AssembledOperator, spec: NonlinearitySpec,
                  u) -> np.ndarray:
    """D(u)_ij = int f_t(x, u_h) phi_i phi_j dx (mass weighted by the slope)."""
    u = _check_dim(op, u)
    xg, _, xi = _element_data(op)
    wvals = eval_f_t(spec, xg, _interp_elements(op, u, xi))
    return _weighted_mass_from_values(op, wvals, xi)


def residual_weakform(op: AssembledOperator, spec: NonlinearitySpec,
                      u) -> float:
    u = _check_dim(op, u)
    au = op.stiffness @ u
    grad = au - load_vector(op, spec, u)
    return float(np.abs(grad).max() / (1.0 + np.abs(au).max()))


# ---------------------------------------------------------------------------
# linear nonresonant solve
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinearSolve:
    solution: np.ndarray = field(repr=False)
    pivot_min: float
    pivot_ratio: float
    residual_inf: float


def _profile_values(op: AssembledOperator, profile, xg: np.ndarray) -> np.ndarray:
    if np.isscalar(profile):
        return np.full_like(xg, float(profile))
    if callable(profile):
        return np.asarray(profile(xg), dtype=float)
    arr = np.asarray(profile, dtype=float)
    if arr.shape != (op.size,):
        raise InvalidParameterError(
            f"nodal profile has shape {arr.shape}, expected ({op.size},)")
    return np.interp(xg, op.mesh.interior_nodes, arr)


def linear_nonresonant_solve(op: AssembledOperator, spectrum: Spectrum,
                             m_profile, g) -> LinearSolve:
    """Solve (A - M_w) u = M g with the slope weight certified nonresonant.

    The weight values must avoid every eigenvalue and stay within a single
    interval between consecutive eigenvalues, which guarantees an
    invertible system; a numerically singular factorization then signals
    an assembly or spectrum bug, not a user error.
    """
    xg, wg, xi = _element_data(op)
    m_vals = _profile_values(op, m_profile, xg)
    vals = spectrum.eigenvalues
    lo, hi = float(m_vals.min()), float(m_vals.max())
    if np.min(np.abs(vals[:, None, None] - m_vals[None, :, :])) <= 1.0e-9:
        raise ResonanceError(
            "slope profile touches an eigenvalue within 1e-9")
    if np.searchsorted(vals, lo) != np.searchsorted(vals, hi):
        raise ResonanceError(
            f"slope profile range [{lo:.6g}, {hi:.6g}] straddles an eigenvalue")

    weighted = _weighted_mass_from_values(op, m_vals, xi)
    g_vals = _profile_values(op, g, xg)
    rhs_full = np.zeros(op.mesh.n_elements + 1)
    gq = wg * g_vals
    np.add.at(rhs_full, np.arange(op.mesh.n_elements),
              np.sum(gq * (1.0 - xi[None, :]), axis=1))
    np.add.at(rhs_full, np.arange(1, op.mesh.n_elements + 1),
              np.sum(gq * xi[None, :], axis=1))
    rhs = rhs_full[1:-1]

    system = op.stiffness - weighted
    lu, piv = scipy.linalg.lu_factor(system)
    diag = np.abs(np.diag(lu))
    pivot_min = float(diag.min())
    pivot_ratio = pivot_min / float(diag.max())
    if pivot_ratio < SINGULAR_PIVOT_RATIO:
        raise NonResonanceContradictionError(
            f"certified-nonresonant system is numerically singular "
            f"(pivot ratio {pivot_ratio:.3e}); assembly or spectrum bug")
    u = scipy.linalg.lu_solve((lu, piv), rhs)
    res = float(np.abs(system @ u - rhs).max())
    return LinearSolve(solution=u, pivot_min=pivot_min,
                       pivot_ratio=pivot_ratio, residual_inf=res)


# ---------------------------------------------------------------------------
# Newton iterations
# ---------------------------------------------------------------------------

def _newton_step(system: np.ndarray, grad: np.ndarray,
                 f2_certified: bool) -> np.ndarray:
    lu, piv = scipy.linalg.lu_factor(system)
    diag = np.abs(np.diag(lu))
    if diag.min() < SINGULAR_PIVOT_RATIO * max(diag.max(), 1.0e-300):
        if f2_certified:
            raise NonResonanceContradictionError(
                "Newton system singular although the slope gap was verified")
        # minimum-norm least-squares step keeps resonant probes meaningful
        step, *_ = np.linalg.lstsq(system, -grad, rcond=None)
        return step
    return scipy.linalg.lu_solve((lu, piv), -grad)


def _run_newton_rootfind(op, spec, u0, tol, max_iter, f2_certified,
                         trust_radius=None):
    """Newton on the gradient; returns (u, residual, iterations, trace)."""
    u = np.asarray(u0, dtype=float).copy()
    trace = []
    bad_streak = 0
    prev_res = math.inf
    damped = trust_radius is not None
    for it in range(max_iter + 1):
        au = op.stiffness @ u
        grad = au - load_vector(op, spec, u)
        res = float(np.abs(grad).max() / (1.0 + np.abs(au).max()))
        trace.append(res)
        if res <= tol:
            return u, res, it, trace
        if it == max_iter:
            break
        step = _newton_step(op.stiffness - jacobian_mass(op, spec, u),
                            grad, f2_certified)
        if damped:
            step_norm = norm_Z(op, step)
            if step_norm > trust_radius:
                step = step * (trust_radius / step_norm)
        u = u + step
        # safeguard: persistent residual growth flips on step damping
        if res > prev_res:
            bad_streak += 1
            if bad_streak >= 3 and not damped:
                damped = True
                trust_radius = norm_Z(op, u) + 1.0
        else:
            bad_streak = 0
        prev_res = res
    raise NonConvergenceError(
        f"Newton did not reach tol={tol} in {max_iter} iterations "
        f"(last residual {trace[-1]:.3e})", trace=trace)


def solve_case_a(op: AssembledOperator, spec: NonlinearitySpec,
                 opts: SolverOptions = SolverOptions(),
                 classification: CaseClassification | None = None) -> SolveReport:
    """Direct minimization of J by damped Newton with line search."""
    if classification is not None and classification.case is not Case.COERCIVE:
        raise UnsupportedCaseError(classification)
    u = np.zeros(op.size)
    j_val = eval_J(op, spec, u)
    trace = []
    contraction = opts.line_search_contraction
    for it in range(opts.max_iter + 1):
        au = op.stiffness @ u
        grad = au - load_vector(op, spec, u)
        res = float(np.abs(grad).max() / (1.0 + np.abs(au).max()))
        trace.append(res)
        if res <= opts.tol:
            return SolveReport(solution=u, case=classification, j_value=j_val,
                               residual_inf=res, iterations=it,
                               converged=True, seed=opts.seed, tol=opts.tol)
        if it == opts.max_iter:
            break
        hessian = op.stiffness - jacobian_mass(op, spec, u)
        step = _newton_step(hessian, grad, f2_certified=False)
        slope = float(grad @ step)
        if slope >= 0.0:  # not a descent direction: steepest descent fallback
            step = -grad
            slope = -float(grad @ grad)
        t = 1.0
        for _ in range(60):
            trial = u + t * step
            j_trial = eval_J(op, spec, trial)
            if j_trial <= j_val + 1.0e-4 * t * slope:
                break
            t *= contraction
        else:
            raise NonConvergenceError(
                "line search stalled while minimizing the energy", trace=trace)
        u = u + t * step
        j_val = eval_J(op, spec, u)
    raise NonConvergenceError(
        f"minimization did not reach tol={opts.tol} in {opts.max_iter} "
        f"iterations (last residual {trace[-1]:.3e})", trace=trace)


def solve_case_b(op: AssembledOperator, spectrum: Spectrum,
                 spec: NonlinearitySpec,
                 opts: SolverOptions = SolverOptions(),
                 classification: CaseClassification | None = None,
                 u0: np.ndarray | None = None) -> SolveReport:
    """Newton on the gradient in the spectral-gap case.

    When the slope-gap condition holds, every Newton system is certified
    nonresonant and the iteration runs undamped; otherwise the step norm
    is capped by a trust region.
    """
    if classification is None:
        classification = classify(spec, spectrum)
    if classification.case is not Case.GAP:
        raise UnsupportedCaseError(classification)
    k = classification.k
    f2 = check_f2_gap(spec, spectrum, k) if spec.slope_range else None
    f2_ok = bool(f2 and f2.passed)
    start = np.zeros(op.size) if u0 is None else np.asarray(u0, dtype=float)
    trust = None if f2_ok else norm_Z(op, start) + 1.0
    u, res, its, _ = _run_newton_rootfind(
        op, spec, start, opts.tol, opts.max_iter, f2_certified=f2_ok,
        trust_radius=trust)
    return SolveReport(solution=u, case=classification,
                       j_value=eval_J(op, spec, u), residual_inf=res,
                       iterations=its, converged=True, seed=opts.seed,
                       tol=opts.tol)


def uniqueness_probe(op: AssembledOperator, spectrum: Spectrum,
                     spec: NonlinearitySpec, k: int, n_starts: int = 8,
                     opts: SolverOptions = SolverOptions()) -> UniquenessVerdict:
    """Multi-start search for distinct weak solutions.

    Initial iterates have eigenbasis components uniform in [-10, 10].  The
    classification gate is deliberately bypassed so resonant
    counterexamples can be probed; singular Newton systems fall back to
    minimum-norm steps.
    """
    f2 = None
    if spec.slope_range is not None:
        f2 = check_f2_gap(spec, spectrum, k)
    rng = np.random.default_rng(opts.seed)
    solutions = []
    for _ in range(n_starts):
        coeffs = rng.uniform(-10.0, 10.0, size=spectrum.size)
        u0 = spectrum.eigenvectors @ coeffs
        try:
            u, res, _, _ = _run_newton_rootfind(
                op, spec, u0, opts.tol, opts.max_iter, f2_certified=False)
        except NonConvergenceError:
            return UniquenessVerdict(kind="Inconclusive", n_starts=n_starts,
                                     seed=opts.seed,
                                     f2_passed=f2.passed if f2 else None)
        solutions.append(u)
    max_dist = 0.0
    for i in range(len(solutions)):
        for j in range(i + 1, len(solutions)):
            max_dist = max(max_dist, norm_Z(op, solutions[i] - solutions[j]))
    rep = [solutions[0]]
    for u in solutions[1:]:
        if min(norm_Z(op, u - v) for v in rep) > 1.0e-8:
            rep.append(u)
    kind = "Unique" if max_dist <= 1.0e-8 else "MultipleFound"
    return UniquenessVerdict(kind=kind, max_pairwise_z=max_dist,
                             representatives=tuple(rep), n_starts=n_starts,
                             seed=opts.seed,
                             f2_passed=f2.passed if f2 else None)


# ---------------------------------------------------------------------------
# saddle geometry probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusSample:
    radius: float
    extreme_ratio_l2: float  # J / |u|_L2^2 at the extreme sample
    extreme_ratio_z: float   # J / |u|_Z^2 at the extreme sample
    extreme_j: float

    def to_dict(self) -> dict:
        return {"radius": self.radius,
                "extreme_ratio_l2": self.extreme_ratio_l2,
                "extreme_ratio_z": self.extreme_ratio_z,
                "extreme_j": self.extreme_j}


@dataclass(frozen=True)
class GeometryProbe:
    mode: str  # "gap" | "coercive"
    k: int
    head: tuple = ()   # max over the head sphere, per radius
    tail: tuple = ()   # min over the tail cone, per radius
    floor_estimate: float = math.nan  # sampled min of J over the tail space
    separated: bool | None = None
    seed: int = 0

    def to_dict(self) -> dict:
        return {"mode": self.mode, "k": self.k,
                "head": [h.to_dict() for h in self.head],
                "tail": [t.to_dict() for t in self.tail],
                "floor_estimate": self.floor_estimate,
                "separated": self.separated, "seed": self.seed}


def _sphere_samples(rng, dim: int, n_random: int) -> np.ndarray:
    """Unit directions: deterministic +-axes followed by random ones."""
    axes = np.concatenate([np.eye(dim), -np.eye(dim)])
    if n_random > 0:
        raw = rng.standard_normal((n_random, dim))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        return np.concatenate([axes, raw])
    return axes


def _evaluate_modes(op, spec, spectrum, mode_idx, direction, z_radius):
    """Scale an eigen-coefficient direction to the given Z radius."""
    lam = spectrum.eigenvalues[mode_idx]
    z_sq = float(np.sum(lam * direction ** 2))
    scale = z_radius / math.sqrt(z_sq)
    coeffs = scale * direction
    u = spectrum.eigenvectors[:, mode_idx] @ coeffs
    l2_sq = float(np.sum(coeffs ** 2))  # eigenvectors are L2-orthonormal
    j = eval_J(op, spec, u)
    return j, l2_sq, z_radius ** 2


def geometry_probe(op: AssembledOperator, spectrum: Spectrum,
                   spec: NonlinearitySpec, k: int,
                   radii=(10.0, 100.0, 1000.0), n_samples: int = 64,
                   seed: int = 42) -> GeometryProbe:
    """Sample the energy landscape split by the head/tail decomposition.

    For k >= 1: on each Z-sphere of radius T in the head space the maximum
    energy ratio is recorded; in the tail space samples are taken at
    Z-norms in [T/10, T] (plus small norms for the floor estimate) and the
    minimum ratio recorded.  Energy ratios are reported both per unit
    squared Z-norm (the sign statements of the saddle geometry) and per
    unit squared L2-norm, whose extremes approach (lambda_j - slope)/2
    exactly.  k = 0 probes the whole space, the coercive geometry.
    """
    radii = tuple(sorted(float(r) for r in radii))
    rng = np.random.default_rng(seed)
    m = spectrum.size

    def scan(mode_idx, z_norms, reduce_max):
        dim = len(mode_idx)
        dirs = _sphere_samples(rng, dim, max(n_samples - 2 * dim, 0))
        best = None
        for z in z_norms:
            for d in dirs:
                j, l2_sq, z_sq = _evaluate_modes(op, spec, spectrum,
                                                 mode_idx, d, z)
                cand = (j / l2_sq, j / z_sq, j)
                if best is None:
                    best = cand
                elif reduce_max and cand[0] > best[0]:
                    best = cand
                elif not reduce_max and cand[0] < best[0]:
                    best = cand
        return best

    if k == 0:
        samples = []
        all_modes = np.arange(m)
        for t_rad in radii:
            lo, ratio_z, j = scan(all_modes, [t_rad], reduce_max=False)
            samples.append(RadiusSample(t_rad, lo, ratio_z, j))
        separated = all(s.extreme_ratio_l2 > 0.0 for s in samples)
        return GeometryProbe(mode="coercive", k=0, head=(),
                             tail=tuple(samples),
                             floor_estimate=min(s.extreme_j for s in samples),
                             separated=separated, seed=seed)

    if not 1 <= k < m:
        raise InvalidParameterError(f"k must lie in [0, {m - 1}], got {k}")
    head_idx = np.arange(k)
    tail_idx = np.arange(k, m)

    head_samples = []
    for t_rad in radii:
        hi, ratio_z, j = scan(head_idx, [t_rad], reduce_max=True)
        head_samples.append(RadiusSample(t_rad, hi, ratio_z, j))

    tail_samples = []
    floor = math.inf
    for t_rad in radii:
        z_norms = np.geomspace(t_rad / 10.0, t_rad, 4)
        lo, ratio_z, j = scan(tail_idx, z_norms, reduce_max=False)
        tail_samples.append(RadiusSample(t_rad, lo, ratio_z, j))
        floor = min(floor, j)
    # floor of J over the tail space at small norms (the lower barrier)
    small = np.geomspace(0.1, radii[0] / 10.0, 4)
    lo_small = scan(tail_idx, small, reduce_max=False)
    floor = min(floor, lo_small[2])

    head_max_j = head_samples[-1].extreme_j
    separated = head_max_j < min(floor, min(t.extreme_j for t in tail_samples))
    return GeometryProbe(mode="gap", k=k, head=tuple(head_samples),
                         tail=tuple(tail_samples), floor_estimate=floor,
                         separated=separated, seed=seed)


def morse_index(op: AssembledOperator, spec: NonlinearitySpec, u) -> int:
    """Number of negative eigenvalues of the Hessian A - D(u)."""
    hessian = op.stiffness - jacobian_mass(op, spec, u)
    vals = scipy.linalg.eigvalsh(hessian)
    return int(np.sum(vals < 0.0))
