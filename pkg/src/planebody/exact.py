"""Closed-form solution engine.

The log-derivatives f_j = z'_j / z_j satisfy the linear system
f' = A f with A = beta + i*gamma, so

    f_j(t) = sum_k phi_jk exp(a_k t),
    z_j(t) = z_j(0) exp( sum_k phi_jk t phi1(a_k t) ),

where a_k are the eigenvalues of A, the columns of phi are scaled
eigenvectors, and phi1(x) = (exp(x) - 1)/x continued through x = 0.
Row sums of phi reproduce f_j(0).

The generalized model (uniform velocity coupling lam + i*omega and
rotating couplings) reduces to the autonomous one through the complex
time substitution tau(t) = t phi1((lam + i*omega) t); evaluators for
pair sums and for pure similarity motions round out the module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DefectiveMatrixError, BlowupError, OriginError
from .model import (
    ComplexState,
    CouplingSpec,
    GeneralizedParams,
    ORIGIN_GUARD_RATIO,
    PairSpec,
    PairState,
    PlaneState,
    alpha_matrix,
    from_complex,
    perp,
    to_complex,
)

PHI1_SERIES_RADIUS = 1e-4
EXPONENT_LIMIT = 700.0
TWO_PI = 2.0 * math.pi

# residual gate for the degenerate-basis path in spectral_solve
_REPRESENTATION_RTOL = 1e-8


def _cexpm1(x: np.ndarray) -> np.ndarray:
    """exp(x) - 1 for complex x without cancellation near zero."""
    a = x.real
    b = x.imag
    re = np.expm1(a) * np.cos(b) - 2.0 * np.sin(b / 2.0) ** 2
    im = np.exp(a) * np.sin(b)
    return re + 1j * im


def phi1(x):
    """(exp(x) - 1) / x, entire in x, with phi1(0) = 1.

    Accepts real or complex scalars and arrays.  Inside |x| < 1e-4 the
    truncated series 1 + x/2 + x^2/6 + x^3/24 + x^4/120 is used; the
    two branches agree to within a few ulp at the switch.
    """
    arr = np.asarray(x, dtype=np.complex128)
    out = np.empty_like(arr)
    small = np.abs(arr) < PHI1_SERIES_RADIUS
    xs = arr[small]
    out[small] = 1.0 + xs * (1.0 / 2.0 + xs * (1.0 / 6.0 + xs * (1.0 / 24.0 + xs / 120.0)))
    xl = arr[~small]
    out[~small] = _cexpm1(xl) / xl
    if np.isscalar(x) or np.ndim(x) == 0:
        return complex(out[()])
    return out


@dataclass(frozen=True)
class SpectralSolution:
    """Spectrum, coefficient matrix (column k scales eigenvector k), z(0)."""

    eigenvalues: np.ndarray
    coefficients: np.ndarray
    z0: np.ndarray

    @property
    def n(self) -> int:
        return self.z0.shape[0]


def _degenerate_solve(a: np.ndarray, w: np.ndarray, v: np.ndarray, f0, z0, cond):
    """Spectral representation when the eigenbasis is numerically defective.

    Equal eigenvalues are collapsed onto one representative eigenvector
    per cluster.  The representation is accepted only when f(0) lies in
    the span of those representatives, which keeps the evaluated f(t)
    an actual solution of f' = A f.  Otherwise the defect is fatal.
    """
    n = a.shape[0]
    scale = float(np.max(np.abs(w))) if n else 0.0
    ctol = 1e-8 * max(scale, 1e-300)
    reps: list[int] = []
    for k in range(n):
        if all(abs(w[k] - w[j]) > ctol for j in reps):
            reps.append(k)
    vhat = v[:, reps]
    f0norm = float(np.sqrt(np.sum(np.abs(f0) ** 2)))
    coeffs = np.zeros((n, n), dtype=np.complex128)
    if f0norm > 0.0:
        gram = np.conj(vhat.T) @ vhat
        c = linalg.solve_linear(gram, np.conj(vhat.T) @ f0)
        residual = float(np.sqrt(np.sum(np.abs(vhat @ c - f0) ** 2)))
        if residual > _REPRESENTATION_RTOL * f0norm:
            raise DefectiveMatrixError(
                "coupling matrix is numerically defective (condition estimate "
                f"{cond:.3e}) and the initial log-derivative vector is not in "
                "the span of its well-determined eigenvectors "
                f"(representation residual {residual / f0norm:.3e})",
                condition_estimate=cond,
            )
        coeffs[:, reps] = vhat * c
    return SpectralSolution(eigenvalues=w.copy(), coefficients=coeffs, z0=np.array(z0))


def spectral_solve(c: CouplingSpec, initial: ComplexState) -> SpectralSolution:
    """Expand the initial data in the eigenbasis of the coupling matrix.

    Solves V coeff = z'(0)/z(0) so that the row sums of the coefficient
    matrix reproduce the initial log-derivatives.  A defective coupling
    matrix is accepted only when that vector is representable in the
    span of the reliable eigenvectors (e.g. similarity initial data on
    a rank-deficient matrix); anything else raises DefectiveMatrixError.
    """
    if c.n != initial.n:
        raise ValueError(f"coupling size {c.n} does not match state size {initial.n}")
    absz = np.abs(initial.z)
    if float(np.min(absz)) < ORIGIN_GUARD_RATIO * float(np.max(absz)):
        raise OriginError("initial state is inside the origin guard")
    f0 = initial.zdot / initial.z
    a = alpha_matrix(c)
    w, v, cond = linalg._eig_raw(a)
    if cond > linalg.DEFECT_THRESHOLD:
        return _degenerate_solve(a, w, v, f0, initial.z, cond)
    coeff = linalg.solve_linear(v, f0)
    # one refinement pass on the expansion keeps the row-sum identity tight
    coeff += linalg.solve_linear(v, f0 - v @ coeff)
    return SpectralSolution(
        eigenvalues=w, coefficients=v * coeff, z0=initial.z.copy()
    )


def eval_f(sol: SpectralSolution, t) -> np.ndarray:
    """Log-derivatives f(t); t may be real or complex."""
    return sol.coefficients @ np.exp(sol.eigenvalues * t)


def eval_z(sol: SpectralSolution, t) -> ComplexState:
    """Closed-form state at time t (real, or complex for time substitution).

    Raises BlowupError when any log-magnitude exponent leaves [-700, 700],
    which is where the double-exponential escape (or collapse onto the
    origin) stops being representable in double precision.
    """
    at = sol.eigenvalues * t
    exponent = sol.coefficients @ (t * phi1(at))
    worst = float(np.max(np.abs(exponent.real)))
    if worst > EXPONENT_LIMIT:
        j = int(np.argmax(np.abs(exponent.real)))
        kind = "escape" if exponent.real[j] > 0 else "collapse"
        raise BlowupError(
            f"particle {j + 1} exponent {exponent.real[j]:.6g} exceeds the "
            f"representable range at t = {t} (double-exponential {kind})",
            time=float(np.real(t)),
        )
    z = sol.z0 * np.exp(exponent)
    return ComplexState(z, sol.coefficients @ np.exp(at) * z)


def tau_map(g: GeneralizedParams, t: float) -> complex:
    """Complex time substitution tau(t) = t phi1((lam + i omega) t).

    For lam = 0 the phase omega*t is reduced modulo 2*pi first, so tau
    is periodic to the last bit and tau(2*pi/omega) is exactly zero
    whenever omega*t rounds onto a multiple of 2*pi.
    """
    if g.lam == 0.0 and g.omega != 0.0:
        theta = math.remainder(g.omega * t, TWO_PI)
        return (theta / g.omega) * phi1(1j * theta)
    eta = complex(g.lam, g.omega)
    return t * phi1(eta * t)


def _tau_dot(g: GeneralizedParams, t: float) -> complex:
    if g.lam == 0.0 and g.omega != 0.0:
        theta = math.remainder(g.omega * t, TWO_PI)
        return complex(math.cos(theta), math.sin(theta))
    return np.exp(complex(g.lam, g.omega) * t)


def eval_generalized(sol: SpectralSolution, g: GeneralizedParams, t: float) -> ComplexState:
    """State of the generalized model: base solution at tau(t), with the
    velocity picking up the chain-rule factor dtau/dt = exp((lam+i omega) t)."""
    base = eval_z(sol, tau_map(g, t))
    return ComplexState(base.z, base.zdot * _tau_dot(g, t))


@dataclass(frozen=True)
class CenterSolution:
    """Initial data and rates mu_j = lam_j + i omega_j for the pair sums."""

    z0: np.ndarray
    zdot0: np.ndarray
    mu: np.ndarray


def eval_center(cs: CenterSolution, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Pair-sum coordinates: Z_j(t) = Z_j(0) + Z'_j(0) t phi1(mu_j t).

    The derivative is Z'_j(0) exp(mu_j t), so both initial conditions
    (value and slope) are honored, including mu_j = 0.
    """
    z = cs.z0 + cs.zdot0 * (t * phi1(cs.mu * t))
    zdot = cs.zdot0 * np.exp(cs.mu * t)
    return z, zdot


@dataclass(frozen=True)
class PairSolution:
    """Difference spectral data plus center data for the doubled system."""

    relative: SpectralSolution
    center: CenterSolution


def pair_solve(p: PairSpec, initial: PairState) -> PairSolution:
    diff = PlaneState(
        initial.plus.positions - initial.minus.positions,
        initial.plus.velocities - initial.minus.velocities,
    )
    rel = spectral_solve(p.base, to_complex(diff))
    sums = initial.plus.positions + initial.minus.positions
    sumv = initial.plus.velocities + initial.minus.velocities
    center = CenterSolution(
        z0=sums[:, 0] + 1j * sums[:, 1],
        zdot0=sumv[:, 0] + 1j * sumv[:, 1],
        mu=p.lam + 1j * p.omega,
    )
    return PairSolution(relative=rel, center=center)


def eval_pair_solution(ps: PairSolution, t: float) -> PairState:
    rel = eval_z(ps.relative, t)
    zsum, zdotsum = eval_center(ps.center, t)
    zp = 0.5 * (zsum + rel.z)
    zm = 0.5 * (zsum - rel.z)
    vp = 0.5 * (zdotsum + rel.zdot)
    vm = 0.5 * (zdotsum - rel.zdot)
    return PairState(
        plus=PlaneState(np.stack([zp.real, zp.imag], 1), np.stack([vp.real, vp.imag], 1)),
        minus=PlaneState(np.stack([zm.real, zm.imag], 1), np.stack([vm.real, vm.imag], 1)),
    )


def eval_pair(p: PairSpec, initial: PairState, t: float) -> PairState:
    """Closed-form state of the doubled system at time t."""
    return eval_pair_solution(pair_solve(p, initial), t)


@dataclass(frozen=True)
class SimilaritySpec:
    """Self-similar motion: every particle follows r_j(0) scaled and rotated.

    Valid for coupling matrices whose rows sum to zero, because then the
    uniform log-derivative vector f_j = eta is a fixed point of f' = A f.
    """

    eta: complex
    r0: np.ndarray

    def __post_init__(self):
        r0 = np.array(self.r0, dtype=np.float64)
        if r0.ndim != 2 or r0.shape[1] != 2:
            raise ValueError(f"r0 must have shape (n, 2), got {r0.shape}")
        if not np.all(np.isfinite(r0)):
            raise ValueError("r0 contains non-finite entries")
        r0.setflags(write=False)
        object.__setattr__(self, "r0", r0)
        object.__setattr__(self, "eta", complex(self.eta))


def similarity_trajectory(spec: SimilaritySpec, t: float) -> PlaneState:
    """State of the similarity motion exp(lam t) (cos(w t) + sin(w t) perp) r(0)."""
    lam = spec.eta.real
    w = spec.eta.imag
    el = math.exp(lam * t)
    cw = math.cos(w * t)
    sw = math.sin(w * t)
    pos = el * (cw * spec.r0 + sw * perp(spec.r0))
    vel = el * ((lam * cw - w * sw) * spec.r0 + (lam * sw + w * cw) * perp(spec.r0))
    return PlaneState(pos, vel)


def row_sums_zero(c: CouplingSpec, tol: float | None = None) -> bool:
    """True when every row of beta + i gamma sums to zero (similarity condition)."""
    a = alpha_matrix(c)
    sums = np.abs(a @ np.ones(c.n))
    scale = float(np.max(np.abs(a)))
    if tol is None:
        tol = max(1e-9 * scale, 1e-12)
    return bool(np.max(sums) <= tol)


def exact_states(sol: SpectralSolution, times, g: GeneralizedParams | None = None):
    """Real-coordinate states over a time grid (base or generalized model)."""
    if g is None or (g.lam == 0.0 and g.omega == 0.0):
        return [from_complex(eval_z(sol, float(t))) for t in times]
    return [from_complex(eval_generalized(sol, g, float(t))) for t in times]
