"""Long-time motion classification from the coupling spectrum.

The closed-form solution is built from exp(a_k t) over the eigenvalues
a_k of the coupling matrix, so the sign pattern of the real parts and
the rational structure of the imaginary parts decide the asymptotics:
all real parts negative means every particle freezes (velocities die),
purely imaginary spectra give multiply periodic motion, and a purely
imaginary spectrum with pairwise rational frequency ratios makes every
trajectory close after a common period.  A positive real part drives
double-exponential escape or collapse; a zero eigenvalue admits
self-similar motions.

detect_period confirms periods empirically on sampled trajectories.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import InsufficientSpanError
from .exact import row_sums_zero
from .integrate import Trajectory
from .model import CouplingSpec, alpha_matrix

MAX_FREQUENCY_MULTIPLE = 64
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MotionClass:
    """Spectrum flags plus the common period when one exists.

    completely_periodic is the minimal common period (requires
    all_imaginary); row_sums_zero is None when only eigenvalues, not
    the matrix itself, were available.
    """

    all_damped: bool
    has_imaginary: bool
    all_imaginary: bool
    completely_periodic: float | None
    has_zero_mode: bool
    has_unstable: bool
    row_sums_zero: bool | None = None

    def __post_init__(self):
        if self.completely_periodic is not None and not self.all_imaginary:
            raise ValueError("a common period requires a purely imaginary spectrum")
        if self.all_damped and self.has_unstable:
            raise ValueError("all_damped and has_unstable are mutually exclusive")


def classify(eigenvalues, tol: float | None = None) -> MotionClass:
    """Classify a coupling spectrum.

    tol separates "zero" (|a| <= tol) from "purely imaginary"
    (|Re a| <= tol < |a|); it defaults to 1e-9 * max|a_k| with an
    absolute floor of 1e-12.
    """
    w = np.asarray(eigenvalues, dtype=np.complex128).ravel()
    if w.size == 0:
        raise ValueError("need at least one eigenvalue")
    if tol is None:
        tol = max(1e-9 * float(np.max(np.abs(w))), 1e-12)
    zero = np.abs(w) <= tol
    imag = (np.abs(w.real) <= tol) & ~zero
    damped = w.real < -tol
    unstable = w.real > tol
    all_imaginary = bool(np.all(imag))
    period = None
    if all_imaginary:
        period = rational_period(w.imag)
    return MotionClass(
        all_damped=bool(np.all(damped)),
        has_imaginary=bool(np.any(imag)),
        all_imaginary=all_imaginary,
        completely_periodic=period,
        has_zero_mode=bool(np.any(zero)),
        has_unstable=bool(np.any(unstable)),
    )


def classify_couplings(c: CouplingSpec, tol: float | None = None) -> MotionClass:
    """Classify a coupling matrix, filling the row-sum flag as well."""
    w = linalg.eigenvalues(alpha_matrix(c))
    base = classify(w, tol)
    return MotionClass(
        all_damped=base.all_damped,
        has_imaginary=base.has_imaginary,
        all_imaginary=base.all_imaginary,
        completely_periodic=base.completely_periodic,
        has_zero_mode=base.has_zero_mode,
        has_unstable=base.has_unstable,
        row_sums_zero=row_sums_zero(c),
    )


def rational_period(frequencies, tol: float = 1e-9) -> float | None:
    """Minimal common period 2*pi/w0 of frequencies that are integer
    multiples (magnitude <= 64) of a common w0, or None.

    Ratios are rationalized by continued fractions (best rational
    approximation with denominator <= 64) and accepted when they match
    to the given relative tolerance.
    """
    w = np.abs(np.asarray(frequencies, dtype=np.float64).ravel())
    if w.size == 0:
        return None
    if np.any(w == 0.0):
        raise ValueError("frequencies must be nonzero")
    w = np.sort(w)
    base = float(w[0])
    lcm = 1
    for wk in w:
        ratio = float(wk) / base
        frac = Fraction(ratio).limit_denominator(MAX_FREQUENCY_MULTIPLE)
        if frac.numerator <= 0 or frac.numerator > MAX_FREQUENCY_MULTIPLE:
            return None
        if abs(ratio - float(frac)) > tol * ratio:
            return None
        lcm = lcm * frac.denominator // math.gcd(lcm, frac.denominator)
    w0 = base / lcm
    multiples = [round(float(wk) / w0) for wk in w]
    if any(m < 1 for m in multiples):
        return None
    if any(abs(m * w0 - float(wk)) > tol * float(wk) for m, wk in zip(multiples, w)):
        return None
    g = multiples[0]
    for m in multiples[1:]:
        g = math.gcd(g, m)
    w0 *= g
    if max(m // g for m in multiples) > MAX_FREQUENCY_MULTIPLE:
        return None
    return TWO_PI / w0


def _flatten_states(traj: Trajectory) -> np.ndarray:
    m = len(traj.times)
    return np.concatenate(
        [traj.positions.reshape(m, -1), traj.velocities.reshape(m, -1)], axis=1
    )


def _fd_acceleration(vel: np.ndarray, dt: float) -> np.ndarray:
    """Fourth-order finite-difference time derivative of sampled velocities."""
    m = vel.shape[0]
    acc = np.empty_like(vel)
    if m < 5:
        acc[:] = np.gradient(vel, dt, axis=0)
        return acc
    acc[2:-2] = (vel[:-4] - 8.0 * vel[1:-3] + 8.0 * vel[3:-1] - vel[4:]) / (12.0 * dt)
    for i in (0, 1):
        acc[i] = (-3.0 * vel[i] + 4.0 * vel[i + 1] - vel[i + 2]) / (2.0 * dt)
        acc[-1 - i] = (3.0 * vel[-1 - i] - 4.0 * vel[-2 - i] + vel[-3 - i]) / (2.0 * dt)
    return acc


class _StateInterpolant:
    """C1 interpolation of a sampled trajectory on a uniform grid.

    Positions use Hermite data (positions, velocities); velocities use
    Hermite data (velocities, finite-difference accelerations), so the
    interpolation error is O(dt^4) throughout.
    """

    def __init__(self, traj: Trajectory):
        m = len(traj.times)
        self.t0 = float(traj.times[0])
        self.dt = float(traj.times[1] - traj.times[0])
        self.pos = traj.positions.reshape(m, -1)
        self.vel = traj.velocities.reshape(m, -1)
        self.acc = _fd_acceleration(self.vel, self.dt)
        self.m = m

    def states(self, ts: np.ndarray) -> np.ndarray:
        u = (np.asarray(ts, dtype=np.float64) - self.t0) / self.dt
        i = np.clip(np.floor(u).astype(int), 0, self.m - 2)
        theta = (u - i)[:, None]
        t2 = theta * theta
        t3 = t2 * theta
        h00 = 2.0 * t3 - 3.0 * t2 + 1.0
        h10 = (t3 - 2.0 * t2 + theta) * self.dt
        h01 = -2.0 * t3 + 3.0 * t2
        h11 = (t3 - t2) * self.dt
        p = h00 * self.pos[i] + h10 * self.vel[i] + h01 * self.pos[i + 1] + h11 * self.vel[i + 1]
        v = h00 * self.vel[i] + h10 * self.acc[i] + h01 * self.vel[i + 1] + h11 * self.acc[i + 1]
        return np.concatenate([p, v], axis=1)


def _golden_minimize(fn, a: float, b: float, iterations: int = 60) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1 = fn(x1)
    f2 = fn(x2)
    for _ in range(iterations):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = fn(x2)
    return (a + b) / 2.0


def detect_period(traj: Trajectory, tol: float = 1e-6, eigenvalues=None) -> float | None:
    """Smallest period T with mean relative state distance |s(t+T) - s(t)| <= tol.

    Candidates come from rational_period over the nonzero frequencies
    when a purely imaginary (possibly zero-padded) spectrum is
    supplied, otherwise from minima of the lag-distance profile; each
    candidate is refined continuously before the tolerance test.  Constant trajectories return None.  Raises
    InsufficientSpanError when fewer than 3 samples are available or a
    spectrum-seeded candidate exceeds half the sampled span.
    """
    m = len(traj.times)
    if m < 3:
        raise InsufficientSpanError(f"{m} samples cannot confirm any period")
    dt = float(traj.times[1] - traj.times[0])
    steps = np.diff(traj.times)
    if np.max(np.abs(steps - dt)) > 1e-9 * abs(dt):
        raise ValueError("detect_period requires a uniform time grid")
    span = float(traj.times[-1] - traj.times[0])

    y = _flatten_states(traj)
    scale = float(np.max(np.sqrt(np.sum(y * y, axis=1))))
    if scale == 0.0:
        return None
    drift = np.sqrt(np.sum((y - y[0]) ** 2, axis=1)) / scale
    if float(np.max(drift)) <= tol:
        return None  # standstill, no meaningful period

    kmax = (m - 1) // 2
    lag_dist = np.empty(kmax + 1)
    lag_dist[0] = 0.0
    for k in range(1, kmax + 1):
        d = y[k:] - y[:-k]
        lag_dist[k] = float(np.mean(np.sqrt(np.sum(d * d, axis=1)))) / scale

    candidates: list[float] = []
    if eigenvalues is not None:
        w = np.asarray(eigenvalues, dtype=np.complex128).ravel()
        t_seed = None
        if w.size:
            wtol = max(1e-9 * float(np.max(np.abs(w))), 1e-12)
            freqs = w.imag[np.abs(w) > wtol]
            if np.all(np.abs(w.real) <= wtol) and freqs.size:
                t_seed = rational_period(freqs)
        if t_seed is not None:
            if t_seed > span / 2.0:
                raise InsufficientSpanError(
                    f"candidate period {t_seed:.6g} exceeds half the sampled span {span:.6g}"
                )
            candidates.append(t_seed)
    if not candidates:
        for k in range(2, kmax):
            if lag_dist[k] < lag_dist[k - 1] and lag_dist[k] <= lag_dist[k + 1]:
                candidates.append(k * dt)

    interp = _StateInterpolant(traj)
    count = max(1, m - kmax)
    head = np.asarray(traj.times[:count], dtype=np.float64)
    base_states = interp.states(head)

    def mean_distance(period: float) -> float:
        d = interp.states(head + period) - base_states
        return float(np.mean(np.sqrt(np.sum(d * d, axis=1)))) / scale

    for t_cand in sorted(candidates):
        lo = max(dt, t_cand - dt)
        hi = min(span / 2.0, t_cand + dt)
        if hi <= lo:
            continue
        refined = _golden_minimize(mean_distance, lo, hi)
        if mean_distance(refined) <= tol:
            return refined
    return None
