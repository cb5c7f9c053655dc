"""Closed-form engine: phi1, spectral solutions, time substitution, pairs."""
import math

import mpmath
import numpy as np
import pytest

from planebody import (
    BlowupError,
    CouplingSpec,
    DefectiveMatrixError,
    GeneralizedParams,
    OriginError,
    PairSpec,
    PairState,
    PlaneState,
    SimilaritySpec,
    eval_center,
    eval_f,
    eval_generalized,
    eval_pair,
    eval_pair_solution,
    eval_z,
    exact_states,
    pair_solve,
    phi1,
    rhs_complex,
    rhs_pair,
    row_sums_zero,
    similarity_trajectory,
    spectral_solve,
    tau_map,
    to_complex,
    zero_couplings,
)
from planebody.exact import CenterSolution
from planebody.model import alpha_matrix

from _util import random_couplings, random_state


def mp_phi1(x: complex) -> complex:
    with mpmath.workdps(50):
        mx = mpmath.mpc(x)
        if mx == 0:
            return 1.0 + 0.0j
        return complex(mpmath.expm1(mx) / mx)


def test_phi1_frozen_values():
    assert phi1(0.0) == 1.0 + 0.0j
    assert abs(phi1(1.0) - (math.e - 1.0)) < 1e-15
    assert abs(phi1(-1.0) - (1.0 - 1.0 / math.e)) < 1e-15
    # (exp(i pi) - 1)/(i pi) = 2i/pi
    assert abs(phi1(1j * math.pi) - 2j / math.pi) < 1e-15


def test_phi1_matches_mpmath():
    rng = np.random.default_rng(30)
    for _ in range(200):
        r = 10.0 ** rng.uniform(-8.0, 2.0)
        ang = rng.uniform(0.0, 2.0 * np.pi)
        x = r * complex(np.cos(ang), np.sin(ang))
        ref = mp_phi1(x)
        assert abs(phi1(x) - ref) <= 5e-15 * abs(ref)


def test_phi1_branch_seam():
    # the series and expm1 branches must agree to a few ulp at the switch
    rng = np.random.default_rng(31)
    for _ in range(200):
        r = 1e-4 * (1.0 + rng.uniform(-0.02, 0.02))
        ang = rng.uniform(0.0, 2.0 * np.pi)
        x = r * complex(np.cos(ang), np.sin(ang))
        ref = mp_phi1(x)
        assert abs(phi1(x) - ref) <= 1e-15 * abs(ref)


def test_phi1_small_argument_expansion():
    rng = np.random.default_rng(32)
    for _ in range(100):
        r = 10.0 ** rng.uniform(-9.0, -6.0)
        ang = rng.uniform(0.0, 2.0 * np.pi)
        x = r * complex(np.cos(ang), np.sin(ang))
        # x^2/6 plus an ulp of the unit-sized result
        assert abs(phi1(x) - (1.0 + x / 2.0)) <= abs(x) ** 2 / 5.0 + 5e-16


def test_phi1_array_input():
    x = np.array([0.0, 1.0, 1e-6, 1j * np.pi])
    out = phi1(x)
    assert out.shape == (4,)
    assert out[0] == 1.0
    assert abs(out[3] - 2j / np.pi) < 1e-15


def test_spectral_circle():
    # no coupling, z0 = 1, z'0 = i: unit circle z = exp(i t)
    sol = spectral_solve(zero_couplings(1), to_complex(PlaneState([[1.0, 0.0]], [[0.0, 1.0]])))
    assert np.allclose(sol.eigenvalues, [0.0], atol=1e-15)
    for t in (0.3, 1.7, np.pi, 2.0 * np.pi, -2.4):
        st = eval_z(sol, t)
        assert abs(st.z[0] - np.exp(1j * t)) < 1e-14
        assert abs(st.zdot[0] - 1j * np.exp(1j * t)) < 1e-14


def test_spectral_initial_conditions_reproduced():
    rng = np.random.default_rng(33)
    for _ in range(40):
        n = int(rng.integers(1, 7))
        c = random_couplings(rng, n)
        cs = to_complex(random_state(rng, n))
        sol = spectral_solve(c, cs)
        st0 = eval_z(sol, 0.0)
        assert np.array_equal(st0.z, cs.z)  # bitwise: exponent is exactly zero
        assert np.max(np.abs(st0.zdot - cs.zdot)) < 1e-13 * max(1.0, np.max(np.abs(cs.zdot)))
        f0 = eval_f(sol, 0.0)
        assert np.max(np.abs(f0 - cs.zdot / cs.z)) < 1e-12


def test_eval_f_satisfies_linear_law():
    # centered difference of f against A f
    rng = np.random.default_rng(34)
    c = CouplingSpec(np.zeros((2, 2)), np.diag([5.0, 7.0]))
    cs = to_complex(random_state(rng, 2))
    sol = spectral_solve(c, cs)
    a = alpha_matrix(c)
    h = 1e-4
    for t in (0.0, 0.4, 1.3):
        fd = (eval_f(sol, t + h) - eval_f(sol, t - h)) / (2.0 * h)
        law = a @ eval_f(sol, t)
        assert np.max(np.abs(fd - law)) < 5e-6


def test_eval_z_satisfies_equation_of_motion():
    rng = np.random.default_rng(35)
    for _ in range(15):
        n = int(rng.integers(1, 6))
        c = random_couplings(rng, n)
        cs = to_complex(random_state(rng, n))
        sol = spectral_solve(c, cs)
        h = 1e-3
        for t in (0.2, 0.9):
            zp, z0, zm = (eval_z(sol, t + h), eval_z(sol, t), eval_z(sol, t - h))
            fd_acc = (zp.z - 2.0 * z0.z + zm.z) / h**2
            fd_vel = (zp.z - zm.z) / (2.0 * h)
            acc = rhs_complex(c, z0)
            scale = max(1.0, float(np.max(np.abs(acc))))
            assert np.max(np.abs(fd_acc - acc)) < 1e-4 * scale
            assert np.max(np.abs(fd_vel - z0.zdot)) < 1e-5 * max(1.0, np.max(np.abs(z0.zdot)))


def test_eval_z_residual_quadratic_in_h():
    # halving h must cut the finite-difference defect by about 4; the
    # couplings are strong enough that truncation dominates roundoff
    c = CouplingSpec(np.zeros((2, 2)), np.diag([5.0, 7.0]))
    s = PlaneState([[1.0, 0.0], [0.0, 1.0]], [[0.1, 1.0], [-1.0, 0.2]])
    sol = spectral_solve(c, to_complex(s))

    def residual(h, t=0.6):
        zp, z0, zm = (eval_z(sol, t + h), eval_z(sol, t), eval_z(sol, t - h))
        fd = (zp.z - 2.0 * z0.z + zm.z) / h**2
        return float(np.max(np.abs(fd - rhs_complex(c, z0))))

    r1 = residual(1e-3)
    r2 = residual(5e-4)
    assert r1 < 2e-4
    assert 3.2 < r1 / r2 < 4.8


def test_double_exponential_growth_frozen():
    # coupling 1, z0 = 1, z'0 = 1: log z(t) = exp(t) - 1 exactly
    c = CouplingSpec([[1.0]], [[0.0]])
    sol = spectral_solve(c, to_complex(PlaneState([[1.0, 0.0]], [[1.0, 0.0]])))
    for t in (1.0, 2.0, 3.0):
        st = eval_z(sol, t)
        assert abs(math.log(abs(st.z[0])) - math.expm1(t)) < 1e-10


def test_blowup_guard_both_directions():
    c = CouplingSpec([[1.0]], [[0.0]])
    sol = spectral_solve(c, to_complex(PlaneState([[1.0, 0.0]], [[1.0, 0.0]])))
    with pytest.raises(BlowupError) as info:
        eval_z(sol, 7.0)  # exp(7) - 1 > 700
    assert "escape" in str(info.value)
    assert info.value.time == 7.0
    sol = spectral_solve(c, to_complex(PlaneState([[1.0, 0.0]], [[-1.0, 0.0]])))
    with pytest.raises(BlowupError) as info:
        eval_z(sol, 7.0)
    assert "collapse" in str(info.value)
    # just inside the limit still evaluates
    st = eval_z(sol, math.log(699.0))
    assert np.isfinite(st.z[0])


def test_spectral_solve_guards():
    c = zero_couplings(2)
    with pytest.raises(OriginError):
        spectral_solve(c, to_complex(PlaneState([[1e-14, 0.0], [1.0, 0.0]], np.zeros((2, 2)))))
    with pytest.raises(ValueError):
        spectral_solve(zero_couplings(3), to_complex(PlaneState([[1.0, 0.0]], [[0.0, 0.0]])))


def test_degenerate_representable():
    # rank-deficient coupling with uniform log-derivative: still solvable
    c = CouplingSpec([[1.0, -1.0], [1.0, -1.0]], np.zeros((2, 2)))
    eta = 0.3 + 0.7j
    r0 = np.array([[1.0, 0.0], [0.0, 1.0]])
    v0 = np.stack([(eta * (r0[:, 0] + 1j * r0[:, 1])).real,
                   (eta * (r0[:, 0] + 1j * r0[:, 1])).imag], axis=1)
    sol = spectral_solve(c, to_complex(PlaneState(r0, v0)))
    for t in (0.0, 0.7, 1.9):
        st = eval_z(sol, t)
        want = (r0[:, 0] + 1j * r0[:, 1]) * np.exp(eta * t)
        assert np.max(np.abs(st.z - want)) < 1e-12 * max(1.0, np.max(np.abs(want)))


def test_degenerate_unrepresentable_raises():
    c = CouplingSpec([[1.0, -1.0], [1.0, -1.0]], np.zeros((2, 2)))
    s = PlaneState([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, -2.0]])
    with pytest.raises(DefectiveMatrixError):
        spectral_solve(c, to_complex(s))
    # a true Jordan block is rejected the same way
    c = CouplingSpec([[0.0, 1.0], [0.0, 0.0]], np.zeros((2, 2)))
    s = PlaneState([[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(DefectiveMatrixError):
        spectral_solve(c, to_complex(s))


def test_tau_map_periodic_reduction():
    g = GeneralizedParams(lam=0.0, omega=1.0)
    assert tau_map(g, 2.0 * math.pi) == 0.0  # exact thanks to phase reduction
    assert tau_map(g, 0.0) == 0.0
    # tau(pi) = (exp(i pi) - 1)/i = 2i
    assert abs(tau_map(g, math.pi) - 2j) < 1e-15
    g2 = GeneralizedParams(lam=0.0, omega=2.0)
    assert tau_map(g2, math.pi) == 0.0
    assert abs(tau_map(g2, 20.0 * math.pi)) < 1e-13
    # lam != 0: plain t phi1(eta t)
    g3 = GeneralizedParams(lam=0.5, omega=1.0)
    eta = 0.5 + 1.0j
    t = 1.3
    assert abs(tau_map(g3, t) - t * phi1(eta * t)) == 0.0


def test_eval_generalized_satisfies_equation_of_motion():
    rng = np.random.default_rng(36)
    for _ in range(10):
        n = int(rng.integers(1, 5))
        c = random_couplings(rng, n)
        cs = to_complex(random_state(rng, n))
        sol = spectral_solve(c, cs)
        g = GeneralizedParams(lam=0.3, omega=1.2)
        eta = complex(g.lam, g.omega)
        alpha = alpha_matrix(c)
        h = 1e-3
        for t in (0.5, 1.1):
            sp, s0, sm = (eval_generalized(sol, g, t + h),
                          eval_generalized(sol, g, t),
                          eval_generalized(sol, g, t - h))
            fd_acc = (sp.z - 2.0 * s0.z + sm.z) / h**2
            f = s0.zdot / s0.z
            law = s0.zdot * f + eta * s0.zdot + s0.z * ((alpha * np.exp(eta * t)) @ f)
            scale = max(1.0, float(np.max(np.abs(law))))
            assert np.max(np.abs(fd_acc - law)) < 2e-4 * scale
            fd_vel = (sp.z - sm.z) / (2.0 * h)
            assert np.max(np.abs(fd_vel - s0.zdot)) < 1e-4 * max(1.0, np.max(np.abs(s0.zdot)))


def test_eval_generalized_recurrence():
    # lam = 0, omega = 1: the whole state recurs with period 2 pi
    rng = np.random.default_rng(37)
    c = random_couplings(rng, 3)
    cs = to_complex(random_state(rng, 3))
    sol = spectral_solve(c, cs)
    g = GeneralizedParams(lam=0.0, omega=1.0)
    t = 0.8
    a = eval_generalized(sol, g, t)
    b = eval_generalized(sol, g, t + 2.0 * math.pi)
    assert np.max(np.abs(a.z - b.z)) < 1e-12
    assert np.max(np.abs(a.zdot - b.zdot)) < 1e-12


def test_eval_center_frozen_and_linear():
    # mu = 0: straight line Z0 + Zdot0 t
    cs = CenterSolution(z0=np.array([1.0 + 1.0j]), zdot0=np.array([0.5 - 0.25j]),
                        mu=np.array([0.0 + 0.0j]))
    z, zdot = eval_center(cs, 4.0)
    assert z[0] == (1.0 + 1.0j) + 4.0 * (0.5 - 0.25j)
    assert zdot[0] == 0.5 - 0.25j
    # mu = i: returns to the start after 2 pi
    cs = CenterSolution(z0=np.array([2.0 + 0.0j]), zdot0=np.array([0.0 + 1.0j]),
                        mu=np.array([0.0 + 1.0j]))
    z, zdot = eval_center(cs, 2.0 * math.pi)
    assert abs(z[0] - 2.0) < 1e-14
    assert abs(zdot[0] - 1j) < 1e-14
    # second derivative equals mu * first derivative
    cs = CenterSolution(z0=np.array([1.0 + 0.5j]), zdot0=np.array([-0.3 + 0.8j]),
                        mu=np.array([0.4 - 1.1j]))
    h = 1e-4
    for t in (0.3, 2.2):
        zp = eval_center(cs, t + h)[0]
        z0 = eval_center(cs, t)[0]
        zm = eval_center(cs, t - h)[0]
        fd = (zp - 2.0 * z0 + zm) / h**2
        law = cs.mu * eval_center(cs, t)[1]
        assert np.max(np.abs(fd - law)) < 1e-6


def test_pair_solution_initial_and_equation():
    rng = np.random.default_rng(38)
    n = 2
    c = random_couplings(rng, n)
    p = PairSpec(base=c, lam=np.array([0.1, -0.3]), omega=np.array([1.0, 0.7]))
    plus = random_state(rng, n)
    minus = PlaneState(plus.positions + rng.standard_normal((n, 2)) + 2.5,
                       0.3 * rng.standard_normal((n, 2)))
    s0 = PairState(plus=plus, minus=minus)
    ps = pair_solve(p, s0)
    st0 = eval_pair_solution(ps, 0.0)
    assert np.max(np.abs(st0.plus.positions - plus.positions)) < 1e-12
    assert np.max(np.abs(st0.minus.velocities - minus.velocities)) < 1e-12
    # finite-difference accelerations against the doubled force law
    h = 1e-3
    for t in (0.4, 1.2):
        sp = eval_pair_solution(ps, t + h)
        s0t = eval_pair_solution(ps, t)
        sm = eval_pair_solution(ps, t - h)
        acc_p, acc_m = rhs_pair(p, s0t)
        fd_p = (sp.plus.positions - 2.0 * s0t.plus.positions + sm.plus.positions) / h**2
        fd_m = (sp.minus.positions - 2.0 * s0t.minus.positions + sm.minus.positions) / h**2
        assert np.max(np.abs(fd_p - acc_p)) < 2e-4 * max(1.0, np.max(np.abs(acc_p)))
        assert np.max(np.abs(fd_m - acc_m)) < 2e-4 * max(1.0, np.max(np.abs(acc_m)))


def test_pair_shift_invariance():
    rng = np.random.default_rng(39)
    n = 3
    c = random_couplings(rng, n)
    p = PairSpec(base=c, lam=rng.standard_normal(n), omega=rng.standard_normal(n))
    plus = random_state(rng, n)
    minus = PlaneState(plus.positions + rng.standard_normal((n, 2)) + 2.0,
                       0.5 * rng.standard_normal((n, 2)))
    shift = np.array([40.0, -7.0])
    s0 = PairState(plus=plus, minus=minus)
    s0s = PairState(
        plus=PlaneState(plus.positions + shift, plus.velocities),
        minus=PlaneState(minus.positions + shift, minus.velocities),
    )
    for t in (0.5, 1.5):
        a = eval_pair(p, s0, t)
        b = eval_pair(p, s0s, t)
        scale = max(1.0, float(np.max(np.abs(b.plus.positions))))
        assert np.max(np.abs(b.plus.positions - a.plus.positions - shift)) < 1e-12 * scale
        assert np.max(np.abs(b.minus.positions - a.minus.positions - shift)) < 1e-12 * scale
        assert np.max(np.abs(b.plus.velocities - a.plus.velocities)) < 1e-12 * scale
        assert np.max(np.abs(b.minus.velocities - a.minus.velocities)) < 1e-12 * scale


def test_similarity_matches_spectral_route():
    eta = 0.3 + 0.7j
    r0 = np.array([[1.0, 0.0], [0.0, 1.0]])
    spec = SimilaritySpec(eta=eta, r0=r0)
    c = CouplingSpec([[1.0, -1.0], [1.0, -1.0]], np.zeros((2, 2)))
    s0 = similarity_trajectory(spec, 0.0)
    sol = spectral_solve(c, to_complex(s0))
    for t in (0.0, 0.6, 1.4, 2.0):
        a = similarity_trajectory(spec, t)
        b = exact_states(sol, [t])[0]
        assert np.max(np.abs(a.positions - b.positions)) < 1e-12 * max(1.0, np.max(np.abs(a.positions)))
        assert np.max(np.abs(a.velocities - b.velocities)) < 1e-12 * max(1.0, np.max(np.abs(a.velocities)))


def test_similarity_satisfies_force_law():
    from planebody import rhs_base

    eta = 0.3 + 0.7j
    r0 = np.array([[1.0, 0.0], [0.0, 1.0], [0.4, -0.9]])
    spec = SimilaritySpec(eta=eta, r0=r0)
    # any matrix with zero row sums supports the similarity motion
    beta = np.array([[1.0, -0.5, -0.5], [0.2, -0.9, 0.7], [0.0, 1.0, -1.0]])
    gamma = np.array([[0.5, -0.5, 0.0], [0.0, 0.3, -0.3], [-1.0, 0.5, 0.5]])
    c = CouplingSpec(beta, gamma)
    assert row_sums_zero(c)
    h = 1e-3
    for t in (0.3, 1.1):
        sp = similarity_trajectory(spec, t + h)
        s0 = similarity_trajectory(spec, t)
        sm = similarity_trajectory(spec, t - h)
        fd = (sp.positions - 2.0 * s0.positions + sm.positions) / h**2
        assert np.max(np.abs(fd - rhs_base(c, s0))) < 1e-4


def test_row_sums_zero():
    assert row_sums_zero(CouplingSpec([[1.0, -1.0], [1.0, -1.0]], np.zeros((2, 2))))
    assert row_sums_zero(CouplingSpec([[1.0, -1.0], [1.0, -1.0]],
                                      [[2.0, -2.0], [0.0, 0.0]]))
    assert not row_sums_zero(CouplingSpec([[1.0, 0.0], [0.0, 1.0]], np.zeros((2, 2))))
    assert not row_sums_zero(CouplingSpec([[1.0, -1.0], [1.0, -1.0]],
                                          [[1.0, 0.0], [0.0, 0.0]]))


def test_exact_states_grid():
    rng = np.random.default_rng(40)
    c = random_couplings(rng, 2)
    s = random_state(rng, 2)
    sol = spectral_solve(c, to_complex(s))
    times = np.linspace(0.0, 1.0, 5)
    states = exact_states(sol, times)
    assert len(states) == 5
    assert np.max(np.abs(states[0].positions - s.positions)) < 1e-14
    g = GeneralizedParams(lam=0.1, omega=0.9)
    states_g = exact_states(sol, times, g=g)
    assert np.max(np.abs(states_g[0].positions - s.positions)) < 1e-14
