"""State containers and the four force evaluators."""
import numpy as np
import pytest

from planebody import (
    ComplexState,
    CouplingSpec,
    GeneralizedParams,
    OriginError,
    PairCollisionError,
    PairSpec,
    PairState,
    PlaneState,
    alpha_matrix,
    from_complex,
    perp,
    rhs_base,
    rhs_complex,
    rhs_generalized,
    rhs_pair,
    to_complex,
    zero_couplings,
)
from planebody.model import check_origin_guard, couplings_at

from _util import random_couplings, random_state


def complex_acc(c, s, g=None, t=0.0):
    """Reference accelerations straight from the complex growth-rate law."""
    cs = to_complex(s)
    f = cs.zdot / cs.z
    alpha = alpha_matrix(c)
    acc = cs.zdot * f + cs.z * (alpha @ f)
    if g is not None:
        eta = g.lam + 1j * g.omega
        acc = acc + eta * cs.zdot + cs.z * ((alpha * np.exp(eta * t)) @ f) - cs.z * (alpha @ f)
    return np.stack([acc.real, acc.imag], axis=1)


def test_perp_quarter_turn():
    v = np.array([[1.0, 2.0], [-3.0, 0.5]])
    assert np.array_equal(perp(v), [[-2.0, 1.0], [-0.5, -3.0]])
    assert np.array_equal(perp(perp(v)), -v)


def test_coupling_validation():
    with pytest.raises(ValueError):
        CouplingSpec(np.zeros((2, 3)), np.zeros((2, 3)))
    with pytest.raises(ValueError):
        CouplingSpec(np.zeros((2, 2)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        CouplingSpec([[np.inf]], [[0.0]])
    c = zero_couplings(2)
    with pytest.raises(ValueError):
        c.beta[0, 0] = 1.0  # frozen


def test_state_validation():
    with pytest.raises(ValueError):
        PlaneState([[1.0, 2.0, 3.0]], [[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError):
        PlaneState([[1.0, 0.0]], [[np.nan, 0.0]])
    s = PlaneState([[1.0, 2.0]], [[0.0, 0.0]])
    assert s.n == 1
    with pytest.raises(OriginError):
        ComplexState([0.0 + 0.0j], [1.0 + 0.0j])


def test_complex_roundtrip():
    rng = np.random.default_rng(20)
    for _ in range(10):
        s = random_state(rng, 4)
        back = from_complex(to_complex(s))
        assert np.array_equal(back.positions, s.positions)
        assert np.array_equal(back.velocities, s.velocities)


def test_origin_guard():
    with pytest.raises(OriginError):
        check_origin_guard(np.array([[0.0, 0.0], [1.0, 0.0]]))
    # relative guard: 1e-13 is tiny next to a unit-radius particle
    with pytest.raises(OriginError):
        check_origin_guard(np.array([[1e-13, 0.0], [1.0, 0.0]]))
    check_origin_guard(np.array([[1e-6, 0.0], [1.0, 0.0]]))  # fine
    with pytest.raises(OriginError):
        to_complex(PlaneState([[0.0, 0.0]], [[1.0, 0.0]]))


def test_rhs_base_frozen_single():
    # z = 2, z' = 1+i, beta = 3: z'' = (1+i)^2/2 + 3(1+i) = 3+4i
    c = CouplingSpec([[3.0]], [[0.0]])
    s = PlaneState([[2.0, 0.0]], [[1.0, 1.0]])
    assert np.allclose(rhs_base(c, s), [[3.0, 4.0]], atol=1e-14)
    # with gamma = 1 the coupling is 3+i: z'' = i + (3+i)(1+i) = 2+5i
    c = CouplingSpec([[3.0]], [[1.0]])
    assert np.allclose(rhs_base(c, s), [[2.0, 5.0]], atol=1e-14)


def test_rhs_base_frozen_pairwise():
    # z = (1, i), z' = (i, 1), alpha = [[0, 1], [0, 0]]:
    # z''_1 = -1 + z_1 z'_2 / z_2 = -1 - i, z''_2 = 1/i = -i
    c = CouplingSpec([[0.0, 1.0], [0.0, 0.0]], np.zeros((2, 2)))
    s = PlaneState([[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]])
    assert np.allclose(rhs_base(c, s), [[-1.0, -1.0], [0.0, -1.0]], atol=1e-14)


def test_rhs_base_matches_complex_law():
    rng = np.random.default_rng(21)
    for _ in range(60):
        n = int(rng.integers(1, 7))
        c = random_couplings(rng, n)
        s = random_state(rng, n)
        assert np.max(np.abs(rhs_base(c, s) - complex_acc(c, s))) < 1e-12


def test_rhs_complex_matches_real():
    rng = np.random.default_rng(22)
    for _ in range(30):
        n = int(rng.integers(1, 6))
        c = random_couplings(rng, n)
        s = random_state(rng, n)
        acc = rhs_complex(c, to_complex(s))
        real = rhs_base(c, s)
        assert np.max(np.abs(acc.real - real[:, 0])) < 1e-12
        assert np.max(np.abs(acc.imag - real[:, 1])) < 1e-12


def test_rhs_generalized_frozen_at_zero():
    c = CouplingSpec([[0.0, 1.0], [0.0, 0.0]], np.zeros((2, 2)))
    s = PlaneState([[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [1.0, 0.0]])
    g = GeneralizedParams(lam=2.0, omega=3.0)
    assert np.allclose(rhs_generalized(c, g, 0.0, s), [[-4.0, 1.0], [2.0, 2.0]], atol=1e-14)


def test_rhs_generalized_matches_complex_law():
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(1, 6))
        c = random_couplings(rng, n)
        s = random_state(rng, n)
        g = GeneralizedParams(lam=float(rng.normal()) * 0.5, omega=float(rng.normal()))
        t = float(rng.uniform(-2.0, 2.0))
        assert np.max(np.abs(rhs_generalized(c, g, t, s) - complex_acc(c, s, g, t))) < 1e-11


def test_rhs_generalized_reduces_to_base():
    rng = np.random.default_rng(24)
    c = random_couplings(rng, 3)
    s = random_state(rng, 3)
    g = GeneralizedParams(0.0, 0.0)
    assert np.array_equal(rhs_generalized(c, g, 1.7, s), rhs_base(c, s))


def test_couplings_at_quarter_period():
    c = CouplingSpec([[1.0, 2.0], [3.0, 4.0]], [[0.1, 0.2], [0.3, 0.4]])
    g = GeneralizedParams(lam=0.5, omega=2.0)
    t = np.pi / 4.0  # omega*t = pi/2: cos -> 0, sin -> 1
    beta_t, gamma_t = couplings_at(c, g, t)
    el = np.exp(0.5 * t)
    assert np.allclose(beta_t, -c.gamma * el, atol=1e-12)
    assert np.allclose(gamma_t, c.beta * el, atol=1e-12)


def test_rhs_pair_splits_center_and_difference():
    rng = np.random.default_rng(25)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        c = random_couplings(rng, n)
        p = PairSpec(base=c, lam=rng.standard_normal(n), omega=rng.standard_normal(n))
        sp = random_state(rng, n)
        sm = PlaneState(sp.positions + rng.standard_normal((n, 2)) + 3.0,
                        rng.standard_normal((n, 2)))
        s = PairState(plus=sp, minus=sm)
        acc_p, acc_m = rhs_pair(p, s)
        # sums follow the per-pair linear center law
        vsum = sp.velocities + sm.velocities
        center = p.lam[:, None] * vsum + p.omega[:, None] * perp(vsum)
        assert np.max(np.abs((acc_p + acc_m) - center)) < 1e-12
        # differences follow the base law
        diff = PlaneState(sp.positions - sm.positions, sp.velocities - sm.velocities)
        assert np.max(np.abs((acc_p - acc_m) - rhs_base(c, diff))) < 1e-11


def test_rhs_pair_translation_invariant():
    rng = np.random.default_rng(26)
    n = 3
    c = random_couplings(rng, n)
    p = PairSpec(base=c, lam=rng.standard_normal(n), omega=rng.standard_normal(n))
    sp = random_state(rng, n)
    sm = PlaneState(sp.positions + 2.0, rng.standard_normal((n, 2)))
    shift = np.array([17.0, -4.0])
    s = PairState(plus=sp, minus=sm)
    s2 = PairState(
        plus=PlaneState(sp.positions + shift, sp.velocities),
        minus=PlaneState(sm.positions + shift, sm.velocities),
    )
    a1 = rhs_pair(p, s)
    a2 = rhs_pair(p, s2)
    assert np.max(np.abs(a1[0] - a2[0])) < 1e-12
    assert np.max(np.abs(a1[1] - a2[1])) < 1e-12


def test_pair_collision_rejected():
    pos = np.array([[1.0, 0.0], [0.0, 1.0]])
    vel = np.zeros((2, 2))
    with pytest.raises(PairCollisionError):
        PairState(plus=PlaneState(pos, vel), minus=PlaneState(pos.copy(), vel))
    # near-coincidence relative to the pair scale trips the guard in the force
    p = PairSpec(base=zero_couplings(2), lam=np.zeros(2), omega=np.zeros(2))
    s = PairState(
        plus=PlaneState([[1.0, 0.0], [5.0, 0.0]], vel),
        minus=PlaneState([[1.0 + 1e-14, 0.0], [0.0, 0.0]], vel),
    )
    with pytest.raises(PairCollisionError):
        rhs_pair(p, s)


def test_size_mismatch_rejected():
    c = zero_couplings(2)
    s = PlaneState([[1.0, 0.0]], [[0.0, 0.0]])
    with pytest.raises(ValueError):
        rhs_base(c, s)
    with pytest.raises(ValueError):
        rhs_generalized(c, GeneralizedParams(1.0, 0.0), 0.0, s)
