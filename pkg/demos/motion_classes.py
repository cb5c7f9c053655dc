"""Three coupling spectra, three long-time fates.

The eigenvalues a_k of the coupling matrix control everything: negative
real parts freeze the motion, a purely imaginary commensurate spectrum
closes every orbit, and any positive real part drives a double
exponential runaway (escape to infinity or collapse onto the origin,
depending on the initial data).  The script classifies each matrix and
then lets the closed form show the predicted behavior.
"""
import numpy as np

from planebody import (
    BlowupError,
    CouplingSpec,
    classify_couplings,
    eval_z,
    spectral_solve,
    to_complex,
)
from planebody.model import PlaneState

CASES = {
    "standstill": CouplingSpec(beta=-np.diag([1.0, 2.0, 3.0]), gamma=np.zeros((3, 3))),
    "periodic": CouplingSpec(beta=np.zeros((3, 3)), gamma=np.diag([1.0, 2.0, 3.0])),
    "runaway": CouplingSpec(beta=np.diag([1.0, -1.0, -2.0]), gamma=np.zeros((3, 3))),
}

rng = np.random.default_rng(21)
radii = rng.uniform(0.8, 1.6, 3)
angles = rng.uniform(0.0, 2.0 * np.pi, 3)
s0 = PlaneState(
    np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1),
    0.25 * rng.uniform(-1, 1, (3, 2)),
)

for name, c in CASES.items():
    mc = classify_couplings(c)
    sol = spectral_solve(c, to_complex(s0))
    print(f"{name}:")
    print(f"  all_damped={mc.all_damped} all_imaginary={mc.all_imaginary} "
          f"has_unstable={mc.has_unstable}")
    if mc.completely_periodic is not None:
        print(f"  predicted period: {mc.completely_periodic:.6f}")
    for t in (5.0, 10.0, 20.0):
        try:
            st = eval_z(sol, t)
            speed = float(np.max(np.abs(st.zdot)))
            extent = float(np.max(np.abs(st.z)))
            print(f"  t={t:5.1f}: max |z| = {extent:10.4g}  max |z'| = {speed:10.4g}")
        except BlowupError as exc:
            print(f"  t={t:5.1f}: {exc}")
            break
    print()
