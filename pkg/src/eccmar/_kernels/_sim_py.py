"""Pure-NumPy fallback for the simulation recursion.

Semantically identical to the compiled kernel in ``_sim.pyx``.
"""

import numpy as np


def simulate_recursion(lam, psi, gamma1, gamma2, noise):
    """Iterate X_t = lam @ X_{t-1} @ psi' + short-run terms + noise[t].

    Starts from X = 0 with zero pre-sample differences. Returns the full
    (steps, m, n) array of levels.
    """
    lam = np.asarray(lam, dtype=float)
    psi = np.asarray(psi, dtype=float)
    gamma1 = np.asarray(gamma1, dtype=float)
    gamma2 = np.asarray(gamma2, dtype=float)
    noise = np.asarray(noise, dtype=float)
    steps, m, n = noise.shape
    q = gamma1.shape[0]

    out = np.zeros((steps, m, n))
    diffs = np.zeros((max(q, 1), m, n))
    prev = np.zeros((m, n))
    for t in range(steps):
        cur = lam @ prev @ psi.T + noise[t]
        for lag in range(min(q, t)):
            slot = (t - 1 - lag) % q
            cur += gamma1[lag] @ diffs[slot] @ gamma2[lag].T
        if q > 0:
            diffs[t % q] = cur - prev
        prev = cur
        out[t] = cur
    return out
