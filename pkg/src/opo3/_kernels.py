"""Inner integration loops for the positive-P equations.

Two implementations with identical semantics: a numba-compiled kernel and a
vectorized numpy fallback.  Both advance a block of trajectories through one
chunk of steps in place.

State layout: complex128 array (6, B) with rows (a0, a1, a2, a0p, a1p, a2p).
Noise layout: float64 array (n_steps, 4, B) of normals already scaled by
sqrt(dt/2); rows combine into the correlated complex increments
dw1 = w0 + i*w1, dw2 = w0 - i*w1, dw1p = w2 + i*w3, dw2p = w2 - i*w3,
so <dw1 dw2> = <dw1p dw2p> = dt and all other second moments vanish.

The pump advances through a factored one-step map
    a0 <- m + (a0 - m) * e_pump + phi_pump * (-eps * a1 * a2)
with (e_pump, phi_pump) = (1 - gamma_r*dt, dt) for the plain Euler scheme
(this reduces exactly to Euler) or (exp(-gamma_r*dt), -expm1(-gamma_r*dt)/
gamma_r) for the exponentially propagated linear pump part.  Signal modes
always take explicit Euler-Maruyama steps.

Divergence: candidate values are tested before being written; a trajectory
whose candidate exceeds the threshold (or goes non-finite) is frozen at its
last good state, marked dead, and its global step index recorded.
"""

from __future__ import annotations

import os

import numpy as np


def _chunk_step_py(state, w, alive, first_bad, eps, m_pump, dt,
                   e_pump, phi_pump, thr2, step0):
    n_steps = w.shape[0]
    nb = state.shape[1]
    for c in range(n_steps):
        for j in range(nb):
            if not alive[j]:
                continue
            a0 = state[0, j]
            a1 = state[1, j]
            a2 = state[2, j]
            a0p = state[3, j]
            a1p = state[4, j]
            a2p = state[5, j]
            dw1 = complex(w[c, 0, j], w[c, 1, j])
            dw2 = complex(w[c, 0, j], -w[c, 1, j])
            dw1p = complex(w[c, 2, j], w[c, 3, j])
            dw2p = complex(w[c, 2, j], -w[c, 3, j])
            r0 = np.sqrt(eps * a0)
            r0p = np.sqrt(eps * a0p)
            n0 = m_pump + (a0 - m_pump) * e_pump + phi_pump * (-eps * a1 * a2)
            n0p = m_pump + (a0p - m_pump) * e_pump + phi_pump * (-eps * a1p * a2p)
            n1 = a1 + dt * (-a1 + eps * a2p * a0) + r0 * dw1
            n2 = a2 + dt * (-a2 + eps * a1p * a0) + r0 * dw2
            n1p = a1p + dt * (-a1p + eps * a2 * a0p) + r0p * dw1p
            n2p = a2p + dt * (-a2p + eps * a1 * a0p) + r0p * dw2p
            ok = (
                (n0.real * n0.real + n0.imag * n0.imag <= thr2)
                and (n1.real * n1.real + n1.imag * n1.imag <= thr2)
                and (n2.real * n2.real + n2.imag * n2.imag <= thr2)
                and (n0p.real * n0p.real + n0p.imag * n0p.imag <= thr2)
                and (n1p.real * n1p.real + n1p.imag * n1p.imag <= thr2)
                and (n2p.real * n2p.real + n2p.imag * n2p.imag <= thr2)
            )
            if not ok:
                alive[j] = False
                first_bad[j] = step0 + c
                continue
            state[0, j] = n0
            state[1, j] = n1
            state[2, j] = n2
            state[3, j] = n0p
            state[4, j] = n1p
            state[5, j] = n2p


def _chunk_step_numpy(state, w, alive, first_bad, eps, m_pump, dt,
                      e_pump, phi_pump, thr2, step0):
    for c in range(w.shape[0]):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            return
        a0 = state[0, idx]
        a1 = state[1, idx]
        a2 = state[2, idx]
        a0p = state[3, idx]
        a1p = state[4, idx]
        a2p = state[5, idx]
        dw1 = w[c, 0, idx] + 1j * w[c, 1, idx]
        dw2 = w[c, 0, idx] - 1j * w[c, 1, idx]
        dw1p = w[c, 2, idx] + 1j * w[c, 3, idx]
        dw2p = w[c, 2, idx] - 1j * w[c, 3, idx]
        r0 = np.sqrt((eps * a0).astype(np.complex128))
        r0p = np.sqrt((eps * a0p).astype(np.complex128))
        n0 = m_pump + (a0 - m_pump) * e_pump + phi_pump * (-eps * a1 * a2)
        n0p = m_pump + (a0p - m_pump) * e_pump + phi_pump * (-eps * a1p * a2p)
        n1 = a1 + dt * (-a1 + eps * a2p * a0) + r0 * dw1
        n2 = a2 + dt * (-a2 + eps * a1p * a0) + r0 * dw2
        n1p = a1p + dt * (-a1p + eps * a2 * a0p) + r0p * dw1p
        n2p = a2p + dt * (-a2p + eps * a1 * a0p) + r0p * dw2p
        cand = np.stack([n0, n1, n2, n0p, n1p, n2p])
        mag2 = cand.real * cand.real + cand.imag * cand.imag
        with np.errstate(invalid="ignore"):
            ok = np.all(mag2 <= thr2, axis=0)
        good = idx[ok]
        bad = idx[~ok]
        state[:, good] = cand[:, ok]
        if bad.size:
            alive[bad] = False
            first_bad[bad] = step0 + c


_NUMBA_KERNEL = None
_NUMBA_FAILED = False


def _build_numba_kernel():
    global _NUMBA_KERNEL, _NUMBA_FAILED
    if _NUMBA_KERNEL is not None or _NUMBA_FAILED:
        return _NUMBA_KERNEL
    try:
        import numba
    except ImportError:
        _NUMBA_FAILED = True
        return None
    _NUMBA_KERNEL = numba.njit(cache=True, fastmath=False)(_chunk_step_py)
    return _NUMBA_KERNEL


def numba_enabled() -> bool:
    if os.environ.get("OPO3_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return False
    return _build_numba_kernel() is not None


def get_stepper():
    """The fastest available chunk stepper with the common signature."""
    if numba_enabled():
        return _NUMBA_KERNEL
    return _chunk_step_numpy
