"""Compiled kernels for many state vectors stored as columns of one (2**n, B) array."""
import numba
import numpy as np


@numba.njit(cache=True, fastmath=True)
def apply_1q_cols(psi, m00, m01, m10, m11, q, cols):
    """Apply a 2x2 matrix to qubit ``q`` of the selected columns (all if ``cols`` is empty)."""
    dim, b = psi.shape
    step = 1 << q
    for base in range(0, dim, 2 * step):
        for off in range(step):
            r0 = psi[base + off]
            r1 = psi[base + off + step]
            if cols.size == 0:
                for j in range(b):
                    a0 = r0[j]
                    a1 = r1[j]
                    r0[j] = m00 * a0 + m01 * a1
                    r1[j] = m10 * a0 + m11 * a1
            else:
                for j in cols:
                    a0 = r0[j]
                    a1 = r1[j]
                    r0[j] = m00 * a0 + m01 * a1
                    r1[j] = m10 * a0 + m11 * a1


@numba.njit(cache=True)
def apply_cnot_cols(psi, c, t):
    dim, b = psi.shape
    cm = 1 << c
    tm = 1 << t
    for i in range(dim):
        if (i & cm) and not (i & tm):
            k = i | tm
            for j in range(b):
                tmp = psi[i, j]
                psi[i, j] = psi[k, j]
                psi[k, j] = tmp


@numba.njit(cache=True)
def col_probs(psi):
    dim, b = psi.shape
    out = np.zeros(dim)
    for i in range(dim):
        s = 0.0
        for j in range(b):
            v = psi[i, j]
            s += v.real * v.real + v.imag * v.imag
        out[i] = s
    return out
