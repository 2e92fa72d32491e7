"""NumPy/SciPy versions of the compiled kernels, same signatures and results."""
from __future__ import annotations

import numpy as np
from scipy import sparse


def twisted_convolution(comp, f, g, phase):
    comp = np.asarray(comp)
    f = np.asarray(f, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    i, j = np.nonzero(comp >= 0)
    out = np.zeros(comp.shape[0], dtype=np.complex128)
    np.add.at(out, comp[i, j], f[i] * g[j] * np.asarray(phase)[i, j])
    return out


def coo_power_iteration(rows, cols, vals, nrows, ncols, x0, maxiter, tol):
    """Power iteration on M^H M; returns (best ||Mx||, x, iterations, converged)."""
    x = np.array(x0, dtype=np.complex128, copy=True)
    nx = np.linalg.norm(x)
    if nx == 0.0 or len(vals) == 0:
        return 0.0, x, 0, True
    M = sparse.csr_matrix((np.asarray(vals, dtype=np.complex128), (rows, cols)), shape=(nrows, ncols))
    MH = M.conj().T.tocsr()
    x /= nx
    best, best_x, prev = 0.0, x.copy(), -1.0
    t = 0
    converged = False
    for t in range(maxiter):
        y = M @ x
        ny = float(np.linalg.norm(y))
        lam = ny * ny
        if ny > best:
            best, best_x = ny, x.copy()
        if prev >= 0.0 and lam - prev <= tol * lam:
            converged = True
            break
        prev = lam
        z = MH @ y
        nz = np.linalg.norm(z)
        if nz == 0.0:
            converged = True
            break
        x = z / nz
    return best, best_x, t + 1, converged


def symbol_grid_max(exps, coeffs, grid, chunk: int = 1 << 16):
    exps = np.asarray(exps, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    d = exps.shape[1]
    total = grid**d
    best, best_idx = -1.0, 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        pos = np.stack([(idx // grid**a) % grid for a in range(d)], axis=1)
        phase = (pos @ exps.T) % grid
        vals = np.abs(np.exp(2j * np.pi * phase / grid) @ coeffs)
        k = int(np.argmax(vals))
        if vals[k] ** 2 > best:
            best, best_idx = float(vals[k]) ** 2, int(idx[k])
    return float(np.sqrt(best)), tuple((best_idx // grid**a) % grid for a in range(d))
