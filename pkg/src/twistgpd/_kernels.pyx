# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: float convolution over a composition table,
power iteration on a COO matrix, and the Fourier symbol grid maximum."""
import numpy as np

from libc.math cimport cos, sin, sqrt, M_PI


def twisted_convolution(const long long[:, ::1] comp,
                        const double complex[::1] f,
                        const double complex[::1] g,
                        const double complex[:, ::1] phase):
    cdef Py_ssize_t n = comp.shape[0], i, j
    cdef long long k
    cdef double complex fi
    out = np.zeros(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    for i in range(n):
        fi = f[i]
        if fi == 0:
            continue
        for j in range(n):
            k = comp[i, j]
            if k >= 0 and g[j] != 0:
                o[k] = o[k] + fi * g[j] * phase[i, j]
    return out


cdef inline double _norm2(const double[::1] v) noexcept nogil:
    """Euclidean norm of a complex vector stored as interleaved (re, im) doubles."""
    cdef double s = 0.0
    cdef Py_ssize_t i
    for i in range(v.shape[0]):
        s += v[i] * v[i]
    return sqrt(s)


def coo_power_iteration(const long long[::1] rows,
                        const long long[::1] cols,
                        vals,
                        Py_ssize_t nrows,
                        Py_ssize_t ncols,
                        x0,
                        Py_ssize_t maxiter,
                        double tol):
    """Power iteration on M^H M; returns (best ||Mx||, x, iterations, converged)."""
    # complex arrays are handled as interleaved doubles so the inner loops stay in real arithmetic
    vals_arr = np.ascontiguousarray(vals, dtype=np.complex128).view(np.float64)
    cdef const double[::1] v = vals_arr
    cdef Py_ssize_t nnz = v.shape[0] // 2, t = 0, e, i, r, c
    x_arr = np.array(x0, dtype=np.complex128, copy=True)
    y_arr = np.zeros(nrows, dtype=np.complex128)
    z_arr = np.zeros(ncols, dtype=np.complex128)
    best_arr = np.zeros(ncols, dtype=np.complex128)
    cdef double[::1] x = x_arr.view(np.float64)
    cdef double[::1] y = y_arr.view(np.float64)
    cdef double[::1] z = z_arr.view(np.float64)
    cdef double[::1] bx = best_arr.view(np.float64)
    cdef double nx = _norm2(x), ny, nz, best = 0.0, lam, prev = -1.0
    cdef double ar, ai, xr, xi
    cdef bint converged = False
    if nx == 0.0 or nnz == 0:
        return 0.0, x_arr, 0, True
    with nogil:
        for i in range(2 * ncols):
            x[i] = x[i] / nx
            bx[i] = x[i]
        for t in range(maxiter):
            for i in range(2 * nrows):
                y[i] = 0.0
            for e in range(nnz):
                ar = v[2 * e]
                ai = v[2 * e + 1]
                r = 2 * rows[e]
                c = 2 * cols[e]
                xr = x[c]
                xi = x[c + 1]
                y[r] += ar * xr - ai * xi
                y[r + 1] += ar * xi + ai * xr
            ny = _norm2(y)
            lam = ny * ny
            if ny > best:
                best = ny
                for i in range(2 * ncols):
                    bx[i] = x[i]
            if prev >= 0.0 and lam - prev <= tol * lam:
                converged = True
                break
            prev = lam
            for i in range(2 * ncols):
                z[i] = 0.0
            for e in range(nnz):
                ar = v[2 * e]
                ai = v[2 * e + 1]
                r = 2 * rows[e]
                c = 2 * cols[e]
                xr = y[r]
                xi = y[r + 1]
                z[c] += ar * xr + ai * xi
                z[c + 1] += ar * xi - ai * xr
            nz = _norm2(z)
            if nz == 0.0:
                converged = True
                break
            for i in range(2 * ncols):
                x[i] = z[i] / nz
    return best, best_arr, t + 1, converged


def symbol_grid_max(const long long[:, ::1] exps,
                    const double complex[::1] coeffs,
                    Py_ssize_t grid):
    """max over t in (Z/grid)^d of |sum_k c_k exp(2 pi i m_k . t)|; returns (value, index tuple)."""
    cdef Py_ssize_t K = exps.shape[0], d = exps.shape[1], k, a, total = 1, idx, rem
    cdef double best = -1.0, ang, re, im, v
    cdef Py_ssize_t best_idx = 0
    for a in range(d):
        total *= grid
    cdef long long[::1] pos = np.zeros(d, dtype=np.int64)
    for idx in range(total):
        rem = idx
        for a in range(d):
            pos[a] = rem % grid
            rem = rem // grid
        re = 0.0
        im = 0.0
        for k in range(K):
            ang = 0.0
            for a in range(d):
                ang += <double>(exps[k, a] * pos[a] % grid)
            ang = 2.0 * M_PI * ang / grid
            re += coeffs[k].real * cos(ang) - coeffs[k].imag * sin(ang)
            im += coeffs[k].real * sin(ang) + coeffs[k].imag * cos(ang)
        v = re * re + im * im
        if v > best:
            best = v
            best_idx = idx
    out = []
    rem = best_idx
    for a in range(d):
        out.append(rem % grid)
        rem = rem // grid
    return sqrt(best), tuple(out)
