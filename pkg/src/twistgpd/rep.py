"""Regular representations, operator norms and finite block decompositions.

The twisted left regular representation at a unit x acts on l^2(G_x);
its matrix entry at (gamma', gamma) is sigma(mu, gamma) f(mu) with
mu = gamma' gamma^-1.  Truncations compress it to the first ``N`` fiber
arrows in the model's enumeration order, so nested truncations are nested
compressions and every compressed norm is a certified lower bound.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, sparse

from . import kernels
from .algebra import Element, _is_zero, _times_phase, i_norm
from .cocycle import TwoCocycle
from .errors import ConvergenceFailure, ModelMismatch, NumericalRankAmbiguity, UnsupportedModel
from .groupoid import CylinderShift, GroupModel, ShiftArrow
from .groups import AbelianGroup

__all__ = [
    "RepMatrix",
    "NormResult",
    "NormEstimate",
    "BlockStructure",
    "regular_rep_matrix",
    "operator_norm",
    "reduced_norm_estimate",
    "reduced_norm_sweep",
    "fourier_symbol_norm",
    "decompose_finite_cstar",
    "exact_matmul",
    "exact_adjoint",
]


@dataclass
class RepMatrix:
    """Compression of L^{sigma,x}(f) to an ordered basis of fiber arrows."""

    unit: object
    basis: list
    truncated: bool
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    exact_entries: dict | None = None

    @property
    def size(self) -> int:
        return len(self.basis)

    def sparse(self):
        n = self.size
        return sparse.csr_matrix((self.vals, (self.rows, self.cols)), shape=(n, n))

    def dense(self) -> np.ndarray:
        return self.sparse().toarray()


def _rep_entries(sigma: TwoCocycle, f: Element, x, basis):
    """(row, col, coefficient) triples of the compressed representation."""
    model = f.model
    index = {g: i for i, g in enumerate(basis)}
    out = []
    if f.is_bundle:
        terms = [((cyl, n), c) for (cyl, n), c in f.terms.items()]
        from .algebra import _bundle_phase

        for j, gamma in enumerate(basis):
            y, k = gamma.point, gamma.shift
            for (cyl, n), c in terms:
                y2 = y.shift(-n)
                if not cyl.matches(y2):
                    continue
                i = index.get(ShiftArrow(y2, n + k))
                if i is not None:
                    out.append((i, j, _times_phase(c, _bundle_phase(sigma, n, k))))
        return out
    by_source: dict = {}
    for mu, c in f.terms.items():
        by_source.setdefault(model.source(mu), []).append((mu, c))
    for j, gamma in enumerate(basis):
        for mu, c in by_source.get(model.range(gamma), ()):
            i = index.get(model._mul(mu, gamma))
            if i is not None:
                out.append((i, j, _times_phase(c, sigma.phase(mu, gamma))))
    return out


def regular_rep_matrix(sigma: TwoCocycle, f: Element, x, truncation: int = 64) -> RepMatrix:
    """L^{sigma,x}(f) compressed to the first ``truncation`` arrows of G_x."""
    model = f.model
    if sigma.model is not model and sigma.model.describe() != model.describe():
        raise ModelMismatch("cocycle and element live on different models")
    x = model.canon_unit(x)
    fib = model.fiber(x, "source", truncation)
    basis = list(fib.arrows)
    entries = _rep_entries(sigma, f, x, basis)
    exact = f.exact and sigma.exact
    exact_entries = None
    if exact:
        exact_entries = {}
        for i, j, v in entries:
            key = (i, j)
            exact_entries[key] = exact_entries[key] + v if key in exact_entries else v
        exact_entries = {k: v for k, v in exact_entries.items() if not _is_zero(v)}
    rows = np.fromiter((e[0] for e in entries), dtype=np.int64, count=len(entries))
    cols = np.fromiter((e[1] for e in entries), dtype=np.int64, count=len(entries))
    vals = np.fromiter((complex(e[2]) for e in entries), dtype=np.complex128, count=len(entries))
    return RepMatrix(x, basis, fib.truncated, rows, cols, vals, exact_entries)


def exact_matmul(a: dict, b: dict) -> dict:
    """Product of two sparse exact matrices given as {(i, j): value}."""
    by_row: dict = {}
    for (k, j), v in b.items():
        by_row.setdefault(k, []).append((j, v))
    out: dict = {}
    for (i, k), u in a.items():
        for j, v in by_row.get(k, ()):
            key = (i, j)
            w = u * v
            out[key] = out[key] + w if key in out else w
    return {k: v for k, v in out.items() if not _is_zero(v)}


def exact_adjoint(a: dict) -> dict:
    return {(j, i): v.conjugate() for (i, j), v in a.items()}


# --------------------------------------------------------------------------------
# operator norms


@dataclass
class NormResult:
    value: float
    vector: np.ndarray
    iterations: int
    converged: bool
    seeds: int

    def __float__(self):
        return self.value


def _coo(M):
    if isinstance(M, RepMatrix):
        return M.rows, M.cols, M.vals, M.size, M.size
    if sparse.issparse(M):
        c = M.tocoo()
        return c.row.astype(np.int64), c.col.astype(np.int64), c.data.astype(np.complex128), *c.shape
    A = np.asarray(M, dtype=np.complex128)
    r, c = np.nonzero(A)
    return r.astype(np.int64), c.astype(np.int64), A[r, c], *A.shape


def _as_operator(M):
    if isinstance(M, (list, tuple)):
        mats = [m.sparse() if isinstance(m, RepMatrix) else sparse.csr_matrix(m) for m in M]
        prod = mats[0]
        for m in mats[1:]:
            prod = prod @ m
        return prod.tocsr()
    return M


def operator_norm(M, tol: float = 1e-10, *, seed: int = 0, seeds: int = 3, maxiter: int = 100_000,
                  warm: np.ndarray | None = None) -> NormResult:
    """Largest singular value by power iteration on M^H M.

    The returned value is ||M v|| for a unit vector v, hence always a lower
    bound.  Iteration stops when the Rayleigh quotient changes by at most
    ``tol`` relative; the run is restarted from ``seeds`` random vectors plus
    the optional warm start (zero-padded to the current size).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = _as_operator(M)
    rows, cols, vals, nr, nc = _coo(M)
    if nc == 0 or len(vals) == 0:
        return NormResult(0.0, np.zeros(nc, dtype=np.complex128), 0, True, 0)
    rng = np.random.default_rng(seed)
    starts = []
    if warm is not None:
        w = np.zeros(nc, dtype=np.complex128)
        w[: len(warm)] = warm[:nc]
        if np.linalg.norm(w) > 0:
            starts.append(w)
    for _ in range(seeds):
        starts.append(rng.standard_normal(nc) + 1j * rng.standard_normal(nc))
    best = None
    for x0 in starts:
        val, vec, its, conv = kernels.coo_power_iteration(rows, cols, vals, nr, nc, x0, maxiter, tol)
        if best is None or val > best.value:
            best = NormResult(float(val), np.asarray(vec), int(its), bool(conv), len(starts))
        if not conv:
            raise ConvergenceFailure(
                f"power iteration did not settle in {maxiter} steps", lower=float(val), upper=None
            )
    return best


# --------------------------------------------------------------------------------
# reduced norm intervals


@dataclass
class NormEstimate:
    lower: float
    upper: float
    truncations: list
    units: list
    tol: float
    per_unit: dict = field(default_factory=dict)
    boundary_truncated: bool = False

    def record(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "truncations": list(self.truncations),
            "units": [repr(u) for u in self.units],
            "tol": self.tol,
            "per_unit": {repr(k): v for k, v in self.per_unit.items()},
            "truncated_fibers": self.boundary_truncated,
        }


def _default_units(model, samples: int):
    if isinstance(model, CylinderShift):
        from .cocycle import _sample_points

        return _sample_points(model, max(1, samples))[:samples]
    return model.units()[:samples] if samples else model.units()


def reduced_norm_estimate(sigma: TwoCocycle, f: Element, units=None, truncation: int = 64,
                          tol: float = 1e-10, *, seed: int = 0, samples: int = 0) -> NormEstimate:
    """[lower, upper] bracket for the reduced norm of f."""
    return reduced_norm_sweep(sigma, f, units, [truncation], tol, seed=seed, samples=samples)[-1]


def reduced_norm_sweep(sigma: TwoCocycle, f: Element, units, truncations, tol: float = 1e-10,
                       *, seed: int = 0, samples: int = 0) -> list[NormEstimate]:
    """Estimates over increasing truncations, each warm-started from the previous vector.

    Because the compressions are nested and the warm start is the previous
    maximiser padded with zeros, the lower bounds never decrease.
    """
    model = f.model
    if units is None:
        units = _default_units(model, samples)
    units = [model.canon_unit(u) for u in units]
    upper = i_norm(f)
    truncations = sorted(truncations)
    warm: dict = {}
    best_so_far: dict = {}
    out = []
    for k, n in enumerate(truncations):
        per_unit = {}
        truncated = False
        for u in units:
            R = regular_rep_matrix(sigma, f, u, n)
            truncated = truncated or R.truncated
            res = operator_norm(R, tol, seed=seed, warm=warm.get(u))
            val = max(res.value, best_so_far.get(u, 0.0))
            if res.value >= best_so_far.get(u, 0.0):
                warm[u] = res.vector
            best_so_far[u] = val
            per_unit[u] = val
        lower = max(per_unit.values(), default=0.0)
        out.append(NormEstimate(lower, upper, truncations[: k + 1], units, tol, per_unit, truncated))
    return out


# --------------------------------------------------------------------------------
# Fourier oracle


def fourier_symbol_norm(f: Element, grid: int = 100_000, *, sigma: TwoCocycle | None = None,
                        refine: bool = True) -> float:
    """max over the torus of |sum_m f(m) e^{2 pi i m.t}|, by grid search and local refinement."""
    model = f.model
    if not isinstance(model, GroupModel) or not isinstance(model.group, AbelianGroup) or any(
        o != 0 for o in model.group.orders
    ):
        raise UnsupportedModel("the Fourier oracle needs a free abelian group model")
    if sigma is not None and not sigma.is_trivial:
        raise UnsupportedModel("the Fourier oracle is for untwisted elements")
    if not f.terms:
        return 0.0
    exps = np.array([list(m) for m in f.terms], dtype=np.int64)
    coeffs = np.array([complex(c) for c in f.terms.values()], dtype=np.complex128)
    value, pos = kernels.symbol_grid_max(exps, coeffs, grid)
    if not refine:
        return value

    def neg(t):
        return -abs(np.exp(2j * np.pi * (exps @ np.atleast_1d(t))) @ coeffs)

    t0 = np.array(pos, dtype=float) / grid
    h = 1.0 / grid
    if len(t0) == 1:
        r = optimize.minimize_scalar(neg, bounds=(t0[0] - h, t0[0] + h), method="bounded",
                                     options={"xatol": 1e-14})
        cand = -r.fun
    else:
        r = optimize.minimize(neg, t0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15})
        cand = -r.fun
    return float(max(value, cand))


# --------------------------------------------------------------------------------
# finite block decomposition


@dataclass
class BlockStructure:
    blocks: list  # (dimension d_i, multiplicity in the regular representation)
    center_dim: int
    algebra_dim: int
    threshold: float
    smallest_kept: float
    largest_dropped: float

    @property
    def dims(self) -> list:
        return sorted(d for d, _ in self.blocks)

    @property
    def gap(self) -> float:
        """Separation of the retained singular values from the rank threshold."""
        return self.smallest_kept / self.threshold if self.threshold else float("inf")

    def record(self) -> dict:
        return {
            "blocks": [{"dimension": d, "multiplicity": m} for d, m in sorted(self.blocks)],
            "center_dimension": self.center_dim,
            "algebra_dimension": self.algebra_dim,
            "sum_of_squares": sum(d * d for d, _ in self.blocks),
            "rank_threshold": self.threshold,
            "smallest_kept_singular_value": self.smallest_kept,
            "largest_dropped_singular_value": self.largest_dropped,
        }


def _full_regular_matrices(sigma: TwoCocycle, model):
    """L(delta_gamma) on l^2(G) = sum over units of l^2(G_x), one matrix per arrow."""
    t = model.tables()
    n = t.size
    mats = []
    for a in range(n):
        M = np.zeros((n, n), dtype=np.complex128)
        alpha = t.arrows[a]
        for b in np.nonzero(t.comp[a] >= 0)[0]:
            M[t.comp[a, b], b] = sigma.phase(alpha, t.arrows[b]).value()
        mats.append(M)
    xi = np.zeros(n, dtype=np.complex128)
    xi[list(t.units)] = 1.0
    return mats, xi


def _rank_split(s: np.ndarray, threshold: float):
    kept = s[s > threshold]
    dropped = s[s <= threshold]
    return len(kept), (float(kept.min()) if len(kept) else float("inf")), (float(dropped.max()) if len(dropped) else 0.0)


def decompose_finite_cstar(model, sigma: TwoCocycle, *, seed: int = 0, unitary: np.ndarray | None = None,
                           ambiguity: float = 1e3) -> BlockStructure:
    """Block dimensions of the finite twisted groupoid C*-algebra.

    The center is the null space of the commutator map z -> ([z, a] xi)_a,
    with xi the separating vector sum of unit deltas; a random self-adjoint
    central element then splits the algebra along its eigenspaces, and each
    block dimension is the square root of the rank of P_i A.
    """
    if not model.is_finite:
        raise UnsupportedModel("block decomposition needs a finite model")
    mats, xi = _full_regular_matrices(sigma, model)
    n = len(mats)
    if unitary is not None:
        U = np.asarray(unitary)
        mats = [U @ M @ U.conj().T for M in mats]
        xi = U @ xi
    eps = np.finfo(float).eps
    # commutator system: column g is the stack over a of [L_g, L_a] xi
    Lxi = np.stack([M @ xi for M in mats], axis=1)  # column g = L_g xi
    blocks = []
    for a, La in enumerate(mats):
        blocks.append(np.stack([mats[g] @ Lxi[:, a] for g in range(n)], axis=1) - La @ Lxi)
    K = np.vstack(blocks)
    _, s, vh = np.linalg.svd(K)
    threshold = np.sqrt(eps) * (s.max() if s.size and s.max() > 0 else 1.0)
    _check_ambiguity(s, threshold, ambiguity)
    rank, kept_min, dropped_max = _rank_split(s, threshold)
    center = vh[rank:].conj().T  # columns: coordinates of central elements
    k = center.shape[1]
    rng = np.random.default_rng(seed)
    for _attempt in range(5):
        coeffs = center @ (rng.standard_normal(k) + 1j * rng.standard_normal(k))
        Z = sum(c * M for c, M in zip(coeffs, mats))
        H = Z + Z.conj().T
        w, V = np.linalg.eigh(H)
        clusters = _cluster(w, 1e-6 * max(1.0, float(np.abs(w).max())))
        if len(clusters) == k:
            break
    else:
        raise NumericalRankAmbiguity(
            f"central element separated {len(clusters)} eigenvalue clusters for a {k}-dimensional center"
        )
    out = []
    for idx in clusters:
        P = V[:, idx] @ V[:, idx].conj().T
        PA = np.stack([(P @ M).reshape(-1) for M in mats], axis=1)
        sv = np.linalg.svd(PA, compute_uv=False)
        th = np.sqrt(eps) * max(1.0, float(sv.max()))
        _check_ambiguity(sv, th, ambiguity)
        r = int((sv > th).sum())
        d = int(round(np.sqrt(r)))
        if d * d != r:
            raise NumericalRankAmbiguity(f"block rank {r} is not a square")
        out.append((d, len(idx) // d))
    total = sum(d * d for d, _ in out)
    if total != n:
        raise NumericalRankAmbiguity(f"block dimensions give {total}, algebra has dimension {n}")
    return BlockStructure(out, k, n, float(threshold), kept_min, dropped_max)


def _check_ambiguity(s, threshold, factor):
    near = s[(s > threshold / factor) & (s < threshold * factor)]
    if near.size:
        raise NumericalRankAmbiguity(
            f"singular value {near[0]:.3e} is within a factor {factor:g} of the threshold {threshold:.3e}",
            threshold=float(threshold),
            value=float(near[0]),
        )


def _cluster(w: np.ndarray, tol: float) -> list[list[int]]:
    order = np.argsort(w)
    groups = [[int(order[0])]]
    for i in order[1:]:
        if w[i] - w[groups[-1][-1]] <= tol:
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return groups
