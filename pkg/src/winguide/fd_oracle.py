"""Brute-force finite-difference eigenvalue oracle.

Independent cross-check for the Galerkin solver: the two coupled strips are
truncated at x1 = +-L with Dirichlet walls, discretized by a symmetric
finite-volume scheme on a tensor grid, and the smallest eigenvalues are
extracted with shifted subspace iteration on a banded Cholesky factorization.
Richardson extrapolation over a nested mesh family removes the leading mesh
error.

Error budget, documented rather than hidden:

* Truncation: replacing the infinite strips by walls at +-L biases an
  eigenvalue lambda < 1 by O(e^{-2 kappa (L - a)}) with kappa = sqrt(1 - lambda)
  and a the outermost window edge. L is a parameter; the caller picks it
  against the weakest expected decay.
* Mesh: away from window tips the scheme is second order. The field has a
  square-root singularity at each tip, which drags the effective convergence
  order into (1, 2); `richardson_extrapolate` therefore fits the order from
  three levels instead of assuming 2.

The oracle deliberately knows nothing about Fourier transforms or
Dirichlet-to-Neumann maps, so agreement with the spectral solver is a real
cross-validation, not a shared-code tautology. It resolves absolute
eigenvalue locations only; exponentially small two-window splittings are out
of reach of an algebraic-accuracy method and are not attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import InsufficientDataError, NumericalFailureError, ValidationError
from .geometry import Geometry

_SHIFT = 0.5
_MAX_SHIFT_RETRIES = 8
_MAX_ITERATIONS = 300
_STAGNATION_TOL = 1e-12
_SUBSPACE_EXTRA = 12
_SEED = 97


@dataclass(frozen=True)
class GridSpec:
    """Target mesh size and truncation half-length for one oracle run.

    h is a target: vertical subdivisions are chosen so that pi and d are
    integer multiples of their respective steps (both close to h), and each
    horizontal segment between window edges is subdivided uniformly. Every
    window edge and the walls +-L land exactly on grid lines.
    """

    h: float
    L: float

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0.0):
            raise ValidationError(f"grid step h must be positive and finite, got {self.h}")
        if not (math.isfinite(self.L) and self.L > 0.0):
            raise ValidationError(f"truncation half-length L must be positive, got {self.L}")


@dataclass(frozen=True)
class OracleResult:
    """Eigenvalues of one oracle run plus their Richardson-extrapolated values.

    `eigenvalues` are computed at the requested (h, L); `levels` holds the
    whole nested family (nominal h halved per level, coarse to fine) that fed
    the extrapolation. Error estimates are conservative: each one is at least
    |value(h) - value(h/2)| / 3, the classical two-level bound.
    """

    grid: GridSpec
    requested: int
    eigenvalues: tuple[float, ...]
    levels: tuple[tuple[float, tuple[float, ...]], ...]
    extrapolated: tuple[float, ...]
    error_estimates: tuple[float, ...]
    fewer_than_requested: bool
    diagnostics: dict

    def to_records(self) -> list[dict]:
        """Serialize to the shared eigenvalue record schema."""
        out = []
        for i, lam in enumerate(self.eigenvalues):
            out.append(
                {
                    "index": i + 1,
                    "lambda": lam,
                    "lambda_extrapolated": self.extrapolated[i],
                    "error_estimate": self.error_estimates[i],
                    "h": self.grid.h,
                    "L": self.grid.L,
                    "source": "fd_oracle",
                }
            )
        return out


@dataclass(frozen=True)
class Extrapolation:
    """Result of `richardson_extrapolate`; unpacks as (lambda_star, error_estimate)."""

    lambda_star: float
    error_estimate: float
    order: float | None
    unreliable: bool

    def __iter__(self):
        yield self.lambda_star
        yield self.error_estimate


class _Mesh:
    """Tensor-product finite-volume mesh for the truncated two-strip domain.

    Nodes are ordered column-major: columns left to right, rows bottom to top
    inside each column. Interface nodes on x2 = 0 exist only strictly inside
    windows; window edges are Dirichlet points of the slit. With no windows
    the mesh covers the single strip (0, pi) (validation mode).
    """

    def __init__(self, geometry: Geometry, grid: GridSpec, refine: int):
        self.geometry = geometry
        self.grid = grid
        self.refine = refine
        self.h_nominal = grid.h / refine
        L = grid.L

        breakpoints = [-L]
        for w in geometry.windows:
            breakpoints.extend([w.left, w.right])
        breakpoints.append(L)
        xs = [np.array([-L])]
        for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
            n_seg = max(1, round((hi - lo) / grid.h)) * refine
            xs.append(np.linspace(lo, hi, n_seg + 1)[1:])
        x_all = np.concatenate(xs)
        self.x = x_all[1:-1]
        self.hx = np.diff(x_all)
        self.wx = 0.5 * (self.hx[:-1] + self.hx[1:])

        m_up = max(1, round(math.pi / grid.h)) * refine
        hy_up = math.pi / m_up
        if geometry.windows:
            m_dn = max(1, round(geometry.d / grid.h)) * refine
            hy_dn = geometry.d / m_dn
            y_dn = -geometry.d + hy_dn * np.arange(1, m_dn)
            y_up = hy_up * np.arange(1, m_up)
            self.y = np.concatenate([y_dn, [0.0], y_up])
            self.iface_id = m_dn - 1
            below = np.where(np.arange(self.y.size) <= self.iface_id, hy_dn, hy_up)
            above = np.where(np.arange(self.y.size) < self.iface_id, hy_dn, hy_up)
        else:
            self.y = hy_up * np.arange(1, m_up)
            self.iface_id = -1
            below = np.full(self.y.size, hy_up)
            above = np.full(self.y.size, hy_up)
        self.step_below = below
        self.step_above = above
        self.wy = 0.5 * (below + above)

        nrows = self.y.size
        if self.iface_id >= 0:
            in_window = np.zeros(self.x.size, dtype=bool)
            for w in geometry.windows:
                in_window |= (self.x > w.left) & (self.x < w.right)
            self.col_in_window = in_window
            heights = np.where(in_window, nrows, nrows - 1)
        else:
            self.col_in_window = np.ones(self.x.size, dtype=bool)
            heights = np.full(self.x.size, nrows)
        self.offsets = np.concatenate([[0], np.cumsum(heights)])
        self.n_nodes = int(self.offsets[-1])

    def column_gidx(self, i: int) -> np.ndarray:
        """Global node index per template row for column i (-1 where absent)."""
        nrows = self.y.size
        g = self.offsets[i] + np.arange(nrows)
        if self.iface_id >= 0 and not self.col_in_window[i]:
            g = g - (np.arange(nrows) > self.iface_id)
            g[self.iface_id] = -1
        return g


def _assemble(mesh: _Mesh) -> tuple[np.ndarray, int]:
    """Symmetric finite-volume matrix in upper banded storage.

    Builds the stiffness form A (one entry per undirected grid edge, plus
    Dirichlet closures on the outer boundary, the slit, and the window tips)
    and the diagonal dual-cell area matrix B, then returns
    C = B^{-1/2} A B^{-1/2} whose eigenvalues approximate the Dirichlet
    Laplacian's. Horizontal row weights depend on the row alone and vertical
    weights on the column alone, so A is symmetric by construction; the
    interface row uses the dual-cell weight (h_down + h_up) / 2.
    """
    n = mesh.n_nodes
    diag = np.zeros(n)
    bcell = np.zeros(n)
    p_parts, q_parts, c_parts = [], [], []
    nrows = mesh.y.size
    wy = mesh.wy
    sb = mesh.step_below
    sa = mesh.step_above

    gidx_prev = None
    for i in range(mesh.x.size):
        gidx = mesh.column_gidx(i)
        pres = gidx >= 0
        g = gidx[pres]
        wx = mesh.wx[i]
        bcell[g] = wx * wy[pres]

        # vertical edges and Dirichlet closures within the column
        both = pres[:-1] & pres[1:]
        p_parts.append(gidx[:-1][both])
        q_parts.append(gidx[1:][both])
        c_parts.append(wx / sa[:-1][both])
        below_wall = pres.copy()
        below_wall[1:] &= ~pres[:-1]
        diag[gidx[below_wall]] += wx / sb[below_wall]
        above_wall = pres.copy()
        above_wall[:-1] &= ~pres[1:]
        diag[gidx[above_wall]] += wx / sa[above_wall]

        # horizontal edges to the previous column (or the wall at -L)
        hx = mesh.hx[i]
        if i == 0:
            diag[g] += wy[pres] / hx
        else:
            both = pres & (gidx_prev >= 0)
            p_parts.append(gidx_prev[both])
            q_parts.append(gidx[both])
            c_parts.append(wy[both] / hx)
            only_prev = (gidx_prev >= 0) & ~pres
            diag[gidx_prev[only_prev]] += wy[only_prev] / hx
            only_here = pres & (gidx_prev < 0)
            diag[gidx[only_here]] += wy[only_here] / hx
        gidx_prev = gidx
    # wall at +L
    diag[gidx_prev[gidx_prev >= 0]] += wy[gidx_prev >= 0] / mesh.hx[-1]

    p = np.concatenate(p_parts)
    q = np.concatenate(q_parts)
    c = np.concatenate(c_parts)
    np.add.at(diag, p, c)
    np.add.at(diag, q, c)

    diag_c = diag / bcell
    c_scaled = c / np.sqrt(bcell[p] * bcell[q])
    bandwidth = int(np.max(q - p)) if p.size else 1
    ab = np.zeros((bandwidth + 1, n))
    ab[bandwidth] = diag_c
    np.add.at(ab, (bandwidth - (q - p), q), -c_scaled)
    del diag, bcell, p, q, c, c_scaled
    return ab, bandwidth


def banded_matvec(ab: np.ndarray, bandwidth: int, x: np.ndarray) -> np.ndarray:
    """y = C x for a symmetric matrix in upper banded storage; x may be (n,) or (n, k)."""
    vec = x.ndim == 1
    xm = x[:, None] if vec else x
    y = ab[bandwidth][:, None] * xm
    for off in range(1, bandwidth + 1):
        row = ab[bandwidth - off, off:][:, None]
        y[:-off] += row * xm[off:]
        y[off:] += row * xm[:-off]
    return y[:, 0] if vec else y


def _orthonormalize(v: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with reorthogonalization; deflates shared directions."""
    q = v.copy()
    k = q.shape[1]
    for j in range(k):
        for _ in range(2):
            if j:
                q[:, j] -= q[:, :j] @ (q[:, :j].T @ q[:, j])
        nrm = float(np.linalg.norm(q[:, j]))
        if nrm < 1e-200:
            raise NumericalFailureError("subspace collapsed during Gram-Schmidt deflation")
        q[:, j] /= nrm
    return q


def _smallest_eigenpairs(
    ab: np.ndarray, bandwidth: int, count: int
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Smallest Ritz pairs of the banded matrix via shifted subspace iteration.

    Factors C - shift*I with a banded Cholesky (so the shift must sit below
    the spectrum; on an indefinite factorization the shift is halved and the
    factorization retried), then iterates inverse applications with
    Gram-Schmidt deflation and a Rayleigh-Ritz projection. Stops when the
    tracked Rayleigh quotients stagnate below 1e-12 between sweeps.
    """
    n = ab.shape[1]
    k = min(n, count + _SUBSPACE_EXTRA)

    shift = _SHIFT
    retries = 0
    factor = None
    while True:
        shifted = ab.copy()
        shifted[bandwidth] -= shift
        try:
            factor = cholesky_banded(shifted, lower=False)
            break
        except np.linalg.LinAlgError:
            pass
        except Exception as exc:  # scipy raises LinAlgError from its own namespace
            if type(exc).__name__ != "LinAlgError":
                raise
        retries += 1
        if retries > _MAX_SHIFT_RETRIES:
            raise NumericalFailureError(
                "banded Cholesky failed for every trial shift; matrix may not be "
                "positive definite below the spectrum"
            )
        shift *= 0.5
    del shifted

    rng = np.random.default_rng(_SEED)
    v = _orthonormalize(rng.standard_normal((n, k)))
    tracked = min(count, k)
    prev = None
    iterations = 0
    delta = math.inf
    for iterations in range(1, _MAX_ITERATIONS + 1):
        w = cho_solve_banded((factor, False), v)
        q = _orthonormalize(w)
        h = q.T @ banded_matvec(ab, bandwidth, q)
        h = 0.5 * (h + h.T)
        vals, rot = np.linalg.eigh(h)
        v = q @ rot
        if prev is not None:
            delta = float(np.max(np.abs(vals[:tracked] - prev[:tracked])))
            if delta <= _STAGNATION_TOL:
                break
        prev = vals
    else:
        raise NumericalFailureError(
            f"subspace iteration did not stagnate below {_STAGNATION_TOL:g} "
            f"within {_MAX_ITERATIONS} sweeps (last delta {delta:.3e})"
        )

    resid = banded_matvec(ab, bandwidth, v[:, :tracked]) - v[:, :tracked] * vals[:tracked]
    diag = {
        "iterations": iterations,
        "shift": shift,
        "shift_retries": retries,
        "rayleigh_delta": delta,
        "residual_max": float(np.max(np.linalg.norm(resid, axis=0))),
        "subspace": k,
    }
    return vals[:tracked], v[:, :tracked], diag


def _perron_check(vec: np.ndarray) -> dict:
    """Sign-normalized ground vector should be nonnegative (discrete Perron)."""
    peak = float(np.max(np.abs(vec)))
    signed = vec * np.sign(vec[int(np.argmax(np.abs(vec)))])
    worst = float(np.min(signed))
    return {"ok": bool(worst >= -1e-6 * peak), "min_over_max": worst / peak}


def fd_eigenvalues(geometry: Geometry, grid: GridSpec, count: int, levels: int = 3) -> OracleResult:
    """Smallest `count` eigenvalues below 1, cross-checked over a nested mesh family.

    Solves on `levels` meshes (the requested h, then h/2, h/4, ...; subdivision
    counts double exactly per level so the family is nested) and Richardson
    extrapolates per eigenvalue index. With no windows the geometry is the
    validation rectangle; its spectrum sits entirely above 1, so the below-1
    filter is skipped there and the raw smallest eigenvalues are reported.

    Truncation bias is O(e^{-2 kappa (L - a)}) and is estimated in the
    diagnostics from the computed ground state; it is not removed.
    """
    if not isinstance(count, int) or count < 1:
        raise ValidationError(f"count must be a positive integer, got {count}")
    if not isinstance(levels, int) or levels < 1:
        raise ValidationError(f"levels must be a positive integer, got {levels}")
    if grid.h > 0.1 + 1e-12:
        raise ValidationError(f"oracle requires h <= 0.1, got {grid.h}")
    extent = max((max(abs(w.left), abs(w.right)) for w in geometry.windows), default=0.0)
    if grid.L < extent + 10.0:
        raise ValidationError(
            f"truncation L = {grid.L} too close to the windows; need L >= {extent + 10.0}"
        )

    level_values: list[tuple[float, tuple[float, ...]]] = []
    level_diags = []
    ground = None
    for lev in range(levels):
        mesh = _Mesh(geometry, grid, 2**lev)
        ab, bandwidth = _assemble(mesh)
        vals, vecs, diag = _smallest_eigenpairs(ab, bandwidth, count)
        if geometry.windows:
            keep = vals < 1.0
            vals = vals[keep]
            vecs = vecs[:, keep]
        diag.update({"h": mesh.h_nominal, "nodes": mesh.n_nodes, "bandwidth": bandwidth})
        level_values.append((mesh.h_nominal, tuple(float(v) for v in vals)))
        level_diags.append(diag)
        if vals.size:
            ground = vecs[:, 0]
        del ab, vecs, mesh

    n_common = min(len(v) for _, v in level_values)
    level_values = [(h, v[:n_common]) for h, v in level_values]
    fewer = n_common < count

    if levels >= 2 and n_common > 0:
        extrapolated, estimates, unreliable = [], [], []
        for i in range(n_common):
            ext = richardson_extrapolate([(h, v[i]) for h, v in level_values])
            extrapolated.append(ext.lambda_star)
            estimates.append(ext.error_estimate)
            unreliable.append(ext.unreliable)
    else:
        extrapolated = [v for v in level_values[0][1]]
        estimates = [math.inf] * n_common
        unreliable = [True] * n_common

    diagnostics = {
        "levels": level_diags,
        "unreliable": unreliable,
        "perron": _perron_check(ground) if ground is not None else None,
    }
    if n_common and level_values[-1][1][0] < 1.0:
        kappa = math.sqrt(1.0 - level_values[-1][1][0])
        diagnostics["truncation_bias_scale"] = math.exp(-2.0 * kappa * (grid.L - extent))

    return OracleResult(
        grid=grid,
        requested=count,
        eigenvalues=level_values[0][1],
        levels=tuple(level_values),
        extrapolated=tuple(extrapolated),
        error_estimates=tuple(estimates),
        fewer_than_requested=fewer,
        diagnostics=diagnostics,
    )


def richardson_extrapolate(values: list[tuple[float, float]]) -> Extrapolation:
    """Extrapolate a mesh-refinement sequence [(h, lambda), ...] to h -> 0.

    With three or more levels the convergence order is fitted from the finest
    three (the window-tip singularity puts the effective order between 1 and
    2, so assuming order 2 would be wrong); any single-power error model is
    then eliminated exactly. With two levels the classical second-order
    formula applies, with a widened error bar. A non-monotone tail (or a
    fitted order outside [0.25, 8]) marks the result unreliable and falls
    back to the finest value.

    The returned error estimate is conservative: never below
    |value(h) - value(h/2)| / 3 for the two coarsest levels supplied.
    """
    if len(values) < 2:
        raise InsufficientDataError("richardson_extrapolate needs at least two mesh levels")
    seq = sorted(values, key=lambda t: -t[0])
    hs = [h for h, _ in seq]
    vs = [v for _, v in seq]
    if any(not (math.isfinite(h) and h > 0.0) for h in hs) or any(
        not math.isfinite(v) for v in vs
    ):
        raise ValidationError("mesh levels must be finite with positive h")
    for ha, hb in zip(hs[:-1], hs[1:]):
        if abs(ha / hb - 2.0) > 1e-9:
            raise ValidationError(f"mesh levels must halve h exactly, got ratio {ha / hb}")

    floor_term = abs(vs[0] - vs[1]) / 3.0
    if len(seq) == 2:
        lam = vs[1] + (vs[1] - vs[0]) / 3.0
        return Extrapolation(lam, abs(vs[0] - vs[1]), 2.0, False)

    v1, v2, v3 = vs[-3], vs[-2], vs[-1]
    d1 = v1 - v2
    d2 = v2 - v3
    if d1 == 0.0 and d2 == 0.0:
        return Extrapolation(v3, floor_term, None, False)
    if d2 == 0.0 or d1 * d2 <= 0.0:
        err = max(abs(d1), abs(d2), floor_term)
        return Extrapolation(v3, err, None, True)
    r = d1 / d2
    if r <= 1.0:
        return Extrapolation(v3, max(abs(d1), abs(d2), floor_term), None, True)
    order = math.log2(r)
    lam = v3 + (v3 - v2) / (r - 1.0)
    err = max(abs(d2) / (r - 1.0), floor_term)
    return Extrapolation(lam, err, order, not (0.25 <= order <= 8.0))
