"""Dense symmetric eigensolvers and the nonlinear-in-lambda spectral scan.

The discrete spectrum below the continuum threshold is the set of lambda where
the Galerkin matrix M(lambda) becomes singular.  Every ordered eigenvalue
branch nu_k(lambda) of M(lambda) is strictly decreasing (the strip symbols
decrease in lambda), so roots are located by sign changes of each branch on a
uniform grid followed by bisection; distinct branches cross zero at distinct
points, which is what resolves nearly degenerate pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as _la

from .assembly import assemble_galerkin
from .errors import (
    NotPositiveDefiniteError,
    NumericalFailureError,
    RescanRequiredError,
    ThresholdError,
    ValidationError,
)
from .geometry import Geometry, SolverSettings

__all__ = [
    "SpectralDecomposition",
    "jacobi_eig",
    "solve_sym",
    "ScanRoot",
    "scan_eigenvalues",
]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues ascending, eigenvectors as matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray


def _check_symmetric(matrix: np.ndarray, rtol: float = 1e-13) -> np.ndarray:
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a))
    if scale > 0 and np.max(np.abs(a - a.T)) > rtol * scale:
        raise ValidationError("matrix is not symmetric within tolerance")
    return a


def jacobi_eig(matrix) -> SpectralDecomposition:
    """Cyclic Jacobi diagonalization of a symmetric matrix (size <= 256).

    Deterministic row-cyclic sweep order; converges quadratically, capped at 60
    sweeps.  Used as an independent cross-check of the LAPACK path and as the
    spectral-inverse oracle for forced solves.
    """
    a = _check_symmetric(matrix).copy()
    n = a.shape[0]
    if n > 256:
        raise ValidationError(f"jacobi_eig limited to size 256, got {n}")
    v = np.eye(n)
    if n == 1:
        return SpectralDecomposition(a.diagonal().copy(), v)
    scale = max(np.max(np.abs(a)), 1e-300)

    for _ in range(60):
        off = np.max(np.abs(a - np.diag(a.diagonal())))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise NumericalFailureError("jacobi sweeps did not converge")

    values = a.diagonal().copy()
    order = np.argsort(values, kind="stable")
    return SpectralDecomposition(values[order], v[:, order])


def solve_sym(matrix, rhs) -> np.ndarray:
    """Solve M x = g for symmetric positive definite M via Cholesky."""
    a = _check_symmetric(matrix)
    g = np.asarray(rhs, dtype=float)
    try:
        factor = _la.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(f"matrix is not positive definite: {exc}") from exc
    x = _la.cho_solve(factor, g, check_finite=False)
    resid = np.linalg.norm(a @ x - g)
    if resid > 1e-10 * max(np.linalg.norm(g), 1e-300):
        raise NumericalFailureError(f"solve residual {resid:.3e} unexpectedly large")
    return x


@dataclass(frozen=True)
class ScanRoot:
    """A zero of an ordered eigenvalue branch of M(lambda)."""

    lam: float
    coeffs: np.ndarray      # flat null vector across window blocks, unit 2-norm
    branch: int
    residual: float         # |nu(lambda*)| / ||M||_max


def _branch_values(lam: float, geometry: Geometry, settings: SolverSettings) -> np.ndarray:
    system = assemble_galerkin(lam, geometry, settings)
    return np.linalg.eigvalsh(system.matrix)


def scan_eigenvalues(
    geometry: Geometry, settings: SolverSettings, count_max: int | None = None
) -> list[ScanRoot]:
    """Locate all discrete eigenvalues in (lambda_floor, 1 - threshold_margin).

    Sign-change detection per ordered branch on the scan grid, then bisection to
    settings.bisect_tol; the trace coefficients are the null vector of the
    smallest-|nu| branch at the root.
    """
    lo = settings.lambda_floor
    hi = settings.lambda_max
    if hi <= lo:
        raise ThresholdError("admissible spectral window is empty")
    step = settings.grid_step
    grid = np.arange(lo + step, hi, step)
    if grid.size < 3:
        raise ThresholdError("scan grid has fewer than 3 points; decrease grid_step")

    values = np.empty((grid.size, len(geometry.windows) * settings.basis_order))
    for i, lam in enumerate(grid):
        values[i] = _branch_values(float(lam), geometry, settings)

    # curvature heuristic: a parabola through three consecutive samples of a
    # branch must not dip below zero strictly inside a no-sign-change window
    for k in range(values.shape[1]):
        vk = values[:, k]
        for i in range(1, grid.size - 1):
            y0, y1, y2 = vk[i - 1], vk[i], vk[i + 1]
            if min(y0, y1, y2) > 0.0:
                half = 0.5 * (y0 + y2) - y1
                if half > 0.0:
                    vertex = 0.25 * (y0 - y2) / half  # in units of step, about i
                    if abs(vertex) < 1.0:
                        val = y1 - half * vertex**2
                        if val < 0.0:
                            raise RescanRequiredError(
                                f"branch {k} may dip below zero inside a grid cell near "
                                f"lambda={grid[i]:.6f}; rescan with grid_step <= {step / 4:.2e}"
                            )

    roots: list[ScanRoot] = []
    for k in range(values.shape[1]):
        vk = values[:, k]
        sign_change = np.nonzero((vk[:-1] > 0.0) & (vk[1:] <= 0.0))[0]
        for i in sign_change:
            a, b = float(grid[i]), float(grid[i + 1])
            fa = vk[i]
            while b - a > settings.bisect_tol:
                mid = 0.5 * (a + b)
                fm = _branch_values(mid, geometry, settings)[k]
                if fa > 0.0 and fm > 0.0:
                    a, fa = mid, fm
                else:
                    b = mid
            lam_star = 0.5 * (a + b)
            system = assemble_galerkin(lam_star, geometry, settings)
            evals, evecs = np.linalg.eigh(system.matrix)
            residual = abs(evals[k]) / max(np.max(np.abs(system.matrix)), 1e-300)
            if residual > 1e-9:
                raise NumericalFailureError(
                    f"bisected root at lambda={lam_star} has branch residual {residual:.3e}"
                )
            roots.append(ScanRoot(lam_star, evecs[:, k].copy(), k, residual))

    roots.sort(key=lambda r: r.lam)
    if count_max is not None:
        roots = roots[:count_max]
    return roots
