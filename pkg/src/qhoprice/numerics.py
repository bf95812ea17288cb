"""Double-precision kernels: Gauss-Legendre quadrature, a Jacobi eigensolver
for symmetric matrices and the Gaussian integral ``int_0^x exp(-u^2) du``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError, NumericalError

__all__ = [
    "QuadratureRule",
    "SymmetricEigenSystem",
    "gauss_legendre",
    "composite_rule",
    "integrate",
    "sym_eigen",
    "gaussian_integral",
]

NEWTON_TOL = 1e-15
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
GAUSSIAN_TOL = 1e-13
# exp(-u^2) < 1e-43 beyond this, far below double resolution of sqrt(pi)/2
_GAUSSIAN_CUTOFF = 10.0


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a (composite) Gauss-Legendre rule on ``interval``."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    panels: int
    order: int

    def __call__(self, values: np.ndarray) -> np.ndarray:
        """Contract sampled values (last axis over the nodes) with the weights."""
        return np.asarray(values) @ self.weights


def _check_interval(interval) -> tuple[float, float]:
    lo, hi = float(interval[0]), float(interval[1])
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"interval must be finite, got ({lo}, {hi})")
    if not lo < hi:
        raise DomainError(f"interval must satisfy lo < hi, got ({lo}, {hi})")
    return lo, hi


def _legendre_pair(order: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (P_order(x), P_order'(x))."""
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(2, order + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    return p1, order * (x * p1 - p0) / (x * x - 1.0)


@lru_cache(maxsize=None)
def _reference_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_order."""
    k = np.arange(1, order + 1)
    x = np.cos(np.pi * (k - 0.25) / (order + 0.5))
    for _ in range(100):
        p, dp = _legendre_pair(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) <= NEWTON_TOL:
            break
    else:
        raise NumericalError(f"Newton iteration for Gauss-Legendre order {order} did not converge")
    _, dp = _legendre_pair(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    # guesses run from +1 down to -1
    nodes, weights = x[::-1].copy(), w[::-1].copy()
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def gauss_legendre(order: int, interval=(-1.0, 1.0)) -> QuadratureRule:
    """Gauss-Legendre rule with ``order`` points mapped to ``interval``."""
    if int(order) != order or order < 1:
        raise DomainError(f"order must be a positive integer, got {order!r}")
    return composite_rule(interval, 1, int(order))


def composite_rule(interval, panels: int, order: int) -> QuadratureRule:
    """Composite rule: ``panels`` equal sub-intervals, ``order`` points each."""
    lo, hi = _check_interval(interval)
    if int(panels) != panels or panels < 1:
        raise DomainError(f"panels must be a positive integer, got {panels!r}")
    if int(order) != order or order < 1:
        raise DomainError(f"order must be a positive integer, got {order!r}")
    ref_x, ref_w = _reference_rule(int(order))
    edges = np.linspace(lo, hi, int(panels) + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * ref_x[None, :]).ravel()
    weights = (half[:, None] * ref_w[None, :]).ravel()
    return QuadratureRule(nodes, weights, (lo, hi), int(panels), int(order))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    interval,
    panels: int = 1,
    order: int = 16,
) -> float:
    """Composite Gauss-Legendre approximation of the integral of ``f``.

    ``f`` is called once with the full array of nodes and must return an
    array of the same shape.
    """
    rule = composite_rule(interval, panels, order)
    values = np.asarray(f(rule.nodes), dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        x_bad = float(rule.nodes[np.argmax(bad)])
        raise EvaluationError(f"integrand is not finite at x={x_bad!r}", x_bad)
    return float(rule(values))


@dataclass(frozen=True)
class SymmetricEigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column j pairs with eigenvalues[j]


def sym_eigen(M) -> SymmetricEigenSystem:
    """Full eigendecomposition of a real symmetric matrix by cyclic Jacobi.

    Sweeps continue until the off-diagonal Frobenius norm falls below
    ``JACOBI_TOL`` times the Frobenius norm of ``M``. Eigenvalues are returned
    in ascending order.
    """
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"matrix must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix has non-finite entries")
    asym = np.max(np.abs(A - A.T)) if A.size else 0.0
    if asym > 1e-12:
        raise DomainError(f"matrix is not symmetric (max |M - M^T| = {asym:.3e})")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    threshold = JACOBI_TOL * scale

    def off_norm():
        return float(np.linalg.norm(A - np.diag(np.diag(A))))

    off = off_norm()
    sweeps = 0
    while off > threshold:
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NumericalError(
                f"Jacobi iteration did not converge after {sweeps} sweeps "
                f"(off-diagonal norm {off:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
        sweeps += 1
        off = off_norm()
    eigenvalues = np.diag(A).copy()
    order = np.argsort(eigenvalues, kind="stable")
    return SymmetricEigenSystem(eigenvalues[order], V[:, order].copy())


def gaussian_integral(x):
    """``int_0^x exp(-u^2) du`` for scalar or array ``x``.

    Evaluated as ``x * int_0^1 exp(-(x s)^2) ds`` with composite Gauss-Legendre,
    doubling the panel count until two successive estimates agree to
    ``GAUSSIAN_TOL``.
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise DomainError("gaussian_integral requires finite x")
    xc = np.clip(xa, -_GAUSSIAN_CUTOFF, _GAUSSIAN_CUTOFF)
    flat = xc.ravel()

    def estimate(panels):
        rule = composite_rule((0.0, 1.0), panels, 16)
        u = flat[:, None] * rule.nodes[None, :]
        return flat * (np.exp(-u * u) @ rule.weights)

    panels = 4
    prev = estimate(panels)
    while True:
        panels *= 2
        cur = estimate(panels)
        if flat.size == 0 or np.max(np.abs(cur - prev)) <= GAUSSIAN_TOL:
            break
        if panels > 4096:
            raise NumericalError("gaussian_integral failed to self-converge")
        prev = cur
    limit = 0.5 * math.sqrt(math.pi)
    out = np.clip(cur, -limit, limit).reshape(xc.shape)
    return float(out) if out.ndim == 0 else out
