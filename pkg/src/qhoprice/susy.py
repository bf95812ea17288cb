"""Supersymmetric partners of the oscillator potential.

For ``|alpha| > sqrt(pi)/2`` the function

    g(x) = exp(-x^2) / (alpha + int_0^x exp(-u^2) du)

solves ``g' = -2 x g - g^2`` and the potential ``U(x) = x^2/2 - g'(x)`` has
the same spectrum ``n + 1/2`` as the oscillator. Its eigenfunctions are the
ground state ``phi_0`` (annihilated by ``(d/dx + x + g)``) followed by
``A psi_n`` with ``A = (-d/dx + x + g) / sqrt(2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError
from .hermite import psi_table
from .numerics import composite_rule, gaussian_integral

__all__ = [
    "ALPHA_BOUND",
    "SusyParams",
    "SusyBasis",
    "g_alpha",
    "g_alpha_derivative",
    "u_alpha",
    "phi_zero",
    "apply_A",
    "susy_phi",
]

ALPHA_BOUND = 0.5 * math.sqrt(math.pi)
ALPHA_MARGIN = 1e-9
PHI_ZERO_TOL = 1e-13
NORM_INTERVAL = (-12.0, 12.0)
NORM_PANELS = 48
NORM_ORDER = 16


def _scalar_or_array(out):
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SusyParams:
    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha) or abs(self.alpha) <= ALPHA_BOUND + ALPHA_MARGIN:
            raise DomainError(
                f"alpha must satisfy |alpha| > sqrt(pi)/2 = {ALPHA_BOUND:.10f}, got {self.alpha}"
            )


def g_alpha(params: SusyParams, x):
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(np.exp(-x * x) / (params.alpha + gaussian_integral(x)))


def g_alpha_derivative(params: SusyParams, x):
    """Closed form ``g' = -2 x g - g^2``."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g_alpha(params, x))
    return _scalar_or_array(-2.0 * x * g - g * g)


def u_alpha(params: SusyParams, x):
    """Partner potential ``x^2/2 + 2 x g + g^2``."""
    x = np.asarray(x, dtype=float)
    g = np.asarray(g_alpha(params, x))
    return _scalar_or_array(0.5 * x * x + 2.0 * x * g + g * g)


def _integral_of_g(params: SusyParams, x: np.ndarray) -> np.ndarray:
    # int_0^x g = x int_0^1 g(x s) ds, panels doubled until self-consistent
    flat = x.ravel()

    def estimate(panels):
        rule = composite_rule((0.0, 1.0), panels, 16)
        u = flat[:, None] * rule.nodes[None, :]
        return flat * (np.asarray(g_alpha(params, u)) @ rule.weights)

    panels = 2
    prev = estimate(panels)
    while True:
        panels *= 2
        cur = estimate(panels)
        if flat.size == 0 or np.max(np.abs(cur - prev)) <= PHI_ZERO_TOL:
            return cur.reshape(x.shape)
        if panels > 1024:
            raise NumericalError("integral of g_alpha failed to self-converge")
        prev = cur


def phi_zero(params: SusyParams, x):
    """Unnormalized ground state ``exp(-x^2/2) exp(-int_0^x g)``."""
    x = np.asarray(x, dtype=float)
    return _scalar_or_array(np.exp(-0.5 * x * x - _integral_of_g(params, x)))


def apply_A(params: SusyParams, n: int, x):
    """``(A psi_n)(x)``, the unnormalized partner eigenfunction of level ``n + 1``."""
    x = np.asarray(x, dtype=float)
    table = psi_table(n + 1, x)
    return _scalar_or_array(_apply_A_rows(params, table, x)[n])


def _apply_A_rows(params: SusyParams, table: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``A psi_n`` for every row but the last of a :func:`psi_table` output."""
    top = table.shape[0] - 1
    n = np.arange(top).reshape((-1,) + (1,) * x.ndim)
    deriv = -np.sqrt((n + 1) / 2.0) * table[1:]
    deriv[1:] += np.sqrt(n[1:] / 2.0) * table[: top - 1]
    g = np.asarray(g_alpha(params, x))
    return (-deriv + (x + g) * table[:top]) / math.sqrt(2.0)


def _unnormalized(params: SusyParams, max_n: int, x: np.ndarray) -> np.ndarray:
    out = np.empty((max_n + 1,) + x.shape)
    out[0] = phi_zero(params, x)
    if max_n >= 1:
        out[1:] = _apply_A_rows(params, psi_table(max_n, x), x)
    return out


@dataclass(frozen=True)
class SusyBasis:
    """Orthonormal partner eigenfunctions ``Phi_0 .. Phi_max_n``."""

    params: SusyParams
    max_n: int
    norms: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, params: SusyParams, max_n: int) -> "SusyBasis":
        if max_n < 0:
            raise DomainError("max_n must be non-negative")
        rule = composite_rule(NORM_INTERVAL, NORM_PANELS, NORM_ORDER)
        values = _unnormalized(params, max_n, rule.nodes)
        norms = np.sqrt(rule(values * values))
        if not np.all(np.isfinite(norms)):
            raise NumericalError("non-finite partner-basis norm")
        norms.flags.writeable = False
        return cls(params, max_n, norms)

    @property
    def size(self) -> int:
        return self.max_n + 1

    def eigenvalue(self, n: int) -> float:
        return n + 0.5

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        tiny = np.flatnonzero(self.norms < 1e-12)
        if tiny.size:
            raise NumericalError(f"degenerate basis member n={int(tiny[0])} (norm below 1e-12)")
        scale = self.norms.reshape((-1,) + (1,) * x.ndim)
        return _unnormalized(self.params, self.max_n, x) / scale

    def phi(self, n: int, x):
        return susy_phi(self, n, x)


def susy_phi(basis: SusyBasis, n: int, x):
    """Normalized partner eigenfunction ``Phi_n``."""
    if not 0 <= n <= basis.max_n:
        raise DomainError(f"order {n} outside basis range 0..{basis.max_n}")
    norm = basis.norms[n]
    if norm < 1e-12:
        raise NumericalError(f"degenerate basis member n={n} (norm {norm:.3e})")
    x = np.asarray(x, dtype=float)
    if n == 0:
        raw = phi_zero(basis.params, x)
    else:
        raw = apply_A(basis.params, n - 1, x)
    return _scalar_or_array(np.asarray(raw) / norm)
