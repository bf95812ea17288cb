"""Hermite polynomials and orthonormal Hermite-Gauss functions.

The functions ``psi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi))`` are
evaluated with the normalized three-term recurrence, which stays bounded for
any order and never forms ``H_n`` or ``n!`` explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "HERMITE_H_MAX",
    "HermiteBasis",
    "hermite_h",
    "psi",
    "psi_table",
    "psi_derivative",
    "oscillator_residual",
]

HERMITE_H_MAX = 64
_PI_QUARTER = math.pi ** -0.25


def _order(n, name="n") -> int:
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {n!r}")
    return int(n)


def _scalar_or_array(out):
    return float(out) if np.ndim(out) == 0 else out


def hermite_h(n: int, x):
    """Physicists' Hermite polynomial ``H_n(x)``, for ``n <= 64`` only."""
    n = _order(n)
    if n > HERMITE_H_MAX:
        raise DomainError(
            f"hermite_h is capped at n={HERMITE_H_MAX}; use psi() for higher orders"
        )
    x = np.asarray(x, dtype=float)
    h_prev, h = np.zeros_like(x), np.ones_like(x)
    for k in range(n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return _scalar_or_array(h)


def psi_table(max_n: int, x) -> np.ndarray:
    """Rows ``psi_0(x) .. psi_max_n(x)``; shape ``(max_n + 1,) + x.shape``."""
    max_n = _order(max_n, "max_n")
    x = np.asarray(x, dtype=float)
    out = np.empty((max_n + 1,) + x.shape)
    out[0] = _PI_QUARTER * np.exp(-0.5 * x * x)
    if max_n >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, max_n):
        out[n + 1] = (
            math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
        )
    return out


def psi(n: int, x):
    """Hermite-Gauss function ``psi_n(x)``."""
    n = _order(n)
    return _scalar_or_array(psi_table(n, x)[n])


def psi_derivative(n: int, x):
    """``psi_n'(x) = sqrt(n/2) psi_{n-1}(x) - sqrt((n+1)/2) psi_{n+1}(x)``."""
    n = _order(n)
    table = psi_table(n + 1, x)
    out = -math.sqrt((n + 1) / 2.0) * table[n + 1]
    if n > 0:
        out = out + math.sqrt(n / 2.0) * table[n - 1]
    return _scalar_or_array(out)


def oscillator_residual(n: int, x, h: float | None = None):
    """``-psi_n''/2 + x^2 psi_n/2 - (n + 1/2) psi_n``.

    With ``h=None`` the second derivative comes from the identity
    ``psi_n'' = (x^2 - 2n - 1) psi_n`` and the residual vanishes identically.
    With a step ``h`` it is the central second difference of :func:`psi`,
    which makes the residual a check of the evaluated functions.
    """
    x = np.asarray(x, dtype=float)
    p = psi_table(n, x)[n]
    if h is None:
        d2 = (x * x - 2 * n - 1) * p
    else:
        d2 = (psi_table(n, x + h)[n] - 2.0 * p + psi_table(n, x - h)[n]) / (h * h)
    return _scalar_or_array(-0.5 * d2 + 0.5 * x * x * p - (n + 0.5) * p)


@dataclass(frozen=True)
class HermiteBasis:
    """The first ``max_n + 1`` Hermite-Gauss functions as an expansion basis."""

    max_n: int

    def __post_init__(self):
        if self.max_n < 0:
            raise DomainError("max_n must be non-negative")

    @property
    def size(self) -> int:
        return self.max_n + 1

    def eigenvalue(self, n: int) -> float:
        return n + 0.5

    def evaluate(self, x) -> np.ndarray:
        return psi_table(self.max_n, x)

    def psi(self, n: int, x):
        self._check(n)
        return psi(n, x)

    def derivative(self, n: int, x):
        self._check(n)
        return psi_derivative(n, x)

    def _check(self, n: int) -> None:
        if not 0 <= n <= self.max_n:
            raise DomainError(f"order {n} outside basis range 0..{self.max_n}")
