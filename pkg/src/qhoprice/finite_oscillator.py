"""Finite quantum oscillator on the grid ``{n sqrt(kappa) : -l <= n <= l}``.

``d = 2l + 1`` is odd and ``kappa = 2 pi / d``. Vectors are indexed by the
grid offset ``n + l`` (position 0 holds ``n = -l``). The Hamiltonian is
``-(D2 + F D2 F^+)/2`` with ``D2`` the periodic second difference and ``F``
the centred finite Fourier transform; its eigenvectors (Harper functions)
are finite analogues of the Hermite-Gauss functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, DomainError
from .hermite import psi_table
from .numerics import sym_eigen

__all__ = [
    "FiniteGrid",
    "FiniteOscillator",
    "build_grid",
    "fourier_matrix",
    "finite_fourier",
    "finite_fourier_adjoint",
    "d2_matrix",
    "finite_d2",
    "build_hamiltonian",
    "alternation_count",
    "resolved",
    "fourier_class",
    "diagonalize",
]

ZERO_THRESHOLD = 1e-9
MIN_GAP = 1e-10
SIGN_OVERLAP_FLOOR = 1e-6


@dataclass(frozen=True)
class FiniteGrid:
    d: int
    ell: int
    kappa: float
    indices: np.ndarray = field(repr=False)  # -l .. l
    points: np.ndarray = field(repr=False)  # n sqrt(kappa)

    @property
    def step(self) -> float:
        return math.sqrt(self.kappa)

    def position(self, n: int) -> int:
        """Array position of grid index ``n``."""
        if not -self.ell <= n <= self.ell:
            raise DomainError(f"grid index {n} outside [-{self.ell}, {self.ell}]")
        return n + self.ell


def build_grid(d: int) -> FiniteGrid:
    if int(d) != d or d < 3 or d % 2 == 0:
        raise DomainError(f"d must be odd and at least 3, got {d}")
    d = int(d)
    ell = (d - 1) // 2
    kappa = 2.0 * math.pi / d
    indices = np.arange(-ell, ell + 1)
    points = indices * math.sqrt(kappa)
    indices.flags.writeable = False
    points.flags.writeable = False
    return FiniteGrid(d, ell, kappa, indices, points)


def fourier_matrix(grid: FiniteGrid) -> np.ndarray:
    """Unitary matrix with entries ``exp(-2 pi i n k / d) / sqrt(d)``."""
    n = grid.indices
    return np.exp(-2j * np.pi * np.outer(n, n) / grid.d) / math.sqrt(grid.d)


def _check_length(grid: FiniteGrid, psi) -> np.ndarray:
    psi = np.asarray(psi)
    if psi.shape[0] != grid.d:
        raise DomainError(f"vector length {psi.shape[0]} does not match d={grid.d}")
    return psi


def finite_fourier(grid: FiniteGrid, psi) -> np.ndarray:
    psi = _check_length(grid, psi)
    return fourier_matrix(grid) @ psi


def finite_fourier_adjoint(grid: FiniteGrid, psi) -> np.ndarray:
    psi = _check_length(grid, psi)
    return fourier_matrix(grid).conj().T @ psi


def d2_matrix(grid: FiniteGrid) -> np.ndarray:
    """Periodic second-difference matrix scaled by ``1/kappa``."""
    d = grid.d
    eye = np.eye(d)
    return (np.roll(eye, 1, axis=1) + np.roll(eye, -1, axis=1) - 2.0 * eye) / grid.kappa


def finite_d2(grid: FiniteGrid, psi) -> np.ndarray:
    psi = _check_length(grid, psi)
    return (np.roll(psi, -1, axis=0) - 2.0 * psi + np.roll(psi, 1, axis=0)) / grid.kappa


def build_hamiltonian(grid: FiniteGrid) -> np.ndarray:
    """The symmetric matrix
    ``-(d / 4 pi) (2 (cos(2 pi n / d) - 2) delta_nm + nearest and corner neighbours)``.
    """
    d = grid.d
    diag = 2.0 * (np.cos(2.0 * np.pi * grid.indices / d) - 2.0)
    H = np.diag(diag)
    off = np.ones(d - 1)
    H += np.diag(off, 1) + np.diag(off, -1)
    H[0, -1] += 1.0
    H[-1, 0] += 1.0
    return -(d / (4.0 * math.pi)) * H


def alternation_count(v) -> int:
    """Strict sign changes along ``v``, ignoring entries below
    ``1e-9 * max|v|``."""
    v = np.asarray(v, dtype=float)
    scale = np.max(np.abs(v)) if v.size else 0.0
    if not scale > 0:
        raise DomainError("alternation count of a zero vector is undefined")
    signs = np.sign(v[np.abs(v) >= ZERO_THRESHOLD * scale])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def resolved(v) -> bool:
    """Whether every sign of ``v`` is numerically meaningful.

    Entries forced to zero by odd parity do not count against this; any other
    entry below the alternation threshold means sign changes may be hidden.
    """
    v = np.asarray(v, dtype=float)
    small = np.abs(v) < ZERO_THRESHOLD * np.max(np.abs(v))
    if v.size % 2 == 1 and np.allclose(v, -v[::-1], atol=1e-12):
        small[v.size // 2] = False
    return not small.any()


@dataclass(frozen=True)
class FiniteOscillator:
    grid: FiniteGrid
    hamiltonian: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray  # eigenvalues[m] belongs to h_m
    harpers: np.ndarray = field(repr=False)  # column m is h_m
    alternations: tuple[int, ...]
    resolved: tuple[bool, ...]

    @property
    def d(self) -> int:
        return self.grid.d

    def harper(self, m: int) -> np.ndarray:
        return self.harpers[:, m]


def fourier_class(grid: FiniteGrid, v) -> int:
    """``k`` in 0..3 with ``F v = (-i)^k v`` for a real normalized eigenvector."""
    v = np.asarray(v, dtype=float)
    c = complex(v @ finite_fourier(grid, v)) / float(v @ v)
    k = int(np.argmin([abs(c - (-1j) ** j) for j in range(4)]))
    if abs(c - (-1j) ** k) > 1e-6:
        raise ConsistencyError(f"vector is not a Fourier eigenvector (overlap {c:.6g})")
    return k


def diagonalize(grid: FiniteGrid) -> FiniteOscillator:
    """Eigen-decompose the Hamiltonian and fix order and signs of the Harper
    functions.

    ``h_m`` is the eigenvector with ``m`` sign alternations. Counting signs
    directly breaks down for large ``d``, where the most oscillatory vectors
    fall to round-off level in the middle of the grid, so the index is
    assigned as ``m = 4 j + k``: ``k`` is the Fourier class
    (``F h = (-i)^k h``) and ``j`` the rank of the eigenvalue within that
    class. Every vector whose signs are all resolvable must then have exactly
    ``m`` alternations, otherwise :class:`ConsistencyError` is raised.

    The resulting order is not ascending in eigenvalue: in the upper half of
    the spectrum neighbouring levels swap. ``eigenvalues[m]`` is the level of
    ``h_m``.

    Each column is oriented to overlap positively with the sampled
    Hermite-Gauss function of the same index, falling back to a positive
    largest component when that overlap is negligible.
    """
    H = build_hamiltonian(grid)
    system = sym_eigen(H)
    gaps = np.diff(system.eigenvalues)
    if gaps.size and gaps.min() < MIN_GAP:
        raise ConsistencyError(f"near-degenerate eigenvalues (min gap {gaps.min():.3e})")
    classes = [fourier_class(grid, v) for v in system.eigenvectors.T]
    index = np.empty(grid.d, dtype=int)
    seen = [0, 0, 0, 0]
    for col, k in enumerate(classes):  # columns are in ascending eigenvalue order
        index[col] = 4 * seen[k] + k
        seen[k] += 1
    if sorted(index.tolist()) != list(range(grid.d)):
        raise ConsistencyError(
            f"Fourier class multiplicities {seen} do not fit d={grid.d}"
        )
    order = np.argsort(index)
    lam = system.eigenvalues[order].copy()
    vecs = system.eigenvectors[:, order].copy()
    sampled = psi_table(grid.d - 1, grid.points)
    for m in range(grid.d):
        v = vecs[:, m]
        ref = sampled[m] / np.linalg.norm(sampled[m])
        overlap = float(ref @ v)
        if abs(overlap) >= SIGN_OVERLAP_FLOOR:
            flip = overlap < 0
        else:
            flip = v[np.argmax(np.abs(v))] < 0
        if flip:
            vecs[:, m] = -v
    counts = tuple(alternation_count(vecs[:, m]) for m in range(grid.d))
    ok = tuple(resolved(vecs[:, m]) for m in range(grid.d))
    for m in range(grid.d):
        if ok[m] and counts[m] != m:
            raise ConsistencyError(
                f"Harper function {m} has {counts[m]} sign alternations, expected {m}"
            )
    H.flags.writeable = False
    lam.flags.writeable = False
    vecs.flags.writeable = False
    return FiniteOscillator(grid, H, lam, vecs, counts, ok)
