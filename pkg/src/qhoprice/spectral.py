"""Eigenfunction-series pricing for the Black-Scholes equation with an
oscillator (or partner) potential.

A solution has the separated form

    V(S, t) = S^-gamma * sum_n exp(eps_n (t - T)) * phi_n(ln S) * b_n

where ``b_n = int payoff(e^x) e^{gamma x} phi_n(x) dx`` is the time-free
projection of the terminal payoff. The coefficient multiplying
``exp(eps_n t)`` is ``c_n = exp(-eps_n T) b_n``; it is never formed, so large
``eps_n T`` cannot overflow.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError
from .hermite import HermiteBasis
from .market import (
    LogDomain,
    MarketParams,
    OptionKind,
    OptionSpec,
    gamma_of,
)
from .numerics import composite_rule
from .susy import SusyBasis, SusyParams

__all__ = [
    "BasisKind",
    "SpectralSolution",
    "epsilon_n",
    "make_basis",
    "project_payoff",
    "build_solution",
    "price",
    "series_terms",
    "terminal_residual",
    "DEFAULT_TERMS",
    "DEFAULT_PANELS",
    "DEFAULT_ORDER",
]

DEFAULT_TERMS = 48
DEFAULT_PANELS = 64
DEFAULT_ORDER = 16


class BasisKind(enum.Enum):
    OSCILLATOR = "oscillator"
    SUSY = "susy"


def epsilon_n(params, lambda_n):
    """Mode rate ``sigma^2 lambda + (sigma^2/2)(gamma + 1)^2``."""
    gamma = gamma_of(params)
    s2 = params.sigma**2
    return s2 * np.asarray(lambda_n, dtype=float) + 0.5 * s2 * (gamma + 1.0) ** 2


def make_basis(kind: BasisKind, n_terms: int, alpha: float | None = None):
    kind = BasisKind(kind)
    if kind is BasisKind.OSCILLATOR:
        return HermiteBasis(n_terms - 1)
    if alpha is None:
        raise DomainError("the partner basis needs alpha")
    return SusyBasis.build(SusyParams(alpha), n_terms - 1)


def project_payoff(
    payoff: Callable[[np.ndarray], np.ndarray],
    basis,
    gamma: float,
    domain: LogDomain,
    n_terms: int,
    panels: int = DEFAULT_PANELS,
    order: int = DEFAULT_ORDER,
    support: tuple[float, float] | None = None,
) -> np.ndarray:
    """Time-free coefficients ``b_n = int payoff(e^x) e^{gamma x} phi_n(x) dx``.

    The integral runs over ``support`` (price units, default the whole
    domain) in the log variable. Passing the payoff's actual support keeps
    its kink on a panel edge.
    """
    if n_terms < 1:
        raise DomainError("n_terms must be positive")
    if n_terms > basis.size:
        raise DomainError(f"basis has only {basis.size} members, asked for {n_terms}")
    lo, hi = support if support is not None else (domain.a, domain.b)
    lo, hi = max(lo, domain.a), min(hi, domain.b)
    if not lo < hi:
        return np.zeros(n_terms)
    rule = composite_rule((math.log(lo), math.log(hi)), panels, order)
    x = rule.nodes
    weight = np.asarray(payoff(np.exp(x)), dtype=float) * np.exp(gamma * x)
    if not np.all(np.isfinite(weight)):
        bad = float(x[np.argmax(~np.isfinite(weight))])
        raise DomainError(f"payoff is not finite at log-price {bad}")
    coeffs = rule(basis.evaluate(x)[:n_terms] * weight)
    return np.asarray(coeffs, dtype=float)


@dataclass(frozen=True)
class SpectralSolution:
    basis_kind: BasisKind
    gamma: float
    coefficients: np.ndarray
    epsilons: np.ndarray
    maturity: float
    truncation: int
    domain: LogDomain
    basis: object = field(repr=False)
    alpha: float | None = None

    def __post_init__(self):
        if len(self.coefficients) != self.truncation or len(self.epsilons) != self.truncation:
            raise DomainError("coefficients and epsilons must both have length N")
        if not (np.all(np.isfinite(self.coefficients)) and np.all(np.isfinite(self.epsilons))):
            raise DomainError("non-finite coefficients or rates")

    def price(self, S, t):
        return price(self, S, t)


def build_solution(
    spec: OptionSpec,
    params: MarketParams,
    basis_kind: BasisKind = BasisKind.OSCILLATOR,
    domain: LogDomain | None = None,
    n_terms: int = DEFAULT_TERMS,
    panels: int = DEFAULT_PANELS,
    order: int = DEFAULT_ORDER,
    alpha: float | None = None,
    basis=None,
) -> SpectralSolution:
    """Project the truncated payoff of ``spec`` onto the chosen eigenbasis."""
    basis_kind = BasisKind(basis_kind)
    if domain is None:
        domain = LogDomain.around(spec.strike)
    K = spec.strike
    if K < domain.a or K > domain.b:
        domain.check_strike(K)
    if basis is None:
        basis = make_basis(basis_kind, n_terms, alpha)
    gamma = gamma_of(params)
    if spec.kind is OptionKind.CALL:
        support = (K, domain.b)
    else:
        support = (domain.a, K)

    def terminal(S):
        return _band_payoff(S, spec, domain)

    coeffs = project_payoff(terminal, basis, gamma, domain, n_terms, panels, order, support)
    lambdas = np.array([basis.eigenvalue(n) for n in range(n_terms)])
    return SpectralSolution(
        basis_kind=basis_kind,
        gamma=gamma,
        coefficients=coeffs,
        epsilons=epsilon_n(params, lambdas),
        maturity=spec.maturity,
        truncation=n_terms,
        domain=domain,
        basis=basis,
        alpha=alpha if basis_kind is BasisKind.SUSY else None,
    )


def _band_payoff(S, spec: OptionSpec, domain: LogDomain):
    # same band logic as payoff_truncated, but tolerates K on a domain edge
    S = np.asarray(S, dtype=float)
    K = spec.strike
    if spec.kind is OptionKind.CALL:
        return np.where((S >= K) & (S <= domain.b), S - K, 0.0)
    return np.where((S >= domain.a) & (S <= K), K - S, 0.0)


def series_terms(solution: SpectralSolution, S, t) -> np.ndarray:
    """Individual series terms, shape ``(N,) + S.shape``; their sum is the price."""
    S = np.asarray(S, dtype=float)
    if np.any(t > solution.maturity):
        raise DomainError(f"t must not exceed maturity T={solution.maturity}")
    if not np.all(solution.domain.contains(S)):
        raise DomainError(
            f"S must lie inside the domain ({solution.domain.a}, {solution.domain.b})"
        )
    x = np.log(S)
    basis_vals = solution.basis.evaluate(x)[: solution.truncation]
    damping = np.exp(solution.epsilons * (t - solution.maturity))
    shape = (-1,) + (1,) * S.ndim
    return (
        np.exp(-solution.gamma * x)
        * (damping * solution.coefficients).reshape(shape)
        * basis_vals
    )


def price(solution: SpectralSolution, S, t):
    """Truncated-series value ``V(S, t)`` for ``S`` inside the domain, ``t <= T``."""
    out = series_terms(solution, S, t).sum(axis=0)
    return float(out) if np.ndim(out) == 0 else out


def residual_grid(domain: LogDomain, grid_size: int) -> np.ndarray:
    """Log-uniform cell midpoints strictly inside ``(a, b)``."""
    lo, hi = domain.log_bounds
    edges = np.linspace(lo, hi, grid_size + 1)
    return np.exp(0.5 * (edges[:-1] + edges[1:]))


def terminal_residual(
    solution: SpectralSolution, spec: OptionSpec, domain: LogDomain, grid_size: int = 50
) -> float:
    """Max over a price grid of ``|V(S, T) - truncated payoff(S)|``."""
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    S = residual_grid(domain, grid_size)
    target = _band_payoff(S, spec, domain)
    return float(np.max(np.abs(price(solution, S, solution.maturity) - target)))
