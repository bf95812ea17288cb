"""Market and contract parameters, payoffs and the closed-form Black-Scholes
reference pricer."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import gaussian_integral

__all__ = [
    "OptionKind",
    "MarketParams",
    "OptionSpec",
    "LogDomain",
    "gamma_of",
    "norm_cdf",
    "d_one_two",
    "bs_price",
    "payoff",
    "payoff_truncated",
]

DEFAULT_LOG_WIDTH = 6.0


class OptionKind(enum.Enum):
    CALL = "call"
    PUT = "put"

    @classmethod
    def parse(cls, value) -> "OptionKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown option kind {value!r} (expected 'call' or 'put')") from None


@dataclass(frozen=True)
class MarketParams:
    sigma: float
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.r)):
            raise DomainError("sigma and r must be finite")
        if self.sigma <= 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.r < 0:
            raise DomainError(f"r must be non-negative, got {self.r}")

    @property
    def gamma(self) -> float:
        return gamma_of(self)


@dataclass(frozen=True)
class OptionSpec:
    kind: OptionKind
    strike: float
    maturity: float

    def __post_init__(self):
        object.__setattr__(self, "kind", OptionKind.parse(self.kind))
        if not (math.isfinite(self.strike) and self.strike > 0):
            raise DomainError(f"strike must be positive and finite, got {self.strike}")
        if not (math.isfinite(self.maturity) and self.maturity > 0):
            raise DomainError(f"maturity must be positive and finite, got {self.maturity}")


@dataclass(frozen=True)
class LogDomain:
    """Price band ``(a, b)`` outside of which payoffs are truncated to zero."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("domain bounds must be finite")
        if not 0 < self.a < self.b:
            raise DomainError(f"domain requires 0 < a < b, got a={self.a}, b={self.b}")

    @classmethod
    def around(cls, strike: float, width: float = DEFAULT_LOG_WIDTH) -> "LogDomain":
        """Band ``[K e^-width, K e^width]``."""
        return cls(strike * math.exp(-width), strike * math.exp(width))

    @property
    def log_bounds(self) -> tuple[float, float]:
        return math.log(self.a), math.log(self.b)

    def check_strike(self, strike: float) -> None:
        if not self.a < strike < self.b:
            raise DomainError(
                f"strike {strike} must lie strictly inside the domain ({self.a}, {self.b})"
            )

    def contains(self, S) -> np.ndarray:
        S = np.asarray(S, dtype=float)
        return (S > self.a) & (S < self.b)


def gamma_of(params) -> float:
    """``r / sigma^2 - 1/2``."""
    return params.r / params.sigma**2 - 0.5


def norm_cdf(z):
    """Standard normal CDF, built on :func:`gaussian_integral`."""
    z = np.asarray(z, dtype=float)
    out = 0.5 + gaussian_integral(z / math.sqrt(2.0)) / math.sqrt(math.pi)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def d_one_two(S, spec: OptionSpec, params: MarketParams, t):
    """Return ``(d1, d2)`` of the closed-form solution at time ``t < T``."""
    S = np.asarray(S, dtype=float)
    tau = spec.maturity - np.asarray(t, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("d1/d2 need t < T; use the payoff at maturity")
    if np.any(S <= 0):
        raise DomainError("S must be positive")
    vol = params.sigma * np.sqrt(tau)
    log_moneyness = np.log(S / spec.strike)
    d1 = (log_moneyness + (params.r + 0.5 * params.sigma**2) * tau) / vol
    d2 = (log_moneyness + (params.r - 0.5 * params.sigma**2) * tau) / vol
    if d1.ndim == 0:
        return float(d1), float(d2)
    return d1, d2


def payoff(S, kind: OptionKind, strike: float):
    """Untruncated terminal payoff ``max(S-K, 0)`` or ``max(K-S, 0)``."""
    S = np.asarray(S, dtype=float)
    if OptionKind.parse(kind) is OptionKind.CALL:
        out = np.maximum(S - strike, 0.0)
    else:
        out = np.maximum(strike - S, 0.0)
    return float(out) if out.ndim == 0 else out


def bs_price(S, t, spec: OptionSpec, params: MarketParams):
    """Closed-form European price at spot ``S`` and time ``t <= T``.

    The put uses ``K e^{-r tau} N(-d2) - S N(-d1)``, which is the form that
    satisfies put-call parity.
    """
    S_arr = np.asarray(S, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if not (np.all(np.isfinite(S_arr)) and np.all(np.isfinite(t_arr))):
        raise DomainError("S and t must be finite")
    if np.any(S_arr <= 0):
        raise DomainError("S must be positive")
    if np.any(t_arr > spec.maturity):
        raise DomainError(f"t must not exceed maturity T={spec.maturity}")
    S_arr, t_arr = np.broadcast_arrays(S_arr, t_arr)
    out = np.empty(S_arr.shape)
    at_expiry = t_arr == spec.maturity
    out[at_expiry] = payoff(S_arr[at_expiry], spec.kind, spec.strike)
    live = ~at_expiry
    if live.any():
        S_l, t_l = S_arr[live], t_arr[live]
        d1, d2 = d_one_two(S_l, spec, params, t_l)
        discount = spec.strike * np.exp(-params.r * (spec.maturity - t_l))
        if spec.kind is OptionKind.CALL:
            value = S_l * norm_cdf(d1) - discount * norm_cdf(d2)
        else:
            value = discount * norm_cdf(-d2) - S_l * norm_cdf(-d1)
        out[live] = np.maximum(value, 0.0)
    return float(out) if out.ndim == 0 else out


def payoff_truncated(S, spec: OptionSpec, domain: LogDomain):
    """Payoff restricted to the price band: call on ``[K, b]``, put on ``[a, K]``."""
    domain.check_strike(spec.strike)
    S = np.asarray(S, dtype=float)
    K = spec.strike
    if spec.kind is OptionKind.CALL:
        out = np.where((S >= K) & (S <= domain.b), S - K, 0.0)
    else:
        out = np.where((S >= domain.a) & (S <= K), K - S, 0.0)
    return float(out) if out.ndim == 0 else out
