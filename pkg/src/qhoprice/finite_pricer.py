"""Option prices in the finite oscillator model.

Prices live on the grid ``S_m = exp(m sqrt(kappa))``, ``-l <= m <= l``. With
Harper functions ``h_n`` and levels ``lambda_n``,

    V(S_m, t) = exp(-m gamma sqrt(kappa)) * sum_n exp(eps_n (t - T)) h_n(m) b_n
    b_n = sum_q payoff_q exp(q gamma sqrt(kappa)) h_n(q)

with ``eps_n = sigma^2 lambda_n + (sigma^2/2)(gamma + 1)^2``. All ``d`` terms
are kept, so at ``t = T`` the payoff is reproduced up to round-off.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError
from .finite_oscillator import FiniteOscillator, build_grid, diagonalize
from .market import MarketParams, OptionKind, OptionSpec, bs_price, gamma_of

__all__ = [
    "DiscreteMarket",
    "PriceCurve",
    "NearStrikeRow",
    "Fig1Data",
    "FIG1",
    "build_market",
    "discrete_payoff",
    "finite_coefficients",
    "finite_price",
    "price_curve",
    "spectral_terms",
    "near_strike_report",
    "reproduce_fig1",
    "format_number",
    "CSV_HEADER",
]

logger = logging.getLogger(__name__)

CSV_HEADER = ("m", "S", "V_t3", "V_t4", "V_t5", "payoff")
NEAR_STRIKE_WARN = 0.25
# values this small are round-off of an exactly zero price
PRICE_NOISE_FLOOR = 1e-10


@dataclass(frozen=True)
class DiscreteMarket:
    oscillator: FiniteOscillator
    params: MarketParams
    strike_index: int
    maturity: float
    gamma: float
    epsilons: np.ndarray = field(repr=False)

    @property
    def grid(self):
        return self.oscillator.grid

    @property
    def strike(self) -> float:
        return math.exp(self.strike_index * self.grid.step)

    @property
    def prices(self) -> np.ndarray:
        """Grid prices ``exp(m sqrt(kappa))`` in index order."""
        return np.exp(self.grid.points)


def build_market(
    d: int,
    params: MarketParams,
    strike_index: int,
    maturity: float,
    oscillator: FiniteOscillator | None = None,
) -> DiscreteMarket:
    if oscillator is None:
        oscillator = diagonalize(build_grid(d))
    elif oscillator.d != d:
        raise DomainError(f"oscillator has d={oscillator.d}, expected {d}")
    ell = oscillator.grid.ell
    if int(strike_index) != strike_index or not -ell <= strike_index <= ell:
        raise DomainError(f"strike_index must be an integer in [-{ell}, {ell}], got {strike_index}")
    if not (math.isfinite(maturity) and maturity > 0):
        raise DomainError(f"maturity must be positive, got {maturity}")
    gamma = gamma_of(params)
    s2 = params.sigma**2
    eps = s2 * oscillator.eigenvalues + 0.5 * s2 * (gamma + 1.0) ** 2
    eps.flags.writeable = False
    return DiscreteMarket(oscillator, params, int(strike_index), float(maturity), gamma, eps)


def discrete_payoff(market: DiscreteMarket, kind) -> np.ndarray:
    kind = OptionKind.parse(kind)
    n = market.grid.indices
    S = market.prices
    K = market.strike
    k = market.strike_index
    if kind is OptionKind.CALL:
        return np.where(n >= k, S - K, 0.0)
    return np.where(n <= k, K - S, 0.0)


def finite_coefficients(market: DiscreteMarket, payoff) -> np.ndarray:
    """Time-free coefficients ``b_n``; the coefficient of ``exp(eps_n t)`` is
    ``exp(-eps_n T) b_n``."""
    payoff = np.asarray(payoff, dtype=float)
    if payoff.shape != (market.grid.d,):
        raise DomainError(f"payoff must have length d={market.grid.d}")
    weighted = payoff * np.exp(market.gamma * market.grid.points)
    return market.oscillator.harpers.T @ weighted


def spectral_terms(market: DiscreteMarket, coefficients, t: float) -> np.ndarray:
    """Term matrix: entry ``[n, pos]`` is the n-th series term at grid position ``pos``."""
    if t > market.maturity:
        raise DomainError(f"t must not exceed maturity T={market.maturity}")
    coefficients = np.asarray(coefficients, dtype=float)
    damping = np.exp(market.epsilons * (t - market.maturity))
    h = market.oscillator.harpers  # [pos, n]
    discount = np.exp(-market.gamma * market.grid.points)
    return (damping * coefficients)[:, None] * h.T * discount[None, :]


def finite_price(market: DiscreteMarket, coefficients, m: int, t: float) -> float:
    """``V(exp(m sqrt(kappa)), t)``."""
    pos = market.grid.position(m)
    return float(spectral_terms(market, coefficients, t)[:, pos].sum())


@dataclass(frozen=True)
class PriceCurve:
    t: float
    values: np.ndarray


def price_curve(market: DiscreteMarket, coefficients, t: float) -> PriceCurve:
    values = spectral_terms(market, coefficients, t).sum(axis=0)
    if not np.all(np.isfinite(values)):
        raise DomainError(f"non-finite price on the curve at t={t}")
    return PriceCurve(float(t), values)


@dataclass(frozen=True)
class NearStrikeRow:
    m: int
    S: float
    finite: float
    black_scholes: float
    relative_deviation: float

    @property
    def warn(self) -> bool:
        return self.relative_deviation > NEAR_STRIKE_WARN


def near_strike_report(
    market: DiscreteMarket, kind, coefficients, t: float, offsets=(-1, 0, 1)
) -> list[NearStrikeRow]:
    """Finite-model prices next to the closed form at grid points around the strike."""
    spec = OptionSpec(OptionKind.parse(kind), market.strike, market.maturity)
    rows = []
    for off in offsets:
        m = market.strike_index + off
        if not -market.grid.ell <= m <= market.grid.ell:
            continue
        S = math.exp(m * market.grid.step)
        v = finite_price(market, coefficients, m, t)
        ref = bs_price(S, t, spec, market.params)
        rel = abs(v - ref) / abs(ref) if ref != 0 else math.inf
        rows.append(NearStrikeRow(m, S, v, ref, rel))
    return rows


FIG1 = {
    "d": 21,
    "sigma": 0.25,
    "r": 0.03,
    "strike_index": 8,
    "maturity": 5.0,
    "times": (3.0, 4.0, 5.0),
}


def format_number(value: float) -> str:
    """10 significant digits, locale independent, round-off zeros printed as 0."""
    if abs(value) < PRICE_NOISE_FLOOR:
        return "0"
    return f"{value:.10g}"


@dataclass(frozen=True)
class Fig1Data:
    market: DiscreteMarket
    times: tuple[float, ...]
    curves: dict  # kind -> list[PriceCurve], ordered like times
    payoffs: dict  # kind -> ndarray
    near_strike: list[NearStrikeRow]
    files: tuple[Path, ...] = ()

    def rows(self, kind) -> list[list[str]]:
        kind = OptionKind.parse(kind)
        out = []
        for pos, m in enumerate(self.market.grid.indices):
            row = [str(int(m)), format_number(self.market.prices[pos])]
            row += [format_number(c.values[pos]) for c in self.curves[kind]]
            row.append(format_number(self.payoffs[kind][pos]))
            out.append(row)
        return out


def reproduce_fig1(out_dir=None, oscillator: FiniteOscillator | None = None) -> Fig1Data:
    """Call and put curves of the d=21 finite model at t = 3, 4, 5.

    With ``out_dir`` set, writes ``fig1_call.csv`` and ``fig1_put.csv``
    (header ``m,S,V_t3,V_t4,V_t5,payoff``) there.
    """
    params = MarketParams(FIG1["sigma"], FIG1["r"])
    market = build_market(FIG1["d"], params, FIG1["strike_index"], FIG1["maturity"], oscillator)
    times = FIG1["times"]
    curves, payoffs, coeffs = {}, {}, {}
    for kind in OptionKind:
        payoffs[kind] = discrete_payoff(market, kind)
        coeffs[kind] = finite_coefficients(market, payoffs[kind])
        curves[kind] = [price_curve(market, coeffs[kind], t) for t in times]
    near = near_strike_report(market, OptionKind.CALL, coeffs[OptionKind.CALL], 4.0)
    for row in near:
        if row.warn:
            logger.warning(
                "near-strike deviation %.3f at m=%d exceeds %.2f", row.relative_deviation,
                row.m, NEAR_STRIKE_WARN,
            )
    data = Fig1Data(market, times, curves, payoffs, near)
    if out_dir is None:
        return data
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for kind in OptionKind:
        path = out_dir / f"fig1_{kind.value}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            writer.writerows(data.rows(kind))
        written.append(path)
    return Fig1Data(market, times, curves, payoffs, near, tuple(written))
