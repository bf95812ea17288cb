"""Spectral option pricing for the Black-Scholes equation with a harmonic
oscillator potential: Hermite-Gauss series, supersymmetric partner bases and
a finite model built on Harper functions."""

from .errors import ConfigError, ConsistencyError, DomainError, EvaluationError, NumericalError
from .finite_oscillator import FiniteGrid, FiniteOscillator, build_grid, diagonalize
from .finite_pricer import (
    DiscreteMarket,
    PriceCurve,
    build_market,
    discrete_payoff,
    finite_coefficients,
    finite_price,
    price_curve,
    reproduce_fig1,
)
from .hermite import HermiteBasis, psi
from .market import LogDomain, MarketParams, OptionKind, OptionSpec, bs_price, gamma_of
from .spectral import BasisKind, SpectralSolution, build_solution, price
from .susy import SusyBasis, SusyParams

__version__ = "0.1.0"
