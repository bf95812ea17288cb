"""Self-check suite run by ``pricer validate``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import finite_oscillator as fo
from .finite_pricer import (
    build_market,
    discrete_payoff,
    finite_coefficients,
    finite_price,
    price_curve,
    reproduce_fig1,
)
from .hermite import oscillator_residual, psi_table
from .market import LogDomain, MarketParams, OptionKind, OptionSpec, bs_price
from .numerics import composite_rule
from .spectral import build_solution, series_terms, terminal_residual
from .susy import SusyBasis, SusyParams, u_alpha

__all__ = ["Check", "CHECKS", "run_checks"]


@dataclass(frozen=True)
class Check:
    name: str
    func: Callable[[], tuple[bool, str]]


def _hermite_orthonormality():
    rule = composite_rule((-20.0, 20.0), 40, 16)
    P = psi_table(20, rule.nodes)
    dev = np.max(np.abs((P * rule.weights) @ P.T - np.eye(21)))
    return dev < 1e-8, f"max deviation {dev:.2e} (< 1e-8)"


def _oscillator_residual():
    x = np.linspace(-4.0, 4.0, 81)
    worst = max(np.max(np.abs(oscillator_residual(n, x, h=1e-4))) for n in range(11))
    return worst < 1e-5, f"max finite-difference residual {worst:.2e} (< 1e-5)"


def _susy_suite():
    rule = composite_rule((-12.0, 12.0), 48, 16)
    x = np.linspace(-4.0, 4.0, 33)
    h = 1e-4
    gram = resid = 0.0
    for alpha in (1.5, -1.5):
        basis = SusyBasis.build(SusyParams(alpha), 8)
        V = basis.evaluate(rule.nodes)
        gram = max(gram, np.max(np.abs((V * rule.weights) @ V.T - np.eye(9))))
        centre, plus, minus = basis.evaluate(x), basis.evaluate(x + h), basis.evaluate(x - h)
        d2 = (plus - 2 * centre + minus) / h**2
        levels = (np.arange(9) + 0.5)[:, None]
        r = -0.5 * d2 + u_alpha(basis.params, x) * centre - levels * centre
        resid = max(resid, np.max(np.abs(r)))
    big = SusyBasis.build(SusyParams(1e6), 9)
    reduction = np.max(np.abs(big.evaluate(x)[1:] - psi_table(9, x)[1:]))
    ok = gram < 1e-6 and resid < 1e-4 and reduction < 1e-4
    return ok, f"gram {gram:.2e}, residual {resid:.2e}, large-alpha {reduction:.2e}"


def _finite_oscillator():
    worst = {"eig": 0.0, "fourier": 0.0, "commute": 0.0}
    alternations_ok = True
    for d in (5, 9, 21):
        grid = fo.build_grid(d)
        osc = fo.diagonalize(grid)
        F = fo.fourier_matrix(grid)
        h = osc.harpers
        worst["eig"] = max(worst["eig"], np.max(np.abs(osc.hamiltonian @ h - h * osc.eigenvalues)))
        phases = (-1j) ** np.arange(d)
        worst["fourier"] = max(worst["fourier"], np.max(np.abs(F @ h - h * phases)))
        worst["commute"] = max(
            worst["commute"], np.max(np.abs(F @ osc.hamiltonian - osc.hamiltonian @ F))
        )
        alternations_ok &= all(fo.alternation_count(h[:, m]) == m for m in range(d))
    diag = np.diag(fo.build_hamiltonian(fo.build_grid(3)))
    diag_dev = np.max(np.abs(diag - np.array([15, 6, 15]) / (4 * math.pi)))
    ok = (worst["eig"] < 1e-10 and worst["fourier"] < 1e-8 and worst["commute"] < 1e-10
          and alternations_ok and diag_dev < 1e-12)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return ok, f"{detail}, alternations {'ok' if alternations_ok else 'WRONG'}, d=3 diag {diag_dev:.1e}"


def _continuum_levels():
    osc = fo.diagonalize(fo.build_grid(63))
    dev = np.max(np.abs(osc.eigenvalues[:6] - (np.arange(6) + 0.5)))
    return dev < 0.05, f"max |lambda_m - (m+1/2)|, m<=5, d=63: {dev:.3f} (< 0.05)"


def _continuum_overlap():
    grid = fo.build_grid(63)
    osc = fo.diagonalize(grid)
    P = psi_table(3, grid.points)
    P /= np.linalg.norm(P, axis=1)[:, None]
    worst = min(float(P[m] @ osc.harpers[:, m]) for m in range(4))
    return worst > 0.99, f"min Harper/Hermite overlap, m<=3, d=63: {worst:.5f} (> 0.99)"


def _terminal_exactness():
    params = MarketParams(0.25, 0.03)
    worst = 0.0
    for d in (5, 9, 21):
        osc = fo.diagonalize(fo.build_grid(d))
        ell = (d - 1) // 2
        for k in range(-ell, ell + 1):
            market = build_market(d, params, k, 5.0, osc)
            for kind in OptionKind:
                pay = discrete_payoff(market, kind)
                b = finite_coefficients(market, pay)
                worst = max(worst, np.max(np.abs(price_curve(market, b, 5.0).values - pay)))
    return worst < 1e-9, f"max terminal error {worst:.2e} (< 1e-9)"


def _fig1():
    start = time.perf_counter()
    data = reproduce_fig1()
    elapsed = time.perf_counter() - start
    exact = all(
        np.max(np.abs(data.curves[k][-1].values - data.payoffs[k])) < 1e-9 for k in OptionKind
    )
    warn = [r.m for r in data.near_strike if r.warn]
    note = f"; near-strike warning at m={warn}" if warn else ""
    return exact and elapsed < 2.0, f"built in {elapsed:.2f}s, terminal curves exact={exact}{note}"


def _lognormal_oracle(S, K, sigma, r, tau, kind):
    # integrate on the side of the payoff kink where the payoff is nonzero
    kink = (math.log(K / S) - (r - 0.5 * sigma**2) * tau) / (sigma * math.sqrt(tau))
    kink = min(max(kink, -12.0), 12.0)
    interval = (kink, 12.0) if kind is OptionKind.CALL else (-12.0, kink)
    if interval[1] - interval[0] <= 0:
        return 0.0
    rule = composite_rule(interval, 48, 16)
    z = rule.nodes
    ST = S * np.exp((r - 0.5 * sigma**2) * tau + sigma * math.sqrt(tau) * z)
    pay = np.maximum(ST - K, 0.0) if kind is OptionKind.CALL else np.maximum(K - ST, 0.0)
    density = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    return math.exp(-r * tau) * float(rule(pay * density))


def _closed_form():
    rng = np.random.default_rng(20240101)
    worst = parity = 0.0
    for _ in range(20):
        S, sigma = rng.uniform(50, 150), rng.uniform(0.1, 0.6)
        r, tau = rng.uniform(0.0, 0.1), rng.uniform(0.1, 3.0)
        K = 100.0
        call = bs_price(S, 0.0, OptionSpec(OptionKind.CALL, K, tau), MarketParams(sigma, r))
        put = bs_price(S, 0.0, OptionSpec(OptionKind.PUT, K, tau), MarketParams(sigma, r))
        worst = max(worst, abs(call - _lognormal_oracle(S, K, sigma, r, tau, OptionKind.CALL)))
        parity = max(parity, abs(call - put - (S - K * math.exp(-r * tau))))
    return worst < 1e-5 and parity < 1e-12, f"oracle error {worst:.1e}, parity {parity:.1e}"


def _spectral_terminal():
    params = MarketParams(0.25, 0.03)
    spec = OptionSpec(OptionKind.CALL, 1.0, 1.0)
    domain = LogDomain.around(1.0)
    residuals = [
        terminal_residual(build_solution(spec, params, domain=domain, n_terms=n), spec, domain)
        for n in (8, 16, 32, 48)
    ]
    monotone = all(b < a for a, b in zip(residuals, residuals[1:]))
    sol = build_solution(spec, params, domain=domain)
    S = np.exp(np.linspace(-5.5, 5.5, 23))
    dominated = np.all(np.abs(series_terms(sol, S, 0.5)) <= np.abs(series_terms(sol, S, 1.0)))
    detail = ", ".join(f"{r:.1f}" for r in residuals)
    return monotone and bool(dominated), f"residuals N=8,16,32,48: {detail}; damping ok={dominated}"


def _cross_model():
    params = MarketParams(1.0, 0.03)
    market = build_market(63, params, 0, 5.0)
    b = finite_coefficients(market, discrete_payoff(market, OptionKind.CALL))
    sol = build_solution(OptionSpec(OptionKind.CALL, 1.0, 5.0), params)
    ms = range(-2, 3)
    fin = np.array([finite_price(market, b, m, 4.0) for m in ms])
    spec_prices = sol.price(np.exp(np.array(ms) * market.grid.step), 4.0)
    rel = np.max(np.abs(fin - spec_prices) / np.abs(spec_prices))
    return rel < 0.05, f"max relative gap d=63 vs N=48: {rel:.3f} (< 0.05)"


CHECKS = (
    Check("hermite_orthonormality", _hermite_orthonormality),
    Check("oscillator_eigen_residual", _oscillator_residual),
    Check("susy_partner_suite", _susy_suite),
    Check("finite_oscillator", _finite_oscillator),
    Check("continuum_levels", _continuum_levels),
    Check("continuum_harper_overlap", _continuum_overlap),
    Check("finite_terminal_exactness", _terminal_exactness),
    Check("fig1_reproduction", _fig1),
    Check("closed_form_black_scholes", _closed_form),
    Check("spectral_terminal_and_damping", _spectral_terminal),
    Check("cross_model_consistency", _cross_model),
)


def run_checks(checks=CHECKS):
    """Yield ``(name, ok, detail)``; an exception inside a check counts as failure."""
    for check in checks:
        try:
            ok, detail = check.func()
        except Exception as exc:  # reported, not raised: the suite keeps going
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield check.name, bool(ok), detail
