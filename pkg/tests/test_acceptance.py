"""Acceptance criteria, one test each, at the contract tolerances.

Every test records a PASS/FAIL line that is printed in the terminal summary.
"""

import csv
import math
import time

import numpy as np
import pytest
from scipy import integrate as sp_integrate
from scipy.special import eval_hermite, gammaln

from qhoprice import finite_oscillator as fo
from qhoprice.cli import main
from qhoprice.finite_pricer import build_market, discrete_payoff, finite_coefficients, finite_price
from qhoprice.hermite import oscillator_residual, psi_table
from qhoprice.market import LogDomain, MarketParams, OptionKind, OptionSpec, bs_price
from qhoprice.numerics import composite_rule
from qhoprice.spectral import build_solution, series_terms, terminal_residual
from qhoprice.susy import SusyBasis, SusyParams, u_alpha

CALL, PUT = OptionKind.CALL, OptionKind.PUT


def test_criterion_01_hermite_orthonormality(acceptance):
    start = time.perf_counter()
    rule = composite_rule((-20.0, 20.0), 40, 16)
    P = psi_table(20, rule.nodes)
    dev = np.max(np.abs((P * rule.weights) @ P.T - np.eye(21)))
    elapsed = time.perf_counter() - start
    # the closed form H_n e^{-x^2/2} / norm agrees with the recurrence
    log_norm = 0.5 * (np.arange(21) * math.log(2) + gammaln(np.arange(21) + 1)
                      + 0.5 * math.log(math.pi))
    x = np.linspace(-6, 6, 25)
    ref = np.array([eval_hermite(n, x) for n in range(21)]) * np.exp(
        -0.5 * x * x - log_norm[:, None])
    agree = np.max(np.abs(psi_table(20, x) - ref))
    ok = dev < 1e-8 and elapsed < 5.0 and agree < 1e-12
    acceptance(1, ok, f"max |<psi_n,psi_k> - delta| = {dev:.1e} (< 1e-8) in {elapsed:.3f}s (< 5s)")
    assert ok


def test_criterion_02_oscillator_residual(acceptance):
    x = np.linspace(-4.0, 4.0, 161)
    worst = max(np.max(np.abs(oscillator_residual(n, x, h=1e-4))) for n in range(11))
    ok = worst < 1e-5
    acceptance(2, ok, f"finite-difference residual, n <= 10, x in [-4,4]: {worst:.1e} (< 1e-5)")
    assert ok


def test_criterion_03_susy_partner_suite(acceptance):
    rule = composite_rule((-12.0, 12.0), 48, 16)
    x = np.linspace(-4.0, 4.0, 81)
    h = 1e-4
    gram = resid = 0.0
    for alpha in (1.5, -1.5):
        basis = SusyBasis.build(SusyParams(alpha), 8)
        V = basis.evaluate(rule.nodes)
        gram = max(gram, np.max(np.abs((V * rule.weights) @ V.T - np.eye(9))))
        c, p, m = basis.evaluate(x), basis.evaluate(x + h), basis.evaluate(x - h)
        levels = (np.arange(9) + 0.5)[:, None]
        r = -0.5 * (p - 2 * c + m) / h**2 + u_alpha(basis.params, x) * c - levels * c
        resid = max(resid, np.max(np.abs(r)))
    big = SusyBasis.build(SusyParams(1e6), 9)
    reduction = np.max(np.abs(big.evaluate(x)[1:] - psi_table(9, x)[1:]))
    ok = gram < 1e-6 and resid < 1e-4 and reduction < 1e-4
    acceptance(3, ok, f"gram {gram:.1e} (< 1e-6), Schrodinger residual {resid:.1e} (< 1e-4), "
                      f"alpha=1e6 reduction {reduction:.1e} (< 1e-4)")
    assert ok


def test_criterion_04_finite_oscillator(acceptance, oscillators):
    eig = four = comm = 0.0
    alternations = True
    for d in (5, 9, 21):
        osc = oscillators(d)
        H, h, lam = osc.hamiltonian, osc.harpers, osc.eigenvalues
        # independent transform: numpy FFT with the centered index layout
        ell = (d - 1) // 2
        F = np.roll(np.fft.fft(np.roll(np.eye(d), -ell, axis=0), axis=0), ell, axis=0)
        F /= math.sqrt(d)
        eig = max(eig, np.max(np.abs(H @ h - h * lam)))
        four = max(four, np.max(np.abs(F @ h - h * (-1j) ** np.arange(d))))
        comm = max(comm, np.max(np.abs(F @ H - H @ F)))
        alternations &= [fo.alternation_count(h[:, m]) for m in range(d)] == list(range(d))
    diag = np.diag(fo.build_hamiltonian(fo.build_grid(3)))
    diag_dev = np.max(np.abs(diag - [15 / (4 * math.pi), 3 / (2 * math.pi), 15 / (4 * math.pi)]))
    ok = eig < 1e-10 and four < 1e-8 and comm < 1e-10 and alternations and diag_dev < 1e-12
    acceptance(4, ok, f"eigen {eig:.1e}, Fourier {four:.1e}, commutator {comm:.1e}, "
                      f"alternations {'match' if alternations else 'MISMATCH'}, "
                      f"d=3 diagonal {diag_dev:.1e}")
    assert ok


def test_criterion_05_continuum_convergence(acceptance, oscillators):
    osc = oscillators(63)
    level_dev = np.max(np.abs(osc.eigenvalues[:6] - (np.arange(6) + 0.5)))
    P = psi_table(3, osc.grid.points)
    P /= np.linalg.norm(P, axis=1)[:, None]
    overlap = min(float(P[m] @ osc.harpers[:, m]) for m in range(4))
    ok = level_dev < 0.05 and overlap > 0.99
    acceptance(5, ok, f"d=63: max |lambda_m - (m+1/2)|, m <= 5 = {level_dev:.3f} (< 0.05); "
                      f"min overlap m <= 3 = {overlap:.5f} (> 0.99)")
    assert overlap > 0.99
    assert level_dev < 0.05


def test_criterion_06_terminal_exactness(acceptance, oscillators):
    params = MarketParams(0.25, 0.03)
    worst = 0.0
    for d in (5, 9, 21):
        ell = (d - 1) // 2
        for k in range(-ell, ell + 1):
            market = build_market(d, params, k, 5.0, oscillators(d))
            for kind in OptionKind:
                payoff = discrete_payoff(market, kind)
                b = finite_coefficients(market, payoff)
                values = [finite_price(market, b, m, 5.0) for m in range(-ell, ell + 1)]
                worst = max(worst, np.max(np.abs(np.array(values) - payoff)))
    ok = worst < 1e-9
    acceptance(6, ok, f"max t=T reconstruction error, d in {{5,9,21}}, all k: {worst:.1e} (< 1e-9)")
    assert ok


def test_criterion_07_fig1_reproduction(acceptance, tmp_path, capsys):
    start = time.perf_counter()
    status = main(["reproduce-fig1", "--out", str(tmp_path)])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    names = sorted(p.name for p in tmp_path.iterdir())
    exact = True
    for kind in ("call", "put"):
        with open(tmp_path / f"fig1_{kind}.csv") as fh:
            rows = list(csv.DictReader(fh))
        exact &= len(rows) == 21 and all(r["V_t5"] == r["payoff"] for r in rows)
    K = math.exp(8 * math.sqrt(2 * math.pi / 21))
    setup = f"d=21 sigma=0.25 r=0.03 K=exp(8*sqrt(2*pi/21))={K:.10g} T=5" in out
    near = [line for line in out.splitlines() if line[:2] in ("7,", "8,", "9,")]
    warned = sum("WARNING" in line for line in near)
    ok = (status == 0 and names == ["fig1.svg", "fig1_call.csv", "fig1_put.csv"]
          and elapsed < 2.0 and exact and setup and len(near) == 3)
    acceptance(7, ok, f"exit {status}, files {names}, {elapsed:.2f}s (< 2s), t=5 equals payoff "
                      f"{exact}, near-strike rows {len(near)} ({warned} warnings, not failures)")
    assert ok


def _lognormal_expectation(S, K, sigma, r, tau, kind):
    drift, vol = (r - 0.5 * sigma**2) * tau, sigma * math.sqrt(tau)
    kink = (math.log(K / S) - drift) / vol

    def integrand(z):
        ST = S * math.exp(drift + vol * z)
        value = ST - K if kind is CALL else K - ST
        return max(value, 0.0) * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)

    lo, hi = (kink, 14.0) if kind is CALL else (-14.0, kink)
    value, _ = sp_integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return math.exp(-r * tau) * value


def test_criterion_08_closed_form(acceptance):
    worst = parity = 0.0
    grid = [(S, sigma, r, tau) for S, sigma in ((70.0, 0.15), (100.0, 0.3), (135.0, 0.55),
                                                 (92.0, 0.2), (110.0, 0.4))
            for r, tau in ((0.0, 0.25), (0.05, 1.0), (0.1, 2.5), (0.02, 0.6))]
    assert len(grid) == 20
    for S, sigma, r, tau in grid:
        params = MarketParams(sigma, r)
        c = bs_price(S, 0.0, OptionSpec(CALL, 100.0, tau), params)
        p = bs_price(S, 0.0, OptionSpec(PUT, 100.0, tau), params)
        worst = max(worst, abs(c - _lognormal_expectation(S, 100.0, sigma, r, tau, CALL)),
                    abs(p - _lognormal_expectation(S, 100.0, sigma, r, tau, PUT)))
        parity = max(parity, abs(c - p - (S - 100.0 * math.exp(-r * tau))))
    ok = worst < 1e-5 and parity < 1e-12
    acceptance(8, ok, f"20-point grid: oracle error {worst:.1e} (< 1e-5), parity {parity:.1e} "
                      f"(< 1e-12)")
    assert ok


def test_criterion_09_spectral_pricer(acceptance):
    params = MarketParams(0.25, 0.03)
    spec = OptionSpec(CALL, 1.0, 1.0)
    domain = LogDomain.around(1.0)
    residuals = [
        terminal_residual(build_solution(spec, params, domain=domain, n_terms=n), spec, domain)
        for n in (8, 16, 32, 48)
    ]
    monotone = all(b < a for a, b in zip(residuals, residuals[1:]))
    sol = build_solution(spec, params, domain=domain)
    S = np.exp(np.linspace(-5.9, 5.9, 60))
    at_T = np.abs(series_terms(sol, S, 1.0))
    dominated = all(np.all(np.abs(series_terms(sol, S, t)) <= at_T) for t in (0.0, 0.5, 0.99))
    ok = monotone and dominated
    text = ", ".join(f"{r:.1f}" for r in residuals)
    acceptance(9, ok, f"terminal residual N=8,16,32,48: {text} (decreasing {monotone}); "
                      f"terms dominated by t=T {dominated}")
    assert ok


def test_criterion_10_cross_model(acceptance, oscillators):
    # sigma = 1 so that 48 continuum terms are converged at T - t = 1
    params = MarketParams(1.0, 0.03)
    market = build_market(63, params, 0, 5.0, oscillators(63))
    b = finite_coefficients(market, discrete_payoff(market, CALL))
    sol = build_solution(OptionSpec(CALL, 1.0, 5.0), params, n_terms=48)
    ms = np.arange(-2, 3)
    finite = np.array([finite_price(market, b, int(m), 4.0) for m in ms])
    spectral = sol.price(np.exp(ms * market.grid.step), 4.0)
    gap = np.max(np.abs(finite - spectral) / np.abs(spectral))
    ok = gap < 0.05
    acceptance(10, ok, f"d=63 vs N=48, five points nearest K=1, T-t=1: max relative gap "
                       f"{gap:.3f} (< 0.05)")
    assert ok
