"""``pricer`` command-line interface.

    pricer <command> [--config PATH] [--out DIR] [--model M] [--sigma X]
                     [--r X] [--strike X] [--T X]

Commands: price, reproduce-fig1, dump-basis, compare, validate.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import PRESETS, RunConfig, build_config, load_config
from .errors import ConfigError, ConsistencyError, DomainError, NumericalError
from .finite_oscillator import build_grid, diagonalize
from .finite_pricer import (
    build_market,
    discrete_payoff,
    finite_coefficients,
    price_curve,
    reproduce_fig1,
)
from .hermite import psi_table
from .market import LogDomain, MarketParams, OptionSpec, bs_price
from .report import fig1_svg, write_csv
from .spectral import BasisKind, build_solution
from .susy import SusyBasis, SusyParams
from .validation import run_checks

COMMANDS = ("price", "reproduce-fig1", "dump-basis", "compare", "validate")

log = logging.getLogger("qhoprice")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message.replace("\n", " "))


def _make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pricer", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="flat key-value config file")
    parser.add_argument("--out", type=Path, help="output directory (created if absent)")
    parser.add_argument("--model", choices=("bs", "oscillator", "susy", "finite"))
    parser.add_argument("--sigma", type=float)
    parser.add_argument("--r", type=float)
    parser.add_argument("--strike", type=float)
    parser.add_argument("--T", dest="T", type=float)
    return parser


def _resolve_config(args) -> RunConfig:
    overrides = {"model": args.model, "sigma": args.sigma, "r": args.r, "strike": args.strike,
                 "T": args.T}
    if args.config is not None:
        config = load_config(args.config, overrides)
    elif args.command in ("reproduce-fig1", "validate", "compare"):
        doc = {**PRESETS["fig1"], **{k: v for k, v in overrides.items() if v is not None}}
        config = build_config(doc)
    else:
        config = build_config({k: v for k, v in overrides.items() if v is not None})
    if args.out is not None:
        config = replace(config, out_dir=args.out)
    return config


def _params(config: RunConfig) -> MarketParams:
    return MarketParams(config.sigma, config.r)


def _spec(config: RunConfig) -> OptionSpec:
    return OptionSpec(config.kind, config.strike, config.maturity)


def _domain(config: RunConfig) -> LogDomain:
    return LogDomain(config.a, config.b)


def _default_spots(config: RunConfig) -> np.ndarray:
    # K e^{j/10}, j = -10..10; includes K itself
    return config.strike * np.exp(np.arange(-10, 11) / 10.0)


def _spectral_solution(config: RunConfig):
    kind = BasisKind.SUSY if config.model == "susy" else BasisKind.OSCILLATOR
    return build_solution(_spec(config), _params(config), kind, _domain(config),
                          n_terms=config.n_terms, alpha=config.alpha)


def cmd_price(config: RunConfig) -> list[Path]:
    out = config.out_dir / "price.csv"
    if config.model == "finite":
        market = build_market(config.d, _params(config), config.strike_index, config.maturity)
        b = finite_coefficients(market, discrete_payoff(market, config.kind))
        rows = []
        for t in config.times:
            curve = price_curve(market, b, t)
            for pos, m in enumerate(market.grid.indices):
                rows.append([int(m), market.prices[pos], t, curve.values[pos]])
        return [write_csv(out, ("m", "S", "t", "V"), rows)]
    spots = np.asarray(config.spots if config.spots is not None else _default_spots(config))
    rows = []
    if config.model == "bs":
        for t in config.times:
            values = bs_price(spots, t, _spec(config), _params(config))
            rows += [[s, t, v] for s, v in zip(spots, np.atleast_1d(values))]
    else:
        solution = _spectral_solution(config)
        inside = _domain(config).contains(spots)
        if not inside.all():
            raise DomainError(f"spot {spots[~inside][0]:g} lies outside the domain "
                              f"({config.a:g}, {config.b:g})")
        for t in config.times:
            rows += [[s, t, v] for s, v in zip(spots, solution.price(spots, t))]
    return [write_csv(out, ("S", "t", "V"), rows)]


def cmd_reproduce_fig1(config: RunConfig) -> list[Path]:
    data = reproduce_fig1(config.out_dir)
    svg = config.out_dir / "fig1.svg"
    fig1_svg(data, svg)
    market = data.market
    print(f"# d={market.grid.d} sigma={market.params.sigma:g} r={market.params.r:g} "
          f"K=exp({market.strike_index}*sqrt(2*pi/{market.grid.d}))={market.strike:.10g} "
          f"T={market.maturity:g}")
    print("# near-strike check at t=4 (call): m, S, finite, black_scholes, rel_dev")
    for row in data.near_strike:
        flag = "  WARNING > 0.25" if row.warn else ""
        print(f"{row.m},{row.S:.10g},{row.finite:.10g},{row.black_scholes:.10g},"
              f"{row.relative_deviation:.4f}{flag}")
    return [*data.files, svg]


def cmd_dump_basis(config: RunConfig) -> list[Path]:
    out = config.out_dir / "basis.csv"
    if config.model == "finite":
        osc = diagonalize(build_grid(config.d))
        header = ["m", "x"] + [f"h_{j}" for j in range(osc.d)]
        rows = [[int(m), osc.grid.points[pos], *osc.harpers[pos]]
                for pos, m in enumerate(osc.grid.indices)]
        return [write_csv(out, header, rows)]
    x = np.linspace(-8.0, 8.0, 161)
    n = config.n_terms
    if config.model == "oscillator":
        table, prefix = psi_table(n - 1, x), "psi"
    elif config.model == "susy":
        table, prefix = SusyBasis.build(SusyParams(config.alpha), n - 1).evaluate(x), "phi"
    else:
        raise ConfigError("dump-basis needs model oscillator, susy or finite")
    header = ["x"] + [f"{prefix}_{j}" for j in range(n)]
    return [write_csv(out, header, [[xi, *table[:, i]] for i, xi in enumerate(x)])]


def _rel(a: float, b: float) -> float:
    if b == 0:
        return 0.0 if a == 0 else math.inf
    return abs(a - b) / abs(b)


def cmd_compare(config: RunConfig) -> list[Path]:
    params = _params(config)
    grid_step = math.sqrt(2 * math.pi / config.d)
    k = config.strike_index
    if k is None:
        k = round(math.log(config.strike) / grid_step)
    market = build_market(config.d, params, k, config.maturity)
    K = market.strike
    spec = OptionSpec(config.kind, K, config.maturity)
    domain = LogDomain.around(K) if config.model == "finite" else _domain(config)
    if not domain.a < K < domain.b:
        domain = LogDomain.around(K)
    solution = build_solution(spec, params, BasisKind.OSCILLATOR, domain, n_terms=config.n_terms)
    b = finite_coefficients(market, discrete_payoff(market, config.kind))
    inside = domain.contains(market.prices)
    rows = []
    for t in config.times:
        fin = price_curve(market, b, t).values
        S = market.prices[inside]
        spectral = solution.price(S, t)
        closed = bs_price(S, t, spec, params)
        for m, s, vf, vs, vb in zip(market.grid.indices[inside], S, fin[inside],
                                    np.atleast_1d(spectral), np.atleast_1d(closed)):
            rows.append([int(m), s, t, vf, vs, vb, _rel(vf, vb), _rel(vs, vb), _rel(vf, vs)])
    header = ("m", "S", "t", "V_finite", "V_spectral", "V_bs",
              "rel_finite_bs", "rel_spectral_bs", "rel_finite_spectral")
    return [write_csv(config.out_dir / "compare.csv", header, rows)]


def cmd_validate(config: RunConfig) -> list[Path]:
    failed = []
    for name, ok, detail in run_checks():
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", flush=True)
        if not ok:
            failed.append(name)
    if failed:
        raise _ValidationFailed(f"validation failed: {', '.join(failed)}")
    return []


class _ValidationFailed(Exception):
    pass


_DISPATCH = {
    "price": cmd_price,
    "reproduce-fig1": cmd_reproduce_fig1,
    "dump-basis": cmd_dump_basis,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s")
    try:
        args = _make_parser().parse_args(argv)
        config = _resolve_config(args)
        config.out_dir.mkdir(parents=True, exist_ok=True)
        for path in _DISPATCH[args.command](config):
            print(f"wrote {path}")
    except _ValidationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, DomainError, NumericalError, ConsistencyError, OSError) as exc:
        print(f"error: {' '.join(str(exc).split())}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
