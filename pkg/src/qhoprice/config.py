"""Run configuration: flat key-value text (TOML, or bare ``key = value`` lines)."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .market import DEFAULT_LOG_WIDTH, OptionKind
from .susy import ALPHA_BOUND

__all__ = ["RunConfig", "MODELS", "PRESETS", "parse_config", "load_config"]

MODELS = ("bs", "oscillator", "susy", "finite")
DEFAULT_D = 21
DEFAULT_N = 48

PRESETS = {
    "fig1": {
        "model": "finite",
        "sigma": 0.25,
        "r": 0.03,
        "d": 21,
        "strike_index": 8,
        "T": 5.0,
        "times": [3.0, 4.0, 5.0],
    },
}

_ALIASES = {
    "maturity": "T",
    "t_maturity": "T",
    "n": "N",
    "n_terms": "N",
    "spot": "spots",
    "time": "times",
    "option": "kind",
    "out": "out_dir",
    "output": "out_dir",
}

_KNOWN = {
    "preset", "model", "kind", "sigma", "r", "strike", "strike_index", "T", "times",
    "alpha", "d", "N", "a", "b", "spots", "out_dir",
}


@dataclass(frozen=True)
class RunConfig:
    sigma: float
    r: float
    maturity: float
    strike: float
    model: str = "bs"
    kind: OptionKind = OptionKind.CALL
    times: tuple[float, ...] = (0.0,)
    strike_index: int | None = None
    alpha: float | None = None
    d: int = DEFAULT_D
    n_terms: int = DEFAULT_N
    a: float = 0.0
    b: float = 0.0
    spots: tuple[float, ...] | None = None
    out_dir: Path = field(default_factory=lambda: Path("."))


def _scalar(text: str):
    text = text.strip()
    if len(text) >= 2 and text[0] == text[-1] and text[0] in "\"'":
        return text[1:-1]
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_lines(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, value = line.split(sep, 1)
                break
        else:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        value = value.strip()
        if value.startswith("[") and value.endswith("]"):
            inner = value[1:-1].strip()
            out[key.strip()] = [_scalar(v) for v in inner.split(",") if v.strip()] if inner else []
        elif "," in value:
            out[key.strip()] = [_scalar(v) for v in value.split(",") if v.strip()]
        else:
            out[key.strip()] = _scalar(value)
    return out


def _flatten(doc: dict) -> dict:
    flat = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            flat.update(_flatten(value))
        else:
            flat[key] = value
    return flat


def _read_document(text: str) -> dict:
    try:
        doc = _flatten(tomllib.loads(text))
    except tomllib.TOMLDecodeError:
        doc = _parse_lines(text)
    normalized = {}
    for key, value in doc.items():
        key = key.strip()
        key = _ALIASES.get(key.lower(), key if key in _KNOWN else key.lower())
        if key not in _KNOWN:
            raise ConfigError(f"unknown field: {key}")
        normalized[key] = value
    return normalized


def _number(doc, key, kind=float):
    value = doc[key]
    if isinstance(value, bool):
        raise ConfigError(f"field {key} must be a number, got {value!r}")
    try:
        number = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"field {key} must be a number, got {value!r}") from None
    if kind is int and number != float(value):
        raise ConfigError(f"field {key} must be an integer, got {value!r}")
    if kind is float and not math.isfinite(number):
        raise ConfigError(f"field {key} must be finite, got {value!r}")
    return number


def _number_list(doc, key) -> tuple[float, ...]:
    value = doc[key]
    if not isinstance(value, (list, tuple)):
        value = [value]
    return tuple(_number({key: v}, key) for v in value)


def build_config(doc: dict) -> RunConfig:
    """Validate a flat mapping and apply defaults."""
    doc = dict(doc)
    preset = doc.pop("preset", None)
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r} (available: {', '.join(PRESETS)})")
        doc = {**PRESETS[preset], **doc}
    for key in ("sigma", "r", "T"):
        if key not in doc:
            raise ConfigError(f"missing field: {key}")
    sigma, r, maturity = _number(doc, "sigma"), _number(doc, "r"), _number(doc, "T")
    if sigma <= 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if r < 0:
        raise ConfigError(f"r must be non-negative, got {r}")
    if maturity <= 0:
        raise ConfigError(f"T must be positive, got {maturity}")

    model = str(doc.get("model", "bs")).lower()
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r} (expected one of {', '.join(MODELS)})")
    try:
        kind = OptionKind.parse(doc.get("kind", "call"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    d = _number(doc, "d", int) if "d" in doc else DEFAULT_D
    if d % 2 == 0:
        raise ConfigError(f"d must be odd, got {d}")
    if d < 3:
        raise ConfigError(f"d must be at least 3, got {d}")
    step = math.sqrt(2.0 * math.pi / d)
    ell = (d - 1) // 2

    strike_index = _number(doc, "strike_index", int) if "strike_index" in doc else None
    if "strike" in doc:
        strike = _number(doc, "strike")
        if strike <= 0:
            raise ConfigError(f"strike must be positive, got {strike}")
        if model == "finite" and strike_index is None:
            strike_index = round(math.log(strike) / step)
    elif strike_index is not None:
        strike = math.exp(strike_index * step)
    else:
        raise ConfigError("missing field: strike (or strike_index)")
    if model == "finite":
        if not -ell <= strike_index <= ell:
            raise ConfigError(f"strike_index must lie in [-{ell}, {ell}] for d={d}")
        strike = math.exp(strike_index * step)

    alpha = None
    if "alpha" in doc:
        alpha = _number(doc, "alpha")
    if model == "susy":
        if alpha is None:
            raise ConfigError("model susy requires alpha")
        if abs(alpha) <= ALPHA_BOUND:
            raise ConfigError(
                f"alpha must satisfy |alpha| > sqrt(pi)/2 = {ALPHA_BOUND:.10f}, got {alpha}"
            )

    n_terms = _number(doc, "N", int) if "N" in doc else DEFAULT_N
    if n_terms < 1:
        raise ConfigError(f"N must be positive, got {n_terms}")
    a = _number(doc, "a") if "a" in doc else strike * math.exp(-DEFAULT_LOG_WIDTH)
    b = _number(doc, "b") if "b" in doc else strike * math.exp(DEFAULT_LOG_WIDTH)
    if not 0 < a < strike < b:
        raise ConfigError(f"domain must satisfy 0 < a < strike < b, got a={a}, strike={strike}, b={b}")

    times = _number_list(doc, "times") if "times" in doc else (0.0,)
    if not times:
        raise ConfigError("times must not be empty")
    late = [t for t in times if t > maturity]
    if late:
        raise ConfigError(f"eval times must not exceed T={maturity}, got {late}")
    spots = _number_list(doc, "spots") if "spots" in doc else None
    if spots is not None and any(s <= 0 for s in spots):
        raise ConfigError("spots must be positive")

    return RunConfig(
        sigma=sigma,
        r=r,
        maturity=maturity,
        strike=strike,
        model=model,
        kind=kind,
        times=times,
        strike_index=strike_index,
        alpha=alpha,
        d=d,
        n_terms=n_terms,
        a=a,
        b=b,
        spots=spots,
        out_dir=Path(str(doc.get("out_dir", "."))),
    )


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse and validate a configuration document.

    ``overrides`` (already-typed values keyed like the document) take
    precedence over the text.
    """
    doc = _read_document(text)
    if overrides:
        doc.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(doc)


def load_config(path, overrides: dict | None = None) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    return parse_config(text, overrides)

