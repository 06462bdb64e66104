"""Run configuration in a line-oriented ``key = value`` format.

Strings may be quoted (``"..."``) or bare words, lists are bracketed
(``[0, 2, 6]``), numbers are plain literals and ``#`` starts a comment.
Every problem is collected with its line number before raising.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .errors import ConfigError

COMMANDS = ("tuples", "weights", "sums", "equidist", "mk", "verify-appendix")
FORMATS = ("json", "csv")
KINDS = ("SelbergTwin", "GPY", "SmoothedMP", "Maynard")

# key -> accepted python type
SCHEMA: dict[str, type] = {
    "command": str,
    "k": int,
    "ell": int,
    "D": int,
    "x": int,
    "N": int,
    "Q": int,
    "l": int,
    "window": int,
    "degree": int,
    "threads": int,
    "parts": int,
    "theta": float,
    "omega": float,
    "rho": float,
    "Y": float,
    "kind": str,
    "tuple": list,
    "tuple_file": str,
    "verify": str,
    "range": list,
    "spec_file": str,
    "out": str,
    "cache_dir": str,
    "format": str,
}


@dataclass
class RunConfig:
    command: str | None = None
    k: int | None = None
    ell: int | None = None
    D: int | None = None
    x: int | None = None
    N: int | None = None
    Q: int | None = None
    l: int | None = None
    window: int | None = None
    degree: int | None = None
    threads: int | None = None
    parts: int | None = None
    theta: float | None = None
    omega: float | None = None
    rho: float | None = None
    Y: float | None = None
    kind: str | None = None
    tuple: list | None = None
    tuple_file: str | None = None
    verify: str | None = None
    range: list | None = None
    spec_file: str | None = None
    out: str | None = None
    cache_dir: str | None = None
    format: str | None = None

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self) if getattr(self, f.name) is not None}

    def merged(self, **overrides) -> "RunConfig":
        """Copy with every non-None override applied."""
        data = self.as_dict()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**data)


def _parse_value(raw: str):
    raw = raw.strip()
    if not raw:
        raise ValueError("missing value")
    if raw[0] in '"[' or raw in ("true", "false"):
        return json.loads(raw)
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    if raw.replace("-", "").replace("_", "").replace(".", "").replace("/", "").isalnum():
        return raw  # bare word
    raise ValueError(f"cannot parse value {raw!r}")


def _strip_comment(line: str) -> str:
    out, in_str, escaped = [], False, False
    for ch in line:
        if in_str and escaped:
            escaped = False
        elif in_str and ch == "\\":
            escaped = True
        elif ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
    return "".join(out)


def _coerce(key: str, value):
    want = SCHEMA[key]
    if want is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if want is int and isinstance(value, bool):
        raise TypeError
    if not isinstance(value, want):
        raise TypeError
    if want is list and not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise TypeError
    return value


def validate(cfg: RunConfig, lines: dict[str, int] | None = None) -> list[tuple[int | None, str]]:
    """Constraint violations of ``cfg``; ``lines`` maps keys to line numbers."""
    lines = lines or {}
    out: list[tuple[int | None, str]] = []

    def bad(key, msg):
        out.append((lines.get(key), msg))

    if cfg.command is None:
        out.append((None, "missing required key 'command'"))
    elif cfg.command not in COMMANDS:
        bad("command", f"unknown command {cfg.command!r}; expected one of {', '.join(COMMANDS)}")
    for key in ("k", "D", "x", "N", "Q", "l", "window", "threads", "parts"):
        v = getattr(cfg, key)
        if v is not None and v < 1:
            bad(key, f"{key} must be >= 1, got {v}")
    if cfg.degree is not None and cfg.degree < 0:
        bad("degree", f"degree must be >= 0, got {cfg.degree}")
    if cfg.ell is not None:
        if cfg.ell < 0:
            bad("ell", f"ell must be >= 0, got {cfg.ell}")
        elif cfg.k is not None and cfg.ell >= cfg.k:
            bad("ell", f"need 0 <= ell < k, got ell={cfg.ell}, k={cfg.k}")
    if cfg.omega is not None and not 0 < cfg.omega < 1:
        bad("omega", f"omega must lie in (0, 1), got {cfg.omega}")
    if cfg.theta is not None and not 0 < cfg.theta <= 1:
        bad("theta", f"theta must lie in (0, 1], got {cfg.theta}")
    if cfg.Y is not None and cfg.Y < 2:
        bad("Y", f"Y must be >= 2, got {cfg.Y}")
    if cfg.kind is not None and cfg.kind not in KINDS:
        bad("kind", f"unknown weight kind {cfg.kind!r}")
    if cfg.format is not None and cfg.format not in FORMATS:
        bad("format", f"format must be json or csv, got {cfg.format!r}")
    if cfg.range is not None and (len(cfg.range) != 2 or cfg.range[0] < 0 or cfg.range[0] > cfg.range[1]):
        bad("range", f"range must be [start, stop] with 0 <= start <= stop, got {cfg.range}")
    if cfg.tuple is not None:
        if not cfg.tuple or any(b <= a for a, b in zip(cfg.tuple, cfg.tuple[1:])):
            bad("tuple", f"tuple must be non-empty and strictly increasing, got {cfg.tuple}")
        elif cfg.k is not None and cfg.k != len(cfg.tuple):
            bad("k", f"k = {cfg.k} disagrees with the tuple length {len(cfg.tuple)}")
    return out


def parse_config(text: str, require_command: bool = True) -> RunConfig:
    """Parse and validate; raises ConfigError listing every violation."""
    values: dict = {}
    lines: dict[str, int] = {}
    errors: list[tuple[int | None, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = _strip_comment(line).strip()
        if not body:
            continue
        if "=" not in body:
            errors.append((lineno, f"expected 'key = value', got {body!r}"))
            continue
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in SCHEMA:
            errors.append((lineno, f"unknown key {key!r}"))
            continue
        if key in values:
            errors.append((lineno, f"duplicate key {key!r}"))
            continue
        try:
            value = _parse_value(raw)
        except ValueError as exc:
            errors.append((lineno, f"{key}: {exc}"))
            continue
        try:
            values[key] = _coerce(key, value)
        except TypeError:
            errors.append((lineno, f"{key}: expected {SCHEMA[key].__name__}, got {raw!r}"))
            continue
        lines[key] = lineno
    cfg = RunConfig(**values)
    problems = validate(cfg, lines)
    if not require_command:
        problems = [p for p in problems if not (p[0] is None and "command" in p[1])]
    errors.extend(problems)
    if errors:
        errors.sort(key=lambda e: (e[0] is None, e[0] or 0))
        raise ConfigError(errors)
    return cfg


def serialize_config(cfg: RunConfig) -> str:
    """Text that :func:`parse_config` maps back to an equal RunConfig."""
    out = []
    for key, value in cfg.as_dict().items():
        if isinstance(value, float):
            text = repr(value)
        elif isinstance(value, (str, list)):
            text = json.dumps(value)
        else:
            text = str(value)
        out.append(f"{key} = {text}")
    return "\n".join(out) + "\n"
