"""Experiment configuration: an INI file of record plus flag overrides."""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any

from .errors import ConfigError, InvalidSpec
from .generators import KINDS, GeneratorSpec

EXPERIMENTS = ("frequencies", "additive", "birkhoff", "subadditive", "diagnostics", "returns", "set-failure")

DEFAULT_THRESHOLDS = {
    "oscillation": 0.05,   # converged if final oscillation is below this
    "hierarchical": 0.005,  # hierarchical vs prefix-average agreement
    "set": 0.02,           # SET agreement tolerance
    "pq": 0.05,
    "pw": 0.05,
    "spread": 0.2,         # set-failure: prefix series spread at least this
}


@dataclass(frozen=True)
class ExperimentConfig:
    generator: GeneratorSpec
    experiment: str
    scales: tuple[int, ...] = ()
    fn_scales: tuple[int, ...] = ()
    maxlen: int = 16
    window: int = 4096
    word: str | None = None
    words: tuple[str, ...] = ()
    function: str | None = None
    starts: int = 50
    seed: int = 0
    thresholds: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_THRESHOLDS))
    out_dir: str = "subshift-out"
    formats: tuple[str, ...] = ("csv", "json")

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        for name in ("scales", "fn_scales"):
            vals = getattr(self, name)
            if any(v < 1 for v in vals):
                raise ConfigError(f"{name}: all lengths must be positive")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ConfigError(f"{name}: must be sorted strictly increasing, got {list(vals)}")
        for name in ("maxlen", "window", "starts"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name}: must be positive")
        for k, v in self.thresholds.items():
            if not 0 < v <= 1:
                raise ConfigError(f"threshold {k}={v} must lie in (0, 1]")
        if not set(self.formats) <= {"csv", "json"} or not self.formats:
            raise ConfigError(f"formats must be csv and/or json, got {self.formats}")

    def echo(self) -> dict[str, Any]:
        d = asdict(self)
        d["generator"] = {"kind": self.generator.kind, "length": self.generator.length,
                          "params": dict(sorted(self.generator.params.items()))}
        d["scales"] = list(self.scales)
        d["fn_scales"] = list(self.fn_scales)
        d["words"] = list(self.words)
        d["formats"] = list(self.formats)
        d["thresholds"] = dict(sorted(self.thresholds.items()))
        return d


def parse_int_list(text: str, name: str) -> tuple[int, ...]:
    """``"1024,2048"`` or a power range ``"2^10..2^20"``."""
    text = text.strip()
    if not text:
        return ()
    try:
        if ".." in text:
            lo, hi = (t.strip() for t in text.split("..", 1))
            if lo.startswith("2^") and hi.startswith("2^"):
                return tuple(2 ** k for k in range(int(lo[2:]), int(hi[2:]) + 1))
            return tuple(range(_int(lo), _int(hi) + 1))
        return tuple(_int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {text!r} as a list of lengths") from None


def _int(text: str) -> int:
    text = text.strip()
    if text.startswith("2^"):
        return 2 ** int(text[2:])
    if "e" in text.lower():
        return int(float(text))
    return int(text)


def parse_generator(text: str, length: int | None) -> GeneratorSpec:
    """Short forms: ``fibonacci``, ``thue-morse``, ``sturmian[:alpha[:rho]]``,
    ``periodic:<base>``, ``block-doubling``, ``substitution:<a->ab,b->a>``, ``file:<path>``."""
    head, _, rest = text.partition(":")
    if head in ("fibonacci", "thue-morse"):
        return GeneratorSpec("substitution", length, {"rules": head})
    if head == "sturmian":
        parts = rest.split(":") if rest else []
        params = {"alpha": parts[0] if parts else "golden", "rho": parts[1] if len(parts) > 1 else "0"}
        return GeneratorSpec("sturmian", length, params)
    if head == "periodic":
        return GeneratorSpec("periodic", length, {"base": rest or "ab"})
    if head == "block-doubling":
        return GeneratorSpec("block-doubling", length)
    if head == "substitution":
        return GeneratorSpec("substitution", length, {"rules": rest})
    if head == "file":
        return GeneratorSpec("file", length, {"path": rest})
    raise ConfigError(f"generator: unknown kind {text!r}")


def load_config(path: str | None, overrides: dict[str, Any]) -> ExperimentConfig:
    """Read the INI file (sections ``generator``, ``experiment``, ``thresholds``,
    ``output``) and apply flag overrides; flags win."""
    cp = configparser.ConfigParser()
    if path is not None:
        if not Path(path).is_file():
            raise ConfigError(f"config: file {path} not found")
        try:
            cp.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"config: {exc}") from None
    gen = dict(cp["generator"]) if cp.has_section("generator") else {}
    exp = dict(cp["experiment"]) if cp.has_section("experiment") else {}
    out = dict(cp["output"]) if cp.has_section("output") else {}
    thresholds = dict(DEFAULT_THRESHOLDS)
    if cp.has_section("thresholds"):
        for k, v in cp["thresholds"].items():
            thresholds[k] = _float(v, f"threshold {k}")

    o = {k: v for k, v in overrides.items() if v is not None}
    for item in o.pop("threshold", []) or []:
        if "=" not in item:
            raise ConfigError(f"threshold: expected name=value, got {item!r}")
        k, v = item.split("=", 1)
        thresholds[k.strip()] = _float(v, f"threshold {k}")

    length = o.get("length", gen.get("length"))
    length = _int(str(length)) if length is not None else None
    try:
        if "sample" in o:
            spec = GeneratorSpec("file", length, {"path": o["sample"]})
        elif "generator" in o:
            spec = parse_generator(o["generator"], length)
        elif gen:
            kind = gen.pop("kind", "substitution")
            gen.pop("length", None)
            if kind in KINDS:
                spec = GeneratorSpec(kind, length, gen)
            else:
                spec = parse_generator(":".join([kind, *gen.values()]), length)
        else:
            spec = parse_generator("fibonacci", length or 100_000)
    except InvalidSpec as exc:
        raise ConfigError(f"generator: {exc}") from None

    def pick(name, conv, default):
        if name in o:
            return conv(o[name]) if isinstance(o[name], str) else o[name]
        if name in exp:
            return conv(exp[name])
        return default

    experiment = o.get("experiment") or exp.get("name")
    if not experiment:
        raise ConfigError("experiment: no experiment named")
    formats = o.get("formats") or tuple(t.strip() for t in out.get("format", "csv,json").split(",") if t.strip())
    words = pick("words", lambda s: tuple(t.strip() for t in s.split(",") if t.strip()), ())
    try:
        return ExperimentConfig(
            generator=spec,
            experiment=experiment,
            scales=pick("scales", lambda s: parse_int_list(s, "scales"), ()),
            fn_scales=pick("fn_scales", lambda s: parse_int_list(s, "fn_scales"), ()),
            maxlen=pick("maxlen", _int_named("maxlen"), 16),
            window=pick("window", _int_named("window"), 4096),
            word=pick("word", str, None),
            words=words,
            function=pick("function", str, None),
            starts=pick("starts", _int_named("starts"), 50),
            seed=pick("seed", _int_named("seed"), 0),
            thresholds=thresholds,
            out_dir=o.get("out_dir") or out.get("dir") or overrides.get("default_out") or "subshift-out",
            formats=tuple(formats),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config: {exc}") from None


def _int_named(name):
    def conv(text):
        try:
            return _int(str(text))
        except ValueError:
            raise ConfigError(f"{name}: {text!r} is not an integer") from None
    return conv


def _float(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{name}: {text!r} is not a number") from None
