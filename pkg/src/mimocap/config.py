"""Run configuration: flat ``key = value`` files plus command-line overrides.

A config file may also be a table previously emitted by the CLI; its
embedded metadata is read back so the table can be regenerated exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from .errors import InvalidParameter
from .geometry import DETECTORS, Scenario

CSV_META_PREFIX = "# mimocap-metadata: "


class ConfigError(InvalidParameter):
    """Bad configuration value; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key


@dataclass
class RunConfig:
    m: list = field(default_factory=lambda: [4])
    c0: float = 1.0
    R: float = 3.0
    eps: float = 0.1
    theta: float = 4.0
    snr_db: float = 20.0
    sinr_th_db: float = 10.0
    detector: list = field(default_factory=lambda: ["mmse"])
    csi_range: float = 2.0
    K: list = field(default_factory=lambda: [2, 20])
    rho_min: float = 0.02
    rho_max: float = 2.0
    rho_points: int = 40
    trials: int = 10_000
    seed: int = 1
    L: Optional[float] = None
    analytic: str = "auto"
    empirical: bool = True
    cdf_points: int = 200
    workers: int = 1
    format: str = "csv"
    corrupt_eta: bool = False

    def scenarios(self):
        """One Scenario per (m, detector) pair, in config order."""
        return [self.scenario(m, d) for m in self.m for d in self.detector]

    def scenario(self, m: int, detector: str = "mmse") -> Scenario:
        return Scenario(
            m=m, c0=self.c0, R=self.R, eps=self.eps, theta=self.theta, snr_db=self.snr_db,
            sinr_th_db=self.sinr_th_db, detector=detector, csi_range=self.csi_range,
        )

    def to_dict(self) -> dict:
        return asdict(self)


_LIST_INT = {"m", "K"}
_LIST_STR = {"detector"}
_INT = {"rho_points", "trials", "seed", "cdf_points", "workers"}
_BOOL = {"empirical", "corrupt_eta"}
_STR = {"analytic", "format"}
_OPT_FLOAT = {"L"}
KEYS = {f.name for f in fields(RunConfig)}


def _parse_bool(key, text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(key, f"expected a boolean, got {text!r}")


def parse_value(key: str, value):
    if key not in KEYS:
        raise ConfigError(key, "unknown key")
    if not isinstance(value, str):
        return value  # already typed (JSON metadata)
    text = value.strip()
    try:
        if key in _LIST_INT:
            return [int(v) for v in text.replace(" ", "").split(",") if v]
        if key in _LIST_STR:
            return [v.strip() for v in text.split(",") if v.strip()]
        if key in _INT:
            return int(text)
        if key in _BOOL:
            return _parse_bool(key, text)
        if key in _STR:
            return text
        if key in _OPT_FLOAT:
            return None if text.lower() in ("", "none") else float(text)
        return float(text)
    except ValueError:
        raise ConfigError(key, f"cannot parse {value!r}") from None


def _read_table_metadata(path: Path, text: str) -> dict:
    if text.lstrip().startswith("{"):
        return json.loads(text)["metadata"]["config"]
    for line in text.splitlines():
        if line.startswith(CSV_META_PREFIX):
            return json.loads(line[len(CSV_META_PREFIX):])["config"]
    raise ConfigError("--config", f"{path} has no embedded metadata")


def read_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    if text.lstrip().startswith("{") or CSV_META_PREFIX in text:
        return _read_table_metadata(path, text)
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}", f"expected key = value, got {raw!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


def validate(cfg: RunConfig) -> RunConfig:
    for key in ("m", "K", "detector"):
        if not getattr(cfg, key):
            raise ConfigError(key, "must be a nonempty list")
    if any(m < 1 for m in cfg.m):
        raise ConfigError("m", "antenna counts must be >= 1")
    if any(k < 0 for k in cfg.K):
        raise ConfigError("K", "interferer counts must be >= 0")
    for d in cfg.detector:
        if d not in DETECTORS:
            raise ConfigError("detector", f"unknown detector {d!r}; choose from {DETECTORS}")
    if not 0 < cfg.rho_min < cfg.rho_max:
        raise ConfigError("rho_min", "need 0 < rho_min < rho_max")
    if cfg.rho_points < 2:
        raise ConfigError("rho_points", "need at least 2 grid points")
    if cfg.trials < 1:
        raise ConfigError("trials", "must be >= 1")
    if not 0 <= cfg.seed < 2**64:
        raise ConfigError("seed", "must be a 64-bit unsigned integer")
    if cfg.analytic not in ("auto", "true", "false"):
        raise ConfigError("analytic", "must be auto, true or false")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format", "must be csv or json")
    if cfg.L is not None and cfg.L <= 0:
        raise ConfigError("L", "total link density must be positive")
    if cfg.cdf_points < 2:
        raise ConfigError("cdf_points", "need at least 2 points")
    try:
        for m in cfg.m:
            cfg.scenario(m)
    except InvalidParameter as exc:
        raise ConfigError("scenario", str(exc)) from None
    return cfg


def resolve(config_path=None, overrides=None) -> RunConfig:
    """Defaults, then the config file, then ``key=value`` overrides."""
    values = {}
    if config_path:
        values.update(read_config_file(config_path))
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        k, v = item.split("=", 1)
        values[k.strip()] = v
    cfg = RunConfig()
    for k, v in values.items():
        setattr(cfg, k, parse_value(k, v))
    return validate(cfg)
