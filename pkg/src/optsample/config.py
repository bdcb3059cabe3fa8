"""Experiment configuration files.

Configs are flat TOML documents (``key = value`` lines, arrays in brackets,
``#`` comments). See README for the full key list.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .exceptions import ConfigError
from .signals import Multisine
from .systems import NOISE_KINDS, RationalTransferFunction

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["ExperimentConfig", "Strategy", "load_config", "parse_strategy", "bundled_config_path"]

DETERMINISTIC = ("uniform", "greedy")


@dataclass(frozen=True)
class Strategy:
    kind: str  # "uniform" | "greedy" | "random_density"
    density_ref: str | None = None

    @property
    def name(self) -> str:
        return self.kind if self.density_ref is None else f"{self.kind}:{self.density_ref}"

    @property
    def slug(self) -> str:
        """Filesystem-safe name used in output file names."""
        if self.density_ref is None:
            return self.kind
        ref = Path(self.density_ref).stem if self.density_ref not in ("uniform", "doptimal") else self.density_ref
        return f"{self.kind}-{ref}"

    @property
    def deterministic(self) -> bool:
        return self.kind in DETERMINISTIC


def parse_strategy(text: str) -> Strategy:
    text = text.strip()
    if text in DETERMINISTIC:
        return Strategy(text)
    kind, sep, ref = text.partition(":")
    if kind == "random_density":
        return Strategy(kind, ref.strip() if sep and ref.strip() else "uniform")
    raise ConfigError(
        f"unknown strategy {text!r}; expected 'uniform', 'greedy' or 'random_density[:uniform|doptimal|<measure.csv>]'"
    )


@dataclass(frozen=True)
class ExperimentConfig:
    plant: RationalTransferFunction
    input: Multisine
    T: float
    N_sweep: tuple
    runs: int
    sigma: float
    strategies: tuple
    seed: int = 0
    grid_L: int = 5000
    ridge: float = 1e-8
    delta: float = 0.1
    noise: str = "gaussian"
    density_L: int = 2000
    kw_tol: float = 1e-3
    density_max_iters: int = 20000
    bound_density: str = "uniform"
    output_dir: str = "results"
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        if not self.T > 0:
            raise ConfigError(f"T must be positive, got {self.T}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.sigma < 0:
            raise ConfigError(f"sigma must be >= 0, got {self.sigma}")
        twoM = 2 * self.input.M
        bad = [N for N in self.N_sweep if N <= twoM]
        if bad:
            raise ConfigError(f"every N in N_sweep must exceed 2M={twoM}; offending {bad}")
        if self.noise not in NOISE_KINDS:
            raise ConfigError(f"noise must be one of {NOISE_KINDS}, got {self.noise!r}")
        if not 0 < self.delta < 1:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.ridge > 0:
            raise ConfigError(f"ridge must be positive, got {self.ridge}")
        if any(s.kind == "greedy" for s in self.strategies) and self.N_sweep and self.grid_L < max(self.N_sweep):
            raise ConfigError(f"grid_L={self.grid_L} must be >= the largest N ({max(self.N_sweep)}) for greedy")
        if len({s.name for s in self.strategies}) != len(self.strategies):
            raise ConfigError("strategies must be distinct")

    @classmethod
    def from_dict(cls, d: dict, base_dir=Path(".")) -> "ExperimentConfig":
        d = dict(d)
        try:
            plant = RationalTransferFunction(d.pop("plant_num"), d.pop("plant_den"))
            u = Multisine(d.pop("input_offset"), tuple(tuple(c) for c in d.pop("input_components", [])))
            kwargs = dict(
                plant=plant,
                input=u,
                T=float(d.pop("T")),
                N_sweep=tuple(int(n) for n in d.pop("N_sweep")),
                runs=int(d.pop("runs")),
                sigma=float(d.pop("sigma")),
                strategies=tuple(parse_strategy(s) for s in d.pop("strategies")),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None
        casts = {
            "seed": int, "grid_L": int, "ridge": float, "delta": float, "noise": str,
            "density_L": int, "kw_tol": float, "density_max_iters": int,
            "bound_density": str, "output_dir": str,
        }
        for key, value in d.items():
            if key not in casts:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = casts[key](value)
        return cls(base_dir=Path(base_dir), **kwargs)

    def resolve(self, path: str) -> Path:
        """Resolve a path named in the config relative to the config file."""
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return ExperimentConfig.from_dict(data, base_dir=path.parent)


def bundled_config_path() -> Path:
    """Path of the shipped simulation-study config ``paper_sec5.cfg``."""
    return Path(str(resources.files("optsample") / "data" / "paper_sec5.cfg"))
