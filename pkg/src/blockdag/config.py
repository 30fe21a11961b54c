"""Run configuration: one TOML file, every CLI flag overrides it."""
from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, fields

from .priors import (
    ADJACENT_ONLY,
    CONSTANT,
    HOPPE_BETA,
    MINIMAL_HOPPE_BETA,
    TWO_LEVEL,
    UNIFORM,
    BetaPolicy,
    PriorParams,
)

PRIOR_NAMES = {
    "uniform": UNIFORM,
    "hoppe-beta": HOPPE_BETA,
    "minimal": MINIMAL_HOPPE_BETA,
}


@dataclass
class RunConfig:
    prior: str = "minimal"
    alpha: float = 1.0
    beta_scheme: str = "two_level"
    # near (b1, b2) then far (b1, b2); the experiment defaults of the study
    beta: tuple = (2.0, 1.0, 1.0, 2.0)
    gamma: float = 1.0
    alpha_tilde: float = 1.0
    iters: int = 5000
    chains: int = 10
    seed: int = 0
    top_k: int = 100
    n_rows: int = 500
    literal_repair: bool = True
    data: str = None
    truth: str = None
    out: str = "out"

    @classmethod
    def from_toml(cls, path) -> "RunConfig":
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "beta" in raw:
            raw["beta"] = tuple(float(v) for v in raw["beta"])
        return cls(**raw)

    def override(self, **kwargs) -> "RunConfig":
        for key, val in kwargs.items():
            if val is not None:
                setattr(self, key, val)
        return self

    def beta_policy(self) -> BetaPolicy:
        vals = tuple(float(v) for v in self.beta)
        if self.beta_scheme == "constant":
            return BetaPolicy.constant(*vals[:2])
        if self.beta_scheme == "adjacent_only":
            return BetaPolicy.adjacent_only(*vals[:2])
        if self.beta_scheme == "two_level":
            if len(vals) != 4:
                raise ValueError("two_level needs four beta values")
            return BetaPolicy.two_level(*vals)
        raise ValueError(f"unknown beta scheme {self.beta_scheme!r}")

    def prior_params(self, prior: str = None) -> PriorParams:
        name = prior or self.prior
        if name not in PRIOR_NAMES:
            raise ValueError(f"unknown prior {name!r}; expected one of {sorted(PRIOR_NAMES)}")
        return PriorParams(self.alpha, self.beta_policy(), PRIOR_NAMES[name])
