"""Experiment configuration: strict JSON schema plus algorithm preconditions.

A config is one JSON object. ``algorithm`` selects the pipeline; the
remaining keys are the pipeline parameters and the run settings. Unknown
keys are rejected. Example::

    {"algorithm": "alg-circle", "Q": 1024, "a": 16, "runs": 2,
     "trials": 1000, "master_seed": 42, "format": "json"}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from .algorithms import ConfigError, check_alg_circle, check_alg_r
from .groups import is_prime
from .postprocess import rank_mod_p

Seed = Annotated[int, Field(ge=0, lt=2**64)]


class _Base(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    trials: int = Field(ge=0)
    master_seed: Seed
    out_dir: Optional[str] = None
    format: Literal["json", "csv"] = "json"
    workers: int = Field(default=1, ge=1)

    def violations(self) -> list[str]:
        return []

    def trial_params(self) -> list[tuple[str, dict]]:
        raise NotImplementedError

    def expected_records(self) -> int:
        return self.trials


class AlgRConfig(_Base):
    algorithm: Literal["alg-r"]
    P: int
    R: int = 1
    T: int
    Q: int
    max_rounds: int = Field(default=32, ge=1)

    def violations(self):
        return check_alg_r(self.P, self.R, self.T, self.Q)

    def trial_params(self):
        p = {"P": self.P, "R": self.R, "T": self.T, "Q": self.Q, "max_rounds": self.max_rounds}
        return [("alg-r", p)] * self.trials


class AlgCircleConfig(_Base):
    algorithm: Literal["alg-circle"]
    Q: int
    a: int
    runs: int = 2

    def violations(self):
        return check_alg_circle(self.Q, self.a, self.runs)

    def trial_params(self):
        return [("alg-circle", {"Q": self.Q, "a": self.a, "runs": self.runs})] * self.trials


class AlgSubspaceConfig(_Base):
    algorithm: Literal["alg-subspace"]
    p: int
    n: int = Field(ge=1)
    V: list[list[int]] = []
    max_samples: int = Field(default=256, ge=1)
    patience: Optional[int] = Field(default=None, ge=0)
    verify: bool = True

    def violations(self):
        errors = []
        if not is_prime(self.p):
            errors.append(f"p prime violated ({self.p})")
        bad = [v for v in self.V if len(v) != self.n]
        if bad:
            errors.append(f"basis vectors of length n={self.n} violated")
        elif is_prime(self.p) and rank_mod_p(self.V, self.p, self.n) != len(self.V):
            errors.append("basis independent mod p violated")
        return errors

    def trial_params(self):
        p = {
            "p": self.p,
            "n": self.n,
            "V": [list(v) for v in self.V],
            "max_samples": self.max_samples,
            "patience": self.patience,
            "verify": self.verify,
        }
        return [("alg-subspace", p)] * self.trials


class SweepConfig(_Base):
    """``trials`` counts trials per divisor."""

    algorithm: Literal["dual-shor-sweep"]
    Q: int
    divisors: list[int]
    runs: int = 2

    def violations(self):
        errors = []
        if self.Q < 1:
            errors.append("Q >= 1 violated")
        if self.runs < 2:
            errors.append("runs >= 2 violated")
        for a in self.divisors:
            if a < 1 or (self.Q >= 1 and self.Q % a):
                errors.append(f"a divides Q violated ({a} does not divide {self.Q})")
        return errors

    def trial_params(self):
        return [
            ("alg-circle", {"Q": self.Q, "a": a, "runs": self.runs})
            for a in self.divisors
            for _ in range(self.trials)
        ]

    def expected_records(self):
        return self.trials * len(self.divisors)


ExperimentConfig = Annotated[
    Union[AlgRConfig, AlgCircleConfig, AlgSubspaceConfig, SweepConfig],
    Field(discriminator="algorithm"),
]
_adapter = TypeAdapter(ExperimentConfig)

ALGORITHMS = ("alg-r", "alg-circle", "alg-subspace", "dual-shor-sweep")


def _format_error(err: dict) -> str:
    loc = ".".join(str(x) for x in err["loc"]) or "<root>"
    if err["type"] == "extra_forbidden":
        return f"unknown key {loc!r}"
    return f"{loc}: {err['msg']}"


def parse_config(source, overrides: Optional[dict] = None):
    """Load and validate a config from a path, JSON text, or dict.

    Raises ConfigError listing every violation found.
    """
    if isinstance(source, dict):
        data = dict(source)
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            try:
                text = Path(text).read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config {source}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    try:
        cfg = _adapter.validate_python(data)
    except ValidationError as exc:
        raise ConfigError([_format_error(e) for e in exc.errors()]) from None
    errors = cfg.violations()
    if errors:
        raise ConfigError(errors)
    return cfg


def config_to_json(cfg) -> str:
    return cfg.model_dump_json()
