from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

SEED_ENV = "KNF_SEED"


@dataclass(frozen=True)
class ToleranceConfig:
    """Every numerical threshold used by the package, in one place.

    Fields prefixed ``tol_`` must lie in (0, 1).  ``cond_cap`` and
    ``diag_cap`` are magnitudes, not tolerances, and are exempt.
    """

    tol_mu: float = 1e-8
    tol_rel: float = 1e-9
    tol_normal: float = 1e-9
    tol_orbit: float = 1e-6
    tol_sep: float = 1e-6
    tol_real: float = 1e-11
    tol_recon: float = 1e-9
    tol_unitary: float = 1e-9
    tol_herm: float = 1e-10
    tol_sing: float = 1e-12
    tol_det: float = 1e-9
    cond_cap: float = 1e10
    diag_cap: float = 1e6
    max_iters: int = 10_000
    seed: int = 0

    def __post_init__(self):
        for f in dataclasses.fields(self):
            if f.name.startswith("tol_"):
                v = getattr(self, f.name)
                if not (0.0 < v < 1.0):
                    raise ValueError(f"{f.name} must lie in (0, 1), got {v!r}")
        if int(self.max_iters) < 1:
            raise ValueError("max_iters must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.cond_cap <= 1 or self.diag_cap <= 1:
            raise ValueError("cond_cap and diag_cap must exceed 1")

    def replace(self, **changes) -> "ToleranceConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ToleranceConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "max_iters" in kwargs:
            kwargs["max_iters"] = int(kwargs["max_iters"])
        if "seed" in kwargs:
            kwargs["seed"] = int(kwargs["seed"])
        return cls(**kwargs)


DEFAULT = ToleranceConfig()


def load_config(path: str | os.PathLike | None = None) -> ToleranceConfig:
    """Read a JSON config file; ``KNF_SEED`` in the environment overrides its seed.

    Raises ``OSError`` for unreadable files and ``ValueError`` for malformed ones.
    """
    data: dict = {}
    if path is not None:
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed config: {exc}") from exc
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        data["seed"] = int(env_seed)
    try:
        return ToleranceConfig.from_dict(data)
    except TypeError as exc:
        raise ValueError(str(exc)) from exc
