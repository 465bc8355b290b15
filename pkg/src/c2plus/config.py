"""Run-time configuration shared by preprocessing and queries."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path


def _is_dyadic(value: float) -> bool:
    frac = Fraction(value)
    den = frac.denominator
    num = abs(frac.numerator)
    return (den & (den - 1)) == 0 and (num & (num - 1)) == 0 and num > 0


@dataclass(frozen=True)
class Config:
    """Tunable constants of the construction.

    All lengths are absolute: inputs are never rescaled, because C^2 norms
    are not invariant under dilation.
    """

    A1: float = 32.0
    A2: float = 1.0
    c_G: float = 1.0 / 32.0
    c0: float = 1.0 / 1024.0
    C_T: float = 1000.0
    kappa0: float = 1.0 / 16.0
    k_depth: int = 16
    m_dir: int = 64
    slab_C: float = 10.0
    N0: int = 24
    D_config: int = 200
    bbox_factor: float = 1.5
    qp_tol: float = 1e-6
    qp_max_iter: int = 100_000
    lp_tol: float = 1e-9
    tn_slack: float = 2.0

    def __post_init__(self) -> None:
        if not (self.A1 >= 8 and _is_dyadic(self.A1)):
            raise ValueError(f"A1 must be a dyadic number >= 8, got {self.A1}")
        if not (self.A2 > 0 and _is_dyadic(self.A2)):
            raise ValueError(f"A2 must be a positive power of two, got {self.A2}")
        for name in ("c_G", "c0", "C_T", "kappa0", "slab_C", "bbox_factor", "qp_tol", "lp_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.tn_slack >= 1:
            raise ValueError("tn_slack must be at least 1")
        if self.c_G >= 1:
            raise ValueError("c_G must be < 1")
        if self.k_depth < 1 or self.m_dir < 2 or self.N0 < 1 or self.D_config < 1:
            raise ValueError("integer parameters must be positive (m_dir >= 2)")

    @property
    def cutoff(self) -> float:
        """Largest admissible sidelength A2^-1."""
        return 1.0 / self.A2

    def replace(self, **changes) -> "Config":
        return dataclasses.replace(self, **changes)

    def to_lines(self) -> list[str]:
        return [f"{f.name}={getattr(self, f.name)!r}" for f in fields(self)]

    @classmethod
    def from_mapping(cls, mapping: dict[str, str | float | int]) -> "Config":
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for key, raw in mapping.items():
            if key not in kinds:
                raise ValueError(f"unknown config key: {key}")
            if kinds[key] in (int, "int"):
                values[key] = int(raw)
            else:
                text = str(raw)
                values[key] = float(Fraction(text)) if "/" in text else float(text)
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "Config":
        mapping: dict[str, str] = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            mapping[key] = value
        mapping.update(overrides or {})
        return cls.from_mapping(mapping)


DEFAULT = Config()
