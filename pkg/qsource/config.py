from __future__ import annotations

"""Experiment documents: one JSON file per run, validated before any matrix exists."""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from measurement import (
    Pom,
    block_projective_pom,
    computational_pom,
    eigenbasis_pom,
    explicit_pom,
    random_pom,
    random_projective_pom,
    scaled_identity_pom,
    uniform_pom,
)
from sources import SignalEnsemble, SourceFamily, SourceKind, ensemble_to_density
from utils.budget import Budgets

log = logging.getLogger(__name__)

# A matrix entry is either a real number or a [re, im] pair.
Entry = float | tuple[float, float]
MatrixRows = list[list[Entry]]


def _entry(e: Entry) -> complex:
    return complex(*e) if isinstance(e, (tuple, list)) else complex(e)


def to_matrix(rows: MatrixRows) -> np.ndarray:
    m = np.array([[_entry(e) for e in row] for row in rows], dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


class Scenario(str, Enum):
    consistency = "consistency"
    positivity = "positivity"
    entropy_scan = "entropy-scan"
    bound_check = "bound-check"
    aep = "aep"
    ergodicity = "ergodicity"
    certify_appendix = "certify-appendix"


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid")


class EnsembleSpec(_Spec):
    signals: list[list[Entry]]
    probs: list[float]


class SourceSpec(_Spec):
    kind: SourceKind
    rho: MatrixRows | None = None
    ensemble: EnsembleSpec | None = None
    r_matrix: MatrixRows | None = None
    basis: MatrixRows | None = None
    a: float | None = None
    b: float = 0.0
    c: float = 0.0
    strict: bool = True
    label: str = ""

    @model_validator(mode="after")
    def _check_fields(self) -> "SourceSpec":
        if self.kind is SourceKind.pauli_r:
            if self.a is None:
                raise ValueError("pauli-r needs a")
            if not abs(self.a) < 1:
                raise ValueError(f"pauli-r needs |a| < 1, got {self.a}")
            return self
        if (self.rho is None) == (self.ensemble is None):
            raise ValueError(f"{self.kind.value} needs exactly one of rho, ensemble")
        if self.kind is SourceKind.explicit_r and self.r_matrix is None:
            raise ValueError("explicit-r needs r_matrix")
        if self.basis is not None and self.kind is not SourceKind.commuting_r:
            raise ValueError("basis only applies to commuting-r")
        return self

    @property
    def d(self) -> int:
        if self.kind is SourceKind.pauli_r:
            return 2
        if self.rho is not None:
            return len(self.rho)
        return len(self.ensemble.signals[0])

    def build(self) -> SourceFamily:
        if self.kind is SourceKind.pauli_r:
            return SourceFamily.pauli(self.a, self.b, self.c, label=self.label)
        if self.ensemble is not None:
            ens = SignalEnsemble.from_lists(
                [[_entry(e) for e in s] for s in self.ensemble.signals],
                self.ensemble.probs,
            )
            rho = ensemble_to_density(ens)
        else:
            rho = to_matrix(self.rho)
        if self.kind is SourceKind.bernoulli:
            return SourceFamily.bernoulli(rho, label=self.label)
        if self.kind is SourceKind.commuting_r:
            basis = to_matrix(self.basis) if self.basis is not None else None
            return SourceFamily.commuting(rho, basis=basis, label=self.label)
        return SourceFamily.explicit(
            rho, to_matrix(self.r_matrix), strict=self.strict, label=self.label
        )


PomKind = Literal[
    "eigenbasis",
    "computational",
    "uniform",
    "scaled-identity",
    "block-projective",
    "explicit",
    "random-projective",
    "random",
]


class PomSpec(_Spec):
    kind: PomKind = "eigenbasis"
    r: int | None = Field(None, ge=1)
    weights: list[float] | None = None
    blocks: list[list[int]] | None = None
    operators: list[MatrixRows] | None = None
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_fields(self) -> "PomSpec":
        needs = {
            "scaled-identity": "weights",
            "block-projective": "blocks",
            "explicit": "operators",
        }
        field = needs.get(self.kind)
        if field and getattr(self, field) is None:
            raise ValueError(f"{self.kind} POM needs {field}")
        if self.kind == "random" and self.r is None:
            raise ValueError("random POM needs r")
        return self

    def outcomes(self, d: int) -> int:
        """Alphabet size r without building the operators."""
        if self.weights is not None:
            return len(self.weights)
        if self.blocks is not None:
            return len(self.blocks)
        if self.operators is not None:
            return len(self.operators)
        return self.r or d

    def build(self, f: SourceFamily) -> Pom:
        d = f.d
        if self.kind == "eigenbasis":
            return eigenbasis_pom(f.rho)
        if self.kind == "computational":
            return computational_pom(d)
        if self.kind == "uniform":
            return uniform_pom(d, self.r)
        if self.kind == "scaled-identity":
            return scaled_identity_pom(self.weights, d)
        if self.kind == "block-projective":
            return block_projective_pom(self.blocks, d)
        if self.kind == "explicit":
            return explicit_pom([to_matrix(op) for op in self.operators])
        rng = np.random.default_rng(self.seed)
        if self.kind == "random-projective":
            return random_projective_pom(d, rng, self.r)
        return random_pom(d, self.r, rng)


class CertifyGrid(_Spec):
    a: list[float] = Field(default_factory=lambda: [0.0])
    b: list[float] = Field(default_factory=lambda: [0.05])
    c: list[float] = Field(default_factory=lambda: [0.05])

    @model_validator(mode="after")
    def _check_a(self) -> "CertifyGrid":
        bad = [a for a in self.a if not abs(a) < 1]
        if bad:
            raise ValueError(f"grid needs |a| < 1, got {bad}")
        return self


class ProbeSpec(_Spec):
    """Ergodicity probes: single-site observables and two classical cylinders."""

    a_observable: Literal["i", "x", "y", "z"] = "z"
    b_observable: Literal["i", "x", "y", "z"] = "i"
    c_observable: Literal["i", "x", "y", "z"] = "z"
    a_site: int = Field(0, ge=0)
    b_site: int = Field(0, ge=0)
    c_site: int = Field(0, ge=0)
    cylinder_c: str = "1"
    cylinder_d: str = "1"
    cylinder_d_offset: int = Field(0, ge=0)


class ExperimentConfig(_Spec):
    scenario: Scenario
    source: SourceSpec | None = None
    pom: PomSpec = Field(default_factory=PomSpec)
    n_max: int = Field(6, ge=1)
    n_values: list[int] | None = None
    delta: float = Field(0.1, gt=0)
    epsilon: float = Field(0.1, gt=0, lt=1)
    h_ref: float | None = Field(None, ge=0)
    trials: int = Field(0, ge=0, description="random observables / factorization pairs")
    random_poms: int = Field(0, ge=0, description="extra random POMs for bound-check")
    samples: int = Field(0, ge=0, description="Monte-Carlo messages; 0 means exact")
    seed: int = Field(0, ge=0)
    budgets: Budgets = Field(default_factory=Budgets)
    grid: CertifyGrid = Field(default_factory=CertifyGrid)
    shifts: list[int] = Field(default_factory=lambda: [4, 8, 12], min_length=1)
    window: int = Field(12, ge=1)
    probe: ProbeSpec = Field(default_factory=ProbeSpec)
    output: str | None = None

    @model_validator(mode="after")
    def _check_scenario(self) -> "ExperimentConfig":
        if self.scenario is not Scenario.certify_appendix and self.source is None:
            raise ValueError(f"scenario {self.scenario.value} needs a source")
        if any(n < 1 for n in self.n_values or []):
            raise ValueError("n_values must be >= 1")
        if any(s < 1 for s in self.shifts):
            raise ValueError("shifts must be >= 1")
        if self.scenario is Scenario.ergodicity:
            p = self.probe
            if p.a_site + max(self.shifts) > self.window:
                raise ValueError(
                    f"A at site {p.a_site} shifted {max(self.shifts) - 1} times "
                    f"leaves the {self.window}-site window"
                )
            if max(p.b_site, p.c_site) >= self.window:
                raise ValueError(f"B and C must sit inside the {self.window}-site window")
        return self

    @property
    def block_lengths(self) -> list[int]:
        return sorted(set(self.n_values)) if self.n_values else [self.n_max]

    def check_budgets(self) -> None:
        """Raise BudgetExceeded for block sizes the scenario would allocate."""
        if self.scenario is Scenario.certify_appendix:
            self.budgets.check_dim(2, self.n_max)
            return
        d = self.source.d
        if self.scenario is Scenario.ergodicity:
            self.budgets.check_dim(d, self.window)
        elif self.scenario is Scenario.aep:
            for n in self.block_lengths:
                self.budgets.check_words(self.pom.outcomes(d), n)
        else:
            self.budgets.check_dim(d, self.n_max)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    return ExperimentConfig.model_validate(raw)
