"""Run configuration: one JSON document describing group, representation and state."""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from momentrate.errors import ConfigError, MismatchedGroup, NotAState
from momentrate.helper import decode_complex_matrix, encode_complex_matrix, validate_state
from momentrate.lie_core import DualVector, GroupSpec
from momentrate.rate_function import OptimizerOptions
from momentrate.representations import (
    RepresentationSpec,
    Standard,
    rep_from_dict,
    rep_to_dict,
)

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("json", "csv")


def _complex_vector(data: list) -> np.ndarray:
    """Accept either real entries or [re, im] pairs."""
    if data and isinstance(data[0], list | tuple):
        return decode_complex_matrix(data)
    return np.asarray(data, dtype=complex)


def build_state(data: dict, dim: int) -> np.ndarray:
    """Density matrix from a state entry.

    Kinds:
        matrix: "entries" as row-major [re, im] pairs
        diagonal: "values", the eigenvalues in the standard basis
        pure: "vector", normalized here
        maximally_mixed: I / dim

    Raises:
        ConfigError: For unknown kinds or missing fields.
        NotAState: If the result is not a state of dimension dim.
    """
    kind = data.get("kind")
    try:
        match kind:
            case "matrix":
                rho = decode_complex_matrix(data["entries"])
            case "diagonal":
                rho = np.diag(np.asarray(data["values"], dtype=float)).astype(complex)
            case "pure":
                v = _complex_vector(data["vector"])
                norm = np.linalg.norm(v)
                if norm == 0.0:
                    raise NotAState("pure state vector is zero")
                v = v / norm
                rho = np.outer(v, v.conj())
            case "maximally_mixed":
                rho = np.eye(dim, dtype=complex) / dim
            case _:
                raise ConfigError(f"unknown state kind {kind!r}")
    except KeyError as exc:
        raise ConfigError(f"state of kind {kind!r} is missing {exc.args[0]!r}") from None
    rho = validate_state(rho)
    if rho.shape != (dim, dim):
        raise NotAState(f"state has dimension {rho.shape[0]}, representation has {dim}")
    return rho


def decode_point(spec: GroupSpec, data: list) -> DualVector:
    """DualVector from one entry per factor: a real list (torus) or a complex matrix."""
    if len(data) != len(spec.factors):
        raise MismatchedGroup(f"point has {len(data)} blocks, group has {len(spec.factors)}")
    blocks = []
    for f, block in zip(spec.factors, data, strict=True):
        blocks.append(decode_complex_matrix(block) if f.is_matrix else np.asarray(block, float))
    return DualVector(spec, tuple(blocks))


def encode_point(x: DualVector) -> list:
    return [
        encode_complex_matrix(block) if f.is_matrix else block.tolist() for f, block in x
    ]


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Everything a command needs besides its own flags."""

    representation: RepresentationSpec
    state: np.ndarray
    seed: int = 0
    workers: int = 1
    optimizer: OptimizerOptions = field(default_factory=OptimizerOptions)
    output_format: str = "json"
    output_path: Path | None = None
    point: DualVector | None = None

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError(f"workers must be at least 1, got {self.workers}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output format must be one of {OUTPUT_FORMATS}")
        if self.state.shape != (self.representation.dim, self.representation.dim):
            raise NotAState(
                f"state has dimension {self.state.shape[0]}, "
                f"representation has {self.representation.dim}"
            )
        if self.optimizer.seed != self.seed:
            # restart points of every ascent follow the master seed
            seeded = dataclasses.replace(self.optimizer, seed=self.seed)
            object.__setattr__(self, "optimizer", seeded)

    @property
    def group(self) -> GroupSpec:
        return self.representation.group()

    def with_overrides(self, **changes) -> RunConfig:
        """Copy with the given fields replaced; None values are ignored."""
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes) if changes else self

    def to_dict(self) -> dict:
        out = {
            "group": self.group.to_dict(),
            "representation": rep_to_dict(self.representation),
            "state": {"kind": "matrix", "entries": encode_complex_matrix(self.state)},
            "seed": self.seed,
            "workers": self.workers,
            "optimizer": self.optimizer.to_dict(),
            "output": {
                "format": self.output_format,
                "path": None if self.output_path is None else str(self.output_path),
            },
        }
        if self.point is not None:
            out["point"] = encode_point(self.point)
        return out


def default_config() -> RunConfig:
    """The standard qubit test case: U(2) acting on C^2 in the state diag(0.7, 0.3)."""
    return RunConfig(representation=Standard(2), state=np.diag([0.7, 0.3]).astype(complex))


def config_from_dict(data: dict) -> RunConfig:
    """Parse a RunConfig document.

    Raises:
        ConfigError: For malformed documents.
        MismatchedGroup: If an explicit group disagrees with the representation.
        NotAState: If the state fails validation.
    """
    if "representation" not in data:
        raise ConfigError("configuration needs a 'representation'")
    try:
        rep = rep_from_dict(data["representation"])
    except KeyError as exc:
        raise ConfigError(f"representation is missing {exc.args[0]!r}") from None
    if "group" in data:
        spec = GroupSpec.from_dict(data["group"])
        if spec != rep.group():
            raise MismatchedGroup(f"configured group {spec} differs from {rep.group()}")
    state = build_state(data.get("state", {"kind": "maximally_mixed"}), rep.dim)
    output = data.get("output") or {}
    path = output.get("path")
    try:
        optimizer = OptimizerOptions.from_dict(data.get("optimizer") or {})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid optimizer options: {exc}") from None
    point = data.get("point")
    return RunConfig(
        representation=rep,
        state=state,
        seed=int(data.get("seed", optimizer.seed)),
        workers=int(data.get("workers", 1)),
        optimizer=optimizer,
        output_format=output.get("format", "json"),
        output_path=None if path is None else Path(path),
        point=None if point is None else decode_point(rep.group(), point),
    )


def load_config(path: Path) -> RunConfig:
    """Read and validate a JSON run configuration."""
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"configuration file {path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    config = config_from_dict(data)
    logger.debug("Loaded configuration from %s: %s", path, config.representation)
    return config
