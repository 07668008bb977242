"""Sampling the covariant POVM on tensor powers and computing the measures μ_m.

Supported systems are qubits (Standard(2) under U(2), Spin(1/2) under SU(2)) and torus
representations. An outcome is an isotypic label λ with an orbit direction h ∈ K and the
point x = h·(λ/m).

A measurement is sampled in two stages.

1. The block λ is drawn from its exact probability.
2. The direction h is drawn by rejection from Haar proposals.

For qubits the direction density only depends on c = |⟨e_top, h e1⟩|², where e_top is
the top eigenvector of ρ. This gives exact quadrature oracles for every region.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.special import gammaln, logsumexp, roots_legendre, xlogy

from momentrate.constants import (
    ACCEPTANCE_FLOOR,
    INFIMUM_GRID,
    M_MAX,
    MAX_REJECTION_ROUNDS,
    PROJECTOR_AUTO_LIMIT,
    QUADRATURE_NODES,
    SIMULATION_MAX_POWER,
    STATE_TOL,
)
from momentrate.errors import EnvelopeOverflow, NotAState, SamplerTimeout, TooLarge, UnsupportedRep
from momentrate.helper import validate_state, wilson_interval
from momentrate.lie_core import DualVector, GroupElement, haar_unitaries
from momentrate.rate_function import (
    OptimizerOptions,
    rate_contracted,
    rate_cramer,
    rate_keyl_werner,
    weight_distribution,
)
from momentrate.representations import (
    RepresentationSpec,
    Spin,
    Standard,
    TorusRep,
    isotypic_decompose_qubits,
    weight_data,
)
from momentrate.workers import BatchFanout, WorkerBatch

logger = logging.getLogger(__name__)

Label = tuple[int, ...]

ENVELOPE_SLACK = 1e-12
MAX_PROPOSAL_BATCH = 1 << 18
BALL_C_CELLS = 64
BALL_PHI_NODES = 64


class Family(StrEnum):
    """Systems the simulator can measure."""

    QUBIT = "qubit"
    TORUS = "torus"


def system_family(rep: RepresentationSpec) -> Family:
    """Classify a single-copy representation.

    Raises:
        UnsupportedRep: For anything but Standard(2), Spin(1/2) or a TorusRep.
    """
    match rep:
        case Standard(d=2) | Spin(two_j=1):
            return Family.QUBIT
        case TorusRep():
            return Family.TORUS
    raise UnsupportedRep(f"simulation supports qubits and torus representations, got {rep!r}")


def _state(rep: RepresentationSpec, rho: np.ndarray) -> np.ndarray:
    rho = validate_state(rho)
    if rho.shape[0] != rep.dim:
        raise NotAState(f"state has dimension {rho.shape[0]}, representation has {rep.dim}")
    return rho


def qubit_label(rep: RepresentationSpec, m: int, two_j: int) -> Label:
    """(2j,) under SU(2), (λ1, λ2) with λ1 − λ2 = 2j under U(2)."""
    if isinstance(rep, Spin):
        return (two_j,)
    return ((m + two_j) // 2, (m - two_j) // 2)


def label_spin(rep: RepresentationSpec, label: Label) -> int:
    """2j of a qubit label."""
    return label[0] if isinstance(rep, Spin) else label[0] - label[1]


def label_point(rep: RepresentationSpec, m: int, label: Label) -> np.ndarray:
    """Flat chamber coordinates of λ/m."""
    if isinstance(rep, Spin):
        return np.array([label[0] / (2.0 * m)])
    return np.asarray(label, dtype=float) / m


# ---------------------------------------------------------------------------
# Block probabilities
# ---------------------------------------------------------------------------


def _log_complete_homogeneous(n: int, p: float, q: float) -> float:
    """ln Σ_{i=0}^{n} p^i q^{n−i}."""
    i = np.arange(n + 1)
    return float(logsumexp(xlogy(i, p) + xlogy(n - i, q)))


def _log_qubit_multiplicity(m: int, two_j: int) -> float:
    k = (m - two_j) // 2
    return float(
        gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1) + math.log((two_j + 1) / (m - k + 1))
    )


def _spectrum(rho: np.ndarray) -> tuple[float, float]:
    w = np.clip(np.linalg.eigvalsh(rho), 0.0, None)
    return float(w[1]), float(w[0])


def _qubit_closed(rep: RepresentationSpec, rho: np.ndarray, m: int) -> dict[Label, float]:
    """mult(m, 2j) · det(ρ)^k · h_{2j}(p, q) with k = (m − 2j)/2, in log space."""
    p, q = _spectrum(rho)
    det = p * q
    out = {}
    for two_j in range(m, -1, -2):
        k = (m - two_j) // 2
        log_prob = (
            _log_qubit_multiplicity(m, two_j)
            + float(xlogy(k, det))
            + _log_complete_homogeneous(two_j, p, q)
        )
        out[qubit_label(rep, m, two_j)] = math.exp(log_prob)
    return out


def _qubit_projector(rep: RepresentationSpec, rho: np.ndarray, m: int) -> dict[Label, float]:
    """Tr(ρ^{⊗m} P_λ) from the explicit Clebsch–Gordan isometries."""
    decomposition = isotypic_decompose_qubits(m, M_MAX)
    out = {}
    for block in decomposition.blocks:
        w = block.isometry
        y = w.reshape((2,) * m + (w.shape[1],)).astype(complex)
        for axis in range(m):
            y = np.moveaxis(np.tensordot(rho, y, axes=([1], [axis])), 0, axis)
        out[qubit_label(rep, m, block.label[0])] = float(np.sum(w * y.reshape(w.shape)).real)
    return out


def _torus_probabilities(rep: TorusRep, rho: np.ndarray, m: int) -> dict[Label, float]:
    """m-fold convolution of the single-copy weight law."""
    law = {w: p for w, p in weight_distribution(rep, rho).items() if p > 0.0}
    dist: dict[Label, float] = {(0,) * rep.rank: 1.0}
    for _ in range(m):
        nxt: dict[Label, float] = {}
        for w, p in dist.items():
            for v, r in law.items():
                key = tuple(a + b for a, b in zip(w, v, strict=True))
                nxt[key] = nxt.get(key, 0.0) + p * r
        dist = nxt
    return dict(sorted(dist.items(), reverse=True))


def isotypic_probabilities(
    rep: RepresentationSpec, rho: np.ndarray, m: int, method: str = "auto"
) -> dict[Label, float]:
    """Probability Tr(ρ^{⊗m} P_λ) of every isotypic block of the m-th tensor power.

    Args:
        rep: Single-copy representation (qubit or torus)
        rho: Single-copy state
        m: Tensor power
        method: "projector" (explicit decomposition, m <= M_MAX), "closed"
            (closed form, m <= SIMULATION_MAX_POWER) or "auto"

    Raises:
        TooLarge: If m exceeds the limit of the chosen method.
        UnsupportedRep: For representations other than qubits and tori.
    """
    family = system_family(rep)
    rho = _state(rep, rho)
    if m < 1:
        raise ValueError("m must be at least 1")
    if family is Family.TORUS:
        return _torus_probabilities(rep, rho, m)
    if method == "auto":
        method = "projector" if m <= PROJECTOR_AUTO_LIMIT else "closed"
    match method:
        case "projector":
            return _qubit_projector(rep, rho, m)
        case "closed":
            if m > SIMULATION_MAX_POWER:
                raise TooLarge(f"m = {m} exceeds the simulation limit {SIMULATION_MAX_POWER}")
            return _qubit_closed(rep, rho, m)
    raise ValueError(f"unknown probability method {method!r}")


# ---------------------------------------------------------------------------
# Direction law
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QubitFrame:
    """Spectrum p >= q of a qubit state with its eigenvectors (columns, top first).

    Inside the spin-j block the direction density against Haar measure is
    proportional to ⟨hv|Sym^{2j}(ρ)|hv⟩ = (q + (p − q)c)^{2j}.
    """

    p: float
    q: float
    vectors: np.ndarray

    @classmethod
    def from_state(cls, rho: np.ndarray) -> QubitFrame:
        w, v = np.linalg.eigh(rho)
        w = np.clip(w, 0.0, None)
        return cls(p=float(w[1]), q=float(w[0]), vectors=v[:, ::-1])

    @property
    def ratio(self) -> float:
        return self.q / self.p

    def alignment(self, columns: np.ndarray) -> np.ndarray:
        """c = |⟨e_top, u⟩|² for unit vectors u, shape (..., 2)."""
        return np.abs(columns @ self.vectors[:, 0].conj()) ** 2

    def acceptance(self, c: np.ndarray, two_j: int) -> np.ndarray:
        """⟨hv|Sym^{2j}(ρ)|hv⟩ / ‖Sym^{2j}(ρ)‖."""
        return (c + self.ratio * (1.0 - c)) ** two_j

    def expected_acceptance(self, two_j: int) -> float:
        r = self.ratio
        if abs(1.0 - r) < 1e-12:
            return 1.0
        return (1.0 - r ** (two_j + 1)) / ((two_j + 1) * (1.0 - r))

    def log_density(self, c: np.ndarray, two_j: int) -> np.ndarray:
        """Log of the normalized density of c on [0, 1]."""
        if two_j == 0:
            return np.zeros_like(np.asarray(c, dtype=float))
        with np.errstate(divide="ignore"):
            base = np.log(self.q + (self.p - self.q) * np.asarray(c, dtype=float))
        return (
            math.log(two_j + 1)
            + two_j * base
            - _log_complete_homogeneous(two_j, self.p, self.q)
        )

    def mass(self, two_j: int, lo: float, hi: float) -> float:
        """Probability that c falls in [lo, hi], by Gauss–Legendre quadrature (exact)."""
        nodes, weights = roots_legendre(max(QUADRATURE_NODES, two_j // 2 + 1))
        c = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        return float(0.5 * (hi - lo) * np.sum(weights * np.exp(self.log_density(c, two_j))))


def sample_orbit_direction(
    frame: QubitFrame,
    two_j: int,
    rng: np.random.Generator,
    size: int = 1,
    special: bool = False,
) -> np.ndarray:
    """Draw directions h ∈ K with density ∝ ⟨hv_λ|π_λ(ρ)|hv_λ⟩ against Haar measure.

    Haar proposals are accepted with probability (c + (q/p)(1 − c))^{2j}, which is the
    density divided by its envelope ‖π_λ(ρ)‖.

    Returns:
        Array of shape (size, 2, 2) of unitaries (unit determinant when special).

    Raises:
        SamplerTimeout: If the acceptance rate is below ACCEPTANCE_FLOOR or the round
            limit is hit.
        EnvelopeOverflow: If an acceptance ratio exceeds one.
    """
    expected = frame.expected_acceptance(two_j)
    if expected < ACCEPTANCE_FLOOR:
        raise SamplerTimeout(f"expected acceptance {expected:.3e} below {ACCEPTANCE_FLOOR:.0e}")
    accepted: list[np.ndarray] = []
    total = 0
    rounds = 0
    while total < size:
        rounds += 1
        if rounds > MAX_REJECTION_ROUNDS:
            raise SamplerTimeout(f"no completion after {MAX_REJECTION_ROUNDS} rejection rounds")
        batch = min(MAX_PROPOSAL_BATCH, max(16, int(1.25 * (size - total) / expected) + 1))
        proposals = haar_unitaries(2, batch, rng, special=special)
        ratio = frame.acceptance(frame.alignment(proposals[:, :, 0]), two_j)
        if np.any(ratio > 1.0 + ENVELOPE_SLACK):
            raise EnvelopeOverflow(f"acceptance ratio {float(np.max(ratio))!r} exceeds one")
        keep = rng.uniform(size=batch) < ratio
        accepted.append(proposals[keep])
        total += int(np.count_nonzero(keep))
    logger.debug(
        "Direction sampler 2j=%d: %d samples in %d rounds (expected rate %.3e)",
        two_j,
        size,
        rounds,
        expected,
    )
    return np.concatenate(accepted)[:size]


# ---------------------------------------------------------------------------
# Outcomes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    """One POVM outcome: block label, orbit direction and the rescaled point x."""

    label: Label
    direction: GroupElement
    x: DualVector
    weight_prob: float
    m: int


@dataclass(frozen=True, eq=False)
class OutcomeBatch:
    """Many outcomes as arrays.

    Attributes:
        labels: (n, k) integer labels
        chamber: (n, r) flat chamber coordinates of λ/m
        directions: (n, 2, 2) unitaries for qubits, None for tori
        alignment: (n,) values of c for qubits, None for tori
        matrices: (n, 2, 2) points x for qubits, None for tori
    """

    m: int
    labels: np.ndarray
    chamber: np.ndarray
    directions: np.ndarray | None = None
    alignment: np.ndarray | None = None
    matrices: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.labels)


def _chamber_matrices(rep: RepresentationSpec, chamber: np.ndarray) -> np.ndarray:
    """Diagonal blocks of λ/m, shape (n, 2, 2)."""
    if isinstance(rep, Spin):
        diag = np.stack([chamber[:, 0], -chamber[:, 0]], axis=1)
    else:
        diag = chamber
    out = np.zeros((len(chamber), 2, 2), dtype=complex)
    out[:, 0, 0], out[:, 1, 1] = diag[:, 0], diag[:, 1]
    return out


class MeasurementSampler:
    """Two-stage exact sampler of μ_m for one (representation, state, m)."""

    def __init__(
        self, rep: RepresentationSpec, rho: np.ndarray, m: int, method: str = "auto"
    ) -> None:
        self.family = system_family(rep)
        self.rep = rep
        self.m = m
        self.rho = _state(rep, rho)
        self.probabilities = isotypic_probabilities(rep, self.rho, m, method)
        self.labels = list(self.probabilities)
        weights = np.clip(np.array(list(self.probabilities.values())), 0.0, None)
        self._weights = weights / weights.sum()
        self._points = np.array([self._point(label) for label in self.labels])
        self.frame = QubitFrame.from_state(self.rho) if self.family is Family.QUBIT else None

    def _point(self, label: Label) -> np.ndarray:
        if self.family is Family.TORUS:
            return np.asarray(label, dtype=float) / self.m
        return label_point(self.rep, self.m, label)

    def sample(self, n: int, rng: np.random.Generator) -> OutcomeBatch:
        picks = rng.choice(len(self.labels), size=n, p=self._weights)
        labels = np.array(self.labels, dtype=int)[picks]
        chamber = self._points[picks]
        if self.family is Family.TORUS:
            return OutcomeBatch(self.m, labels, chamber)
        directions = np.empty((n, 2, 2), dtype=complex)
        for i, label in enumerate(self.labels):
            idx = np.flatnonzero(picks == i)
            if idx.size:
                directions[idx] = sample_orbit_direction(
                    self.frame,
                    label_spin(self.rep, label),
                    rng,
                    size=idx.size,
                    special=isinstance(self.rep, Spin),
                )
        diag = _chamber_matrices(self.rep, chamber)
        matrices = directions @ diag @ directions.conj().transpose(0, 2, 1)
        return OutcomeBatch(
            m=self.m,
            labels=labels,
            chamber=chamber,
            directions=directions,
            alignment=self.frame.alignment(directions[:, :, 0]),
            matrices=matrices,
        )

    def outcome(self, batch: OutcomeBatch, i: int) -> MeasurementOutcome:
        """Materialize the i-th outcome of a batch."""
        spec = self.rep.group()
        label = tuple(int(v) for v in batch.labels[i])
        if self.family is Family.TORUS:
            direction = GroupElement.identity(spec)
            x = DualVector.from_flat(spec, batch.chamber[i])
        else:
            direction = GroupElement(spec, (batch.directions[i],))
            x = DualVector(spec, (batch.matrices[i],))
        return MeasurementOutcome(
            label=label,
            direction=direction,
            x=x,
            weight_prob=self.probabilities[label],
            m=self.m,
        )


def sample_measurements(
    rep: RepresentationSpec, rho: np.ndarray, m: int, n_samples: int, rng: np.random.Generator
) -> OutcomeBatch:
    """n_samples independent outcomes of the POVM on ρ^{⊗m}."""
    return MeasurementSampler(rep, rho, m).sample(n_samples, rng)


def sample_measurement(
    rep: RepresentationSpec, rho: np.ndarray, m: int, rng: np.random.Generator
) -> MeasurementOutcome:
    """A single outcome of the POVM on ρ^{⊗m}."""
    sampler = MeasurementSampler(rep, rho, m)
    return sampler.outcome(sampler.sample(1, rng), 0)


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------


class RegionKind(StrEnum):
    """Encodings of measurable sets of outcomes."""

    EVERYTHING = "everything"
    CHAMBER_BALL = "chamber_ball"
    BALL = "ball"
    HALF_SPACE = "half_space"
    COMPLEMENT = "complement"


def _floats(text: str) -> np.ndarray:
    return np.array([float(v) for v in text.split(",") if v.strip()])


def _coords(values: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in values)


@dataclass(frozen=True, eq=False)
class RegionSpec:
    """A region of outcome space.

    - chamber_ball: ‖x0 − center‖ <= radius on flat chamber coordinates (norm 2 or 1)
    - ball: trace-norm ball ‖x − center‖₁ <= radius around a diagonal center
    - half_space: ⟨x0, normal⟩ >= offset on flat chamber coordinates
    - complement: every outcome outside inner
    """

    kind: RegionKind
    center: np.ndarray | None = None
    radius: float = 0.0
    normal: np.ndarray | None = None
    offset: float = 0.0
    inner: RegionSpec | None = None
    norm: int = 2

    def __post_init__(self) -> None:
        if self.kind in (RegionKind.CHAMBER_BALL, RegionKind.BALL) and not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if self.kind is RegionKind.COMPLEMENT and self.inner is None:
            raise ValueError("complement needs an inner region")
        if self.norm not in (1, 2):
            raise ValueError("chamber ball norm must be 1 or 2")

    @classmethod
    def everything(cls) -> RegionSpec:
        return cls(RegionKind.EVERYTHING)

    @classmethod
    def chamber_ball(cls, center, radius: float, norm: int = 2) -> RegionSpec:
        center = np.atleast_1d(center).astype(float)
        return cls(RegionKind.CHAMBER_BALL, center=center, radius=float(radius), norm=norm)

    @classmethod
    def ball(cls, center, radius: float) -> RegionSpec:
        center = np.atleast_1d(center).astype(float)
        return cls(RegionKind.BALL, center=center, radius=float(radius))

    @classmethod
    def half_space(cls, normal, offset: float) -> RegionSpec:
        normal = np.atleast_1d(normal).astype(float)
        return cls(RegionKind.HALF_SPACE, normal=normal, offset=float(offset))

    @classmethod
    def complement(cls, inner: RegionSpec) -> RegionSpec:
        return cls(RegionKind.COMPLEMENT, inner=inner)

    @classmethod
    def parse(cls, text: str) -> RegionSpec:
        """Parse 'everything', 'chamber_ball:C:R', 'ball:C:R', 'half_space:N:OFFSET'
        or 'complement:REGION'; C and N are comma-separated coordinates."""
        text = text.strip()
        kind, _, rest = text.partition(":")
        try:
            match RegionKind(kind):
                case RegionKind.EVERYTHING:
                    return cls.everything()
                case RegionKind.COMPLEMENT:
                    return cls.complement(cls.parse(rest))
                case RegionKind.CHAMBER_BALL:
                    center, radius = rest.split(":")
                    return cls.chamber_ball(_floats(center), float(radius))
                case RegionKind.BALL:
                    center, radius = rest.split(":")
                    return cls.ball(_floats(center), float(radius))
                case RegionKind.HALF_SPACE:
                    normal, offset = rest.split(":")
                    return cls.half_space(_floats(normal), float(offset))
        except ValueError as exc:
            raise ValueError(f"invalid region {text!r}: {exc}") from exc
        raise ValueError(f"invalid region {text!r}")

    def describe(self) -> str:
        """Text form accepted by parse."""
        match self.kind:
            case RegionKind.EVERYTHING:
                return "everything"
            case RegionKind.COMPLEMENT:
                return f"complement:{self.inner.describe()}"
            case RegionKind.CHAMBER_BALL:
                return f"chamber_ball:{_coords(self.center)}:{self.radius!r}"
            case RegionKind.BALL:
                return f"ball:{_coords(self.center)}:{self.radius!r}"
        return f"half_space:{_coords(self.normal)}:{self.offset!r}"

    @property
    def needs_direction(self) -> bool:
        """Whether membership depends on more than the chamber point."""
        if self.kind is RegionKind.COMPLEMENT:
            return self.inner.needs_direction
        return self.kind is RegionKind.BALL

    def _center_matrix(self, d: int) -> np.ndarray:
        if len(self.center) == d:
            return np.diag(self.center).astype(complex)
        if len(self.center) == 1 and d == 2:
            return np.diag([self.center[0], -self.center[0]]).astype(complex)
        raise ValueError(f"ball center {self.center} does not fit dimension {d}")

    def contains(self, chamber: np.ndarray, matrices: np.ndarray | None = None) -> np.ndarray:
        """Membership of outcomes given their chamber coordinates (and points x)."""
        chamber = np.atleast_2d(np.asarray(chamber, dtype=float))
        match self.kind:
            case RegionKind.EVERYTHING:
                return np.ones(len(chamber), dtype=bool)
            case RegionKind.COMPLEMENT:
                return ~self.inner.contains(chamber, matrices)
            case RegionKind.CHAMBER_BALL:
                dist = np.linalg.norm(chamber - self.center, ord=self.norm, axis=1)
                return dist <= self.radius
            case RegionKind.HALF_SPACE:
                return chamber @ self.normal >= self.offset
        if matrices is None:
            return np.abs(chamber - self.center).sum(axis=1) <= self.radius
        diff = matrices - self._center_matrix(matrices.shape[-1])
        return np.abs(np.linalg.eigvalsh(diff)).sum(axis=1) <= self.radius

    def chamber_relaxation(self, rep: RepresentationSpec) -> RegionSpec:
        """A chamber-only region containing the chamber points of this region.

        Trace-norm balls become ℓ1 chamber balls around the sorted center (eigenvalue
        perturbation bound); a complement of a direction-dependent region relaxes to
        everything.
        """
        if not self.needs_direction:
            return self
        if self.kind is RegionKind.COMPLEMENT:
            return RegionSpec.everything()
        if isinstance(rep, Spin):
            return RegionSpec.chamber_ball(abs(self.center[0]), self.radius / 2.0, norm=1)
        if isinstance(rep, TorusRep):
            return RegionSpec.chamber_ball(self.center, self.radius, norm=1)
        return RegionSpec.chamber_ball(np.sort(self.center)[::-1], self.radius, norm=1)


# ---------------------------------------------------------------------------
# Exact measures
# ---------------------------------------------------------------------------


def _ball_nodes(frame: QubitFrame, two_j: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Composite Gauss–Legendre nodes in c times uniform angles: (c, phi, weights)."""
    nodes, weights = roots_legendre(max(4, QUADRATURE_NODES // 4))
    edges = np.linspace(0.0, 1.0, BALL_C_CELLS + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[1:] + edges[:-1])
    c = (mids[:, None] + half[:, None] * nodes[None, :]).ravel()
    wc = (half[:, None] * weights[None, :]).ravel() * np.exp(frame.log_density(c, two_j))
    phi = 2 * np.pi * np.arange(BALL_PHI_NODES) / BALL_PHI_NODES
    cc, pp = np.meshgrid(c, phi, indexing="ij")
    ww = np.repeat(wc[:, None] / BALL_PHI_NODES, BALL_PHI_NODES, axis=1)
    return cc.ravel(), pp.ravel(), ww.ravel()


def _orbit_points(
    rep: RepresentationSpec, frame: QubitFrame, chamber: np.ndarray, c: np.ndarray, phi: np.ndarray
) -> np.ndarray:
    """Points x = h·(λ/m) with h e1 = U_ρ(√c, √(1−c) e^{iφ})."""
    local = np.stack([np.sqrt(c), np.sqrt(np.clip(1.0 - c, 0.0, None)) * np.exp(1j * phi)], axis=1)
    u = local @ frame.vectors.T
    proj = u[:, :, None] * u[:, None, :].conj()
    if isinstance(rep, Spin):
        s = chamber[0]
        return s * (2.0 * proj - np.eye(2))
    top, bottom = chamber
    return (top - bottom) * proj + bottom * np.eye(2)


def exact_mu(
    rep: RepresentationSpec,
    rho: np.ndarray,
    m: int,
    region: RegionSpec,
    method: str = "auto",
) -> float:
    """μ_m(region) by summation over blocks.

    Chamber-only regions are exact; direction-dependent regions integrate the direction
    law by quadrature over (c, φ) in the eigenframe of ρ.
    """
    rho = _state(rep, rho)
    probs = isotypic_probabilities(rep, rho, m, method)
    family = system_family(rep)
    total = 0.0
    frame = QubitFrame.from_state(rho) if family is Family.QUBIT else None
    for label, prob in probs.items():
        point = (
            np.asarray(label, dtype=float) / m
            if family is Family.TORUS
            else label_point(rep, m, label)
        )
        if family is Family.TORUS or not region.needs_direction:
            total += prob * bool(region.contains(point)[0])
            continue
        c, phi, weights = _ball_nodes(frame, label_spin(rep, label))
        points = _orbit_points(rep, frame, point, c, phi)
        inside = region.contains(np.repeat(point[None, :], len(c), axis=0), points)
        total += prob * float(np.sum(weights[inside]))
    return min(1.0, total)


def direction_bin_probabilities(
    rep: RepresentationSpec, rho: np.ndarray, m: int, bins: int = 20
) -> dict[tuple[Label, int], float]:
    """Joint law of (λ, bin of cos θ), with cos θ = 2c − 1 cut into equal bins on [−1, 1]."""
    if system_family(rep) is not Family.QUBIT:
        raise UnsupportedRep("direction bins are defined for qubit systems")
    rho = _state(rep, rho)
    frame = QubitFrame.from_state(rho)
    edges = np.linspace(0.0, 1.0, bins + 1)
    out = {}
    for label, prob in isotypic_probabilities(rep, rho, m).items():
        two_j = label_spin(rep, label)
        for b in range(bins):
            out[(label, b)] = prob * frame.mass(two_j, edges[b], edges[b + 1])
    return out


def orbit_density_rate(
    rep: RepresentationSpec, rho: np.ndarray, region: RegionSpec, m: int
) -> float:
    """−(1/m) ln of the largest POVM density over outcomes in the region.

    The density of an outcome (λ, h) is P(λ) times the direction density; it is +∞
    when the region holds no outcome.
    """
    rho = _state(rep, rho)
    family = system_family(rep)
    probs = isotypic_probabilities(rep, rho, m)
    frame = QubitFrame.from_state(rho) if family is Family.QUBIT else None
    best = -math.inf
    for label, prob in probs.items():
        if prob <= 0.0:
            continue
        if family is Family.TORUS:
            if region.contains(np.asarray(label, dtype=float) / m)[0]:
                best = max(best, math.log(prob))
            continue
        point = label_point(rep, m, label)
        two_j = label_spin(rep, label)
        if not region.needs_direction:
            if region.contains(point)[0]:
                best = max(best, math.log(prob) + float(frame.log_density(1.0, two_j)))
            continue
        c, phi, _ = _ball_nodes(frame, two_j)
        inside = region.contains(
            np.repeat(point[None, :], len(c), axis=0), _orbit_points(rep, frame, point, c, phi)
        )
        if np.any(inside):
            best = max(best, math.log(prob) + float(np.max(frame.log_density(c[inside], two_j))))
    return math.inf if best == -math.inf else -best / m


# ---------------------------------------------------------------------------
# Monte Carlo estimates
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MuEstimate:
    """Monte Carlo frequency with its Wilson interval."""

    p_hat: float
    low: float
    high: float
    hits: int
    trials: int


def estimate_mu(
    rep: RepresentationSpec,
    rho: np.ndarray,
    m: int,
    region: RegionSpec,
    n_samples: int,
    seed: int = 0,
    workers: int = 1,
) -> MuEstimate:
    """Monte Carlo estimate of μ_m(region); deterministic for fixed (seed, workers)."""
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if region.kind is RegionKind.EVERYTHING:
        return MuEstimate(1.0, 1.0, 1.0, n_samples, n_samples)
    sampler = MeasurementSampler(rep, rho, m)

    def count_hits(batch: WorkerBatch) -> int:
        outcomes = sampler.sample(batch.size, batch.generator())
        return int(np.count_nonzero(region.contains(outcomes.chamber, outcomes.matrices)))

    fanout = BatchFanout(workers, name=f"mu m={m}")
    hits = sum(fanout.run_sync(count_hits, n_samples, seed))
    low, high = wilson_interval(hits, n_samples)
    return MuEstimate(hits / n_samples, low, high, hits, n_samples)


# ---------------------------------------------------------------------------
# Rates over regions
# ---------------------------------------------------------------------------


def contracted_rate(
    rep: RepresentationSpec,
    rho: np.ndarray,
    x0: np.ndarray,
    options: OptimizerOptions | None = None,
) -> float:
    """Ĩ_ρ(x0) by the fastest applicable method; options drive the numeric fallback."""
    match rep:
        case Standard() | Spin(two_j=1):
            return rate_keyl_werner(rho, x0, rep)
        case TorusRep():
            return rate_cramer(weight_distribution(rep, rho), x0).value
    return rate_contracted(rep, rho, x0, options or OptimizerOptions(restarts=2)).value


@dataclass(frozen=True)
class _ChamberDomain:
    bounds: list[tuple[float, float]]
    kind: str

    def to_flat(self, params: np.ndarray) -> np.ndarray:
        params = np.atleast_1d(params)
        if self.kind == "standard2":
            return np.array([params[0], 1.0 - params[0]])
        return np.asarray(params, dtype=float)


def _chamber_domain(rep: RepresentationSpec) -> _ChamberDomain:
    match rep:
        case Standard(d=2):
            return _ChamberDomain([(0.5, 1.0)], "standard2")
        case Spin(two_j=1):
            return _ChamberDomain([(0.0, 0.5)], "spin")
        case TorusRep():
            points = weight_data(rep).points
            bounds = [
                (float(lo), float(hi))
                for lo, hi in zip(points.min(0), points.max(0), strict=True)
            ]
            return _ChamberDomain(bounds, "torus")
    raise UnsupportedRep(f"no chamber parameterization for {rep!r}")


def _bisect(feasible, bad: float, good: float, steps: int = 60) -> float:
    for _ in range(steps):
        mid = 0.5 * (bad + good)
        if feasible(mid):
            good = mid
        else:
            bad = mid
    return good


def infimum_rate(
    rep: RepresentationSpec,
    rho: np.ndarray,
    region: RegionSpec,
    grid: int = INFIMUM_GRID,
    options: OptimizerOptions | None = None,
) -> tuple[float, np.ndarray | None]:
    """inf of the contracted rate over the chamber points of a region.

    Direction-dependent regions are replaced by their chamber relaxation, so the result
    never exceeds the true infimum. Returns (value, minimizing flat chamber point).
    """
    rho = _state(rep, rho)
    relaxed = region.chamber_relaxation(rep)
    domain = _chamber_domain(rep)

    def feasible(params) -> bool:
        return bool(relaxed.contains(domain.to_flat(params))[0])

    def value(params) -> float:
        return contracted_rate(rep, rho, domain.to_flat(params), options)

    def penalized(params) -> float:
        v = value(params) if feasible(params) else math.inf
        return v if math.isfinite(v) else 1e300

    best_value, best_point = math.inf, None
    if len(domain.bounds) == 1:
        lo, hi = domain.bounds[0]
        ts = np.linspace(lo, hi, grid)
        mask = np.array([feasible(t) for t in ts])
        if not mask.any():
            ts = np.linspace(lo, hi, 10 * grid)
            mask = np.array([feasible(t) for t in ts])
        padded = np.concatenate([[False], mask, [False]]).astype(int)
        starts = np.flatnonzero(np.diff(padded) == 1)
        stops = np.flatnonzero(np.diff(padded) == -1) - 1
        for i0, i1 in zip(starts, stops, strict=True):
            a = ts[i0] if i0 == 0 else _bisect(feasible, ts[i0 - 1], ts[i0])
            b = ts[i1] if i1 == len(ts) - 1 else _bisect(feasible, ts[i1 + 1], ts[i1])
            candidates = [a, b, *ts[i0 : i1 + 1]]
            if b > a:
                res = minimize_scalar(
                    penalized, bounds=(a, b), method="bounded", options={"xatol": 1e-10}
                )
                candidates.append(float(res.x))
            for t in candidates:
                if not feasible(t):
                    continue
                v = value(t)
                if v < best_value:
                    best_value, best_point = v, domain.to_flat(t)
    else:
        axes = [np.linspace(lo, hi, grid) for lo, hi in domain.bounds]
        start = None
        for params in itertools.product(*axes):
            params = np.array(params)
            if not feasible(params):
                continue
            v = value(params)
            if v < best_value:
                best_value, best_point, start = v, domain.to_flat(params), params
        if start is not None:
            res = minimize(
                penalized,
                start,
                method="Nelder-Mead",
                options={"xatol": 1e-9, "fatol": 1e-12},
            )
            if feasible(res.x) and value(res.x) < best_value:
                best_value, best_point = value(res.x), domain.to_flat(res.x)
    if best_point is None:
        logger.warning("Region %s holds no chamber point", region.describe())
    return max(best_value, 0.0), best_point


def upper_bound_rhs(m: int, space_dim: int, inf_rate: float) -> float:
    """(m+1)^{D(D+1)/2} · e^{−m·inf I}."""
    if math.isinf(inf_rate):
        return 0.0
    return math.exp(space_dim * (space_dim + 1) / 2 * math.log(m + 1) - m * inf_rate)


@dataclass(frozen=True, slots=True)
class UpperBoundRow:
    """One tensor power of the non-asymptotic upper bound check."""

    m: int
    mu: float
    upper: float
    inf_rate: float
    rhs: float
    passed: bool
    exact: bool


def verify_upper_bound(
    rep: RepresentationSpec,
    rho: np.ndarray,
    m_list: list[int],
    region: RegionSpec,
    n_samples: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> list[UpperBoundRow]:
    """Compare μ_m(region) with (m+1)^{D(D+1)/2} e^{−m inf I} for every m.

    With n_samples = 0 the measure is computed exactly; otherwise the upper Wilson
    limit of a Monte Carlo estimate is compared.
    """
    inf_rate, _ = infimum_rate(rep, rho, region)
    rows = []
    for m in m_list:
        if n_samples:
            estimate = estimate_mu(rep, rho, m, region, n_samples, seed, workers)
            mu, upper, exact = estimate.p_hat, estimate.high, False
        else:
            mu = exact_mu(rep, rho, m, region)
            upper, exact = mu, True
        rhs = upper_bound_rhs(m, rep.dim, inf_rate)
        passed = upper <= rhs * (1.0 + 1e-12)
        if not passed:
            logger.warning("Upper bound violated at m=%d: %.6g > %.6g", m, upper, rhs)
        rows.append(UpperBoundRow(m, mu, upper, inf_rate, rhs, passed, exact))
    return rows


@dataclass(frozen=True, slots=True)
class EmpiricalRate:
    """−(1/m) ln μ_m(region) with its error bar.

    lower_bound marks Monte Carlo runs without hits, whose rate comes from the upper
    Wilson limit and only bounds the true rate from below.
    """

    m: int
    mu: float
    rate: float
    rate_low: float
    rate_high: float
    exact: bool
    lower_bound: bool = False


def _neg_log_rate(mu: float, m: int) -> float:
    return math.inf if mu <= 0.0 else max(0.0, -math.log(mu) / m)


def empirical_rate(
    rep: RepresentationSpec,
    rho: np.ndarray,
    region: RegionSpec,
    m_list: list[int],
    n_samples: int = 0,
    seed: int = 0,
    workers: int = 1,
) -> list[EmpiricalRate]:
    """Decay rates −(1/m) ln μ_m(region), exact when n_samples = 0."""
    rows = []
    for m in m_list:
        if not n_samples:
            mu = exact_mu(rep, rho, m, region)
            rate = _neg_log_rate(mu, m)
            rows.append(EmpiricalRate(m, mu, rate, rate, rate, exact=True))
            continue
        estimate = estimate_mu(rep, rho, m, region, n_samples, seed, workers)
        rate_low = _neg_log_rate(estimate.high, m)
        rate_high = _neg_log_rate(estimate.low, m)
        if estimate.hits == 0:
            logger.warning("No hits at m=%d; reporting a lower bound on the rate", m)
            rows.append(
                EmpiricalRate(m, 0.0, rate_low, rate_low, rate_high, False, lower_bound=True)
            )
            continue
        rows.append(
            EmpiricalRate(
                m, estimate.p_hat, _neg_log_rate(estimate.p_hat, m), rate_low, rate_high, False
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Simulation report
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class SimulationRow:
    """Per-m line of a simulation run."""

    m: int
    mu_hat: float
    ci_low: float
    ci_high: float
    mu_exact: float | None
    empirical_rate: float
    inf_rate: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class SimulationReport:
    """Rows plus the law-of-large-numbers and upper-bound verdicts."""

    rows: list[SimulationRow]
    inf_rate: float
    lln_nondecreasing: bool
    bound_holds: bool


def _exact_available(rep: RepresentationSpec, m: int) -> bool:
    return system_family(rep) is Family.TORUS or m <= SIMULATION_MAX_POWER


def run_simulation(
    rep: RepresentationSpec,
    rho: np.ndarray,
    m_list: list[int],
    region: RegionSpec,
    n_samples: int,
    seed: int = 0,
    workers: int = 1,
    options: OptimizerOptions | None = None,
) -> SimulationReport:
    """Monte Carlo and exact μ_m over m_list with rate and bound columns."""
    inf_rate, _ = infimum_rate(rep, rho, region, options=options)
    rows = []
    for m in m_list:
        estimate = estimate_mu(rep, rho, m, region, n_samples, seed, workers)
        mu_exact = exact_mu(rep, rho, m, region) if _exact_available(rep, m) else None
        reference = mu_exact if mu_exact is not None else estimate.p_hat
        rhs = upper_bound_rhs(m, rep.dim, inf_rate)
        upper = estimate.high if mu_exact is None else mu_exact
        row = SimulationRow(
            m=m,
            mu_hat=estimate.p_hat,
            ci_low=estimate.low,
            ci_high=estimate.high,
            mu_exact=mu_exact,
            empirical_rate=_neg_log_rate(reference, m),
            inf_rate=inf_rate,
            rhs=rhs,
            passed=upper <= rhs * (1.0 + 1e-12),
        )
        logger.info(
            "m=%d: mu_hat=%.6g [%.6g, %.6g], exact=%s, rate=%.6g",
            m,
            row.mu_hat,
            row.ci_low,
            row.ci_high,
            "n/a" if mu_exact is None else f"{mu_exact:.6g}",
            row.empirical_rate,
        )
        rows.append(row)
    trend = [r.mu_exact if r.mu_exact is not None else r.mu_hat for r in rows if r.m >= 4]
    lln = all(b >= a - STATE_TOL for a, b in itertools.pairwise(trend))
    return SimulationReport(rows, inf_rate, lln, all(r.passed for r in rows))
