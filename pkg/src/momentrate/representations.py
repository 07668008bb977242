"""Representation descriptors and their linear actions.

Every representation here comes with a weight basis.

- The standard basis of C^d for Standard(d).
- The monomial basis ordered from the highest weight down for Spin(j).
- Listed weight vectors for TorusRep.
- Kronecker products of these for TensorProduct and Power.

Weights are stored as integer vectors in flat Cartan coordinates, with SU(2)
coordinates doubled; `weight_scale` converts back.
"""

from __future__ import annotations

import functools
import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull
from scipy.special import logsumexp

from momentrate.constants import M_MAX, POLYTOPE_TOL, QUBIT_CACHE_MAX
from momentrate.errors import MismatchedGroup, NotDominant, TooLarge, UnsupportedRep
from momentrate.lie_core import (
    AlgebraVector,
    CartanVector,
    Factor,
    FactorKind,
    GroupElement,
    GroupSpec,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Standard:
    """Defining representation of U(d)."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("Standard(d) needs d >= 1")

    def group(self) -> GroupSpec:
        return GroupSpec.of(Factor.unitary(self.d))

    @property
    def dim(self) -> int:
        return self.d


@dataclass(frozen=True, slots=True)
class Spin:
    """Spin-j irreducible representation of SU(2), stored as 2j."""

    two_j: int

    def __post_init__(self) -> None:
        if self.two_j < 0:
            raise ValueError("spin must be nonnegative")

    @classmethod
    def of(cls, j: float) -> Spin:
        two_j = round(2 * j)
        if abs(2 * j - two_j) > 1e-12:
            raise ValueError(f"spin {j} is not a half-integer")
        return cls(two_j)

    @property
    def j(self) -> float:
        return self.two_j / 2

    def group(self) -> GroupSpec:
        return GroupSpec.of(Factor.su2())

    @property
    def dim(self) -> int:
        return self.two_j + 1


@dataclass(frozen=True, slots=True)
class TorusRep:
    """Diagonal representation of U(1)^d given by weight vectors with multiplicities."""

    weights: tuple[tuple[tuple[int, ...], int], ...]

    def __post_init__(self) -> None:
        normalized = tuple(
            (tuple(int(c) for c in w), int(mult)) for w, mult in self.weights
        )
        if not normalized:
            raise ValueError("TorusRep needs at least one weight")
        ranks = {len(w) for w, _ in normalized}
        if len(ranks) != 1 or 0 in ranks:
            raise ValueError("all torus weights must have the same positive length")
        if any(mult < 1 for _, mult in normalized):
            raise ValueError("weight multiplicities must be positive")
        object.__setattr__(self, "weights", normalized)

    @classmethod
    def of(cls, weights: dict[int | tuple[int, ...], int]) -> TorusRep:
        """Build from {weight: multiplicity}; scalar keys mean rank one."""
        items = []
        for w, mult in weights.items():
            vec = (w,) if isinstance(w, int) else tuple(w)
            items.append((vec, mult))
        return cls(tuple(items))

    @property
    def rank(self) -> int:
        return len(self.weights[0][0])

    def group(self) -> GroupSpec:
        return GroupSpec.of(Factor.torus(self.rank))

    @property
    def dim(self) -> int:
        return sum(mult for _, mult in self.weights)


@dataclass(frozen=True, slots=True)
class TensorProduct:
    """Outer tensor product; each part acts on its own group factors, in order."""

    parts: tuple[RepresentationSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ValueError("TensorProduct needs at least one part")

    def group(self) -> GroupSpec:
        spec = self.parts[0].group()
        for part in self.parts[1:]:
            spec = spec * part.group()
        return spec

    @property
    def dim(self) -> int:
        return math.prod(p.dim for p in self.parts)


@dataclass(frozen=True, slots=True)
class Power:
    """m-th tensor power of a representation of the same group."""

    base: RepresentationSpec
    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("tensor power must be at least 1")

    def group(self) -> GroupSpec:
        return self.base.group()

    @property
    def dim(self) -> int:
        return self.base.dim**self.m


RepresentationSpec = Standard | Spin | TorusRep | TensorProduct | Power


def rep_to_dict(rep: RepresentationSpec) -> dict:
    """Serialize a representation for the run configuration."""
    match rep:
        case Standard(d=d):
            return {"kind": "standard", "dim": d}
        case Spin():
            return {"kind": "spin", "j": rep.j}
        case TorusRep(weights=weights):
            return {"kind": "torus", "weights": [[list(w), mult] for w, mult in weights]}
        case TensorProduct(parts=parts):
            return {"kind": "tensor", "parts": [rep_to_dict(p) for p in parts]}
        case Power(base=base, m=m):
            return {"kind": "power", "base": rep_to_dict(base), "m": m}
    raise UnsupportedRep(f"cannot serialize {rep!r}")


def rep_from_dict(data: dict) -> RepresentationSpec:
    """Parse a representation from the run configuration."""
    kind = data.get("kind")
    match kind:
        case "standard":
            return Standard(int(data["dim"]))
        case "spin":
            return Spin.of(float(data["j"]))
        case "torus":
            return TorusRep(tuple((tuple(w), int(mult)) for w, mult in data["weights"]))
        case "tensor":
            return TensorProduct(tuple(rep_from_dict(p) for p in data["parts"]))
        case "power":
            return Power(rep_from_dict(data["base"]), int(data["m"]))
    raise UnsupportedRep(f"unknown representation kind {kind!r}")


def _require_group(rep: RepresentationSpec, spec: GroupSpec) -> None:
    if rep.group() != spec:
        raise MismatchedGroup(f"representation over {rep.group()} applied to {spec}")


def _split(rep: TensorProduct, blocks: tuple) -> list[tuple]:
    out, start = [], 0
    for part in rep.parts:
        count = len(part.group().factors)
        out.append(blocks[start : start + count])
        start += count
    return out


def _kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return functools.reduce(np.kron, mats)


def _kron_sum(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Σ_i I ⊗ … ⊗ A_i ⊗ … ⊗ I."""
    dims = [m.shape[0] for m in mats]
    total = np.zeros((math.prod(dims), math.prod(dims)), dtype=complex)
    for i, mat in enumerate(mats):
        left = np.eye(math.prod(dims[:i]))
        right = np.eye(math.prod(dims[i + 1 :]))
        total += np.kron(np.kron(left, mat), right)
    return total


# ---------------------------------------------------------------------------
# SU(2) symmetric powers
# ---------------------------------------------------------------------------


def _powers(z: complex, n: int) -> np.ndarray:
    return np.concatenate([[1.0 + 0j], np.cumprod(np.full(n, z, dtype=complex))])


@functools.cache
def _sym_scaling(n: int) -> np.ndarray:
    binom = np.array([math.comb(n, p) for p in range(n + 1)], dtype=float)
    return np.sqrt(binom[None, :] / binom[:, None])


def symmetric_power(matrix: np.ndarray, n: int) -> np.ndarray:
    """n-th symmetric power of a 2x2 matrix in the normalized monomial basis.

    Basis vectors are ordered by decreasing weight: index i corresponds to
    e1^{n-i} e2^{i}. The map is multiplicative and respects conjugate transposes.
    """
    g11, g12, g21, g22 = matrix[0, 0], matrix[0, 1], matrix[1, 0], matrix[1, 1]
    p11, p21, p12, p22 = (_powers(z, n) for z in (g11, g21, g12, g22))
    out = np.zeros((n + 1, n + 1), dtype=complex)
    for p in range(n + 1):
        q = n - p
        k = np.arange(p + 1)
        first = np.array([math.comb(p, int(i)) for i in k]) * p11[k] * p21[p - k]
        k = np.arange(q + 1)
        second = np.array([math.comb(q, int(i)) for i in k]) * p12[k] * p22[q - k]
        out[:, p] = np.convolve(first, second)
    out *= _sym_scaling(n)
    return out[::-1, ::-1]


def symmetric_power_derivation(xi: np.ndarray, n: int) -> np.ndarray:
    """Derived action of a 2x2 matrix on the n-th symmetric power."""
    a, b, c, d = xi[0, 0], xi[0, 1], xi[1, 0], xi[1, 1]
    out = np.zeros((n + 1, n + 1), dtype=complex)
    for p in range(n + 1):
        q = n - p
        out[p, p] = p * a + q * d
        if p >= 1:
            out[p - 1, p] = p * c
        if q >= 1:
            out[p + 1, p] = q * b
    out *= _sym_scaling(n)
    return out[::-1, ::-1]


# ---------------------------------------------------------------------------
# Linear actions
# ---------------------------------------------------------------------------


def basis_weights(rep: RepresentationSpec) -> np.ndarray:
    """Integer weight of every basis vector, shape (dim, rank), SU(2) coordinates doubled."""
    match rep:
        case Standard(d=d):
            return np.eye(d, dtype=int)
        case Spin(two_j=two_j):
            return np.arange(two_j, -two_j - 1, -2, dtype=int).reshape(-1, 1)
        case TorusRep(weights=weights):
            rows = [w for w, mult in weights for _ in range(mult)]
            return np.array(rows, dtype=int)
        case TensorProduct(parts=parts):
            out = basis_weights(parts[0])
            for part in parts[1:]:
                nxt = basis_weights(part)
                out = np.concatenate(
                    [np.repeat(out, len(nxt), axis=0), np.tile(nxt, (len(out), 1))], axis=1
                )
            return out
        case Power(base=base, m=m):
            w = basis_weights(base)
            out = w
            for _ in range(m - 1):
                out = (out[:, None, :] + w[None, :, :]).reshape(-1, w.shape[1])
            return out
    raise UnsupportedRep(f"unknown representation {rep!r}")


def weight_scale(spec: GroupSpec) -> np.ndarray:
    """Factor converting internal integer weights to flat dual Cartan coordinates."""
    parts = [
        np.full(f.cartan_rank, 0.5 if f.kind is FactorKind.SU2 else 1.0) for f in spec.factors
    ]
    return np.concatenate(parts)


def apply(rep: RepresentationSpec, g: GroupElement) -> np.ndarray:
    """Holomorphic extension π(g) as a dense matrix.

    Raises:
        MismatchedGroup: If g is not over the representation's group.
    """
    _require_group(rep, g.spec)
    return _apply_blocks(rep, g.blocks)


def _apply_blocks(rep: RepresentationSpec, blocks: tuple) -> np.ndarray:
    match rep:
        case Standard():
            return np.array(blocks[0], dtype=complex)
        case Spin(two_j=two_j):
            return symmetric_power(blocks[0], two_j)
        case TorusRep():
            w = basis_weights(rep)
            z = blocks[0]
            return np.diag(np.prod(z[None, :] ** w, axis=1))
        case TensorProduct():
            return _kron_all(
                [_apply_blocks(p, b) for p, b in zip(rep.parts, _split(rep, blocks), strict=True)]
            )
        case Power(base=base, m=m):
            single = _apply_blocks(base, blocks)
            return _kron_all([single] * m)
    raise UnsupportedRep(f"unknown representation {rep!r}")


def derived(rep: RepresentationSpec, xi: AlgebraVector) -> np.ndarray:
    """Derivative T_eπ(ξ) at the identity; Hermitian for ξ in i𝔨."""
    _require_group(rep, xi.spec)
    return _derived_blocks(rep, xi.blocks)


def _derived_blocks(rep: RepresentationSpec, blocks: tuple) -> np.ndarray:
    match rep:
        case Standard():
            return np.array(blocks[0], dtype=complex)
        case Spin(two_j=two_j):
            return symmetric_power_derivation(blocks[0], two_j)
        case TorusRep():
            return np.diag(basis_weights(rep) @ blocks[0]).astype(complex)
        case TensorProduct():
            return _kron_sum(
                [_derived_blocks(p, b) for p, b in zip(rep.parts, _split(rep, blocks), strict=True)]
            )
        case Power(base=base, m=m):
            return _kron_sum([_derived_blocks(base, blocks)] * m)
    raise UnsupportedRep(f"unknown representation {rep!r}")


def weight_points(rep: RepresentationSpec) -> np.ndarray:
    """Basis weights in flat dual Cartan coordinates (floats)."""
    return basis_weights(rep) * weight_scale(rep.group())


def log_character(rep: RepresentationSpec, alpha: CartanVector) -> float:
    """ln Tr π(exp α), computed without overflow."""
    _require_group(rep, alpha.spec)
    return float(logsumexp(weight_points(rep) @ alpha.flat()))


def character(rep: RepresentationSpec, alpha: CartanVector) -> float:
    """Tr π(exp α) = Σ over weights of multiplicity · e^{⟨weight, α⟩}."""
    return math.exp(log_character(rep, alpha))


# ---------------------------------------------------------------------------
# Weight data and polytope
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightPolytope:
    """Convex hull Δ of the weights, in its affine frame.

    Points y of the affine hull satisfy normals @ y + offsets <= 0 inside Δ.
    """

    origin: np.ndarray
    frame: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    vertices: np.ndarray

    @classmethod
    def from_points(cls, points: np.ndarray) -> WeightPolytope:
        points = np.unique(np.asarray(points, dtype=float), axis=0)
        origin = points.mean(axis=0)
        centered = points - origin
        _, sing, vt = np.linalg.svd(centered, full_matrices=False)
        scale = max(1.0, float(sing[0]) if len(sing) else 0.0)
        rank = int(np.sum(sing > 1e-9 * scale))
        frame = vt[:rank].T
        reduced = centered @ frame
        if rank == 0:
            normals = np.zeros((0, 0))
            offsets = np.zeros(0)
            vertices = points[:1]
        elif rank == 1:
            lo, hi = int(np.argmin(reduced[:, 0])), int(np.argmax(reduced[:, 0]))
            normals = np.array([[1.0], [-1.0]])
            offsets = np.array([-reduced[hi, 0], reduced[lo, 0]])
            vertices = points[[hi, lo]]
        else:
            hull = ConvexHull(reduced)
            normals = hull.equations[:, :-1]
            offsets = hull.equations[:, -1]
            vertices = points[np.sort(hull.vertices)]
        return cls(origin, frame, normals, offsets, vertices)

    @property
    def affine_dim(self) -> int:
        return self.frame.shape[1]

    def _reduce(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        centered = np.asarray(x, dtype=float) - self.origin
        y = centered @ self.frame
        return y, centered - self.frame @ y

    def depth(self, x: np.ndarray) -> float:
        """Signed distance to the relative boundary; negative outside Δ."""
        y, residual = self._reduce(x)
        off = float(np.linalg.norm(residual))
        if off > POLYTOPE_TOL:
            return -off
        if self.affine_dim == 0:
            return 0.0
        return float(np.min(-(self.normals @ y + self.offsets)))

    def contains(self, x: np.ndarray, tol: float = POLYTOPE_TOL) -> bool:
        return self.depth(x) >= -tol

    def on_boundary(self, x: np.ndarray, tol: float = POLYTOPE_TOL) -> bool:
        return self.affine_dim > 0 and abs(self.depth(x)) <= tol

    def support(self, beta: np.ndarray) -> float:
        """max over Δ of ⟨·, β⟩."""
        return float(np.max(self.vertices @ beta))

    def separating_direction(
        self, x: np.ndarray, tol: float = POLYTOPE_TOL
    ) -> tuple[np.ndarray, float] | None:
        """Unit β with ⟨x, β⟩ - max_Δ⟨·, β⟩ = gap > tol, or None when x ∈ Δ."""
        y, residual = self._reduce(x)
        off = float(np.linalg.norm(residual))
        if off > tol:
            return residual / off, off
        if self.affine_dim == 0:
            return None
        slack = -(self.normals @ y + self.offsets)
        i = int(np.argmin(slack))
        if slack[i] >= -tol:
            return None
        beta = self.frame @ self.normals[i]
        return beta, float(-slack[i])


@dataclass(frozen=True, eq=False)
class WeightData:
    """Distinct integer weights with multiplicities and their convex hull."""

    group: GroupSpec
    weights: tuple[tuple[int, ...], ...]
    multiplicities: tuple[int, ...]

    @property
    def scale(self) -> np.ndarray:
        return weight_scale(self.group)

    @property
    def points(self) -> np.ndarray:
        """Weights in flat dual Cartan coordinates."""
        return np.array(self.weights, dtype=float) * self.scale

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)

    @cached_property
    def polytope(self) -> WeightPolytope:
        return WeightPolytope.from_points(self.points)

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(zip(self.weights, self.multiplicities, strict=True))


def weight_data(rep: RepresentationSpec) -> WeightData:
    """Exact weight multiset of the representation."""
    counts = Counter(tuple(int(c) for c in row) for row in basis_weights(rep))
    weights = tuple(sorted(counts, reverse=True))
    return WeightData(rep.group(), weights, tuple(counts[w] for w in weights))


# ---------------------------------------------------------------------------
# Isotypic decompositions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IsotypicBlock:
    """One isotypic component: label, irreducible dimension, multiplicity, isometry.

    Isometry columns are grouped by copy: copy c occupies columns
    [c·dim, (c+1)·dim), highest weight first.
    """

    label: tuple[int, ...]
    dim: int
    multiplicity: int
    isometry: np.ndarray

    def projector(self) -> np.ndarray:
        return self.isometry @ self.isometry.conj().T


@dataclass(frozen=True, eq=False)
class IsotypicDecomposition:
    """Orthogonal decomposition of a representation space into isotypic blocks."""

    space_dim: int
    blocks: tuple[IsotypicBlock, ...]

    def block(self, label: tuple[int, ...]) -> IsotypicBlock:
        for b in self.blocks:
            if b.label == label:
                return b
        raise KeyError(label)

    def resolution_error(self) -> float:
        """max |Σ P_λ − I| entrywise."""
        total = sum(b.projector() for b in self.blocks)
        return float(np.max(np.abs(total - np.eye(self.space_dim))))


def qubit_multiplicity(m: int, two_j: int) -> int:
    """Multiplicity of spin j in (C^2)^{⊗m} (Catalan triangle)."""
    if two_j < 0 or two_j > m or (m - two_j) % 2:
        return 0
    k = (m - two_j) // 2
    return math.comb(m, k) - (math.comb(m, k - 1) if k else 0)


def dimension_bound(m: int, space_dim: int) -> float:
    """Upper bound (m+1)^{D(D-1)/2} on irreducible dimensions inside the m-th power."""
    return float((m + 1) ** (space_dim * (space_dim - 1) // 2))


_UP = np.array([[1.0], [0.0]])
_DOWN = np.array([[0.0], [1.0]])


def _couple_spin_half(v: np.ndarray, two_j: int, raise_spin: bool) -> np.ndarray:
    """Couple a spin-j isometry with one more qubit (Condon–Shortley phases)."""
    up, down = np.kron(v, _UP), np.kron(v, _DOWN)
    two_big = two_j + 1 if raise_spin else two_j - 1
    out = np.zeros((up.shape[0], two_big + 1))
    denom = 2.0 * (two_j + 1)
    for i in range(two_big + 1):
        two_m = two_big - 2 * i
        plus = (two_j + two_m + 1) / denom
        minus = (two_j - two_m + 1) / denom
        t = two_m - 1
        if -two_j <= t <= two_j:
            coef = math.sqrt(plus) if raise_spin else -math.sqrt(minus)
            out[:, i] += coef * up[:, (two_j - t) // 2]
        t = two_m + 1
        if -two_j <= t <= two_j:
            coef = math.sqrt(minus) if raise_spin else math.sqrt(plus)
            out[:, i] += coef * down[:, (two_j - t) // 2]
    return out


def isotypic_decompose_qubits(m: int, m_max: int = M_MAX) -> IsotypicDecomposition:
    """Spin blocks of (C^2)^{⊗m} by iterated Clebsch–Gordan coupling.

    Labels are (2j,). The qubit basis is |0> = e1 (spin up), and later qubits are
    less significant tensor factors, matching apply(Power(Standard(2), m), g).
    Decompositions of up to QUBIT_CACHE_MAX qubits are cached.

    Raises:
        TooLarge: If m exceeds m_max.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > m_max:
        raise TooLarge(f"{m} qubits exceed the explicit decomposition limit {m_max}")
    if m <= QUBIT_CACHE_MAX:
        return _cached_qubit_decomposition(m)
    return _qubit_decomposition(m)


@functools.lru_cache(maxsize=4)
def _cached_qubit_decomposition(m: int) -> IsotypicDecomposition:
    return _qubit_decomposition(m)


def _qubit_decomposition(m: int) -> IsotypicDecomposition:
    paths: list[tuple[int, np.ndarray]] = [(1, np.eye(2))]
    for _ in range(m - 1):
        nxt = []
        for two_j, v in paths:
            nxt.append((two_j + 1, _couple_spin_half(v, two_j, raise_spin=True)))
            if two_j >= 1:
                nxt.append((two_j - 1, _couple_spin_half(v, two_j, raise_spin=False)))
        paths = nxt
    blocks = []
    for two_j in sorted({tj for tj, _ in paths}, reverse=True):
        columns = [v for tj, v in paths if tj == two_j]
        blocks.append(
            IsotypicBlock(
                label=(two_j,),
                dim=two_j + 1,
                multiplicity=len(columns),
                isometry=np.hstack(columns),
            )
        )
    logger.debug("Decomposed %d qubits into %d spin blocks", m, len(blocks))
    return IsotypicDecomposition(space_dim=2**m, blocks=tuple(blocks))


def _is_torus_rep(rep: RepresentationSpec) -> bool:
    match rep:
        case TorusRep():
            return True
        case Power(base=base):
            return _is_torus_rep(base)
    return False


def isotypic_decompose_torus(rep: RepresentationSpec) -> IsotypicDecomposition:
    """One block per distinct weight; projectors are coordinate projections."""
    if not _is_torus_rep(rep):
        raise UnsupportedRep("torus decomposition needs a TorusRep or a power of one")
    w = basis_weights(rep)
    dim = w.shape[0]
    eye = np.eye(dim)
    groups: dict[tuple[int, ...], list[int]] = {}
    for i, row in enumerate(w):
        groups.setdefault(tuple(int(c) for c in row), []).append(i)
    blocks = tuple(
        IsotypicBlock(label=label, dim=1, multiplicity=len(idx), isometry=eye[:, idx])
        for label, idx in sorted(groups.items())
    )
    return IsotypicDecomposition(space_dim=dim, blocks=blocks)


def highest_weight_vector(weight: Sequence[float], family: FactorKind) -> np.ndarray:
    """Unit highest weight vector v_λ of the irreducible with highest weight λ.

    Args:
        weight: Dominant weight; (j,) for SU(2), (λ1 >= ... >= λd) for U(d),
            any integer vector for a torus
        family: Group family of the irreducible

    Returns:
        The first basis vector of the irreducible's weight basis.

    Raises:
        NotDominant: If λ is not dominant integral.
        UnsupportedRep: For U(d) irreducibles other than the standard one (d >= 3).
    """
    lam = np.asarray(weight, dtype=float)
    if family is FactorKind.SU2:
        two_j = 2 * lam[0]
        if lam.shape != (1,) or two_j < 0 or abs(two_j - round(two_j)) > 1e-12:
            raise NotDominant(f"{weight} is not a dominant SU(2) weight")
        size = round(two_j) + 1
    elif family is FactorKind.UNITARY:
        if np.any(np.abs(lam - np.round(lam)) > 1e-12) or np.any(np.diff(lam) > 0):
            raise NotDominant(f"{weight} is not dominant integral")
        if len(lam) == 2:
            size = round(lam[0] - lam[1]) + 1
        elif np.array_equal(lam, np.eye(len(lam))[0]):
            size = len(lam)
        else:
            raise UnsupportedRep("only the standard irreducible is available for d >= 3")
    else:
        if np.any(np.abs(lam - np.round(lam)) > 1e-12):
            raise NotDominant(f"{weight} is not integral")
        size = 1
    v = np.zeros(size, dtype=complex)
    v[0] = 1.0
    return v
