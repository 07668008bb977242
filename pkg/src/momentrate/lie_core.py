"""Concrete group and algebra arithmetic for tori, SU(2), U(d) and their products.

Group elements live in the complexification (nonzero scalars for torus factors,
invertible matrices otherwise).

- Algebra and dual vectors are Hermitian matrices, or real vectors for torus factors.
- The upper-triangular Borel subgroup is fixed throughout, so the Iwasawa decomposition
  is a QR factorization with a positive diagonal.
- Products are handled strictly factor by factor.
"""

from __future__ import annotations

import functools
import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from enum import StrEnum
from typing import Self

import numpy as np
import scipy.linalg

from momentrate.constants import CONDITION_LIMIT, HERMITIAN_TOL, PAIRING_IMAG_TOL, UNITARY_TOL
from momentrate.errors import InvariantViolation, MismatchedGroup, SingularInput

logger = logging.getLogger(__name__)

SU2_DET_TOL = 1e-8


class FactorKind(StrEnum):
    """Atomic group families."""

    TORUS = "torus"
    SU2 = "su2"
    UNITARY = "unitary"


@dataclass(frozen=True, slots=True)
class Factor:
    """One direct factor of a compact group."""

    kind: FactorKind
    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"factor dimension must be at least 1, got {self.dim}")
        if self.kind is FactorKind.SU2 and self.dim != 2:
            raise ValueError("SU(2) factors have dimension 2")

    @classmethod
    def torus(cls, d: int = 1) -> Factor:
        return cls(FactorKind.TORUS, d)

    @classmethod
    def su2(cls) -> Factor:
        return cls(FactorKind.SU2, 2)

    @classmethod
    def unitary(cls, d: int) -> Factor:
        return cls(FactorKind.UNITARY, d)

    @property
    def is_matrix(self) -> bool:
        return self.kind is not FactorKind.TORUS

    @property
    def compact_dim(self) -> int:
        """Real dimension of the compact factor."""
        if self.kind is FactorKind.TORUS:
            return self.dim
        if self.kind is FactorKind.SU2:
            return 3
        return self.dim * self.dim

    @property
    def cartan_rank(self) -> int:
        """Number of flat Cartan coordinates."""
        return 1 if self.kind is FactorKind.SU2 else self.dim

    def __str__(self) -> str:
        if self.kind is FactorKind.SU2:
            return "SU(2)"
        if self.kind is FactorKind.TORUS:
            return f"U(1)^{self.dim}"
        return f"U({self.dim})"


@dataclass(frozen=True, slots=True)
class GroupSpec:
    """A finite product of torus, SU(2) and unitary factors."""

    factors: tuple[Factor, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("a group needs at least one factor")

    @classmethod
    def of(cls, *factors: Factor) -> GroupSpec:
        return cls(tuple(factors))

    def __mul__(self, other: GroupSpec) -> GroupSpec:
        return GroupSpec(self.factors + other.factors)

    def __str__(self) -> str:
        return " x ".join(str(f) for f in self.factors)

    @property
    def compact_dim(self) -> int:
        return sum(f.compact_dim for f in self.factors)

    @property
    def cartan_rank(self) -> int:
        return sum(f.cartan_rank for f in self.factors)

    @property
    def has_matrix_factors(self) -> bool:
        return any(f.is_matrix for f in self.factors)

    def cartan_slices(self) -> list[slice]:
        """Slices of each factor inside flat Cartan coordinates."""
        slices, start = [], 0
        for f in self.factors:
            slices.append(slice(start, start + f.cartan_rank))
            start += f.cartan_rank
        return slices

    def algebra_slices(self) -> list[slice]:
        """Slices of each factor inside flat real algebra coordinates."""
        slices, start = [], 0
        for f in self.factors:
            slices.append(slice(start, start + f.compact_dim))
            start += f.compact_dim
        return slices

    def to_dict(self) -> list[dict]:
        return [{"kind": str(f.kind), "dim": f.dim} for f in self.factors]

    @classmethod
    def from_dict(cls, data: list[dict]) -> GroupSpec:
        factors = []
        for item in data:
            kind = FactorKind(item["kind"])
            dim = int(item.get("dim", 2 if kind is FactorKind.SU2 else 1))
            factors.append(Factor(kind, dim))
        return cls(tuple(factors))


def _frozen(arr: np.ndarray, dtype: type) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _check_spec(a: GroupSpec, b: GroupSpec) -> None:
    if a != b:
        raise MismatchedGroup(f"group mismatch: {a} vs {b}")


# ---------------------------------------------------------------------------
# Group elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupElement:
    """Element of the complexified group, one block per factor."""

    spec: GroupSpec
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != len(self.spec.factors):
            raise MismatchedGroup(
                f"{len(self.blocks)} blocks for {len(self.spec.factors)} factors"
            )
        frozen = []
        for factor, block in zip(self.spec.factors, self.blocks, strict=True):
            arr = np.asarray(block, dtype=complex)
            expected = (factor.dim, factor.dim) if factor.is_matrix else (factor.dim,)
            if arr.shape != expected:
                raise MismatchedGroup(f"{factor} block has shape {arr.shape}, expected {expected}")
            frozen.append(_frozen(arr, complex))
        object.__setattr__(self, "blocks", tuple(frozen))

    @classmethod
    def identity(cls, spec: GroupSpec) -> GroupElement:
        blocks = [
            np.eye(f.dim, dtype=complex) if f.is_matrix else np.ones(f.dim, dtype=complex)
            for f in spec.factors
        ]
        return cls(spec, tuple(blocks))

    def __iter__(self) -> Iterator[tuple[Factor, np.ndarray]]:
        return iter(zip(self.spec.factors, self.blocks, strict=True))

    def _map(self, matrix_fn: Callable, torus_fn: Callable) -> GroupElement:
        blocks = [matrix_fn(b) if f.is_matrix else torus_fn(b) for f, b in self]
        return GroupElement(self.spec, tuple(blocks))

    def __matmul__(self, other: GroupElement) -> GroupElement:
        _check_spec(self.spec, other.spec)
        blocks = [
            a @ b if f.is_matrix else a * b
            for f, a, b in zip(self.spec.factors, self.blocks, other.blocks, strict=True)
        ]
        return GroupElement(self.spec, tuple(blocks))

    def inverse(self) -> GroupElement:
        return self._map(np.linalg.inv, lambda b: 1.0 / b)

    def star(self) -> GroupElement:
        return self._map(lambda b: b.conj().T, np.conj)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        for f, b in self:
            if f.is_matrix:
                if np.max(np.abs(b.conj().T @ b - np.eye(f.dim))) > tol:
                    return False
            elif np.max(np.abs(np.abs(b) - 1.0)) > tol:
                return False
        return True

    def max_norm(self) -> float:
        return max(float(np.max(np.abs(b))) for b in self.blocks)

    def distance(self, other: GroupElement) -> float:
        """Entrywise max distance."""
        _check_spec(self.spec, other.spec)
        return max(
            float(np.max(np.abs(a - b))) for a, b in zip(self.blocks, other.blocks, strict=True)
        )


def cartan_star(g: GroupElement) -> GroupElement:
    """Componentwise conjugate transpose."""
    return g.star()


# ---------------------------------------------------------------------------
# Algebra and dual vectors
# ---------------------------------------------------------------------------


@functools.cache
def algebra_basis(factor: Factor) -> np.ndarray:
    """Trace-orthonormal Hermitian basis of the factor, shape (compact_dim, n, n).

    Torus factors return the identity, shape (d, d), acting on real vectors.
    """
    if not factor.is_matrix:
        basis = np.eye(factor.dim)
        basis.setflags(write=False)
        return basis
    n = factor.dim
    mats = []
    if factor.kind is FactorKind.SU2:
        mats.append(np.diag([1.0, -1.0]).astype(complex) / np.sqrt(2))
    else:
        for k in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[k, k] = 1.0
            mats.append(e)
    for k in range(n):
        for l in range(k + 1, n):
            sym = np.zeros((n, n), dtype=complex)
            sym[k, l] = sym[l, k] = 1.0 / np.sqrt(2)
            anti = np.zeros((n, n), dtype=complex)
            anti[k, l] = 1j / np.sqrt(2)
            anti[l, k] = -1j / np.sqrt(2)
            mats.extend([sym, anti])
    basis = np.array(mats)
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True, eq=False)
class _LieVector:
    """Per-factor Hermitian matrices (real vectors for torus factors)."""

    spec: GroupSpec
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != len(self.spec.factors):
            raise MismatchedGroup(
                f"{len(self.blocks)} blocks for {len(self.spec.factors)} factors"
            )
        frozen = []
        for factor, block in zip(self.spec.factors, self.blocks, strict=True):
            if not factor.is_matrix:
                arr = np.asarray(block)
                if np.iscomplexobj(arr):
                    if np.max(np.abs(arr.imag), initial=0.0) > HERMITIAN_TOL:
                        raise ValueError("torus components must be real")
                    arr = arr.real
                arr = np.asarray(arr, dtype=float).reshape(-1)
                if arr.shape != (factor.dim,):
                    raise MismatchedGroup(f"{factor} expects {factor.dim} real entries")
                frozen.append(_frozen(arr, float))
                continue
            arr = np.asarray(block, dtype=complex)
            if arr.shape != (factor.dim, factor.dim):
                raise MismatchedGroup(f"{factor} expects a {factor.dim}x{factor.dim} matrix")
            scale = max(1.0, float(np.max(np.abs(arr))))
            if np.max(np.abs(arr - arr.conj().T)) > HERMITIAN_TOL * scale:
                raise ValueError(f"{factor} component is not Hermitian")
            arr = 0.5 * (arr + arr.conj().T)
            if factor.kind is FactorKind.SU2:
                trace = np.trace(arr).real
                if abs(trace) > 1e-10 * scale:
                    raise ValueError(f"SU(2) component must be traceless, trace is {trace!r}")
                arr = arr - 0.5 * trace * np.eye(2)
            frozen.append(_frozen(arr, complex))
        object.__setattr__(self, "blocks", tuple(frozen))

    def __iter__(self) -> Iterator[tuple[Factor, np.ndarray]]:
        return iter(zip(self.spec.factors, self.blocks, strict=True))

    @classmethod
    def zeros(cls, spec: GroupSpec) -> Self:
        blocks = [
            np.zeros((f.dim, f.dim), dtype=complex) if f.is_matrix else np.zeros(f.dim)
            for f in spec.factors
        ]
        return cls(spec, tuple(blocks))

    @classmethod
    def from_real(cls, spec: GroupSpec, coords: np.ndarray) -> Self:
        """Build from coordinates in the trace-orthonormal basis."""
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (spec.compact_dim,):
            raise MismatchedGroup(f"expected {spec.compact_dim} coordinates")
        blocks = []
        for f, sl in zip(spec.factors, spec.algebra_slices(), strict=True):
            c = coords[sl]
            blocks.append(np.tensordot(c, algebra_basis(f), axes=1) if f.is_matrix else c)
        return cls(spec, tuple(blocks))

    @classmethod
    def from_flat(cls, spec: GroupSpec, coords: np.ndarray) -> Self:
        """Diagonal element from flat Cartan (or dual Cartan) coordinates.

        SU(2) factors use the scalar convention: s maps to diag(s, -s) for dual
        vectors and a to diag(a/2, -a/2) for algebra vectors.
        """
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (spec.cartan_rank,):
            raise MismatchedGroup(f"expected {spec.cartan_rank} flat coordinates")
        blocks = []
        half = 0.5 if issubclass(cls, AlgebraVector) else 1.0
        for f, sl in zip(spec.factors, spec.cartan_slices(), strict=True):
            c = coords[sl]
            if f.kind is FactorKind.SU2:
                blocks.append(np.diag([half * c[0], -half * c[0]]).astype(complex))
            elif f.is_matrix:
                blocks.append(np.diag(c).astype(complex))
            else:
                blocks.append(c)
        return cls(spec, tuple(blocks))

    def to_real(self) -> np.ndarray:
        parts = []
        for f, b in self:
            if f.is_matrix:
                parts.append(np.einsum("aij,ji->a", algebra_basis(f), b).real)
            else:
                parts.append(b)
        return np.concatenate(parts)

    def _combine(self, other: _LieVector, op: Callable) -> Self:
        _check_spec(self.spec, other.spec)
        blocks = [op(a, b) for a, b in zip(self.blocks, other.blocks, strict=True)]
        return type(self)(self.spec, tuple(blocks))

    def __add__(self, other: _LieVector) -> Self:
        return self._combine(other, np.add)

    def __sub__(self, other: _LieVector) -> Self:
        return self._combine(other, np.subtract)

    def __mul__(self, scalar: float) -> Self:
        return type(self)(self.spec, tuple(float(scalar) * b for b in self.blocks))

    __rmul__ = __mul__

    def __neg__(self) -> Self:
        return self * -1.0

    def norm(self) -> float:
        """Norm induced by the trace/dot pairing."""
        return float(np.linalg.norm(self.to_real()))

    def max_norm(self) -> float:
        return max(float(np.max(np.abs(b), initial=0.0)) for b in self.blocks)

    def trace_norm(self) -> float:
        """Sum of per-factor trace norms (l1 norm for torus factors)."""
        total = 0.0
        for f, b in self:
            total += float(np.sum(np.abs(np.linalg.eigvalsh(b) if f.is_matrix else b)))
        return total

    def distance(self, other: _LieVector) -> float:
        """Entrywise max distance."""
        return (self - other).max_norm()


class AlgebraVector(_LieVector):
    """Element ξ of i𝔨."""


class DualVector(_LieVector):
    """Element x of i𝔨*, identified with i𝔨 through the trace form."""

    def diagonal_flat(self) -> np.ndarray:
        """Flat dual Cartan coordinates read off the diagonals."""
        parts = []
        for f, b in self:
            d = np.diag(b).real if f.is_matrix else b
            if f.kind is FactorKind.SU2:
                parts.append(np.array([0.5 * (d[0] - d[1])]))
            else:
                parts.append(np.asarray(d, dtype=float))
        return np.concatenate(parts)


@dataclass(frozen=True, eq=False)
class CartanVector:
    """Element α of 𝔞, stored as the real diagonal of each factor."""

    spec: GroupSpec
    diagonals: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        frozen = []
        for f, d in zip(self.spec.factors, self.diagonals, strict=True):
            arr = np.asarray(d, dtype=float).reshape(-1)
            if arr.shape != (f.dim,):
                raise MismatchedGroup(f"{f} expects {f.dim} diagonal entries")
            frozen.append(_frozen(arr, float))
        object.__setattr__(self, "diagonals", tuple(frozen))

    @classmethod
    def from_flat(cls, spec: GroupSpec, coords: np.ndarray) -> CartanVector:
        coords = np.asarray(coords, dtype=float)
        if coords.shape != (spec.cartan_rank,):
            raise MismatchedGroup(f"expected {spec.cartan_rank} flat coordinates")
        diagonals = []
        for f, sl in zip(spec.factors, spec.cartan_slices(), strict=True):
            c = coords[sl]
            diagonals.append(np.array([c[0] / 2, -c[0] / 2]) if f.kind is FactorKind.SU2 else c)
        return cls(spec, tuple(diagonals))

    def flat(self) -> np.ndarray:
        parts = []
        for f, d in zip(self.spec.factors, self.diagonals, strict=True):
            parts.append(np.array([d[0] - d[1]]) if f.kind is FactorKind.SU2 else d)
        return np.concatenate(parts)

    def as_algebra(self) -> AlgebraVector:
        blocks = [
            np.diag(d).astype(complex) if f.is_matrix else d
            for f, d in zip(self.spec.factors, self.diagonals, strict=True)
        ]
        return AlgebraVector(self.spec, tuple(blocks))

    def exp(self) -> GroupElement:
        blocks = [
            np.diag(np.exp(d)).astype(complex) if f.is_matrix else np.exp(d).astype(complex)
            for f, d in zip(self.spec.factors, self.diagonals, strict=True)
        ]
        return GroupElement(self.spec, tuple(blocks))


def pairing(x: DualVector, xi: AlgebraVector | CartanVector) -> float:
    """Bilinear pairing ⟨x, ξ⟩: Re Tr(xξ) per matrix factor, dot product per torus factor.

    Raises:
        InvariantViolation: If a trace has an imaginary part beyond tolerance.
    """
    if isinstance(xi, CartanVector):
        xi = xi.as_algebra()
    _check_spec(x.spec, xi.spec)
    total = 0.0
    for f, a, b in zip(x.spec.factors, x.blocks, xi.blocks, strict=True):
        if not f.is_matrix:
            total += float(np.dot(a, b))
            continue
        value = np.trace(a @ b)
        scale = max(1.0, float(np.linalg.norm(a) * np.linalg.norm(b)))
        if abs(value.imag) > PAIRING_IMAG_TOL * scale:
            raise InvariantViolation(f"pairing has imaginary part {value.imag!r}")
        total += float(value.real)
    return total


# ---------------------------------------------------------------------------
# Iwasawa decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IwasawaFactors:
    """g = k · exp(alpha) · n with k unitary and n unit upper-triangular."""

    k: GroupElement
    alpha: CartanVector
    n: GroupElement

    def reconstruct(self) -> GroupElement:
        return self.k @ self.alpha.exp() @ self.n


def _check_condition(factor: Factor, block: np.ndarray) -> None:
    if not np.all(np.isfinite(block)):
        raise SingularInput(f"{factor} factor has non-finite entries")
    if factor.is_matrix:
        cond = np.linalg.cond(block)
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise SingularInput(f"{factor} factor has condition number {cond:.3e}")
    elif np.min(np.abs(block)) == 0.0:
        raise SingularInput(f"{factor} factor has a zero entry")


def _qr_positive(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q, r = scipy.linalg.qr(block)
    d = np.diag(r)
    phases = d / np.abs(d)
    return q * phases, phases.conj()[:, None] * r


def _gram_schmidt(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram–Schmidt on the columns, R with positive diagonal."""
    n = block.shape[0]
    q = np.zeros((n, n), dtype=complex)
    r = np.zeros((n, n), dtype=complex)
    for j in range(n):
        v = np.array(block[:, j], dtype=complex)
        # two sweeps: the second removes what cancellation left behind
        for _ in range(2):
            for i in range(j):
                c = np.vdot(q[:, i], v)
                v -= c * q[:, i]
                r[i, j] += c
        r[j, j] = np.linalg.norm(v)
        q[:, j] = v / r[j, j]
    return q, r


def iwasawa(g: GroupElement, method: str = "qr") -> IwasawaFactors:
    """Iwasawa decomposition g = k · exp(α) · n, factor by factor.

    Args:
        g: Invertible group element
        method: "qr" (Householder QR with phase absorption) or "gram_schmidt"

    Returns:
        IwasawaFactors with α read off the positive diagonal of R.

    Raises:
        SingularInput: If a factor exceeds the condition guard.
        MismatchedGroup: If an SU(2) factor does not have unit determinant.
    """
    factorize = {"qr": _qr_positive, "gram_schmidt": _gram_schmidt}.get(method)
    if factorize is None:
        raise ValueError(f"unknown Iwasawa method {method!r}")
    ks, alphas, ns = [], [], []
    for f, block in g:
        _check_condition(f, block)
        if not f.is_matrix:
            modulus = np.abs(block)
            ks.append(block / modulus)
            alphas.append(np.log(modulus))
            ns.append(np.ones(f.dim, dtype=complex))
            continue
        if f.kind is FactorKind.SU2:
            det = np.linalg.det(block)
            if abs(det - 1.0) > SU2_DET_TOL * max(1.0, abs(det)):
                raise MismatchedGroup(f"SU(2) factor has determinant {det!r}, expected 1")
        q, r = factorize(block)
        diag = np.diag(r).real
        ks.append(q)
        alphas.append(np.log(diag))
        ns.append(r / diag[:, None])
    factors = IwasawaFactors(
        k=GroupElement(g.spec, tuple(ks)),
        alpha=CartanVector(g.spec, tuple(alphas)),
        n=GroupElement(g.spec, tuple(ns)),
    )
    blocks = zip(g.spec.factors, factors.k.blocks, factors.alpha.diagonals, strict=True)
    for f, k_block, a in blocks:
        if f.kind is FactorKind.SU2 and (
            abs(np.linalg.det(k_block) - 1.0) > SU2_DET_TOL or abs(a.sum()) > SU2_DET_TOL
        ):
            raise InvariantViolation("SU(2) Iwasawa factors left the special group")
    return factors


# ---------------------------------------------------------------------------
# Exponentials, actions, sampling
# ---------------------------------------------------------------------------


def hermitian_exp(matrix: np.ndarray, t: complex = 1.0) -> np.ndarray:
    """exp(t·H) for Hermitian H via eigendecomposition (t may be complex)."""
    w, v = np.linalg.eigh(matrix)
    return (v * np.exp(t * w)) @ v.conj().T


def exp_alg(xi: AlgebraVector | CartanVector, t: float = 1.0) -> GroupElement:
    """Positive definite element exp(t·ξ) of the complexified group."""
    if isinstance(xi, CartanVector):
        xi = xi.as_algebra()
    blocks = [
        hermitian_exp(b, t) if f.is_matrix else np.exp(t * b).astype(complex) for f, b in xi
    ]
    return GroupElement(xi.spec, tuple(blocks))


def exp_unitary(xi: AlgebraVector) -> GroupElement:
    """exp(iξ), an element of K."""
    blocks = [hermitian_exp(b, 1j) if f.is_matrix else np.exp(1j * b) for f, b in xi]
    return GroupElement(xi.spec, tuple(blocks))


def _conjugate(k: GroupElement, v: _LieVector) -> tuple[np.ndarray, ...]:
    _check_spec(k.spec, v.spec)
    return tuple(
        kb @ vb @ kb.conj().T if f.is_matrix else vb
        for f, kb, vb in zip(v.spec.factors, k.blocks, v.blocks, strict=True)
    )


def adjoint(k: GroupElement, xi: AlgebraVector) -> AlgebraVector:
    """Ad_k ξ = kξk* (identity on torus factors)."""
    return AlgebraVector(xi.spec, _conjugate(k, xi))


def coadjoint(k: GroupElement, x: DualVector) -> DualVector:
    """k·x = kxk* under the trace identification (identity on torus factors)."""
    return DualVector(x.spec, _conjugate(k, x))


def haar_unitaries(
    n: int, size: int, rng: np.random.Generator, special: bool = False
) -> np.ndarray:
    """Batch of Haar-distributed unitaries, shape (size, n, n).

    QR of complex Ginibre matrices with the R diagonal phases absorbed into Q.
    With special=True each sample is rescaled to unit determinant.
    """
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    q = q * (d / np.abs(d))[..., None, :]
    if special:
        det = np.linalg.det(q)
        q = q / (det ** (1.0 / n))[..., None, None]
    return q


def haar_sample(spec: GroupSpec, rng: np.random.Generator) -> GroupElement:
    """Haar-random element of the compact group K."""
    blocks = []
    for f in spec.factors:
        if f.is_matrix:
            blocks.append(haar_unitaries(f.dim, 1, rng, special=f.kind is FactorKind.SU2)[0])
        else:
            blocks.append(np.exp(1j * rng.uniform(0.0, 2 * np.pi, f.dim)))
    return GroupElement(spec, tuple(blocks))


def random_element(spec: GroupSpec, rng: np.random.Generator, scale: float = 1.0) -> GroupElement:
    """Random invertible element: exp of a random Hermitian times a Haar unitary."""
    return haar_sample(spec, rng) @ exp_alg(random_algebra(spec, rng, scale))


def random_algebra(spec: GroupSpec, rng: np.random.Generator, scale: float = 1.0) -> AlgebraVector:
    """Gaussian algebra vector with the given coordinate scale."""
    return AlgebraVector.from_real(spec, scale * rng.standard_normal(spec.compact_dim))


def ginibre_element(spec: GroupSpec, rng: np.random.Generator) -> GroupElement:
    """Complex Gaussian element (SU(2) factors normalized to unit determinant)."""
    blocks = []
    for f in spec.factors:
        shape = (f.dim, f.dim) if f.is_matrix else (f.dim,)
        z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
        if f.kind is FactorKind.SU2:
            z = z / np.sqrt(np.linalg.det(z))
        blocks.append(z)
    return GroupElement(spec, tuple(blocks))


def torus_element(spec: GroupSpec, rng: np.random.Generator) -> GroupElement:
    """Random element of the maximal torus T (diagonal phases)."""
    blocks = []
    for f in spec.factors:
        phases = np.exp(1j * rng.uniform(0.0, 2 * np.pi, f.dim))
        if f.kind is FactorKind.SU2:
            phases[1] = phases[0].conj()
        blocks.append(np.diag(phases) if f.is_matrix else phases)
    return GroupElement(spec, tuple(blocks))


def unipotent_element(spec: GroupSpec, rng: np.random.Generator) -> GroupElement:
    """Random unit upper-triangular element of N."""
    blocks = []
    for f in spec.factors:
        if not f.is_matrix:
            blocks.append(np.ones(f.dim, dtype=complex))
            continue
        z = rng.standard_normal((f.dim, f.dim)) + 1j * rng.standard_normal((f.dim, f.dim))
        blocks.append(np.eye(f.dim) + np.triu(z, 1))
    return GroupElement(spec, tuple(blocks))
