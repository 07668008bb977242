"""Moment map, chamber decomposition, the extended action and the χ cocycle."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from momentrate.constants import CHI_INVARIANCE_TOL, EIGENVALUE_CLUSTER_TOL
from momentrate.errors import InvariantViolation, NotAState
from momentrate.helper import validate_state
from momentrate.lie_core import (
    AlgebraVector,
    CartanVector,
    DualVector,
    FactorKind,
    GroupElement,
    GroupSpec,
    coadjoint,
    haar_unitaries,
    iwasawa,
    pairing,
)
from momentrate.representations import RepresentationSpec, derived

logger = logging.getLogger(__name__)

# fixed stream for the stabilizer re-evaluation in chi
_STABILIZER_SEED = 0x5EED


@dataclass(frozen=True, eq=False)
class ChamberDecomposition:
    """x = h·x0 with x0 in the positive chamber and h in K."""

    x0: DualVector
    h: GroupElement

    def sorted_flat(self) -> np.ndarray:
        """Flat chamber coordinates of x0."""
        return self.x0.diagonal_flat()

    def clusters(self) -> list[list[list[int]]]:
        """Index groups of (numerically) equal eigenvalues, per factor."""
        out = []
        for f, block in self.x0:
            if not f.is_matrix:
                out.append([[i] for i in range(f.dim)])
                continue
            out.append(_clusters(np.diag(block).real))
        return out

    def is_degenerate(self) -> bool:
        return any(len(c) > 1 for factor in self.clusters() for c in factor)

    def nonlinear_pairing(self, xi: AlgebraVector) -> float:
        """⟪x, ξ⟫ for the decomposed x."""
        return -2.0 * pairing(self.x0, _alpha_of_exp(self.h, xi))


def _clusters(values: np.ndarray) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(values)):
        if abs(values[i] - values[groups[-1][0]]) <= EIGENVALUE_CLUSTER_TOL * max(
            1.0, abs(values[i])
        ):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _canonical_basis(vectors: np.ndarray) -> np.ndarray:
    """Deterministic orthonormal basis of span(vectors).

    Standard basis vectors are projected onto the span in index order and
    orthonormalized; the first nonzero entry of each result is real positive.
    """
    k = vectors.shape[1]
    if k == 1:
        basis = vectors.copy()
    else:
        proj = vectors @ vectors.conj().T
        cols: list[np.ndarray] = []
        for i in range(proj.shape[0]):
            v = proj[:, i].copy()
            for c in cols:
                v -= np.vdot(c, v) * c
            norm = np.linalg.norm(v)
            if norm > 1e-8:
                cols.append(v / norm)
            if len(cols) == k:
                break
        basis = np.column_stack(cols)
    for j in range(k):
        col = basis[:, j]
        lead = col[np.flatnonzero(np.abs(col) > 1e-12)[0]]
        basis[:, j] = col * (abs(lead) / lead)
    return basis


def chamber_decompose(x: DualVector) -> ChamberDecomposition:
    """Split x into its positive-chamber representative x0 and a unitary h.

    Eigenvalues are sorted nonincreasing per matrix factor. Eigenvectors inside a
    degenerate cluster are replaced by a canonical basis so the result is deterministic.
    SU(2) factors get h with unit determinant.
    """
    x0_blocks, h_blocks = [], []
    for f, block in x:
        if not f.is_matrix:
            x0_blocks.append(block)
            h_blocks.append(np.ones(f.dim, dtype=complex))
            continue
        w, v = np.linalg.eigh(block)
        w, v = w[::-1], v[:, ::-1]
        h = np.empty_like(v)
        for group in _clusters(w):
            h[:, group] = _canonical_basis(v[:, group])
        if f.kind is FactorKind.SU2:
            h = h / np.sqrt(np.linalg.det(h))
        x0_blocks.append(np.diag(w).astype(complex))
        h_blocks.append(h)
    return ChamberDecomposition(
        x0=DualVector(x.spec, tuple(x0_blocks)),
        h=GroupElement(x.spec, tuple(h_blocks)),
    )


def moment_map(rep: RepresentationSpec, rho: np.ndarray) -> DualVector:
    """J(ρ): the dual vector with ⟨J(ρ), ξ⟩ = Tr(T_eπ(ξ)ρ) for every ξ.

    Raises:
        NotAState: If ρ is not a density matrix on the representation space.
    """
    rho = validate_state(rho)
    if rho.shape[0] != rep.dim:
        raise NotAState(f"state has dimension {rho.shape[0]}, representation has {rep.dim}")
    spec = rep.group()
    coords = np.zeros(spec.compact_dim)
    for f, sl in zip(spec.factors, spec.algebra_slices(), strict=True):
        for a in range(f.compact_dim):
            unit = np.zeros(spec.compact_dim)
            unit[sl.start + a] = 1.0
            xi = AlgebraVector.from_real(spec, unit)
            coords[sl.start + a] = float(np.trace(derived(rep, xi) @ rho).real)
    return DualVector.from_real(spec, coords)


def extended_action(g: GroupElement, x: DualVector) -> DualVector:
    """g·x = k(gh)·x0, extending the coadjoint action of K to G."""
    cd = chamber_decompose(x)
    return coadjoint(iwasawa(g @ cd.h).k, cd.x0)


def _stabilizer_element(cd: ChamberDecomposition, rng: np.random.Generator) -> GroupElement:
    """Random unitary commuting with x0: Haar blocks on each eigenvalue cluster."""
    blocks = []
    for (f, _), groups in zip(cd.x0, cd.clusters(), strict=True):
        if not f.is_matrix:
            blocks.append(np.ones(f.dim, dtype=complex))
            continue
        u = np.zeros((f.dim, f.dim), dtype=complex)
        for group in groups:
            u[np.ix_(group, group)] = haar_unitaries(len(group), 1, rng)[0]
        if f.kind is FactorKind.SU2:
            u = u / np.sqrt(np.linalg.det(u))
        blocks.append(u)
    return GroupElement(cd.x0.spec, tuple(blocks))


def log_chi(x: DualVector, g: GroupElement) -> float:
    """ln χ_x(g) = 2⟨x0, α(gh)⟩.

    Raises:
        SingularInput: From the Iwasawa decomposition.
        InvariantViolation: If a different stabilizer choice of h changes the value.
    """
    cd = chamber_decompose(x)
    value = 2.0 * pairing(cd.x0, iwasawa(g @ cd.h).alpha)
    if cd.is_degenerate():
        u = _stabilizer_element(cd, np.random.default_rng(_STABILIZER_SEED))
        again = 2.0 * pairing(cd.x0, iwasawa(g @ cd.h @ u).alpha)
        if abs(again - value) > CHI_INVARIANCE_TOL * max(1.0, abs(value)):
            raise InvariantViolation(
                f"chi depends on the stabilizer choice: {value!r} vs {again!r}"
            )
    return value


def chi(x: DualVector, g: GroupElement) -> float:
    """χ_x(g) = e^{2⟨x0, α(gh)⟩}, a positive multiplicative cocycle."""
    return float(np.exp(log_chi(x, g)))


# ---------------------------------------------------------------------------
# Non-bilinear pairing
# ---------------------------------------------------------------------------


def _log_leading_minors_exp(w: np.ndarray, u: np.ndarray) -> np.ndarray:
    """ln Δ_i(U diag(e^{-w}) U*) for i = 0..d via Cauchy–Binet in log space."""
    d = len(w)
    logs = np.zeros(d + 1)
    for i in range(1, d + 1):
        rows = u[:i, :]
        exponents, weights = [], []
        for subset in itertools.combinations(range(d), i):
            minor = np.linalg.det(rows[:, list(subset)])
            exponents.append(-float(np.sum(w[list(subset)])))
            weights.append(abs(minor) ** 2)
        logs[i] = float(logsumexp(exponents, b=weights))
    return logs


def _alpha_of_exp(h: GroupElement, xi: AlgebraVector) -> CartanVector:
    """α(exp(-ξ/2)·h) without forming the exponential."""
    diagonals = []
    for f, hb, xb in zip(xi.spec.factors, h.blocks, xi.blocks, strict=True):
        if not f.is_matrix:
            diagonals.append(-0.5 * xb)
            continue
        w, u = np.linalg.eigh(xb)
        logs = _log_leading_minors_exp(w, hb.conj().T @ u)
        diagonals.append(0.5 * np.diff(logs))
    return CartanVector(xi.spec, tuple(diagonals))


def nonlinear_pairing(x: DualVector, xi: AlgebraVector) -> float:
    """⟪x, ξ⟫ = -ln χ_x(exp(-ξ/2)).

    Evaluated from principal minors of exp(-h*ξh) in log space, so large ξ does not
    overflow. Reduces to ⟨x, ξ⟩ on torus factors and on commuting, alike-sorted pairs.
    """
    return chamber_decompose(x).nonlinear_pairing(xi)


def su2_pairing_closed_form(x_block: np.ndarray, xi_block: np.ndarray) -> float:
    """Closed form of ⟪x, ξ⟫ for traceless Hermitian 2x2 blocks."""
    x_norm = float(np.max(np.abs(np.linalg.eigvalsh(x_block))))
    xi_norm = float(np.max(np.abs(np.linalg.eigvalsh(xi_block))))
    if x_norm == 0.0 or xi_norm == 0.0:
        return 0.0
    cross = float(np.trace(x_block @ xi_block).real)
    inner = np.cosh(xi_norm) - cross / (2 * x_norm * xi_norm) * np.sinh(xi_norm)
    return float(-2 * x_norm * np.log(inner))


def dual_from_flat(
    spec: GroupSpec, coords: np.ndarray, h: GroupElement | None = None
) -> DualVector:
    """h·x0 for flat chamber coordinates x0 (h defaults to the identity)."""
    x0 = DualVector.from_flat(spec, coords)
    return x0 if h is None else coadjoint(h, x0)

