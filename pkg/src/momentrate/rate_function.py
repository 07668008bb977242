"""Rate functions I_ρ and Ĩ_ρ, the log moment generating function and closed forms.

The general evaluator maximizes ξ ↦ ⟪x, ξ⟫ − ln Z_ρ(ξ) over i𝔨. Points outside the
weight polytope are certified infinite before any optimization runs.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from collections.abc import Callable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy.optimize import minimize
from scipy.special import logsumexp, xlogy

from momentrate.constants import (
    ACCEPTANCE_TOLERANCE,
    ALPHA_CAP,
    CONTRACTION_FD_STEP,
    CONTRACTION_STEPS,
    DIVERGENCE_NORM,
    FD_RELATIVE_STEP,
    GRADIENT_TOLERANCE,
    MAX_ITERATIONS,
    MINOR_UNDERFLOW,
    RESTART_SCALES,
    RESTARTS,
    STATE_TOL,
)
from momentrate.errors import (
    InvariantViolation,
    MaxIterations,
    NotAState,
    SingularMinor,
    UnsupportedRep,
)
from momentrate.helper import is_faithful, json_number, leading_minors, validate_state
from momentrate.lie_core import (
    AlgebraVector,
    CartanVector,
    DualVector,
    GroupElement,
    GroupSpec,
    adjoint,
    coadjoint,
    exp_unitary,
    haar_sample,
)
from momentrate.moment_geometry import (
    ChamberDecomposition,
    chamber_decompose,
    extended_action,
    log_chi,
    moment_map,
)
from momentrate.representations import (
    Power,
    RepresentationSpec,
    Spin,
    Standard,
    TensorProduct,
    TorusRep,
    WeightPolytope,
    apply,
    basis_weights,
    derived,
    weight_data,
    weight_points,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Results and options
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Converged:
    """Stationary point found with the given gradient norm."""

    tag: ClassVar[str] = "converged"
    gradient_norm: float

    def to_dict(self) -> dict:
        return {"kind": self.tag, "gradient_norm": json_number(self.gradient_norm)}


@dataclass(frozen=True, eq=False)
class Diverged:
    """x0 lies outside the weight polytope: ⟨x0, β⟩ exceeds max over Δ by gap."""

    tag: ClassVar[str] = "diverged"
    direction: np.ndarray
    slope: float
    gap: float

    def to_dict(self) -> dict:
        return {
            "kind": self.tag,
            "direction": [float(v) for v in self.direction],
            "slope": json_number(self.slope),
            "gap": json_number(self.gap),
        }


@dataclass(frozen=True, eq=False)
class Unbounded:
    """Objective still increasing past the divergence norm inside the polytope."""

    tag: ClassVar[str] = "unbounded"
    direction: np.ndarray
    slope: float

    def to_dict(self) -> dict:
        return {
            "kind": self.tag,
            "direction": [float(v) for v in self.direction],
            "slope": json_number(self.slope),
        }


Certificate = Converged | Diverged | Unbounded


@dataclass(frozen=True, eq=False)
class RateResult:
    """Value of a rate function together with how it was obtained."""

    value: float
    certificate: Certificate
    evaluations: int = 0
    argmax_xi: AlgebraVector | None = None
    method: str = ""
    boundary: bool = False
    faithful: bool = True
    notes: tuple[str, ...] = ()
    argmin_h: GroupElement | None = None

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> dict:
        out = {
            "value": json_number(self.value),
            "certificate": self.certificate.to_dict(),
            "evaluations": self.evaluations,
            "method": self.method,
            "boundary": self.boundary,
            "faithful": self.faithful,
        }
        if self.argmax_xi is not None:
            out["argmax_xi"] = [float(v) for v in self.argmax_xi.to_real()]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass(frozen=True, slots=True)
class OptimizerOptions:
    """Controls for every ascent in this module."""

    max_iterations: int = MAX_ITERATIONS
    gradient_tolerance: float = GRADIENT_TOLERANCE
    acceptance_tolerance: float = ACCEPTANCE_TOLERANCE
    restarts: int = RESTARTS
    restart_scales: tuple[float, ...] = RESTART_SCALES
    divergence_norm: float = DIVERGENCE_NORM
    fd_step: float = FD_RELATIVE_STEP
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "restart_scales", tuple(float(s) for s in self.restart_scales))
        positive = {
            "max_iterations": self.max_iterations,
            "gradient_tolerance": self.gradient_tolerance,
            "acceptance_tolerance": self.acceptance_tolerance,
            "divergence_norm": self.divergence_norm,
            "fd_step": self.fd_step,
        }
        for name, value in positive.items():
            if value <= 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")
        if not self.restart_scales or min(self.restart_scales) <= 0:
            raise ValueError("restart scales must be positive")

    @classmethod
    def from_dict(cls, data: Mapping) -> OptimizerOptions:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown optimizer options: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}


def _checked_state(rep: RepresentationSpec, rho: np.ndarray) -> np.ndarray:
    rho = validate_state(rho)
    if rho.shape[0] != rep.dim:
        raise NotAState(f"state has dimension {rho.shape[0]}, representation has {rep.dim}")
    return rho


def _check_faithful(rho: np.ndarray) -> bool:
    faithful = is_faithful(rho)
    if not faithful:
        logger.warning("State is not faithful; only the upper bound of the LDP applies")
    return faithful


# ---------------------------------------------------------------------------
# ln Z_ρ
# ---------------------------------------------------------------------------


def _log_trace_exp(matrix: np.ndarray, rho: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """ln Tr(ρ e^M) for Hermitian M, with the eigendecomposition of M."""
    w, u = np.linalg.eigh(matrix)
    weights = np.clip(np.einsum("ki,kl,li->i", u.conj(), rho, u).real, 0.0, None)
    return float(logsumexp(w, b=weights)), w, u


def _log_trace_exp_gradient(
    basis: np.ndarray, rho: np.ndarray, w: np.ndarray, u: np.ndarray, log_z: float
) -> np.ndarray:
    """Gradient of ln Tr(ρ e^M) along each basis direction (divided differences of exp)."""
    rho_t = u.conj().T @ rho @ u
    gap = np.abs(w[:, None] - w[None, :])
    top = np.maximum(w[:, None], w[None, :]) - log_z
    with np.errstate(invalid="ignore", divide="ignore"):
        phi = np.where(gap > 1e-12, -np.expm1(-gap) / gap, 1.0)
    weighted = rho_t.T * np.exp(np.minimum(top, 600.0)) * phi
    rotated = np.einsum("ki,akl,lj->aij", u.conj(), basis, u)
    return np.einsum("ij,aij->a", weighted, rotated).real


def _derived_basis(rep: RepresentationSpec) -> np.ndarray:
    spec = rep.group()
    unit = np.eye(spec.compact_dim)
    return np.array([derived(rep, AlgebraVector.from_real(spec, e)) for e in unit])


def log_Z(rep: RepresentationSpec, rho: np.ndarray, xi: AlgebraVector) -> float:
    """ln Tr(ρ·π(exp ξ)).

    Raises:
        NotAState: If ρ is not a state on the representation space.
    """
    rho = _checked_state(rep, rho)
    return _log_trace_exp(derived(rep, xi), rho)[0]


def log_Z_gradient(rep: RepresentationSpec, rho: np.ndarray, xi: AlgebraVector) -> np.ndarray:
    """Gradient of ln Z_ρ at ξ in trace-orthonormal algebra coordinates."""
    rho = _checked_state(rep, rho)
    basis = _derived_basis(rep)
    log_z, w, u = _log_trace_exp(derived(rep, xi), rho)
    return _log_trace_exp_gradient(basis, rho, w, u, log_z)


# ---------------------------------------------------------------------------
# Multistart ascent
# ---------------------------------------------------------------------------


Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


class _Escaped(Exception):
    def __init__(self, point: np.ndarray) -> None:
        super().__init__("iterate exceeded the divergence norm")
        self.point = point


@dataclass
class _Ascent:
    point: np.ndarray | None = None
    value: float = -math.inf
    gradient_norm: float = math.inf
    escape: tuple[np.ndarray, float] | None = None


def _start_points(dim: int, opts: OptimizerOptions) -> Iterator[np.ndarray]:
    rng = np.random.default_rng(opts.seed)
    yield np.zeros(dim)
    for i in range(opts.restarts):
        yield opts.restart_scales[i % len(opts.restart_scales)] * rng.standard_normal(dim)


def _slope(objective: Objective, direction: np.ndarray, radius: float) -> float:
    near = objective(radius * direction)[0]
    far = objective(2.0 * radius * direction)[0]
    return (far - near) / radius


def _ascend(objective: Objective, dim: int, opts: OptimizerOptions) -> _Ascent:
    """Maximize from the origin and random restarts; stop early on certified escape."""
    best = _Ascent()

    def negated(c: np.ndarray) -> tuple[float, np.ndarray]:
        if np.linalg.norm(c) > opts.divergence_norm:
            raise _Escaped(np.array(c))
        value, grad = objective(c)
        return -value, -grad

    for index, start in enumerate(_start_points(dim, opts)):
        try:
            res = minimize(
                negated,
                start,
                jac=True,
                method="BFGS",
                options={"maxiter": opts.max_iterations, "gtol": opts.gradient_tolerance},
            )
        except _Escaped as exc:
            direction = exc.point / np.linalg.norm(exc.point)
            slope = _slope(objective, direction, opts.divergence_norm)
            logger.debug("Start %d escaped with slope %.3e", index, slope)
            if slope > opts.acceptance_tolerance:
                best.escape = (direction, slope)
                return best
            continue
        value, gnorm = -float(res.fun), float(np.linalg.norm(res.jac))
        logger.debug(
            "Start %d: value %.12g, gradient norm %.3e, %d iterations",
            index,
            value,
            gnorm,
            res.nit,
        )
        if gnorm <= opts.acceptance_tolerance and value > best.value:
            best.point, best.value, best.gradient_norm = np.array(res.x), value, gnorm
    return best


def _outside(
    polytope: WeightPolytope, x0: np.ndarray, objective: Objective, lift: Callable, opts
) -> Diverged | None:
    separation = polytope.separating_direction(x0)
    if separation is None:
        return None
    beta, gap = separation
    slope = _slope(objective, lift(beta), opts.divergence_norm)
    logger.debug("Point outside the weight polytope: gap %.3e, slope %.3e", gap, slope)
    return Diverged(direction=beta, slope=slope, gap=gap)


def _result(
    ascent: _Ascent,
    *,
    method: str,
    evaluations: int,
    boundary: bool,
    faithful: bool,
    argmax: AlgebraVector | None = None,
) -> RateResult:
    if ascent.escape is not None:
        direction, slope = ascent.escape
        return RateResult(
            value=math.inf,
            certificate=Unbounded(direction=direction, slope=slope),
            evaluations=evaluations,
            method=method,
            boundary=boundary,
            faithful=faithful,
        )
    if ascent.point is None:
        raise MaxIterations(f"{method}: no start reached gradient tolerance")
    notes = ("boundary point: finiteness not claimed",) if boundary else ()
    if boundary:
        logger.warning("Point lies on the boundary of the weight polytope")
    return RateResult(
        value=max(ascent.value, 0.0),
        certificate=Converged(ascent.gradient_norm),
        evaluations=evaluations,
        argmax_xi=argmax,
        method=method,
        boundary=boundary,
        faithful=faithful,
        notes=notes,
    )


def _diverged_result(cert: Diverged, method: str, evaluations: int, faithful: bool) -> RateResult:
    return RateResult(
        value=math.inf,
        certificate=cert,
        evaluations=evaluations,
        method=method,
        faithful=faithful,
    )


# ---------------------------------------------------------------------------
# Dual form
# ---------------------------------------------------------------------------


class _DualObjective:
    """ξ ↦ ⟪x, ξ⟫ − ln Z_ρ(ξ) on trace-orthonormal algebra coordinates."""

    def __init__(
        self, rep: RepresentationSpec, rho: np.ndarray, cd: ChamberDecomposition, fd_step: float
    ) -> None:
        self.spec = rep.group()
        self.rho = rho
        self.cd = cd
        self.fd_step = fd_step
        self.basis = _derived_basis(rep)
        self.evaluations = 0

    def pairing(self, c: np.ndarray) -> float:
        return self.cd.nonlinear_pairing(AlgebraVector.from_real(self.spec, c))

    def __call__(self, c: np.ndarray) -> tuple[float, np.ndarray]:
        self.evaluations += 1
        log_z, w, u = _log_trace_exp(np.tensordot(c, self.basis, axes=1), self.rho)
        grad = -_log_trace_exp_gradient(self.basis, self.rho, w, u, log_z)
        for i in range(len(c)):
            step = self.fd_step * max(1.0, abs(c[i]))
            shift = np.zeros_like(c)
            shift[i] = step
            grad[i] += (self.pairing(c + shift) - self.pairing(c - shift)) / (2 * step)
        return self.pairing(c) - log_z, grad


def rate_numeric(
    rep: RepresentationSpec,
    rho: np.ndarray,
    x: DualVector,
    opts: OptimizerOptions | None = None,
) -> RateResult:
    """I_ρ(x) = sup_ξ ⟪x, ξ⟫ − ln Z_ρ(ξ).

    Raises:
        NotAState: If ρ is not a state on the representation space.
        MaxIterations: If no start converged and divergence was not certified.
    """
    opts = opts or OptimizerOptions()
    rho = _checked_state(rep, rho)
    faithful = _check_faithful(rho)
    cd = chamber_decompose(x)
    spec = rep.group()
    objective = _DualObjective(rep, rho, cd, opts.fd_step)
    polytope = weight_data(rep).polytope
    x0 = cd.sorted_flat()

    def lift(beta: np.ndarray) -> np.ndarray:
        return adjoint(cd.h, CartanVector.from_flat(spec, beta).as_algebra()).to_real()

    outside = _outside(polytope, x0, objective, lift, opts)
    if outside is not None:
        return _diverged_result(outside, "numeric", objective.evaluations, faithful)
    ascent = _ascend(objective, spec.compact_dim, opts)
    argmax = None if ascent.point is None else AlgebraVector.from_real(spec, ascent.point)
    return _result(
        ascent,
        method="numeric",
        evaluations=objective.evaluations,
        boundary=polytope.on_boundary(x0),
        faithful=faithful,
        argmax=argmax,
    )


# ---------------------------------------------------------------------------
# AN form
# ---------------------------------------------------------------------------


def _is_defining(rep: RepresentationSpec) -> bool:
    match rep:
        case Standard():
            return True
        case Spin(two_j=1):
            return True
    return False


def _minor_ratios(sigma: np.ndarray) -> np.ndarray:
    """Δ_i(σ)/Δ_{i−1}(σ), i = 1..d.

    Raises:
        SingularMinor: If a leading minor underflows.
    """
    minors = leading_minors(sigma).real
    scale = max(1.0, float(np.max(np.abs(sigma))))
    for i, value in enumerate(minors[1:], start=1):
        if value <= MINOR_UNDERFLOW * scale**i:
            raise SingularMinor(f"leading minor {i} is {value:.3e}")
    return minors[1:] / minors[:-1]


class _ClosedInner:
    """inf over N of Tr(π(n)*σπ(n)e^β) for defining representations: Σ q_i e^{⟨w_i, β⟩}."""

    def __init__(self, sigma: np.ndarray, points: np.ndarray) -> None:
        self.q = _minor_ratios(sigma)
        self.points = points

    def __call__(self, beta: np.ndarray) -> tuple[float, np.ndarray]:
        exps = self.points @ beta
        log_t = float(logsumexp(exps, b=self.q))
        return log_t, self.q * np.exp(exps - log_t)


class _NumericInner:
    """inf over N of Tr(π(n)*σπ(n)e^β), minimized over strictly upper-triangular entries."""

    def __init__(self, rep: RepresentationSpec, sigma: np.ndarray, points: np.ndarray) -> None:
        self.rep = rep
        self.spec = rep.group()
        self.sigma = sigma
        self.points = points
        self.slots = []
        for f in self.spec.factors:
            count = f.dim * (f.dim - 1) // 2 if f.is_matrix else 0
            self.slots.append(count)
        self.z = np.zeros(2 * sum(self.slots))

    def _unipotent(self, z: np.ndarray) -> GroupElement:
        blocks, start = [], 0
        entries = z[0::2] + 1j * z[1::2]
        for f, count in zip(self.spec.factors, self.slots, strict=True):
            if not f.is_matrix:
                blocks.append(np.ones(f.dim, dtype=complex))
                continue
            n = np.eye(f.dim, dtype=complex)
            n[np.triu_indices(f.dim, 1)] = entries[start : start + count]
            start += count
            blocks.append(n)
        return GroupElement(self.spec, tuple(blocks))

    def _diagonal(self, z: np.ndarray) -> np.ndarray:
        m = apply(self.rep, self._unipotent(z))
        return np.clip(np.einsum("ki,kl,li->i", m.conj(), self.sigma, m).real, 0.0, None)

    def __call__(self, beta: np.ndarray) -> tuple[float, np.ndarray]:
        exps = self.points @ beta
        if self.z.size:
            res = minimize(
                lambda z: float(logsumexp(exps, b=self._diagonal(z))),
                self.z,
                method="BFGS",
                options={"gtol": 1e-8, "maxiter": MAX_ITERATIONS},
            )
            self.z = np.array(res.x)
        diag = self._diagonal(self.z)
        log_t = float(logsumexp(exps, b=diag))
        return log_t, diag * np.exp(exps - log_t)


def rate_AN(
    rep: RepresentationSpec,
    rho: np.ndarray,
    x: DualVector,
    opts: OptimizerOptions | None = None,
) -> RateResult:
    """I_ρ(x) = sup_β ⟨x0, β⟩ − ln inf_n Tr(π(n)*σπ(n)π(e^β)) with σ = π(h)*ρπ(h).

    Defining representations use the principal-minor closed form for the inner
    infimum; other representations, and singular minors, minimize over N numerically.
    """
    opts = opts or OptimizerOptions()
    rho = _checked_state(rep, rho)
    faithful = _check_faithful(rho)
    cd = chamber_decompose(x)
    x0 = cd.sorted_flat()
    points = weight_points(rep)
    pi_h = apply(rep, cd.h)
    sigma = pi_h.conj().T @ rho @ pi_h
    inner: _ClosedInner | _NumericInner | None = None
    notes: tuple[str, ...] = ()
    if _is_defining(rep):
        try:
            inner = _ClosedInner(sigma, points)
        except SingularMinor as exc:
            logger.warning("Closed-form inner minimum unavailable (%s); minimizing over N", exc)
            notes = (f"singular minor: {exc}",)
    if inner is None:
        inner = _NumericInner(rep, sigma, points)
    evaluations = 0

    def objective(beta: np.ndarray) -> tuple[float, np.ndarray]:
        nonlocal evaluations
        evaluations += 1
        log_t, probs = inner(beta)
        return float(x0 @ beta) - log_t, x0 - probs @ points

    polytope = weight_data(rep).polytope
    outside = _outside(polytope, x0, objective, lambda beta: beta, opts)
    if outside is not None:
        return _diverged_result(outside, "an", evaluations, faithful)
    ascent = _ascend(objective, len(x0), opts)
    argmax = None
    if ascent.point is not None:
        spec = rep.group()
        alpha = CartanVector.from_flat(spec, ascent.point).as_algebra()
        argmax = adjoint(cd.h, alpha)
    result = _result(
        ascent,
        method="an",
        evaluations=evaluations,
        boundary=polytope.on_boundary(x0),
        faithful=faithful,
        argmax=argmax,
    )
    return dataclasses.replace(result, notes=result.notes + notes) if notes else result


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def _relative_entropy(x0: np.ndarray, q: np.ndarray) -> float:
    """Σ x0_i ln(x0_i/q_i) with 0·ln 0 = 0; +∞ off the simplex or where q_i = 0 < x0_i."""
    x0 = np.asarray(x0, dtype=float)
    if np.any(x0 < -STATE_TOL) or abs(float(x0.sum()) - 1.0) > STATE_TOL:
        return math.inf
    x0 = np.clip(x0, 0.0, None)
    q = np.where(np.asarray(q, dtype=float) <= MINOR_UNDERFLOW, 0.0, q)
    with np.errstate(divide="ignore"):
        return max(0.0, float(np.sum(xlogy(x0, x0) - xlogy(x0, q))))


def _block(h: GroupElement | np.ndarray) -> np.ndarray:
    if isinstance(h, GroupElement):
        return np.asarray(h.blocks[0])
    return np.asarray(h, dtype=complex)


def rate_keyl_closed(
    rho: np.ndarray, h: GroupElement | np.ndarray, x0: Sequence[float]
) -> float:
    """Σ x0_i ln x0_i − x0_i ln(Δ_i(h*ρh)/Δ_{i−1}(h*ρh)) for the standard representation."""
    rho = validate_state(rho)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (rho.shape[0],):
        raise ValueError(f"x0 has {x0.size} entries, state has dimension {rho.shape[0]}")
    hb = _block(h)
    sigma = hb.conj().T @ rho @ hb
    minors = leading_minors(sigma).real
    q = np.zeros(len(x0))
    for i in range(len(x0)):
        if minors[i] > MINOR_UNDERFLOW:
            q[i] = minors[i + 1] / minors[i]
    return _relative_entropy(x0, q)


def _as_probability_vector(rep: RepresentationSpec | None, x0: Sequence[float]) -> np.ndarray:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    match rep:
        case Spin(two_j=1):
            return np.array([0.5 + x0[0], 0.5 - x0[0]])
        case None | Standard():
            return x0
    raise UnsupportedRep(f"no spectrum rate for {rep!r}")


def rate_keyl_werner(
    rho: np.ndarray, x0: Sequence[float], rep: RepresentationSpec | None = None
) -> float:
    """Contracted rate of spectrum estimation: KL(x0 ‖ nonincreasing spectrum of ρ).

    For Spin(1/2) the chamber scalar s stands for the spectrum (1/2 + s, 1/2 − s).
    """
    rho = validate_state(rho)
    spectrum = np.linalg.eigvalsh(rho)[::-1]
    x0 = _as_probability_vector(rep, x0)
    if x0.shape != spectrum.shape:
        raise ValueError(f"x0 has {x0.size} entries, state has dimension {spectrum.size}")
    return _relative_entropy(x0, spectrum)


def rate_cramer(
    weight_probs: Mapping[int | tuple[int, ...], float],
    x: float | Sequence[float],
    opts: OptimizerOptions | None = None,
) -> RateResult:
    """sup_α ⟨x, α⟩ − ln Σ r_n e^{⟨n, α⟩} for a finitely supported law on ℤ^d."""
    opts = opts or OptimizerOptions()
    items = [
        (np.atleast_1d(np.asarray(n, dtype=float)), float(p)) for n, p in weight_probs.items()
    ]
    probs = np.array([p for _, p in items])
    if np.any(probs < -STATE_TOL) or abs(float(probs.sum()) - 1.0) > STATE_TOL:
        raise ValueError("weight probabilities must be nonnegative and sum to one")
    support = np.array([n for n, p in items if p > 0.0])
    probs = probs[probs > 0.0]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    evaluations = 0

    def objective(alpha: np.ndarray) -> tuple[float, np.ndarray]:
        nonlocal evaluations
        evaluations += 1
        exps = support @ alpha
        log_m = float(logsumexp(exps, b=probs))
        tilted = probs * np.exp(exps - log_m)
        return float(x @ alpha) - log_m, x - tilted @ support

    polytope = WeightPolytope.from_points(support)
    outside = _outside(polytope, x, objective, lambda beta: beta, opts)
    if outside is not None:
        return _diverged_result(outside, "cramer", evaluations, True)
    ascent = _ascend(objective, len(x), dataclasses.replace(opts, restarts=0))
    return _result(
        ascent,
        method="cramer",
        evaluations=evaluations,
        boundary=polytope.on_boundary(x),
        faithful=True,
    )


def weight_distribution(rep: RepresentationSpec, rho: np.ndarray) -> dict[tuple[int, ...], float]:
    """Law of the torus weight r_n = Tr P_n ρ for a torus representation or its power."""
    match rep:
        case TorusRep() | Power(base=TorusRep()):
            pass
        case _:
            raise UnsupportedRep("weight distributions need a torus representation")
    rho = _checked_state(rep, rho)
    diag = np.diag(rho).real
    out: dict[tuple[int, ...], float] = {}
    for row, p in zip(basis_weights(rep), diag, strict=True):
        key = tuple(int(c) for c in row)
        out[key] = out.get(key, 0.0) + float(p)
    return out


def _dominant_transform(rep: RepresentationSpec) -> np.ndarray:
    """Map from nonnegative chamber increments δ to dominant flat α."""
    match rep:
        case Standard(d=d):
            return -np.tril(np.ones((d, d - 1)), -1)
        case Spin():
            return np.ones((1, 1))
    raise UnsupportedRep("maximally mixed rates need Spin(j) or Standard(d)")


def rate_maximally_mixed(rep: RepresentationSpec, x0: Sequence[float]) -> float:
    """sup over dominant α of ⟨x0, α⟩ − ln(Tr π(e^α)/dim), capped at ALPHA_CAP per increment."""
    transform = _dominant_transform(rep)
    points = weight_points(rep)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if not weight_data(rep).polytope.contains(x0):
        return math.inf
    log_dim = math.log(rep.dim)

    def negated(delta: np.ndarray) -> tuple[float, np.ndarray]:
        alpha = transform @ delta
        exps = points @ alpha
        lse = float(logsumexp(exps))
        tilted = np.exp(exps - lse)
        value = float(x0 @ alpha) - lse + log_dim
        return -value, -(transform.T @ (x0 - tilted @ points))

    k = transform.shape[1]
    if k == 0:
        return max(0.0, -negated(np.zeros(0))[0])
    res = minimize(
        negated,
        np.full(k, 0.5),
        jac=True,
        method="L-BFGS-B",
        bounds=[(0.0, ALPHA_CAP)] * k,
        options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": MAX_ITERATIONS},
    )
    return max(0.0, -float(res.fun))


def _strip_trailing_zeros(x: Sequence[float]) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nonzero = np.flatnonzero(np.abs(x) > STATE_TOL)
    return x[: nonzero[-1] + 1] if nonzero.size else x[:0]


def rate_bipartite_pure(
    psi: np.ndarray,
    h1: GroupElement | np.ndarray,
    h2: GroupElement | np.ndarray,
    x0: Sequence[float],
    x0_second: Sequence[float] | None = None,
) -> float:
    """Local-spectra rate of a pure bipartite state ψ (d1 x d2, unit Frobenius norm).

    Σ x0_i ln x0_i − x0_i ln|Δ_i(M)/Δ_{i−1}(M)|² with M = h1*ψ conj(h2). Infinite when
    the two local chamber vectors differ beyond trailing zeros.
    """
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 2 or abs(float(np.linalg.norm(psi)) - 1.0) > STATE_TOL:
        raise NotAState("psi must be a matrix with unit Frobenius norm")
    first = _strip_trailing_zeros(x0)
    second = first if x0_second is None else _strip_trailing_zeros(x0_second)
    if first.shape != second.shape or not np.allclose(first, second, atol=STATE_TOL, rtol=0):
        return math.inf
    rank = len(first)
    if rank > min(psi.shape):
        return math.inf
    m = _block(h1).conj().T @ psi @ _block(h2).conj()
    minors = leading_minors(m)
    q = np.zeros(rank)
    for i in range(rank):
        if abs(minors[i]) > MINOR_UNDERFLOW:
            q[i] = abs(minors[i + 1] / minors[i]) ** 2
    return _relative_entropy(first, q)


# ---------------------------------------------------------------------------
# Contraction, tilting and witnesses
# ---------------------------------------------------------------------------


def _matrix_coordinates(spec: GroupSpec) -> list[int]:
    out = []
    for f, sl in zip(spec.factors, spec.algebra_slices(), strict=True):
        if f.is_matrix:
            out.extend(range(sl.start, sl.stop))
    return out


def _geodesic(h: GroupElement, coords: np.ndarray) -> GroupElement:
    return h @ exp_unitary(AlgebraVector.from_real(h.spec, coords))


def rate_contracted(
    rep: RepresentationSpec,
    rho: np.ndarray,
    x0: Sequence[float],
    opts: OptimizerOptions | None = None,
) -> RateResult:
    """Ĩ_ρ(x0) = inf over h ∈ K of I_ρ(h·x0), each value by rate_AN.

    Starts at the identity, at the chamber frame of J(ρ) and at Haar samples, then
    descends along geodesics h·exp(iΣ c_a E_a) with finite-difference gradients.
    The achieving h is reported as argmin_h.
    """
    opts = opts or OptimizerOptions()
    rho = _checked_state(rep, rho)
    spec = rep.group()
    x0_dual = DualVector.from_flat(spec, np.asarray(x0, dtype=float))
    inner_opts = dataclasses.replace(opts, restarts=min(opts.restarts, 1))
    evaluations = 0

    def evaluate(h: GroupElement) -> RateResult:
        nonlocal evaluations
        result = rate_AN(rep, rho, coadjoint(h, x0_dual), inner_opts)
        evaluations += result.evaluations
        return result

    identity = GroupElement.identity(spec)
    if not spec.has_matrix_factors:
        result = evaluate(identity)
        return dataclasses.replace(
            result, method="contracted", argmin_h=identity, evaluations=evaluations
        )

    rng = np.random.default_rng(opts.seed)
    starts = [identity, chamber_decompose(moment_map(rep, rho)).h]
    starts += [haar_sample(spec, rng) for _ in range(max(1, opts.restarts // 4))]
    coords = _matrix_coordinates(spec)
    best_h, best = None, None
    for index, h in enumerate(starts):
        try:
            h, current = _descend(h, evaluate, coords, spec)
        except MaxIterations as exc:
            logger.debug("Contraction start %d skipped: %s", index, exc)
            continue
        logger.debug("Contraction start %d: value %.12g", index, current.value)
        if best is None or current.value < best.value:
            best_h, best = h, current
    if best is None:
        raise MaxIterations("contracted rate: every start failed")
    return dataclasses.replace(best, method="contracted", argmin_h=best_h, evaluations=evaluations)


def _descend(
    h: GroupElement,
    evaluate: Callable[[GroupElement], RateResult],
    coords: list[int],
    spec: GroupSpec,
) -> tuple[GroupElement, RateResult]:
    current = evaluate(h)
    step = 0.5
    for _ in range(CONTRACTION_STEPS):
        if not math.isfinite(current.value):
            break
        grad = np.zeros(spec.compact_dim)
        for i in coords:
            shift = np.zeros(spec.compact_dim)
            shift[i] = CONTRACTION_FD_STEP
            grad[i] = (evaluate(_geodesic(h, shift)).value - current.value) / CONTRACTION_FD_STEP
        norm = float(np.linalg.norm(grad))
        if not math.isfinite(norm) or norm < 1e-7:
            break
        improved = False
        while step > 1e-6:
            trial_h = _geodesic(h, -step * grad / norm)
            trial = evaluate(trial_h)
            if trial.value < current.value - 1e-12:
                h, current, improved = trial_h, trial, True
                step = min(2.0 * step, 1.0)
                break
            step *= 0.5
        if not improved:
            break
    return h, current


def tilt_point(
    rep: RepresentationSpec, rho: np.ndarray, g: GroupElement
) -> tuple[DualVector, float]:
    """Exact point (x, I_ρ(x)) from tilting ρ by g.

    ρ' = π(g)*ρπ(g)/Tr(·), x = g·J(ρ'), value = −ln χ_x(g⁻¹) − ln Tr(π(g)*ρπ(g)).
    """
    rho = _checked_state(rep, rho)
    p = apply(rep, g)
    tilted = p.conj().T @ rho @ p
    trace = float(np.trace(tilted).real)
    x = extended_action(g, moment_map(rep, tilted / trace))
    value = -log_chi(x, g.inverse()) - math.log(trace)
    return x, value


def rate_witness(
    rep: RepresentationSpec, rho: np.ndarray, x: DualVector, g: GroupElement
) -> float:
    """Lower bound −ln χ_x(g⁻¹) − ln Tr(π(g)*ρπ(g)) on I_ρ(x); tight at the supremum over G."""
    rho = _checked_state(rep, rho)
    p = apply(rep, g)
    trace = float(np.trace(p.conj().T @ rho @ p).real)
    return -log_chi(x, g.inverse()) - math.log(trace)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


RATE_METHODS = ("numeric", "an", "keyl", "cramer", "mixed", "contracted", "bipartite")


def _closed_result(value: float, method: str) -> RateResult:
    return RateResult(value=value, certificate=Converged(0.0), method=method)


def _mixed(rep: RepresentationSpec, rho: np.ndarray, x: DualVector) -> float:
    if np.max(np.abs(rho - np.eye(rep.dim) / rep.dim)) > STATE_TOL:
        raise UnsupportedRep("mixed closed form needs the maximally mixed state")
    return rate_maximally_mixed(rep, chamber_decompose(x).sorted_flat())


def _certify_infinite(
    rep: RepresentationSpec, rho: np.ndarray, x: DualVector, method: str, opts: OptimizerOptions
) -> RateResult:
    """Certificate for an infinite closed-form value, measured on the dual objective.

    Raises:
        InvariantViolation: If the dual ascent converges to a finite value.
    """
    numeric = rate_numeric(rep, rho, x, opts)
    if not numeric.is_infinite:
        raise InvariantViolation(
            f"{method} closed form is infinite but the dual ascent converged to "
            f"{numeric.value:.6g}"
        )
    return dataclasses.replace(numeric, method=method)


def _bipartite(rep: RepresentationSpec, rho: np.ndarray, x: DualVector) -> float:
    match rep:
        case TensorProduct(parts=(Standard(d=d1), Standard(d=d2))):
            pass
        case _:
            raise UnsupportedRep("bipartite rates need Standard(d1) x Standard(d2)")
    w, v = np.linalg.eigh(rho)
    if w[-2] > STATE_TOL:
        raise UnsupportedRep("bipartite closed form needs a pure state")
    psi = v[:, -1].reshape(d1, d2)
    cd = chamber_decompose(x)
    flat = cd.sorted_flat()
    return rate_bipartite_pure(psi, cd.h.blocks[0], cd.h.blocks[1], flat[:d1], flat[d1:])


def compute_rate(
    method: str,
    rep: RepresentationSpec,
    rho: np.ndarray,
    x: DualVector,
    opts: OptimizerOptions | None = None,
) -> RateResult:
    """Evaluate the rate at x with a named method.

    Closed forms return a Converged certificate with zero gradient norm. An infinite
    closed-form value takes its certificate from the dual objective: a separating
    direction with measured slope outside the weight polytope, an escaping ascent inside.

    Raises:
        UnsupportedRep: If the closed form does not apply to rep or rho.
    """
    opts = opts or OptimizerOptions()
    rho = _checked_state(rep, rho)
    match method:
        case "numeric":
            return rate_numeric(rep, rho, x, opts)
        case "an":
            return rate_AN(rep, rho, x, opts)
        case "contracted":
            return rate_contracted(rep, rho, chamber_decompose(x).sorted_flat(), opts)
        case "cramer":
            return rate_cramer(weight_distribution(rep, rho), x.diagonal_flat(), opts)
        case "keyl":
            if not isinstance(rep, Standard):
                raise UnsupportedRep("the Keyl closed form needs Standard(d)")
            cd = chamber_decompose(x)
            value = rate_keyl_closed(rho, cd.h, cd.sorted_flat())
        case "mixed":
            value = _mixed(rep, rho, x)
        case "bipartite":
            value = _bipartite(rep, rho, x)
        case _:
            raise ValueError(f"unknown rate method {method!r}; choose from {RATE_METHODS}")
    if math.isinf(value):
        return _certify_infinite(rep, rho, x, method, opts)
    return _closed_result(value, method)
