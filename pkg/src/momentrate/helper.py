"""Shared helper utilities for MomentRate."""

import math
from collections.abc import Sequence

import numpy as np
from scipy import stats

from momentrate.constants import CONFIDENCE_LEVEL, HERMITIAN_TOL, STATE_TOL
from momentrate.errors import NotAState


def is_hermitian(matrix: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    """Check Hermiticity in the max norm, relative to the matrix scale."""
    scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol * scale)


def hermitian_part(matrix: np.ndarray) -> np.ndarray:
    """Return (A + A*)/2."""
    return 0.5 * (matrix + matrix.conj().T)


def validate_state(rho: np.ndarray, tol: float = STATE_TOL) -> np.ndarray:
    """Validate a density matrix and return it as a Hermitian complex array.

    Args:
        rho: Candidate density matrix
        tol: Tolerance for Hermiticity, positivity and unit trace

    Returns:
        The symmetrized complex matrix.

    Raises:
        NotAState: If rho is not square, not Hermitian, has a negative eigenvalue
            below -tol or a trace differing from one by more than tol.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotAState(f"state must be a square matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise NotAState("state has non-finite entries")
    if not is_hermitian(rho, tol):
        raise NotAState("state is not Hermitian")
    rho = hermitian_part(rho)
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > tol:
        raise NotAState(f"state trace is {trace!r}, expected 1")
    smallest = float(np.linalg.eigvalsh(rho)[0])
    if smallest < -tol:
        raise NotAState(f"state has negative eigenvalue {smallest!r}")
    return rho


def is_faithful(rho: np.ndarray, tol: float = STATE_TOL) -> bool:
    """Whether the state has full rank."""
    return bool(np.linalg.eigvalsh(rho)[0] > tol)


def leading_minors(matrix: np.ndarray) -> np.ndarray:
    """Leading principal minors Δ_0 = 1, Δ_1, ..., Δ_d, d = min(rows, cols)."""
    d = min(matrix.shape)
    minors = np.ones(d + 1, dtype=complex)
    for i in range(1, d + 1):
        minors[i] = np.linalg.det(matrix[:i, :i])
    return minors


# ---------------------------------------------------------------------------
# JSON codec for complex data
# ---------------------------------------------------------------------------


def encode_complex_matrix(matrix: np.ndarray) -> list:
    """Encode a complex array as nested [re, im] pairs, row-major."""
    matrix = np.asarray(matrix, dtype=complex)
    return np.stack([matrix.real, matrix.imag], axis=-1).tolist()


def decode_complex_matrix(data: Sequence) -> np.ndarray:
    """Decode nested [re, im] pairs into a complex array.

    Raises:
        ValueError: If the innermost dimension is not a pair.
    """
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def format_float(value: float) -> str:
    """Shortest round-trip representation, with 'inf' for infinities."""
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(float(value))


def json_number(value: float) -> float | str:
    """JSON-safe float: non-finite values become strings."""
    return float(value) if math.isfinite(value) else format_float(value)


# ---------------------------------------------------------------------------
# Statistics and parsing
# ---------------------------------------------------------------------------


def wilson_interval(
    hits: int, trials: int, confidence: float = CONFIDENCE_LEVEL
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Args:
        hits: Number of successes
        trials: Number of trials, positive
        confidence: Two-sided confidence level

    Returns:
        Tuple of (low, high), clipped to [0, 1].
    """
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    p_hat = hits / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def parse_int_list(text: str) -> list[int]:
    """Parse '2,4,8' or '2:12' (inclusive range) or '2:12:2' into a list of ints."""
    text = text.strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) == 2:
            start, stop, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            start, stop, step = parts
        else:
            raise ValueError(f"invalid range {text!r}")
        if step <= 0:
            raise ValueError("range step must be positive")
        return list(range(start, stop + 1, step))
    return [int(p) for p in text.split(",") if p.strip()]


def parse_grid(text: str) -> list[np.ndarray]:
    """Parse a chamber grid spec 'start:stop:count[,start:stop:count...]'.

    Each comma-separated axis yields count equally spaced points including both ends.
    """
    axes = []
    for axis in text.split(","):
        parts = axis.strip().split(":")
        if len(parts) != 3:
            raise ValueError(f"grid axis must be start:stop:count, got {axis!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("grid count must be at least 1")
        axes.append(np.linspace(start, stop, count))
    return axes
