"""Invariant suites run by `momentrate selftest`.

Each suite draws random instances from a seeded generator, evaluates one identity per
instance and reports the largest residual against its tolerance.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from momentrate.errors import MomentRateError
from momentrate.lie_core import (
    DualVector,
    Factor,
    FactorKind,
    GroupSpec,
    coadjoint,
    ginibre_element,
    haar_sample,
    iwasawa,
    random_algebra,
    random_element,
    torus_element,
)
from momentrate.measurement_sim import (
    RegionSpec,
    empirical_rate,
    exact_mu,
    verify_upper_bound,
)
from momentrate.moment_geometry import (
    chi,
    extended_action,
    log_chi,
    moment_map,
    nonlinear_pairing,
    su2_pairing_closed_form,
)
from momentrate.rate_function import (
    OptimizerOptions,
    rate_AN,
    rate_cramer,
    rate_keyl_closed,
    rate_numeric,
)
from momentrate.representations import (
    RepresentationSpec,
    Spin,
    Standard,
    TorusRep,
    apply,
    highest_weight_vector,
)

logger = logging.getLogger(__name__)

QUBIT_STATE = np.diag([0.7, 0.3]).astype(complex)


@dataclass(frozen=True, slots=True)
class SelftestOptions:
    """Sizes and hooks shared by all suites.

    perturb_iwasawa adds a constant to every reconstructed Iwasawa product; any nonzero
    value must make the iwasawa suite fail.
    """

    trials: int = 100
    seed: int = 0
    perturb_iwasawa: float = 0.0


@dataclass
class SuiteResult:
    """Outcome of one suite."""

    name: str
    tolerance: float
    checks: int = 0
    failures: int = 0
    max_residual: float = 0.0
    errors: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and not self.errors

    def record(self, residual: float, tolerance: float | None = None) -> None:
        """Count one identity check with the given residual."""
        limit = self.tolerance if tolerance is None else tolerance
        self.checks += 1
        if not math.isfinite(residual) or residual > limit:
            self.failures += 1
        self.max_residual = max(self.max_residual, residual)

    def check(self, condition: bool) -> None:
        """Count one qualitative check."""
        self.checks += 1
        if not condition:
            self.failures += 1

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failures": self.failures,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "errors": list(self.errors),
        }


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = z @ z.conj().T + 0.05 * np.eye(dim)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def suite_iwasawa(rng: np.random.Generator, options: SelftestOptions) -> SuiteResult:
    """Iwasawa identities on U(d).

    Checks reconstruction, unitarity of k, agreement of QR with Gram-Schmidt and
    invariance of the A component under right translation by the maximal torus.
    """
    result = SuiteResult("iwasawa", tolerance=1e-10)
    for d in (2, 3, 5):
        spec = GroupSpec.of(Factor.unitary(d))
        for _ in range(options.trials):
            g = ginibre_element(spec, rng)
            qr = iwasawa(g)
            gs = iwasawa(g, method="gram_schmidt")
            k = qr.k.blocks[0]
            recon = qr.reconstruct().blocks[0] + options.perturb_iwasawa
            scale = max(1.0, float(np.max(np.abs(g.blocks[0]))))
            result.record(float(np.max(np.abs(recon - g.blocks[0]))) / scale)
            result.record(float(np.max(np.abs(k @ k.conj().T - np.eye(d)))), tolerance=1e-12)
            result.record(qr.k.distance(gs.k), tolerance=1e-9)
            shifted = iwasawa(g @ torus_element(spec, rng)).alpha.flat()
            result.record(float(np.max(np.abs(shifted - qr.alpha.flat()))), tolerance=1e-9)
    return result


_CHI_GROUPS = (
    GroupSpec.of(Factor.unitary(2)),
    GroupSpec.of(Factor.unitary(3)),
    GroupSpec.of(Factor.su2()),
    GroupSpec.of(Factor.torus(3)),
)


def suite_chi(rng: np.random.Generator, options: SelftestOptions) -> SuiteResult:
    """Multiplicativity, K-invariance, inverse relation and homogeneity of χ."""
    result = SuiteResult("chi", tolerance=1e-9)
    for spec in _CHI_GROUPS:
        for _ in range(options.trials):
            x = DualVector.from_real(spec, rng.standard_normal(spec.compact_dim))
            g1 = random_element(spec, rng, scale=0.5)
            g2 = random_element(spec, rng, scale=0.5)
            k = haar_sample(spec, rng)
            t = float(rng.uniform(0.1, 3.0))
            lhs = log_chi(x, g2 @ g1)
            result.record(_relative(lhs, log_chi(extended_action(g1, x), g2) + log_chi(x, g1)))
            result.record(_relative(log_chi(coadjoint(k, x), g1 @ k.inverse()), log_chi(x, g1)))
            inverse = g1.inverse()
            result.record(
                _relative(log_chi(x, inverse), -log_chi(extended_action(inverse, x), g1))
            )
            result.record(_relative(log_chi(x * t, g1), t * log_chi(x, g1)))
    return result


def suite_highest_weight(rng: np.random.Generator, options: SelftestOptions) -> SuiteResult:
    """π(g)|hv⟩⟨hv|π(g)* = χ_x(g)·|π(k)v⟩⟨π(k)v| with x = h·λ and k = k(gh)."""
    result = SuiteResult("highest_weight", tolerance=1e-9)
    spec = GroupSpec.of(Factor.su2())
    for two_j in (1, 2, 3):
        rep = Spin(two_j)
        v = highest_weight_vector((rep.j,), FactorKind.SU2)
        for _ in range(options.trials):
            g = random_element(spec, rng, scale=0.5)
            h = haar_sample(spec, rng)
            hv = apply(rep, h) @ v
            pg = apply(rep, g)
            lhs = pg @ np.outer(hv, hv.conj()) @ pg.conj().T
            x = coadjoint(h, DualVector.from_flat(spec, np.array([rep.j])))
            kv = apply(rep, iwasawa(g @ h).k) @ v
            rhs = chi(x, g) * np.outer(kv, kv.conj())
            scale = max(1.0, float(np.max(np.abs(lhs))))
            result.record(float(np.max(np.abs(lhs - rhs))) / scale)
    return result


def suite_pairing(rng: np.random.Generator, options: SelftestOptions) -> SuiteResult:
    """Minor-based ⟪x, ξ⟫ against the SU(2) closed form."""
    result = SuiteResult("su2_pairing", tolerance=1e-10)
    spec = GroupSpec.of(Factor.su2())
    for _ in range(options.trials):
        x = DualVector.from_real(spec, rng.standard_normal(spec.compact_dim))
        xi = random_algebra(spec, rng)
        value = nonlinear_pairing(x, xi)
        result.record(_relative(value, su2_pairing_closed_form(x.blocks[0], xi.blocks[0])))
    return result


_ZERO_REPS: tuple[RepresentationSpec, ...] = (
    Standard(2),
    Standard(3),
    Spin(1),
    Spin(2),
    TorusRep.of({0: 1, 1: 1, 2: 1}),
)


def suite_rate_zero(rng: np.random.Generator, options: SelftestOptions) -> SuiteResult:
    """I_ρ(J(ρ)) = 0 for random faithful states."""
    result = SuiteResult("rate_zero", tolerance=1e-8)
    opts = OptimizerOptions(restarts=1)
    for rep in _ZERO_REPS:
        for _ in range(max(2, options.trials // 20)):
            rho = _random_state(rep.dim, rng)
            if isinstance(rep, TorusRep):
                rho = np.diag(np.diag(rho))
            result.record(abs(rate_numeric(rep, rho, moment_map(rep, rho), opts).value))
    return result


def suite_keyl(rng: np.random.Generator, options: SelftestOptions) -> SuiteResult:
    """rate_AN against the principal-minor closed form on U(2) and U(3)."""
    result = SuiteResult("keyl", tolerance=1e-6)
    opts = OptimizerOptions(restarts=1)
    for d in (2, 3):
        rep = Standard(d)
        spec = rep.group()
        for _ in range(max(2, options.trials // 10)):
            rho = _random_state(d, rng)
            h = haar_sample(spec, rng)
            x0 = np.sort(rng.dirichlet(np.ones(d)))[::-1]
            x = coadjoint(h, DualVector.from_flat(spec, x0))
            expected = rate_keyl_closed(rho, h, x0)
            result.record(_relative(rate_AN(rep, rho, x, opts).value, expected))
    return result


def suite_cramer(rng: np.random.Generator, options: SelftestOptions) -> SuiteResult:
    """Cramér transform against a dense grid search over the tilt."""
    result = SuiteResult("cramer", tolerance=1e-3)
    alphas = np.linspace(-20.0, 20.0, 400_001)
    for _ in range(max(2, options.trials // 10)):
        support = np.sort(rng.choice(np.arange(-3, 4), size=3, replace=False))
        probs = rng.dirichlet(np.ones(3))
        x = float(rng.uniform(support[0] + 0.2, support[-1] - 0.2))
        law = {int(n): float(p) for n, p in zip(support, probs, strict=True)}
        log_m = np.log(np.exp(np.outer(alphas, support)) @ probs)
        grid_value = float(np.max(x * alphas - log_m))
        result.record(abs(rate_cramer(law, x).value - grid_value))
    return result


def suite_upper_bound(_rng: np.random.Generator, _options: SelftestOptions) -> SuiteResult:
    """Exact μ_m(F) never exceeds (m+1)^{D(D+1)/2} e^{−m inf I}."""
    result = SuiteResult("upper_bound", tolerance=0.0)
    cases = [
        (Standard(2), QUBIT_STATE, RegionSpec.half_space([1.0, 0.0], a), list(range(2, 13)))
        for a in (0.8, 0.9, 0.95)
    ]
    cases.append(
        (
            TorusRep.of({0: 1, 1: 1}),
            np.eye(2, dtype=complex) / 2,
            RegionSpec.half_space([1.0], 0.8),
            list(range(2, 61)),
        )
    )
    for rep, rho, region, m_list in cases:
        for row in verify_upper_bound(rep, rho, m_list, region):
            result.record(max(0.0, row.upper - row.rhs))
    return result


def suite_lln(_rng: np.random.Generator, _options: SelftestOptions) -> SuiteResult:
    """μ_m of the radius-0.15 chamber ball around J(ρ) grows and passes 0.9."""
    result = SuiteResult("lln", tolerance=0.0)
    region = RegionSpec.chamber_ball([0.7, 0.3], 0.15)
    mus = [exact_mu(Standard(2), QUBIT_STATE, m, region) for m in (50, 100, 200)]
    for a, b in itertools.pairwise(mus):
        result.check(b > a)
    result.check(mus[-1] > 0.9)
    return result


def suite_decay(_rng: np.random.Generator, _options: SelftestOptions) -> SuiteResult:
    """Exact Bernoulli tail rates decrease to the Kullback–Leibler divergence."""
    result = SuiteResult("decay", tolerance=0.02)
    a, p = 0.6, 0.3
    kl = a * math.log(a / p) + (1 - a) * math.log((1 - a) / (1 - p))
    rho = np.diag([1 - p, p]).astype(complex)
    rows = empirical_rate(
        TorusRep.of({0: 1, 1: 1}), rho, RegionSpec.half_space([1.0], a), [50, 100, 150, 200]
    )
    rates = [row.rate for row in rows]
    for earlier, later in itertools.pairwise(rates):
        result.check(later < earlier)
    result.check(rates[-1] >= kl)
    result.record(rates[-1] - kl)
    return result


SUITES: dict[str, Callable[[np.random.Generator, SelftestOptions], SuiteResult]] = {
    "iwasawa": suite_iwasawa,
    "chi": suite_chi,
    "highest_weight": suite_highest_weight,
    "su2_pairing": suite_pairing,
    "rate_zero": suite_rate_zero,
    "keyl": suite_keyl,
    "cramer": suite_cramer,
    "upper_bound": suite_upper_bound,
    "lln": suite_lln,
    "decay": suite_decay,
}


def run_selftest(
    names: list[str] | None = None, options: SelftestOptions | None = None
) -> list[SuiteResult]:
    """Run the named suites (all by default); exceptions become failed suites."""
    options = options or SelftestOptions()
    names = names or list(SUITES)
    unknown = set(names) - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suites {sorted(unknown)}; choose from {list(SUITES)}")
    results = []
    for index, name in enumerate(names):
        rng = np.random.default_rng([options.seed, index])
        started = time.monotonic()
        try:
            suite = SUITES[name](rng, options)
        except (MomentRateError, np.linalg.LinAlgError) as exc:
            logger.error("Suite %s raised %s: %s", name, type(exc).__name__, exc)
            suite = SuiteResult(name, tolerance=0.0, errors=[f"{type(exc).__name__}: {exc}"])
        logger.info(
            "Suite %s: %s (%d checks, max residual %.3e) in %.1fs",
            name,
            "passed" if suite.passed else "FAILED",
            suite.checks,
            suite.max_residual,
            time.monotonic() - started,
        )
        results.append(suite)
    return results
