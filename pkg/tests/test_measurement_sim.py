"""Tests for the covariant measurement simulator and the measures μ_m."""

import math

import numpy as np
import pytest
from scipy import stats

from momentrate.errors import EnvelopeOverflow, SamplerTimeout, TooLarge, UnsupportedRep
from momentrate.measurement_sim import (
    Family,
    MeasurementOutcome,
    MeasurementSampler,
    QubitFrame,
    RegionKind,
    RegionSpec,
    direction_bin_probabilities,
    empirical_rate,
    estimate_mu,
    exact_mu,
    infimum_rate,
    isotypic_probabilities,
    label_point,
    orbit_density_rate,
    qubit_label,
    run_simulation,
    sample_measurement,
    sample_measurements,
    sample_orbit_direction,
    system_family,
    upper_bound_rhs,
    verify_upper_bound,
)
from momentrate.representations import Spin, Standard


def kl(p, q):
    return sum(a * math.log(a / b) for a, b in zip(p, q, strict=True) if a > 0)


class TestFamilies:
    """Tests for system classification and labels."""

    def test_families(self, qubit_rep, bernoulli_rep):
        """Qubits under U(2) or SU(2), and torus representations, are supported."""
        assert system_family(qubit_rep) is Family.QUBIT
        assert system_family(Spin(1)) is Family.QUBIT
        assert system_family(bernoulli_rep) is Family.TORUS

    def test_unsupported(self):
        """Larger systems are rejected."""
        with pytest.raises(UnsupportedRep):
            system_family(Standard(3))
        with pytest.raises(UnsupportedRep):
            system_family(Spin(2))

    def test_labels(self):
        """U(2) labels are partitions, SU(2) labels are 2j."""
        assert qubit_label(Standard(2), 6, 2) == (4, 2)
        assert qubit_label(Spin(1), 6, 2) == (2,)
        assert np.allclose(label_point(Standard(2), 6, (4, 2)), [4 / 6, 2 / 6])
        assert np.allclose(label_point(Spin(1), 6, (2,)), [1 / 6])


class TestIsotypicProbabilities:
    """Tests for isotypic_probabilities function."""

    def test_two_maximally_mixed_qubits(self):
        """Triplet and singlet carry 3/4 and 1/4."""
        rho = np.eye(2) / 2
        for method in ("projector", "closed"):
            probs = isotypic_probabilities(Spin(1), rho, 2, method)
            assert probs == pytest.approx({(2,): 0.75, (0,): 0.25})

    @pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
    def test_closed_matches_projector(self, m, random_state):
        """The closed form agrees with explicit projectors."""
        rho = random_state(2)
        closed = isotypic_probabilities(Standard(2), rho, m, "closed")
        projected = isotypic_probabilities(Standard(2), rho, m, "projector")
        assert closed.keys() == projected.keys()
        for label, value in closed.items():
            assert projected[label] == pytest.approx(value, abs=1e-12)

    def test_sums_to_one(self, qubit_state):
        """Probabilities form a distribution at large m."""
        probs = isotypic_probabilities(Standard(2), qubit_state, 500)
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-10)
        assert all(p >= 0 for p in probs.values())

    def test_pure_state(self):
        """A pure state lives in the symmetric block."""
        rho = np.diag([1.0, 0.0])
        probs = isotypic_probabilities(Standard(2), rho, 6)
        assert probs[(6, 0)] == pytest.approx(1.0)

    def test_torus_is_binomial(self, bernoulli_rep, bernoulli_state):
        """Bernoulli powers give binomial weights."""
        probs = isotypic_probabilities(bernoulli_rep, bernoulli_state(0.3), 10)
        for k in range(11):
            assert probs[(k,)] == pytest.approx(stats.binom.pmf(k, 10, 0.3), abs=1e-14)

    def test_limits(self, qubit_state):
        """m must be positive and bounded for the closed form."""
        with pytest.raises(ValueError):
            isotypic_probabilities(Standard(2), qubit_state, 0)
        with pytest.raises(TooLarge):
            isotypic_probabilities(Standard(2), qubit_state, 2001, "closed")
        with pytest.raises(ValueError, match="unknown probability method"):
            isotypic_probabilities(Standard(2), qubit_state, 3, "magic")


class TestQubitFrame:
    """Tests for QubitFrame and the direction law."""

    def test_from_state(self, qubit_state):
        """Eigenvalues sorted with the top eigenvector first."""
        frame = QubitFrame.from_state(qubit_state)
        assert frame.p == pytest.approx(0.7)
        assert frame.q == pytest.approx(0.3)
        assert frame.alignment(np.array([1.0, 0.0])) == pytest.approx(1.0)

    @pytest.mark.parametrize("two_j", [0, 1, 4, 30])
    def test_density_normalized(self, qubit_state, two_j):
        """The direction law integrates to one."""
        assert QubitFrame.from_state(qubit_state).mass(two_j, 0.0, 1.0) == pytest.approx(1.0)

    def test_expected_acceptance_matches_integral(self, qubit_state):
        """Mean acceptance under Haar is (1 − r^{n+1}) / ((n + 1)(1 − r))."""
        frame = QubitFrame.from_state(qubit_state)
        nodes, weights = np.polynomial.legendre.leggauss(20)
        c = 0.5 * (nodes + 1.0)
        mean = 0.5 * float(np.sum(weights * frame.acceptance(c, 5)))
        assert frame.expected_acceptance(5) == pytest.approx(mean)

    def test_maximally_mixed_accepts_everything(self):
        """Equal eigenvalues give the Haar law."""
        frame = QubitFrame.from_state(np.eye(2) / 2)
        assert frame.expected_acceptance(7) == 1.0


class TestSampleOrbitDirection:
    """Tests for sample_orbit_direction function."""

    def test_shapes_and_unitarity(self, qubit_state, rng):
        """Samples are 2x2 unitaries; special ones have unit determinant."""
        frame = QubitFrame.from_state(qubit_state)
        h = sample_orbit_direction(frame, 3, rng, size=50, special=True)
        assert h.shape == (50, 2, 2)
        assert np.allclose(h.conj().transpose(0, 2, 1) @ h, np.eye(2), atol=1e-12)
        assert np.allclose(np.linalg.det(h), 1.0)

    def test_alignment_distribution(self, qubit_state):
        """Accepted c values follow ((q + (p − q)c)^{n+1} − q^{n+1}) / (p^{n+1} − q^{n+1})."""
        frame = QubitFrame.from_state(qubit_state)
        n, p, q = 4, 0.7, 0.3
        h = sample_orbit_direction(frame, n, np.random.default_rng(7), size=4000)
        c = frame.alignment(h[:, :, 0])

        def cdf(t):
            return ((q + (p - q) * t) ** (n + 1) - q ** (n + 1)) / (p ** (n + 1) - q ** (n + 1))

        assert stats.kstest(c, cdf).pvalue > 0.001

    def test_envelope_overflow(self, rng):
        """A frame with inverted spectrum breaks the envelope."""
        frame = QubitFrame(p=0.3, q=0.7, vectors=np.eye(2, dtype=complex))
        with pytest.raises(EnvelopeOverflow):
            sample_orbit_direction(frame, 4, rng, size=100)

    def test_timeout_on_tiny_acceptance(self, rng):
        """Acceptance rates below the floor are refused up front."""
        frame = QubitFrame.from_state(np.diag([1.0, 0.0]))
        with pytest.raises(SamplerTimeout):
            sample_orbit_direction(frame, 2_000_000, rng)


class TestMeasurementSampler:
    """Tests for MeasurementSampler and the sampling wrappers."""

    def test_outcome_points(self, qubit_rep, qubit_state, rng):
        """x = h·(λ/m) has the chamber point as spectrum."""
        batch = sample_measurements(qubit_rep, qubit_state, 5, 200, rng)
        assert len(batch) == 200
        eig = np.linalg.eigvalsh(batch.matrices)[:, ::-1]
        assert np.allclose(eig, batch.chamber, atol=1e-12)
        assert np.allclose(np.trace(batch.matrices, axis1=1, axis2=2), 1.0)

    def test_single_outcome(self, qubit_state, rng):
        """sample_measurement materializes one outcome."""
        outcome = sample_measurement(Spin(1), qubit_state, 4, rng)
        assert isinstance(outcome, MeasurementOutcome)
        assert outcome.m == 4
        assert outcome.label[0] in (0, 2, 4)
        assert np.trace(outcome.x.blocks[0]) == pytest.approx(0.0, abs=1e-12)
        assert outcome.direction.is_unitary()

    def test_torus_outcomes(self, bernoulli_rep, bernoulli_state, rng):
        """Torus outcomes carry no direction."""
        sampler = MeasurementSampler(bernoulli_rep, bernoulli_state(0.3), 20)
        batch = sampler.sample(100, rng)
        assert batch.directions is None
        assert np.all((batch.chamber >= 0) & (batch.chamber <= 1))
        outcome = sampler.outcome(batch, 0)
        assert outcome.weight_prob == pytest.approx(
            stats.binom.pmf(outcome.label[0], 20, 0.3), abs=1e-14
        )

    def test_direction_bins_chi_square(self, qubit_rep, qubit_state):
        """Joint (λ, cos θ) frequencies match the exact bin probabilities."""
        m, bins, n = 6, 10, 20000
        expected = direction_bin_probabilities(qubit_rep, qubit_state, m, bins)
        batch = MeasurementSampler(qubit_rep, qubit_state, m).sample(
            n, np.random.default_rng(11)
        )
        index = {key: i for i, key in enumerate(expected)}
        counts = np.zeros(len(index))
        cells = np.minimum((batch.alignment * bins).astype(int), bins - 1)
        for label, cell in zip(batch.labels, cells, strict=True):
            counts[index[(tuple(int(v) for v in label), int(cell))]] += 1
        probs = np.array(list(expected.values()))
        f_exp = probs / probs.sum() * n
        assert stats.chisquare(counts, f_exp).pvalue > 0.001

    def test_direction_bins_sum_to_one(self, qubit_state):
        """Bin probabilities form a distribution."""
        probs = direction_bin_probabilities(Spin(1), qubit_state, 7, bins=5)
        assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)

    def test_direction_bins_need_qubits(self, bernoulli_rep, bernoulli_state):
        """Torus systems have no directions."""
        with pytest.raises(UnsupportedRep):
            direction_bin_probabilities(bernoulli_rep, bernoulli_state(0.5), 3)


class TestRegionSpec:
    """Tests for RegionSpec."""

    def test_parse_describe(self):
        """describe produces text that parse accepts."""
        region = RegionSpec.parse("complement:half_space:1,0:0.8")
        assert region.kind is RegionKind.COMPLEMENT
        assert region.describe() == "complement:half_space:1.0,0.0:0.8"
        assert RegionSpec.parse(region.describe()).describe() == region.describe()

    def test_parse_ball(self):
        """Ball centers are comma-separated coordinates."""
        region = RegionSpec.parse("ball:0.7,0.3:0.2")
        assert region.needs_direction
        assert np.allclose(region.center, [0.7, 0.3])
        assert region.radius == 0.2

    def test_parse_errors(self):
        """Unknown kinds and malformed fields are ValueErrors."""
        with pytest.raises(ValueError):
            RegionSpec.parse("triangle:1")
        with pytest.raises(ValueError):
            RegionSpec.parse("chamber_ball:0.5")

    def test_radius_must_be_positive(self):
        """Balls need a positive radius."""
        with pytest.raises(ValueError):
            RegionSpec.chamber_ball([0.5], 0.0)

    def test_contains(self):
        """Membership of chamber points."""
        chamber = np.array([[0.9, 0.1], [0.6, 0.4]])
        half = RegionSpec.half_space([1.0, 0.0], 0.8)
        assert half.contains(chamber).tolist() == [True, False]
        assert RegionSpec.complement(half).contains(chamber).tolist() == [False, True]
        assert RegionSpec.everything().contains(chamber).all()

    def test_ball_uses_trace_norm(self):
        """Ball membership compares full matrices when available."""
        region = RegionSpec.ball([0.7, 0.3], 0.1)
        chamber = np.array([[0.7, 0.3]])
        aligned = np.diag([0.7, 0.3]).astype(complex)[None]
        swapped = np.diag([0.3, 0.7]).astype(complex)[None]
        assert region.contains(chamber, aligned)[0]
        assert not region.contains(chamber, swapped)[0]

    def test_chamber_relaxation(self):
        """Direction-dependent regions relax to chamber regions."""
        spin = RegionSpec.ball([-0.2], 0.2).chamber_relaxation(Spin(1))
        assert spin.kind is RegionKind.CHAMBER_BALL
        assert spin.norm == 1
        assert np.allclose(spin.center, [0.2])
        assert spin.radius == pytest.approx(0.1)
        qubit = RegionSpec.ball([0.3, 0.7], 0.1).chamber_relaxation(Standard(2))
        assert np.allclose(qubit.center, [0.7, 0.3])
        outside_ball = RegionSpec.complement(RegionSpec.ball([0.7, 0.3], 0.1))
        assert outside_ball.chamber_relaxation(Standard(2)).kind is RegionKind.EVERYTHING


class TestExactMeasure:
    """Tests for exact_mu and Monte Carlo agreement."""

    def test_everything(self, qubit_rep, qubit_state):
        """The whole outcome space has measure one."""
        assert exact_mu(qubit_rep, qubit_state, 5, RegionSpec.everything()) == pytest.approx(1.0)

    def test_torus_tail(self, bernoulli_rep, bernoulli_state):
        """Half-space measures of Bernoulli powers are binomial tails."""
        region = RegionSpec.half_space([1.0], 0.8)
        mu = exact_mu(bernoulli_rep, bernoulli_state(0.5), 10, region)
        assert mu == pytest.approx(stats.binom.sf(7, 10, 0.5))

    def test_complement(self, qubit_rep, qubit_state):
        """μ(A) + μ(Aᶜ) = 1."""
        region = RegionSpec.half_space([1.0, 0.0], 0.75)
        total = exact_mu(qubit_rep, qubit_state, 8, region) + exact_mu(
            qubit_rep, qubit_state, 8, RegionSpec.complement(region)
        )
        assert total == pytest.approx(1.0)

    def test_monte_carlo_half_space(self, qubit_rep, qubit_state):
        """Monte Carlo frequencies match the exact chamber measure."""
        region = RegionSpec.half_space([1.0, 0.0], 0.8)
        exact = exact_mu(qubit_rep, qubit_state, 10, region)
        estimate = estimate_mu(qubit_rep, qubit_state, 10, region, 20000, seed=3)
        sigma = math.sqrt(exact * (1 - exact) / 20000)
        assert abs(estimate.p_hat - exact) <= 4.5 * sigma
        assert estimate.low <= estimate.p_hat <= estimate.high

    def test_monte_carlo_ball(self, qubit_rep, qubit_state):
        """Direction-dependent measures agree with the quadrature oracle."""
        region = RegionSpec.ball([0.7, 0.3], 0.3)
        exact = exact_mu(qubit_rep, qubit_state, 6, region)
        estimate = estimate_mu(qubit_rep, qubit_state, 6, region, 20000, seed=5)
        sigma = math.sqrt(exact * (1 - exact) / 20000)
        assert abs(estimate.p_hat - exact) <= 4.5 * sigma + 0.01

    def test_estimate_is_reproducible(self, qubit_rep, qubit_state):
        """Same seed and workers give the same estimate."""
        region = RegionSpec.chamber_ball([0.7, 0.3], 0.15)
        a = estimate_mu(qubit_rep, qubit_state, 6, region, 2000, seed=9, workers=2)
        b = estimate_mu(qubit_rep, qubit_state, 6, region, 2000, seed=9, workers=2)
        assert a == b

    def test_estimate_everything_short_circuits(self, qubit_rep, qubit_state):
        """The full space needs no sampling."""
        estimate = estimate_mu(qubit_rep, qubit_state, 6, RegionSpec.everything(), 10)
        assert estimate.p_hat == 1.0

    def test_estimate_needs_samples(self, qubit_rep, qubit_state):
        """At least one sample is required."""
        with pytest.raises(ValueError):
            estimate_mu(qubit_rep, qubit_state, 6, RegionSpec.half_space([1, 0], 0.8), 0)


class TestRates:
    """Tests for infimum_rate, bounds and decay."""

    def test_infimum_on_half_space(self, qubit_rep, qubit_state):
        """The infimum sits on the boundary closest to the spectrum."""
        value, point = infimum_rate(qubit_rep, qubit_state, RegionSpec.half_space([1, 0], 0.9))
        assert value == pytest.approx(kl([0.9, 0.1], [0.7, 0.3]), abs=1e-8)
        assert np.allclose(point, [0.9, 0.1], atol=1e-6)

    def test_infimum_zero_when_region_holds_moment_map(self, qubit_rep, qubit_state):
        """Regions containing J(ρ) have zero infimum."""
        value, _ = infimum_rate(
            qubit_rep, qubit_state, RegionSpec.chamber_ball([0.7, 0.3], 0.15)
        )
        assert value == pytest.approx(0.0, abs=1e-10)

    def test_infimum_spin(self, qubit_state):
        """Spin 1/2 infimum in chamber coordinates s."""
        value, point = infimum_rate(Spin(1), qubit_state, RegionSpec.half_space([1.0], 0.4))
        assert value == pytest.approx(kl([0.9, 0.1], [0.7, 0.3]), abs=1e-8)
        assert point[0] == pytest.approx(0.4, abs=1e-6)

    def test_infimum_empty_region(self, qubit_rep, qubit_state):
        """Regions without chamber points have infinite infimum."""
        value, point = infimum_rate(qubit_rep, qubit_state, RegionSpec.half_space([1, 0], 2.0))
        assert math.isinf(value)
        assert point is None

    def test_upper_bound_rhs(self):
        """(m+1)^{D(D+1)/2} e^{−m·inf I}."""
        assert upper_bound_rhs(1, 2, 0.0) == pytest.approx(8.0)
        assert upper_bound_rhs(4, 2, 0.5) == pytest.approx(125 * math.exp(-2.0))
        assert upper_bound_rhs(4, 2, math.inf) == 0.0

    @pytest.mark.parametrize("offset", [0.8, 0.9, 0.95])
    def test_qubit_upper_bound(self, qubit_rep, qubit_state, offset):
        """Exact μ_m never exceeds the non-asymptotic bound."""
        rows = verify_upper_bound(
            qubit_rep, qubit_state, list(range(2, 13)), RegionSpec.half_space([1, 0], offset)
        )
        assert all(row.passed and row.exact for row in rows)
        assert all(row.rhs > 1.0 for row in rows)

    def test_bernoulli_upper_bound(self, bernoulli_rep, bernoulli_state):
        """The bound holds for Bernoulli tails up to m = 60."""
        rows = verify_upper_bound(
            bernoulli_rep,
            bernoulli_state(0.5),
            list(range(2, 61)),
            RegionSpec.half_space([1.0], 0.8),
        )
        assert all(row.passed for row in rows)
        assert rows[0].inf_rate == pytest.approx(kl([0.8, 0.2], [0.5, 0.5]), abs=1e-7)

    def test_monte_carlo_upper_bound(self, qubit_rep, qubit_state):
        """Monte Carlo rows compare the upper Wilson limit."""
        rows = verify_upper_bound(
            qubit_rep,
            qubit_state,
            [4, 8],
            RegionSpec.half_space([1, 0], 0.9),
            n_samples=2000,
        )
        assert all(not row.exact and row.upper >= row.mu for row in rows)
        assert all(row.passed for row in rows)

    def test_bernoulli_decay_approaches_kl_from_above(self, bernoulli_rep, bernoulli_state):
        """Tail rates exceed KL, decrease in m and come within 0.02 by m = 200."""
        target = kl([0.6, 0.4], [0.3, 0.7])
        rows = empirical_rate(
            bernoulli_rep,
            bernoulli_state(0.3),
            RegionSpec.half_space([1.0], 0.6),
            [50, 100, 150, 200],
        )
        rates = [row.rate for row in rows]
        assert all(rate >= target for rate in rates)
        assert all(b < a for a, b in zip(rates, rates[1:], strict=False))
        assert rates[-1] - target <= 0.02

    def test_monte_carlo_decay_without_hits(self, bernoulli_rep, bernoulli_state):
        """Runs without hits report a lower bound."""
        rows = empirical_rate(
            bernoulli_rep,
            bernoulli_state(0.1),
            RegionSpec.half_space([1.0], 0.9),
            [40],
            n_samples=200,
        )
        assert rows[0].lower_bound
        assert rows[0].mu == 0.0
        assert math.isfinite(rows[0].rate)

    def test_law_of_large_numbers(self, qubit_rep, qubit_state):
        """μ_m of a ball around J(ρ) grows towards one."""
        region = RegionSpec.chamber_ball([0.7, 0.3], 0.15)
        mus = [exact_mu(qubit_rep, qubit_state, m, region) for m in (50, 100, 200)]
        assert mus[0] < mus[1] < mus[2]
        assert mus[2] > 0.9

    def test_orbit_density_rate_torus(self, bernoulli_rep, bernoulli_state):
        """For tori the density rate is the largest atom in the region."""
        value = orbit_density_rate(
            bernoulli_rep, bernoulli_state(0.5), RegionSpec.half_space([1.0], 0.8), 10
        )
        assert value == pytest.approx(-math.log(45 / 1024) / 10)

    def test_orbit_density_rate_empty(self, qubit_rep, qubit_state):
        """Empty regions have infinite density rate."""
        region = RegionSpec.half_space([1, 0], 2.0)
        assert math.isinf(orbit_density_rate(qubit_rep, qubit_state, region, 6))


class TestRunSimulation:
    """Tests for run_simulation function."""

    def test_report(self, qubit_rep, qubit_state):
        """Rows carry estimates, exact values and a passing bound."""
        region = RegionSpec.chamber_ball([0.7, 0.3], 0.15)
        report = run_simulation(qubit_rep, qubit_state, [2, 4, 6], region, 2000, seed=1)
        assert [row.m for row in report.rows] == [2, 4, 6]
        assert report.inf_rate == pytest.approx(0.0, abs=1e-10)
        assert report.bound_holds
        for row in report.rows:
            assert row.mu_exact is not None
            assert row.ci_low <= row.mu_hat <= row.ci_high

    def test_torus_report(self, bernoulli_rep, bernoulli_state):
        """Torus systems run through the same pipeline."""
        rep = bernoulli_rep
        region = RegionSpec.half_space([1.0], 0.7)
        report = run_simulation(rep, bernoulli_state(0.5), [10, 20], region, 1000, seed=2)
        assert report.inf_rate == pytest.approx(kl([0.7, 0.3], [0.5, 0.5]), abs=1e-7)
        assert report.rows[1].mu_exact == pytest.approx(stats.binom.sf(13, 20, 0.5))
