"""Tests for the invariant suites."""

import dataclasses
import math

import pytest

from momentrate import selftest
from momentrate.errors import InvariantViolation
from momentrate.lie_core import CartanVector
from momentrate.selftest import SUITES, SelftestOptions, SuiteResult, run_selftest

FAST = SelftestOptions(trials=5, seed=3)


class TestSuiteResult:
    """Tests for SuiteResult bookkeeping."""

    def test_record_within_tolerance(self):
        """Residuals at or below tolerance pass."""
        result = SuiteResult("demo", tolerance=1e-8)
        result.record(1e-9)
        result.record(1e-8)
        assert result.passed
        assert result.checks == 2
        assert result.max_residual == 1e-8

    def test_record_failure(self):
        """Residuals above tolerance, or non-finite ones, fail."""
        result = SuiteResult("demo", tolerance=1e-8)
        result.record(1e-6)
        result.record(math.nan)
        assert result.failures == 2
        assert not result.passed

    def test_per_check_tolerance(self):
        """An explicit tolerance overrides the suite default."""
        result = SuiteResult("demo", tolerance=1e-12)
        result.record(1e-9, tolerance=1e-8)
        assert result.passed

    def test_check(self):
        """Qualitative checks count too."""
        result = SuiteResult("demo", tolerance=0.0)
        result.check(True)
        result.check(False)
        assert (result.checks, result.failures) == (2, 1)

    def test_to_dict(self):
        """Serialized reports carry the verdict."""
        data = SuiteResult("demo", tolerance=1e-8, errors=["boom"]).to_dict()
        assert data["suite"] == "demo"
        assert data["passed"] is False
        assert data["errors"] == ["boom"]


class TestRunSelftest:
    """Tests for run_selftest function."""

    def test_suite_names(self):
        """All invariant families are registered."""
        assert set(SUITES) == {
            "iwasawa",
            "chi",
            "highest_weight",
            "su2_pairing",
            "rate_zero",
            "keyl",
            "cramer",
            "upper_bound",
            "lln",
            "decay",
        }

    @pytest.mark.parametrize("name", ["iwasawa", "chi", "highest_weight", "su2_pairing"])
    def test_geometry_suites_pass(self, name):
        """Group-theoretic identities hold on random instances."""
        (result,) = run_selftest([name], FAST)
        assert result.passed, result.to_dict()
        assert result.checks > 0

    @pytest.mark.parametrize("name", ["upper_bound", "lln", "decay"])
    def test_measure_suites_pass(self, name):
        """Exact measure suites pass."""
        (result,) = run_selftest([name], FAST)
        assert result.passed, result.to_dict()

    def test_perturbed_iwasawa_fails(self):
        """A perturbed reconstruction is detected."""
        options = SelftestOptions(trials=3, seed=0, perturb_iwasawa=1e-6)
        (result,) = run_selftest(["iwasawa"], options)
        assert not result.passed
        assert result.max_residual > result.tolerance

    def test_iwasawa_checks_torus_invariance(self, monkeypatch):
        """The iwasawa suite includes a torus-translation check that catches a broken A part."""
        (result,) = run_selftest(["iwasawa"], FAST)
        assert result.checks == 3 * FAST.trials * 4
        real_iwasawa = selftest.iwasawa
        calls = {"n": 0}

        def drifting(g, method="qr"):
            factors = real_iwasawa(g, method)
            calls["n"] += 1
            if calls["n"] % 3:
                return factors
            alpha = CartanVector.from_flat(factors.alpha.spec, factors.alpha.flat() + 1e-6)
            return dataclasses.replace(factors, alpha=alpha)

        monkeypatch.setattr(selftest, "iwasawa", drifting)
        (result,) = run_selftest(["iwasawa"], FAST)
        assert not result.passed

    def test_unknown_suite(self):
        """Unknown names are rejected before anything runs."""
        with pytest.raises(ValueError, match="unknown suites"):
            run_selftest(["iwasawa", "nope"])

    def test_exceptions_become_errors(self, monkeypatch):
        """A suite raising a library error is reported as failed."""

        def broken(_rng, _options):
            raise InvariantViolation("identity broke")

        monkeypatch.setitem(selftest.SUITES, "iwasawa", broken)
        (result,) = run_selftest(["iwasawa"], FAST)
        assert not result.passed
        assert "InvariantViolation" in result.errors[0]

    def test_reproducible(self):
        """Same seed gives the same residuals."""
        first = run_selftest(["su2_pairing"], FAST)[0].max_residual
        second = run_selftest(["su2_pairing"], FAST)[0].max_residual
        assert first == second
