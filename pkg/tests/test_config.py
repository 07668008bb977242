"""Tests for run configuration parsing."""

import json
from pathlib import Path

import numpy as np
import pytest

from momentrate.config import (
    RunConfig,
    build_state,
    config_from_dict,
    decode_point,
    default_config,
    encode_point,
    load_config,
)
from momentrate.errors import ConfigError, MismatchedGroup, NotAState, UnsupportedRep
from momentrate.lie_core import DualVector, Factor, GroupSpec
from momentrate.rate_function import OptimizerOptions, _start_points
from momentrate.representations import Spin, Standard, TorusRep


class TestBuildState:
    """Tests for build_state function."""

    def test_diagonal(self):
        """Diagonal entries become the eigenvalues."""
        rho = build_state({"kind": "diagonal", "values": [0.7, 0.3]}, 2)
        np.testing.assert_allclose(rho, np.diag([0.7, 0.3]))

    def test_matrix(self):
        """Matrices are given as [re, im] pairs."""
        entries = [[[0.5, 0.0], [0.0, 0.5]], [[0.0, -0.5], [0.5, 0.0]]]
        rho = build_state({"kind": "matrix", "entries": entries}, 2)
        assert rho[0, 1] == pytest.approx(0.5j)
        assert rho[1, 0] == pytest.approx(-0.5j)

    def test_pure_is_normalized(self):
        """Pure state vectors are normalized."""
        rho = build_state({"kind": "pure", "vector": [3.0, 4.0]}, 2)
        np.testing.assert_allclose(rho, np.array([[9, 12], [12, 16]]) / 25, atol=1e-12)

    def test_pure_complex_entries(self):
        """Pure state vectors accept [re, im] pairs."""
        rho = build_state({"kind": "pure", "vector": [[1.0, 0.0], [0.0, 1.0]]}, 2)
        assert rho[0, 1] == pytest.approx(-0.5j)

    def test_zero_vector(self):
        """A zero vector is not a state."""
        with pytest.raises(NotAState):
            build_state({"kind": "pure", "vector": [0.0, 0.0]}, 2)

    def test_maximally_mixed(self):
        """Maximally mixed state is I/dim."""
        np.testing.assert_allclose(build_state({"kind": "maximally_mixed"}, 4), np.eye(4) / 4)

    def test_unknown_kind(self):
        """Unknown kinds are configuration errors."""
        with pytest.raises(ConfigError, match="unknown state kind"):
            build_state({"kind": "thermal"}, 2)

    def test_missing_field(self):
        """Missing fields name the field."""
        with pytest.raises(ConfigError, match="values"):
            build_state({"kind": "diagonal"}, 2)

    def test_wrong_dimension(self):
        """Dimension must match the representation."""
        with pytest.raises(NotAState, match="dimension"):
            build_state({"kind": "diagonal", "values": [0.5, 0.5]}, 3)

    def test_invalid_state(self):
        """Trace is validated."""
        with pytest.raises(NotAState):
            build_state({"kind": "diagonal", "values": [0.7, 0.7]}, 2)


class TestRunConfig:
    """Tests for RunConfig class."""

    def test_default_is_qubit(self):
        """Built-in case is the standard qubit."""
        config = default_config()
        assert config.representation == Standard(2)
        assert config.group == GroupSpec.of(Factor.unitary(2))
        np.testing.assert_allclose(config.state, np.diag([0.7, 0.3]))
        assert config.seed == 0
        assert config.workers == 1
        assert config.output_format == "json"

    def test_rejects_zero_workers(self):
        """At least one worker is required."""
        with pytest.raises(ConfigError, match="workers"):
            RunConfig(Standard(2), np.eye(2) / 2, workers=0)

    @pytest.mark.parametrize("seed", [-1, 2**64])
    def test_rejects_seed_out_of_range(self, seed):
        """Seeds are 64-bit unsigned."""
        with pytest.raises(ConfigError, match="seed"):
            RunConfig(Standard(2), np.eye(2) / 2, seed=seed)

    def test_rejects_format(self):
        """Only json and csv are supported."""
        with pytest.raises(ConfigError, match="format"):
            RunConfig(Standard(2), np.eye(2) / 2, output_format="xml")

    def test_rejects_shape_mismatch(self):
        """State and representation must agree."""
        with pytest.raises(NotAState):
            RunConfig(Standard(3), np.eye(2) / 2)

    def test_with_overrides_ignores_none(self):
        """None overrides leave fields untouched."""
        config = default_config()
        assert config.with_overrides(seed=None, workers=None) is config
        changed = config.with_overrides(seed=7, workers=None, output_path=Path("x.csv"))
        assert changed.seed == 7
        assert changed.workers == 1
        assert changed.output_path == Path("x.csv")

    def test_to_dict_round_trip(self):
        """A serialized configuration parses back to the same run."""
        config = default_config().with_overrides(seed=5, output_format="csv")
        parsed = config_from_dict(json.loads(json.dumps(config.to_dict())))
        assert parsed.representation == config.representation
        assert parsed.seed == 5
        assert parsed.output_format == "csv"
        np.testing.assert_allclose(parsed.state, config.state)


class TestConfigFromDict:
    """Tests for config_from_dict function."""

    def test_minimal(self):
        """Only a representation is required; the state defaults to maximally mixed."""
        config = config_from_dict({"representation": {"kind": "spin", "j": 1}})
        assert config.representation == Spin(2)
        np.testing.assert_allclose(config.state, np.eye(3) / 3)

    def test_torus(self):
        """Torus representations carry weights with multiplicities."""
        config = config_from_dict(
            {
                "representation": {"kind": "torus", "weights": [[[0], 1], [[1], 1]]},
                "state": {"kind": "diagonal", "values": [0.6, 0.4]},
                "seed": 3,
                "workers": 2,
                "output": {"format": "csv", "path": "out.csv"},
            }
        )
        assert config.representation == TorusRep.of({0: 1, 1: 1})
        assert config.workers == 2
        assert config.output_path == Path("out.csv")

    def test_missing_representation(self):
        """A representation is mandatory."""
        with pytest.raises(ConfigError, match="representation"):
            config_from_dict({"state": {"kind": "maximally_mixed"}})

    def test_representation_missing_field(self):
        """Missing representation fields are configuration errors."""
        with pytest.raises(ConfigError, match="dim"):
            config_from_dict({"representation": {"kind": "standard"}})

    def test_unknown_representation(self):
        """Unknown representation kinds are unsupported."""
        with pytest.raises(UnsupportedRep):
            config_from_dict({"representation": {"kind": "adjoint"}})

    def test_matching_group(self):
        """An explicit group consistent with the representation is accepted."""
        config = config_from_dict(
            {
                "group": [{"kind": "unitary", "dim": 2}],
                "representation": {"kind": "standard", "dim": 2},
            }
        )
        assert config.group == GroupSpec.of(Factor.unitary(2))

    def test_mismatched_group(self):
        """An explicit group must match the representation."""
        with pytest.raises(MismatchedGroup):
            config_from_dict(
                {
                    "group": [{"kind": "su2"}],
                    "representation": {"kind": "standard", "dim": 2},
                }
            )

    def test_bad_optimizer(self):
        """Unknown optimizer options are rejected."""
        with pytest.raises(ConfigError, match="optimizer"):
            config_from_dict(
                {
                    "representation": {"kind": "standard", "dim": 2},
                    "optimizer": {"learning_rate": 0.1},
                }
            )

    def test_point(self):
        """A stored point is decoded over the representation's group."""
        config = config_from_dict(
            {
                "representation": {"kind": "standard", "dim": 2},
                "point": [[[[0.9, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.1, 0.0]]]],
            }
        )
        assert isinstance(config.point, DualVector)
        np.testing.assert_allclose(config.point.blocks[0], np.diag([0.9, 0.1]))


class TestLoadConfig:
    """Tests for load_config function."""

    def test_load(self, tmp_path):
        """Files on disk are parsed."""
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"representation": {"kind": "standard", "dim": 3}}))
        assert load_config(path).representation == Standard(3)

    def test_missing_file(self, tmp_path):
        """A missing file is a configuration error."""
        with pytest.raises(ConfigError, match="does not exist"):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        """Malformed JSON is a configuration error."""
        path = tmp_path / "run.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_not_an_object(self, tmp_path):
        """The document must be a JSON object."""
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)


class TestPointCodec:
    """Tests for encode_point and decode_point functions."""

    def test_product_group(self):
        """Torus blocks are real lists and matrix blocks are [re, im] pairs."""
        spec = GroupSpec.of(Factor.torus(2), Factor.su2())
        x = DualVector(spec, (np.array([0.2, 0.8]), np.diag([0.3, -0.3]).astype(complex)))
        encoded = encode_point(x)
        assert encoded[0] == [0.2, 0.8]
        assert encoded[1][0][0] == [0.3, 0.0]
        decoded = decode_point(spec, encoded)
        np.testing.assert_allclose(decoded.blocks[1], x.blocks[1])

    def test_block_count(self):
        """Block count must match the factors."""
        spec = GroupSpec.of(Factor.unitary(2))
        with pytest.raises(MismatchedGroup):
            decode_point(spec, [[0.1], [0.2]])


class TestSeedPropagation:
    """The master seed drives the optimizer restart points."""

    def test_override_reaches_optimizer(self):
        """A seed override is copied into the optimizer options."""
        config = default_config().with_overrides(seed=7)
        assert config.optimizer.seed == 7

    def test_document_seed_reaches_optimizer(self):
        """The seed of a configuration document is copied into the optimizer options."""
        config = config_from_dict(
            {"representation": {"kind": "standard", "dim": 2}, "seed": 11}
        )
        assert config.optimizer.seed == 11

    def test_master_seed_wins(self):
        """Explicit optimizer options take the master seed."""
        config = RunConfig(
            representation=Standard(2),
            state=np.eye(2, dtype=complex) / 2,
            seed=3,
            optimizer=OptimizerOptions(seed=99, restarts=5),
        )
        assert config.optimizer.seed == 3
        assert config.optimizer.restarts == 5

    def test_optimizer_seed_used_without_master_seed(self):
        """A document without a master seed keeps the optimizer seed."""
        config = config_from_dict(
            {"representation": {"kind": "standard", "dim": 2}, "optimizer": {"seed": 5}}
        )
        assert config.seed == 5
        assert config.optimizer.seed == 5

    def test_seed_changes_start_points(self):
        """Different seeds give different restarts; equal seeds reproduce them."""
        base = default_config()

        def starts(seed):
            return np.array(list(_start_points(3, base.with_overrides(seed=seed).optimizer)))

        first, again, other = starts(1), starts(1), starts(2)
        assert np.array_equal(first, again)
        assert np.array_equal(first[0], other[0])
        assert not np.allclose(first[1:], other[1:])
