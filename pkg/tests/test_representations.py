"""Tests for representation descriptors, actions, weights and decompositions."""

import math

import numpy as np
import pytest
import scipy.linalg

from momentrate.errors import MismatchedGroup, NotDominant, TooLarge, UnsupportedRep
from momentrate.lie_core import (
    CartanVector,
    FactorKind,
    GroupElement,
    ginibre_element,
    haar_sample,
    random_algebra,
)
from momentrate.representations import (
    Power,
    Spin,
    Standard,
    TensorProduct,
    TorusRep,
    WeightPolytope,
    apply,
    basis_weights,
    character,
    derived,
    dimension_bound,
    highest_weight_vector,
    isotypic_decompose_qubits,
    isotypic_decompose_torus,
    log_character,
    qubit_multiplicity,
    rep_from_dict,
    rep_to_dict,
    symmetric_power,
    symmetric_power_derivation,
    weight_data,
    weight_points,
)


class TestDescriptors:
    """Tests for representation descriptors."""

    def test_spin_from_half_integer(self):
        """Spin.of stores twice the spin."""
        assert Spin.of(0.5).two_j == 1
        assert Spin.of(2).dim == 5

    def test_spin_rejects_non_half_integer(self):
        """Only half-integers are spins."""
        with pytest.raises(ValueError):
            Spin.of(0.3)

    def test_torus_rep_from_dict(self):
        """Scalar keys mean rank one."""
        rep = TorusRep.of({0: 1, 1: 2})
        assert rep.rank == 1
        assert rep.dim == 3

    def test_torus_rep_needs_consistent_rank(self):
        """Weight vectors must share their length."""
        with pytest.raises(ValueError):
            TorusRep((((0,), 1), ((0, 1), 1)))

    def test_tensor_product_group(self):
        """Parts act on consecutive factors."""
        rep = TensorProduct((Standard(2), Spin(2)))
        assert str(rep.group()) == "U(2) x SU(2)"
        assert rep.dim == 6

    @pytest.mark.parametrize(
        "rep",
        [
            Standard(3),
            Spin(3),
            TorusRep.of({(0, 1): 1, (2, -1): 3}),
            TensorProduct((Standard(2), Spin(2))),
            Power(Standard(2), 3),
        ],
    )
    def test_dict_round_trip(self, rep):
        """Serialized representations parse back equal."""
        assert rep_from_dict(rep_to_dict(rep)) == rep

    def test_unknown_kind(self):
        """Unknown kinds raise UnsupportedRep."""
        with pytest.raises(UnsupportedRep):
            rep_from_dict({"kind": "adjoint"})


class TestSymmetricPower:
    """Tests for SU(2) symmetric powers."""

    def test_first_power_is_identity_map(self, rng):
        """Sym^1(g) = g."""
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        assert np.allclose(symmetric_power(g, 1), g)

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_multiplicative(self, n, rng):
        """Sym^n(gh) = Sym^n(g) Sym^n(h)."""
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        lhs = symmetric_power(g @ h, n)
        rhs = symmetric_power(g, n) @ symmetric_power(h, n)
        assert np.allclose(lhs, rhs, atol=1e-10)

    @pytest.mark.parametrize("n", [2, 5])
    def test_unitary_goes_to_unitary(self, n, rng):
        """The normalized basis makes Sym^n(U) unitary."""
        u = haar_sample(Spin(1).group(), rng).blocks[0]
        s = symmetric_power(u, n)
        assert np.allclose(s.conj().T @ s, np.eye(n + 1), atol=1e-12)

    @pytest.mark.parametrize("n", [1, 3, 4])
    def test_derivation_exponentiates(self, n, rng):
        """exp of the derived action equals the action of exp."""
        xi = random_algebra(Spin(1).group(), rng, scale=0.4).blocks[0]
        lhs = scipy.linalg.expm(symmetric_power_derivation(xi, n))
        rhs = symmetric_power(scipy.linalg.expm(xi), n)
        assert np.allclose(lhs, rhs, atol=1e-10)


class TestActions:
    """Tests for apply and derived."""

    def test_power_is_kronecker(self, rng):
        """Power(Standard(2), 2) acts by g ⊗ g."""
        g = ginibre_element(Standard(2).group(), rng)
        block = g.blocks[0]
        assert np.allclose(apply(Power(Standard(2), 2), g), np.kron(block, block))

    def test_tensor_product_homomorphism(self, rng):
        """π(gh) = π(g) π(h) on a product group."""
        rep = TensorProduct((Standard(2), Spin(2)))
        g = ginibre_element(rep.group(), rng)
        h = ginibre_element(rep.group(), rng)
        assert np.allclose(apply(rep, g @ h), apply(rep, g) @ apply(rep, h), atol=1e-10)

    def test_derived_is_hermitian(self, rng):
        """Hermitian inputs give Hermitian derived actions."""
        rep = TensorProduct((Power(Standard(2), 2), Spin(3)))
        d = derived(rep, random_algebra(rep.group(), rng))
        assert np.allclose(d, d.conj().T)

    def test_torus_action_is_diagonal(self):
        """TorusRep acts by characters z^w."""
        rep = TorusRep.of({0: 1, 2: 1})
        g = GroupElement(rep.group(), (np.array([1j]),))
        assert np.allclose(apply(rep, g), np.diag([1.0, -1.0]))

    def test_wrong_group(self):
        """Elements over another group are rejected."""
        with pytest.raises(MismatchedGroup):
            apply(Standard(2), GroupElement.identity(Spin(1).group()))


class TestWeights:
    """Tests for weights and characters."""

    def test_spin_weights_doubled(self):
        """Spin(1) has internal weights 2, 0, -2 and flat weights 1, 0, -1."""
        assert basis_weights(Spin(2)).ravel().tolist() == [2, 0, -2]
        assert np.allclose(weight_points(Spin(2)).ravel(), [1.0, 0.0, -1.0])

    def test_bernoulli_power_multiplicities(self, bernoulli_rep):
        """The m-th power of a Bernoulli representation has binomial multiplicities."""
        data = weight_data(Power(bernoulli_rep, 3))
        assert data.weights == ((3,), (2,), (1,), (0,))
        assert data.multiplicities == (1, 3, 3, 1)
        assert data.dim == 8

    def test_character(self):
        """Tr π(exp α) for the standard representation."""
        alpha = CartanVector.from_flat(Standard(2).group(), [0.3, -1.1])
        assert character(Standard(2), alpha) == pytest.approx(math.exp(0.3) + math.exp(-1.1))

    def test_log_character_no_overflow(self):
        """Large arguments stay finite in log space."""
        alpha = CartanVector.from_flat(Standard(2).group(), [1000.0, 0.0])
        assert log_character(Standard(2), alpha) == pytest.approx(1000.0)

    def test_spin_character(self):
        """Spin-1/2 character is 2 cosh(a/2)."""
        alpha = CartanVector.from_flat(Spin(1).group(), [0.8])
        assert character(Spin(1), alpha) == pytest.approx(2 * math.cosh(0.4))


class TestWeightPolytope:
    """Tests for WeightPolytope."""

    @pytest.fixture
    def simplex(self):
        """Convex hull of the standard basis of R^3."""
        return weight_data(Standard(3)).polytope

    def test_affine_dimension(self, simplex):
        """The simplex is two-dimensional inside R^3."""
        assert simplex.affine_dim == 2

    def test_interior_point(self, simplex):
        """The barycenter lies strictly inside."""
        assert simplex.contains(np.full(3, 1 / 3))
        assert not simplex.on_boundary(np.full(3, 1 / 3))

    def test_boundary_point(self, simplex):
        """Edge midpoints are on the relative boundary."""
        assert simplex.on_boundary(np.array([0.5, 0.5, 0.0]))

    def test_off_plane_point(self, simplex):
        """Points off the affine hull are separated along the residual."""
        beta, gap = simplex.separating_direction(np.array([1.0, 1.0, 1.0]))
        assert gap > 0
        assert np.allclose(beta, np.full(3, 1 / np.sqrt(3)))

    def test_separating_direction_in_plane(self, simplex):
        """A point outside within the hull's plane gets a positive gap."""
        x = np.array([1.5, 0.0, -0.5])
        beta, gap = simplex.separating_direction(x)
        assert gap > 0
        assert float(x @ beta) - simplex.support(beta) == pytest.approx(gap, abs=1e-9)

    def test_inside_has_no_separator(self, simplex):
        """Points of Δ have no separating direction."""
        assert simplex.separating_direction(np.array([0.2, 0.3, 0.5])) is None

    def test_segment(self):
        """One-dimensional hulls use two half-lines."""
        poly = WeightPolytope.from_points(np.array([[0.0], [1.0], [0.5]]))
        assert poly.affine_dim == 1
        assert poly.contains(np.array([0.25]))
        assert not poly.contains(np.array([1.5]))

    def test_qubit_classification(self, rng):
        """Points of the trace-one line are inside exactly when both entries are nonnegative."""
        poly = weight_data(Standard(2)).polytope
        for a in rng.uniform(-0.5, 1.5, 100):
            x = np.array([a, 1.0 - a])
            if min(abs(a), abs(1.0 - a)) < 1e-6:
                continue
            assert poly.contains(x) == (0.0 <= a <= 1.0)
            assert (poly.separating_direction(x) is None) == (0.0 <= a <= 1.0)

    def test_rank_two_torus_classification(self, rng):
        """The torus with weights 0, e1, e2 has the unit triangle as polytope."""
        poly = weight_data(TorusRep.of({(0, 0): 1, (1, 0): 1, (0, 1): 2})).polytope
        assert poly.affine_dim == 2
        for x in rng.uniform(-0.5, 1.5, (100, 2)):
            slack = min(x[0], x[1], 1.0 - x.sum())
            if abs(slack) < 1e-6:
                continue
            assert poly.contains(x) == (slack > 0)
            separation = poly.separating_direction(x)
            if slack > 0:
                assert separation is None
            else:
                beta, gap = separation
                assert float(x @ beta) - poly.support(beta) == pytest.approx(gap, abs=1e-9)


class TestIsotypic:
    """Tests for isotypic decompositions."""

    def test_qubit_multiplicities(self):
        """Four qubits split as 5 + 3·3 + 2·1."""
        assert [qubit_multiplicity(4, tj) for tj in (4, 2, 0)] == [1, 3, 2]
        assert qubit_multiplicity(4, 1) == 0

    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    def test_resolution_of_identity(self, m):
        """Projectors sum to the identity."""
        decomposition = isotypic_decompose_qubits(m)
        assert decomposition.resolution_error() < 1e-12
        for block in decomposition.blocks:
            v = block.isometry
            assert np.allclose(v.conj().T @ v, np.eye(v.shape[1]), atol=1e-12)
            assert block.multiplicity == qubit_multiplicity(m, block.label[0])

    def test_projectors_commute_with_action(self, rng):
        """Isotypic projectors are equivariant."""
        m = 3
        g = ginibre_element(Standard(2).group(), rng)
        pi = apply(Power(Standard(2), m), g)
        for block in isotypic_decompose_qubits(m).blocks:
            p = block.projector()
            assert np.allclose(p @ pi, pi @ p, atol=1e-10)

    def test_top_block_intertwines(self, rng):
        """The symmetric block carries the symmetric power."""
        m = 3
        u = haar_sample(Spin(1).group(), rng)
        v = isotypic_decompose_qubits(m).block((3,)).isometry
        pi = apply(Power(Standard(2), m), GroupElement(Standard(2).group(), u.blocks))
        assert np.allclose(pi @ v, v @ symmetric_power(u.blocks[0], 3), atol=1e-10)

    def test_too_large(self):
        """Explicit decompositions are bounded."""
        with pytest.raises(TooLarge):
            isotypic_decompose_qubits(20, m_max=14)

    def test_small_decompositions_are_cached(self):
        """Repeated small decompositions share one object."""
        assert isotypic_decompose_qubits(4) is isotypic_decompose_qubits(4)

    def test_large_decompositions_are_not_cached(self, monkeypatch):
        """Decompositions above the cache limit are rebuilt on every call."""
        monkeypatch.setattr("momentrate.representations.QUBIT_CACHE_MAX", 2)
        first, second = isotypic_decompose_qubits(3), isotypic_decompose_qubits(3)
        assert first is not second
        for a, b in zip(first.blocks, second.blocks, strict=True):
            assert np.array_equal(a.isometry, b.isometry)

    def test_torus_blocks(self, bernoulli_rep):
        """Torus decompositions group basis vectors by weight."""
        decomposition = isotypic_decompose_torus(Power(bernoulli_rep, 3))
        assert [b.label for b in decomposition.blocks] == [(0,), (1,), (2,), (3,)]
        assert [b.multiplicity for b in decomposition.blocks] == [1, 3, 3, 1]
        assert decomposition.resolution_error() == 0.0

    def test_torus_decomposition_needs_torus(self):
        """Matrix groups are rejected."""
        with pytest.raises(UnsupportedRep):
            isotypic_decompose_torus(Standard(2))

    def test_dimension_bound(self):
        """(m+1)^{D(D-1)/2}."""
        assert dimension_bound(2, 3) == 27.0


class TestHighestWeightVector:
    """Tests for highest_weight_vector function."""

    def test_spin(self):
        """Spin 1 has a three-dimensional irreducible."""
        v = highest_weight_vector([1.0], FactorKind.SU2)
        assert np.allclose(v, [1, 0, 0])

    def test_standard(self):
        """The U(3) standard irreducible has highest weight e1."""
        assert highest_weight_vector([1, 0, 0], FactorKind.UNITARY).shape == (3,)

    def test_not_dominant(self):
        """Increasing labels are not dominant."""
        with pytest.raises(NotDominant):
            highest_weight_vector([0, 1], FactorKind.UNITARY)
        with pytest.raises(NotDominant):
            highest_weight_vector([0.3], FactorKind.SU2)

    def test_unsupported_irreducible(self):
        """Only the standard U(d) irreducible is available for d >= 3."""
        with pytest.raises(UnsupportedRep):
            highest_weight_vector([2, 1, 0], FactorKind.UNITARY)
