import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsignal.hilbert import (
    IDENTITY,
    DensityMatrix,
    InvariantViolation,
    Observable,
    PsiProjector,
    StateVector,
    UnitaryParams,
    ZeroProbabilityBranch,
    apply_local,
    density_expectation,
    expectation,
    identity_projector,
    post_measurement,
    project_prob,
    psi_amplitudes,
    psi_basis_state,
    su2_matrix,
)
from qsignal.qsignaling import payoff_observable, proj

import oracles

PI = math.pi

thetas = st.floats(0, PI)
phases = st.floats(0, 2 * PI, exclude_max=True)
params = st.builds(UnitaryParams, thetas, phases, phases)


def random_state(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(v / np.linalg.norm(v))


def probs_by_label(state):
    return {lab: abs(a) ** 2 for lab, a in psi_amplitudes(state)}


class TestSu2:
    def test_identity(self):
        np.testing.assert_allclose(su2_matrix(UnitaryParams(0, 0, 0)), np.eye(2), atol=1e-15)

    def test_pi(self):
        np.testing.assert_allclose(su2_matrix(UnitaryParams(PI, 0, 0)), [[0, 1j], [1j, 0]], atol=1e-15)

    def test_chance_entries_match_formula(self):
        m = su2_matrix(UnitaryParams(PI / 2, PI / 6, PI / 3))
        assert m[0, 0] == pytest.approx(cmath.exp(1j * PI / 6) / math.sqrt(2), abs=1e-15)
        np.testing.assert_allclose(m, oracles.u_matrix(PI / 2, PI / 6, PI / 3), atol=1e-15)

    @given(params)
    def test_unitary(self, p):
        m = su2_matrix(p)
        np.testing.assert_allclose(m.conj().T @ m, np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("bad", [dict(theta=-0.1), dict(theta=4.0), dict(alpha=7.0), dict(beta=-1.0),
                                     dict(theta=float("nan"))])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueError):
            UnitaryParams(**bad)


class TestPsiBasis:
    def test_initial_state(self):
        a = psi_basis_state("00000").amps
        expected = np.zeros(32, complex)
        expected[0] = 1 / math.sqrt(2)
        expected[31] = 1j / math.sqrt(2)
        np.testing.assert_allclose(a, expected, atol=1e-15)

    def test_orthonormal_exhaustive_n5(self):
        labs = oracles.labels(5)
        kets = np.array([psi_basis_state(x).amps for x in labs])
        np.testing.assert_allclose(kets.conj() @ kets.T, np.eye(32), atol=1e-12)
        for x in labs:
            np.testing.assert_allclose(psi_basis_state(x).amps, oracles.psi_ket(x), atol=1e-15)

    @pytest.mark.parametrize("bits", ["", "012", "0" * 9])
    def test_bad_length(self, bits):
        with pytest.raises(ValueError):
            psi_basis_state(bits)

    def test_sequence_input(self):
        np.testing.assert_array_equal(psi_basis_state([0, 1, 1]).amps, psi_basis_state("011").amps)


class TestApplyLocal:
    def test_identity(self):
        rng = np.random.default_rng(0)
        s = random_state(rng, 4)
        np.testing.assert_allclose(apply_local(s, [IDENTITY] * 4).amps, s.amps)

    def test_flip_all(self):
        out = apply_local(psi_basis_state("00000"), [UnitaryParams(PI)] * 5)
        ref = oracles.final_state([oracles.u_matrix(PI)] * 5)
        np.testing.assert_allclose(out.amps, ref, atol=1e-12)
        # U(pi) = iX on each qubit, so the global factor is i^5 = i
        np.testing.assert_allclose(out.amps, 1j * psi_basis_state("11111").amps, atol=1e-12)
        assert probs_by_label(out) == pytest.approx({"11111": 1.0})

    def test_paper_final_state(self, paper_chance):
        ops = [paper_chance] + [UnitaryParams(t) for t in (0, 0, PI, PI)]
        out = apply_local(psi_basis_state("00000"), ops)
        probs = probs_by_label(out)
        assert set(probs) == {"00011", "11100", "10011", "01100"}
        assert probs["00011"] == pytest.approx(6 / 16, abs=1e-12)
        assert probs["11100"] == pytest.approx(2 / 16, abs=1e-12)
        assert probs["10011"] == pytest.approx(2 / 16, abs=1e-12)
        assert probs["01100"] == pytest.approx(6 / 16, abs=1e-12)

    def test_matches_dense_kron(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            ps = [UnitaryParams(rng.uniform(0, PI), rng.uniform(0, 2 * PI), rng.uniform(0, 2 * PI)) for _ in range(n)]
            s = random_state(rng, n)
            ref = oracles.kron_all([oracles.u_matrix(p.theta, p.alpha, p.beta) for p in ps]) @ s.amps
            np.testing.assert_allclose(apply_local(s, ps).amps, ref, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            apply_local(psi_basis_state("000"), [IDENTITY] * 2)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 6).flatmap(lambda n: st.tuples(st.just(n), st.lists(params, min_size=n, max_size=n))))
    def test_norm_preserved(self, case):
        n, ps = case
        out = apply_local(psi_basis_state("0" * n), ps)
        assert np.linalg.norm(out.amps) == pytest.approx(1.0, abs=1e-9)

    @given(thetas, thetas)
    def test_composition(self, a, b):
        s = psi_basis_state("0")
        twice = apply_local(apply_local(s, [UnitaryParams(a)]), [UnitaryParams(b)])
        product = su2_matrix(UnitaryParams(b)) @ su2_matrix(UnitaryParams(a)) @ s.amps
        np.testing.assert_allclose(twice.amps, product, atol=1e-12)


class TestProjectors:
    def test_idempotent(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            k = int(rng.integers(0, n + 1))
            qs = rng.choice(n, size=k, replace=False)
            p = PsiProjector.of(n, {int(q): int(rng.integers(0, 2)) for q in qs})
            s = random_state(rng, n).amps
            np.testing.assert_allclose(p.apply(p.apply(s)), p.apply(s), atol=1e-12)

    def test_apply_matches_dense(self):
        rng = np.random.default_rng(3)
        s = random_state(rng, 5)
        for fixed in oracles.LEAF_CONSTRAINTS:
            ref = oracles.projector_matrix(5, fixed) @ s.amps
            np.testing.assert_allclose(proj(fixed).apply(s.amps), ref, atol=1e-12)
            np.testing.assert_allclose(proj(fixed).matrix(), oracles.projector_matrix(5, fixed), atol=1e-12)

    def test_complementary_sum_to_identity(self):
        for q in range(4):
            p0 = PsiProjector.of(4, {q: 0})
            np.testing.assert_allclose(p0.matrix() + p0.complement_on(q).matrix(), np.eye(16), atol=1e-12)

    def test_completeness_over_partitions(self):
        rng = np.random.default_rng(4)
        s = random_state(rng, 5)
        for k in range(1, 6):
            for qs in itertools.combinations(range(5), k):
                total = sum(project_prob(s, PsiProjector.of(5, dict(zip(qs, bits))))
                            for bits in itertools.product((0, 1), repeat=k))
                assert total == pytest.approx(1.0, abs=1e-9)

    def test_conflict_rejected(self):
        with pytest.raises(ValueError):
            PsiProjector(3, frozenset({(0, 0), (0, 1)}))
        with pytest.raises(ValueError):
            PsiProjector.of(3, {3: 0})


class TestMeasurement:
    @pytest.fixture
    def psi1(self, paper_chance):
        # chance and player 2's (pi, 0); player 1 untouched
        return apply_local(psi_basis_state("00000"), [paper_chance, IDENTITY, IDENTITY, UnitaryParams(PI), IDENTITY])

    @pytest.fixture
    def psi2(self, paper_chance):
        return apply_local(psi_basis_state("00000"), [paper_chance, UnitaryParams(PI), IDENTITY, IDENTITY, IDENTITY])

    def test_upper_node_probability(self, psi1):
        assert project_prob(psi1, proj({1: 0})) == pytest.approx(3 / 4, abs=1e-12)
        assert project_prob(psi1, proj({1: 0})) + project_prob(psi1, proj({1: 1})) == pytest.approx(1, abs=1e-12)

    def test_left_set_probability(self, psi2):
        p = project_prob(psi2, proj({1: 0, 2: 0})) + project_prob(psi2, proj({1: 1, 3: 0}))
        assert p == pytest.approx(1 / 2, abs=1e-12)

    def test_post_measurement_upper(self, psi1):
        post, p = post_measurement(psi1, proj({1: 0}))
        assert p == pytest.approx(3 / 4)
        assert probs_by_label(post) == pytest.approx({"00010": 0.5, "01101": 0.5}, abs=1e-12)

    def test_post_measurement_left_upper(self, psi2):
        post, p = post_measurement(psi2, proj({1: 0, 2: 0}))
        assert p == pytest.approx(3 / 8, abs=1e-12)
        assert probs_by_label(post) == pytest.approx({"00111": 1.0}, abs=1e-12)
        # brute force: P psi / sqrt(p) from the dense projector
        ref = oracles.projector_matrix(5, {1: 0, 2: 0}) @ psi2.amps
        np.testing.assert_allclose(post.amps, ref / np.linalg.norm(ref), atol=1e-12)

    def test_identity_projector(self, psi1):
        post, p = post_measurement(psi1, identity_projector(5))
        assert p == pytest.approx(1.0)
        np.testing.assert_allclose(post.amps, psi1.amps, atol=1e-12)

    def test_zero_branch(self):
        with pytest.raises(ZeroProbabilityBranch):
            post_measurement(psi_basis_state("000"), PsiProjector.of(3, {0: 1}))


class TestExpectation:
    def test_completeness(self):
        rng = np.random.default_rng(5)
        obs = Observable(3, ((identity_projector(3), 1.0),))
        for _ in range(5):
            assert expectation(random_state(rng, 3), obs) == pytest.approx(1.0, abs=1e-12)

    def test_paper_profile(self, paper_spec, paper_chance):
        s = apply_local(psi_basis_state("00000"), [paper_chance] + [UnitaryParams(t) for t in (0, 0, PI, PI)])
        assert expectation(s, payoff_observable(paper_spec, 1)) == pytest.approx(6.5, abs=1e-12)
        assert expectation(s, payoff_observable(paper_spec, 2)) == pytest.approx(3.5, abs=1e-12)

    def test_observable_matrix_matches_dense(self, paper_spec):
        for player in (1, 2):
            np.testing.assert_allclose(
                payoff_observable(paper_spec, player).matrix(),
                oracles.observable_matrix(paper_spec.leaves, player),
                atol=1e-12,
            )

    def test_pure_density_agreement(self, paper_spec):
        rng = np.random.default_rng(6)
        obs = payoff_observable(paper_spec, 2)
        m = oracles.observable_matrix(paper_spec.leaves, 2)
        for _ in range(20):
            s = random_state(rng, 5)
            direct = expectation(s, obs)
            assert density_expectation(s.density(), obs) == pytest.approx(direct, abs=1e-9)
            assert np.vdot(s.amps, m @ s.amps).real == pytest.approx(direct, abs=1e-9)

    def test_paper_mixed_state(self, paper_spec):
        rho = DensityMatrix.mixture([3 / 4, 1 / 4], [psi_basis_state("00111"), psi_basis_state("11000")])
        evolved = rho.evolve([IDENTITY] * 3 + [UnitaryParams(PI), UnitaryParams(0)])
        assert density_expectation(evolved, payoff_observable(paper_spec, 2)) == pytest.approx(19 / 2, abs=1e-12)

    def test_linearity(self, paper_spec):
        rng = np.random.default_rng(7)
        obs = payoff_observable(paper_spec, 1)
        for _ in range(20):
            ra = DensityMatrix.mixture([0.3, 0.7], [random_state(rng, 5), random_state(rng, 5)])
            rb = random_state(rng, 5).density()
            lam = rng.uniform()
            mix = DensityMatrix(lam * ra.entries + (1 - lam) * rb.entries)
            assert density_expectation(mix, obs) == pytest.approx(
                lam * density_expectation(ra, obs) + (1 - lam) * density_expectation(rb, obs), abs=1e-12
            )

    def test_dimension_mismatch(self, paper_spec):
        with pytest.raises(ValueError):
            expectation(psi_basis_state("000"), payoff_observable(paper_spec, 1))


class TestDensityMatrix:
    def test_random_mixtures_valid(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            w = rng.dirichlet(np.ones(4))
            rho = DensityMatrix.mixture(w, [random_state(rng, 5) for _ in range(4)])
            assert np.trace(rho.entries).real == pytest.approx(1.0, abs=1e-9)
            assert np.max(np.abs(rho.entries - rho.entries.conj().T)) <= 1e-12
            assert np.linalg.eigvalsh(rho.entries).min() >= -1e-9

    def test_rejects_bad_trace(self):
        with pytest.raises(InvariantViolation):
            DensityMatrix(np.eye(4))

    def test_rejects_non_hermitian(self):
        with pytest.raises(InvariantViolation):
            DensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]]))

    def test_rejects_unnormalized_state(self):
        with pytest.raises(InvariantViolation):
            StateVector(np.array([1.0, 1.0]))
