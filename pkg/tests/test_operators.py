"""Superoperator construction and steady-state solver checks.

The vectorized Liouvillian is verified against direct evaluation of the
master-equation right-hand side on random density matrices, so the kron
bookkeeping is tested independently of any physics built on top of it.
"""

import numpy as np
import pytest

from qdiode.operators import (
    SIGMA_MINUS,
    SIGMA_Z,
    SolverError,
    check_density_matrix,
    dagger,
    dissipator_apply,
    dissipator_superop,
    evolve,
    expectation,
    hamiltonian_superop,
    kron,
    liouvillian_matrix,
    steady_state,
    unvec,
    vec,
)


def random_density_matrix(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_matrix(dim, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def decaying_liouvillian(delta_omega=0.3, drive=0.8, gamma=1.0):
    """Driven decaying qubit with a unique steady state."""
    h = -0.5 * delta_omega * SIGMA_Z + drive * (SIGMA_MINUS + SIGMA_MINUS.T)
    return liouvillian_matrix(h, [(gamma, SIGMA_MINUS)])


# ----------------------------------------------------------------------------
#                        Elementary building blocks
# ----------------------------------------------------------------------------

class TestKronAndVec:
    def test_kron_matches_index_formula(self):
        a = random_matrix(3, 1)
        b = random_matrix(2, 2)
        k = kron(a, b)
        for i in range(3):
            for j in range(3):
                for m in range(2):
                    for n in range(2):
                        np.testing.assert_allclose(
                            k[2 * i + m, 2 * j + n], a[i, j] * b[m, n])

    def test_vec_unvec_round_trip(self):
        rho = random_matrix(4, 3)
        np.testing.assert_array_equal(unvec(vec(rho)), rho)

    def test_vec_identity_sandwich(self):
        # vec(A rho B) = (B^T kron A) vec(rho), the identity everything rests on
        a = random_matrix(4, 4)
        b = random_matrix(4, 5)
        rho = random_matrix(4, 6)
        np.testing.assert_allclose(
            kron(b.T, a) @ vec(rho), vec(a @ rho @ b), atol=1e-12)

    def test_unvec_rejects_non_square_length(self):
        with pytest.raises(ValueError):
            unvec(np.zeros(5))


class TestSuperoperators:
    def test_hamiltonian_superop_is_commutator(self):
        h = random_matrix(4, 7)
        h = h + dagger(h)
        rho = random_density_matrix(4, 8)
        direct = -1j * (h @ rho - rho @ h)
        np.testing.assert_allclose(unvec(hamiltonian_superop(h) @ vec(rho)),
                                   direct, atol=1e-12)

    def test_dissipator_superop_term_by_term(self):
        x = random_matrix(4, 9)
        rho = random_density_matrix(4, 10)
        direct = (x @ rho @ dagger(x)
                  - 0.5 * dagger(x) @ x @ rho
                  - 0.5 * rho @ dagger(x) @ x)
        np.testing.assert_allclose(unvec(dissipator_superop(x) @ vec(rho)),
                                   direct, atol=1e-12)
        np.testing.assert_allclose(dissipator_apply(x, rho), direct,
                                   atol=1e-12)

    def test_liouvillian_matches_direct_rhs(self):
        h = random_matrix(4, 11)
        h = h + dagger(h)
        x1 = random_matrix(4, 12)
        x2 = random_matrix(4, 13)
        lv = liouvillian_matrix(h, [(0.7, x1), (1.3, x2)])
        rho = random_density_matrix(4, 14)
        direct = (-1j * (h @ rho - rho @ h)
                  + 0.7 * dissipator_apply(x1, rho)
                  + 1.3 * dissipator_apply(x2, rho))
        np.testing.assert_allclose(unvec(lv @ vec(rho)), direct, atol=1e-12)

    def test_liouvillian_is_trace_free(self):
        lv = decaying_liouvillian()
        for seed in range(5):
            rho = random_density_matrix(2, seed)
            np.testing.assert_allclose(np.trace(unvec(lv @ vec(rho))), 0.0,
                                       atol=1e-12)

    def test_zero_rate_jump_is_dropped(self):
        h = 0.5 * SIGMA_Z
        np.testing.assert_array_equal(
            liouvillian_matrix(h, [(0.0, SIGMA_MINUS)]),
            liouvillian_matrix(h, []))

    def test_rejects_negative_rate(self):
        with pytest.raises(ValueError):
            liouvillian_matrix(np.eye(2), [(-1.0, SIGMA_MINUS)])

    def test_rejects_non_hermitian_hamiltonian(self):
        with pytest.raises(ValueError):
            liouvillian_matrix(random_matrix(2, 15), [])

    def test_rejects_mismatched_jump_dimension(self):
        with pytest.raises(ValueError):
            liouvillian_matrix(np.eye(4), [(1.0, SIGMA_MINUS)])


# ----------------------------------------------------------------------------
#                     Steady state and time evolution
# ----------------------------------------------------------------------------

class TestSteadyState:
    def test_fixed_point_of_the_flow(self):
        lv = decaying_liouvillian()
        rho = steady_state(lv)
        np.testing.assert_allclose(lv @ vec(rho), 0.0, atol=1e-10)
        np.testing.assert_allclose(np.trace(rho), 1.0, atol=1e-12)
        check_density_matrix(rho)

    def test_matches_long_time_evolution(self):
        lv = decaying_liouvillian()
        rho_ss = steady_state(lv)
        rho_t = evolve(random_density_matrix(2, 20), lv, 200.0)
        np.testing.assert_allclose(rho_t, rho_ss, atol=1e-9)

    def test_undriven_qubit_relaxes_to_ground(self):
        lv = liouvillian_matrix(0.4 * SIGMA_Z, [(1.0, SIGMA_MINUS)])
        rho = steady_state(lv)
        np.testing.assert_allclose(rho, np.diag([1.0, 0.0]), atol=1e-12)

    def test_degenerate_null_space_raises(self):
        # No dissipation at all: every rho commuting with sigma_z is steady.
        lv = liouvillian_matrix(0.5 * SIGMA_Z, [])
        with pytest.raises(SolverError):
            steady_state(lv)

    def test_scale_invariance(self):
        lv = decaying_liouvillian()
        np.testing.assert_allclose(steady_state(lv), steady_state(1e9 * lv),
                                   atol=1e-10)


class TestEvolve:
    def test_zero_time_is_identity(self):
        lv = decaying_liouvillian()
        rho = random_density_matrix(2, 31)
        np.testing.assert_array_equal(evolve(rho, lv, 0.0), rho)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            evolve(np.eye(2) / 2, decaying_liouvillian(), -1.0)

    def test_semigroup_property(self):
        lv = decaying_liouvillian()
        rho = random_density_matrix(2, 32)
        one_step = evolve(rho, lv, 3.0)
        two_step = evolve(evolve(rho, lv, 1.2), lv, 1.8)
        np.testing.assert_allclose(one_step, two_step, atol=1e-11)

    def test_linearity(self):
        lv = decaying_liouvillian()
        r1 = random_density_matrix(2, 33)
        r2 = random_density_matrix(2, 34)
        mixed = evolve(0.3 * r1 + 0.7 * r2, lv, 0.9)
        parts = 0.3 * evolve(r1, lv, 0.9) + 0.7 * evolve(r2, lv, 0.9)
        np.testing.assert_allclose(mixed, parts, atol=1e-11)

    def test_preserves_trace_and_positivity(self):
        lv = decaying_liouvillian()
        for seed in range(4):
            rho = evolve(random_density_matrix(2, 40 + seed), lv, 0.7)
            np.testing.assert_allclose(np.trace(rho), 1.0, atol=1e-11)
            evals = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
            assert evals.min() > -1e-10


class TestExpectation:
    def test_against_trace_formula(self):
        op = random_matrix(4, 50)
        rho = random_density_matrix(4, 51)
        np.testing.assert_allclose(expectation(op, rho),
                                   np.trace(op @ rho), atol=1e-12)
