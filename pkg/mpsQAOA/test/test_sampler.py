# To run the test:
# python -m unittest mpsQAOA.test.test_sampler
import unittest

import numpy as np

from mpsQAOA.src.mpsQAOA_MPS import (plus_state, basis_state, from_statevector, random_mps, amplitude, to_statevector,
                                     DegenerateStateError)
from mpsQAOA.src.mpsQAOA_Sampler import deterministic_sample
from mpsQAOA.test.dense_oracle import bits_to_index
from mpsQAOA.test import dense_oracle


class TestDeterministicSample(unittest.TestCase):
    def test_local_choice_differs_from_global_argmax(self):
        psi = np.sqrt(np.array([0.32, 0.28, 0.05, 0.35]))
        outcome = deterministic_sample(from_statevector(psi))
        self.assertEqual(outcome.bits, (0, 0))
        self.assertAlmostEqual(outcome.probability, 0.32, places=12)
        np.testing.assert_allclose(outcome.conditionals, [0.6, 0.32 / 0.6], atol=1e-12)
        self.assertEqual(int(np.argmax(np.abs(psi))), 3, "Dense argmax is |11>")

    def test_ties_go_to_one(self):
        outcome = deterministic_sample(plus_state(5))
        self.assertEqual(outcome.bits, (1, 1, 1, 1, 1))
        self.assertAlmostEqual(outcome.probability, 2 ** -5, places=14)

    def test_basis_state(self):
        outcome = deterministic_sample(basis_state((0, 1, 0)))
        self.assertEqual(outcome.bits, (0, 1, 0))
        self.assertAlmostEqual(outcome.probability, 1.0, places=14)

    def test_random_states(self):
        rng = np.random.default_rng(2024)
        for trial in range(1000):
            n = int(rng.integers(1, 11))
            state = random_mps(n, int(rng.integers(1, 9)), seed=trial)
            outcome = deterministic_sample(state)
            self.assertGreaterEqual(outcome.probability, 2.0 ** -n - 1e-12, f"Trial {trial}: n={n}")
            exact = abs(amplitude(state, outcome.bits)) ** 2 / state.get_norm() ** 2
            self.assertAlmostEqual(outcome.probability, exact, places=10, msg=f"Trial {trial}")

    def test_matches_dense_sequential_sample(self):
        for seed in range(20):
            psi = np.random.default_rng(seed).standard_normal(2 ** 6) + 0j
            outcome = deterministic_sample(from_statevector(psi))
            self.assertEqual(outcome.bits, dense_oracle.sequential_sample(psi, 6))
            probability = abs(psi[bits_to_index(outcome.bits)]) ** 2 / np.sum(np.abs(psi) ** 2)
            self.assertAlmostEqual(outcome.probability, probability, places=12)

    def test_independent_of_norm(self):
        state = random_mps(6, 4, seed=9)
        scaled = state.copy()
        scaled.norm_scalar = 0.125 * scaled.norm_scalar
        self.assertEqual(deterministic_sample(state).bits, deterministic_sample(scaled).bits)

    def test_input_is_not_modified(self):
        state = random_mps(5, 4, seed=1)
        before = to_statevector(state)
        deterministic_sample(state)
        np.testing.assert_allclose(to_statevector(state), before, atol=1e-14)

    def test_projection_does_not_grow_bonds(self):
        work = random_mps(8, 6, seed=4)
        for k in range(work.n):
            before = work.get_bond_dims()
            rho = work.reduced_density_matrix(k)
            work.project(k, 0 if rho[0, 0].real > rho[1, 1].real else 1)
            after = work.get_bond_dims()
            self.assertTrue(all(a <= b for a, b in zip(after, before)), f"Bonds grew at site {k}: {before} -> {after}")

    def test_zero_norm_state(self):
        state = plus_state(3)
        state.norm_scalar = 0.0
        with self.assertRaises(DegenerateStateError):
            deterministic_sample(state)


if __name__ == '__main__':
    unittest.main()
