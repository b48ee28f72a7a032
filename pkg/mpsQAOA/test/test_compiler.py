# To run the test:
# python -m unittest mpsQAOA.test.test_compiler
import unittest

import numpy as np
import scipy.linalg

from mpsQAOA.src.mpsQAOA_Compiler import (pair_schedule, field_rotation, fused_cost_swap, mixer_rotation, reversal,
                                          compile_cost_layer, compile_mixer_layer, compile_qaoa, SWAP)
from mpsQAOA.src.mpsQAOA_MPS import DimensionError
from mpsQAOA.src.mpsQAOA_Problems import IsingModel
from mpsQAOA.src.mpsQAOA_Trainer import AngleSchedule
from mpsQAOA.test import dense_oracle


def circuit_unitary(circuit):
    ''' Dense unitary of a compiled circuit in logical qubit order '''
    n = circuit.n
    columns = []
    for index in range(2 ** n):
        psi = np.zeros(2 ** n, dtype=complex)
        psi[index] = 1.0
        for op in circuit.ops():
            if op.kind == 'two-qubit':
                psi = dense_oracle.apply_two_qubit(psi, op.matrix, op.sites[0], n)
            else:
                psi = dense_oracle.apply_one_qubit(psi, op.matrix, op.sites[0], n)
        if circuit.p % 2 == 1:
            psi = dense_oracle.reverse_qubits(psi, n)
        columns.append(psi)
    return np.array(columns).T


def qaoa_unitary(model, gammas, betas):
    diagonal = dense_oracle.energy_diagonal(model)
    mixer = dense_oracle.pauli_x_sum(model.n)
    unitary = np.eye(2 ** model.n, dtype=complex)
    for gamma, beta in zip(gammas, betas):
        unitary = scipy.linalg.expm(-1j * beta * mixer) @ np.diag(np.exp(-1j * gamma * diagonal)) @ unitary
    return unitary


class TestSwapNetwork(unittest.TestCase):
    def test_every_pair_meets_once(self):
        for n in range(2, 65):
            layout = list(range(n))
            met = []
            for pairs in pair_schedule(n):
                for q, q1 in pairs:
                    met.append(frozenset((layout[q], layout[q1])))
                    layout[q], layout[q1] = layout[q1], layout[q]
            self.assertEqual(len(met), n * (n - 1) // 2, f"n={n}: {len(met)} gates")
            self.assertEqual(len(set(met)), n * (n - 1) // 2, f"n={n}: some pair met twice")
            self.assertEqual(layout, list(range(n - 1, -1, -1)), f"n={n}: network is not a reversal")

    def test_rounds_act_on_disjoint_pairs(self):
        for n in (2, 5, 8):
            schedule = pair_schedule(n)
            self.assertEqual(len(schedule), n)
            for r, pairs in enumerate(schedule):
                sites = [q for pair in pairs for q in pair]
                self.assertEqual(len(sites), len(set(sites)))
                self.assertTrue(all(q % 2 == r % 2 for q, _ in pairs))

    def test_four_qubit_layer(self):
        model = IsingModel(4, couplings={(0, 1): 1.0, (2, 3): 1.0})
        ops, perm = compile_cost_layer(model, 0.3)
        self.assertEqual(len(ops), 6)
        self.assertEqual(perm, [3, 2, 1, 0])
        self.assertTrue(all(op.label == 'cost-fused-swap' for op in ops))

    def test_permutation_input(self):
        model = IsingModel(5)
        ops, perm = compile_cost_layer(model, 0.1, reversal(5))
        self.assertEqual(perm, list(range(5)))
        with self.assertRaises(ValueError):
            compile_cost_layer(model, 0.1, [0, 0, 1, 2, 3])


class TestGates(unittest.TestCase):
    def test_mixer_rotation(self):
        np.testing.assert_allclose(mixer_rotation(0.0), np.eye(2), atol=1e-15)
        np.testing.assert_allclose(mixer_rotation(np.pi / 2), -1j * np.array([[0, 1], [1, 0]]), atol=1e-15)

    def test_field_rotation_sign(self):
        # bit 1 is spin +1
        np.testing.assert_allclose(field_rotation(0.4, 1.5), np.diag([np.exp(0.6j), np.exp(-0.6j)]), atol=1e-15)

    def test_bare_swap_for_missing_edges(self):
        np.testing.assert_array_equal(fused_cost_swap(0.7, 0.0), SWAP)

    def test_fused_gate_on_two_qubits(self):
        gamma, coupling = 0.37, -1.5
        zz = np.diag([1.0, -1.0, -1.0, 1.0])
        expected = SWAP @ scipy.linalg.expm(-1j * gamma * coupling * zz)
        np.testing.assert_allclose(fused_cost_swap(gamma, coupling), expected, atol=1e-14)

    def test_mixer_layer_matches_exponential(self):
        n, beta = 4, 0.83
        start = dense_oracle.plus_vector(n) * np.exp(1j * np.arange(2 ** n))
        psi = start
        for op in compile_mixer_layer(n, beta):
            psi = dense_oracle.apply_one_qubit(psi, op.matrix, op.sites[0], n)
        expected = scipy.linalg.expm(-1j * beta * dense_oracle.pauli_x_sum(n)) @ start
        np.testing.assert_allclose(psi, expected, atol=1e-12)


class TestCompiledCircuit(unittest.TestCase):
    def setUp(self):
        self.model = IsingModel(4, fields=[0.5, -1.0, 0.0, 1.5],
                                couplings={(0, 1): 1.0, (0, 3): -0.5, (1, 2): 0.5, (2, 3): 1.0}, constant=2.0)

    def test_odd_depth_unitary(self):
        schedule = AngleSchedule([0.41], [0.27])
        circuit = compile_qaoa(self.model, schedule)
        expected = qaoa_unitary(self.model, schedule.gammas, schedule.betas)
        # the constant only contributes a global phase
        actual = circuit_unitary(circuit) * np.exp(-1j * 0.41 * 2.0)
        np.testing.assert_allclose(actual, expected, atol=1e-10)

    def test_even_depth_unitary(self):
        schedule = AngleSchedule([0.41, 1.1], [0.27, 0.6])
        circuit = compile_qaoa(self.model, schedule)
        self.assertEqual(circuit.final_perm, [0, 1, 2, 3])
        expected = qaoa_unitary(self.model, schedule.gammas, schedule.betas)
        actual = circuit_unitary(circuit) * np.exp(-1j * (0.41 + 1.1) * 2.0)
        np.testing.assert_allclose(actual, expected, atol=1e-10)

    def test_state_matches_dense_qaoa(self):
        schedule = AngleSchedule([0.2, 0.5, 0.9], [0.7, 0.4, 0.1])
        psi = dense_oracle.replay_circuit(self.model, schedule, bond_cap=4)
        expected = dense_oracle.qaoa_state(self.model, schedule.gammas, schedule.betas)
        self.assertAlmostEqual(dense_oracle.fidelity(psi, expected), 1.0, places=10)

    def test_counts_and_permutations(self):
        n, p = 5, 3
        circuit = compile_qaoa(IsingModel(n, couplings={(0, 4): 1.0}), AngleSchedule([0.1] * p, [0.2] * p))
        self.assertEqual(circuit.two_qubit_count(), p * n * (n - 1) // 2)
        self.assertEqual(circuit.gate_count(), p * (n * (n - 1) // 2 + n))
        self.assertEqual(circuit.final_perm, reversal(n))
        self.assertEqual(circuit.perms[1], list(range(n)))

    def test_empty_schedule(self):
        circuit = compile_qaoa(self.model, AngleSchedule([], []))
        self.assertEqual(circuit.gate_count(), 0)
        self.assertEqual(circuit.final_perm, [0, 1, 2, 3])

    def test_fields_are_emitted(self):
        circuit = compile_qaoa(self.model, AngleSchedule([0.3], [0.2]))
        labels = [op.label for op in circuit.ops()]
        self.assertEqual(labels.count('field-rotation'), 3)
        self.assertEqual(labels.count('mixer'), 4)
        text = circuit.dump()
        for label in ('cost-fused-swap', 'field-rotation', 'mixer'):
            self.assertIn(label, text)

    def test_register_size_mismatch(self):
        with self.assertRaises(DimensionError):
            compile_qaoa(self.model, AngleSchedule([0.1], [0.1]), n=5)


if __name__ == '__main__':
    unittest.main()
