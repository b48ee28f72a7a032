'''
Dense state-vector reference implementations used by the tests.

Big-endian: qubit 0 is the most significant bit of the basis index.
'''
import numpy as np

from mpsQAOA.src.mpsQAOA_Compiler import compile_qaoa


def bits_to_index(bits):
    index = 0
    for b in bits:
        index = (index << 1) | int(b)
    return index


def index_to_bits(index, n):
    return tuple((int(index) >> (n - 1 - k)) & 1 for k in range(n))


def plus_vector(n):
    return np.full(2 ** n, 2 ** (-n / 2), dtype=complex)


def apply_one_qubit(psi, gate, k, n):
    tensor = psi.reshape(2 ** k, 2, 2 ** (n - k - 1))
    return np.einsum('st,atb->asb', gate, tensor).reshape(-1)


def apply_two_qubit(psi, gate, j, n):
    tensor = psi.reshape(2 ** j, 4, 2 ** (n - j - 2))
    return np.einsum('st,atb->asb', gate, tensor).reshape(-1)


def energy_diagonal(model):
    bits = np.array([index_to_bits(i, model.n) for i in range(2 ** model.n)])
    return model.energies(bits)


def pauli_x_sum(n):
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    total = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for k in range(n):
        total += np.kron(np.kron(np.eye(2 ** k), x), np.eye(2 ** (n - k - 1)))
    return total


def qaoa_state(model, gammas, betas):
    ''' prod_j exp(-i b_j sum X) exp(-i g_j H_C) |+>^n '''
    n = model.n
    diagonal = energy_diagonal(model)
    psi = plus_vector(n)
    for gamma, beta in zip(gammas, betas):
        psi = np.exp(-1j * gamma * diagonal) * psi
        c, s = np.cos(beta), np.sin(beta)
        mixer = np.array([[c, -1j * s], [-1j * s, c]])
        for k in range(n):
            psi = apply_one_qubit(psi, mixer, k, n)
    return psi


def reverse_qubits(psi, n):
    return psi.reshape([2] * n).transpose(list(range(n - 1, -1, -1))).reshape(-1)


def truncate_bond(psi, j, n, bond_cap, cutoff=0.0, normalize=False):
    ''' Schmidt truncation of a dense state across the cut after qubit j '''
    matrix = psi.reshape(2 ** (j + 1), -1)
    u, s, vh = np.linalg.svd(matrix, full_matrices=False)
    weights = s ** 2
    total = np.sum(weights)
    keep = max(1, min(bond_cap, int(np.count_nonzero(weights > cutoff * total))))
    truncated = (u[:, :keep] * s[:keep]) @ vh[:keep]
    if normalize:
        truncated *= np.sqrt(total / np.sum(weights[:keep]))
    return truncated.reshape(-1)


def replay_circuit(model, schedule, bond_cap, cutoff=0.0, normalize=False):
    '''
    Applies the compiled circuit gate by gate to a dense vector, truncating
    after every two-qubit gate, and returns the state in logical order.
    '''
    n = model.n
    circuit = compile_qaoa(model, schedule)
    psi = plus_vector(n)
    for op in circuit.ops():
        if op.kind == 'two-qubit':
            psi = apply_two_qubit(psi, op.matrix, op.sites[0], n)
            psi = truncate_bond(psi, op.sites[0], n, bond_cap, cutoff, normalize)
        else:
            psi = apply_one_qubit(psi, op.matrix, op.sites[0], n)
    if circuit.p % 2 == 1:
        psi = reverse_qubits(psi, n)
    return psi


def sequential_sample(psi, n):
    ''' Greedy qubit-by-qubit sample with ties going to 1 '''
    probabilities = np.abs(psi) ** 2
    probabilities = probabilities / np.sum(probabilities)
    tensor = probabilities.reshape([2] * n)
    bits = []
    for k in range(n):
        marginal = tensor.reshape(2, -1).sum(axis=1)
        bit = 0 if marginal[0] > marginal[1] else 1
        bits.append(bit)
        tensor = tensor[bit] / marginal[bit]
    return tuple(bits)


def fidelity(a, b):
    return abs(np.vdot(a, b)) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real)
