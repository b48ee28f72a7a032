'''
mpsQAOA circuit compiler
========================

Compiles QAOA layers for an arbitrary Ising model into gate programs acting
only on neighbouring sites of a qubit chain.

Each cost layer is an odd-even transposition network of n rounds. Round r
acts on the physical pairs (q, q+1) with q = r % 2, r % 2 + 2, ... Every
unordered logical pair becomes adjacent exactly once, where a single fused
gate SWAP * exp(-i gamma J_ij Z(x)Z) is emitted. The network reverses the
qubit order, so after k cost layers logical qubit i sits at physical site
i (k even) or n-1-i (k odd).

Permutations are lists ``perm[logical] = physical``.
'''

import collections

import numpy as np

import logging
logger = logging.getLogger(__name__)

from .mpsQAOA_MPS import DimensionError

SPIN_Z = np.array([[-1, 0], [0, 1]], dtype=complex)
''' Spin operator of one qubit: bit 1 is spin +1 '''

SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)

ZZ_DIAGONAL = np.array([1, -1, -1, 1], dtype=float)

GateOp = collections.namedtuple('GateOp', ['kind', 'sites', 'matrix', 'label'])
''' kind is 'one-qubit' or 'two-qubit', sites are physical chain positions '''

LABEL_FUSED = 'cost-fused-swap'
LABEL_FIELD = 'field-rotation'
LABEL_MIXER = 'mixer'


def pair_schedule(n):
    ''' Rounds of physical pairs of the odd-even transposition network '''
    return [[(q, q + 1) for q in range(r % 2, n - 1, 2)] for r in range(n)]


def field_rotation(gamma, h):
    ''' exp(-i gamma h SPIN_Z) '''
    return np.diag(np.exp(-1j * gamma * h * np.diag(SPIN_Z)))


def fused_cost_swap(gamma, coupling):
    ''' SWAP * exp(-i gamma J Z(x)Z); a bare SWAP for J = 0 '''
    if coupling == 0:
        return SWAP.copy()
    return SWAP @ np.diag(np.exp(-1j * gamma * coupling * ZZ_DIAGONAL))


def mixer_rotation(beta):
    ''' exp(-i beta X) '''
    c, s = np.cos(beta), np.sin(beta)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def reversal(n):
    return [n - 1 - i for i in range(n)]


def compose_reversal(perm):
    n = len(perm)
    return [n - 1 - q for q in perm]


def compile_cost_layer(model, gamma, perm_in=None):
    '''
    Gate program of exp(-i gamma H_C) on the chain.

    Args:
        model: Ising model with ``n``, ``fields`` and ``couplings``
        gamma (float): cost angle
        perm_in (list): logical -> physical map on entry, identity by default

    Returns:
        (list of GateOp, perm_out) with perm_out the reversal of perm_in
    '''
    n = model.n
    perm = list(range(n)) if perm_in is None else list(perm_in)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"perm_in {perm} is not a permutation of {n} qubits")

    ops = []
    for logical, h in enumerate(model.fields):
        if h != 0:
            ops.append(GateOp('one-qubit', (perm[logical],), field_rotation(gamma, h), LABEL_FIELD))

    layout = [0] * n
    for logical, physical in enumerate(perm):
        layout[physical] = logical
    for pairs in pair_schedule(n):
        for q, q1 in pairs:
            a, b = layout[q], layout[q1]
            coupling = model.coupling(a, b)
            ops.append(GateOp('two-qubit', (q, q1), fused_cost_swap(gamma, coupling), LABEL_FUSED))
            layout[q], layout[q1] = b, a

    perm_out = [0] * n
    for physical, logical in enumerate(layout):
        perm_out[logical] = physical
    assert perm_out == compose_reversal(perm)
    return ops, perm_out


def compile_mixer_layer(n, beta):
    gate = mixer_rotation(beta)
    return [GateOp('one-qubit', (q,), gate, LABEL_MIXER) for q in range(n)]


class CompiledCircuit():
    '''
    Gate program of a depth-p QAOA circuit.

    Attributes:
        layers (list): one GateOp list per QAOA step (cost layer then mixer)
        perms (list): logical -> physical map after each step
    '''

    def __init__(self, n, layers, perms):
        assert len(layers) == len(perms)
        self.n = n
        self.layers = layers
        self.perms = perms
        self.p = len(layers)

    @property
    def final_perm(self):
        return list(self.perms[-1]) if self.perms else list(range(self.n))

    def ops(self):
        for layer in self.layers:
            yield from layer

    def gate_count(self):
        return sum(len(layer) for layer in self.layers)

    def two_qubit_count(self):
        return sum(1 for op in self.ops() if op.kind == 'two-qubit')

    def dump(self):
        ''' Plain-text gate listing for debugging; not a stable format '''
        lines = [f'# circuit n={self.n} p={self.p} gates={self.gate_count()} two_qubit={self.two_qubit_count()}']
        for step, layer in enumerate(self.layers):
            lines.append(f'# step {step + 1} perm_after={self.perms[step]}')
            for op in layer:
                sites = ','.join(str(s) for s in op.sites)
                lines.append(f'{op.label:<16} {op.kind:<10} sites={sites}')
        return '\n'.join(lines)

    def __repr__(self):
        return f'CompiledCircuit(n={self.n}, p={self.p}, gates={self.gate_count()})'


def compile_qaoa(model, schedule, n=None):
    '''
    Alternating cost and mixer layers for j = 1..p.

    Args:
        model: Ising model
        schedule: object with ``gammas`` and ``betas`` of equal length p
        n (int): intended register size, checked against model.n if given
    '''
    if n is not None and n != model.n:
        raise DimensionError(f"Model has {model.n} qubits, register has {n}")
    gammas, betas = list(schedule.gammas), list(schedule.betas)
    if len(gammas) != len(betas):
        raise ValueError(f"Schedule has {len(gammas)} gammas and {len(betas)} betas")
    perm = list(range(model.n))
    layers, perms = [], []
    for gamma, beta in zip(gammas, betas):
        ops, perm = compile_cost_layer(model, gamma, perm)
        ops.extend(compile_mixer_layer(model.n, beta))
        layers.append(ops)
        perms.append(perm)
    circuit = CompiledCircuit(model.n, layers, perms)
    logger.debug('Compiled %s', circuit)
    return circuit
