'''
mpsQAOA problem instances
=========================

MaxCut (Erdos-Renyi graphs) and Exact Cover 3 instances, their Ising
encodings and exact classical oracles.

Spin convention: bit 1 is spin +1, i.e. z = 2*s - 1. An Ising model stores a
constant, one field per qubit and couplings on unordered pairs (i < j):

    E(s) = constant + sum_i h_i z_i + sum_{i<j} J_ij z_i z_j

MaxCut is encoded as a minimization with constant -1 and coupling +1 per edge,
so that E(s) = -2 * cut(s).
'''

import collections
import itertools
import math

import networkx as nx
import numpy as np

import logging
logger = logging.getLogger(__name__)

from .mpsQAOA_MPS import DimensionError, SizeLimitError
from .utils.exact_cover import solve_exact_cover_3
from .utils.utility_functions import bits_to_string, string_to_bits, check_available_ram

BRUTE_FORCE_MAX_QUBITS = 24
ENERGY_TOLERANCE = 1e-9

GroundStates = collections.namedtuple('GroundStates', ['energy', 'minimizers'])


class IsingModel():
    '''
    Args:
        n (int): number of qubits
        fields (array): h_i, zeros by default
        couplings (dict): (i, j) -> J_ij; keys are normalized to i < j
        constant (float): energy offset
    '''

    def __init__(self, n, fields=None, couplings=None, constant=0.0):
        self.n = int(n)
        if self.n < 1:
            raise ValueError(f"An Ising model needs n >= 1 spins, got {n}")
        self.fields = np.zeros(self.n) if fields is None else np.array(fields, dtype=float)
        if self.fields.shape != (self.n,):
            raise DimensionError(f"Expected {self.n} fields, got shape {self.fields.shape}")
        self.couplings = {}
        for (i, j), value in (couplings or {}).items():
            self.add_coupling(i, j, value)
        self.constant = float(constant)

    def __repr__(self):
        return f"IsingModel(n={self.n}, couplings={len(self.couplings)}, constant={self.constant})"

    def add_coupling(self, i, j, value):
        i, j = int(i), int(j)
        if i == j:
            raise ValueError(f"Coupling of spin {i} with itself")
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"Coupling ({i}, {j}) outside 0..{self.n - 1}")
        key = (min(i, j), max(i, j))
        self.couplings[key] = self.couplings.get(key, 0.0) + float(value)

    def coupling(self, i, j):
        return self.couplings.get((min(i, j), max(i, j)), 0.0)

    def coupling_matrix(self):
        ''' Strictly upper-triangular J '''
        matrix = np.zeros((self.n, self.n))
        for (i, j), value in self.couplings.items():
            matrix[i, j] = value
        return matrix

    def is_integer(self):
        values = list(self.fields) + list(self.couplings.values())
        return all(float(v).is_integer() for v in values)

    def is_zero(self):
        return not np.any(self.fields) and not any(self.couplings.values())

    def scaled(self, factor):
        return IsingModel(self.n, self.fields * factor,
                          {key: value * factor for key, value in self.couplings.items()},
                          self.constant * factor)

    def energy(self, bits):
        return classical_energy(self, bits)

    def energies(self, bit_matrix):
        ''' Energies of the rows of an (m, n) 0/1 matrix '''
        spins = 2.0 * np.asarray(bit_matrix, dtype=float) - 1.0
        return self.constant + spins @ self.fields + np.sum((spins @ self.coupling_matrix()) * spins, axis=1)

    def to_dict(self):
        return {'n': self.n,
                'constant': self.constant,
                'fields': [float(h) for h in self.fields],
                'couplings': [[i, j, float(value)] for (i, j), value in sorted(self.couplings.items())]}

    @classmethod
    def from_dict(cls, data):
        return cls(data['n'], data['fields'], {(i, j): v for i, j, v in data['couplings']}, data['constant'])


class ProblemInstance():
    '''
    Base class of problem instances.

    Attributes:
        certificate (dict or None): {'energy', 'witness', 'source'} of a known
            (or best-found) minimum of the Ising encoding
    '''
    kind = None

    def __init__(self, n, seed, instance_id=None, certificate=None):
        self.n = int(n)
        self.seed = int(seed)
        self.instance_id = instance_id if instance_id is not None else f'{self.kind}-n{self.n}-s{self.seed}'
        self.certificate = certificate

    def to_ising(self):
        raise NotImplementedError

    def get_min_energy(self):
        ''' Certified minimum energy, or None '''
        if self.certificate is None:
            return None
        return float(self.certificate['energy'])

    def to_dict(self):
        data = {'kind': self.kind, 'instance_id': self.instance_id, 'n': self.n, 'seed': self.seed}
        data.update(self._payload())
        if self.certificate is not None:
            data['certificate'] = dict(self.certificate)
        return data

    def _payload(self):
        return {}


class MaxCutInstance(ProblemInstance):
    kind = 'maxcut'

    def __init__(self, adjacency, seed=0, edge_probability=None, instance_id=None, certificate=None):
        adjacency = np.array(adjacency, dtype=np.int8)
        if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
            raise ValueError(f"Adjacency must be square, got shape {adjacency.shape}")
        if not np.array_equal(adjacency, adjacency.T) or np.any(np.diag(adjacency)):
            raise ValueError("Adjacency must be symmetric with a zero diagonal")
        if np.any((adjacency != 0) & (adjacency != 1)):
            raise ValueError("Adjacency entries must be 0 or 1")
        self.adjacency = adjacency
        self.edge_probability = edge_probability
        super().__init__(adjacency.shape[0], seed, instance_id, certificate)

    def edges(self):
        rows, cols = np.nonzero(np.triu(self.adjacency, k=1))
        return list(zip(rows.tolist(), cols.tolist()))

    def graph(self):
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def to_ising(self):
        return maxcut_to_ising(self)

    def _payload(self):
        return {'edge_probability': self.edge_probability,
                'adjacency': self.adjacency.tolist()}


class Ec3Instance(ProblemInstance):
    '''
    Exact Cover 3 instance: clauses are sorted triples of 0-based variables.

    Attributes:
        rejected_clause (tuple or None): the first clause whose addition made
            the instance unsatisfiable during generation
    '''
    kind = 'ec3'

    def __init__(self, n, clauses, seed=0, instance_id=None, certificate=None, rejected_clause=None):
        clauses = [tuple(int(v) for v in clause) for clause in clauses]
        for clause in clauses:
            if len(clause) != 3 or len(set(clause)) != 3:
                raise ValueError(f"Clause {clause} needs 3 distinct variables")
            if list(clause) != sorted(clause):
                raise ValueError(f"Clause {clause} is not sorted")
            if not all(0 <= v < n for v in clause):
                raise ValueError(f"Clause {clause} outside 0..{n - 1}")
        self.clauses = clauses
        self.rejected_clause = None if rejected_clause is None else tuple(rejected_clause)
        super().__init__(n, seed, instance_id, certificate)

    def to_ising(self):
        return ec3_to_ising(self)

    def _payload(self):
        data = {'clauses': [list(c) for c in self.clauses]}
        if self.rejected_clause is not None:
            data['rejected_clause'] = list(self.rejected_clause)
        return data


def instance_from_dict(data):
    kind = data['kind']
    certificate = dict(data['certificate']) if data.get('certificate') is not None else None
    if kind == 'maxcut':
        instance = MaxCutInstance(data['adjacency'], seed=data['seed'], edge_probability=data.get('edge_probability'),
                                  instance_id=data.get('instance_id'), certificate=certificate)
    elif kind == 'ec3':
        instance = Ec3Instance(data['n'], data['clauses'], seed=data['seed'], instance_id=data.get('instance_id'),
                               certificate=certificate, rejected_clause=data.get('rejected_clause'))
    else:
        raise ValueError(f"Unknown instance kind '{kind}', expected 'maxcut' or 'ec3'")
    if instance.n != int(data['n']):
        raise ValueError(f"Instance declares n={data['n']} but its payload has {instance.n} variables")
    return instance


'''
Generators
'''

def gen_maxcut_er(n, w, seed):
    ''' Erdos-Renyi G(n, w) graph, deterministic given seed '''
    if n < 2:
        raise ValueError(f"MaxCut needs n >= 2 vertices, got {n}")
    if not 0 < w < 1:
        raise ValueError(f"Edge probability must lie in (0, 1), got {w}")
    graph = nx.gnp_random_graph(int(n), float(w), seed=int(seed))
    adjacency = nx.to_numpy_array(graph, nodelist=range(n), dtype=int)
    instance = MaxCutInstance(adjacency, seed=seed, edge_probability=float(w))
    logger.debug(f'Generated {instance.instance_id} with {len(instance.edges())} edges')
    return instance


def gen_ec3(n, seed):
    '''
    Add uniformly drawn clauses (3 distinct variables, no duplicate clauses)
    until the exact-cover oracle finds no solution; the last clause is then
    dropped. The witness of the returned clause set is stored as certificate.
    '''
    if n < 3:
        raise ValueError(f"EC3 needs n >= 3 variables, got {n}")
    rng = np.random.default_rng(int(seed))
    n_triples = math.comb(n, 3)
    clauses, seen = [], set()
    witness = None
    rejected = None
    while len(seen) < n_triples:
        clause = tuple(sorted(int(v) for v in rng.choice(n, size=3, replace=False)))
        if clause in seen:
            continue
        seen.add(clause)
        solution = solve_exact_cover_3(n, clauses + [clause])
        if solution is None:
            rejected = clause
            break
        clauses.append(clause)
        witness = solution
    certificate = {'energy': 0.0, 'witness': bits_to_string(witness), 'source': 'exact-cover'}
    instance = Ec3Instance(n, clauses, seed=seed, certificate=certificate, rejected_clause=rejected)
    logger.debug(f'Generated {instance.instance_id} with {len(clauses)} clauses')
    return instance


'''
Encodings
'''

def maxcut_to_ising(instance):
    model = IsingModel(instance.n)
    for i, j in instance.edges():
        model.constant -= 1.0
        model.add_coupling(i, j, 1.0)
    return model


def ec3_to_ising(instance):
    ''' E(s) = sum over clauses of (x_a + x_b + x_c - 1)^2 with x = s '''
    model = IsingModel(instance.n)
    for clause in instance.clauses:
        model.constant += 1.0
        for v in clause:
            model.fields[v] += 0.5
        for a, b in itertools.combinations(clause, 2):
            model.add_coupling(a, b, 0.5)
    return model


'''
Classical oracles
'''

def _check_length(n, bits):
    if len(bits) != n:
        raise DimensionError(f"Bitstring of length {len(bits)} for {n} variables")


def classical_energy(model, bits):
    _check_length(model.n, bits)
    spins = 2.0 * np.asarray(bits, dtype=float) - 1.0
    energy = model.constant + float(np.dot(model.fields, spins))
    for (i, j), value in model.couplings.items():
        energy += value * spins[i] * spins[j]
    return float(energy)


def cut_size(instance, bits):
    ''' Number of edges between the 1-side and the 0-side of a MaxCut partition '''
    _check_length(instance.n, bits)
    side = {i for i, bit in enumerate(bits) if bit}
    return int(nx.cut_size(instance.graph(), side))


def ec3_satisfied(instance, bits):
    _check_length(instance.n, bits)
    return all(sum(int(bits[v]) for v in clause) == 1 for clause in instance.clauses)


def _index_block_bits(start, stop, n):
    indices = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((indices[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def brute_force_ground(model, max_qubits=BRUTE_FORCE_MAX_QUBITS, block_bits=20):
    '''
    Exact minimum over all 2^n bitstrings, enumerated in blocks.

    Returns:
        GroundStates(energy, minimizers) with minimizers as bit tuples in
        increasing big-endian order
    '''
    n = model.n
    if n > max_qubits:
        raise SizeLimitError(f"Brute force limited to {max_qubits} qubits, got {n}")
    block = 2 ** min(n, block_bits)
    check_available_ram(block * (n + 3) * 8)
    best = math.inf
    minimizers = []
    for start in range(0, 2 ** n, block):
        bits = _index_block_bits(start, start + block, n)
        energies = model.energies(bits)
        block_min = float(np.min(energies))
        if block_min < best - ENERGY_TOLERANCE:
            best = block_min
            minimizers = []
        if block_min <= best + ENERGY_TOLERANCE:
            hits = np.nonzero(energies <= best + ENERGY_TOLERANCE)[0]
            minimizers.extend(tuple(int(b) for b in bits[k]) for k in hits)
    logger.debug(f'Brute force over {n} qubits: E_min={best}, {len(minimizers)} minimizers')
    return GroundStates(best, minimizers)


def maxcut_value(instance):
    ''' Size of the maximum cut via brute force '''
    ground = brute_force_ground(maxcut_to_ising(instance))
    return cut_size(instance, ground.minimizers[0])


def attach_certificate(instance, max_qubits=BRUTE_FORCE_MAX_QUBITS):
    '''
    Store a certified minimum: brute force for n <= max_qubits, the
    exact-cover witness for EC3 at any size. Larger MaxCut instances keep
    whatever certificate they already carry.
    '''
    if instance.kind == 'ec3':
        witness = solve_exact_cover_3(instance.n, instance.clauses)
        if witness is None:
            raise ValueError(f"{instance.instance_id} is not satisfiable")
        instance.certificate = {'energy': 0.0, 'witness': bits_to_string(witness), 'source': 'exact-cover'}
    elif instance.n <= max_qubits:
        ground = brute_force_ground(instance.to_ising(), max_qubits=max_qubits)
        instance.certificate = {'energy': ground.energy, 'witness': bits_to_string(ground.minimizers[0]),
                                'source': 'brute-force'}
    else:
        logger.warning(f'{instance.instance_id}: n={instance.n} is above the brute-force limit, no certificate attached')
    return instance


def verify_certificate(instance):
    '''
    True if the certificate witness has the certified energy (and satisfies
    every clause for EC3). This checks the witness, not optimality.
    '''
    certificate = instance.certificate
    if certificate is None:
        return False
    bits = string_to_bits(certificate['witness'])
    if len(bits) != instance.n:
        return False
    energy = classical_energy(instance.to_ising(), bits)
    if abs(energy - float(certificate['energy'])) > ENERGY_TOLERANCE:
        return False
    if instance.kind == 'ec3':
        return ec3_satisfied(instance, bits)
    return abs(energy + 2 * cut_size(instance, bits)) <= ENERGY_TOLERANCE
