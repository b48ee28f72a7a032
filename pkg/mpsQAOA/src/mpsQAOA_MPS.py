'''
mpsQAOA matrix product states
=============================

Matrix-product-state register of n qubits with a capped bond dimension.

Every site tensor is a complex array of shape (left_bond, 2, right_bond).
The state is always kept in mixed-canonical form: sites left of the
orthogonality center are left-normalized, sites right of it are
right-normalized and the center tensor has unit Frobenius norm. The global
amplitude of the state lives in ``norm_scalar``.

Bitstrings are big-endian (qubit 0 is the most significant bit) and sites are
0-based.

Two normalization modes are supported:

* non-normalized (default): truncated Schmidt weights are not rescaled, the
  state norm shrinks with every truncation and encodes the accumulated loss.
* normalized: the retained Schmidt weights are rescaled to the weight the
  state had before truncation.
'''

import collections
import copy

import numpy as np
import scipy.linalg

import logging
logger = logging.getLogger(__name__)

from .utils.utility_functions import check_available_ram, bytes_of_statevector

DEFAULT_CUTOFF = 1e-12
UNITARY_TOLERANCE = 1e-10
ZERO_PROBABILITY = 1e-14
STATEVECTOR_MAX_QUBITS = 20

PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class MPSError(Exception):
    '''Base class of all errors raised by the MPS module'''


class InvalidSizeError(MPSError, ValueError):
    '''Register with no qubits or malformed tensors'''


class ZeroMatrixError(MPSError):
    '''SVD of an all-zero matrix: the branch is numerically dead'''


class DegenerateStateError(MPSError):
    '''Operation needs a state with nonzero norm'''


class ZeroProbabilityError(MPSError):
    '''Projection onto an outcome with vanishing probability'''


class SizeLimitError(MPSError):
    '''Dense operation requested above its hard qubit limit'''


class DimensionError(MPSError, ValueError):
    '''Registers or models of different size'''


class NonUnitaryError(MPSError, ValueError):
    '''Gate is not unitary within UNITARY_TOLERANCE'''


TruncationReport = collections.namedtuple('TruncationReport',
                                          ['gate_index', 'bond_index', 'kept_rank', 'discarded_weight'])


def full_bond_dim(n):
    ''' Bond dimension that represents any n-qubit state exactly '''
    return 2 ** (int(n) // 2)


def check_unitary(matrix, tolerance=UNITARY_TOLERANCE):
    matrix = np.asarray(matrix)
    deviation = np.max(np.abs(matrix.conj().T @ matrix - np.eye(matrix.shape[0])))
    if deviation > tolerance:
        raise NonUnitaryError(f"Gate deviates from unitarity by {deviation:.3e} (tolerance {tolerance})")


def left_isometry_error(tensor):
    ''' max |sum_s A^s^dagger A^s - I| '''
    l, d, r = tensor.shape
    m = tensor.reshape(l * d, r)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(r)))) if r else 0.0


def right_isometry_error(tensor):
    ''' max |sum_s A^s A^s^dagger - I| '''
    l, d, r = tensor.shape
    m = tensor.reshape(l, d * r)
    return float(np.max(np.abs(m @ m.conj().T - np.eye(l)))) if l else 0.0


def _qr_positive(matrix):
    '''Economic QR with a nonnegative diagonal of R, so isometries map to themselves'''
    q, r = scipy.linalg.qr(matrix, mode='economic')
    signs = np.sign(np.real(np.diag(r)))
    signs[signs == 0] = 1
    return q * signs, signs[:, None] * r


def truncated_svd(matrix, bond_cap, cutoff=DEFAULT_CUTOFF):
    '''
    SVD keeping at most ``bond_cap`` singular values whose squared weight
    exceeds ``cutoff`` times the total weight.

    Returns:
        (U, singular_values, V_adjoint, discarded_weight), with the singular
        values sorted in descending order and the discarded weight relative
        to the total sum of squared singular values.
    '''
    matrix = np.asarray(matrix)
    if bond_cap < 1:
        raise ValueError(f"Bond cap must be >= 1, got {bond_cap}")
    if cutoff < 0:
        raise ValueError(f"Cutoff must be nonnegative, got {cutoff}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix contains non-finite entries")
    try:
        u, s, vh = scipy.linalg.svd(matrix, full_matrices=False, lapack_driver='gesdd')
    except np.linalg.LinAlgError:
        logger.warning('gesdd did not converge, falling back to gesvd')
        u, s, vh = scipy.linalg.svd(matrix, full_matrices=False, lapack_driver='gesvd')
    weights = s ** 2
    total = float(np.sum(weights))
    if total == 0.0:
        raise ZeroMatrixError("Cannot decompose an all-zero matrix")
    keep = int(np.count_nonzero(weights > cutoff * total))
    keep = max(1, min(int(bond_cap), keep))
    discarded = float(np.sum(weights[keep:]) / total)
    discarded = min(max(discarded, 0.0), 1.0)
    return u[:, :keep], s[:keep], vh[:keep, :], discarded


class MpsState():
    '''
    Chain of site tensors in mixed-canonical form.

    Args:
        tensors (list): site tensors of shape (left, 2, right)
        center (int): orthogonality center
        norm_scalar (complex): global amplitude factor
        bond_cap (int): maximum bond dimension D, defaults to the exact value
        cutoff (float): relative singular-value weight cutoff
        normalize (bool): normalized mode if True
        canonical (bool): set False if the tensors are not in canonical form yet

    Note:
        Arrays held in ``tensors`` are never modified in place, so ``copy()``
        only copies the list.
    '''

    def __init__(self, tensors, center=0, norm_scalar=1.0, bond_cap=None,
                 cutoff=DEFAULT_CUTOFF, normalize=False, canonical=True):
        self.tensors = [np.asarray(t, dtype=complex) for t in tensors]
        self.n = len(self.tensors)
        if self.n < 1:
            raise InvalidSizeError("An MPS needs at least one site")
        for k, t in enumerate(self.tensors):
            if t.ndim != 3 or t.shape[1] != 2:
                raise InvalidSizeError(f"Site {k} has shape {t.shape}, expected (left, 2, right)")
        if self.tensors[0].shape[0] != 1 or self.tensors[-1].shape[2] != 1:
            raise InvalidSizeError("Boundary bonds must have dimension 1")
        for k in range(self.n - 1):
            if self.tensors[k].shape[2] != self.tensors[k + 1].shape[0]:
                raise InvalidSizeError(f"Bond {k} dimensions do not match")
        if not 0 <= center < self.n:
            raise IndexError(f"Center {center} outside 0..{self.n - 1}")
        self.bond_cap = full_bond_dim(self.n) if bond_cap is None else int(bond_cap)
        if self.bond_cap < 1:
            raise ValueError(f"Bond cap must be >= 1, got {bond_cap}")
        if cutoff < 0:
            raise ValueError(f"Cutoff must be nonnegative, got {cutoff}")
        self.cutoff = float(cutoff)
        self.normalize = bool(normalize)
        self.center = int(center)
        self.norm_scalar = complex(norm_scalar)
        self.cum_discarded = 0.0
        self.gate_count = 0
        if canonical:
            self._renormalize_center()
        else:
            self.canonicalize(self.center)
        self.max_bond = max(self.get_bond_dims(), default=1)

    def __repr__(self):
        return f"MpsState(n={self.n}, bonds={self.get_bond_dims()}, center={self.center}, " \
               f"norm={self.get_norm():.6g}, D={self.bond_cap})"

    def copy(self):
        new = copy.copy(self)
        new.tensors = list(self.tensors)
        return new

    def get_bond_dims(self):
        return [t.shape[2] for t in self.tensors[:-1]]

    def get_norm(self):
        return abs(self.norm_scalar) * float(np.linalg.norm(self.tensors[self.center]))

    '''
    Canonical forms
    '''

    def _renormalize_center(self):
        nrm = float(np.linalg.norm(self.tensors[self.center]))
        if nrm == 0.0:
            raise DegenerateStateError("State has zero norm")
        self.tensors[self.center] = self.tensors[self.center] / nrm
        self.norm_scalar *= nrm

    def _left_step(self, k):
        ''' Left-normalize site k and push the remainder into site k+1 '''
        a = self.tensors[k]
        l, d, r = a.shape
        q, rr = _qr_positive(a.reshape(l * d, r))
        self.tensors[k] = q.reshape(l, d, q.shape[1])
        self.tensors[k + 1] = np.tensordot(rr, self.tensors[k + 1], axes=(1, 0))

    def _right_step(self, k):
        ''' Right-normalize site k and push the remainder into site k-1 '''
        a = self.tensors[k]
        l, d, r = a.shape
        q, rr = _qr_positive(a.reshape(l, d * r).conj().T)
        self.tensors[k] = q.conj().T.reshape(q.shape[1], d, r)
        self.tensors[k - 1] = np.tensordot(self.tensors[k - 1], rr.conj().T, axes=(2, 0))

    def move_center(self, target):
        ''' Relocate the orthogonality center with QR steps '''
        if not 0 <= target < self.n:
            raise IndexError(f"Site {target} outside 0..{self.n - 1}")
        while self.center < target:
            self._left_step(self.center)
            self.center += 1
        while self.center > target:
            self._right_step(self.center)
            self.center -= 1
        self._renormalize_center()

    def canonicalize(self, center=0):
        ''' Full sweep establishing the mixed-canonical form around ``center`` '''
        if not 0 <= center < self.n:
            raise IndexError(f"Site {center} outside 0..{self.n - 1}")
        for k in range(center):
            self._left_step(k)
        for k in range(self.n - 1, center, -1):
            self._right_step(k)
        self.center = center
        self._renormalize_center()
        return self

    def reversed(self):
        ''' Relabel sites n-1..0; canonical conditions swap sides accordingly '''
        new = self.copy()
        new.tensors = [t.transpose(2, 1, 0) for t in reversed(self.tensors)]
        new.center = self.n - 1 - self.center
        return new

    '''
    Gates
    '''

    def apply_one_qubit_gate(self, gate, k, allow_nonunitary=False):
        if not 0 <= k < self.n:
            raise IndexError(f"Site {k} outside 0..{self.n - 1}")
        gate = np.asarray(gate, dtype=complex)
        if gate.shape != (2, 2):
            raise ValueError(f"One-qubit gate must be 2x2, got {gate.shape}")
        if not allow_nonunitary:
            check_unitary(gate)
        else:
            self.move_center(k)
        self.tensors[k] = np.einsum('st,ltr->lsr', gate, self.tensors[k])
        if allow_nonunitary:
            self._renormalize_center()

    def apply_two_qubit_gate(self, gate, j, allow_nonunitary=False):
        '''
        Apply a 4x4 gate to sites (j, j+1), site j being the most significant
        qubit of the gate, and truncate the bond back to ``bond_cap``.

        Returns:
            TruncationReport
        '''
        if not 0 <= j < self.n - 1:
            raise IndexError(f"Two-qubit gate on sites ({j}, {j + 1}) outside a chain of {self.n}")
        gate = np.asarray(gate, dtype=complex)
        if gate.shape != (4, 4):
            raise ValueError(f"Two-qubit gate must be 4x4, got {gate.shape}")
        if not allow_nonunitary:
            check_unitary(gate)
        self.move_center(j)
        a, b = self.tensors[j], self.tensors[j + 1]
        l, r = a.shape[0], b.shape[2]
        theta = np.tensordot(a, b, axes=(2, 0))
        theta = np.einsum('abst,lstr->labr', gate.reshape(2, 2, 2, 2), theta)
        matrix = theta.reshape(l * 2, 2 * r)
        total = float(np.linalg.norm(matrix) ** 2)
        u, s, vh, discarded = truncated_svd(matrix, self.bond_cap, self.cutoff)
        kept = float(np.sqrt(np.sum(s ** 2)))
        rank = s.shape[0]
        self.tensors[j] = u.reshape(l, 2, rank)
        self.tensors[j + 1] = ((s / kept)[:, None] * vh).reshape(rank, 2, r)
        self.center = j + 1
        if self.normalize:
            self.norm_scalar *= np.sqrt(total)
        else:
            self.norm_scalar *= kept
        self.cum_discarded += discarded
        report = TruncationReport(self.gate_count, j, rank, discarded)
        self.gate_count += 1
        self.max_bond = max(self.max_bond, rank)
        if discarded > 0:
            logger.debug('Gate %d on bond %d: kept rank %d, discarded weight %.3e', report.gate_index, j, rank, discarded)
        return report

    '''
    Measurement
    '''

    def reduced_density_matrix(self, k):
        ''' Single-site density matrix of the normalized state, center moved to k '''
        self.move_center(k)
        a = self.tensors[k]
        return np.einsum('lsr,ltr->st', a, a.conj())

    def project(self, k, outcome):
        '''
        Project site k onto |outcome> and renormalize.

        Returns:
            float: probability of the outcome in the normalized state
        '''
        if outcome not in (0, 1):
            raise ValueError(f"Outcome must be 0 or 1, got {outcome}")
        rho = self.reduced_density_matrix(k)
        probability = float(np.real(rho[outcome, outcome]) / np.real(np.trace(rho)))
        if probability < ZERO_PROBABILITY:
            raise ZeroProbabilityError(f"P({outcome}) = {probability:.3e} on site {k}")
        a = self.tensors[k]
        projected = np.zeros_like(a)
        projected[:, outcome, :] = a[:, outcome, :]
        self.tensors[k] = projected
        self._renormalize_center()
        self.norm_scalar /= np.sqrt(probability)
        return probability


'''
Constructors
'''

def product_state(vectors, bond_cap=None, cutoff=DEFAULT_CUTOFF, normalize=False):
    ''' Product state from a list of normalized one-qubit vectors '''
    vectors = [np.asarray(v, dtype=complex).reshape(2) for v in vectors]
    if len(vectors) == 0:
        raise InvalidSizeError("A register needs n >= 1 qubits")
    tensors = []
    scalar = 1.0
    for v in vectors:
        nrm = float(np.linalg.norm(v))
        if nrm == 0.0:
            raise DegenerateStateError("Zero one-qubit vector")
        tensors.append((v / nrm).reshape(1, 2, 1))
        scalar *= nrm
    return MpsState(tensors, center=0, norm_scalar=scalar, bond_cap=bond_cap, cutoff=cutoff, normalize=normalize)


def plus_state(n, bond_cap=None, cutoff=DEFAULT_CUTOFF, normalize=False):
    ''' |+>^n, all bond dimensions 1 '''
    if int(n) < 1:
        raise InvalidSizeError(f"A register needs n >= 1 qubits, got {n}")
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    return product_state([plus] * int(n), bond_cap=bond_cap, cutoff=cutoff, normalize=normalize)


def basis_state(bits, bond_cap=None, cutoff=DEFAULT_CUTOFF, normalize=False):
    ''' |s> for a big-endian bit sequence '''
    vectors = []
    for b in bits:
        v = np.zeros(2)
        v[int(b)] = 1.0
        vectors.append(v)
    return product_state(vectors, bond_cap=bond_cap, cutoff=cutoff, normalize=normalize)


def from_statevector(psi, bond_cap=None, cutoff=0.0, normalize=False):
    '''
    Successive-SVD decomposition of a dense big-endian state vector.
    The result is right-canonical with center 0; ``norm_scalar`` carries the
    norm of ``psi``.
    '''
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(round(np.log2(psi.size))) if psi.size > 0 else 0
    if n < 1 or 2 ** n != psi.size:
        raise InvalidSizeError(f"State vector length {psi.size} is not a power of 2 (>= 2)")
    cap = full_bond_dim(n) if bond_cap is None else int(bond_cap)
    nrm = float(np.linalg.norm(psi))
    if nrm == 0.0:
        raise DegenerateStateError("Zero state vector")
    rest = (psi / nrm).reshape(1, -1)
    tensors = []
    discarded = 0.0
    for _ in range(n - 1):
        l = rest.shape[0]
        u, s, vh, dw = truncated_svd(rest.reshape(l * 2, -1), cap, cutoff)
        tensors.append(u.reshape(l, 2, s.shape[0]))
        rest = s[:, None] * vh
        discarded += dw
    tensors.append(rest.reshape(rest.shape[0], 2, 1))
    state = MpsState(tensors, center=n - 1, norm_scalar=nrm, bond_cap=cap, cutoff=cutoff if cutoff > 0 else DEFAULT_CUTOFF,
                     normalize=normalize)
    state.move_center(0)
    state.cum_discarded = discarded
    return state


def random_mps(n, bond_dim, seed=None, bond_cap=None, cutoff=DEFAULT_CUTOFF, normalize=False):
    ''' Random normalized MPS with bond dimensions min(bond_dim, 2^k, 2^(n-k)) '''
    rng = np.random.default_rng(seed)
    n = int(n)
    if n < 1:
        raise InvalidSizeError(f"A register needs n >= 1 qubits, got {n}")
    dims = [1] + [min(int(bond_dim), 2 ** (k + 1), 2 ** (n - k - 1)) for k in range(n - 1)] + [1]
    tensors = []
    for k in range(n):
        shape = (dims[k], 2, dims[k + 1])
        tensors.append(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    state = MpsState(tensors, bond_cap=bond_cap, cutoff=cutoff, normalize=normalize, canonical=False)
    state.norm_scalar = 1.0
    return state


'''
Functional interface: operations return new states and leave their inputs untouched
'''

def apply_1q(state, gate, k, allow_nonunitary=False):
    new = state.copy()
    new.apply_one_qubit_gate(gate, k, allow_nonunitary=allow_nonunitary)
    return new


def apply_2q(state, gate, j, allow_nonunitary=False):
    new = state.copy()
    report = new.apply_two_qubit_gate(gate, j, allow_nonunitary=allow_nonunitary)
    return new, report


def canonicalize(state, center=0):
    return state.copy().canonicalize(center)


def normalized(state):
    ''' Same state with unit norm (the global phase of the norm scalar is kept) '''
    new = state.copy()
    new.move_center(new.center)
    if new.norm_scalar == 0:
        raise DegenerateStateError("State has zero norm")
    new.norm_scalar = new.norm_scalar / abs(new.norm_scalar)
    return new


def norm(state):
    return state.get_norm()


def _check_sizes(a, b):
    if a.n != b.n:
        raise DimensionError(f"Registers of different size: {a.n} and {b.n}")


def _transfer(env, ket, bra=None, op=None):
    ''' Extend a left environment (bra_bond, ket_bond) by one site '''
    bra = ket if bra is None else bra
    if op is not None:
        ket = np.einsum('st,ltr->lsr', op, ket)
    tmp = np.tensordot(env, ket, axes=(1, 0))
    return np.tensordot(bra.conj(), tmp, axes=([0, 1], [0, 1]))


def inner(a, b):
    ''' <a|b> including both norm scalars '''
    _check_sizes(a, b)
    env = np.ones((1, 1), dtype=complex)
    for ta, tb in zip(a.tensors, b.tensors):
        env = _transfer(env, tb, bra=ta)
    return complex(env[0, 0]) * np.conj(a.norm_scalar) * b.norm_scalar


def fidelity(a, b):
    ''' |<a|b>|^2 / (<a|a><b|b>), insensitive to the norms of a and b '''
    _check_sizes(a, b)
    na = np.real(inner(a, a))
    nb = np.real(inner(b, b))
    if na <= 0 or nb <= 0:
        raise DegenerateStateError("Fidelity of a zero-norm state is undefined")
    value = abs(inner(a, b)) ** 2 / (na * nb)
    return float(min(max(value, 0.0), 1.0))


def amplitude(state, bits):
    ''' <s|psi> for a big-endian bitstring '''
    if len(bits) != state.n:
        raise DimensionError(f"Bitstring of length {len(bits)} for {state.n} qubits")
    vec = np.ones(1, dtype=complex)
    for t, b in zip(state.tensors, bits):
        vec = vec @ t[:, int(b), :]
    return complex(vec[0]) * state.norm_scalar


def _right_environments(state):
    envs = [None] * (state.n + 1)
    envs[state.n] = np.ones((1, 1), dtype=complex)
    for k in range(state.n - 1, -1, -1):
        t = state.tensors[k]
        tmp = np.tensordot(t.conj(), envs[k + 1], axes=(2, 0))
        envs[k] = np.tensordot(tmp, t, axes=([1, 2], [1, 2]))
    return envs


def _check_site(state, i):
    if not 0 <= i < state.n:
        raise IndexError(f"Site {i} outside 0..{state.n - 1}")


def _correlation(state, ops):
    ''' <psi|prod ops|psi> / <psi|psi> for a {site: 2x2 operator} map '''
    env = np.ones((1, 1), dtype=complex)
    norm_env = np.ones((1, 1), dtype=complex)
    for k, t in enumerate(state.tensors):
        env = _transfer(env, t, op=ops.get(k))
        norm_env = _transfer(norm_env, t)
    return float(np.real(env[0, 0] / norm_env[0, 0]))


def expect_z(state, i):
    ''' <Z_i> (Pauli Z: |0> -> +1, |1> -> -1) divided by <psi|psi> '''
    _check_site(state, i)
    return _correlation(state, {i: PAULI_Z})


def expect_zz(state, i, j):
    ''' <Z_i Z_j> divided by <psi|psi> for arbitrary, possibly non-adjacent sites '''
    _check_site(state, i)
    _check_site(state, j)
    if i == j:
        raise IndexError(f"expect_zz needs two different sites, got {i} twice")
    return _correlation(state, {i: PAULI_Z, j: PAULI_Z})


def z_correlations(state):
    '''
    All one- and two-point Z expectations in O(n^2) transfer steps.

    Returns:
        (z, zz, norm_squared): ``z[i] = <Z_i>`` and ``zz[i, j] = <Z_i Z_j>`` for
        i < j, both divided by the tensor-network norm; ``norm_squared`` is
        <psi|psi> including the norm scalar.
    '''
    n = state.n
    right = _right_environments(state)
    network_norm = float(np.real(right[0][0, 0]))
    if network_norm <= 0:
        raise DegenerateStateError("State has zero norm")
    z = np.zeros(n)
    zz = np.zeros((n, n))
    left = np.ones((1, 1), dtype=complex)
    for i in range(n):
        t = state.tensors[i]
        env = _transfer(left, t, op=PAULI_Z)
        z[i] = np.real(np.sum(env * right[i + 1]))
        for j in range(i + 1, n):
            tj = state.tensors[j]
            zz[i, j] = np.real(np.sum(_transfer(env, tj, op=PAULI_Z) * right[j + 1]))
            if j < n - 1:
                env = _transfer(env, tj)
        left = _transfer(left, t)
    return z / network_norm, zz / network_norm, network_norm * abs(state.norm_scalar) ** 2


def expect_ising(state, model, normalized=True):
    '''
    Energy of an Ising model (constant, fields, couplings).

    Field terms use the spin operator diag(-1, +1) (bit 1 is spin +1), so a
    basis state |s> returns exactly ``model.energy(s)``.

    Args:
        normalized (bool): divide by <psi|psi> if True, otherwise return the
            raw bilinear form <psi|H|psi> of the non-normalized state.
    '''
    if model.n != state.n:
        raise DimensionError(f"Model on {model.n} qubits, state on {state.n}")
    z, zz, norm_squared = z_correlations(state)
    value = model.constant - float(np.dot(model.fields, z))
    for (i, j), coupling in model.couplings.items():
        value += coupling * zz[i, j]
    if normalized:
        return float(value)
    return float(value * norm_squared)


def _center_schmidt_values(state):
    t = state.tensors[state.center]
    l, d, r = t.shape
    return scipy.linalg.svdvals(t.reshape(l * d, r))


def schmidt_values(state, k):
    ''' Singular values across bond k (between sites k and k+1) '''
    if not 0 <= k < state.n - 1:
        raise IndexError(f"Bond {k} outside 0..{state.n - 2}")
    work = state.copy()
    work.move_center(k)
    return _center_schmidt_values(work)


def _entropy(values):
    weights = values ** 2
    weights = weights / np.sum(weights)
    weights = weights[weights > 0]
    entropy = float(-np.sum(weights * np.log2(weights)))
    return min(max(entropy, 0.0), float(np.log2(len(values))) if len(values) > 1 else 0.0)


def entanglement_entropy(state, k):
    ''' von Neumann entropy (base 2) of the Schmidt weights across bond k '''
    return _entropy(schmidt_values(state, k))


def entropy_profile(state):
    ''' Entropies of all bonds in one left-to-right sweep of the center '''
    work = state.copy()
    profile = []
    for k in range(state.n - 1):
        work.move_center(k)
        profile.append(_entropy(_center_schmidt_values(work)))
    return np.array(profile)


def to_statevector(state, max_qubits=STATEVECTOR_MAX_QUBITS):
    ''' Dense big-endian amplitudes including the norm scalar '''
    if state.n > max_qubits:
        raise SizeLimitError(f"Dense state vector limited to {max_qubits} qubits, got {state.n}")
    check_available_ram(bytes_of_statevector(state.n))
    psi = state.tensors[0].reshape(2, -1)
    for t in state.tensors[1:]:
        psi = np.tensordot(psi, t, axes=(1, 0)).reshape(-1, t.shape[2])
    return psi.reshape(-1) * state.norm_scalar


def project_qubit(state, k, outcome):
    ''' (projected and renormalized copy, probability of the outcome) '''
    _check_site(state, k)
    new = state.copy()
    probability = new.project(k, outcome)
    return new, probability
