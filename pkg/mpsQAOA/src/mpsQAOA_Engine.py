'''
mpsQAOA engine
==============

Runs compiled QAOA circuits on bond-capped MPS registers and evaluates
performance metrics over (bond dimension, depth) grids.

A depth-p run applies the first p steps of a master schedule. All depths of a
sweep are therefore snapshots of a single evolution with the largest depth,
and the snapshots are identical to separate runs at each depth.
'''

import collections
import math
import time

import numpy as np

import logging
logger = logging.getLogger(__name__)

from .mpsQAOA_MPS import (MPSError, SizeLimitError, plus_state, fidelity, entropy_profile, full_bond_dim,
                          DEFAULT_CUTOFF, STATEVECTOR_MAX_QUBITS)
from .mpsQAOA_Compiler import compile_qaoa
from .mpsQAOA_Problems import brute_force_ground, ec3_satisfied, BRUTE_FORCE_MAX_QUBITS
from .mpsQAOA_Sampler import deterministic_sample
from .mpsQAOA_State import mpsQAOA_StateSingleton
from .mpsQAOA_Workers import run_jobs
from .utils.records import SweepRow, SweepResult
from .utils.utility_functions import bits_to_string

MODES = ('non-normalized', 'normalized')

FidelityGrid = collections.namedtuple('FidelityGrid', ['depths', 'bond_dims', 'values'])
''' values[i, j] is the fidelity at depths[i], bond_dims[j] '''


class RunDiagnostics():
    '''
    Attributes:
        max_bond (int): largest bond dimension reached during the run
        cum_discarded (float): summed discarded weights of all truncations
        final_norm (float): norm of the returned state
        wall_time (float): seconds spent applying gates
        gate_count (int): two-qubit gates applied
        max_entropy (float or None): largest bond entropy of the final state
        truncations (list): the last TruncationReports (bounded ring)
    '''

    def __init__(self, max_bond, cum_discarded, final_norm, wall_time, gate_count, max_entropy=None, truncations=()):
        self.max_bond = max_bond
        self.cum_discarded = cum_discarded
        self.final_norm = final_norm
        self.wall_time = wall_time
        self.gate_count = gate_count
        self.max_entropy = max_entropy
        self.truncations = list(truncations)

    def __repr__(self):
        return f"RunDiagnostics(max_bond={self.max_bond}, cum_discarded={self.cum_discarded:.3e}, " \
               f"final_norm={self.final_norm:.12g}, wall_time={self.wall_time:.3f}s)"

    def to_dict(self):
        return {'max_bond': self.max_bond, 'cum_discarded': self.cum_discarded, 'final_norm': self.final_norm,
                'wall_time': self.wall_time, 'gate_count': self.gate_count, 'max_entropy': self.max_entropy}


def is_normalized_mode(mode):
    if mode not in MODES:
        raise ValueError(f"Unknown normalization mode '{mode}', expected one of {MODES}")
    return mode == 'normalized'


class QaoaEvolution():
    '''
    One bond-capped evolution of a compiled circuit, advanced step by step
    from |+>^n.
    '''

    def __init__(self, circuit, bond_cap, epsilon=DEFAULT_CUTOFF, mode='non-normalized', ring_size=64):
        if bond_cap < 1:
            raise ValueError(f"Bond cap must be >= 1, got {bond_cap}")
        self.circuit = circuit
        self.bond_cap = int(bond_cap)
        self.state = plus_state(circuit.n, bond_cap=bond_cap, cutoff=epsilon, normalize=is_normalized_mode(mode))
        self.step = 0
        self.ring = collections.deque(maxlen=max(int(ring_size), 0))
        self.wall_time = 0.0

    def advance(self):
        start = time.perf_counter()
        for op in self.circuit.layers[self.step]:
            if op.kind == 'two-qubit':
                self.ring.append(self.state.apply_two_qubit_gate(op.matrix, op.sites[0]))
            else:
                self.state.apply_one_qubit_gate(op.matrix, op.sites[0])
        self.step += 1
        self.wall_time += time.perf_counter() - start

    def advance_to(self, depth):
        if depth > self.circuit.p:
            raise ValueError(f"Depth {depth} exceeds the compiled depth {self.circuit.p}")
        while self.step < depth:
            self.advance()

    def snapshot(self, record_entropy=False):
        '''
        Copy of the current state in logical qubit order and its diagnostics.

        The odd-even network reverses the chain once per step, which is undone
        by relabeling sites instead of applying gates.
        '''
        state = self.state.copy()
        if self.step % 2 == 1:
            state = state.reversed()
        max_entropy = float(np.max(entropy_profile(state), initial=0.0)) if record_entropy else None
        diagnostics = RunDiagnostics(state.max_bond, state.cum_discarded, state.get_norm(), self.wall_time,
                                     state.gate_count, max_entropy, self.ring)
        return state, diagnostics


def run_qaoa(model, schedule, D, epsilon=DEFAULT_CUTOFF, mode='non-normalized', ring_size=64, record_entropy=False):
    '''
    Apply the compiled QAOA circuit of ``schedule`` to |+>^n.

    Returns:
        (MpsState in logical qubit order, RunDiagnostics)
    '''
    circuit = compile_qaoa(model, schedule)
    evolution = QaoaEvolution(circuit, D, epsilon, mode, ring_size)
    evolution.advance_to(circuit.p)
    state, diagnostics = evolution.snapshot(record_entropy)
    logger.debug(f'run_qaoa n={model.n} p={circuit.p} D={D}: {diagnostics}')
    return state, diagnostics


def run_qaoa_prefixes(model, schedule, depths, D, epsilon=DEFAULT_CUTOFF, mode='non-normalized', ring_size=64,
                      record_entropy=False):
    '''
    One evolution with the largest requested depth, snapshotted at every depth.

    Returns:
        dict depth -> (MpsState, RunDiagnostics)
    '''
    depths = sorted(set(int(p) for p in depths))
    if not depths or depths[0] < 0:
        raise ValueError(f"Depths must be a non-empty list of non-negative integers, got {depths}")
    if depths[-1] > len(schedule.gammas):
        raise ValueError(f"Schedule of length {len(schedule.gammas)} cannot provide depth {depths[-1]}")
    circuit = compile_qaoa(model, schedule.prefix(depths[-1]))
    evolution = QaoaEvolution(circuit, D, epsilon, mode, ring_size)
    snapshots = {}
    for p in depths:
        evolution.advance_to(p)
        snapshots[p] = evolution.snapshot(record_entropy)
    return snapshots


def approximation_ratio(model, bits, c_min):
    ''' Energy of the bitstring divided by the minimum energy (c_min < 0) '''
    if not c_min < 0:
        raise ValueError(f"The approximation ratio needs a negative minimum energy, got {c_min}")
    return model.energy(bits) / c_min


def _minimum_energy(instance, model):
    c_min = instance.get_min_energy()
    if c_min is None and instance.n <= BRUTE_FORCE_MAX_QUBITS:
        c_min = brute_force_ground(model).energy
    return c_min


def _cell_rows(instance, model, D, p, state, diagnostics, metric_kind, c_min, reference, seconds):
    base = {'instance_id': instance.instance_id, 'kind': instance.kind, 'n': instance.n, 'seed': instance.seed,
            'D': D, 'p': p}
    sample = deterministic_sample(state)
    common = dict(base, sample=bits_to_string(sample.bits), sample_prob=sample.probability,
                  norm=diagnostics.final_norm, cum_discarded=diagnostics.cum_discarded, seconds=seconds)
    rows = []
    if metric_kind == 'x':
        value = 1.0 if ec3_satisfied(instance, sample.bits) else 0.0
        rows.append(SweepRow(metric='x', value=value, **common))
    elif c_min is None:
        rows.append(SweepRow(metric='r', status='no-certificate', **common))
    elif not c_min < 0:
        # an edgeless graph has c_min = 0, r is undefined
        rows.append(SweepRow(metric='r', status='degenerate-cmin', **common))
    else:
        rows.append(SweepRow(metric='r', value=approximation_ratio(model, sample.bits, c_min), **common))
    if reference is not None:
        rows.append(SweepRow(metric='F', value=fidelity(state, reference), **common))
    return rows


def _failed_rows(instance, D, p, metric_kind, with_fidelity, reason):
    base = {'instance_id': instance.instance_id, 'kind': instance.kind, 'n': instance.n, 'seed': instance.seed,
            'D': D, 'p': p, 'status': reason}
    rows = [SweepRow(metric=metric_kind, **base)]
    if with_fidelity:
        rows.append(SweepRow(metric='F', **base))
    return rows


def sweep_instance(instance, schedule, bond_dims, depths, epsilon=DEFAULT_CUTOFF, mode='non-normalized',
                   metric_kind='auto', with_fidelity=True, max_fidelity_qubits=STATEVECTOR_MAX_QUBITS):
    '''
    All (D, p) cells of one instance. The runs of all bond dimensions advance
    in lockstep next to an exact reference run, so no reference state has to
    be stored per depth. A run that fails marks its remaining cells
    incomputable; the other runs carry on.
    '''
    model = instance.to_ising()
    if metric_kind == 'auto':
        metric_kind = 'x' if instance.kind == 'ec3' else 'r'
    depths = sorted(set(int(p) for p in depths))
    bond_dims = sorted(set(int(D) for D in bond_dims))
    with_fidelity = with_fidelity and instance.n <= max_fidelity_qubits
    c_min = _minimum_energy(instance, model) if metric_kind == 'r' else None

    circuit = compile_qaoa(model, schedule.prefix(depths[-1]))
    full = full_bond_dim(instance.n)
    evolutions = {D: QaoaEvolution(circuit, D, epsilon, mode) for D in bond_dims}
    reference = None
    if with_fidelity:
        exact = [D for D in bond_dims if D >= full]
        reference = evolutions[exact[0]] if exact else QaoaEvolution(circuit, full, epsilon, mode)
    failures = {}

    rows = []
    for p in depths:
        reference_state = None
        if reference is not None:
            try:
                reference.advance_to(p)
                reference_state = reference.snapshot()[0]
            except MPSError:
                logger.exception(f'{instance.instance_id} exact reference failed at p={p}')
                reference = None
        for D, evolution in evolutions.items():
            if D in failures:
                mpsQAOA_StateSingleton().increment('cells_failed')
                rows.extend(_failed_rows(instance, D, p, metric_kind, with_fidelity, failures[D]))
                continue
            try:
                before = evolution.wall_time
                evolution.advance_to(p)
                seconds = evolution.wall_time - before
                state, diagnostics = evolution.snapshot()
                rows.extend(_cell_rows(instance, model, D, p, state, diagnostics, metric_kind, c_min,
                                       reference_state, seconds))
                if with_fidelity and reference_state is None:
                    rows.append(_failed_rows(instance, D, p, 'F', False, 'no-reference')[0])
            except MPSError as error:
                logger.exception(f'{instance.instance_id} D={D} p={p} incomputable')
                failures[D] = type(error).__name__
                mpsQAOA_StateSingleton().increment('cells_failed')
                rows.extend(_failed_rows(instance, D, p, metric_kind, with_fidelity, failures[D]))
    logger.info(f'Swept {instance.instance_id}: {len(bond_dims)} bond dims x {len(depths)} depths')
    return rows


def _schedule_lookup(schedule_source):
    if callable(schedule_source):
        return schedule_source
    if isinstance(schedule_source, dict):
        return lambda instance: schedule_source[instance.instance_id]
    return lambda instance: schedule_source


def sweep(instances, schedule_source, bond_dims, depths, metric_kind='auto', epsilon=DEFAULT_CUTOFF,
          mode='non-normalized', threads=1, with_fidelity=True, max_fidelity_qubits=STATEVECTOR_MAX_QUBITS):
    '''
    Deterministic sample and metric for every (instance, D, p) cell.

    Args:
        schedule_source: one master schedule for all instances, a dict
            instance_id -> schedule, or a callable instance -> schedule. Each
            depth p uses the first p angle pairs.
        metric_kind (str): 'auto' (r for MaxCut, x for EC3), 'r' or 'x'
        threads (int): instances run in parallel; results do not depend on it

    Returns:
        SweepResult sorted by instance, D, p, metric
    '''
    if metric_kind not in ('auto', 'r', 'x'):
        raise ValueError(f"Unknown metric kind '{metric_kind}'")
    if not bond_dims or not depths:
        raise ValueError("Sweep needs at least one bond dimension and one depth")
    lookup = _schedule_lookup(schedule_source)
    p_max = max(depths)
    args_list = []
    for instance in instances:
        schedule = lookup(instance)
        if len(schedule.gammas) < p_max:
            raise ValueError(f"Schedule for {instance.instance_id} has {len(schedule.gammas)} steps, sweep needs {p_max}")
        args_list.append((instance, schedule, bond_dims, depths, epsilon, mode, metric_kind, with_fidelity,
                          max_fidelity_qubits))

    state = mpsQAOA_StateSingleton()
    state.set_parameters({'cells_total': len(args_list), 'cells_done': 0, 'cells_failed': 0})
    per_instance = run_jobs(sweep_instance, args_list, threads=threads, progress_key='cells_done')
    result = SweepResult([row for rows in per_instance for row in rows]).sorted()
    logger.info(f'Sweep finished: {len(result)} rows, {result.get_incomputable_count()} incomputable')
    return result


def fidelity_grid(instance, schedule, bond_dims, depths, epsilon=DEFAULT_CUTOFF, mode='non-normalized',
                  max_qubits=STATEVECTOR_MAX_QUBITS):
    ''' Fidelity of every (D, p) state with the exact state at the same depth '''
    if instance.n > max_qubits:
        raise SizeLimitError(f"Fidelity grid needs the exact state, limited to {max_qubits} qubits, got {instance.n}")
    rows = sweep_instance(instance, schedule, bond_dims, depths, epsilon, mode, with_fidelity=True,
                          max_fidelity_qubits=max_qubits)
    depths = sorted(set(int(p) for p in depths))
    bond_dims = sorted(set(int(D) for D in bond_dims))
    values = np.full((len(depths), len(bond_dims)), math.nan)
    for row in rows:
        if row['metric'] == 'F':
            values[depths.index(row['p']), bond_dims.index(row['D'])] = row['value']
    return FidelityGrid(depths, bond_dims, values)
