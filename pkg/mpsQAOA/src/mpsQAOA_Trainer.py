'''
mpsQAOA trainer
===============

Classical optimization of QAOA angles on exact and bond-capped cost
landscapes: p=1 grid search, linear-ramp extrapolation to deeper circuits,
shared angle sets over several instances, budgeted multi-start optimization
and success percentages.

Angle box: gamma in [0, pi) for models with integer fields and couplings
(ZZ and Z phases then have period pi), [0, 2*pi) otherwise; beta in [0, pi/2).
The trainer works on non-normalized states unless told otherwise.
'''

import copy

import numpy as np

import logging
logger = logging.getLogger(__name__)

from .mpsQAOA_MPS import plus_state, expect_ising, amplitude, full_bond_dim
from .mpsQAOA_Compiler import compile_cost_layer, compile_mixer_layer
from .mpsQAOA_Engine import run_qaoa, is_normalized_mode
from .mpsQAOA_Workers import run_jobs, job_mapper
from .utils.optimization import nelder_mead_refine, multistart_minimize
from .utils.records import LandscapeRow
from .utils.utility_functions import derive_seed

BUDGET_PAIRS = ((125, 300), (150, 400), (200, 500), (250, 600), (300, 700))
''' (initial design points, total objective evaluations) '''

TIE_TOLERANCE = 1e-12


class AngleSchedule():
    '''
    QAOA angles (radians) for depth p.

    Args:
        gammas, betas (sequence): p cost and p mixer angles
        provenance (dict): how the angles were obtained (method, D, budget, seed ...)
        kind (str): problem kind the angles were trained for, if any
    '''

    def __init__(self, gammas, betas, provenance=None, kind=None):
        self.gammas = np.array(gammas, dtype=float).reshape(-1)
        self.betas = np.array(betas, dtype=float).reshape(-1)
        if self.gammas.shape != self.betas.shape:
            raise ValueError(f"{len(self.gammas)} gammas and {len(self.betas)} betas")
        if not (np.all(np.isfinite(self.gammas)) and np.all(np.isfinite(self.betas))):
            raise ValueError("Angles must be finite")
        self.provenance = dict(provenance or {})
        self.kind = kind

    @property
    def p(self):
        return len(self.gammas)

    def __repr__(self):
        return f"AngleSchedule(p={self.p}, method={self.provenance.get('method', '?')})"

    def __eq__(self, other):
        return isinstance(other, AngleSchedule) and np.array_equal(self.gammas, other.gammas) \
            and np.array_equal(self.betas, other.betas)

    def prefix(self, p):
        ''' The first p angle pairs '''
        if not 0 <= p <= self.p:
            raise ValueError(f"Prefix length {p} outside 0..{self.p}")
        if p == self.p:
            return self
        provenance = dict(self.provenance, prefix_of=self.p)
        return AngleSchedule(self.gammas[:p], self.betas[:p], provenance, self.kind)

    def to_vector(self):
        return np.concatenate([self.gammas, self.betas])

    @classmethod
    def from_vector(cls, x, provenance=None, kind=None):
        x = np.asarray(x, dtype=float)
        p = len(x) // 2
        return cls(x[:p], x[p:], provenance, kind)

    def to_dict(self):
        return {'kind': self.kind, 'p': self.p, 'gamma': self.gammas.tolist(), 'beta': self.betas.tolist(),
                'provenance': copy.deepcopy(self.provenance)}

    @classmethod
    def from_dict(cls, data):
        schedule = cls(data['gamma'], data['beta'], data.get('provenance'), data.get('kind'))
        if schedule.p != int(data['p']):
            raise ValueError(f"Angle file declares p={data['p']} but holds {schedule.p} angle pairs")
        return schedule


def angle_box(model):
    ''' (gamma period, beta period) of the p=1 landscape '''
    gamma_max = np.pi if model.is_integer() else 2 * np.pi
    return gamma_max, np.pi / 2


def angle_grid(model, resolution):
    gamma_max, beta_max = angle_box(model)
    return (np.linspace(0, gamma_max, int(resolution), endpoint=False),
            np.linspace(0, beta_max, int(resolution), endpoint=False))


def qaoa_cost(model, schedule, D, epsilon=0.0, mode='non-normalized'):
    ''' Cost C_D: energy expectation of the bond-capped QAOA state '''
    state, _ = run_qaoa(model, schedule, D, epsilon, mode, ring_size=0)
    return expect_ising(state, model, normalized=is_normalized_mode(mode))


'''
Landscapes
'''

class Landscape():
    '''
    p=1 cost values on a (gamma, beta) grid.

    Attributes:
        values (2d-array): values[i, j] at gammas[i], betas[j]
        norms (2d-array): state norms of the same cells
    '''

    def __init__(self, gammas, betas, values, norms, D, mode):
        self.gammas = np.asarray(gammas, dtype=float)
        self.betas = np.asarray(betas, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.norms = np.asarray(norms, dtype=float)
        assert self.values.shape == (len(self.gammas), len(self.betas))
        self.D = D
        self.mode = mode

    def argmin(self):
        '''
        Grid indices of the minimum; among cells within TIE_TOLERANCE of it
        the smallest gamma, then the smallest beta wins.
        '''
        flat = self.values.reshape(-1)
        first = int(np.nonzero(flat <= np.min(flat) + TIE_TOLERANCE)[0][0])
        return np.unravel_index(first, self.values.shape)

    def get_minimum(self):
        i, j = self.argmin()
        return self.gammas[i], self.betas[j], self.values[i, j]

    def to_rows(self):
        return [LandscapeRow(gamma=float(g), beta=float(b), value=float(self.values[i, j]), norm=float(self.norms[i, j]))
                for i, g in enumerate(self.gammas) for j, b in enumerate(self.betas)]


def _landscape_row(model, gamma, betas, D, epsilon, mode):
    ''' One gamma row: the cost layer is applied once, the mixer per beta '''
    normalize = is_normalized_mode(mode)
    state = plus_state(model.n, bond_cap=D, cutoff=epsilon, normalize=normalize)
    ops, _ = compile_cost_layer(model, gamma)
    for op in ops:
        if op.kind == 'two-qubit':
            state.apply_two_qubit_gate(op.matrix, op.sites[0])
        else:
            state.apply_one_qubit_gate(op.matrix, op.sites[0])
    values, norms = [], []
    for beta in betas:
        mixed = state.copy()
        for op in compile_mixer_layer(model.n, beta):
            mixed.apply_one_qubit_gate(op.matrix, op.sites[0])
        mixed = mixed.reversed()
        values.append(expect_ising(mixed, model, normalized=normalize))
        norms.append(mixed.get_norm())
    return values, norms


def landscape_p1(model, D, gammas, betas, mode='non-normalized', epsilon=0.0, threads=1):
    if len(gammas) == 0 or len(betas) == 0:
        raise ValueError("Landscape grids must not be empty")
    betas = [float(b) for b in betas]
    args_list = [(model, float(g), betas, D, epsilon, mode) for g in gammas]
    rows = run_jobs(_landscape_row, args_list, threads=threads)
    values = np.array([r[0] for r in rows])
    norms = np.array([r[1] for r in rows])
    return Landscape(gammas, betas, values, norms, D, mode)


def norm_scan_p1(model, D, gammas, beta=0.0, epsilon=0.0):
    ''' Norm of the non-normalized p=1 state versus gamma '''
    norms = []
    for gamma in gammas:
        state, diagnostics = run_qaoa(model, AngleSchedule([gamma], [beta]), D, epsilon, 'non-normalized', ring_size=0)
        norms.append(diagnostics.final_norm)
    return np.array(norms)


def grid_search_p1(model, D, resolution, mode='non-normalized', epsilon=0.0, threads=1, kind=None):
    if resolution < 8:
        raise ValueError(f"Grid resolution must be >= 8 per axis, got {resolution}")
    gammas, betas = angle_grid(model, resolution)
    landscape = landscape_p1(model, D, gammas, betas, mode, epsilon, threads)
    gamma, beta, value = landscape.get_minimum()
    provenance = {'method': 'grid', 'D': D, 'resolution': int(resolution), 'mode': mode, 'value': float(value)}
    logger.info(f'Grid search p=1 D={D}: gamma={gamma:.6f} beta={beta:.6f} cost={value:.8g}')
    return AngleSchedule([gamma], [beta], provenance, kind)


'''
Deeper schedules
'''

def extrapolate_schedule(p1_opt, p):
    '''
    Linear ramp anchored at the p=1 optimum (g, b):
    gamma_j = g * j / p and beta_j = b * (1 - (j - 1) / p) for j = 1..p.
    '''
    if p < 1:
        raise ValueError(f"Extrapolation depth must be >= 1, got {p}")
    if p1_opt.p != 1:
        raise ValueError(f"Extrapolation starts from a p=1 schedule, got p={p1_opt.p}")
    if p == 1:
        return p1_opt
    gamma, beta = p1_opt.gammas[0], p1_opt.betas[0]
    j = np.arange(1, p + 1)
    provenance = {'method': 'extrapolated', 'ramp': 'linear', 'anchor': [float(gamma), float(beta)],
                  'source': p1_opt.provenance}
    return AngleSchedule(gamma * j / p, beta * (1 - (j - 1) / p), provenance, p1_opt.kind)


def refine_schedule(model, schedule, D, max_evals, mode='non-normalized', epsilon=0.0, initial_step=0.05):
    '''
    Nelder-Mead refinement of all 2p angles; the starting schedule is
    evaluated first, so the result is never worse.

    Returns:
        (refined AngleSchedule, cost before, cost after)
    '''
    def cost(x):
        return qaoa_cost(model, AngleSchedule.from_vector(x), D, epsilon, mode)

    if max_evals < 1:
        value = cost(schedule.to_vector())
        return schedule, value, value
    result = nelder_mead_refine(cost, schedule.to_vector(), max_evals, initial_step=initial_step)
    before = float(result.trace[0])
    provenance = {'method': 'refined', 'D': D, 'evals': result.n_evals, 'value': result.value,
                  'source': schedule.provenance}
    return AngleSchedule.from_vector(result.x, provenance, schedule.kind), before, result.value


def _train_member(instance, D, p_max, resolution, refine_evals, mode, epsilon):
    model = instance.to_ising()
    p1 = grid_search_p1(model, D, resolution, mode, epsilon, kind=instance.kind)
    schedule = extrapolate_schedule(p1, p_max)
    refined, before, after = refine_schedule(model, schedule, D, refine_evals, mode, epsilon)
    logger.info(f'{instance.instance_id}: refined cost {before:.8g} -> {after:.8g}')
    return refined


def shared_angle_set(instances, D, p_max, resolution=40, refine_evals=200, mode='non-normalized', epsilon=0.0,
                     threads=1, return_members=False):
    '''
    Grid search, extrapolation to p_max and simplex refinement per instance,
    followed by the component-wise mean of the refined schedules.
    '''
    if len(instances) == 0:
        raise ValueError("A shared angle set needs at least one instance")
    kinds = {instance.kind for instance in instances}
    if len(kinds) != 1:
        raise ValueError(f"All instances must be of the same kind, got {sorted(kinds)}")
    args_list = [(instance, D, p_max, resolution, refine_evals, mode, epsilon) for instance in instances]
    members = run_jobs(_train_member, args_list, threads=threads)
    gammas = np.mean([m.gammas for m in members], axis=0)
    betas = np.mean([m.betas for m in members], axis=0)
    provenance = {'method': 'shared', 'D': D, 'p_max': p_max, 'resolution': resolution,
                  'refine_evals': refine_evals, 'mode': mode,
                  'instances': [instance.instance_id for instance in instances]}
    schedule = AngleSchedule(gammas, betas, provenance, kinds.pop())
    if return_members:
        return schedule, members
    return schedule


def global_optimize(model, p, D, budget, seed, mode='non-normalized', epsilon=0.0, n_restarts=4, repeats=1,
                    threads=1, kind=None):
    '''
    Latin-hypercube design over the 2p-dimensional angle box, then Nelder-Mead
    restarts from the best design points within the remaining budget.

    Args:
        budget (tuple): (initial design points, total evaluations)
        repeats (int): independent repetitions with derived seeds; the best wins

    Returns:
        AngleSchedule with provenance n_evals <= total evaluations per repetition
    '''
    n_init, total = int(budget[0]), int(budget[1])
    if not (total > n_init >= 2 * p):
        raise ValueError(f"Budget {budget} needs total > init >= 2p = {2 * p}")
    gamma_max, beta_max = angle_box(model)
    lower = np.zeros(2 * p)
    upper = np.array([gamma_max] * p + [beta_max] * p)

    def cost(x):
        return qaoa_cost(model, AngleSchedule.from_vector(x), D, epsilon, mode)

    best = None
    for repeat in range(int(repeats)):
        result = multistart_minimize(cost, lower, upper, n_init, total, n_restarts=n_restarts,
                                     seed=derive_seed(seed, repeat), initial_step=0.1 * upper,
                                     map_jobs=job_mapper(threads))
        if best is None or result.value < best[1].value:
            best = (repeat, result)
    repeat, result = best
    provenance = {'method': 'multistart', 'D': D, 'budget': [n_init, total], 'seed': int(seed), 'mode': mode,
                  'n_evals': int(result.n_evals), 'value': float(result.value), 'repeats': int(repeats),
                  'best_repeat': repeat}
    logger.info(f'Global optimization p={p} D={D} budget={budget}: cost {result.value:.8g}')
    return AngleSchedule.from_vector(result.x, provenance, kind)


'''
Success percentages
'''

def _check_solutions(solutions):
    if len(solutions) == 0:
        raise ValueError("Success percentage needs a non-empty solution set")


def success_percentage_of_state(state, solutions):
    ''' 100 * sum_k |<s_k|psi>|^2 / <psi|psi> '''
    _check_solutions(solutions)
    norm_squared = state.get_norm() ** 2
    total = sum(abs(amplitude(state, s)) ** 2 for s in solutions)
    return float(min(max(100.0 * total / norm_squared, 0.0), 100.0))


def success_percentage_exact(model, schedule, j, solutions):
    ''' Exact (full bond dimension) state built from the first j angle pairs '''
    _check_solutions(solutions)
    if j > schedule.p:
        raise ValueError(f"j={j} exceeds the schedule depth {schedule.p}")
    state, _ = run_qaoa(model, schedule.prefix(j), full_bond_dim(model.n), 0.0, 'normalized', ring_size=0)
    return success_percentage_of_state(state, solutions)


def success_percentage_approx(model, schedule, j, D, solutions, epsilon=0.0):
    ''' Bond-capped state built from the first j angle pairs, renormalized '''
    _check_solutions(solutions)
    if j > schedule.p:
        raise ValueError(f"j={j} exceeds the schedule depth {schedule.p}")
    state, _ = run_qaoa(model, schedule.prefix(j), D, epsilon, 'non-normalized', ring_size=0)
    return success_percentage_of_state(state, solutions)


def normalized_success(eta_candidate, eta_reference_exact):
    ''' 100 * candidate / reference; may exceed 100 '''
    if not eta_reference_exact > 0:
        raise ValueError(f"Reference success percentage must be positive, got {eta_reference_exact}")
    return 100.0 * eta_candidate / eta_reference_exact


def success_table(model, solutions, schedules, exact_schedule, depths, epsilon=0.0):
    '''
    Success percentages of angles trained at several bond dimensions.

    Args:
        schedules (dict): D -> AngleSchedule trained with bond cap D
        exact_schedule (AngleSchedule): angles trained on the exact landscape

    Returns:
        list of dicts with D, j, eta_exact (exact state, D-trained angles),
        eta_approx (D-capped state), eta_reference and both percentages
        normalized by eta_reference (normalized, normalized_approx)
    '''
    rows = []
    for j in depths:
        reference = success_percentage_exact(model, exact_schedule, j, solutions)
        for D in sorted(schedules):
            eta_exact = success_percentage_exact(model, schedules[D], j, solutions)
            eta_approx = success_percentage_approx(model, schedules[D], j, D, solutions, epsilon)
            if reference > 0:
                normalized = normalized_success(eta_exact, reference)
                normalized_approx = normalized_success(eta_approx, reference)
            else:
                normalized = normalized_approx = float('nan')
            rows.append({'D': D, 'j': j, 'eta_exact': eta_exact, 'eta_approx': eta_approx,
                         'eta_reference': reference, 'normalized': normalized,
                         'normalized_approx': normalized_approx})
    return rows


def angle_statistics(schedules):
    '''
    Per-step distribution of angles over several schedules of equal depth.

    Returns:
        dict 'gamma'/'beta' -> dict of arrays (min, q1, median, q3, max, std),
        plus 'dispersion': mean standard deviation over all angles
    '''
    if len(schedules) == 0:
        raise ValueError("Angle statistics need at least one schedule")
    depths = {s.p for s in schedules}
    if len(depths) != 1:
        raise ValueError(f"Schedules of different depths {sorted(depths)}")
    statistics = {}
    spreads = []
    for name, matrix in (('gamma', np.array([s.gammas for s in schedules])),
                         ('beta', np.array([s.betas for s in schedules]))):
        q1, median, q3 = np.percentile(matrix, [25, 50, 75], axis=0)
        std = np.std(matrix, axis=0)
        statistics[name] = {'min': matrix.min(axis=0), 'q1': q1, 'median': median, 'q3': q3,
                            'max': matrix.max(axis=0), 'std': std}
        spreads.append(std)
    statistics['dispersion'] = float(np.mean(np.concatenate(spreads)))
    return statistics
