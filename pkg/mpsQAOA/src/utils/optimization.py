'''
Utilities for budgeted derivative-free optimization of QAOA angles

Latin-hypercube initial designs followed by Nelder-Mead restarts, where every
objective evaluation is counted against a hard budget.
'''

import collections

import numpy as np
import scipy.optimize
import scipy.stats.qmc

import logging
logger = logging.getLogger(__name__)

OptimizationResult = collections.namedtuple('OptimizationResult', ['x', 'value', 'n_evals', 'trace'])
'''
x: best point found; value: its objective value; n_evals: evaluations used;
trace: best-so-far value after each evaluation (non-increasing)
'''


class BudgetExhausted(Exception):
    pass


class BudgetedObjective():
    '''
    Objective wrapper counting evaluations and tracking the incumbent.

    Raises BudgetExhausted on the first call past ``max_evals``, which is how
    an optimizer that does not honor its own evaluation limit gets stopped.
    '''

    def __init__(self, func, max_evals):
        self.func = func
        self.max_evals = int(max_evals)
        self.n_evals = 0
        self.best_x = None
        self.best_value = np.inf
        self.values = []

    def __call__(self, x):
        if self.n_evals >= self.max_evals:
            raise BudgetExhausted(f'{self.max_evals} evaluations used')
        value = float(self.func(np.asarray(x, dtype=float)))
        self.n_evals += 1
        self.values.append(value)
        if value < self.best_value:
            self.best_value = value
            self.best_x = np.array(x, dtype=float)
        return value

    def remaining(self):
        return self.max_evals - self.n_evals


def latin_hypercube(n_points, lower, upper, seed=None):
    """Space-filling design of ``n_points`` in the box [lower, upper).

    Parameters:
    -----------
    n_points: int
    lower, upper: 1d-arrays of equal length
    seed: int or None

    Returns:
    --------
    2d-array of shape (n_points, len(lower))
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    assert lower.shape == upper.shape, f"Bounds of different shape {lower.shape}, {upper.shape}"
    sampler = scipy.stats.qmc.LatinHypercube(d=len(lower), seed=np.random.default_rng(seed))
    return scipy.stats.qmc.scale(sampler.random(n=int(n_points)), lower, upper)


def nelder_mead_refine(func, x0, max_evals, initial_step=None, xatol=1e-6, fatol=1e-10):
    """Nelder-Mead descent from ``x0`` using at most ``max_evals`` evaluations.

    The starting point is evaluated first, so the result is never worse than x0.

    Parameters:
    -----------
    func: callable, objective of a 1d-array
    x0: 1d-array, starting point
    max_evals: int, hard limit on objective calls (>= 1)
    initial_step: float or 1d-array, edge lengths of the initial simplex

    Returns:
    --------
    OptimizationResult
    """
    x0 = np.asarray(x0, dtype=float)
    objective = BudgetedObjective(func, max_evals)
    if max_evals < 1:
        return OptimizationResult(x0, np.inf, 0, np.array([]))
    objective(x0)
    options = {'maxfev': int(max_evals), 'maxiter': 10 * int(max_evals) + 10, 'xatol': xatol, 'fatol': fatol}
    if initial_step is not None:
        step = np.broadcast_to(np.asarray(initial_step, dtype=float), x0.shape)
        options['initial_simplex'] = np.vstack([x0] + [x0 + step[i] * np.eye(len(x0))[i] for i in range(len(x0))])
    try:
        scipy.optimize.minimize(objective, x0, method='Nelder-Mead', options=options)
    except BudgetExhausted:
        pass
    trace = np.minimum.accumulate(np.array(objective.values))
    return OptimizationResult(objective.best_x, objective.best_value, objective.n_evals, trace)


def split_budget(total, parts):
    ''' Integer shares of ``total`` summing to it, the remainder going to the first parts '''
    base, remainder = divmod(int(total), int(parts))
    return [base + (1 if i < remainder else 0) for i in range(int(parts))]


def multistart_minimize(func, lower, upper, n_init, total_evals, n_restarts=4, seed=None,
                        initial_step=None, map_jobs=None):
    """Latin-hypercube design followed by budgeted Nelder-Mead restarts.

    The ``n_restarts`` best design points (ties by design index) seed the
    restarts, which share the remaining ``total_evals - n_init`` evaluations.
    Restart results are merged in restart order, so the result does not
    depend on how ``map_jobs`` schedules them.

    Parameters:
    -----------
    map_jobs: callable(func, args_list) -> list of results in input order.
        Defaults to a sequential map.

    Returns:
    --------
    OptimizationResult with n_evals <= total_evals
    """
    if n_init < 1 or total_evals < n_init:
        raise ValueError(f"Budget needs 1 <= n_init <= total_evals, got ({n_init}, {total_evals})")
    design = latin_hypercube(n_init, lower, upper, seed)
    values = np.array([float(func(x)) for x in design])

    n_restarts = max(0, min(int(n_restarts), n_init))
    remaining = total_evals - n_init
    if remaining == 0 or n_restarts == 0:
        starts, shares = [], []
    else:
        order = np.argsort(values, kind='stable')
        starts = [design[i] for i in order[:n_restarts]]
        shares = split_budget(remaining, n_restarts)

    args_list = [(func, x0, share, initial_step) for x0, share in zip(starts, shares)]
    if map_jobs is None:
        results = [nelder_mead_refine(*args) for args in args_list]
    else:
        results = map_jobs(nelder_mead_refine, args_list)

    best = int(np.argmin(values))
    best_x, best_value = design[best], float(values[best])
    all_values = list(values)
    for result in results:
        if result.value < best_value:
            best_x, best_value = result.x, result.value
        all_values.extend(result.trace)
    n_evals = n_init + sum(r.n_evals for r in results)
    assert n_evals <= total_evals
    trace = np.minimum.accumulate(np.array(all_values))
    logger.info('Multistart: %d evaluations, best value %.8g', n_evals, best_value)
    return OptimizationResult(np.asarray(best_x, dtype=float), best_value, n_evals, trace)
