'''
mpsQAOA deterministic sampling
==============================

Greedy qubit-by-qubit projection onto the locally more probable outcome.
This is not the global argmax of |<s|psi>|^2, but the returned bitstring
always has probability >= 2^-n.
'''

import collections

import numpy as np

import logging
logger = logging.getLogger(__name__)

from .mpsQAOA_MPS import normalized
from .utils.utility_functions import bits_to_string

SampleOutcome = collections.namedtuple('SampleOutcome', ['bits', 'probability', 'conditionals'])
'''
bits: tuple of 0/1, big-endian; probability: |<s|psi>|^2 of the normalized
state; conditionals: probability of each chosen bit given the previous ones
'''


def deterministic_sample(state):
    '''
    For k = 0..n-1: move the center to k, read the conditional one-site
    density matrix, pick 0 only if P(0) > P(1) (ties go to 1), project and
    renormalize.

    The input state is not modified.
    '''
    work = normalized(state)
    bits, conditionals = [], []
    for k in range(work.n):
        rho = work.reduced_density_matrix(k)
        p0, p1 = float(np.real(rho[0, 0])), float(np.real(rho[1, 1]))
        bit = 0 if p0 > p1 else 1
        conditionals.append(work.project(k, bit))
        bits.append(bit)
    probability = float(np.prod(conditionals))
    logger.debug('Sample %s with probability %.6g', bits_to_string(bits), probability)
    return SampleOutcome(tuple(bits), probability, tuple(conditionals))
