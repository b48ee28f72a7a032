'''
records.py
========================================

Row records of sweeps and landscapes
'''

import math

import indexed
import numpy as np

import logging
logger = logging.getLogger(__name__)

METRICS = ('r', 'x', 'F')


class SweepRow(indexed.IndexedOrderedDict):
    '''
    One metric of one sweep cell (instance, D, p).

    Args:
        instance_id (str): instance identifier
        kind (str): 'maxcut' or 'ec3'
        n (int): number of qubits
        seed (int): instance seed
        D (int): bond-dimension cap
        p (int): QAOA depth
        metric (str): 'r' (approximation ratio), 'x' (EC3 success) or 'F' (fidelity)
        value (float): metric value, NaN if the cell could not be computed
        sample (str): deterministic sample, big-endian
        sample_prob (float): probability of the sample
        norm (float): final state norm
        cum_discarded (float): summed discarded weights
        seconds (float): wall time of the cell
        status (str): 'ok' or a short reason why the value is missing

    Note:
        Getting keys: ``keys = [key for key in row.keys()]``
    '''

    def __init__(self,
                 instance_id='',
                 kind='maxcut',
                 n=0,
                 seed=0,
                 D=1,
                 p=0,
                 metric='r',
                 value=math.nan,
                 sample='',
                 sample_prob=math.nan,
                 norm=math.nan,
                 cum_discarded=0.0,
                 seconds=0.0,
                 status='ok'):

        super().__init__()

        self['instance_id'] = instance_id
        self['kind'] = kind
        self['n'] = n
        self['seed'] = seed
        self['D'] = D
        self['p'] = p
        self['metric'] = metric
        self['value'] = value
        self['sample'] = sample
        self['sample_prob'] = sample_prob
        self['norm'] = norm
        self['cum_discarded'] = cum_discarded
        self['seconds'] = seconds
        self['status'] = status

    def __call__(self, index):
        ''' This way the dictionary is callable with an index '''
        return self.values()[index]

    def get_keylist(self):
        ''' A list keys is returned for usage as a table header '''
        return [key for key in self.keys()]

    def get_cell(self):
        return (self['instance_id'], self['D'], self['p'])

    def is_computable(self):
        return self['status'] == 'ok' and not math.isnan(float(self['value']))


class SweepResult(list):
    '''
    List of SweepRow objects with per-(D, p) aggregates.

    Example:
        result = SweepResult([row1, row2])
        result.get_aggregates()[(2, 10, 'r')]['mean']
    '''

    def __init__(self, *args):
        list.__init__(self, *args)

    def get_keylist(self):
        if len(self) == 0:
            return SweepRow().get_keylist()
        return self[0].get_keylist()

    def sorted(self):
        ''' Canonical order: instance, D, p, metric '''
        return SweepResult(sorted(self, key=lambda row: (str(row['instance_id']), row['D'], row['p'],
                                                         METRICS.index(row['metric']) if row['metric'] in METRICS else 99)))

    def get_metric_rows(self, metric):
        return [row for row in self if row['metric'] == metric]

    def get_bond_dims(self):
        return sorted({row['D'] for row in self})

    def get_depths(self):
        return sorted({row['p'] for row in self})

    def get_aggregates(self):
        '''
        Mean of every metric per (D, p) over the computable rows.

        Returns:
            dict: (D, p, metric) -> {'mean', 'count', 'incomputable'}
        '''
        groups = {}
        for row in self:
            key = (row['D'], row['p'], row['metric'])
            groups.setdefault(key, []).append(row)
        aggregates = {}
        for key in sorted(groups, key=lambda k: (k[0], k[1], str(k[2]))):
            rows = groups[key]
            values = [float(row['value']) for row in rows if row.is_computable()]
            aggregates[key] = {'mean': float(np.mean(values)) if values else math.nan,
                               'count': len(values),
                               'incomputable': len(rows) - len(values)}
        return aggregates

    def get_aggregate_table(self, metric):
        '''
        Heatmap of a metric mean: rows are depths, columns bond dimensions.

        Returns:
            (depths, bond_dims, 2d-array with NaN for empty cells)
        '''
        aggregates = self.get_aggregates()
        depths, bond_dims = self.get_depths(), self.get_bond_dims()
        table = np.full((len(depths), len(bond_dims)), np.nan)
        for i, p in enumerate(depths):
            for j, D in enumerate(bond_dims):
                entry = aggregates.get((D, p, metric))
                if entry is not None:
                    table[i, j] = entry['mean']
        return depths, bond_dims, table

    def check_for_duplicated_cells(self):
        seen = set()
        for row in self:
            key = row.get_cell() + (row['metric'],)
            if key in seen:
                return True
            seen.add(key)
        return False

    def get_incomputable_count(self):
        return sum(1 for row in self if not row.is_computable())


class LandscapeRow(indexed.IndexedOrderedDict):
    ''' One cell of a p=1 cost landscape '''

    def __init__(self, gamma=0.0, beta=0.0, value=math.nan, norm=math.nan):
        super().__init__()
        self['gamma'] = gamma
        self['beta'] = beta
        self['value'] = value
        self['norm'] = norm

    def get_keylist(self):
        return [key for key in self.keys()]
