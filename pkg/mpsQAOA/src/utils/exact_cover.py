'''
Exact-cover search (Algorithm X on dictionaries of sets)

Columns are the items to be covered, rows are the subsets that may be picked.
For an Exact Cover 3 instance the columns are the clauses and each variable is
a row covering the clauses it appears in: a solution is a set of variables set
to 1 such that every clause contains exactly one of them.
'''

import logging
logger = logging.getLogger(__name__)


class ExactCoverSolver():
    '''
    Args:
        columns (iterable): items that must be covered exactly once
        rows (dict): row name -> iterable of the columns it covers

    The search always branches on the column with the fewest candidate rows;
    a column with a single candidate therefore forces that row, which acts as
    unit propagation.
    '''

    def __init__(self, columns, rows):
        self.rows = {name: tuple(cols) for name, cols in rows.items()}
        self.columns = {c: set() for c in columns}
        for name, cols in self.rows.items():
            for c in cols:
                if c not in self.columns:
                    raise ValueError(f"Row {name} covers unknown column {c}")
                self.columns[c].add(name)
        self.nodes_visited = 0

    def solve(self):
        ''' First exact cover found (sorted list of row names) or None '''
        self.nodes_visited = 0
        columns = {c: set(r) for c, r in self.columns.items()}
        solution = self._search(columns, [])
        logger.debug('Exact cover search visited %d nodes', self.nodes_visited)
        return None if solution is None else sorted(solution)

    def _search(self, columns, partial):
        self.nodes_visited += 1
        if not columns:
            return list(partial)
        column = min(columns, key=lambda c: len(columns[c]))
        for row in sorted(columns[column]):
            partial.append(row)
            removed = self._select(columns, row)
            found = self._search(columns, partial)
            if found is not None:
                return found
            self._deselect(columns, row, removed)
            partial.pop()
        return None

    def _select(self, columns, row):
        removed = []
        for c in self.rows[row]:
            for other in columns[c]:
                for c2 in self.rows[other]:
                    if c2 != c:
                        columns[c2].discard(other)
            removed.append(columns.pop(c))
        return removed

    def _deselect(self, columns, row, removed):
        for c in reversed(self.rows[row]):
            columns[c] = removed.pop()
            for other in columns[c]:
                for c2 in self.rows[other]:
                    if c2 != c:
                        columns[c2].add(other)


def solve_exact_cover_3(n, clauses):
    '''
    Satisfying assignment of an Exact Cover 3 clause list, or None.

    Args:
        n (int): number of variables
        clauses (list): triples of 0-based variable indices

    Returns:
        tuple of n bits with exactly one set bit per clause, or None
    '''
    rows = {v: [] for v in range(n)}
    for index, clause in enumerate(clauses):
        for v in clause:
            rows[v].append(index)
    rows = {v: cols for v, cols in rows.items() if cols}
    solver = ExactCoverSolver(range(len(clauses)), rows)
    selected = solver.solve()
    if selected is None:
        return None
    bits = [0] * n
    for v in selected:
        bits[v] = 1
    return tuple(bits)
