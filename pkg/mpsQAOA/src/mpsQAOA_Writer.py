'''
mpsQAOA Writer
==============

Reads and writes the file artifacts: instance and angle files (JSON), sweep,
aggregate, landscape and success tables (CSV).

Every written file embeds the configuration and seeds needed to regenerate
it: JSON files under a ``config`` key, CSV files as '#'-prefixed header lines
that the readers skip.
'''

import csv
import json
import math
import os

import logging
logger = logging.getLogger(__name__)

from .mpsQAOA_Problems import instance_from_dict
from .mpsQAOA_Trainer import AngleSchedule
from .utils.records import SweepRow, SweepResult
from .utils.utility_functions import write_line

INSTANCE_SCHEMA = "{kind: maxcut|ec3, n, seed, adjacency (maxcut) | clauses (ec3), " \
                  "certificate: {energy, witness} optional}"
ANGLE_SCHEMA = "{kind, p, gamma[], beta[], provenance{method, D, budget, seed}}"
SWEEP_SCHEMA = ','.join(SweepRow().get_keylist())


class SchemaError(ValueError):
    ''' An input file misses a field or holds an invalid value '''


def check_writable(path):
    '''
    Raise OSError if ``path`` cannot be created, before any work is done.
    Missing parent directories are created.
    '''
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    if not os.access(directory, os.W_OK):
        raise OSError(f"Output directory is not writable: {directory}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise OSError(f"Output file is not writable: {path}")


def _jsonable(value):
    if hasattr(value, 'tolist'):
        return value.tolist()
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


class mpsQAOA_Writer():
    '''
    Writes result files stamped with a metadata dict (effective configuration,
    master seed, command line).
    '''

    def __init__(self, metadata=None):
        self.metadata = dict(metadata or {})

    def _write_header(self, file, title):
        write_line(file, 'mpsQAOA', title)
        for key in sorted(self.metadata):
            write_line(file, key, json.dumps(self.metadata[key], sort_keys=True, default=_jsonable))
        write_line(file)

    def write_json(self, path, data):
        check_writable(path)
        data = dict(data)
        data['config'] = self.metadata
        with open(path, 'w') as file:
            json.dump(data, file, indent=1, sort_keys=True, default=_jsonable)
            file.write('\n')
        logger.info(f'Written {path}')

    def write_instance(self, path, instance):
        self.write_json(path, instance.to_dict())

    def write_angles(self, path, schedule):
        self.write_json(path, schedule.to_dict())

    def write_table(self, path, title, fieldnames, rows):
        check_writable(path)
        with open(path, 'w', newline='') as file:
            self._write_header(file, title)
            writer = csv.DictWriter(file, fieldnames=fieldnames, lineterminator='\n')
            writer.writeheader()
            for row in rows:
                writer.writerow({key: _format_value(row[key]) for key in fieldnames})
        logger.info(f'Written {path} ({len(rows)} rows)')

    def write_sweep(self, path, result):
        self.write_table(path, 'sweep', result.get_keylist(), list(result))

    def write_aggregates(self, path, result):
        rows = [{'D': D, 'p': p, 'metric': metric, 'mean': entry['mean'], 'count': entry['count'],
                 'incomputable': entry['incomputable']}
                for (D, p, metric), entry in result.get_aggregates().items()]
        self.write_table(path, 'aggregates', ['D', 'p', 'metric', 'mean', 'count', 'incomputable'], rows)

    def write_landscape(self, path, landscape):
        rows = landscape.to_rows()
        self.write_table(path, f'landscape D={landscape.D} mode={landscape.mode}', rows[0].get_keylist(), rows)

    def write_norm_scan(self, path, gammas, norms):
        rows = [{'gamma': float(gamma), 'norm': float(norm)} for gamma, norm in zip(gammas, norms)]
        self.write_table(path, 'norm scan p=1 beta=0', ['gamma', 'norm'], rows)

    def write_angle_table(self, path, schedules):
        ''' One row per (label, step): label -> AngleSchedule '''
        rows = [{'label': label, 'step': j + 1, 'gamma': schedule.gammas[j], 'beta': schedule.betas[j]}
                for label, schedule in schedules.items() for j in range(schedule.p)]
        self.write_table(path, 'angles', ['label', 'step', 'gamma', 'beta'], rows)


def _format_value(value):
    if isinstance(value, float):
        return repr(float(value))
    if hasattr(value, 'item'):
        return value.item()
    return value


def _read_json(path, schema):
    try:
        with open(path) as file:
            return json.load(file)
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as error:
        raise SchemaError(f"{path} is not valid JSON ({error}); expected {schema}") from error


def _require(data, fields, path, schema):
    for field in fields:
        if field not in data:
            raise SchemaError(f"{path}: missing field '{field}'; expected {schema}")


def read_instance(path):
    data = _read_json(path, INSTANCE_SCHEMA)
    _require(data, ('kind', 'n', 'seed'), path, INSTANCE_SCHEMA)
    if data['kind'] == 'maxcut':
        _require(data, ('adjacency',), path, INSTANCE_SCHEMA)
    elif data['kind'] == 'ec3':
        _require(data, ('clauses',), path, INSTANCE_SCHEMA)
    else:
        raise SchemaError(f"{path}: invalid kind '{data['kind']}'; expected {INSTANCE_SCHEMA}")
    certificate = data.get('certificate')
    if certificate is not None:
        _require(certificate, ('energy', 'witness'), path, INSTANCE_SCHEMA)
    try:
        return instance_from_dict(data)
    except (ValueError, TypeError) as error:
        raise SchemaError(f"{path}: {error}; expected {INSTANCE_SCHEMA}") from error


def read_angles(path):
    data = _read_json(path, ANGLE_SCHEMA)
    _require(data, ('p', 'gamma', 'beta'), path, ANGLE_SCHEMA)
    try:
        return AngleSchedule.from_dict(data)
    except (ValueError, TypeError) as error:
        raise SchemaError(f"{path}: {error}; expected {ANGLE_SCHEMA}") from error


def read_instances(paths):
    return [read_instance(path) for path in sorted(paths)]


def read_csv_rows(path):
    ''' Data rows of a CSV written by mpsQAOA_Writer, metadata lines skipped '''
    with open(path, newline='') as file:
        lines = [line for line in file if not line.startswith('#')]
    return list(csv.DictReader(lines))


_INT_COLUMNS = ('n', 'seed', 'D', 'p')
_FLOAT_COLUMNS = ('value', 'sample_prob', 'norm', 'cum_discarded', 'seconds')


def read_sweep(path):
    rows = read_csv_rows(path)
    result = SweepResult()
    for line, raw in enumerate(rows, start=1):
        missing = [key for key in SweepRow().get_keylist() if key not in raw]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}; expected {SWEEP_SCHEMA}")
        try:
            values = dict(raw)
            for key in _INT_COLUMNS:
                values[key] = int(values[key])
            for key in _FLOAT_COLUMNS:
                values[key] = float(values[key])
        except ValueError as error:
            raise SchemaError(f"{path}: data row {line}: {error}") from error
        result.append(SweepRow(**{key: values[key] for key in SweepRow().get_keylist()}))
    if result.check_for_duplicated_cells():
        raise SchemaError(f"{path}: duplicated cell; expected one row per (instance, D, p, metric)")
    return result
