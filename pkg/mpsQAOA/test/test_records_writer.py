# To run the test:
# python -m unittest mpsQAOA.test.test_records_writer
import json
import math
import os
import tempfile
import unittest

import numpy as np

from mpsQAOA.src.mpsQAOA_Problems import MaxCutInstance, gen_ec3, attach_certificate
from mpsQAOA.src.mpsQAOA_Trainer import AngleSchedule, landscape_p1
from mpsQAOA.src.mpsQAOA_Writer import (mpsQAOA_Writer, SchemaError, check_writable, read_instance, read_angles,
                                        read_instances, read_csv_rows, read_sweep)
from mpsQAOA.src.utils.records import SweepRow, SweepResult

TRIANGLE = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]


def make_row(instance_id, D, p, metric, value, status='ok'):
    return SweepRow(instance_id=instance_id, n=3, D=D, p=p, metric=metric, value=value, sample='011',
                    sample_prob=0.25, norm=1.0, status=status)


class TestSweepResult(unittest.TestCase):
    def setUp(self):
        self.result = SweepResult([make_row('b', 2, 1, 'r', 0.5),
                                   make_row('a', 2, 1, 'r', 0.75),
                                   make_row('a', 2, 1, 'F', 0.9),
                                   make_row('c', 2, 1, 'r', math.nan, status='no-certificate'),
                                   make_row('a', 4, 1, 'r', 1.0)])

    def test_row_layout(self):
        row = make_row('a', 2, 1, 'r', 0.5)
        self.assertEqual(row.get_keylist()[:3], ['instance_id', 'kind', 'n'])
        self.assertEqual(row(0), 'a')
        self.assertEqual(row.get_cell(), ('a', 2, 1))

    def test_aggregates_skip_incomputable_rows(self):
        aggregates = self.result.get_aggregates()
        self.assertEqual(aggregates[(2, 1, 'r')], {'mean': 0.625, 'count': 2, 'incomputable': 1})
        self.assertEqual(aggregates[(4, 1, 'r')]['mean'], 1.0)
        self.assertEqual(self.result.get_incomputable_count(), 1)

    def test_aggregate_table(self):
        depths, bond_dims, table = self.result.get_aggregate_table('F')
        self.assertEqual((depths, bond_dims), ([1], [2, 4]))
        self.assertEqual(table[0, 0], 0.9)
        self.assertTrue(math.isnan(table[0, 1]))

    def test_canonical_order(self):
        ordered = self.result.sorted()
        self.assertEqual([(row['instance_id'], row['D'], row['metric']) for row in ordered],
                         [('a', 2, 'r'), ('a', 2, 'F'), ('a', 4, 'r'), ('b', 2, 'r'), ('c', 2, 'r')])
        self.assertFalse(ordered.check_for_duplicated_cells())
        ordered.append(make_row('a', 2, 1, 'r', 0.1))
        self.assertTrue(ordered.check_for_duplicated_cells())


class TestWriter(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.writer = mpsQAOA_Writer({'master_seed': 7, 'command': 'test'})

    def tearDown(self):
        self.directory.cleanup()

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def test_instance_files(self):
        instance = attach_certificate(gen_ec3(6, 3))
        self.writer.write_instance(self.path('ec3.json'), instance)
        with open(self.path('ec3.json')) as file:
            data = json.load(file)
        self.assertEqual(data['config'], {'master_seed': 7, 'command': 'test'})
        again = read_instance(self.path('ec3.json'))
        self.assertEqual(again.clauses, instance.clauses)
        self.assertEqual(again.certificate, instance.certificate)

    def test_instances_are_read_in_path_order(self):
        for name, seed in (('b.json', 1), ('a.json', 2)):
            self.writer.write_instance(self.path(name), MaxCutInstance(TRIANGLE, seed=seed))
        instances = read_instances([self.path('b.json'), self.path('a.json')])
        self.assertEqual([instance.seed for instance in instances], [2, 1])

    def test_angle_files(self):
        schedule = AngleSchedule([0.1, 0.2], [0.5, 0.4], {'method': 'grid', 'D': 2}, kind='maxcut')
        self.writer.write_angles(self.path('angles.json'), schedule)
        again = read_angles(self.path('angles.json'))
        self.assertEqual(again, schedule)
        self.assertEqual(again.kind, 'maxcut')

    def test_missing_fields(self):
        with open(self.path('broken.json'), 'w') as file:
            json.dump({'kind': 'maxcut', 'n': 3}, file)
        with self.assertRaises(SchemaError):
            read_instance(self.path('broken.json'))
        with open(self.path('angles.json'), 'w') as file:
            json.dump({'p': 1, 'gamma': [0.1]}, file)
        with self.assertRaises(SchemaError):
            read_angles(self.path('angles.json'))

    def test_invalid_contents(self):
        with open(self.path('kind.json'), 'w') as file:
            json.dump({'kind': 'tsp', 'n': 3, 'seed': 0}, file)
        with self.assertRaises(SchemaError):
            read_instance(self.path('kind.json'))
        with open(self.path('text.json'), 'w') as file:
            file.write('not json')
        with self.assertRaises(SchemaError):
            read_instance(self.path('text.json'))
        with open(self.path('declared.json'), 'w') as file:
            json.dump({'kind': 'maxcut', 'n': 4, 'seed': 0, 'adjacency': TRIANGLE}, file)
        with self.assertRaises(SchemaError):
            read_instance(self.path('declared.json'))

    def test_sweep_table(self):
        result = SweepResult([make_row('a', 2, 1, 'r', 0.1 + 0.2), make_row('a', 2, 1, 'F', math.nan, 'failed')])
        self.writer.write_sweep(self.path('sweep.csv'), result)
        with open(self.path('sweep.csv')) as file:
            lines = file.read().splitlines()
        self.assertTrue(lines[0].startswith('# [mpsQAOA] sweep'))
        self.assertIn('# [master_seed] 7', lines)
        again = read_sweep(self.path('sweep.csv'))
        self.assertEqual(len(again), 2)
        self.assertEqual(again[0]['value'], 0.1 + 0.2, "Floats are written with full precision")
        self.assertTrue(math.isnan(again[1]['value']))
        self.assertEqual(again[1]['status'], 'failed')

    def test_sweep_table_with_missing_column(self):
        with open(self.path('sweep.csv'), 'w') as file:
            file.write('# comment\ninstance_id,D\na,2\n')
        with self.assertRaises(SchemaError):
            read_sweep(self.path('sweep.csv'))

    def test_sweep_table_with_duplicated_cell(self):
        result = SweepResult([make_row('a', 2, 1, 'r', 0.5), make_row('a', 2, 1, 'r', 0.7)])
        self.writer.write_sweep(self.path('sweep.csv'), result)
        with self.assertRaises(SchemaError):
            read_sweep(self.path('sweep.csv'))

    def test_aggregate_and_landscape_tables(self):
        result = SweepResult([make_row('a', 2, 1, 'r', 0.5), make_row('b', 2, 1, 'r', 1.0)])
        self.writer.write_aggregates(self.path('aggregates.csv'), result)
        rows = read_csv_rows(self.path('aggregates.csv'))
        self.assertEqual(len(rows), 1)
        self.assertEqual(float(rows[0]['mean']), 0.75)
        model = MaxCutInstance(TRIANGLE).to_ising()
        landscape = landscape_p1(model, 2, np.linspace(0, np.pi, 3, endpoint=False), [0.0, 0.4])
        self.writer.write_landscape(self.path('landscape.csv'), landscape)
        rows = read_csv_rows(self.path('landscape.csv'))
        self.assertEqual(len(rows), 6)
        self.assertEqual(list(rows[0]), ['gamma', 'beta', 'value', 'norm'])

    def test_output_directories_are_created(self):
        path = self.path(os.path.join('nested', 'deeper', 'file.csv'))
        check_writable(path)
        self.assertTrue(os.path.isdir(os.path.dirname(path)))


if __name__ == '__main__':
    unittest.main()
