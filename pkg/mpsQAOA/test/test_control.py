# To run the test:
# python -m unittest mpsQAOA.test.test_control
import contextlib
import glob
import io
import json
import os
import tempfile
import unittest

from mpsQAOA.mpsQAOA_Control import main, get_parser, effective_config, DEFAULTS
from mpsQAOA.src.mpsQAOA_Problems import MaxCutInstance
from mpsQAOA.src.mpsQAOA_Trainer import AngleSchedule
from mpsQAOA.src.mpsQAOA_Writer import mpsQAOA_Writer, read_instance, read_csv_rows, read_angles

TRIANGLE = [[0, 1, 1], [1, 0, 1], [1, 1, 0]]


class EmptyConfig():
    pass


class TestConfiguration(unittest.TestCase):
    def test_flags_override_config(self):
        args = get_parser().parse_args(['sweep', '--bond-dims', '1', '2', '--epsilon', '0', '--master-seed', '3'])
        config = effective_config(EmptyConfig(), args)
        self.assertEqual(config['sweep']['bond_dims'], [1, 2])
        self.assertEqual(config['simulation']['epsilon'], 0.0)
        self.assertEqual(config['master_seed'], 3)
        self.assertEqual(DEFAULTS['sweep']['bond_dims'], [1, 2, 4, 8], "Defaults must not be modified")
        self.assertEqual(DEFAULTS['simulation']['epsilon'], 1e-12)

    def test_budget_pairs(self):
        config = effective_config(EmptyConfig(), get_parser().parse_args(['train', '--budget-pair', '0']))
        self.assertEqual(config['training']['budget'], (125, 300))
        config = effective_config(EmptyConfig(), get_parser().parse_args(['train', '--budget-pair', '0',
                                                                          '--budget', '10', '20']))
        self.assertEqual(config['training']['budget'], (10, 20))

    def test_automatic_thread_count(self):
        config = effective_config(EmptyConfig(), get_parser().parse_args(['sweep', '--threads', '0']))
        self.assertGreaterEqual(config['threads'], 1)


class TestCommands(unittest.TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.out = self.directory.name

    def tearDown(self):
        self.directory.cleanup()

    def path(self, *names):
        return os.path.join(self.out, *names)

    def write_angles(self, gammas, betas):
        path = self.path('angles.json')
        mpsQAOA_Writer().write_angles(path, AngleSchedule(gammas, betas, {'method': 'test'}))
        return path

    def test_generate_is_reproducible(self):
        argv = ['generate', '--kind', 'maxcut', '--n', '5', '--count', '3', '--seed', '11', '--out', self.out]
        self.assertEqual(main(argv), 0)
        paths = sorted(glob.glob(self.path('*.json')))
        self.assertEqual([os.path.basename(p) for p in paths],
                         ['maxcut_n5_0000.json', 'maxcut_n5_0001.json', 'maxcut_n5_0002.json'])
        contents = []
        for path in paths:
            with open(path, 'rb') as file:
                contents.append(file.read())
            instance = read_instance(path)
            self.assertIsNotNone(instance.certificate)
        self.assertEqual(main(argv), 0)
        for path, before in zip(paths, contents):
            with open(path, 'rb') as file:
                self.assertEqual(file.read(), before, f"{path} changed between identical runs")

    def test_generate_ec3(self):
        self.assertEqual(main(['generate', '--kind', 'ec3', '--n', '8', '--seed', '2', '--out', self.out]), 0)
        instance = read_instance(self.path('ec3_n8_0000.json'))
        self.assertEqual(instance.instance_id, 'ec3-n8-0000')
        self.assertEqual(instance.get_min_energy(), 0.0)

    def test_oracle(self):
        instance_path = self.path('triangle.json')
        mpsQAOA_Writer().write_instance(instance_path, MaxCutInstance(TRIANGLE, instance_id='triangle'))
        result_directory = self.path('oracle')
        self.assertEqual(main(['oracle', '--instance', instance_path, '--out', result_directory]), 0)
        instance = read_instance(os.path.join(result_directory, 'triangle.json'))
        self.assertEqual(instance.get_min_energy(), -4.0)

    def test_sweep_writes_one_row_per_cell(self):
        main(['generate', '--kind', 'maxcut', '--n', '4', '--count', '3', '--seed', '5',
              '--out', self.path('instances')])
        angles = self.write_angles([0.3, 0.5], [0.4, 0.2])
        results = self.path('results')
        argv = ['sweep', '--instances', self.path('instances'), '--angles', angles, '--bond-dims', '1', '2',
                '--depths', '1', '2', '--no-fidelity', '--out', results]
        self.assertEqual(main(argv), 0)
        rows = read_csv_rows(os.path.join(results, 'sweep.csv'))
        self.assertEqual(len(rows), 12)
        self.assertEqual({row['metric'] for row in rows}, {'r'})
        aggregates = read_csv_rows(os.path.join(results, 'aggregates.csv'))
        self.assertEqual(len(aggregates), 4)

    def test_report_recomputes_aggregates(self):
        main(['generate', '--kind', 'maxcut', '--n', '4', '--count', '2', '--seed', '5',
              '--out', self.path('instances')])
        angles = self.write_angles([0.3], [0.4])
        results = self.path('results')
        main(['sweep', '--instances', self.path('instances'), '--angles', angles, '--bond-dims', '1', '--depths', '1',
              '--out', results])
        before = read_csv_rows(os.path.join(results, 'aggregates.csv'))
        report = self.path('report')
        self.assertEqual(main(['report', '--sweep-file', os.path.join(results, 'sweep.csv'), '--out', report]), 0)
        after = read_csv_rows(os.path.join(report, 'aggregates.csv'))
        self.assertEqual(before, after)

    def test_landscape(self):
        instance_path = self.path('triangle.json')
        mpsQAOA_Writer().write_instance(instance_path, MaxCutInstance(TRIANGLE, instance_id='triangle'))
        argv = ['landscape', '--instance', instance_path, '--bond-dims', '2', '--resolution', '8', '--out', self.out]
        self.assertEqual(main(argv), 0)
        rows = read_csv_rows(self.path('triangle_landscape_D2.csv'))
        self.assertEqual(len(rows), 64)

    def test_landscape_norm_scan(self):
        instance_path = self.path('triangle.json')
        mpsQAOA_Writer().write_instance(instance_path, MaxCutInstance(TRIANGLE, instance_id='triangle'))
        argv = ['landscape', '--instance', instance_path, '--bond-dims', '1', '--resolution', '8', '--norm-scan',
                '--out', self.out]
        self.assertEqual(main(argv), 0)
        rows = read_csv_rows(self.path('triangle_norms_D1.csv'))
        self.assertEqual(len(rows), 8)
        self.assertEqual(float(rows[0]['gamma']), 0.0)
        self.assertAlmostEqual(float(rows[0]['norm']), 1.0, places=10)
        for row in rows:
            self.assertLessEqual(float(row['norm']), 1.0 + 1e-9)

    def test_success_table_lists_every_step(self):
        instance_path = self.path('triangle.json')
        mpsQAOA_Writer().write_instance(instance_path, MaxCutInstance(TRIANGLE, instance_id='triangle'))
        argv = ['train', '--method', 'grid', '--instances', instance_path, '--bond-dims', '1', '--depths', '2',
                '--resolution', '8', '--success', '--out', self.out]
        self.assertEqual(main(argv), 0)
        rows = read_csv_rows(self.path('success_triangle.csv'))
        self.assertEqual([(row['p'], row['j'], row['D']) for row in rows],
                         [('2', '1', '1'), ('2', '1', '2'), ('2', '2', '1'), ('2', '2', '2')])
        for row in rows:
            self.assertIn('normalized_approx', row)
            if row['D'] == '2':
                self.assertAlmostEqual(float(row['normalized_approx']), 100.0, places=8)

    def test_simulation_errors_exit_with_an_error_code(self):
        config_path = self.path('small_limits.py')
        with open(config_path, 'w') as file:
            file.write("limits = {'statevector_max_qubits': 20, 'brute_force_max_qubits': 2}\n")
        instance_path = self.path('triangle.json')
        mpsQAOA_Writer().write_instance(instance_path, MaxCutInstance(TRIANGLE, instance_id='triangle'))
        argv = ['train', '--config', config_path, '--method', 'grid', '--instances', instance_path,
                '--bond-dims', '2', '--depths', '1', '--resolution', '8', '--success', '--out', self.out]
        self.assertEqual(main(argv), 1)

    def test_sweep_reports_progress(self):
        main(['generate', '--kind', 'maxcut', '--n', '4', '--count', '2', '--seed', '5',
              '--out', self.path('instances')])
        angles = self.write_angles([0.3], [0.4])
        argv = ['sweep', '--instances', self.path('instances'), '--angles', angles, '--bond-dims', '1',
                '--depths', '1', '--out', self.path('results')]
        output = io.StringIO()
        with contextlib.redirect_stdout(output):
            self.assertEqual(main(argv), 0)
        lines = output.getvalue().splitlines()
        self.assertIn('Progress: 1/2 instances swept, 0 incomputable cells', lines)
        self.assertIn('Progress: 2/2 instances swept, 0 incomputable cells', lines)

    def test_global_training_is_reproducible(self):
        main(['generate', '--kind', 'maxcut', '--n', '4', '--count', '1', '--seed', '9', '--out', self.out])
        argv = ['train', '--method', 'global', '--instances', self.path('maxcut_n4_0000.json'), '--bond-dims', '2',
                '--depths', '1', '--budget', '4', '8', '--master-seed', '13']
        self.assertEqual(main(argv + ['--out', self.path('first')]), 0)
        self.assertEqual(main(argv + ['--out', self.path('second')]), 0)
        first = read_angles(self.path('first', 'angles_maxcut-n4-0000_D2_p1.json'))
        second = read_angles(self.path('second', 'angles_maxcut-n4-0000_D2_p1.json'))
        self.assertEqual(first, second)
        self.assertLessEqual(first.provenance['n_evals'], 8)

    def test_encode_and_run(self):
        instance_path = self.path('triangle.json')
        mpsQAOA_Writer().write_instance(instance_path, MaxCutInstance(TRIANGLE, instance_id='triangle'))
        self.assertEqual(main(['oracle', '--instance', instance_path, '--out', self.out]), 0)
        self.assertEqual(main(['encode', '--instance', instance_path, '--out', self.out]), 0)
        with open(self.path('triangle_ising.json')) as file:
            model = json.load(file)
        self.assertEqual(model['constant'], -3.0)
        self.assertEqual(len(model['couplings']), 3)

        angles = self.write_angles([0.0], [0.0])
        argv = ['run', '--instance', instance_path, '--angles', angles, '--bond-dims', '2', '--out', self.out]
        self.assertEqual(main(argv), 0)
        with open(self.path('triangle_run_p1_D2.json')) as file:
            result = json.load(file)
        self.assertEqual(result['sample'], '111')
        self.assertAlmostEqual(result['sample_prob'], 0.125, places=12)
        self.assertEqual(result['r'], 0.0)
        self.assertEqual(result['cut'], 0)
        self.assertEqual(main(['sample', '--instance', instance_path, '--angles', angles, '--out', self.out]), 0)

    def test_missing_angle_file(self):
        main(['generate', '--kind', 'maxcut', '--n', '4', '--out', self.out])
        argv = ['run', '--instance', self.path('maxcut_n4_0000.json'), '--angles', self.path('missing.json'),
                '--out', self.out]
        self.assertEqual(main(argv), 1)

    def test_missing_required_flag(self):
        self.assertEqual(main(['generate', '--out', self.out]), 1)


if __name__ == '__main__':
    unittest.main()
