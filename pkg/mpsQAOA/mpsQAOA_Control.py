'''
mpsQAOA_Control.py
========================================
Command-line entry point of the mpsQAOA simulator
'''

__license__ = "GPL v3"
__version__ = "1.0.0"

import time
import logging
import argparse
import glob
import os
import sys
import importlib.util
import copy
import json

import numpy as np
from PyQt5 import QtCore

package_directory = os.path.dirname(os.path.abspath(__file__))
sys.path.append(os.path.dirname(package_directory)) # this is critical for 'from mpsQAOA.src...' to work in both script and package form.
from mpsQAOA.src.mpsQAOA_State import mpsQAOA_StateSingleton
from mpsQAOA.src.mpsQAOA_MPS import MPSError, full_bond_dim
from mpsQAOA.src import mpsQAOA_Problems as problems
from mpsQAOA.src import mpsQAOA_Engine as engine
from mpsQAOA.src import mpsQAOA_Trainer as trainer
from mpsQAOA.src.mpsQAOA_Sampler import deterministic_sample
from mpsQAOA.src.mpsQAOA_Writer import (mpsQAOA_Writer, SchemaError, check_writable, read_instance, read_instances,
                                        read_angles, read_sweep, ANGLE_SCHEMA)
from mpsQAOA.src.utils.utility_functions import (derive_seed, bits_to_string, convert_seconds_to_string,
                                                 default_thread_count)

COMMANDS = ('generate', 'encode', 'run', 'sweep', 'train', 'landscape', 'sample', 'oracle', 'report')

DEFAULTS = {'logging_level': 'INFO',
            'master_seed': 0,
            'threads': 1,
            'output_directory': 'results',
            'simulation': {'epsilon': 1e-12, 'mode': 'non-normalized', 'report_ring_size': 64},
            'maxcut': {'edge_probability': 0.5},
            'sweep': {'bond_dims': [1, 2, 4, 8], 'depths': [0, 1, 2, 5, 10], 'master_depth': 100},
            'training': {'resolution': 40, 'p_max': 100, 'refine_evals': 200, 'budget': (200, 500),
                         'n_restarts': 4, 'repeats': 1, 'ramp': 'linear'},
            'limits': {'statevector_max_qubits': 20, 'brute_force_max_qubits': 24},
            }


def load_config_from_file(path_to_config):
    '''
    Load a run configuration from a file using importlib
    '''
    spec = importlib.util.spec_from_file_location('module.name', path_to_config)
    config = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(config)
    print(f'Configuration file loaded: {path_to_config}')
    return config


def get_config_value(cfg, name):
    '''
    Config value with the default as fallback; dict-valued entries are
    completed key by key.
    '''
    default = DEFAULTS[name]
    if not hasattr(cfg, name):
        print(f"Config file has missing parameter '{name}'. Setting to {default!r}.")
        logging.getLogger(__name__).info(f"Config parameter '{name}' missing, using {default!r}")
        return copy.deepcopy(default)
    value = getattr(cfg, name)
    if isinstance(default, dict):
        merged = dict(default)
        merged.update(value)
        return merged
    return value


def effective_config(cfg, args):
    ''' Config module values overridden by command-line flags '''
    config = {name: get_config_value(cfg, name) for name in DEFAULTS}
    if args.master_seed is not None:
        config['master_seed'] = args.master_seed
    if args.threads is not None:
        config['threads'] = args.threads
    if config['threads'] <= 0:
        config['threads'] = default_thread_count()
    if args.out is not None:
        config['output_directory'] = args.out
    if args.epsilon is not None:
        config['simulation']['epsilon'] = args.epsilon
    if args.mode is not None:
        config['simulation']['mode'] = args.mode
    if args.bond_dims is not None:
        config['sweep']['bond_dims'] = args.bond_dims
    if args.depths is not None:
        config['sweep']['depths'] = args.depths
    if args.budget_pair is not None:
        config['training']['budget'] = trainer.BUDGET_PAIRS[args.budget_pair]
    if args.budget is not None:
        config['training']['budget'] = tuple(args.budget)
    if args.edge_probability is not None:
        config['maxcut']['edge_probability'] = args.edge_probability
    return config


def get_logger(cfg, package_directory):
    if hasattr(cfg, 'logging_level') and cfg.logging_level in ('DEBUG', 'INFO'):
        LOGGING_LEVEL = cfg.logging_level
    else:
        LOGGING_LEVEL = 'INFO'
        print(f"Config file has missing parameter 'logging_level' ('INFO', 'DEBUG'). Setting to 'INFO' value.")
    timestr = time.strftime("%Y%m%d-%H%M%S")
    log_directory = os.path.join(package_directory, 'log')
    os.makedirs(log_directory, exist_ok=True)
    logging_filename = os.path.join(log_directory, timestr + '.log')
    logging.basicConfig(filename=logging_filename, level=LOGGING_LEVEL,
                        format='%(asctime)-8s:%(levelname)s:%(thread)d:%(module)s:%(funcName)s:%(message)s')
    logger = logging.getLogger(__name__)
    return logger


def get_parser():
    """
    Parse command-line input arguments
    :return: The argparse parser object
    """
    parser = argparse.ArgumentParser(prog='mpsqaoa', formatter_class=argparse.ArgumentDefaultsHelpFormatter,
                                     description='Bounded-entanglement QAOA simulator')
    parser.add_argument('command', choices=COMMANDS, help='Subcommand')
    parser.add_argument('--config', default=os.path.join(package_directory, 'config', 'demo_config.py'),
                        help='Run configuration (Python module)')
    parser.add_argument('--kind', choices=('maxcut', 'ec3'), default='maxcut', help='Problem kind')
    parser.add_argument('--n', type=int, help='Number of qubits / variables')
    parser.add_argument('--count', type=int, default=1, help='Number of instances to generate')
    parser.add_argument('--seed', type=int, help='Seed of the first generated instance or of an optimizer')
    parser.add_argument('--master-seed', type=int, help='Master seed (overrides the config)')
    parser.add_argument('--edge-probability', type=float, help='Erdos-Renyi edge probability w')
    parser.add_argument('--instance', help='Instance file (JSON)')
    parser.add_argument('--instances', nargs='+', help='Instance files or directories')
    parser.add_argument('--angles', help='Angle file (JSON)')
    parser.add_argument('--certificates', help='JSON file instance_id -> {energy, witness} of best-found solutions')
    parser.add_argument('--sweep-file', help='Sweep CSV for the report command')
    parser.add_argument('--bond-dims', type=int, nargs='+', help='Bond-dimension caps D')
    parser.add_argument('--depths', type=int, nargs='+', help='QAOA depths p')
    parser.add_argument('--epsilon', type=float, help='Singular-value weight cutoff')
    parser.add_argument('--mode', choices=engine.MODES, help='Normalization mode')
    parser.add_argument('--method', choices=('shared', 'grid', 'global'), default='shared',
                        help='Training method')
    parser.add_argument('--budget', type=int, nargs=2, metavar=('INIT', 'TOTAL'),
                        help='Optimizer budget: initial design points and total evaluations')
    parser.add_argument('--budget-pair', type=int, choices=range(len(trainer.BUDGET_PAIRS)),
                        help=f'Index into the standard budgets {trainer.BUDGET_PAIRS}')
    parser.add_argument('--resolution', type=int, help='Grid points per angle axis')
    parser.add_argument('--success', action='store_true', help='train: also write success-percentage tables')
    parser.add_argument('--norm-scan', action='store_true', help='landscape: also write the p=1 state norm versus gamma')
    parser.add_argument('--no-fidelity', action='store_true', help='sweep: skip the fidelity column')
    parser.add_argument('--threads', type=int, help='Worker threads, 0 for one per physical core')
    parser.add_argument('--out', help='Output directory')
    return parser


class mpsQAOA_Control():
    '''
    Runs one subcommand with the effective configuration and writes its
    artifacts to the output directory.
    '''

    def __init__(self, args, cfg):
        self.args = args
        self.cfg = cfg
        self.config = effective_config(cfg, args)
        self.out = self.config['output_directory']
        self.state = mpsQAOA_StateSingleton()
        self.state.set_parameters({'command': args.command,
                                   'config_file': args.config,
                                   'master_seed': self.config['master_seed'],
                                   'threads': self.config['threads'],
                                   'output_directory': self.out,
                                   'epsilon': self.config['simulation']['epsilon'],
                                   'mode': self.config['simulation']['mode']})
        self.writer = mpsQAOA_Writer({'command': args.command, 'config': self.config,
                                      'arguments': self._recorded_arguments()})
        self.logger = logging.getLogger(__name__)

    def _recorded_arguments(self):
        skip = ('config', 'out', 'threads')
        return {key: value for key, value in sorted(vars(self.args).items()) if key not in skip and value is not None}

    def _path(self, filename):
        path = os.path.join(self.out, filename)
        check_writable(path)
        return path

    def _require(self, name):
        value = getattr(self.args, name)
        if value is None:
            raise ValueError(f"The '{self.args.command}' command needs --{name.replace('_', '-')}")
        return value

    @property
    def epsilon(self):
        return self.config['simulation']['epsilon']

    @property
    def mode(self):
        return self.config['simulation']['mode']

    @property
    def threads(self):
        return self.config['threads']

    def _instances(self):
        paths = []
        for entry in self._require('instances'):
            if os.path.isdir(entry):
                paths.extend(glob.glob(os.path.join(entry, '*.json')))
            else:
                paths.append(entry)
        instances = read_instances(paths)
        if self.args.certificates:
            self._apply_certificates(instances)
        return instances

    def _apply_certificates(self, instances):
        with open(self.args.certificates) as file:
            certificates = json.load(file)
        for instance in instances:
            if instance.instance_id in certificates:
                instance.certificate = dict(certificates[instance.instance_id], source='external')
                if not problems.verify_certificate(instance):
                    raise SchemaError(f"Certificate of {instance.instance_id} does not match its witness energy")

    def _angles(self):
        path = self.args.angles
        if path is None or not os.path.exists(path):
            raise SchemaError(f"Angle file not found: {path}; expected {ANGLE_SCHEMA}")
        return read_angles(path)

    def _bond_dim(self):
        bond_dims = self.args.bond_dims or self.config['sweep']['bond_dims']
        return int(bond_dims[0]) if self.args.bond_dims else int(max(bond_dims))

    def execute(self):
        self.state.set_parameters({'cells_total': 0, 'cells_done': 0, 'cells_failed': 0})
        self._reported_done = 0
        self.state.sig_updated.connect(self.report_progress, QtCore.Qt.DirectConnection)
        self.state['state'] = 'running'
        run_state = self.state.get_parameter_dict(['command', 'master_seed', 'threads', 'epsilon', 'mode'])
        self.logger.info(f'Running {run_state}')
        start = time.time()
        try:
            getattr(self, 'cmd_' + self.args.command)()
        finally:
            self.state.sig_updated.disconnect(self.report_progress)
            self.state['state'] = 'idle'
        print(f'Done in {convert_seconds_to_string(time.time() - start)}')

    def report_progress(self):
        ''' Called on every state update, prints when another sweep job has finished '''
        done, total, failed = self.state.get_parameter_list(['cells_done', 'cells_total', 'cells_failed'])
        if total == 0 or done == self._reported_done:
            return
        self._reported_done = done
        message = f'Progress: {done}/{total} instances swept, {failed} incomputable cells'
        self.logger.info(message)
        print(message)

    '''
    Subcommands
    '''

    def cmd_generate(self):
        kind, n = self.args.kind, self._require('n')
        first_seed = self.args.seed if self.args.seed is not None else self.config['master_seed']
        limit = self.config['limits']['brute_force_max_qubits']
        paths = [self._path(f'{kind}_n{n}_{i:04d}.json') for i in range(self.args.count)]
        for i, path in enumerate(paths):
            seed = derive_seed(first_seed, i)
            if kind == 'maxcut':
                instance = problems.gen_maxcut_er(n, self.config['maxcut']['edge_probability'], seed)
                if n <= limit:
                    problems.attach_certificate(instance, max_qubits=limit)
            else:
                instance = problems.gen_ec3(n, seed)
            instance.instance_id = f'{kind}-n{n}-{i:04d}'
            self.writer.write_instance(path, instance)
            print(f'Written {path}')

    def cmd_encode(self):
        instance = read_instance(self._require('instance'))
        path = self._path(f'{instance.instance_id}_ising.json')
        self.writer.write_json(path, instance.to_ising().to_dict())
        print(f'Written {path}')

    def _run_one(self):
        instance = read_instance(self._require('instance'))
        schedule = self._angles()
        if self.args.depths:
            schedule = schedule.prefix(self.args.depths[0])
        model = instance.to_ising()
        D = self._bond_dim()
        state, diagnostics = engine.run_qaoa(model, schedule, D, self.epsilon, self.mode,
                                             ring_size=self.config['simulation']['report_ring_size'],
                                             record_entropy=True)
        return instance, model, schedule, D, state, diagnostics

    def cmd_run(self):
        instance, model, schedule, D, state, diagnostics = self._run_one()
        sample = deterministic_sample(state)
        result = {'instance_id': instance.instance_id, 'p': schedule.p, 'D': D, 'mode': self.mode,
                  'sample': bits_to_string(sample.bits), 'sample_prob': sample.probability,
                  'sample_energy': model.energy(sample.bits), 'diagnostics': diagnostics.to_dict()}
        c_min = instance.get_min_energy()
        if instance.kind == 'maxcut':
            result['cut'] = problems.cut_size(instance, sample.bits)
        if instance.kind == 'maxcut' and c_min is not None and c_min < 0:
            result['r'] = engine.approximation_ratio(model, sample.bits, c_min)
        if instance.kind == 'ec3':
            result['x'] = 1.0 if problems.ec3_satisfied(instance, sample.bits) else 0.0
        print(diagnostics)
        print(f"sample {result['sample']} probability {sample.probability:.6g} energy {result['sample_energy']}")
        self.writer.write_json(self._path(f'{instance.instance_id}_run_p{schedule.p}_D{D}.json'), result)

    def cmd_sample(self):
        instance, model, schedule, D, state, diagnostics = self._run_one()
        sample = deterministic_sample(state)
        print(f'{bits_to_string(sample.bits)} {sample.probability:.12g}')

    def cmd_oracle(self):
        path = self._require('instance')
        instance = read_instance(path)
        problems.attach_certificate(instance, max_qubits=self.config['limits']['brute_force_max_qubits'])
        if instance.certificate is None:
            print(f'No certificate for {instance.instance_id}')
            return
        print(f"{instance.instance_id}: energy {instance.certificate['energy']} witness {instance.certificate['witness']}")
        self.writer.write_instance(self._path(os.path.basename(path)), instance)

    def cmd_sweep(self):
        instances = self._instances()
        schedule = self._angles()
        bond_dims = self.config['sweep']['bond_dims']
        depths = self.config['sweep']['depths']
        master_depth = self.config['sweep']['master_depth']
        if max(depths) > master_depth:
            raise ValueError(f"Depth {max(depths)} exceeds the master schedule depth {master_depth}")
        sweep_path, aggregate_path = self._path('sweep.csv'), self._path('aggregates.csv')
        print(f'Sweeping {len(instances)} instances over D={bond_dims}, p={depths}')
        result = engine.sweep(instances, schedule, bond_dims, depths, epsilon=self.epsilon, mode=self.mode,
                              threads=self.threads, with_fidelity=not self.args.no_fidelity,
                              max_fidelity_qubits=self.config['limits']['statevector_max_qubits'])
        self.writer.write_sweep(sweep_path, result)
        self.writer.write_aggregates(aggregate_path, result)
        self._print_aggregates(result)

    def cmd_report(self):
        result = read_sweep(self._require('sweep_file'))
        self.writer.write_aggregates(self._path('aggregates.csv'), result)
        self._print_aggregates(result)

    def _print_aggregates(self, result):
        for metric in ('r', 'x', 'F'):
            if not result.get_metric_rows(metric):
                continue
            depths, bond_dims, table = result.get_aggregate_table(metric)
            print(f'mean {metric}: rows p={depths}, columns D={bond_dims}')
            print(np.array2string(table, precision=4))

    def cmd_landscape(self):
        instance = read_instance(self._require('instance'))
        model = instance.to_ising()
        D = self._bond_dim()
        resolution = self.args.resolution or self.config['training']['resolution']
        gammas, betas = trainer.angle_grid(model, resolution)
        landscape = trainer.landscape_p1(model, D, gammas, betas, self.mode, self.epsilon, self.threads)
        self.writer.write_landscape(self._path(f'{instance.instance_id}_landscape_D{D}.csv'), landscape)
        gamma, beta, value = landscape.get_minimum()
        print(f'argmin gamma={gamma:.6f} beta={beta:.6f} value={value:.8g}')
        if self.args.norm_scan:
            norms = trainer.norm_scan_p1(model, D, gammas, epsilon=self.epsilon)
            self.writer.write_norm_scan(self._path(f'{instance.instance_id}_norms_D{D}.csv'), gammas, norms)
            print(f'minimum norm {np.min(norms):.8g} at gamma={gammas[int(np.argmin(norms))]:.6f}')

    def cmd_train(self):
        instances = self._instances()
        training = self.config['training']
        if training['ramp'] != 'linear':
            raise ValueError(f"Unknown extrapolation ramp '{training['ramp']}', only 'linear' is available")
        resolution = self.args.resolution or training['resolution']
        if self.args.method == 'shared':
            D = self._bond_dim()
            schedule = trainer.shared_angle_set(instances, D, training['p_max'], resolution, training['refine_evals'],
                                                self.mode, self.epsilon, self.threads)
            self.writer.write_angles(self._path(f'angles_shared_D{D}_p{training["p_max"]}.json'), schedule)
            return
        bond_dims = self.args.bond_dims or self.config['sweep']['bond_dims']
        depths = self.args.depths or [1]
        schedules = {}
        for index, instance in enumerate(instances):
            model = instance.to_ising()
            caps = sorted(set(bond_dims) | ({full_bond_dim(instance.n)} if self.args.success else set()))
            for D in caps:
                for p in depths:
                    if self.args.method == 'grid':
                        schedule = trainer.grid_search_p1(model, D, resolution, self.mode, self.epsilon,
                                                          self.threads, instance.kind)
                        schedule = trainer.extrapolate_schedule(schedule, p)
                    else:
                        seed = derive_seed(self.config['master_seed'], index, D, p)
                        schedule = trainer.global_optimize(model, p, D, training['budget'], seed, self.mode,
                                                           self.epsilon, training['n_restarts'], training['repeats'],
                                                           self.threads, instance.kind)
                    schedules[(instance.instance_id, D, p)] = schedule
                    self.writer.write_angles(self._path(f'angles_{instance.instance_id}_D{D}_p{p}.json'), schedule)
            if self.args.success:
                self._write_success_table(instance, model, schedules, caps, depths)
        table = {f'{iid}/D={D}/p={p}': s for (iid, D, p), s in schedules.items()}
        self.writer.write_angle_table(self._path(f'angle_table_{self.args.method}.csv'), table)
        self._print_dispersion(schedules, depths)

    def _write_success_table(self, instance, model, schedules, caps, depths):
        ground = problems.brute_force_ground(model, max_qubits=self.config['limits']['brute_force_max_qubits'])
        full = full_bond_dim(instance.n)
        rows = []
        for p in depths:
            by_D = {D: schedules[(instance.instance_id, D, p)] for D in caps}
            for row in trainer.success_table(model, ground.minimizers, by_D, by_D[full], range(1, p + 1),
                                             self.epsilon):
                rows.append(dict(row, instance_id=instance.instance_id, p=p))
        fieldnames = ['instance_id', 'p', 'D', 'j', 'eta_exact', 'eta_approx', 'eta_reference', 'normalized',
                      'normalized_approx']
        self.writer.write_table(self._path(f'success_{instance.instance_id}.csv'), 'success', fieldnames, rows)

    def _print_dispersion(self, schedules, depths):
        for p in depths:
            by_D = {}
            for (iid, D, q), schedule in schedules.items():
                if q == p:
                    by_D.setdefault(D, []).append(schedule)
            for D in sorted(by_D):
                statistics = trainer.angle_statistics(by_D[D])
                print(f"p={p} D={D}: angle dispersion {statistics['dispersion']:.4f} over {len(by_D[D])} schedules")


def main(argv=None):
    args = get_parser().parse_args(argv)
    cfg = load_config_from_file(args.config)
    logger = get_logger(cfg, package_directory)
    logger.info(f'Config file loaded: {args.config}')
    control = mpsQAOA_Control(args, cfg)
    try:
        control.execute()
    except (SchemaError, ValueError, OSError, MPSError) as error:
        logger.error(f'{args.command} failed: {error}')
        print(f'Error: {error}')
        return 1
    return 0


def run():
    sys.exit(main())


if __name__ == '__main__':
    run()
