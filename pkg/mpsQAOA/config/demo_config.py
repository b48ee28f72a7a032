'''
mpsQAOA configuration file.

Use this file as a starting point for your own run configurations: copy it,
change the values and select it with ``--config path/to/file.py``
(the extension has to be .py). Command-line flags override the values here.
'''

logging_level = 'INFO' # 'DEBUG' for ultra-detailed (every truncation), 'INFO' for general logging level

'''
Every stochastic step (instance generation, optimizer designs) derives its
seed from the master seed and the index of the instance/cell/restart.
'''
master_seed = 2024

threads = 1 # 1 runs everything in the calling thread, 0 uses one thread per physical core; results do not depend on it

output_directory = 'results'

'''
MPS simulation
'''
simulation = {'epsilon' : 1e-12, # relative singular-value weight below which Schmidt values are dropped
              'mode' : 'non-normalized', # 'non-normalized' or 'normalized'
              'report_ring_size' : 64, # truncation reports kept per run
              }

maxcut = {'edge_probability' : 0.5}

'''
Sweeps: the master schedule has master_depth steps, depth p uses its first p
angle pairs.
'''
sweep = {'bond_dims' : [1, 2, 4, 8, 16, 32, 64, 128],
         'depths' : [0, 1, 2, 5, 10, 20, 30, 50, 100],
         'master_depth' : 100,
         }

'''
Training
'''
training = {'resolution' : 40, # grid points per angle axis for p=1 grid search
            'p_max' : 100,
            'refine_evals' : 200, # Nelder-Mead evaluations per instance for shared angle sets
            'budget' : (200, 500), # (initial design points, total evaluations)
            'n_restarts' : 4,
            'repeats' : 1,
            'ramp' : 'linear',
            }

'''
Hard limits of dense operations
'''
limits = {'statevector_max_qubits' : 20,
          'brute_force_max_qubits' : 24,
          }
