'''
Contains a variety of mpsQAOA utility functions
'''

import numpy as np
import psutil

import logging
logger = logging.getLogger(__name__)


def convert_seconds_to_string(delta_t):
    '''
    Converts an input value in seconds into a string in the format hh:mm:ss

    Interestingly, a variant using np.divmod is around 4-5x slower in initial tests.
    '''
    if delta_t <= 0:
        return '--:--:--'
    else:
        hours, remainder = divmod(delta_t, 3600)
        minutes, seconds = divmod(remainder, 60)
        return f"{int(hours):02}:{int(minutes):02}:{int(seconds):02}"


def format_data_size(bytes):
    '''
    Converts bytes into human-readable format (kb, MB, GB)
    '''
    try:
        bytes = float(bytes)
        kb = bytes / 1024
    except Exception as e:
        logger.error(f"{e}")
        return None
    if kb >= 1024:
        M = kb / 1024
        if M >= 1024:
            G = M / 1024
            return "%.1f GB" % (G)
        else:
            return "%.1f MB" % (M)
    else:
        return "%.1f kb" % (kb)


def write_line(file, key='', value=''):
    ''' Little helper method to write a single line with a key and value for metadata
    Adds a line break at the end. Lines start with '#' so that CSV readers can skip them.
    '''
    if key != '':
        file.write('# ['+str(key)+'] '+str(value) + '\n')
    else:
        file.write('#\n')


def bytes_of_statevector(n_qubits, itemsize=16):
    '''Size in bytes of a dense vector with 2**n entries (complex128 by default)'''
    return (2 ** int(n_qubits)) * itemsize


def check_available_ram(n_bytes, percent_ram_free=10):
    '''
    Raise MemoryError if allocating `n_bytes` would leave less than
    `percent_ram_free` percent of the total RAM available.
    '''
    ram = psutil.virtual_memory()
    must_remain_free = ram.total * (percent_ram_free / 100)
    max_amount_useable = ram.available - must_remain_free
    if n_bytes > max_amount_useable:
        msg = f'Not enough RAM for {format_data_size(n_bytes)}, ' \
              f'{format_data_size(max(max_amount_useable, 0))} usable while keeping {percent_ram_free}% free'
        logger.error(msg)
        raise MemoryError(msg)


def default_thread_count():
    ''' Physical cores, falling back to logical ones if psutil cannot tell '''
    count = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True) or 1
    return int(count)


def derive_seed(master_seed, *indices):
    '''
    Deterministic 32-bit seed from the master seed and a path of indices
    (instance index, cell index, restart index ...).
    '''
    seq = np.random.SeedSequence([int(master_seed)] + [int(i) for i in indices])
    return int(seq.generate_state(1, dtype=np.uint32)[0])


def bits_to_string(bits):
    ''' (0, 1, 1) -> '011' '''
    return ''.join(str(int(b)) for b in bits)


def string_to_bits(string):
    ''' '011' -> (0, 1, 1) '''
    string = str(string).strip()
    if any(c not in '01' for c in string):
        raise ValueError(f"Bitstring must contain only 0 and 1, got '{string}'")
    return tuple(int(c) for c in string)

