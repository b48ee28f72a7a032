'''
mpsQAOA job pool
================

Runs independent jobs (sweep cells, landscape rows, optimizer restarts) on a
QThreadPool. Results are stored by job index, so the returned list does not
depend on the order in which jobs finish. With ``threads=1`` the jobs run
inline in the calling thread.
'''

from PyQt5 import QtCore

import logging
logger = logging.getLogger(__name__)

from .mpsQAOA_State import mpsQAOA_StateSingleton


class mpsQAOA_JobResults():
    ''' Result slots filled by worker threads under a mutex '''

    def __init__(self, count):
        self.mutex = QtCore.QMutex()
        self.values = [None] * count
        self.errors = [None] * count

    def store(self, index, value, error=None):
        with QtCore.QMutexLocker(self.mutex):
            self.values[index] = value
            self.errors[index] = error


class mpsQAOA_Job(QtCore.QRunnable):
    def __init__(self, index, func, args, results, progress_key=None):
        super().__init__()
        self.setAutoDelete(False)
        self.index = index
        self.func = func
        self.args = args
        self.results = results
        self.progress_key = progress_key

    def run(self):
        try:
            value = self.func(*self.args)
            self.results.store(self.index, value)
        except Exception as error:
            logger.exception(f'Job {self.index} failed')
            self.results.store(self.index, None, error)
        if self.progress_key is not None:
            mpsQAOA_StateSingleton().increment(self.progress_key)


def run_jobs(func, args_list, threads=1, progress_key=None):
    '''
    Evaluate ``func(*args)`` for every entry of ``args_list``.

    Args:
        threads (int): worker threads, 1 runs inline
        progress_key (str): state counter incremented after each job

    Returns:
        list of results in the order of ``args_list``

    Raises:
        the exception of the first failed job (by index) after all jobs ended
    '''
    args_list = list(args_list)
    results = mpsQAOA_JobResults(len(args_list))
    jobs = [mpsQAOA_Job(i, func, tuple(args), results, progress_key) for i, args in enumerate(args_list)]

    if threads <= 1 or len(jobs) <= 1:
        for job in jobs:
            job.run()
    else:
        pool = QtCore.QThreadPool()
        pool.setMaxThreadCount(int(threads))
        logger.debug(f'Starting {len(jobs)} jobs on {threads} threads')
        for job in jobs:
            pool.start(job)
        pool.waitForDone()

    for error in results.errors:
        if error is not None:
            raise error
    return results.values


def job_mapper(threads=1, progress_key=None):
    ''' A map_jobs(func, args_list) callable bound to a thread count '''
    def map_jobs(func, args_list):
        return run_jobs(func, args_list, threads=threads, progress_key=progress_key)
    return map_jobs
