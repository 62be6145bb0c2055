# QMARGIN v1.0 - Worker pool sizing
import logging

import psutil

from config import get_env_int

_log = logging.getLogger(__name__)


def resolve_workers(requested=None):
    '''Number of worker processes for parallel runs.

    Explicit request wins, then QMARGIN_MAX_WORKERS caps the logical CPU
    count. Always at least 1.
    '''
    available = psutil.cpu_count(logical=True) or 1
    if requested is not None:
        workers = int(requested)
    else:
        workers = available

    cap = get_env_int('QMARGIN_MAX_WORKERS')
    if cap is not None and cap > 0:
        workers = min(workers, cap)

    workers = max(1, workers)
    _log.debug(f"using {workers} worker(s) ({available} CPUs available)")
    return workers
