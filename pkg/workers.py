"""
Пул исполнителей для независимых реплик.
Результаты возвращаются в порядке задач, поэтому вывод не зависит от расписания.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor

import config

logger = logging.getLogger(__name__)


def _guarded(fn, task):
    try:
        return fn(task)
    except Exception as e:
        logger.error(f"Replicate task {task!r} failed: {e}", exc_info=True)
        raise


def run_tasks(fn, tasks: list, threads: int | None = None, executor: str | None = None) -> list:
    """fn и задачи должны сериализоваться pickle при executor=process."""
    threads = threads or config.PVLAB_THREADS
    executor = executor or config.PVLAB_EXECUTOR
    if threads <= 1 or len(tasks) <= 1:
        return [_guarded(fn, t) for t in tasks]
    pool_cls = ThreadPoolExecutor if executor == "thread" else ProcessPoolExecutor
    with pool_cls(max_workers=threads) as pool:
        futures = [pool.submit(_guarded, fn, t) for t in tasks]
        return [f.result() for f in futures]
