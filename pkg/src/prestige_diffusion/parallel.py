"""Order-preserving map over a thread pool.

Workers only change wall-clock time: every task derives its randomness from
its own index, and results come back in input order.
"""

from concurrent.futures import ThreadPoolExecutor


def pmap(fn, items, workers=1):
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
