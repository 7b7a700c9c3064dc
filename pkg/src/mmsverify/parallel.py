"""Optional process-parallel subtree exploration.

The search runs single-threaded until the stack holds enough open nodes,
then each frontier node becomes an independent single-threaded job in a
worker process.  The first witness wins and cancels the rest; HOLDS needs
every subtree to come back empty.  Verdicts are unaffected by the split;
node counts and log interleaving are not reproducible in this mode, so
the default stays single-threaded.
"""

from __future__ import annotations

from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait

from .config import SearchConfig
from .propagation import GTable
from .search import INDETERMINATE, WITNESS, SearchOutcome, Witness


def _run_job(args):
    n, k, t, config, gtable_data, bplus, bminus, path = args
    from .search import Search

    gtable = GTable.from_jsonable(gtable_data)
    search = Search(n, k, t, config, gtable, log=None)
    node = search.rebuild_node([tuple(s) for s in bplus],
                               [tuple(s) for s in bminus], path)
    outcome = search.run([node])
    return (outcome.verdict, outcome.witness, outcome.nodes, outcome.frontier)


def run_parallel(search, stack: list) -> SearchOutcome:
    import time

    start = time.monotonic()
    cfg: SearchConfig = search.config
    # widen the frontier single-threaded first
    while stack and len(stack) < 2 * cfg.parallel:
        node = stack.pop()
        w = search._process(node, stack)
        if w is not None:
            return SearchOutcome(WITNESS, w, search.nodes,
                                 time.monotonic() - start)
    if not stack:
        return SearchOutcome("HOLDS", None, search.nodes,
                             time.monotonic() - start)
    budget = None
    if cfg.node_budget is not None:
        budget = max(1, (cfg.node_budget - search.nodes) // len(stack))
    from dataclasses import replace

    job_cfg = replace(cfg, parallel=1, node_budget=budget, dump_lp_dir=None)
    gtable_data = search.gtable.to_jsonable()
    jobs = [(search.n, search.k, search.t, job_cfg, gtable_data,
             node.bplus, node.bminus, node.path) for node in stack]
    total_nodes = search.nodes
    witness = None
    leftover = []
    with ProcessPoolExecutor(max_workers=cfg.parallel) as pool:
        futures = {pool.submit(_run_job, job) for job in jobs}
        while futures:
            done, futures = wait(futures, return_when=FIRST_COMPLETED)
            for fut in done:
                verdict, w, nodes, frontier = fut.result()
                total_nodes += nodes
                if verdict == WITNESS and witness is None:
                    witness = w
                elif verdict == INDETERMINATE:
                    leftover.extend(frontier)
            if witness is not None:
                for fut in futures:
                    fut.cancel()
                break
    wall = time.monotonic() - start
    if witness is not None:
        return SearchOutcome(WITNESS, witness, total_nodes, wall)
    if leftover:
        return SearchOutcome(INDETERMINATE, None, total_nodes, wall, leftover)
    return SearchOutcome("HOLDS", None, total_nodes, wall)
