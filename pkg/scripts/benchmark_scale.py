"""Scale exercises: repository search over a seeded fixture and schedule
estimation over random DAGs.

Usage: python3 scripts/benchmark_scale.py [--entries 500] [--dags 200]
"""

import argparse
import random
import time

from euarch.analyses.performance import (
    critical_path_seconds, list_schedule_makespan,
)
from euarch.repository import scale_fixture


def bench_repository(entries: int):
    t0 = time.monotonic()
    repo = scale_fixture(entries)
    built = time.monotonic() - t0
    t0 = time.monotonic()
    hits = repo.search(ontology_prefix=["root", "TextProcessing"],
                       max_param_count=12)
    searched = time.monotonic() - t0
    print(f"repository: {entries} entries built in {built * 1e3:.1f} ms; "
          f"conjunctive search returned {len(hits)} in {searched * 1e3:.2f} ms")


def bench_scheduling(dags: int, seed: int = 7):
    rng = random.Random(seed)
    t0 = time.monotonic()
    for _ in range(dags):
        n = rng.randint(4, 16)
        nodes = [f"n{i}" for i in range(n)]
        adj = {c: set() for c in nodes}
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.3:
                    adj[nodes[i]].add(nodes[j])
        cost = {c: rng.uniform(0.5, 4.0) for c in adj}
        cp = critical_path_seconds(adj, cost)
        for workers in (1, 2, 4):
            makespan = list_schedule_makespan(adj, cost, workers)
            assert cp <= makespan + 1e-9 <= sum(cost.values()) + 2e-9
    took = time.monotonic() - t0
    print(f"scheduling: {dags} random DAGs x 3 worker counts in "
          f"{took * 1e3:.1f} ms (bounds held on every instance)")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--entries", type=int, default=500)
    parser.add_argument("--dags", type=int, default=200)
    args = parser.parse_args()
    bench_repository(args.entries)
    bench_scheduling(args.dags)


if __name__ == "__main__":
    main()
