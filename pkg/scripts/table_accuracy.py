#!/usr/bin/env python
"""
Separation accuracy table for StateNet-PH
Runs the built-in battery for every (network, distance) pair and prints
mean +/- std of the SVM accuracy over the seeds
"""
import argparse
import sys
from typing import Dict, List, Tuple

from statenet.config import get_settings
from statenet.main import setup_logging
from statenet.services.analysis import battery, builtin_battery
from statenet.services.graphdist import DistanceKind

NETWORKS = ["ordinal", "coarse"]


def run_table(seeds: List[int], jobs: int) -> Dict[Tuple[str, str], Tuple[float, float]]:
    """Accuracy mean and std per (network, distance)"""
    entries = builtin_battery()
    print(f"Loaded {len(entries)} series: {[e.name for e in entries]}")
    table = {}
    for kind in NETWORKS:
        for distance in DistanceKind:
            result = battery(entries, kind, distance, seeds=seeds, jobs=jobs)
            table[(kind, distance.value)] = (result.accuracy.mean, result.accuracy.std)
            status = "✅" if result.accuracy.mean == 1.0 else "  "
            print(f"{status} {kind:8} {distance.value:18} {result.accuracy.mean:.3f} +/- {result.accuracy.std:.3f}")
            if result.skipped:
                print(f"      ⚠️  skipped: {sorted(result.skipped)}")
    return table


def print_summary(table: Dict[Tuple[str, str], Tuple[float, float]]):
    """Print the accuracy table with one row per distance"""
    print("\n" + "=" * 60)
    print("SUMMARY")
    print("=" * 60)
    print(f"{'distance':20}" + "".join(f"{k:>20}" for k in NETWORKS))
    for distance in DistanceKind:
        cells = [f"{table[(k, distance.value)][0]:.3f} +/- {table[(k, distance.value)][1]:.3f}" for k in NETWORKS]
        print(f"{distance.value:20}" + "".join(f"{c:>20}" for c in cells))
    print("=" * 60)


def main():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--seeds", type=int, default=get_settings().analysis.accuracy_seeds)
    parser.add_argument("--jobs", type=int, default=get_settings().output.jobs)
    args = parser.parse_args()

    setup_logging()
    table = run_table(list(range(1, args.seeds + 1)), args.jobs)
    print_summary(table)
    return 0


if __name__ == "__main__":
    sys.exit(main())
