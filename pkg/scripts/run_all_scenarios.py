"""Run every registered scenario at its defaults and write the artifacts.

Usage: python3 scripts/run_all_scenarios.py [--out DIR] [--workers N] [NAME ...]
Exits with 1 if any check fails.
"""

import argparse
import os
import sys

from roughdens.models import default_workers
from roughdens.scenarios import default_config, list_scenarios, run_scenario


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("names", nargs="*", help="scenario names (default: all)")
    p.add_argument("--out", default="scenario_output")
    p.add_argument("--workers", type=int, default=None)
    args = p.parse_args(argv)
    names = args.names or [e["name"] for e in list_scenarios()]
    workers = args.workers or default_workers()
    failed = []
    for name in names:
        cfg = default_config(name).updated(workers=workers, output_dir=os.path.join(args.out, name))
        report = run_scenario(cfg)
        for line in report.summary_lines():
            print(line)
        print(f"{name}: {'PASS' if report.passed else 'FAIL'} ({report.wall_time:.1f} s)\n")
        if not report.passed:
            failed.append(name)
    print(f"{len(names) - len(failed)}/{len(names)} scenarios pass" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
