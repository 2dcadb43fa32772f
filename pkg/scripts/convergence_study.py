#!/usr/bin/env python3
"""Depth study: how fast the dimension interval closes on its target.

For each carpet in the built-in panel (or one given on the command
line), compute the pressure-based dimension interval at a range of
depths and write one CSV row per (carpet, depth) with the bracket, its
width, and the closed-form value when the carpet is a full shift.

Example:
    python3 scripts/convergence_study.py --n-max 24 --out study.csv
    python3 scripts/convergence_study.py --carpet 3 2 0,0 1,0 2,1 --n-max 30
"""

import argparse
import csv
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from carpetdim.errors import NotFullShiftError
from carpetdim.fixtures import column_carpet_21, full_torus
from carpetdim.pressure import hausdorff_dimension, mcmullen_closed_form
from carpetdim.sft import CarpetSpec

PANEL = {
    "column_3x2": column_carpet_21,
    "torus_3x2": lambda: full_torus(3, 2),
    "torus_4x3": lambda: full_torus(4, 3),
    "sparse_4x2": lambda: CarpetSpec(4, 2, ((0, 0), (1, 1), (3, 0))),
    "banded_5x3": lambda: CarpetSpec(
        5, 3, ((0, 0), (1, 0), (2, 1), (3, 2), (4, 1), (0, 2))
    ),
    "restricted_3x2": lambda: CarpetSpec(
        3, 2, ((0, 0), (1, 0), (2, 1)), transitions=((0, 1), (1, 2), (2, 0), (1, 0))
    ),
}


def parse_args(argv):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--carpet",
        nargs="+",
        metavar=("L M", "R,C"),
        help="override the panel: grid sizes l m followed by digit cells r,c",
    )
    parser.add_argument("--n-max", type=int, default=24, help="deepest level")
    parser.add_argument("--step", type=int, default=2, help="depth stride")
    parser.add_argument("--out", type=Path, default=None, help="CSV path (default stdout)")
    return parser.parse_args(argv)


def carpets_to_run(args):
    if not args.carpet:
        return [(name, build()) for name, build in PANEL.items()]
    if len(args.carpet) < 3:
        raise SystemExit("--carpet needs l, m, and at least one r,c cell")
    l, m = int(args.carpet[0]), int(args.carpet[1])
    digits = tuple(
        (int(r), int(c)) for r, c in (cell.split(",") for cell in args.carpet[2:])
    )
    return [("cli_carpet", CarpetSpec(l, m, digits))]


def main(argv=None):
    args = parse_args(argv)
    rows = []
    for name, spec in carpets_to_run(args):
        try:
            closed = mcmullen_closed_form(spec)
        except NotFullShiftError:
            closed = None
        for n in range(args.step, args.n_max + 1, args.step):
            start = time.monotonic()
            est = hausdorff_dimension(spec, n)
            elapsed = time.monotonic() - start
            rows.append(
                {
                    "carpet": name,
                    "l": spec.l,
                    "m": spec.m,
                    "n": n,
                    "lower": f"{est.lower:.12f}",
                    "upper": f"{est.upper:.12f}",
                    "width": f"{est.upper - est.lower:.3e}",
                    "closed_form": "" if closed is None else f"{closed:.12f}",
                    "seconds": f"{elapsed:.3f}",
                }
            )
        last = rows[-1]
        print(
            f"{name}: depth {last['n']} interval "
            f"[{last['lower']}, {last['upper']}] width {last['width']}"
            + (f" closed form {last['closed_form']}" if closed is not None else ""),
            file=sys.stderr,
        )
    fieldnames = list(rows[0])
    sink = args.out.open("w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(sink, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            sink.close()
            print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    # the widths shrink like 1/n; flag any carpet whose last bracket
    # fails to contain its closed form, which should never happen
    bad = [
        r
        for r in rows
        if r["closed_form"]
        and not (float(r["lower"]) <= float(r["closed_form"]) <= float(r["upper"]))
    ]
    if bad:
        print(f"WARNING: {len(bad)} rows exclude their closed form", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
