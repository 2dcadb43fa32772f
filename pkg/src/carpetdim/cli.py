"""Command-line front end.

Parses a system document, dispatches one computation, and prints a
deterministic JSON report to standard output (sorted keys; the
timestamp is the only nondeterministic field and --no-timestamp drops
it).  Exit codes: 0 success, 1 malformed input or usage, 2 violated
mathematical precondition (including a non-mixing source), 3 exhausted
resource budget.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

from .counting import preimage_count
from .errors import (
    NonMixingError,
    PreconditionError,
    ResourceError,
    SpecError,
)
from .fixtures import write_fixture_files
from .measures import (
    DEFAULT_REFUTATION_THRESHOLD,
    additivity_scan,
    cesaro_defect,
    gibbs_scan,
    uniqueness_report,
)
from .pressure import (
    compensation_at_periodic,
    convergence_rows,
    hausdorff_dimension,
    pressure_interval,
)
from .render import render_carpet, write_pbm
from .sft import (
    CarpetSpec,
    EventuallyPeriodicPoint,
    FactorSystem,
    carpet_to_factor,
    singleton_clumps,
    validate_sft,
)
from .specfile import SCHEMA_VERSION, dump_document, load_system

__all__ = ["CommandConfig", "main", "run", "parse_args"]

EXIT_OK = 0
EXIT_SPEC = 1
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3


@dataclass(frozen=True)
class CommandConfig:
    """One parsed invocation; exactly one command with its settings."""

    command: str
    spec_path: Optional[str] = None
    depth: Optional[int] = None
    mode: str = "collapsed"
    theta: Optional[float] = None
    level: Optional[int] = None
    n_max: Optional[int] = None
    max_len: Optional[int] = None
    threshold: float = DEFAULT_REFUTATION_THRESHOLD
    n_terms: Optional[int] = None
    probe_depth: int = 2
    word: Optional[tuple[str, ...]] = None
    preperiod: tuple[str, ...] = ()
    cycle: Optional[tuple[str, ...]] = None
    resolution: int = 0
    out_dir: str = "fixtures"
    output: Optional[str] = None
    csv_path: Optional[str] = None
    node_budget: Optional[int] = None
    timestamp: bool = True


class _Parser(argparse.ArgumentParser):
    # argparse exits on its own; route usage problems through SpecError
    # so every malformed invocation lands on the same exit code
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SpecError(message)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _letters(text: str) -> tuple[str, ...]:
    if "," in text:
        parts = tuple(p.strip() for p in text.split(",") if p.strip())
    else:
        # bare token: one single-character letter per character
        parts = tuple(text.strip())
    if not parts:
        raise argparse.ArgumentTypeError(
            "expected comma-separated letters, or a bare string of "
            "single-character letters"
        )
    return parts


def parse_args(argv=None) -> CommandConfig:
    parser = _Parser(
        prog="carpetdim",
        description="Lift counting, pressure brackets, dimension bounds, and "
        "measure diagnostics for coded self-affine carpets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, spec=True):
        p = sub.add_parser(name, help=help_text)
        if spec:
            p.add_argument("--spec", required=True, dest="spec_path", help="system document (JSON)")
        p.add_argument("--node-budget", type=_positive, dest="node_budget")
        p.add_argument(
            "--no-timestamp",
            dest="timestamp",
            action="store_false",
            help="omit the generated_at field for byte-identical reruns",
        )
        return p

    add("analyze", "structural facts: connectivity, mixing index, fibers, clumps")

    p = add("dimension", "dimension interval for a carpet spec")
    p.add_argument("--depth", type=_positive, required=True)
    p.add_argument("--mode", choices=("collapsed", "exact"), default="collapsed")

    p = add("pressure", "pressure bracket at one depth, optional CSV series")
    p.add_argument("--depth", type=_positive, required=True)
    p.add_argument("--theta", type=float, help="count exponent in (0, 1]; forbidden for carpets")
    p.add_argument("--mode", choices=("collapsed", "exact"), default="collapsed")
    p.add_argument("--csv", dest="csv_path", help="also write the depth 1..n series as CSV")

    p = add("counts", "exact lift count of one image word")
    p.add_argument("--word", type=_letters, required=True, help="image word: comma-separated letters, or a bare run of single-character letters")

    p = add("gibbs", "scan cylinder-mass ratios against the theoretical envelope")
    p.add_argument("--level", type=_positive, required=True)
    p.add_argument("--n-max", type=_positive, required=True, dest="n_max")
    p.add_argument("--theta", type=float)

    p = add("additivity", "concatenation-ratio scan and uniqueness verdict")
    p.add_argument("--max-len", type=_positive, required=True, dest="max_len")
    p.add_argument("--threshold", type=float, default=DEFAULT_REFUTATION_THRESHOLD)

    p = add("cesaro", "shift-invariance defect of the averaged cylinder measure")
    p.add_argument("--level", type=_positive, required=True)
    p.add_argument("--n-terms", type=_positive, required=True, dest="n_terms")
    p.add_argument("--probe-depth", type=_positive, default=2, dest="probe_depth")
    p.add_argument("--theta", type=float)

    p = add("compensation", "growth rate of lift counts at an eventually periodic point")
    p.add_argument("--cycle", type=_letters, required=True)
    p.add_argument("--preperiod", type=_letters, default=())
    p.add_argument("--depth", type=_positive, default=12)

    p = add("render", "write the level-k approximation as a portable bitmap")
    p.add_argument("--level", type=_positive, required=True)
    p.add_argument("--resolution", type=_positive, default=None)
    p.add_argument("--output", required=True, help="output .pbm path")

    p = add("fixtures", "write the bundled example systems as spec files", spec=False)
    p.add_argument("--out-dir", default="fixtures", dest="out_dir")

    ns = parser.parse_args(argv)
    fields = {
        k: v
        for k, v in vars(ns).items()
        if k in CommandConfig.__dataclass_fields__ and v is not None
    }
    return CommandConfig(**fields)


def _load(config: CommandConfig):
    if config.spec_path is None:
        raise SpecError("this command requires --spec")
    return load_system(config.spec_path)


def _factor_and_theta(config: CommandConfig, need_theta: bool = True):
    """Resolve the input document into (factor system, carpet or None, theta)."""
    obj = _load(config)
    if isinstance(obj, CarpetSpec):
        if config.theta is not None:
            raise SpecError("--theta conflicts with a carpet spec; theta is log m / log l")
        fs, _ = carpet_to_factor(obj)
        return fs, obj, obj.theta()
    if need_theta and config.theta is None:
        raise SpecError("--theta is required for factor_system specs")
    return obj, None, config.theta


def _emit(config: CommandConfig, payload: dict) -> int:
    doc = {"schema": SCHEMA_VERSION, "command": config.command}
    doc.update(payload)
    if config.timestamp:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    sys.stdout.write(dump_document(doc))
    return EXIT_OK


def _constants_doc(constants) -> dict:
    return {
        "M": constants.M,
        "K": constants.K,
        "K_prime": constants.K_prime,
        "K_tilde": constants.K_tilde,
    }


def _cmd_analyze(config: CommandConfig) -> int:
    obj = _load(config)
    carpet = None
    if isinstance(obj, CarpetSpec):
        carpet = obj
        fs, _ = carpet_to_factor(obj)
    else:
        fs = obj
    report = validate_sft(fs.source)
    payload = {
        "system": {
            "kind": "carpet" if carpet else "factor_system",
            "symbols": list(fs.source.symbols),
            "image_alphabet": list(fs.image_alphabet),
            "fibers": {
                letter: list(fs.fiber_symbols(letter)) for letter in fs.image_alphabet
            },
        },
        "structure": {
            "irreducible": report.irreducible,
            "mixing": report.mixing,
            "mixing_index": report.mixing_index,
            "period": report.period,
        },
        "singleton_clumps": singleton_clumps(fs),
    }
    if carpet:
        payload["carpet"] = {
            "l": carpet.l,
            "m": carpet.m,
            "alpha": carpet.alpha(),
            "theta": carpet.theta(),
            "digits": [list(d) for d in carpet.digits],
            "full_shift": carpet.is_full_shift(),
        }
    return _emit(config, payload)


def _cmd_dimension(config: CommandConfig) -> int:
    obj = _load(config)
    if not isinstance(obj, CarpetSpec):
        raise SpecError("dimension requires a carpet spec (factor systems have no l, m)")
    estimate = hausdorff_dimension(
        obj, config.depth, mode=config.mode, node_budget=config.node_budget
    )
    pe = estimate.pressure
    dimension = {"lower": estimate.lower, "upper": estimate.upper}
    if estimate.closed_form is not None:
        dimension["closed_form"] = estimate.closed_form
    payload = {
        "alpha": estimate.alpha,
        "theta": obj.theta(),
        "n": estimate.n,
        "log_Sn": pe.log_Sn if pe else None,
        "pressure": {"lower": pe.lower, "upper": pe.upper} if pe else None,
        "dimension": dimension,
        "constants": _constants_doc(pe.constants) if pe else None,
        "warnings": list(estimate.warnings),
    }
    return _emit(config, payload)


def _cmd_pressure(config: CommandConfig) -> int:
    fs, _, theta = _factor_and_theta(config)
    estimate = pressure_interval(
        fs, theta, config.depth, mode=config.mode, node_budget=config.node_budget
    )
    if config.csv_path:
        _write_series_csv(config.csv_path, fs, theta, config.depth, config.node_budget)
    payload = {
        "theta": theta,
        "n": estimate.n,
        "log_Sn": estimate.log_Sn,
        "pressure": {"lower": estimate.lower, "upper": estimate.upper},
        "constants": _constants_doc(estimate.constants),
        "warnings": [],
    }
    if config.csv_path:
        payload["csv"] = config.csv_path
    return _emit(config, payload)


def _write_series_csv(path, fs, theta, n_max, node_budget):
    rows = convergence_rows(fs, theta, n_max, node_budget=node_budget)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "log_Sn", "words", "upper_bound", "lower_bound"])
            for row in rows:
                writer.writerow(
                    [
                        row["n"],
                        "%.17g" % row["log_Sn"],
                        row["words"],
                        "%.17g" % row["upper_bound"],
                        "%.17g" % row["lower_bound"],
                    ]
                )
    except OSError as exc:
        raise SpecError(f"cannot write CSV to {path}: {exc}") from exc


def _cmd_counts(config: CommandConfig) -> int:
    fs, _, _ = _factor_and_theta(config, need_theta=False)
    count = preimage_count(fs, config.word)
    return _emit(config, {"word": list(config.word), "count": count})


def _cmd_gibbs(config: CommandConfig) -> int:
    fs, _, theta = _factor_and_theta(config)
    envelope = gibbs_scan(
        fs, theta, config.level, config.n_max, node_budget=config.node_budget
    )
    pe = envelope.pressure_interval_used
    payload = {
        "gibbs": {
            "C1": envelope.C1_lower,
            "C2": envelope.C2_upper,
            "min_ratio": envelope.min_ratio,
            "max_ratio": envelope.max_ratio,
            "contained": envelope.contained,
            "level": envelope.level,
            "n_max": envelope.n_max,
            "pressure": {"lower": pe.lower, "upper": pe.upper},
        }
    }
    return _emit(config, payload)


def _cmd_additivity(config: CommandConfig) -> int:
    fs, _, _ = _factor_and_theta(config, need_theta=False)
    scan = additivity_scan(
        fs, config.max_len, threshold=config.threshold, node_budget=config.node_budget
    )
    additivity = {
        "L": scan.max_len,
        "min_ratio": scan.min_ratio,
        "max_ratio": scan.max_ratio,
        "min_trend": list(scan.min_trend),
        "verdict": scan.verdict,
        "threshold": scan.threshold,
    }
    if scan.witness is not None:
        additivity["witness"] = {
            "left": list(scan.witness[0]),
            "right": list(scan.witness[1]),
        }
    payload = {"additivity": additivity}
    try:
        unique = uniqueness_report(fs, scan)
        payload["uniqueness"] = {
            "singleton_clump": unique.singleton_clump,
            "clump_letters": list(unique.clump_letters),
            "almost_additive_evidence": unique.almost_additive_evidence,
            "verdict": unique.conclusion,
        }
    except NonMixingError as exc:
        payload["uniqueness"] = None
        payload["warnings"] = [str(exc)]
    return _emit(config, payload)


def _cmd_cesaro(config: CommandConfig) -> int:
    fs, _, theta = _factor_and_theta(config)
    defect = cesaro_defect(
        fs,
        theta,
        config.level,
        config.n_terms,
        config.probe_depth,
        node_budget=config.node_budget,
    )
    payload = {
        "cesaro": {
            "level": config.level,
            "n_terms": config.n_terms,
            "probe_depth": config.probe_depth,
            "defect": defect,
        }
    }
    return _emit(config, payload)


def _cmd_compensation(config: CommandConfig) -> int:
    fs, _, _ = _factor_and_theta(config, need_theta=False)
    point = EventuallyPeriodicPoint(tuple(config.preperiod), tuple(config.cycle))
    spectral, series = compensation_at_periodic(fs, point, depth=config.depth)
    payload = {
        "point": {"preperiod": list(point.preperiod), "cycle": list(point.cycle)},
        "spectral": spectral.value,
        "series": {"value": series.value, "depth": series.depth},
        "gap": abs(spectral.value - series.value),
    }
    return _emit(config, payload)


def _cmd_render(config: CommandConfig) -> int:
    obj = _load(config)
    if not isinstance(obj, CarpetSpec):
        raise SpecError("render requires a carpet spec")
    image = render_carpet(obj, config.level, resolution=config.resolution)
    try:
        write_pbm(image, config.output)
    except OSError as exc:
        raise SpecError(f"cannot write image to {config.output}: {exc}") from exc
    payload = {
        "render": {
            "width": image.width,
            "height": image.height,
            "filled_cells": image.filled_cells,
            "level": config.level,
            "output": config.output,
        }
    }
    return _emit(config, payload)


def _cmd_fixtures(config: CommandConfig) -> int:
    try:
        written = write_fixture_files(config.out_dir)
    except OSError as exc:
        raise SpecError(f"cannot write fixtures to {config.out_dir}: {exc}") from exc
    return _emit(config, {"written": written})


_HANDLERS = {
    "analyze": _cmd_analyze,
    "dimension": _cmd_dimension,
    "pressure": _cmd_pressure,
    "counts": _cmd_counts,
    "gibbs": _cmd_gibbs,
    "additivity": _cmd_additivity,
    "cesaro": _cmd_cesaro,
    "compensation": _cmd_compensation,
    "render": _cmd_render,
    "fixtures": _cmd_fixtures,
}


def run(config: CommandConfig) -> int:
    """Dispatch one parsed invocation; returns the process exit code."""
    handler = _HANDLERS.get(config.command)
    if handler is None:
        raise SpecError(f"unknown command {config.command!r}")
    return handler(config)


def main(argv=None) -> int:
    try:
        return run(parse_args(argv))
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except PreconditionError as exc:
        # NonMixingError and NotFullShiftError are subclasses
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
