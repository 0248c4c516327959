"""Command-line driver: ``netjunction {simulate,preset,convergence}``.

Exit status is 0 on success, 2 for a bad configuration and 3 when a
numerical invariant breaks during a run.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .config import load_config
from .errors import ConfigError, DomainError, InvariantError
from .presets import PRESETS, convergence_study, run_preset, run_scenario
from .scheme import OuterBoundaryWarning

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


def _cells(text: str) -> list[int]:
    try:
        cells = [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not cells or min(cells) < 2:
        raise argparse.ArgumentTypeError("need at least one resolution with >= 2 cells")
    return cells


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netjunction", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a JSON scenario")
    sim.add_argument("config", type=Path)
    sim.add_argument("--out", type=Path, default=None, help="output directory (default: output_dir of the config)")

    pre = sub.add_parser("preset", help="run a shipped experiment")
    pre.add_argument("name", help=f"one of: {', '.join(PRESETS)}")
    pre.add_argument("--out", type=Path, required=True)
    pre.add_argument("--dx", type=float, default=None, help="override the mesh size")
    pre.add_argument("--full", action="store_true", help="convergence-table: add the 6000/12000 rows")

    conv = sub.add_parser("convergence", help="merge-solution error table")
    conv.add_argument("--cells", type=_cells, default=[60, 120, 600, 1200])
    conv.add_argument("--full", action="store_true", help="append 6000 and 12000 cells per arc")
    conv.add_argument("--dt", type=float, default=0.25e-4)
    conv.add_argument("--t", type=float, default=2.4)
    conv.add_argument("--out", type=Path, required=True)
    return parser


def _summary(result) -> list[str]:
    lines = []
    for t, rep in result.reports.items():
        lines.append(
            f"t={t:g}  E_whole={rep.whole}  E_incoming={rep.incoming}  E_outgoing={rep.outgoing}"
        )
    for t, gap in result.single_arc_gap.items():
        lines.append(f"t={t:g}  single-arc gap={gap:.3e}")
    return lines


def _table_lines(reports) -> list[str]:
    return [f"N={r.cells_per_arc}  E_whole={r.whole:.5e}" for r in reports]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default", OuterBoundaryWarning)
            if args.command == "simulate":
                cfg = load_config(args.config)
                out = args.out or (Path(cfg.output_dir) if cfg.output_dir else None)
                if out is None:
                    raise ConfigError("no output directory: pass --out or set output_dir")
                lines = _summary(run_scenario(cfg, out))
            elif args.command == "preset":
                if args.name == "convergence-table":
                    lines = _table_lines(run_preset(args.name, args.out, full=args.full))
                else:
                    lines = _summary(run_preset(args.name, args.out, dx=args.dx))
            else:
                cells = sorted(set(args.cells + ([6000, 12000] if args.full else [])))
                lines = _table_lines(convergence_study(cells, dt=args.dt, t=args.t, out_dir=args.out))
    except (ConfigError, DomainError) as exc:
        print(f"netjunction: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"netjunction: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantError as exc:
        print(f"netjunction: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    for line in lines:
        print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
