"""Command line: ``crinv analyze <file>`` and ``crinv corpus``.

Exit codes: 0 when every checked claim passes, 1 when a claim fails (or a
golden report differs), 2 on input errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .geometry import GeometryError
from .parser import SpecError, load_spec, parse_coordinates
from .report import AnalysisConfig, analyze

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

FIXTURES = Path(__file__).resolve().parent / "fixtures"


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crinv", description="Pointwise CR invariants of real hypersurfaces.")
    ap.add_argument("--version", action="version", version=f"crinv {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze one model file")
    an.add_argument("file")
    an.add_argument("--point", action="append", metavar="COORDS",
                    help="point of interest 'w, z1, ...' (repeatable; overrides the file)")
    an.add_argument("--order", type=int, help="jet order for series computations")
    an.add_argument("--report", choices=("json", "text"), default="text")
    an.add_argument("--budget", type=Fraction, default=Fraction(4), help="weight budget for boundary-system steps")
    an.add_argument("--samples", type=int, default=64, help="positivity samples per point")
    an.add_argument("--diagnostics", action="store_true", help="add 1-jet dependence diagnostics")
    an.add_argument("--jobs", type=int, default=1, help="analyze points in parallel processes")
    an.add_argument("-o", "--output", help="write the report here instead of stdout")

    co = sub.add_parser("corpus", help="compare every fixture with its golden report")
    co.add_argument("--dir", default=str(FIXTURES))
    co.add_argument("--update", action="store_true", help="rewrite the golden reports")
    co.add_argument("--jobs", type=int, default=1)
    return ap


def _analyze(args) -> int:
    try:
        spec = load_spec(args.file)
        points = [parse_coordinates(p, spec.n) for p in args.point] if args.point else None
        if points:
            for p in points:
                if len(p) != spec.n:
                    raise SpecError(f"--point needs {spec.n} coordinates")
        if args.order is not None and args.order < 3:
            raise SpecError("--order must be at least 3")
        cfg = AnalysisConfig(points=points, order=args.order, budget=args.budget,
                             positivity_samples=args.samples, diagnostics=args.diagnostics or None,
                             jobs=args.jobs)
        rep = analyze(spec, cfg)
    except OSError as exc:
        print(f"crinv: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    except (SpecError, GeometryError) as exc:
        print(f"crinv: {args.file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = rep.to_json() if args.report == "json" else rep.to_text()
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def golden_path(spec_path: Path) -> Path:
    return spec_path.with_suffix(".json")


def fixture_report(spec_path: Path) -> str:
    return analyze(load_spec(spec_path)).to_json()


def _corpus(args) -> int:
    root = Path(args.dir)
    specs = sorted(root.glob("*.crs"))
    if not specs:
        print(f"crinv: no fixtures in {root}", file=sys.stderr)
        return EXIT_INPUT
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            reports = list(ex.map(fixture_report, specs))
    else:
        reports = [fixture_report(s) for s in specs]
    status = EXIT_OK
    for spec, text in zip(specs, reports):
        gold = golden_path(spec)
        if args.update:
            gold.write_text(text, encoding="utf-8")
            print(f"wrote {gold.name}")
            continue
        if not gold.exists():
            print(f"MISSING {gold.name}")
            status = EXIT_VIOLATION
        elif gold.read_text(encoding="utf-8") != text:
            print(f"DIFFERS {spec.name}")
            status = EXIT_VIOLATION
        else:
            print(f"ok      {spec.name}")
    return status


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return _analyze(args)
    return _corpus(args)


if __name__ == "__main__":
    sys.exit(main())
