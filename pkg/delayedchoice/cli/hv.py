"""`hv` command group: family enumeration, grid search and the multi-setting verdict."""

import argparse
from pathlib import Path
from typing import List

from ..core.errors import ConfigurationError, DegenerateConditionError
from ..schemas.hvmodel import HVBranch, Setting
from ..services.hv_service import GRID_RESOLUTIONS, HVService, hv_service
from .arguments import add_angle_options, add_output_options, to_radians
from .output import build_manifest, write_record


def register(subparsers) -> None:
    parser = subparsers.add_parser("hv", help="binary hidden-variable analysis")
    commands = parser.add_subparsers(dest="hv_command", required=True)

    enumerate_parser = commands.add_parser("enumerate", help="analytic solution families at one setting")
    enumerate_parser.add_argument("--alpha", type=float, required=True)
    enumerate_parser.add_argument("--phi", type=float, default=None)
    enumerate_parser.add_argument("--tol", type=float, default=None)
    add_angle_options(enumerate_parser)
    add_output_options(enumerate_parser)
    enumerate_parser.set_defaults(handler=run_enumerate)

    search_parser = commands.add_parser("search", help="brute-force grid over [0,1]^5")
    search_parser.add_argument("--alpha", type=float, required=True)
    search_parser.add_argument("--phi", type=float, required=True)
    search_parser.add_argument("--resolution", type=float, choices=GRID_RESOLUTIONS, default=GRID_RESOLUTIONS[0])
    search_parser.add_argument("--tol", type=float, default=None)
    search_parser.add_argument(
        "--unanchored",
        action="store_true",
        help="plain grid without the setting's anchor values (tolerance defaults to resolution/4)",
    )
    search_parser.add_argument("--workers", type=int, default=None, help="grid partitions run in parallel")
    add_angle_options(search_parser)
    add_output_options(search_parser)
    search_parser.set_defaults(handler=run_search)

    verdict_parser = commands.add_parser("verdict", help="cross-setting no-go report")
    verdict_parser.add_argument("--settings", type=Path, required=True, help="file of 'alpha,phi' lines")
    verdict_parser.add_argument("--resolution", type=float, choices=GRID_RESOLUTIONS, default=GRID_RESOLUTIONS[0])
    verdict_parser.add_argument("--tol", type=float, default=None)
    add_angle_options(verdict_parser)
    add_output_options(verdict_parser)
    verdict_parser.set_defaults(handler=run_verdict)


def read_settings(path: Path, degrees: bool = False) -> List[Setting]:
    """Parse `alpha,phi` lines; blank lines and `#` comments are skipped."""
    if not path.is_file():
        raise ConfigurationError(f"settings file {path} not found")

    parsed = []
    for number, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [field.strip() for field in line.split(",")]
        if len(fields) != 2:
            raise ConfigurationError(f"{path}:{number}: expected 'alpha,phi', got {raw!r}")
        try:
            alpha, phi = (to_radians(float(field), degrees) for field in fields)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{number}: {exc}") from exc
        parsed.append(Setting(alpha=alpha, phi=phi))
    return parsed


def run_enumerate(args: argparse.Namespace) -> int:
    alpha = to_radians(args.alpha, args.degrees)
    if hv_service.is_degenerate_alpha(alpha, args.tol):
        family = hv_service.enumerate_branches(Setting(alpha=alpha, phi=0.0), args.tol)[0]
        raise DegenerateConditionError(
            f"{HVBranch.DEGENERATE_ALPHA.value}: {family.relation}; the constraint system is trivial",
            details={"alpha": alpha, "pinned": family.pinned},
        )
    if args.phi is None:
        raise ConfigurationError("hv enumerate needs --phi for a non-degenerate alpha")

    setting = Setting(alpha=alpha, phi=to_radians(args.phi, args.degrees))
    families = hv_service.enumerate_branches(setting, args.tol)
    manifest = build_manifest("hv enumerate", {**setting.model_dump(), "tol": args.tol})
    write_record(families, manifest, args.out, message=f"{len(families)} families")
    return 0


def run_search(args: argparse.Namespace) -> int:
    setting = Setting(alpha=to_radians(args.alpha, args.degrees), phi=to_radians(args.phi, args.degrees))
    service = HVService(workers=args.workers) if args.workers else hv_service
    report = service.search_report(setting, args.resolution, tol=args.tol, anchored=not args.unanchored)

    manifest = build_manifest(
        "hv search",
        {
            **setting.model_dump(),
            "resolution": args.resolution,
            "tol": report.tolerance,
            "anchored": report.anchored,
        },
    )
    write_record(report, manifest, args.out, message=f"{report.points} feasible, {report.unclassified} unclassified")
    return 0


def run_verdict(args: argparse.Namespace) -> int:
    setting_list = read_settings(args.settings, args.degrees)
    report = hv_service.verdict(setting_list, tol=args.tol, resolution=args.resolution)

    manifest = build_manifest(
        "hv verdict",
        {
            "settings": [s.model_dump() for s in setting_list],
            "settings_file": str(args.settings),
            "resolution": args.resolution,
            "tol": args.tol,
        },
    )
    write_record(report, manifest, args.out, message=report.verdict)
    return 0
