import argparse

from ..core.config import settings
from ..core.errors import ConfigurationError
from ..core.random import ALGORITHM
from ..schemas.experiment import Detector, ExperimentConfig
from ..services.experiment_service import experiment_service
from ..services.sampler_service import SamplerService
from .arguments import CSV, STRUCTURED, add_angle_options, add_output_options, add_seed_option, resolve_seed, to_radians
from .output import build_manifest, write_csv, write_record

CSV_HEADER = ("alpha", "phi", "intensity", "visibility")
MIN_PHI_STEPS = 2


def register(subparsers) -> None:
    parser = subparsers.add_parser("sweep", help="interference pattern over phi for one or more alpha")
    parser.add_argument("--alpha", type=float, action="append", help="ancilla angle (repeatable)")
    parser.add_argument("--phi-steps", type=int, default=settings.PHI_STEPS, help="phase grid size")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="closed-form intensities (default)")
    mode.add_argument("--shots", type=int, default=None, help="estimate each point from N sampled shots")
    parser.add_argument("--detector", choices=[d.value for d in Detector], default=Detector.D0.value)
    parser.add_argument(
        "--postselect",
        type=int,
        choices=(0, 1),
        default=None,
        help="keep only photons whose ancilla gave this outcome (exact mode)",
    )
    add_seed_option(parser)
    add_angle_options(parser)
    add_output_options(parser, formats=(CSV, STRUCTURED))
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Sweep φ for every requested α."""
    if not args.alpha:
        raise ConfigurationError("sweep needs at least one --alpha")
    if args.phi_steps < MIN_PHI_STEPS:
        raise ConfigurationError(
            f"--phi-steps must be at least {MIN_PHI_STEPS} to bracket the pattern extrema",
            details={"phi_steps": args.phi_steps},
        )
    if args.shots is not None and args.postselect is not None:
        raise ConfigurationError("--postselect works on exact sweeps only")
    if args.shots is not None and args.detector != Detector.D0.value:
        raise ConfigurationError("sampled sweeps report detector d0 only")

    alphas = [to_radians(alpha, args.degrees) for alpha in args.alpha]
    for alpha in alphas:
        ExperimentConfig(alpha=alpha, phi=0.0)

    detector = Detector(args.detector)
    grid = experiment_service.phase_grid(args.phi_steps)
    seed = resolve_seed(args.seed) if args.shots is not None else None

    if args.shots is not None:
        sampler = SamplerService()
        patterns = [sampler.sampled_sweep(alpha, grid, args.shots, seed) for alpha in alphas]
    elif args.postselect is not None:
        patterns = [experiment_service.conditional_sweep(alpha, grid, args.postselect, detector) for alpha in alphas]
    else:
        patterns = [experiment_service.sweep(alpha, grid, detector) for alpha in alphas]

    manifest = build_manifest(
        "sweep",
        {
            "alpha": alphas,
            "phi_steps": args.phi_steps,
            "shots": args.shots,
            "detector": detector.value,
            "postselect": args.postselect,
            "format": args.format,
        },
        seed=seed,
        rng_algorithm=ALGORITHM if seed is not None else None,
    )

    if args.format == CSV:
        rows = [
            (pattern.alpha, row.phi, row.intensity, pattern.visibility)
            for pattern in patterns
            for row in pattern.rows
        ]
        write_csv(CSV_HEADER, rows, args.out, manifest)
    else:
        write_record(patterns, manifest, args.out)
    return 0
