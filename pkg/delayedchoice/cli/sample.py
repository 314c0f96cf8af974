import argparse

from ..core.config import settings
from ..core.errors import ConfigurationError
from ..core.random import ALGORITHM
from ..schemas.experiment import AncillaBasis, ControlMode, ExperimentConfig
from ..schemas.sampler import SampleReport
from ..services.experiment_service import experiment_service
from ..services.sampler_service import CELL_NAMES, SamplerService
from .arguments import CSV, STRUCTURED, add_angle_options, add_output_options, add_seed_option, resolve_seed, to_radians
from .output import build_manifest, write_csv, write_record

CSV_HEADER = ("cell", "count", "empirical", "expected")


def register(subparsers) -> None:
    parser = subparsers.add_parser("sample", help="seeded click counts checked against the exact distribution")
    parser.add_argument("--alpha", type=float, required=True, help="ancilla angle")
    parser.add_argument("--phi", type=float, required=True, help="interferometer phase")
    parser.add_argument("--shots", type=int, default=settings.DEFAULT_SHOTS, help="number of shots")
    parser.add_argument("--mode", choices=[m.value for m in ControlMode], default=ControlMode.QUANTUM.value)
    parser.add_argument(
        "--basis",
        choices=[b.value for b in AncillaBasis],
        default=AncillaBasis.COMPUTATIONAL.value,
        help="ancilla readout basis (quantum mode)",
    )
    parser.add_argument("--workers", type=int, default=None, help="sampling threads")
    add_seed_option(parser)
    add_angle_options(parser)
    add_output_options(parser, formats=(STRUCTURED, CSV))
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.shots < 1:
        raise ConfigurationError("--shots must be at least 1", details={"shots": args.shots})

    config = ExperimentConfig(
        alpha=to_radians(args.alpha, args.degrees),
        phi=to_radians(args.phi, args.degrees),
        control_mode=ControlMode(args.mode),
        ancilla_basis=AncillaBasis(args.basis),
        shots=args.shots,
        seed=resolve_seed(args.seed),
    )
    sampler = SamplerService(workers=args.workers)

    if config.control_mode is ControlMode.QUANTUM and config.ancilla_basis is AncillaBasis.COMPUTATIONAL:
        expected = experiment_service.joint_distribution(config.alpha, config.phi)
    else:
        expected = experiment_service.exact_program_distribution(config)

    counts = sampler.sample_clicks(config)
    report = SampleReport(
        config=config,
        counts=counts,
        empirical=sampler.empirical_distribution(counts),
        expected=expected,
        fit=sampler.goodness_of_fit(counts, expected),
    )

    manifest = build_manifest(
        "sample",
        config.model_dump(mode="json"),
        seed=config.seed,
        rng_algorithm=ALGORITHM,
    )
    if args.format == CSV:
        rows = zip(CELL_NAMES, counts.as_tuple(), report.empirical.as_tuple(), expected.as_tuple())
        write_csv(CSV_HEADER, rows, args.out, manifest)
    else:
        write_record(report, manifest, args.out, message="pass" if report.fit.passed else "fail")
    return 0
