import argparse

from ..core.errors import ConfigurationError
from ..schemas.experiment import AncillaBasis, DiagonalSign, ExperimentConfig
from ..services.experiment_service import experiment_service
from .arguments import add_angle_options, add_output_options, to_radians
from .output import build_manifest, write_record

OUTCOMES = ("0", "1", DiagonalSign.PLUS.value, DiagonalSign.MINUS.value)


def register(subparsers) -> None:
    parser = subparsers.add_parser("postselect", help="photon statistics conditioned on the ancilla outcome")
    parser.add_argument("--alpha", type=float, required=True, help="ancilla angle")
    parser.add_argument("--phi", type=float, required=True, help="interferometer phase")
    parser.add_argument(
        "--basis",
        choices=[b.value for b in AncillaBasis],
        default=AncillaBasis.COMPUTATIONAL.value,
    )
    parser.add_argument("--outcome", choices=OUTCOMES, required=True, help="0|1 (computational) or plus|minus (diagonal)")
    add_angle_options(parser)
    add_output_options(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = ExperimentConfig(alpha=to_radians(args.alpha, args.degrees), phi=to_radians(args.phi, args.degrees))
    basis = AncillaBasis(args.basis)

    if basis is AncillaBasis.COMPUTATIONAL:
        if args.outcome not in ("0", "1"):
            raise ConfigurationError(f"computational outcomes are 0 or 1, got {args.outcome!r}")
        result = experiment_service.postselect(config.alpha, config.phi, int(args.outcome))
    else:
        if args.outcome not in (DiagonalSign.PLUS.value, DiagonalSign.MINUS.value):
            raise ConfigurationError(f"diagonal outcomes are plus or minus, got {args.outcome!r}")
        result = experiment_service.describe_diagonal(config.alpha, config.phi, DiagonalSign(args.outcome))

    manifest = build_manifest(
        "postselect",
        {"alpha": config.alpha, "phi": config.phi, "basis": basis.value, "outcome": args.outcome},
    )
    write_record(result, manifest, args.out)
    return 0
