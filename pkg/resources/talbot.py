"""
Entrypoint for the electron Talbot interferometer simulations.

Every subcommand reads a run configuration and writes its results, together
with the resolved configuration, to an output directory.

Usage:
    python resources/talbot.py moire resources/configs/moire_2p8kev.cfg out/moire
    python resources/talbot.py carpet resources/configs/carpet_2p8kev.cfg out/carpet --preset test
    python resources/talbot.py demag resources/configs/demag_2kev.cfg out/demag
    python resources/talbot.py fit resources/configs/demag_2kev.cfg out/fit --frames out/demag/frames

Raises:
    ConfigurationError:
        If the configuration cannot be parsed or describes an unusable setup.
    InsufficientFrames:
        If a frame stack is too small for the fit (exit status 2).
"""

import argparse
import logging
import os
import sys

from dotenv import load_dotenv

from resource_classes import (
    ConfigurationError,
    DomainError,
    InsufficientFrames,
    NonFiniteObjective,
    NoRevivalFound,
    OutputRefused,
)
from resource_classes.data_models.config import PRESETS
from resource_classes.services.config_parser import ConfigParser
from resource_classes.services.experiment import Experiment

load_dotenv()

COMMANDS = ("carpet", "moire", "farfield", "demag", "fit", "revival-period")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="talbot", description="Electron Talbot interferometer simulations."
    )
    subcommands = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subcommands.add_parser(command)
        sub.add_argument("config", help="run configuration (section.key = value)")
        sub.add_argument("output", help="output directory")
        sub.add_argument("--preset", choices=sorted(PRESETS), help="grid/ensemble preset")
        sub.add_argument(
            "--threads",
            type=int,
            default=int(os.getenv("TALBOT_THREADS", "1")),
            help="worker threads (default: TALBOT_THREADS or 1)",
        )
        sub.add_argument("--seed", type=int, help="noise seed (default: noise.seed)")
        sub.add_argument("--verbose", "-v", action="store_true", help="debug logging")
        sub.add_argument("--progress", action="store_true", help="show progress bars")
        if command == "carpet":
            sub.add_argument("--no-align", action="store_true", help="skip row alignment")
        if command == "fit":
            sub.add_argument("--frames", required=True, help="frame stack directory")
    return parser


def run(args: argparse.Namespace) -> str:
    config = ConfigParser().parse_file(args.config, preset=args.preset)
    experiment = Experiment(
        config,
        args.output,
        threads=args.threads,
        seed=args.seed,
        show_progress=args.progress,
    )
    if args.command == "carpet":
        path = experiment.carpet(align=not args.no_align)
    elif args.command == "moire":
        path = experiment.moire()
    elif args.command == "farfield":
        path = experiment.farfield()
    elif args.command == "demag":
        path = experiment.demag()
    elif args.command == "fit":
        path = experiment.fit(args.frames)
    else:
        path = experiment.revival_period()
    return str(path)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        path = run(args)
    except InsufficientFrames as e:
        print(f"Not enough frames: {e}")
        return 2
    except (ConfigurationError, DomainError) as e:
        print(f"Invalid configuration: {e}")
        return 1
    except NoRevivalFound as e:
        print(f"No Talbot revival found: {e}")
        return 1
    except NonFiniteObjective as e:
        print(f"Curvature fit failed: {e}")
        return 1
    except OutputRefused as e:
        print(f"Output refused: {e}")
        return 1
    except Exception as e:
        print(f"Unexpected error: {e}")
        return 1
    print(f"{args.command}: wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
