"""Command line interface.

Exit codes: 0 on success, 2 if the cone condition failed on some edge and 1
on any other error.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

from conecert.config import PipelineConfig, load_config
from conecert.errors import ConecertError, StageError
from conecert.pipeline import Pipeline, RunSummary, stage_names
from conecert.serializer import Serializer
from conecert.svg import write_svg


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNVERIFIED = 2


def _parse_axes(value: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in value.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f'bad axes {value!r}, expected i,j')


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('config', type=Path, help='Path to the JSON config')
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument('--deterministic', dest='mode', action='store_const',
                      const='deterministic',
                      help='Map vertices sequentially')
    mode.add_argument('--parallel', dest='mode', action='store_const',
                      const='parallel',
                      help='Map vertices in worker processes')
    parser.add_argument('--threads', type=int, default=None,
                        help='Number of worker processes in parallel mode')
    parser.add_argument('--out', type=str, default=None,
                        help='Output directory, overrides the config')


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    parser = argparse.ArgumentParser(
        prog='conecert',
        description='Certify uniform hyperbolicity of explicit maps.')
    parser.add_argument('-v', '--verbose', action='store_true',
                        help='Log debug messages')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='Run every stage')
    _add_run_options(run)

    for name in stage_names():
        stage = commands.add_parser(name, help=f'Run the {name} stage')
        _add_run_options(stage)
        stage.add_argument('--from', dest='from_dir', type=Path,
                           default=None,
                           help='Directory with the artifacts of earlier '
                                'stages, defaults to the output directory')

    svg = commands.add_parser('export-svg',
                              help='Project a box list onto two axes')
    svg.add_argument('boxlist', type=Path, help='Path to a box list')
    svg.add_argument('--axes', type=_parse_axes, default=(0, 1),
                     help='Two comma separated axes, eg. 0,2')
    svg.add_argument('--out', type=Path, default=None,
                     help='SVG path, defaults to the box list with .svg')
    return parser


def _load(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config)
    return config.with_overrides(mode=args.mode, threads=args.threads,
                                 output=args.out)


def _report(summary: RunSummary) -> int:
    print(summary.format_table())
    if summary.exit_code == EXIT_UNVERIFIED:
        print('Cone condition not verified on every edge')
    return summary.exit_code


def _export_svg(args: argparse.Namespace) -> int:
    grid, cubes = Serializer().read_box_list(args.boxlist)
    out = args.out if args.out is not None \
        else args.boxlist.with_suffix('.svg')
    write_svg(out, grid, cubes, args.axes)
    logger.info('Wrote %d cubes to %s', len(cubes), out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line interface.

    Args:
        argv: Arguments without the program name. Defaults to sys.argv.

    Returns:
        The exit code.

    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(asctime)s %(levelname)s %(name)s: '
                               '%(message)s')
    try:
        if args.command == 'export-svg':
            return _export_svg(args)
        pipeline = Pipeline(_load(args))
        if args.command == 'run':
            return _report(pipeline.run())
        return _report(pipeline.run_stage(args.command, args.from_dir))
    except StageError as e:
        message = f'error in stage {e.stage_name}: {e.cause}'
        if e.cube is not None:
            message += f' (cube {e.cube})'
        print(message, file=sys.stderr)
        return EXIT_ERROR
    except ConecertError as e:
        print(f'error: {e}', file=sys.stderr)
        return EXIT_ERROR


def entry_point() -> None:  # pragma: no cover
    """Console script entry point."""
    sys.exit(main())
