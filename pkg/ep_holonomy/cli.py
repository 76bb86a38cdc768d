"""
Command line entry point:

    ep-holonomy analyze|phase|curvature|sweep|run --config <file> [--out <dir>] [--samples N] [--format csv|json]
        [--plot] [--workers W]

Exit codes: 0 on success, 1 on other library errors, 2 on configuration errors, 3 when a sample comes within the EP
guard, 4 on precision loss.
"""
import argparse
import logging
import sys

from ep_holonomy import lib, reports
from ep_holonomy.Runner import COMMANDS, Runner, load_config
from ep_holonomy.exceptions import ConfigError, HolonomyError, NearEP, PrecisionLoss

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NEAR_EP = 3
EXIT_PRECISION = 4

RUN = 'run'


def build_parser():
    parser = argparse.ArgumentParser(prog='ep-holonomy',
                                     description='Geometric phases and holonomies of non-Hermitian matrix families')
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True
    helps = {'analyze': 'Monodromy permutations and the group they generate',
             'phase': 'Dynamical and geometric phases per spectral label',
             'curvature': 'Curvature over a 2D parameter grid',
             'sweep': 'Adiabatic convergence of direct time evolution',
             RUN: 'Run the commands listed in the config'}
    for command in COMMANDS + [RUN]:
        subparser = subparsers.add_parser(command, help=helps[command])
        subparser.add_argument('--config', required=True, help='YAML job description')
        subparser.add_argument('--out', help='Output directory, overrides output.dir')
        subparser.add_argument('--samples', type=int, help='Samples per loop, overrides samples')
        subparser.add_argument('--format', choices=reports.FORMATS, help='Table format, overrides output.format')
        subparser.add_argument('--plot', action='store_true', help='Write SVG plots')
        subparser.add_argument('--workers', type=int, help='Worker pool size, overrides workers')
    return parser


def apply_overrides(config, args):
    """
    Command line flags take precedence over the config file

    :type config: dict
    :type args: argparse.Namespace
    :rtype: dict
    """
    config = dict(config)
    output = dict(config.get('output', dict()) or dict())
    if args.out is not None:
        output['dir'] = args.out
    if args.format is not None:
        output['format'] = args.format
    if args.plot:
        output['plot'] = True
    config['output'] = output
    if args.samples is not None:
        config['samples'] = args.samples
    if args.workers is not None:
        config['workers'] = args.workers
    return config


def main(argv=None):
    lib.configure_logging()
    args = build_parser().parse_args(argv)

    try:
        config = apply_overrides(load_config(args.config), args)
        runner = Runner(config)
        commands = runner.commands if args.command == RUN else [args.command]
        runner.run(commands)
    except PrecisionLoss as error:
        print('Precision loss: {}. Suggested samples: {}'.format(error, error.suggested_samples), file=sys.stderr)
        return EXIT_PRECISION
    except NearEP as error:
        print('Too close to a degeneracy at t = {}: {}'.format(error.t, error), file=sys.stderr)
        return EXIT_NEAR_EP
    except ConfigError as error:
        print('Configuration error: {}'.format(error), file=sys.stderr)
        return EXIT_CONFIG
    except HolonomyError as error:
        logging.error('{}: {}'.format(type(error).__name__, error))
        print('{}: {}'.format(type(error).__name__, error), file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
