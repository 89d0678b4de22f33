"""
The single command line entry point for the package.

use as:

python -m screenmin analyze --input pvalues.csv --method screenmin --threshold default --out results.csv
python -m screenmin simulate --config configuration/pi1_sweep_m200_snr3.yaml --out study.csv --workers 4
python -m screenmin oracle --alpha 0.05 --m 100 --pi0 0.7 --pi1 0.25 --pi2 0.05 --snr 2
python -m screenmin curves --kind fwer-power-vs-c --m 100 --pi0 0.7 --pi1 0.25 --pi2 0.05 --snr 3 --out g.csv

"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from screenmin.config.config_classes import SimulationConfig
from screenmin.const import constants
from screenmin.const.constants import CurveKind, Method
from screenmin.distributions.alternative_law import AlternativeLaw
from screenmin.distributions.screening import PairMixture
from screenmin.monitoring.logging import setup_logging
from screenmin.processing.main import parse_method, run_analysis, run_curves, run_oracle, run_simulation
from screenmin.processing.output_helpers import format_key_values

log = logging.getLogger(__name__)


def _add_mixture_arguments(parser: argparse.ArgumentParser, required: bool):
    parser.add_argument('--alpha', type=float, default=constants.DEFAULT_ALPHA, help='familywise error level')
    parser.add_argument('--m', type=int, required=required, help='number of union hypotheses')
    parser.add_argument('--pi0', type=float, required=required, help='proportion of (0,0) pairs')
    parser.add_argument('--pi1', type=float, required=required, help='proportion of one-false pairs')
    parser.add_argument('--pi2', type=float, required=required, help='proportion of (1,1) pairs')
    parser.add_argument('--snr', type=float, required=required, help='signal to noise ratio of false hypotheses')


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-d', dest='debug_mode', action='store_true', help='run in debug mode')
    common.add_argument('--log-file', dest='log_file', type=str, default=None,
                        help='also write the log to this file')

    parser = argparse.ArgumentParser(prog='screenmin', description='ScreenMin entry point.')
    subparsers = parser.add_subparsers(dest='command', required=True)

    analyze = subparsers.add_parser('analyze', parents=[common], help='apply a procedure to a p-value CSV')
    analyze.add_argument('--input', required=True, type=str, help='CSV with header id,p1,p2')
    analyze.add_argument('--alpha', type=float, default=constants.DEFAULT_ALPHA, help='familywise error level')
    analyze.add_argument('--method', type=str, default=Method.SCREENMIN.value, choices=[m.value for m in Method])
    analyze.add_argument('--threshold', type=str, default=None,
                         help='screenmin selection threshold: default, adaptive or fixed:<c>')
    analyze.add_argument('--out', required=True, type=str, help='results CSV')

    simulate = subparsers.add_parser('simulate', parents=[common], help='run a Monte Carlo study')
    simulate.add_argument('--config', required=True, type=str, help='YAML or JSON simulation config')
    simulate.add_argument('--out', required=True, type=str, help='summary CSV')
    simulate.add_argument('--workers', type=int, default=1, help='number of worker processes')

    oracle = subparsers.add_parser('oracle', parents=[common], help='solve for the oracle threshold')
    _add_mixture_arguments(oracle, required=True)

    curves = subparsers.add_parser('curves', parents=[common], help='write plot-ready curve data')
    curves.add_argument('--kind', required=True, type=str, choices=[k.value for k in CurveKind])
    curves.add_argument('--out', required=True, type=str, help='curve CSV')
    curves.add_argument('--points', type=int, default=constants.CURVE_DEFAULT_POINTS)
    _add_mixture_arguments(curves, required=False)
    curves.add_argument('--min-c', dest='min_c', type=float, default=constants.CURVE_MIN_THRESHOLD)
    curves.add_argument('--max-c', dest='max_c', type=float, default=None)
    curves.add_argument('--u', type=float, default=constants.CURVE_DEFAULT_P0_QUANTILE,
                        help='level of the p0 curves')
    curves.add_argument('--thresholds', type=float, nargs='+', default=list(constants.CURVE_DEFAULT_P0_THRESHOLDS),
                        help='selection thresholds of the p0 curves')
    curves.add_argument('--max-snr', dest='max_snr', type=float, default=constants.CURVE_DEFAULT_MAX_SNR)
    return parser


def _mixture_from_args(args: argparse.Namespace) -> PairMixture:
    return PairMixture(m=args.m, pi0=args.pi0, pi1=args.pi1, pi2=args.pi2, law=AlternativeLaw(snr=args.snr))


def _run_command(args: argparse.Namespace):
    if args.command == 'analyze':
        method_spec = parse_method(args.method, args.threshold)
        result = run_analysis(args.input, args.alpha, method_spec, out_path=args.out)
        print(result.summary_text(), end="")
    elif args.command == 'simulate':
        config = SimulationConfig.from_yaml(args.config)
        summary = run_simulation(config, out_path=args.out, workers=args.workers)
        print(f"Wrote {len(summary.rows)} summary rows to {args.out}")
    elif args.command == 'oracle':
        print(format_key_values(run_oracle(args.alpha, _mixture_from_args(args))), end="")
    else:
        kind = CurveKind(args.kind)
        mix = None
        if kind == CurveKind.FWER_POWER_VS_C:
            missing = [name for name in ('m', 'pi0', 'pi1', 'pi2', 'snr') if getattr(args, name) is None]
            if missing:
                raise ValueError(f'curves --kind {kind.value} needs {", ".join("--" + name for name in missing)}.')
            mix = _mixture_from_args(args)
        data = run_curves(kind, out_path=args.out, alpha=args.alpha, mix=mix, u=args.u, thresholds=args.thresholds,
                          max_snr=args.max_snr, points=args.points, min_c=args.min_c, max_c=args.max_c)
        print(f"Wrote {len(data)} {kind.value} rows to {args.out}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    # argparse exits with status 2 on usage errors
    args = build_parser().parse_args(argv)

    log_level = "DEBUG" if args.debug_mode else "INFO"
    setup_logging(log_file_path=args.log_file, log_level=log_level)
    log.info('Running screenmin %s with log_level = %s', args.command, log_level)

    try:
        _run_command(args)
    except (ValueError, KeyError, FileNotFoundError) as error:
        message = error.args[0] if isinstance(error, KeyError) and error.args else error
        print(f"screenmin {args.command}: error: {message}", file=sys.stderr)
        return constants.EXIT_USAGE_ERROR
    return constants.EXIT_SUCCESS
