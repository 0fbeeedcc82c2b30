__author__ = 'Joseph Ryan'
__license__ = "GPLv2"
__maintainer__ = "Joseph Ryan"
__email__ = "jr@aphyt.com"

import argparse
import logging
import os
import sys
import time

import numpy as np

from ..deformation import DeformationConfig, Trajectory, deform
from ..ekeland import limiting_case_search, strict_case_search
from ..errors import ConfigError, CritLinkError
from ..geometry import find_intersection, verify_linking
from ..minimax import (AdmissibleMap, check_geometry_bounds, estimate_cgamma, locate_on_S, pucci_serrin_third,
                       rabinowitz_sphere)
from .config import MODES, ProblemConfig, load_config
from .reporting import RunReport, read_report, write_report

__all__ = ['EXIT_OK', 'EXIT_CONFIG', 'EXIT_FAILURE', 'build_parser', 'run', 'main']

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FAILURE = 3


def _gammas(config: ProblemConfig, pair, rng):
    if config.gamma.kind == 'identity':
        return [AdmissibleMap.identity(pair)]
    return [AdmissibleMap.perturbed_identity(pair, config.gamma.amplitude, rng) for _ in range(config.gamma.count)]


def _node_rows(f, images, t=0.0):
    values = f._value(images)
    norms = np.linalg.norm(f.gradient(images), axis=-1)
    return [(t, node, images[node].tolist(), values[node], norms[node]) for node in range(len(images))]


def _run_link_verify(config: ProblemConfig, report: RunReport, rng):
    pair = config.build_pair()
    tolerances = config.tolerances
    outcomes = []
    for index, gamma in enumerate(_gammas(config, pair, rng)):
        if pair.supports_homotopy:
            linking = verify_linking(pair, gamma, eta=tolerances.eta_deg, tau_link=tolerances.tau_link)
            outcomes.append(linking.to_dict())
            witness = linking.witness
            report.checks['linked_%d' % index] = linking.status == 'linked'
        else:
            witness = find_intersection(gamma, pair, tolerances.tau_link)
            outcomes.append({'kind': pair.kind, 'witness': witness.to_dict()})
        report.checks['witness_%d' % index] = witness is not None and witness.residual <= tolerances.tau_link
    report.results['linking'] = outcomes


def _run_minimax(config: ProblemConfig, report: RunReport, rng):
    f = config.build_functional()
    pair = config.build_pair()
    tolerances = config.tolerances
    gamma0 = _gammas(config, pair, rng)[0]
    minimax = estimate_cgamma(f, pair, gamma0, b=tolerances.b, tau_c=tolerances.tau_c, tau_b=tolerances.tau_b)
    report.results['minimax'] = minimax.to_dict()
    report.history = minimax.iteration_history
    report.trace_rows = _node_rows(f, minimax.best_map.node_images, float(len(minimax.iteration_history) - 1))
    report.checks['above_alpha'] = minimax.c_estimate >= minimax.alpha - tolerances.tau_c
    report.checks['sup_refined'] = minimax.sup_converged
    if minimax.limiting_case:
        localization = locate_on_S(minimax, pair, f)
        report.results['localization'] = localization.to_dict()
        report.checks['localized_on_S'] = True
    else:
        report.checks['candidate_critical'] = minimax.grad_norm_at_candidate <= 1e-3


def _run_deform(config: ProblemConfig, report: RunReport, rng):
    f = config.build_functional()
    section = config.deform
    D, E = section.sets(f.dimension)
    settings = DeformationConfig(c=section.c, eps_bar=section.eps_bar, delta=section.delta, b=config.tolerances.b,
                                 max_steps=section.max_steps, tau_flow=config.tolerances.tau_flow, seed=config.seed)
    result = deform(f, D, E, section.c, settings, rng=rng)
    report.results['deformation'] = result.to_dict()
    count = len(E.points)
    along_E = Trajectory(times=result.trajectory.times, points=result.trajectory.points[:, :count])
    report.trace_rows = list(along_E.rows(f, result.field))
    report.checks['reversible'] = result.reversibility_error <= settings.tau_flow
    report.checks['monotone'] = result.monotonicity_violations == 0
    report.checks['E_below_level'] = result.e_value_max <= section.c - result.eps


def _run_ekeland(config: ProblemConfig, report: RunReport, rng):
    f = config.build_functional()
    pair = config.build_pair()
    tolerances = config.tolerances
    gamma = _gammas(config, pair, rng)[0]
    points = []
    if config.ekeland.mode == 'limiting':
        c = config.ekeland.c
        if c is None:
            c = check_geometry_bounds(f, pair, tolerances.tau_b).alpha
        for eps in config.eps:
            point = limiting_case_search(f, pair, gamma, eps, c, tau_M=tolerances.tau_M)
            points.append(point.to_dict())
            report.checks['bounds_eps_%g' % eps] = point.holds
    else:
        c = config.ekeland.c
        if c is None:
            c = estimate_cgamma(f, pair, b=tolerances.b, tau_c=tolerances.tau_c, tau_b=tolerances.tau_b).c_estimate
        for eps in config.eps:
            point = strict_case_search(f, pair, gamma, eps, c, tau_M=tolerances.tau_M)
            points.append(point.to_dict())
            report.checks['bounds_eps_%g' % eps] = point.holds
    report.results['ekeland'] = {'mode': config.ekeland.mode, 'c': c, 'points': points}


def _run_corollaries(config: ProblemConfig, report: RunReport, rng):
    f = config.build_functional()
    section = config.corollary
    if section.kind == 'pucci_serrin':
        if section.m1 is None or section.m2 is None:
            raise ConfigError('[corollary] pucci_serrin needs m1 and m2')
        candidate = pucci_serrin_third(f, section.m1, section.m2, mesh_resolution=config.mesh_resolution)
        norm = f.gradient_norm(candidate)
        report.results['third_critical_point'] = {'point': candidate.tolist(), 'f': f.value(candidate),
                                                  'grad_norm': norm}
        report.checks['critical'] = norm <= 1e-3
    else:
        if section.e is None:
            raise ConfigError('[corollary] rabinowitz needs e')
        localization = rabinowitz_sphere(f, section.e, section.r, mesh_resolution=config.mesh_resolution)
        report.results['sphere_localization'] = localization.to_dict()
        report.checks['on_sphere'] = abs(float(np.linalg.norm(localization.point)) - section.r) <= 1e-3


_DISPATCH = {'link-verify': _run_link_verify, 'minimax': _run_minimax, 'deform': _run_deform,
             'ekeland': _run_ekeland, 'corollaries': _run_corollaries}


def run(config: ProblemConfig) -> RunReport:
    """
    Dispatch the configured mode. Numerical failures are recorded on the report with the module that
    raised them; configuration errors propagate

    :param config: validated configuration
    :return:
    """
    config.validate()
    report = RunReport(mode=config.mode, config=config.to_dict())
    rng = np.random.default_rng(config.seed)
    started = time.perf_counter()
    try:
        _DISPATCH[config.mode](config, report, rng)
    except ConfigError:
        raise
    except CritLinkError as err:
        logger.error('%s failed in %s: %s', config.mode, err.module, err)
        report.error = {'module': err.module, 'type': type(err).__name__, 'message': str(err)}
    report.wall_time = time.perf_counter() - started
    logger.info('%s finished in %.2f s, passed: %s', config.mode, report.wall_time, report.passed)
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='critlink', description='Linking geometries, minimax levels and '
                                                                  'almost critical points')
    commands = parser.add_subparsers(dest='command', required=True)
    for mode in MODES:
        command = commands.add_parser(mode, help='run the %s mode' % mode)
        command.add_argument('--config', help='TOML problem file')
        command.add_argument('--seed', type=int, help='seed of all random choices')
        command.add_argument('--out', help='output directory')
        command.add_argument('--eps', type=float, nargs='+', help='eps values of the sweep')
        command.add_argument('--log-level', default='WARNING', help='logging level (default WARNING)')
    command = commands.add_parser('report', help='summarize an existing report.json')
    command.add_argument('--out', required=True, help='directory holding report.json')
    command.add_argument('--log-level', default='WARNING')
    return parser


def _summarize(out_dir) -> int:
    try:
        data = read_report(os.path.join(out_dir, 'report.json'))
    except (OSError, ValueError) as err:
        print('critlink: cannot read report in %s: %s' % (out_dir, err), file=sys.stderr)
        return EXIT_CONFIG
    print('mode %s: %s' % (data['mode'], 'passed' if data['passed'] else 'FAILED'))
    for name, holds in sorted(data['checks'].items()):
        print('  %-24s %s' % (name, 'ok' if holds else 'FAILED'))
    if data.get('error'):
        print('  error in %(module)s: %(message)s' % data['error'])
    return EXIT_OK if data['passed'] else EXIT_FAILURE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_OK if exit_.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format='%(levelname)s %(name)s: %(message)s')
    if args.command == 'report':
        return _summarize(args.out)
    try:
        config = load_config(args.config) if args.config else ProblemConfig(mode=args.command)
        config.mode = args.command
        if args.seed is not None:
            config.seed = args.seed
        if args.out is not None:
            config.output = args.out
        if args.eps is not None:
            config.eps = list(args.eps)
        report = run(config.validate())
    except ConfigError as err:
        print('critlink: configuration error: %s' % err, file=sys.stderr)
        return EXIT_CONFIG
    write_report(report, config.output)
    if report.error is not None:
        print('critlink: %(type)s in %(module)s: %(message)s' % report.error, file=sys.stderr)
    elif not report.passed:
        failed = [name for name, holds in report.checks.items() if not holds]
        print('critlink: failed checks: %s' % ', '.join(failed), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILURE
