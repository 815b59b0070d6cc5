"""
Command dispatch and exit statuses.
"""
from pathlib import Path

import structlog

from apps.core.exceptions import (
    OutputError,
    PlqError,
    StagnationError,
    SweepAborted,
    ValidationError,
)
from apps.eigensolver import (
    solve_first_eigenpair,
    solve_scalar_dirichlet,
    solve_scalar_neumann,
    system_reductions,
)
from apps.limits import (
    SweepRow,
    ansatz_config,
    ansatz_singular_set,
    ansatz_slopes,
    apex_formula_value,
    balance_defect,
    compare_with_oracle,
    cone_plane_pair,
    continuation_sweep,
    lambda_inf_ball,
    lambda_inf_rectangle,
    limit_quotient,
    optimal_touch_point,
)
from apps.viscosity import f_infinity_residual, f_q_residual, h_infinity_residual, h_p_residual

from .serializers import write_csv, write_fields, write_json

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_OUTPUT = 4


def exit_status(exc):
    """Exit status for a failure raised while configuring or running a command."""
    if isinstance(exc, ValidationError):
        return EXIT_CONFIG
    if isinstance(exc, OutputError):
        return EXIT_OUTPUT
    return EXIT_NUMERICAL


def run_solve(config):
    dom = config.build_domain()
    res = solve_first_eigenpair(dom, config.exponents, config.solver_options())
    out = Path(config.out_dir)
    write_fields(out, dom, {'u': res.fields.u, 'v': res.fields.v})
    document = {
        **res.summary(),
        'log_lambda': res.log_lambda,
        'exponents': res.exponents.as_dict(),
        'config_echo': config.echo(),
    }
    write_json(out / 'solve.json', document)
    return document


def _write_sweep(config, rows, status):
    out = Path(config.out_dir)
    write_csv(out / 'sweep.csv', SweepRow.FIELDS, [row.as_row() for row in rows])
    document = {
        'status': status,
        'rows': [
            {
                **dict(zip(SweepRow.FIELDS, row.as_row(), strict=True)),
                'iterations': row.iterations,
                'converged': row.converged,
                'stalled': row.stalled,
            }
            for row in rows
        ],
        'config_echo': config.echo(),
    }
    write_json(out / 'sweep.json', document)
    return document


def run_sweep(config):
    dom = config.build_domain()
    try:
        rows = continuation_sweep(
            dom, config.limit_spec(), config.p_schedule, config.solver_options()
        )
    except SweepAborted as exc:
        _write_sweep(config, exc.rows, f'aborted at p={exc.p:g}')
        raise
    status = 'completed'
    stalled = [row.p for row in rows if row.stalled]
    if stalled:
        logger.warning("sweep_rows_stalled", p=stalled)
        status += ' with stalled rows at p=' + ','.join(f'{p:g}' for p in stalled)
    return _write_sweep(config, rows, status)


def run_limit(config):
    s = config.limit_spec()
    if s.is_rectangle:
        document = {**lambda_inf_rectangle(s).as_dict(), 'apex_value': apex_formula_value(s)}
    else:
        theta, k1, k2 = ansatz_slopes(s)
        document = {
            'value': lambda_inf_ball(s),
            'branch': None,
            'touch_point': optimal_touch_point(s),
            'theta': theta,
            'k1': k1,
            'k2': k2,
        }
    document.update(parameters=s.as_dict(), config_echo=config.echo())
    write_json(Path(config.out_dir) / 'limit.json', document)
    return document


def run_oracle(config):
    report = compare_with_oracle(config.limit_spec(), config.oracle_samples)
    document = {**report.as_dict(), 'config_echo': config.echo()}
    write_json(Path(config.out_dir) / 'oracle.json', document)
    return document


def run_residual(config):
    dom = config.build_domain()
    s = config.limit_spec()
    ansatz = ansatz_config(s, config.oracle_samples)
    pair = cone_plane_pair(s, dom, ansatz)
    singular = ansatz_singular_set(s, ansatz)
    Lambda = 1.0 / ansatz.M
    radius = config.excluded_radius

    reports = {
        'h_infinity': h_infinity_residual(pair.u, pair.v, Lambda, s, dom, singular, radius),
        'f_infinity': f_infinity_residual(pair.v, pair.u, Lambda, s, dom, singular, radius),
    }
    document = {
        'Lambda': Lambda,
        'ansatz': ansatz.as_dict(),
        'singular_set': singular.as_dict(),
        'limit_quotient': limit_quotient(pair, s, dom),
        'balance_defect': balance_defect(pair, s, dom),
    }
    grids = {'u_ansatz': pair.u, 'v_ansatz': pair.v}
    if config.p is not None:
        e = config.exponents
        res = solve_first_eigenpair(dom, e, config.solver_options())
        u, v = res.fields.u, res.fields.v
        reports['h_p'] = h_p_residual(u, v, res.eigenvalue, e, dom, excluded_radius=radius)
        reports['f_q'] = f_q_residual(v, u, res.eigenvalue, e, dom, excluded_radius=radius)
        document['solve'] = res.summary()
        grids.update(u=u, v=v)

    grids.update({name: report.residual_field for name, report in reports.items()})
    out = Path(config.out_dir)
    write_fields(out, dom, grids, stem='residual_fields')
    document.update(
        reports={name: report.summary() for name, report in reports.items()},
        config_echo=config.echo(),
    )
    write_json(out / 'residual.json', document)
    return document


def run_calibrate(config):
    dom = config.build_domain()
    p = config.p
    q = config.q if config.q is not None else p
    opts = config.solver_options()
    dirichlet = solve_scalar_dirichlet(dom, p, opts)
    neumann = solve_scalar_neumann(dom, q, opts)
    document = {
        'dirichlet': dirichlet.summary(),
        'neumann': neumann.summary(),
        'reductions': system_reductions(dirichlet.eigenvalue, p, neumann.eigenvalue, q),
        'config_echo': config.echo(),
    }
    write_json(Path(config.out_dir) / 'calibrate.json', document)
    return document


HANDLERS = {
    'solve': run_solve,
    'sweep': run_sweep,
    'limit': run_limit,
    'oracle': run_oracle,
    'residual': run_residual,
    'calibrate': run_calibrate,
}


def run(config):
    """
    Dispatch config.command and write its artifacts under config.out_dir.

    Returns:
        0 on success, 2 for invalid input, 3 for numerical failures
        (stagnation, aborted sweeps), 4 when an artifact cannot be written
    """
    logger.info("run_started", command=config.command, out_dir=config.out_dir)
    try:
        HANDLERS[config.command](config)
    except ValidationError as exc:
        logger.error("config_rejected", command=config.command, errors=exc.detail)
        return EXIT_CONFIG
    except StagnationError as exc:
        logger.error("solver_stagnated", error=str(exc), **exc.diagnostics)
        return EXIT_NUMERICAL
    except SweepAborted as exc:
        logger.error("sweep_failed", p=exc.p, rows=len(exc.rows), error=str(exc.cause))
        return EXIT_NUMERICAL
    except PlqError as exc:
        logger.error("run_failed", error=str(exc), kind=type(exc).__name__)
        return exit_status(exc)
    logger.info("run_finished", command=config.command)
    return EXIT_OK
