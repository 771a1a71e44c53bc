"""
Command-line front end: ``fracbinom {simulate,moments,estimate,study,lrd}``.

Exit codes: 0 success, 1 invalid input or configuration, 2 computation
failure (including a non-converged estimate), 3 I/O failure.
"""
import argparse
import logging
import sys
import typing as t

from . import __version__, schemas
from .config import COMMANDS, resolve_config
from .estimator import (
    SOLVE_TOLERANCE,
    STUDY_TOLERANCE,
    default_observation_time,
    run_mc_study,
    sample_moments,
    solve_moment_equations,
)
from .events import ReplicateFinishedEvent
from .exceptions import ConfigError, FracbinomError, ParameterError, SampleFileError
from .export import ResultWriter, read_sample_file
from .moments import DEPENDENCE_MODES, covariance_row, dependence_fit, fit_decay_exponent, moment_table
from .objects import RunConfig
from .rng import RngStream
from .runner import StudyRunner
from .simulation import CROSS_SECTION_METHODS, sample_fbp_marginals, simulate_path_set
from .utils import parse_t_grid

_LOG = logging.getLogger("fracbinom.cli")

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_COMPUTATION = 2
EXIT_IO = 3

DEFAULT_LRD_GRID = "log:1e2:1e5:7"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> t.NoReturn:
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lambda", type=float, help="birth rate per free slot")
    common.add_argument("--mu", type=float, help="death rate per individual")
    common.add_argument("--nu", type=float, help="fractional order in (0, 1]")
    common.add_argument("--N", type=int, help="capacity")
    common.add_argument("--M", type=int, help="initial population")
    common.add_argument("--horizon", type=float, help="simulation end time")
    common.add_argument("--events", type=int, help="simulate this many jumps per path")
    common.add_argument("--paths", type=int, help="number of paths")
    common.add_argument("--t-grid", dest="t_grid", help="'0,1,5', 'log:start:stop:count' or 'lin:start:stop:count'")
    common.add_argument("--s", type=float, help="first time of covariance pairs")
    common.add_argument("--delta", type=float, help="increment lag")
    common.add_argument("--J", type=int, help="marginals per replicate")
    common.add_argument("--K", type=int, help="replicates")
    common.add_argument("--T", type=float, help="observation time")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--threads", type=int, help="worker processes")
    common.add_argument("--out", help="output path (stdout when omitted)")
    common.add_argument("--format", choices=schemas.FORMATS)
    common.add_argument("--method", choices=CROSS_SECTION_METHODS, help="cross-section sampler")
    common.add_argument("--tolerance", type=float, help="scaled residual accepted as converged")
    common.add_argument("--input", help="sample file (estimate) or t,value points (lrd)")
    common.add_argument("--mode", choices=DEPENDENCE_MODES)
    common.add_argument("--lambda-min", dest="lambda_min", type=float)
    common.add_argument("--lambda-max", dest="lambda_max", type=float)
    common.add_argument("--figure", choices=sorted(schemas.FIGURE_PRESETS), help="reference path parameter set")
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--verbose", "-v", action="store_true", default=None)

    parser = _Parser(prog="fracbinom", description="Fractional binomial process toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    commands.add_parser("simulate", parents=[common], help="simulate sample paths")
    commands.add_parser("moments", parents=[common], help="moment table and covariance grid")
    commands.add_parser("estimate", parents=[common], help="method-of-moments estimate")
    commands.add_parser("study", parents=[common], help="Monte Carlo study of the estimator")
    commands.add_parser("lrd", parents=[common], help="dependence exponent fit")
    return parser


def _require(config: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) is None]
    if missing:
        raise ConfigError(f"{config.command} needs {', '.join('--' + name for name in missing)}", missing[0])


def cmd_simulate(config: RunConfig) -> int:
    """
    Write ``config.paths`` FBP sample paths; path ``i`` uses stream ``i`` of ``config.seed``.
    """
    if config.horizon is None and config.events is None:
        raise ConfigError("simulate needs --horizon or --events", "horizon")
    params = config.process_params()
    paths = simulate_path_set(params, config.paths, config.seed, horizon=config.horizon, events=config.events)
    writer = ResultWriter(config.out, config)
    if config.format == "json":
        writer.write_json({
            "paths": [
                {
                    "path_id": path_id,
                    "horizon": path.horizon,
                    "times": [float(time) for time in path.times],
                    "populations": [int(n) for n in path.populations],
                }
                for path_id, path in enumerate(paths)
            ]
        })
    else:
        writer.paths(paths)
    return EXIT_OK


def cmd_moments(config: RunConfig) -> int:
    """
    Moment table over ``--t-grid``; with ``--s`` also the covariance grid for
    every grid time ``t >= s`` (written to ``<out>.covariance.csv``).
    """
    _require(config, "t_grid")
    params = config.process_params()
    grid = parse_t_grid(config.t_grid)
    points = moment_table(params, grid)
    rows = [covariance_row(params, config.s, time) for time in grid if time >= config.s] if config.s is not None else []
    writer = ResultWriter(config.out, config)
    if config.format == "json":
        writer.write_json({"moments": [point.to_dict() for point in points], "covariances": rows})
        return EXIT_OK
    writer.moments(points)
    if config.s is not None:
        writer.covariances(rows, config.out + ".covariance.csv" if config.out else None)
    return EXIT_OK


def cmd_estimate(config: RunConfig) -> int:
    """
    Estimate ``(lam, nu)`` from ``--input`` counts, or from ``--J`` marginals
    simulated at the configured parameters. Exits 2 unless the solve converged.
    """
    _require(config, "mu", "M", "N")
    if config.input is not None:
        _require(config, "T")
        values = read_sample_file(config.input)
        T = config.T
    else:
        params = config.process_params()
        T = config.T if config.T is not None else default_observation_time(params)
        values = sample_fbp_marginals(params, T, config.J, RngStream(config.seed, 0), config.method)
    summary = sample_moments(values, T, config.N)
    tolerance = config.tolerance if config.tolerance is not None else SOLVE_TOLERANCE
    result = solve_moment_equations(summary, (config.mu, config.M, config.N), (config.lambda_min, config.lambda_max), tolerance)
    ResultWriter(config.out, config).write_json({**result.to_dict(), "summary": summary.to_dict()})
    if not result.converged:
        _LOG.error(f"estimate did not converge, residual {result.residual_norm:.3e}")
        return EXIT_COMPUTATION
    return EXIT_OK


def cmd_study(config: RunConfig) -> int:
    """
    Monte Carlo study: JSON report to ``--out`` and the per-replicate log to
    ``<out>.replicates.csv``.
    """
    params = config.process_params()
    T = config.T if config.T is not None else default_observation_time(params)
    runner = StudyRunner(config.threads)

    @runner.listen(ReplicateFinishedEvent)
    async def progress(event: ReplicateFinishedEvent) -> None:
        _LOG.info(f"replicate {event.record.replicate} done ({event.completed}/{event.total})")

    tolerance = config.tolerance if config.tolerance is not None else STUDY_TOLERANCE
    try:
        report = run_mc_study(
            params,
            config.J,
            config.K,
            T,
            config.seed,
            method=config.method,
            tolerance=tolerance,
            bounds=(config.lambda_min, config.lambda_max),
            runner=runner,
        )
    finally:
        runner.close()
    writer = ResultWriter(config.out, config)
    writer.write_json(report.to_dict())
    if config.out:
        writer.replicates(report.replicates, config.out + ".replicates.csv")
    return EXIT_OK


def _read_points(path: str) -> t.List[t.Tuple[float, float]]:
    points = []
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise SampleFileError(f"cannot read points file: {exc.strerror}", path) from exc
    for number, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or (number == 1 and text[0].isalpha()):
            continue
        try:
            time, value = (float(part) for part in text.split(","))
        except ValueError:
            raise SampleFileError(f"expected 't,value', got {text!r}", path, number) from None
        points.append((time, value))
    return points


def cmd_lrd_diagnostic(config: RunConfig) -> int:
    """
    Fit the decay exponent of the FBP correlation (``--mode fbp``) or of the
    increment correlation (``--mode fbn``) and classify it as LRD or SRD.
    ``--input`` fits a ``t,value`` points file instead.
    """
    if config.input is not None:
        points = _read_points(config.input)
        if len(points) < 3:
            raise ConfigError("need at least three points", "input")
        fit = fit_decay_exponent(points)
        ResultWriter(config.out, config).write_json({**fit.to_dict(), "mode": "points"})
        return EXIT_OK
    params = config.process_params()
    grid = parse_t_grid(config.t_grid or DEFAULT_LRD_GRID)
    if len(grid) < 3:
        raise ConfigError("grid too small: need at least three times", "t_grid")
    s = config.s if config.s is not None else 1.0
    fit = dependence_fit(params, s, grid, config.mode, config.delta)
    ResultWriter(config.out, config).write_json(
        {**fit.to_dict(), "mode": config.mode, "s": s, "delta": config.delta}
    )
    return EXIT_OK


HANDLERS: t.Dict[str, t.Callable[[RunConfig], int]] = {
    "simulate": cmd_simulate,
    "moments": cmd_moments,
    "estimate": cmd_estimate,
    "study": cmd_study,
    "lrd": cmd_lrd_diagnostic,
}
assert set(HANDLERS) == set(COMMANDS)


def main(argv: t.Optional[t.Sequence[str]] = None) -> int:
    try:
        args = vars(build_parser().parse_args(argv))
    except ConfigError as exc:
        sys.stderr.write(f"fracbinom: {exc.message}\n")
        return EXIT_VALIDATION
    command = args.pop("command")
    config_path = args.pop("config")
    verbose = args.pop("verbose")
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = resolve_config(command, args, config_path)
        return HANDLERS[command](config)
    except (ParameterError, ConfigError) as exc:
        _LOG.error(exc.message)
        return EXIT_VALIDATION
    except SampleFileError as exc:
        _LOG.error(str(exc))
        return EXIT_IO
    except OSError as exc:
        _LOG.error(f"{exc.filename or ''}: {exc.strerror}")
        return EXIT_IO
    except FracbinomError as exc:
        _LOG.error(exc.message)
        return EXIT_COMPUTATION
