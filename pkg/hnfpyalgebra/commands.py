"""
Command dispatch of the hnf command line tool: configuration, operand loading, verb handlers and report rendering.
"""
import argparse
import json
import logging
import logging.config
import os
import sys

import yaml

from hnfpyalgebra import errors, ioutils
from hnfpyalgebra.dsl import format_fn, format_scalar, parse_fn
from hnfpyalgebra.intervals import XInterval, to_extreal
from hnfpyalgebra.metric import (DEFAULT_BRIDGE_FLOOR_EXPONENT, DEFAULT_SCHEDULER, OrderBallReport, cauchy_limit,
                                 density_approx, finite_envelopes, h_inf2, h_sup2, interpose, order_ball_check, rho,
                                 sandwich_holds)
from hnfpyalgebra.piecewise import (PiecewiseFn, format_region, pw_canon, pw_equal, pw_eval, pw_extend_dense, pw_leq,
                                    pw_restrict_components, pw_sets)
from hnfpyalgebra.rationals import DEFAULT_TOLERANCE, Enclosure, RationalFunc, Verdict
from hnfpyalgebra.ring import (as_quotient, classify, dense_witness, h_add, h_inv, h_mul, h_neg, h_scale, h_sub,
                               rep_homomorphism)

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ["text", "json", "csv", "svg", "netcdf", "zarr"]
DEFAULT_SAMPLES = 200

# verb -> (minimum operand count, maximum operand count or None)
VERBS = {
    "eval": (2, None),
    "add": (2, 2),
    "mul": (2, 2),
    "neg": (1, 1),
    "sub": (2, 2),
    "scale": (2, 2),
    "inv": (1, 1),
    "rho": (2, 2),
    "leq": (2, 2),
    "sup": (2, 2),
    "inf": (2, 2),
    "classify": (1, 1),
    "sets": (1, 1),
    "canon": (1, 1),
    "equal": (2, 2),
    "restrict": (3, None),
    "extend": (1, 1),
    "quotient": (1, 1),
    "witness": (2, 2),
    "rephom": (2, None),
    "envelopes": (1, None),
    "limit": (1, None),
    "interpose": (2, 2),
    "approx": (2, 2),
    "plot": (1, 2),
}


class HnfConfig:
    """
    Configuration parameters controlling the hnf command line tool
    """

    def __init__(self, logging_config: str = None, tolerance=DEFAULT_TOLERANCE, output_format: str = "text",
                 samples: int = DEFAULT_SAMPLES, decimal: int = None, scheduler: str = DEFAULT_SCHEDULER,
                 bridge_floor_exponent: int = DEFAULT_BRIDGE_FLOOR_EXPONENT):
        """
        Creates a new HnfConfig instance

        Parameters
        ----------
        logging_config: str
            Path to a logging configuration file
        tolerance:
            Width of supremum and rho enclosures
        output_format: str
            Format of the report (Supported: 'text', 'json', 'csv', 'svg', 'netcdf', 'zarr')
        samples: int
            Number of sampling points for plots and sample grid exports
        decimal: int
            Number of fractional digits for printing scalars. Scalars print exactly as p/q if None.
        scheduler: str
            Dask scheduler used for the per-segment supremum computations
        bridge_floor_exponent: int
            Smallest bridge half-width is the breakpoint neighbourhood divided by 2 to this power
        """
        self.__logging_config = logging_config
        self.__tolerance = tolerance
        self.__output_format = output_format
        self.__samples = samples
        self.__decimal = decimal
        self.__scheduler = scheduler
        self.__bridge_floor_exponent = bridge_floor_exponent

    @property
    def logging_config(self) -> str:
        return self.__logging_config

    @property
    def tolerance(self):
        return self.__tolerance

    @property
    def output_format(self) -> str:
        return self.__output_format

    @property
    def samples(self) -> int:
        return self.__samples

    @property
    def decimal(self) -> int:
        return self.__decimal

    @property
    def scheduler(self) -> str:
        return self.__scheduler

    @property
    def bridge_floor_exponent(self) -> int:
        return self.__bridge_floor_exponent


def _positive_int(key: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise errors.ConfigError(f"Config parameter '{key}' must be an integer >= {minimum}, got {value!r}")
    return value


def config_from_dict(config: dict) -> HnfConfig:
    """
    Builds an HnfConfig from a dict with camelCase keys. Missing keys fall back to the defaults.
    """
    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise errors.ConfigError(f"Config must be a mapping, got {type(config).__name__}")
    unknown = set(config) - {"loggingConfig", "tolerance", "outputFormat", "samples", "decimal", "scheduler",
                             "bridgeFloorExponent"}
    if unknown:
        raise errors.ConfigError(f"Unknown config parameters: {sorted(unknown)}")
    try:
        tolerance = to_extreal(str(config.get("tolerance", DEFAULT_TOLERANCE)))
    except (ValueError, TypeError) as ex:
        raise errors.ConfigError(f"Invalid tolerance: {ex}")
    if not 0 < tolerance < 1:
        raise errors.ConfigError(f"Tolerance must lie in (0, 1), got {tolerance}")
    output_format = config.get("outputFormat", "text")
    if output_format not in OUTPUT_FORMATS:
        raise errors.ConfigError(f"Unsupported output format '{output_format}'. Supported: {OUTPUT_FORMATS}")
    decimal = config.get("decimal")
    if decimal is not None:
        decimal = _positive_int("decimal", decimal, 0)
    scheduler = config.get("scheduler", DEFAULT_SCHEDULER)
    if scheduler not in ("synchronous", "threads", "processes"):
        raise errors.ConfigError(f"Unsupported scheduler '{scheduler}'. Supported: 'synchronous', 'threads', "
                                 f"'processes'.")
    return HnfConfig(logging_config=config.get("loggingConfig"),
                     tolerance=tolerance,
                     output_format=output_format,
                     samples=_positive_int("samples", config.get("samples", DEFAULT_SAMPLES), 2),
                     decimal=decimal,
                     scheduler=scheduler,
                     bridge_floor_exponent=_positive_int("bridgeFloorExponent",
                                                         config.get("bridgeFloorExponent",
                                                                    DEFAULT_BRIDGE_FLOOR_EXPONENT), 1))


def _load_config_dict(path: str) -> dict:
    try:
        with open(path, "r") as stream:
            return yaml.safe_load(stream)
    except yaml.YAMLError as ex:
        raise errors.ConfigError(f"Error reading config file {path}: {ex}")
    except OSError as ex:
        raise errors.ConfigError(f"Cannot open config file {path}: {ex}")


def read_hnf_config(path: str) -> HnfConfig:
    """
    Reads configuration parameters from a *.yml file for the hnf command line tool.

    Parameters
    ----------
    path: str
        Path to the configuration file

    Returns
    -------
    HnfConfig
        Object containing config parameters controlling the command line tool

    """
    return config_from_dict(_load_config_dict(path))


def setup_logging(logging_config_path: str = None):
    """
    Configures logging from a YAML logging config. Without one, warnings and errors of the package are written to
    stderr.
    """
    if logging_config_path is None:
        package_logger = logging.getLogger("hnfpyalgebra")
        if not package_logger.handlers:
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(logging.Formatter("%(levelname)s - %(name)s - %(message)s"))
            package_logger.addHandler(handler)
            package_logger.setLevel(logging.WARNING)
        return
    with open(logging_config_path, "r") as stream:
        try:
            log_config = yaml.safe_load(stream)
            logging.config.dictConfig(log_config)
        except (yaml.YAMLError, ValueError, TypeError) as ex:
            raise errors.ConfigError(f"Invalid logging config {logging_config_path}: {ex}")


class Command:
    """
    A single invocation of the command line tool: a verb, its operands and the effective configuration
    """

    def __init__(self, verb: str, operands: list, config: HnfConfig, output: str = None, eps=None,
                 moduli: list = None, strict: bool = False):
        if verb not in VERBS:
            raise errors.UsageError(f"Unknown verb '{verb}'. Supported: {sorted(VERBS)}")
        minimum, maximum = VERBS[verb]
        if len(operands) < minimum or (maximum is not None and len(operands) > maximum):
            expected = f"{minimum}" if minimum == maximum else f"at least {minimum}" if maximum is None \
                else f"{minimum} to {maximum}"
            raise errors.UsageError(f"Verb '{verb}' expects {expected} operands, got {len(operands)}")
        self.__verb = verb
        self.__operands = list(operands)
        self.__config = config
        self.__output = output
        self.__eps = eps
        self.__moduli = moduli
        self.__strict = strict

    @property
    def verb(self) -> str:
        return self.__verb

    @property
    def operands(self) -> list:
        return self.__operands

    @property
    def config(self) -> HnfConfig:
        return self.__config

    @property
    def output(self) -> str:
        return self.__output

    @property
    def eps(self):
        return self.__eps

    @property
    def moduli(self) -> list:
        return self.__moduli

    @property
    def strict(self) -> bool:
        return self.__strict


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hnf", description="Exact algebra of nearly finite Hausdorff continuous "
                                                             "interval functions.")
    parser.add_argument("verb", type=str, choices=list(VERBS), help="Operation to run")
    parser.add_argument("operands", type=str, nargs="*", help="Function files or inline literals, and scalars")
    parser.add_argument("--config", type=str, help="Path to a config file")
    parser.add_argument("--tol", type=str, help="Tolerance of supremum enclosures, e.g. 1/1000000 or 1e-9")
    parser.add_argument("--format", type=str, choices=OUTPUT_FORMATS, help="Report or plot format")
    parser.add_argument("--samples", type=int, help="Number of sampling points for plots")
    parser.add_argument("--decimal", type=int, help="Print scalars with this many fractional digits")
    parser.add_argument("--output", type=str, help="Output file for svg, netcdf and zarr formats")
    parser.add_argument("--eps", type=str, help="Radius of the order ball (rho) or width threshold (sets)")
    parser.add_argument("--moduli", type=str, help="Comma separated convergence moduli (limit)")
    parser.add_argument("--strict", action="store_true", help="Strict comparison (leq)")
    return parser


def _scalar_arg(text: str, what: str):
    try:
        return to_extreal(text)
    except (ValueError, TypeError) as ex:
        raise errors.UsageError(f"Invalid {what} '{text}': {ex}") from ex


def _int_arg(text: str, what: str, minimum: int) -> int:
    try:
        value = int(text)
    except ValueError as ex:
        raise errors.UsageError(f"Invalid {what} '{text}': expected an integer") from ex
    if value < minimum:
        raise errors.UsageError(f"{what} must be at least {minimum}, got {value}")
    return value


def parse_command(argv: list) -> Command:
    """
    Parses command line arguments into a Command. CLI flags override the values of the config file.
    """
    args = build_parser().parse_args(argv)
    config = {} if args.config is None else (_load_config_dict(args.config) or {})
    if not isinstance(config, dict):
        raise errors.ConfigError(f"Config must be a mapping, got {type(config).__name__}")
    overrides = {"tolerance": args.tol, "outputFormat": args.format, "samples": args.samples,
                 "decimal": args.decimal}
    config.update({k: v for k, v in overrides.items() if v is not None})
    eps = None if args.eps is None else _scalar_arg(args.eps, "--eps")
    moduli = None if args.moduli is None else [_scalar_arg(m, "modulus") for m in args.moduli.split(",")]
    return Command(args.verb, args.operands, config_from_dict(config), output=args.output, eps=eps, moduli=moduli,
                   strict=args.strict)


def load_fn(operand: str, complete: bool = True) -> PiecewiseFn:
    return parse_fn(ioutils.read_operand(operand), complete=complete)


def _expand(operands: list) -> list:
    paths = []
    for operand in operands:
        if os.path.isdir(operand):
            paths.extend(ioutils.discover_function_files(operand))
        else:
            paths.append(operand)
    return paths


def _pairs(operands: list, what: str) -> list:
    if len(operands) % 2:
        raise errors.UsageError(f"{what} must be given in pairs, got {len(operands)} operands")
    return [(operands[k], operands[k + 1]) for k in range(0, len(operands), 2)]


def _eval(cmd: Command) -> list:
    f = load_fn(cmd.operands[0])
    results = []
    for operand in cmd.operands[1:]:
        x = _scalar_arg(operand, "point")
        results.append((f"f({format_scalar(x, cmd.config.decimal)})", pw_eval(f, x)))
    return results


def _binary(op):
    def handler(cmd: Command) -> list:
        return [("result", op(load_fn(cmd.operands[0]), load_fn(cmd.operands[1])))]
    return handler


def _unary(op):
    def handler(cmd: Command) -> list:
        return [("result", op(load_fn(cmd.operands[0])))]
    return handler


def _scale(cmd: Command) -> list:
    return [("result", h_scale(_scalar_arg(cmd.operands[0], "scalar"), load_fn(cmd.operands[1])))]


def _rho(cmd: Command) -> list:
    f, g = load_fn(cmd.operands[0]), load_fn(cmd.operands[1])
    results = [("rho", rho(f, g, cmd.config.tolerance, cmd.config.scheduler))]
    if cmd.eps is not None:
        report = order_ball_check(f, g, cmd.eps, cmd.config.tolerance, cmd.config.scheduler)
        results.append(("order_ball", report))
    return results


def _leq(cmd: Command) -> list:
    return [("result", pw_leq(load_fn(cmd.operands[0]), load_fn(cmd.operands[1]), strict=cmd.strict))]


def _classify(cmd: Command) -> list:
    return list(classify(load_fn(cmd.operands[0])).as_dict().items())


def _sets(cmd: Command) -> list:
    sets = pw_sets(load_fn(cmd.operands[0]))
    results = [("w_points", sets.w_points), ("w_segments", sets.w_segments), ("gamma", sets.gamma),
               ("zero_points", sets.zero_points), ("zero_intervals", sets.zero_intervals),
               ("zero_set_has_interior", sets.zero_set_has_interior)]
    if cmd.eps is not None:
        if not cmd.eps > 0:
            raise errors.UsageError(f"--eps must be positive, got {cmd.eps}")
        points, segments = sets.w_eps(cmd.eps)
        results.extend([("w_eps_points", points), ("w_eps_segments", segments)])
    return results


def _restrict(cmd: Command) -> list:
    f = load_fn(cmd.operands[0])
    bounds = _pairs(cmd.operands[1:], "Restriction bounds")
    components = [(_scalar_arg(lo, "bound"), _scalar_arg(hi, "bound")) for lo, hi in bounds]
    parts = pw_restrict_components(f, components)
    if len(parts) == 1:
        return [("result", parts[0])]
    return [(f"component_{k}", part) for k, part in enumerate(parts)]


def _extend(cmd: Command) -> list:
    return [("result", pw_canon(pw_extend_dense(load_fn(cmd.operands[0], complete=False))))]


def _quotient(cmd: Command) -> list:
    phi, psi = as_quotient(load_fn(cmd.operands[0]))
    return [("phi", phi), ("psi", psi)]


def _rephom(cmd: Command) -> list:
    pairs = _pairs(cmd.operands, "Generators and images")
    ps = [load_fn(p) for p, _ in pairs]
    qs = [load_fn(q) for _, q in pairs]
    return [("result", rep_homomorphism(ps, qs))]


def _sequence(cmd: Command) -> list:
    fs = [load_fn(op) for op in _expand(cmd.operands)]
    if not fs:
        raise errors.UsageError(f"Verb '{cmd.verb}' found no function files in {cmd.operands}")
    return fs


def _envelopes(cmd: Command) -> list:
    phis, psis = finite_envelopes(_sequence(cmd))
    results = [(f"phi_{k}", phi) for k, phi in enumerate(phis)]
    results.extend((f"psi_{k}", psi) for k, psi in enumerate(psis))
    return results


def _limit(cmd: Command) -> list:
    if cmd.moduli is None:
        raise errors.UsageError("Verb 'limit' requires --moduli")
    fs = _sequence(cmd)
    if len(cmd.moduli) < len(fs) - 1:
        raise errors.UsageError(f"--moduli needs at least {len(fs) - 1} values for {len(fs)} functions")
    if any(m < n for m, n in zip(cmd.moduli, cmd.moduli[1:])):
        raise errors.UsageError("--moduli must be decreasing")
    limit, bound = cauchy_limit(fs, cmd.moduli, cmd.config.tolerance, cmd.config.scheduler)
    return [("result", limit), ("bound", bound)]


def _interpose(cmd: Command) -> list:
    u, l = load_fn(cmd.operands[0]), load_fn(cmd.operands[1])
    return [("result", interpose(u, l, cmd.config.bridge_floor_exponent))]


def _approx(cmd: Command) -> list:
    f = load_fn(cmd.operands[0])
    n = _int_arg(cmd.operands[1], "n", 1)
    fn = density_approx(f, n, cmd.config.bridge_floor_exponent)
    return [("result", fn), ("sandwich", sandwich_holds(f, fn, n))]


def _plot(cmd: Command) -> list:
    return [("result", load_fn(op)) for op in cmd.operands]


HANDLERS = {
    "eval": _eval,
    "add": _binary(h_add),
    "mul": _binary(h_mul),
    "neg": _unary(h_neg),
    "sub": _binary(h_sub),
    "scale": _scale,
    "inv": _unary(h_inv),
    "rho": _rho,
    "leq": _leq,
    "sup": _binary(h_sup2),
    "inf": _binary(h_inf2),
    "classify": _classify,
    "sets": _sets,
    "canon": _unary(pw_canon),
    "equal": _binary(pw_equal),
    "restrict": _restrict,
    "extend": _extend,
    "quotient": _quotient,
    "witness": _binary(dense_witness),
    "rephom": _rephom,
    "envelopes": _envelopes,
    "limit": _limit,
    "interpose": _interpose,
    "approx": _approx,
    "plot": _plot,
}


def _scalar_text(value, decimal: int) -> str:
    return format_scalar(value, decimal)


def _region_text(region, decimal: int) -> str:
    if isinstance(region, tuple):
        return f"({_region_text(region[0], decimal)},{_region_text(region[1], decimal)})"
    if hasattr(region, "is_exact"):
        return format_region(region)
    return _scalar_text(region, decimal)


def _interval_text(value: XInterval, decimal: int) -> str:
    if value.is_point:
        return _scalar_text(value.lo, decimal)
    return f"[{_scalar_text(value.lo, decimal)}, {_scalar_text(value.hi, decimal)}]"


def _text(value, decimal: int) -> str:
    if isinstance(value, PiecewiseFn):
        return format_fn(value)
    if isinstance(value, Enclosure):
        return f"[{_scalar_text(value.lo, decimal)}, {_scalar_text(value.hi, decimal)}]"
    if isinstance(value, XInterval):
        return _interval_text(value, decimal)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Verdict):
        return value.value
    if isinstance(value, list):
        return "{" + ", ".join(_region_text(r, decimal) for r in value) + "}"
    return str(value)


def render_text(results: list, decimal: int = None) -> str:
    lines = []
    for key, value in results:
        if isinstance(value, OrderBallReport):
            lines.append(f"eps: {_scalar_text(value.eps, decimal)}")
            lines.append(f"rho below eps: {value.rho_verdict.value}")
            lines.append(f"difference bounded: {value.bound_verdict.value}")
            lines.append(f"sandwich: {value.sandwich_verdict.value}")
        elif isinstance(value, Enclosure):
            lines.append(f"{key} in {_text(value, decimal)}")
        elif key == "result":
            lines.append(_text(value, decimal))
        else:
            lines.append(f"{key}: {_text(value, decimal)}")
    return "\n".join(lines) + "\n"


def _json(value, decimal: int):
    if isinstance(value, PiecewiseFn):
        return {
            "domain": [_scalar_text(e, None) for e in value.domain],
            "breakpoints": [_scalar_text(p, None) for p in value.breakpoints],
            "values": [None if v is None else [_scalar_text(v.lo, None), _scalar_text(v.hi, None)]
                       for v in value.values],
            "segments": [{"lo": str(lo), "hi": str(hi)} for lo, hi in value.segments],
            "text": format_fn(value),
        }
    if isinstance(value, Enclosure):
        return {"lo": _scalar_text(value.lo, decimal), "hi": _scalar_text(value.hi, decimal),
                "tol": _scalar_text(value.tolerance, decimal)}
    if isinstance(value, OrderBallReport):
        return {"eps": _scalar_text(value.eps, decimal), "rho_below_eps": value.rho_verdict.value,
                "difference_bounded": value.bound_verdict.value, "sandwich": value.sandwich_verdict.value,
                "agree": value.agree}
    if isinstance(value, XInterval):
        return {"lo": _scalar_text(value.lo, decimal), "hi": _scalar_text(value.hi, decimal)}
    if isinstance(value, bool):
        return value
    if isinstance(value, Verdict):
        return value.value
    if isinstance(value, list):
        return [_region_text(r, decimal) for r in value]
    if isinstance(value, RationalFunc):
        return str(value)
    return value


def render_json(verb: str, results: list, decimal: int = None) -> str:
    document = {"verb": verb, "results": {key: _json(value, decimal) for key, value in results}}
    return json.dumps(document, indent=2) + "\n"


def _emit(cmd: Command, results: list, outformat: str, stream):
    functions = [value for key, value in results if isinstance(value, PiecewiseFn)]
    if not functions:
        logger.warning(f"Output format '{outformat}' needs a function result. Report will be printed as text.")
        stream.write(render_text(results, cmd.config.decimal))
        return
    if outformat != "csv" and cmd.output is None:
        raise errors.UsageError(f"Output format '{outformat}' requires --output")
    if cmd.verb == "plot" and len(functions) == 2:
        if outformat != "svg":
            raise errors.UsageError("Comparison plots are only supported with --format svg")
        ioutils.compare_plot(functions[0], functions[1], cmd.output, cmd.config.samples)
        return
    if len(functions) > 1:
        logger.warning(f"Only the first of {len(functions)} function results is written as {outformat}")
    ioutils.emit_plot(functions[0], cmd.output, cmd.config.samples, outformat, stream=stream)


def execute(cmd: Command, stream):
    logger.info(f"Running '{cmd.verb}' on {len(cmd.operands)} operands")
    results = HANDLERS[cmd.verb](cmd)
    outformat = cmd.config.output_format
    if cmd.verb == "plot" and outformat in ("text", "json"):
        outformat = "csv"
    if outformat == "text":
        stream.write(render_text(results, cmd.config.decimal))
    elif outformat == "json":
        stream.write(render_json(cmd.verb, results, cmd.config.decimal))
    else:
        _emit(cmd, results, outformat, stream)
    logger.info(f"Finished '{cmd.verb}'")


def run_command(argv: list, stream=None, err_stream=None) -> int:
    """
    Runs the command line tool.

    Parameters
    ----------
    argv: list of str
        Arguments without the program name
    stream:
        Report stream, stdout by default
    err_stream:
        Error stream, stderr by default

    Returns
    -------
    int
        Exit status: 0 on success, 1 for errors of the algebra core, 2 for usage, parse and config errors

    """
    stream = stream or sys.stdout
    err_stream = err_stream or sys.stderr
    try:
        cmd = parse_command(argv)
        setup_logging(cmd.config.logging_config)
        execute(cmd, stream)
        return 0
    except SystemExit as ex:
        return ex.code if isinstance(ex.code, int) else 2
    except errors.HnfError as ex:
        err_stream.write(f"error: {type(ex).__name__}: {ex}\n")
        return 1
    except (errors.UsageError, OSError) as ex:
        err_stream.write(f"error: {type(ex).__name__}: {ex}\n")
        return 2
