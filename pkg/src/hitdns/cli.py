"""Command-line driver.

Subcommands:

    init      synthesize a turbulent initial condition and write a solution file
    run       march a solution forward in time, writing a solution + step log
    spectrum  shell-binned kinetic energy spectrum of a solution file
    bench     layout/traversal microbenchmark table
    scale     strong-scaling table over decomposed rank counts

Configuration is `key = value` lines (# comments allowed); any key can be
overridden on the command line with `--set key=value`. Every output is
accompanied by a `<output>.config` sidecar echoing the fully resolved
configuration, so a run can be reproduced from its artifacts.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 file I/O
or format error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields as dc_fields, replace

from .errors import (
    ConfigError,
    HaloProtocolError,
    InvalidStateError,
    SolutionFormatError,
    StepError,
)
from .grid import FieldSet, GridSpec, Layout, read_solution, write_solution
from .physics import GasModel
from .timeint import TimeParams, advance, conserved_totals, write_step_log
from .weno import WenoParams
from . import bench as bench_mod
from . import decomp as decomp_mod
from . import hit as hit_mod

LAYOUT_NAMES = {"interleaved": Layout.INTERLEAVED, "contiguous": Layout.COMPONENT_CONTIGUOUS}


@dataclass(frozen=True)
class RunConfig:
    """Every tunable the CLI understands, with defaults."""

    n: int = 64
    layout: str = "contiguous"
    ghost: int = 3
    gamma: float = 1.4
    prandtl: float = 0.72
    mu: float | None = None  # derived from re_lambda when unset
    u0: float = 0.3
    k0: float = 4.0
    re_lambda: float = 50.0
    rho0: float = 1.0
    seed: int = 2024
    epsilon: float = 1e-6
    power: int = 2
    delta: float = 0.0
    scheme: str = "rk3"
    dt: float | None = None
    cfl: float | None = None
    cfl_mode: str = "max"
    t_final: float | None = None
    max_steps: int | None = None
    workers: int = 1


_INT_KEYS = {"n", "ghost", "seed", "power", "max_steps", "workers"}
_FLOAT_KEYS = {
    "gamma", "prandtl", "mu", "u0", "k0", "re_lambda", "rho0",
    "epsilon", "delta", "dt", "cfl", "t_final",
}
_STR_KEYS = {"layout", "scheme", "cfl_mode"}
_OPTIONAL_KEYS = {"mu", "dt", "cfl", "t_final", "max_steps"}


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key in _OPTIONAL_KEYS and raw.lower() in ("", "none"):
        return None
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw


def parse_config_text(text: str) -> dict[str, str]:
    """Parse `key = value` lines; # starts a comment, blank lines ignored."""
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, value = body.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


def load_config(path: str | None, overrides) -> RunConfig:
    mapping: dict[str, str] = {}
    if path is not None:
        try:
            with open(path) as fh:
                mapping.update(parse_config_text(fh.read()))
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, value = item.split("=", 1)
        mapping[key.strip()] = value.strip()

    known = {f.name for f in dc_fields(RunConfig)}
    values = {}
    for key, raw in mapping.items():
        if key not in known:
            raise ConfigError(f"unknown configuration key {key!r}")
        values[key] = _convert(key, raw)
    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.layout not in LAYOUT_NAMES:
        raise ConfigError(f"layout must be one of {sorted(LAYOUT_NAMES)}, got {cfg.layout!r}")
    if cfg.scheme not in ("rk3", "rk4"):
        raise ConfigError(f"scheme must be rk3 or rk4, got {cfg.scheme!r}")
    if cfg.cfl_mode not in ("max", "sum"):
        raise ConfigError(f"cfl_mode must be max or sum, got {cfg.cfl_mode!r}")
    if cfg.dt is not None and cfg.cfl is not None:
        raise ConfigError("set dt or cfl, not both")
    if cfg.n < 4:
        raise ConfigError(f"n must be at least 4, got {cfg.n}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be positive, got {cfg.workers}")


def hit_params(cfg: RunConfig) -> "hit_mod.HitParams":
    try:
        return hit_mod.HitParams(
            u0=cfg.u0, k0=cfg.k0, re_lambda=cfg.re_lambda, rho0=cfg.rho0, seed=cfg.seed
        )
    except (ConfigError, ValueError) as err:
        raise ConfigError(str(err)) from err


def resolved_mu(cfg: RunConfig) -> float:
    if cfg.mu is not None:
        return cfg.mu
    return hit_mod.viscosity_from_re_lambda(hit_params(cfg))


def gas_model(cfg: RunConfig) -> GasModel:
    try:
        return GasModel(gamma=cfg.gamma, prandtl=cfg.prandtl, mu=resolved_mu(cfg))
    except ValueError as err:
        raise ConfigError(str(err)) from err


def weno_params(cfg: RunConfig) -> WenoParams:
    try:
        return WenoParams(epsilon=cfg.epsilon, power=cfg.power)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def grid_spec(cfg: RunConfig) -> GridSpec:
    try:
        return GridSpec(n=(cfg.n, cfg.n, cfg.n), ghost_width=cfg.ghost)
    except ValueError as err:
        raise ConfigError(str(err)) from err


def time_params(cfg: RunConfig) -> TimeParams:
    """Fill in the step-size and stop-condition defaults, then validate."""
    dt, cfl = cfg.dt, cfg.cfl
    if dt is None and cfl is None:
        cfl = 0.4
    t_final, max_steps = cfg.t_final, cfg.max_steps
    if t_final is None and max_steps is None:
        t_final = 3.0 * hit_mod.eddy_turnover_time(hit_params(cfg))
    try:
        return TimeParams(
            scheme=cfg.scheme, dt=dt, cfl=cfl, cfl_mode=cfg.cfl_mode,
            t_final=t_final, max_steps=max_steps,
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err


def config_echo(cfg: RunConfig) -> str:
    """Reparseable dump of the resolved configuration, derived values included."""
    lines = []
    for f in dc_fields(RunConfig):
        value = getattr(cfg, f.name)
        if f.name == "mu" and value is None:
            value = resolved_mu(cfg)
        lines.append(f"{f.name} = {'none' if value is None else value}")
    return "\n".join(lines) + "\n"


def _write_sidecar(out_path: str, cfg: RunConfig) -> None:
    with open(str(out_path) + ".config", "w") as fh:
        fh.write(config_echo(cfg))


# ---- subcommands ----------------------------------------------------------------


def cmd_init(args) -> int:
    cfg = load_config(args.config, args.set)
    spec = grid_spec(cfg)
    params = hit_params(cfg)
    gas = gas_model(cfg)
    fields = hit_mod.make_initial_condition(spec, params, gas.gamma)
    mass, _, energy = conserved_totals(fields)
    if cfg.layout == "interleaved":
        from .grid import convert_layout

        fields = convert_layout(fields, Layout.INTERLEAVED)
    write_solution(args.out, fields, 0.0)
    _write_sidecar(args.out, cfg)
    lam = hit_mod.taylor_microscale(params.u0, params.k0)
    tau = hit_mod.eddy_turnover_time(params)
    print(
        f"wrote {args.out}: n={cfg.n} seed={cfg.seed} mass={mass:.6e} "
        f"energy={energy:.6e} taylor_microscale={lam:.6f} mu={gas.mu:.8f} "
        f"eddy_turnover={tau:.6f}"
    )
    return 0


def _load_or_make_initial(args, cfg: RunConfig):
    if getattr(args, "infile", None):
        fields, t0 = read_solution(args.infile)
        if fields.layout != Layout.COMPONENT_CONTIGUOUS:
            from .grid import convert_layout

            fields = convert_layout(fields, Layout.COMPONENT_CONTIGUOUS)
        return fields, t0
    spec = grid_spec(cfg)
    fields = hit_mod.make_initial_condition(
        spec, hit_params(cfg), cfg.gamma, Layout.COMPONENT_CONTIGUOUS
    )
    return fields, 0.0


def cmd_run(args) -> int:
    cfg = load_config(args.config, args.set)
    gas = gas_model(cfg)
    tparams = time_params(cfg)
    fields, t0 = _load_or_make_initial(args, cfg)
    result = advance(
        fields, gas, tparams, weno_params(cfg), cfg.delta,
        workers=cfg.workers, t0=t0,
    )
    out_fields = result.fields
    if cfg.layout == "interleaved":
        from .grid import convert_layout

        out_fields = convert_layout(out_fields, Layout.INTERLEAVED)
    write_solution(args.out, out_fields, result.t)
    _write_sidecar(args.out, cfg)
    log_path = args.log if args.log else str(args.out) + ".log"
    write_step_log(log_path, result.records)
    mass, _, energy = conserved_totals(result.fields)
    print(
        f"wrote {args.out}: steps={result.steps} t={result.t:.6f} "
        f"mass={mass:.12e} energy={energy:.12e} log={log_path}"
    )
    return 0


def cmd_spectrum(args) -> int:
    fields, t = read_solution(args.infile)
    interior = fields.interior()
    rho = interior[0]
    if not (rho > 0.0).all():
        raise InvalidStateError("solution has nonpositive density")
    u = interior[1] / rho
    v = interior[2] / rho
    w = interior[3] / rho
    table = hit_mod.compute_spectrum(u, v, w)
    out = args.out if args.out else str(args.infile) + ".spectrum.txt"
    hit_mod.write_spectrum(out, table)
    print(f"wrote {out}: n={table.grid_n} t={t:.6f} total_ke={table.total():.8e}")
    return 0


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"bad {what} list: {text!r}") from None


def cmd_bench(args) -> int:
    cfg = load_config(args.config, args.set)
    sizes: list = _parse_int_list(args.sizes, "sizes")
    traversals = tuple(tok.strip() for tok in args.traversals.split(",") if tok.strip())
    for trav in traversals:
        if trav not in bench_mod.TRAVERSALS:
            raise ConfigError(f"unknown traversal {trav!r}")
    records = bench_mod.layout_sweep(
        sizes, repeats=args.repeats, traversals=traversals
    )
    if args.ragged:
        nx = sizes[-1] + 1 if sizes else 65
        ragged = (nx, sizes[-1] if sizes else 64, sizes[-1] if sizes else 64)
        for layout in (Layout.INTERLEAVED, Layout.COMPONENT_CONTIGUOUS):
            for trav in ("lex", "tiled"):
                rec, _ = bench_mod.run_case(ragged, layout, trav, repeats=args.repeats)
                records.append(rec)
    sys.stdout.write(bench_mod.bench_report(records))
    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", RuntimeWarning)
        notes = bench_mod.soft_ordering_checks(records)
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    del cfg
    return 0


def cmd_scale(args) -> int:
    cfg = load_config(args.config, args.set)
    if cfg.max_steps is None:
        cfg = replace(cfg, max_steps=args.steps)
    if cfg.t_final is None and cfg.dt is None and cfg.cfl is None:
        cfg = replace(cfg, cfl=0.4)
    ranks = _parse_int_list(args.ranks, "ranks")
    if not ranks:
        raise ConfigError("need at least one rank count")
    spec = grid_spec(cfg)
    fields = hit_mod.make_initial_condition(
        spec, hit_params(cfg), cfg.gamma, Layout.COMPONENT_CONTIGUOUS
    )
    gas = gas_model(cfg)
    tparams = time_params(cfg)
    rows = decomp_mod.strong_scaling(
        fields, gas, tparams, ranks, weno_params(cfg), cfg.delta
    )
    sys.stdout.write(decomp_mod.scaling_report(rows))
    return 0


# ---- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hitdns",
        description="Compressible isotropic-turbulence mini-solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", nargs="?", default=None, help="key=value config file")
        p.add_argument(
            "--set", action="append", default=[], metavar="KEY=VALUE",
            help="override one configuration key",
        )

    p = sub.add_parser("init", help="write a synthesized initial condition")
    common(p)
    p.add_argument("--out", default="hit_init.bin", help="solution file to write")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("run", help="advance a solution in time")
    common(p)
    p.add_argument("--in", dest="infile", default=None, help="initial solution file")
    p.add_argument("--out", default="hit_final.bin", help="solution file to write")
    p.add_argument("--log", default=None, help="step log path (default OUT.log)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("spectrum", help="energy spectrum of a solution file")
    p.add_argument("--in", dest="infile", required=True, help="solution file to read")
    p.add_argument("--out", default=None, help="spectrum text file to write")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bench", help="layout/traversal microbenchmark")
    common(p)
    p.add_argument("--sizes", default="16,32,48,64", help="comma-separated cube sizes")
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--traversals", default="lex", help="comma-separated: lex,tiled")
    p.add_argument(
        "--ragged", action="store_true",
        help="add a non-tile-multiple size with both traversals",
    )
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("scale", help="strong-scaling table over rank counts")
    common(p)
    p.add_argument("--ranks", default="1,2,4,8", help="comma-separated rank counts")
    p.add_argument("--steps", type=int, default=5, help="steps per rank count")
    p.set_defaults(func=cmd_scale)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except SolutionFormatError as err:
        print(f"file format error: {err}", file=sys.stderr)
        return 4
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return 4
    except (InvalidStateError, StepError, HaloProtocolError) as err:
        print(f"solver error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
