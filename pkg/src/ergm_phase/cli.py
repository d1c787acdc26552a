"""ergm-phase: command-line access to phase-diagram and simulation computations.

Every run writes its data (CSV or JSON) to --output or stdout, and a replay
line with the fully normalized flag set to stderr. Exit codes: 0 success,
2 parameter error, 3 out-of-region, 4 numeric error, 5 I/O error.
"""

from __future__ import annotations

import argparse
import math
import os
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import ErgmPhaseError, ParameterError
from .free_energy import H2, psi_report
from .graphsim import ModelSpec, exact_enumeration, jump_experiment, run_chain
from .maximizer import local_maximizers
from .output import emit, to_json
from .phase import trace_curves, v_bounds
from .scalar import ModelParams, critical_point

PROG = "ergm-phase"
SEED_ENV = "ERGM_PHASE_SEED"
WORKERS_ENV = "ERGM_PHASE_WORKERS"

CURVE_COLUMNS = ["beta1", "lower", "q", "upper", "u_low", "u_high", "psi"]
SWEEP_COLUMNS = [
    "beta1", "beta2", "region", "psi", "u_star", "du_beta1", "du_beta2",
    "d2_b1b1", "d2_b1b2", "d2_b2b2", "on_curve", "validity",
]
SAMPLE_COLUMNS = ["step", "t_edge", "t_h2"]
JUMP_COLUMNS = [
    "offset", "beta1", "beta2", "beta1_transition", "init", "mean_edge", "se_edge",
    "u1", "u2", "predicted", "ok",
]


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ParameterError(f"{name}={raw!r} is not an integer") from None


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return value


def _offsets(text: str) -> list[float]:
    return [_finite(part) for part in text.split(",") if part.strip()]


def _add_output(sp, default_format: str) -> None:
    sp.add_argument("--format", choices=["csv", "json"], default=default_format)
    sp.add_argument("--output", default="-", help="output path, '-' for stdout (default: -)")


def _add_model(sp, need_beta1=True, need_beta2=True, h2=False) -> None:
    sp.add_argument("--p", type=int, required=True, help="edge count of H2")
    if need_beta1:
        sp.add_argument("--beta1", type=_finite, required=True)
    if need_beta2:
        sp.add_argument("--beta2", type=_finite, required=True)
    if h2:
        sp.add_argument("--h2", choices=[h.value for h in H2], default=H2.STAR.value)


def _add_chain(sp, default_seed: int, steps: int, burn_in: int, thin: int) -> None:
    sp.add_argument("--n", type=int, required=True, help="vertex count")
    sp.add_argument("--steps", type=int, default=steps, help="single-pair updates")
    sp.add_argument("--burn-in", type=int, default=burn_in)
    sp.add_argument("--thin", type=int, default=thin)
    sp.add_argument("--seed", type=int, default=default_seed)


def build_parser(default_seed: int = 0, default_workers: int = 1) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=PROG, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("critical", help="critical point (beta1_c, beta2_c)")
    sp.add_argument("--p", type=int, required=True)
    _add_output(sp, "json")

    sp = sub.add_parser("maximize", help="local and global maximizers of l")
    _add_model(sp)
    sp.add_argument("--tie-tol", type=_finite, default=1e-10)
    _add_output(sp, "json")

    sp = sub.add_parser("bounds", help="V-region boundary values at one beta1")
    _add_model(sp, need_beta2=False)
    _add_output(sp, "json")

    sp = sub.add_parser("curve", help="V-region bounds and transition curve on a beta1 grid")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--beta1-min", type=_finite, required=True)
    sp.add_argument("--beta1-max", type=_finite, required=True)
    sp.add_argument("--steps", type=int, default=50)
    sp.add_argument("--workers", type=int, default=default_workers)
    _add_output(sp, "csv")

    sp = sub.add_parser("psi", help="limiting free energy and its derivatives")
    _add_model(sp, h2=True)
    _add_output(sp, "json")

    sp = sub.add_parser("sweep", help="free-energy report along a line in parameter space")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--axis", choices=["beta1", "beta2"], required=True, help="parameter varied")
    sp.add_argument("--fixed", type=_finite, required=True, help="value of the other parameter")
    sp.add_argument("--min", type=_finite, required=True)
    sp.add_argument("--max", type=_finite, required=True)
    sp.add_argument("--steps", type=int, default=50)
    sp.add_argument("--h2", choices=[h.value for h in H2], default=H2.STAR.value)
    sp.add_argument("--workers", type=int, default=default_workers)
    _add_output(sp, "csv")

    sp = sub.add_parser("simulate", help="Glauber-dynamics chain; dumps samples")
    _add_model(sp, h2=True)
    _add_chain(sp, default_seed, 1_000_000, 100_000, 100)
    sp.add_argument("--init", default="empty", help="empty, complete or density:<u> (default: empty)")
    sp.add_argument("--summary", default=None, help="also write the chain summary as JSON here")
    _add_output(sp, "csv")

    sp = sub.add_parser("enumerate", help="exact psi_n and expectations by enumeration (n <= 6)")
    _add_model(sp, h2=True)
    sp.add_argument("--n", type=int, required=True)
    _add_output(sp, "json")

    sp = sub.add_parser("jump", help="edge-density jump across the transition at fixed beta2")
    _add_model(sp, need_beta1=False, h2=True)
    _add_chain(sp, default_seed, 2_000_000, 500_000, 1_000)
    sp.add_argument("--offsets", type=_offsets, default=[-0.3, 0.3], help="comma-separated beta1 offsets")
    _add_output(sp, "csv")

    return parser


def replay_line(args: argparse.Namespace, parser: argparse.ArgumentParser) -> str:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    parts = [PROG, args.command]
    for action in sub.choices[args.command]._actions:
        if not action.option_strings or action.dest == "help":
            continue
        value = getattr(args, action.dest)
        if value is None:
            continue
        if isinstance(value, list):
            value = ",".join(repr(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        parts.append(f"{action.option_strings[0]}={shlex.quote(str(value))}")
    return " ".join(parts)


def _spec(args) -> ModelSpec:
    return ModelSpec(ModelParams(args.p, args.beta1, args.beta2), H2(args.h2))


def _workers(n: int) -> int:
    if n < 1:
        raise ParameterError("workers must be at least 1")
    return n


def _cmd_critical(args):
    cp = critical_point(args.p)
    return {"beta1_c": cp.beta1_c, "beta2_c": cp.beta2_c}, ["beta1_c", "beta2_c"], None


def _cmd_maximize(args):
    params = ModelParams(args.p, args.beta1, args.beta2)
    if args.tie_tol < 0:
        raise ParameterError("tie-tol must be non-negative")
    rep = local_maximizers(params, args.tie_tol)
    locs = [
        {"u": loc.u, "l_value": loc.l_value, "l_curvature": loc.l_curvature, "is_global": loc.u in rep.globals}
        for loc in rep.locals
    ]
    obj = {
        "p": params.p,
        "beta1": params.beta1,
        "beta2": params.beta2,
        "region": rep.region,
        "locals": locs,
        "globals": list(rep.globals),
    }
    rows = [dict(loc, region=rep.region) for loc in locs]
    return obj, ["u", "l_value", "l_curvature", "is_global", "region"], rows


def _cmd_bounds(args):
    vb = v_bounds(args.beta1, args.p)
    obj = {"beta1": vb.beta1, "a": vb.a, "b": vb.b, "lower": vb.lower, "upper": vb.upper}
    return obj, list(obj), None


def _curve_rows(args):
    rows = []
    for vb, cp in trace_curves(args.p, args.beta1_min, args.beta1_max, args.steps, _workers(args.workers)):
        rows.append(
            {"beta1": vb.beta1, "lower": vb.lower, "q": cp.q, "upper": vb.upper,
             "u_low": cp.u_low, "u_high": cp.u_high, "psi": cp.psi}
        )
    return rows


def _psi_row(params: ModelParams, h2: H2) -> dict:
    rep = psi_report(params, h2)
    return {
        "beta1": params.beta1,
        "beta2": params.beta2,
        "region": rep.region,
        "psi": rep.psi,
        "u_star": list(rep.u_star),
        "du_beta1": rep.du_beta1,
        "du_beta2": rep.du_beta2,
        "d2_b1b1": rep.d2_b1b1,
        "d2_b1b2": rep.d2_b1b2,
        "d2_b2b2": rep.d2_b2b2,
        "on_curve": rep.on_curve,
        "validity": rep.validity,
    }


def _cmd_psi(args):
    row = _psi_row(ModelParams(args.p, args.beta1, args.beta2), H2(args.h2))
    return dict(row, p=args.p), SWEEP_COLUMNS, [row]


def _cmd_sweep(args):
    if args.steps < 2:
        raise ParameterError("steps must be at least 2")
    if not args.min < args.max:
        raise ParameterError("--min must be below --max")
    h2 = H2(args.h2)
    grid = [float(x) for x in np.linspace(args.min, args.max, args.steps)]
    if args.axis == "beta1":
        points = [ModelParams(args.p, x, args.fixed) for x in grid]
    else:
        points = [ModelParams(args.p, args.fixed, x) for x in grid]
    workers = _workers(args.workers)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda prm: _psi_row(prm, h2), points))
    else:
        rows = [_psi_row(prm, h2) for prm in points]
    return None, SWEEP_COLUMNS, rows


def _cmd_simulate(args):
    stats = run_chain(_spec(args), args.n, args.steps, args.burn_in, args.thin, args.seed, args.init)
    summary = stats.summary()
    print("summary: " + to_json(summary).strip(), file=sys.stderr)
    if args.summary:
        _write(args.summary, to_json(summary).encode())
    return None, SAMPLE_COLUMNS, stats.rows()


def _cmd_enumerate(args):
    spec = _spec(args)
    res = exact_enumeration(spec, args.n)
    obj = {
        "h2": spec.h2, "p": args.p, "beta1": args.beta1, "beta2": args.beta2, "n": args.n,
        "psi_n": res.psi_n, "e_t_edge": res.e_t_edge, "e_t_h2": res.e_t_h2,
    }
    return obj, list(obj), None


def _cmd_jump(args):
    spec = ModelSpec(ModelParams(args.p, 0.0, args.beta2), H2(args.h2))
    b1_star, rows = jump_experiment(
        spec, args.n, args.beta2, args.offsets, args.seed, args.steps, args.burn_in, args.thin
    )
    out = [dict(r._asdict(), beta1_transition=b1_star) for r in rows]
    return None, JUMP_COLUMNS, out


COMMANDS = {
    "critical": _cmd_critical,
    "maximize": _cmd_maximize,
    "bounds": _cmd_bounds,
    "curve": lambda args: (None, CURVE_COLUMNS, _curve_rows(args)),
    "psi": _cmd_psi,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "enumerate": _cmd_enumerate,
    "jump": _cmd_jump,
}


def render(obj, columns, rows, fmt: str) -> bytes:
    """Single-result commands give a JSON object; tables give a JSON array. CSV is always a table."""
    if fmt == "json" and obj is not None:
        return to_json(obj).encode()
    if rows is None:
        rows = [{c: obj[c] for c in columns}]
    return emit(rows, fmt, columns)


def _write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def dispatch(args: argparse.Namespace) -> bytes:
    obj, columns, rows = COMMANDS[args.command](args)
    return render(obj, columns, rows, args.format)


def main(argv=None) -> int:
    try:
        parser = build_parser(_env_int(SEED_ENV, 0), _env_int(WORKERS_ENV, 1))
    except ParameterError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    print("replay: " + replay_line(args, parser), file=sys.stderr)
    try:
        _write(args.output, dispatch(args))
    except ErgmPhaseError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"{PROG}: error: cannot write output: {exc}", file=sys.stderr)
        return 5
    return 0


if __name__ == "__main__":
    sys.exit(main())
