"""Command-line front end: parameter queries, simulation runs, sweeps.

Subcommands: pullin, classify, simulate, period, sweep, generic. Flags may be
seeded from a flat key=value file via --config, with explicit flags taking
precedence; the PULLIN_DYN_PRECISION environment variable overrides the
default output precision. Exit codes: 0 success, 2 invalid input, 3 convexity
violation, 4 integrator or quadrature failure, 5 regime mismatch.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

from . import __version__
from .analysis import (
    REGIME_CRITICAL,
    REGIME_PERIODIC,
    REGIME_TOUCHDOWN,
    classify_regime,
    pullin,
)
from .dynamics import (
    SCHEME_ADAPTIVE,
    SCHEME_SYMPLECTIC,
    GenericForcedModel,
    IntegratorConfig,
    Trajectory,
    energy_series,
    integrate,
    integrate_generic,
)
from .errors import (
    ConvexityError,
    IntegratorFailureError,
    InvalidParameterError,
    NotApplicableError,
    PullInDynError,
    QuadratureFailureError,
    RegimeMismatchError,
)
from .model import ModelParams, PhysicalParams, check_convexity, normalize_physical
from .quadrature import contact_time_by_quadrature, period_by_quadrature

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CONVEXITY = 3
EXIT_INTEGRATOR = 4
EXIT_REGIME = 5

DEFAULT_PRECISION = 12
_PRECISION_ENV = "PULLIN_DYN_PRECISION"

_PHYS_KEYS = ("mass", "spring_k", "spring_k3", "area", "gap", "voltage", "d0", "eps_r", "eps0")
_NORM_KEYS = ("xi", "v", "kappa", "mu")
_CFG_KEYS = (
    "scheme",
    "dt",
    "rel_tol",
    "abs_tol",
    "t_max",
    "contact_epsilon",
    "event_refine_tol",
)
_SWEEP_COLUMNS = ("x_s", "t_p", "t_c", "regime", "v_dpi", "x_dpi")


def fmt_float(x: float, precision: int) -> str:
    return format(x, f".{precision}g")


def _round_floats(obj, precision: int):
    if isinstance(obj, float):
        return float(fmt_float(obj, precision))
    if isinstance(obj, dict):
        return {k: _round_floats(v, precision) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, precision) for v in obj]
    return obj


def _emit_json(obj: dict, precision: int) -> None:
    print(json.dumps(_round_floats(obj, precision), sort_keys=True))


def _config_hash(params: dict) -> str:
    canon = "\n".join(f"{k}={params[k]}" for k in sorted(params))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


@dataclass
class RunRecord:
    """Reproducibility record emitted alongside file outputs."""

    command: str
    params: dict
    version: str
    config_hash: str
    wall_time_s: float
    outputs: dict

    def to_json(self, precision: int = DEFAULT_PRECISION) -> str:
        return json.dumps(_round_floats(asdict(self), precision), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))


def _read_config(path: str) -> dict:
    values: dict[str, str] = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameterError(f"config line without '=': {raw.strip()!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _coerce(key: str, val: str):
    if key in ("scheme", "format", "outputs", "method", "output"):
        return val
    if key.endswith("_range"):
        return val.split(",")
    if key in ("v_steps", "jobs", "precision"):
        return int(val)
    return float(val)


def _effective(args: argparse.Namespace, keys: tuple[str, ...]) -> dict:
    """Merge config file values and explicit flags; explicit flags win."""
    eff: dict = {}
    config = getattr(args, "_config_values", {})
    for key in keys:
        if key in config:
            eff[key] = _coerce(key, config[key])
    explicit = {k: v for k, v in vars(args).items() if not k.startswith("_")}
    for key in keys:
        if key in explicit:
            eff[key] = explicit[key]
    return eff


def _resolve_precision(args: argparse.Namespace) -> int:
    eff = _effective(args, ("precision",))
    if "precision" in eff:
        return int(eff["precision"])
    env = os.environ.get(_PRECISION_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise InvalidParameterError(f"bad {_PRECISION_ENV}: {env!r}") from exc
    return DEFAULT_PRECISION


def _resolve_model(args: argparse.Namespace) -> ModelParams:
    eff = _effective(args, _PHYS_KEYS + _NORM_KEYS)
    phys = {k: eff[k] for k in _PHYS_KEYS if k in eff}
    norm = {k: eff[k] for k in _NORM_KEYS if k in eff}
    if phys and norm:
        raise InvalidParameterError(
            "physical-unit flags are mutually exclusive with normalized flags"
        )
    if phys:
        missing = [k for k in ("mass", "spring_k", "area", "gap") if k not in phys]
        if missing:
            raise InvalidParameterError(f"missing physical flags: {', '.join(missing)}")
        p = PhysicalParams(
            m=phys["mass"],
            k=phys["spring_k"],
            area=phys["area"],
            gap=phys["gap"],
            voltage=phys.get("voltage", 0.0),
            k3=phys.get("spring_k3", 0.0),
            d0=phys.get("d0", 0.0),
            eps_r=phys.get("eps_r", 1.0),
            **({"eps0": phys["eps0"]} if "eps0" in phys else {}),
        )
        return normalize_physical(p)
    return ModelParams(
        xi=norm.get("xi", 0.0),
        v=norm.get("v", 0.0),
        kappa=norm.get("kappa", 0.0),
        mu=norm.get("mu", 0.0),
    )


def _resolve_cfg(args: argparse.Namespace, scheme_default: str = SCHEME_SYMPLECTIC) -> IntegratorConfig:
    eff = _effective(args, _CFG_KEYS)
    defaults = IntegratorConfig(scheme=scheme_default)
    return IntegratorConfig(
        scheme=eff.get("scheme", scheme_default),
        dt=eff.get("dt", defaults.dt),
        rel_tol=eff.get("rel_tol", defaults.rel_tol),
        abs_tol=eff.get("abs_tol", defaults.abs_tol),
        t_max=eff.get("t_max", defaults.t_max),
        contact_epsilon=eff.get("contact_epsilon", defaults.contact_epsilon),
        event_refine_tol=eff.get("event_refine_tol", defaults.event_refine_tol),
    )


def _add_model_args(p: argparse.ArgumentParser) -> None:
    for key in _NORM_KEYS:
        p.add_argument(f"--{key}", type=float, default=argparse.SUPPRESS)
    for key in _PHYS_KEYS:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float, default=argparse.SUPPRESS)


def _add_cfg_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=[SCHEME_SYMPLECTIC, SCHEME_ADAPTIVE], default=argparse.SUPPRESS)
    for key in _CFG_KEYS[1:]:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float, default=argparse.SUPPRESS)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=argparse.SUPPRESS)
    p.add_argument("--precision", type=int, default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pullin-dyn",
        description="Pull-in analysis and dynamics of an undamped electrostatic actuator",
    )
    parser.add_argument("--version", action="version", version=f"pullin-dyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pullin", help="pull-in voltage and position")
    _add_model_args(p)
    _add_common(p)

    p = sub.add_parser("classify", help="classify the response regime")
    _add_model_args(p)
    _add_common(p)
    p.add_argument("--eps-v", dest="eps_v", type=float, default=argparse.SUPPRESS)

    p = sub.add_parser("simulate", help="integrate a trajectory and write CSV")
    _add_model_args(p)
    _add_cfg_args(p)
    _add_common(p)
    p.add_argument("--output", required=True)

    p = sub.add_parser("period", help="stagnation time and period")
    _add_model_args(p)
    _add_cfg_args(p)
    _add_common(p)
    p.add_argument("--method", choices=["quad", "ode", "both"], default=argparse.SUPPRESS)

    p = sub.add_parser("sweep", help="parameter sweep table")
    _add_common(p)
    p.add_argument("--xi", type=float, default=argparse.SUPPRESS)
    p.add_argument("--xi-range", dest="xi_range", nargs=3, metavar=("MIN", "MAX", "STEPS"), default=argparse.SUPPRESS)
    p.add_argument("--kappa", type=float, default=argparse.SUPPRESS)
    p.add_argument(
        "--kappa-range", dest="kappa_range", nargs=3, metavar=("MIN", "MAX", "STEPS"), default=argparse.SUPPRESS
    )
    p.add_argument("--v-min", dest="v_min", type=float, default=argparse.SUPPRESS)
    p.add_argument("--v-max", dest="v_max", type=float, default=argparse.SUPPRESS)
    p.add_argument("--v-steps", dest="v_steps", type=int, default=argparse.SUPPRESS)
    p.add_argument("--outputs", default=argparse.SUPPRESS, help="comma list of columns")
    p.add_argument("--format", choices=["csv", "json"], default=argparse.SUPPRESS)
    p.add_argument("--output", required=True)
    p.add_argument("--jobs", type=int, default=argparse.SUPPRESS)

    p = sub.add_parser("generic", help="generic damped touch-down check (f=x, g=1/(2(a-x)^2))")
    _add_cfg_args(p)
    _add_common(p)
    p.add_argument("--mu", type=float, default=argparse.SUPPRESS)
    p.add_argument("--lam", type=float, default=argparse.SUPPRESS)
    p.add_argument("--a", type=float, default=argparse.SUPPRESS)
    p.add_argument("--c1", type=float, default=argparse.SUPPRESS)
    p.add_argument("--c2", type=float, default=argparse.SUPPRESS)

    return parser


def cmd_pullin(args: argparse.Namespace) -> int:
    precision = _resolve_precision(args)
    m = _resolve_model(args)
    res = pullin(m.xi, m.kappa)
    conv = check_convexity(ModelParams(xi=m.xi, kappa=m.kappa))
    _emit_json(
        {
            "v_dpi": res.v_dpi,
            "x_dpi": res.x_dpi,
            "xi": res.xi,
            "kappa": res.kappa,
            "convexity_ok": conv.ok,
        },
        precision,
    )
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    precision = _resolve_precision(args)
    m = _resolve_model(args)
    eps = _effective(args, ("eps_v",)).get("eps_v", 1e-12)
    cls = classify_regime(m, eps_v=eps)
    out = {
        "regime": cls.regime,
        "v": cls.v_applied,
        "xi": m.xi,
        "kappa": m.kappa,
        "v_dpi": cls.threshold.v_dpi,
        "x_dpi": cls.threshold.x_dpi,
    }
    if cls.regime == REGIME_PERIODIC:
        out["x_s"] = cls.x_s
    elif cls.regime == REGIME_CRITICAL:
        out["x_limit"] = cls.x_limit
    else:
        out["a_sq"] = cls.a_sq
        out["tc_bound"] = cls.tc_bound
    _emit_json(out, precision)
    return EXIT_OK


def _write_trajectory_csv(
    path: str, traj: Trajectory, m: ModelParams, cfg: IntegratorConfig, precision: int
) -> None:
    with_h = m.mu == 0.0
    energies = energy_series(traj, m) if with_h else None
    with open(path, "w", newline="") as fh:
        fh.write(f"# pullin-dyn simulate version={__version__}\n")
        fh.write(f"# params xi={m.xi!r} v={m.v!r} kappa={m.kappa!r} mu={m.mu!r}\n")
        fh.write(
            f"# config scheme={cfg.scheme} dt={cfg.dt!r} t_max={cfg.t_max!r} "
            f"contact_epsilon={cfg.contact_epsilon!r}\n"
        )
        writer = csv.writer(fh, lineterminator="\n")
        header = ["t", "x", "v"] + (["H"] if with_h else [])
        writer.writerow(header)
        for i in range(len(traj)):
            row = [
                fmt_float(float(traj.t[i]), precision),
                fmt_float(float(traj.x[i]), precision),
                fmt_float(float(traj.v[i]), precision),
            ]
            if with_h:
                row.append(fmt_float(float(energies[i]), precision))
            writer.writerow(row)
        for ev in traj.events:
            fh.write(
                f"# event,{ev.kind},{fmt_float(ev.t, precision)},{fmt_float(ev.x, precision)}\n"
            )


def cmd_simulate(args: argparse.Namespace) -> int:
    precision = _resolve_precision(args)
    m = _resolve_model(args)
    cfg = _resolve_cfg(args)
    started = time.perf_counter()
    traj = integrate(m, cfg)
    wall = time.perf_counter() - started
    _write_trajectory_csv(args.output, traj, m, cfg, precision)
    params = {"xi": m.xi, "v": m.v, "kappa": m.kappa, "mu": m.mu, **asdict(cfg)}
    record = RunRecord(
        command="simulate",
        params=params,
        version=__version__,
        config_hash=_config_hash(params),
        wall_time_s=wall,
        outputs={
            "samples": len(traj),
            "terminated_by": traj.terminated_by,
            "energy_drift": traj.energy_drift,
            "events": [[e.kind, e.t, e.x] for e in traj.events],
            "path": args.output,
        },
    )
    print(record.to_json(precision))
    return EXIT_OK


def cmd_period(args: argparse.Namespace) -> int:
    precision = _resolve_precision(args)
    m = _resolve_model(args)
    method = _effective(args, ("method",)).get("method", "quad")
    cls = classify_regime(m)
    if cls.regime != REGIME_PERIODIC:
        raise RegimeMismatchError(
            f"regime is '{cls.regime}'; period requires a subcritical voltage "
            "(see the classify subcommand)"
        )
    scales = period_by_quadrature(m)
    quad_result = {"t_s": scales.t_s, "t_p": scales.t_p}
    ode_result = None
    if method in ("ode", "both"):
        cfg = _resolve_cfg(args, scheme_default=SCHEME_ADAPTIVE)
        if "t_max" not in _effective(args, ("t_max",)):
            cfg = replace(cfg, t_max=2.5 * scales.ts_bound)
        traj = integrate(m, cfg)
        stag = traj.first_event("stagnation")
        if stag is None:
            raise IntegratorFailureError("no stagnation event detected within the horizon")
        ret = traj.first_event("return")
        ode_result = {"t_s": stag.t, "t_p": ret.t if ret is not None else 2.0 * stag.t}
    if method == "both":
        out = {
            "method": method,
            "quad": quad_result,
            "ode": ode_result,
            "discrepancy": abs(quad_result["t_p"] - ode_result["t_p"]) / quad_result["t_p"],
        }
    else:
        out = {"method": method, **(ode_result if method == "ode" else quad_result)}
    _emit_json(out, precision)
    return EXIT_OK


def _axis(eff: dict, name: str) -> list[float]:
    rng = eff.get(f"{name}_range")
    if rng is not None:
        lo, hi, steps = float(rng[0]), float(rng[1]), int(rng[2])
        if steps < 2 or not hi > lo:
            raise InvalidParameterError(f"bad {name} range")
        return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]
    return [float(eff.get(name, 0.0))]


def _sweep_row(task: tuple[float, float, float, tuple[str, ...]]) -> dict:
    xi, kappa, v, wanted = task
    row: dict = {"xi": xi, "kappa": kappa, "v": v, "error": None}
    for col in _SWEEP_COLUMNS:
        row[col] = None
    try:
        m = ModelParams(xi=xi, v=v, kappa=kappa)
        cls = classify_regime(m)
        row["regime"] = cls.regime
        row["v_dpi"] = cls.threshold.v_dpi
        row["x_dpi"] = cls.threshold.x_dpi
        if cls.regime == REGIME_PERIODIC:
            row["x_s"] = cls.x_s
            if "t_p" in wanted:
                row["t_p"] = period_by_quadrature(m).t_p
        elif cls.regime == REGIME_TOUCHDOWN and "t_c" in wanted:
            row["t_c"] = contact_time_by_quadrature(m)
    except PullInDynError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def cmd_sweep(args: argparse.Namespace) -> int:
    precision = _resolve_precision(args)
    eff = _effective(
        args,
        (
            "xi",
            "xi_range",
            "kappa",
            "kappa_range",
            "v_min",
            "v_max",
            "v_steps",
            "outputs",
            "format",
            "jobs",
        ),
    )
    if "v_min" not in eff or "v_max" not in eff or "v_steps" not in eff:
        raise InvalidParameterError("sweep requires --v-min, --v-max and --v-steps")
    v_min, v_max, v_steps = float(eff["v_min"]), float(eff["v_max"]), int(eff["v_steps"])
    if not (v_min < v_max and v_steps >= 2):
        raise InvalidParameterError("sweep requires v_min < v_max and v_steps >= 2")
    xis = _axis(eff, "xi")
    kappas = _axis(eff, "kappa")
    vs = [v_min + (v_max - v_min) * i / (v_steps - 1) for i in range(v_steps)]
    wanted = tuple(
        col.strip() for col in str(eff.get("outputs", ",".join(_SWEEP_COLUMNS))).split(",")
    )
    unknown = [c for c in wanted if c not in _SWEEP_COLUMNS]
    if unknown:
        raise InvalidParameterError(f"unknown sweep columns: {', '.join(unknown)}")
    fmt = eff.get("format", "csv")
    jobs = int(eff.get("jobs", 1))
    if jobs < 1:
        raise InvalidParameterError("jobs must be >= 1")

    tasks = [(xi, kappa, v, wanted) for xi in xis for kappa in kappas for v in vs]
    started = time.perf_counter()
    if jobs == 1:
        rows = [_sweep_row(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    wall = time.perf_counter() - started

    spec = {
        "xi": xis if len(xis) > 1 else xis[0],
        "kappa": kappas if len(kappas) > 1 else kappas[0],
        "v_min": v_min,
        "v_max": v_max,
        "v_steps": v_steps,
        "outputs": list(wanted),
        "format": fmt,
        "precision": precision,
    }
    columns = ["xi", "kappa", "v", *wanted, "error"]
    if fmt == "json":
        payload = {
            "spec": spec,
            "columns": columns,
            "rows": [{k: row[k] for k in columns} for row in rows],
        }
        with open(args.output, "w") as fh:
            json.dump(_round_floats(payload, precision), fh, sort_keys=True)
            fh.write("\n")
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(f"# pullin-dyn sweep version={__version__}\n")
            fh.write(f"# spec {json.dumps(_round_floats(spec, precision), sort_keys=True)}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                out_row = []
                for col in columns:
                    val = row[col]
                    if val is None:
                        out_row.append("")
                    elif isinstance(val, float):
                        out_row.append(fmt_float(val, precision))
                    else:
                        out_row.append(str(val))
                writer.writerow(out_row)

    params = {**spec, "output": args.output}
    record = RunRecord(
        command="sweep",
        params=params,
        version=__version__,
        config_hash=_config_hash({k: str(v) for k, v in params.items()}),
        wall_time_s=wall,
        outputs={"rows": len(rows), "path": args.output},
    )
    print(record.to_json(precision))
    return EXIT_OK


def cmd_generic(args: argparse.Namespace) -> int:
    precision = _resolve_precision(args)
    eff = _effective(args, ("mu", "lam", "a", "c1", "c2"))
    a = float(eff.get("a", 1.0))
    gm = GenericForcedModel(
        mu=float(eff.get("mu", 0.0)),
        lam=float(eff.get("lam", 1.0)),
        f_fn=lambda x, t: x,
        forcing_g=lambda x, t: 1.0 / (2.0 * (a - x) ** 2),
        a=a,
        c1=float(eff.get("c1", a)),
        c2=float(eff.get("c2", 1.0 / (2.0 * a * a))),
    )
    cfg = _resolve_cfg(args)
    traj, check = integrate_generic(gm, cfg)
    _emit_json(
        {
            "guaranteed": check.guaranteed,
            "margin": check.margin,
            "t_c": check.t_c,
            "tc_bound": check.tc_bound,
            "monotone": check.monotone,
            "lower_bound_ok": check.lower_bound_ok,
            "terminated_by": traj.terminated_by,
        },
        precision,
    )
    return EXIT_OK


_DISPATCH = {
    "pullin": cmd_pullin,
    "classify": cmd_classify,
    "simulate": cmd_simulate,
    "period": cmd_period,
    "sweep": cmd_sweep,
    "generic": cmd_generic,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config_path = getattr(args, "config", None)
        args._config_values = _read_config(config_path) if config_path else {}
        return _DISPATCH[args.command](args)
    except ConvexityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVEXITY
    except RegimeMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (InvalidParameterError, NotApplicableError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (IntegratorFailureError, QuadratureFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATOR


if __name__ == "__main__":
    sys.exit(main())
