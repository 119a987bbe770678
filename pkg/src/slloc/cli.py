"""Command-line front end.

Every table is a CSV whose first row names the columns; run metadata (tool
version, problem, grid, timestamp) lives in a ``.meta.json`` sidecar so CSV
bodies stay byte-identical between runs. Numerical failures exit with 2,
any other error (unwritable output included) with 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .config import load_problem
from .errors import NumericalError, SllocError, ValidationError
from .landscape import (
    check_window,
    first_mode_error,
    iterated_landscape_sequence,
    projection_of_one,
    prop1_bound,
    prop2_bound,
    prop2_residual,
)
from .liouville import DEFAULT_GRID, transform
from .localization import (
    REGIMES,
    BoundCoefficients,
    a_coefficient,
    alpha,
    alpha_phi_closed_form,
    assumption_threshold,
    b_coefficient,
    beta_gamma,
    bound_report,
    theorem1_envelope,
    theorem2_envelope,
)
from .problem import PRESETS, preset
from .spectral import eigenpairs_direct

OUT_ENV = "SLLOC_OUT"
LARGE_GRID = 8193
PROP1_PRESETS = ("fig1-tanh-metric", "setup2", "setup3")
PROP2_TRUNCATION = 20
EXPERIMENTS = ("fig1", "fig2", "fig3", "prop1", "prop2")
DEFAULT_BATCH = (
    {"experiment": "fig1"},
    {"experiment": "fig2"},
    {"experiment": "fig3"},
    {"experiment": "prop1", "preset": "fig1-tanh-metric"},
    {"experiment": "prop1", "preset": "setup2"},
    {"experiment": "prop1", "preset": "setup3"},
    {"experiment": "prop2"},
)


class Outputs:
    """Files written by one experiment; removed together if it fails."""

    def __init__(self, directory, **meta):
        self.dir = Path(directory)
        self.meta = meta
        self.files: list[Path] = []

    def table(self, name: str, columns: dict, **meta) -> Path:
        """Write ``columns`` (name -> equal-length sequence) to ``name``.csv."""
        self.dir.mkdir(parents=True, exist_ok=True)
        path = self.dir / f"{name}.csv"
        arrays = [np.asarray(v) for v in columns.values()]
        fmt = ["%d" if a.dtype.kind in "iub" else "%.17g" for a in arrays]
        data = np.column_stack([a.astype(np.float64) if a.dtype.kind == "b" else a for a in arrays])
        self.files.append(path)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            np.savetxt(fh, data, fmt=fmt, delimiter=",", header=",".join(columns), comments="")
        sidecar = path.with_suffix(".meta.json")
        self.files.append(sidecar)
        info = {
            "version": __version__,
            **self.meta,
            **meta,
            "columns": list(columns),
            "rows": int(data.shape[0]),
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        sidecar.write_text(json.dumps(info, indent=2, default=_jsonable) + "\n", encoding="utf-8")
        return path

    def discard(self) -> None:
        for f in self.files:
            try:
                f.unlink()
            except FileNotFoundError:
                pass
        self.files.clear()


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


# ---------------------------------------------------------------- helpers


def _problem(args, fallback=None):
    if getattr(args, "config", None):
        return load_problem(args.config)
    name = getattr(args, "preset", None) or fallback
    if name is None:
        raise ValidationError("give --preset NAME or --config PATH")
    return preset(name, getattr(args, "length", None))


def _grid(args, prob) -> int:
    if getattr(args, "grid", None):
        n = args.grid
    else:
        n = LARGE_GRID if prob.L > 1.0 else DEFAULT_GRID
    if n < 65 or n % 2 == 0:
        raise ValidationError(f"--grid must be odd and >= 65, got {n}")
    return n


def _weight(prob, x):
    return None if prob.unit_weight else prob.w(x)


def _lambda_grid(args, lo, hi, steps):
    lo = args.lambda_min if args.lambda_min is not None else lo
    hi = args.lambda_max if args.lambda_max is not None else hi
    steps = args.lambda_steps if args.lambda_steps is not None else steps
    if not 0 < lo < hi or steps < 2:
        raise ValidationError("need 0 < lambda-min < lambda-max and lambda-steps >= 2")
    return np.linspace(lo, hi, steps)


def _parse_modes(text):
    try:
        modes = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ValidationError(f"--dump-modes expects comma-separated integers, got {text!r}") from None
    if any(m < 1 for m in modes):
        raise ValidationError("--dump-modes entries must be >= 1")
    return modes


def _envelope_columns(lams, B, beta, gamma, q_sup, q_l4, q_l1=0.0, regime=None):
    ref = np.array([alpha_phi_closed_form(lam, B) for lam in lams])
    lower = np.full(lams.size, np.nan)
    upper = np.full(lams.size, np.nan)
    ok = np.zeros(lams.size, dtype=bool)
    for i, lam in enumerate(lams):
        coeffs = BoundCoefficients(
            a=float(a_coefficient(B, lam, q_sup)),
            b=float(b_coefficient(B, lam, q_l4)),
            beta=beta,
            gamma=gamma,
            lam=float(lam),
            B=B,
        )
        lo, hi, applicable = theorem1_envelope(coeffs)
        if applicable:
            lower[i], upper[i], ok[i] = lo, hi, True
    cols = {
        "lambda": lams,
        "alpha_phi": ref,
        "lower": lower,
        "upper": upper,
        "applicable": ok,
        "asymptote": np.full(lams.size, 2.0 * B / 3.0),
    }
    if regime is not None:
        t2 = []
        for lam in lams:
            try:
                env = theorem2_envelope(regime, lam, B, beta, gamma, q_l1)
                t2.append((env.lower, env.upper))
            except ValidationError:
                t2.append((np.nan, np.nan))
        t2 = np.array(t2)
        cols["regime_lower"] = t2[:, 0]
        cols["regime_upper"] = t2[:, 1]
    return cols


# ------------------------------------------------------------ subcommands


def cmd_transform(args, out: Outputs):
    prob = _problem(args)
    n = _grid(args, prob)
    lf = transform(prob, n)
    sup, l4, l1 = lf.q_norms
    out.table(
        f"{prob.label}_transform",
        {"y": lf.y_grid.nodes, "x_of_y": lf.x_of_y.values, "f": lf.f.values, "Q": lf.Q.values},
        problem=prob.label,
        grid=n,
        B=lf.B,
        Q_sup=sup,
        Q_l4=l4,
        Q_l1=l1,
    )


def cmd_eigs(args, out: Outputs):
    prob = _problem(args)
    n = _grid(args, prob)
    dump = _parse_modes(args.dump_modes) if args.dump_modes else []
    count = max([args.modes, *dump])
    pairs = eigenpairs_direct(prob, count, n)
    shown = pairs[: args.modes]
    out.table(
        f"{prob.label}_eigs",
        {
            "n": np.array([p.index for p in shown]),
            "lambda": np.array([p.lam for p in shown]),
            "alpha": np.array([alpha(p.values) for p in shown]),
        },
        problem=prob.label,
        grid=n,
    )
    for k in dump:
        phi = pairs[k - 1].values
        out.table(
            f"{prob.label}_mode_{k}",
            {"x": phi.x, "phi": phi.values},
            problem=prob.label,
            grid=n,
            mode=k,
            eigenvalue=pairs[k - 1].lam,
        )


def cmd_alpha(args, out: Outputs):
    prob = _problem(args)
    n = _grid(args, prob)
    lf = transform(prob, n)
    pairs = eigenpairs_direct(prob, args.modes, n)
    reports = [bound_report(p, lf, args.regime) for p in pairs]
    cols = {
        "n": np.array([r.index for r in reports]),
        "lambda": np.array([r.lam for r in reports]),
        "alpha": np.array([r.alpha_measured for r in reports]),
        "alpha_phi": np.array([r.alpha_phi for r in reports]),
        "lower": np.array([np.nan if r.lower is None else r.lower for r in reports]),
        "upper": np.array([np.nan if r.upper is None else r.upper for r in reports]),
        "applicable": np.array([r.applicable for r in reports]),
    }
    if args.regime:
        cols["regime_lower"] = np.array([r.regime_bounds.lower if r.regime_bounds else np.nan for r in reports])
        cols["regime_upper"] = np.array([r.regime_bounds.upper if r.regime_bounds else np.nan for r in reports])
    beta, gamma = beta_gamma(prob)
    out.table(
        f"{prob.label}_alpha",
        cols,
        problem=prob.label,
        grid=n,
        B=lf.B,
        beta=beta,
        gamma=gamma,
        lambda_star=assumption_threshold(lf.B, lf.q_norms),
        regime=args.regime,
    )


def cmd_threshold(args, out: Outputs):
    if args.preset or args.config:
        prob = _problem(args)
        lf = transform(prob, _grid(args, prob))
        B, norms = lf.B, lf.q_norms
    else:
        B, norms = args.B, (args.q_sup, args.q_l4)
    print(f"lambda_star={assumption_threshold(B, norms):.10g}")


def cmd_envelope(args, out: Outputs):
    if args.preset or args.config:
        prob = _problem(args)
        n = _grid(args, prob)
        lf = transform(prob, n)
        beta, gamma = beta_gamma(prob)
        B, (sup, l4, l1) = lf.B, lf.q_norms
        label, meta = prob.label, {"problem": prob.label, "grid": n}
    else:
        B, beta, gamma, sup, l4, l1 = args.B, args.beta, args.gamma, args.q_sup, args.q_l4, args.q_l1
        label, meta = "envelope", {}
    lams = _lambda_grid(args, 0.5, 50.0, 500)
    cols = _envelope_columns(lams, B, beta, gamma, sup, l4, l1, args.regime)
    out.table(
        f"{label}_envelope",
        cols,
        **meta,
        B=B,
        beta=beta,
        gamma=gamma,
        Q_sup=sup,
        Q_l4=l4,
        lambda_star=assumption_threshold(B, (sup, l4)),
        regime=args.regime,
    )


def _landscape_tables(out: Outputs, prob, n: int, k_max: int):
    pairs = eigenpairs_direct(prob, 2, n)
    phi1 = pairs[0].values
    weight = _weight(prob, phi1.x)
    p1 = projection_of_one(pairs, 1, weight).norm
    iterates = iterated_landscape_sequence(prob, k_max, n)
    ks, xs, ells, phis, diffs = [], [], [], [], []
    errors, bounds = [], []
    for it in iterates:
        ell = it.values.values
        ph = phi1.values if np.dot(ell, phi1.values) >= 0 else -phi1.values
        ks.append(np.full(ell.size, it.k))
        xs.append(phi1.x)
        ells.append(ell)
        phis.append(ph)
        diffs.append(np.abs(ell - ph))
        errors.append(first_mode_error(it, pairs[0]))
        bounds.append(prop1_bound(pairs[0].lam, pairs[1].lam, prob.L, p1, it.k))
    meta = {"problem": prob.label, "grid": n, "lambda1": pairs[0].lam, "lambda2": pairs[1].lam}
    out.table(
        f"{prob.label}_landscape_profiles",
        {
            "k": np.concatenate(ks),
            "x": np.concatenate(xs),
            "ell_k": np.concatenate(ells),
            "phi1": np.concatenate(phis),
            "abs_diff": np.concatenate(diffs),
        },
        **meta,
    )
    out.table(
        f"{prob.label}_landscape_summary",
        {"k": np.arange(1, k_max + 1), "sup_error": np.array(errors), "prop1_bound": np.array(bounds)},
        **meta,
        weighted_caveat=not prob.unit_weight,
    )


def cmd_landscape(args, out: Outputs):
    prob = _problem(args)
    _landscape_tables(out, prob, _grid(args, prob), args.k_max)


def _glandscape_tables(out: Outputs, prob, n: int, k_max: int, t=None, n0=None):
    pairs = eigenpairs_direct(prob, PROP2_TRUNCATION, n)
    weight = _weight(prob, pairs[0].values.x)
    if n0 is None:
        if t is not None:
            raise ValidationError("--t needs --n0")
        cases = []
        for j in range(1, 5):
            lo, hi = 1.0 / pairs[j].lam, 1.0 / pairs[j - 1].lam
            cases.append((float(np.sqrt(lo * hi)), j))
    else:
        if t is None:
            t = float(np.sqrt(1.0 / (pairs[n0].lam * pairs[n0 - 1].lam)))
        cases = [(t, n0)]
    for t_val, j0 in cases:
        check_window(pairs, t_val, j0)
        ks = np.arange(1, k_max + 1)
        res = [prop2_residual(pairs, t_val, int(k), j0, PROP2_TRUNCATION, weight) for k in ks]
        bnd = [prop2_bound(prob.L, t_val, pairs[j0].lam, int(k), pairs[j0 - 1].lam) for k in ks]
        out.table(
            f"{prob.label}_glandscape_n0_{j0}",
            {"k": ks, "residual": np.array(res), "prop2_bound": np.array(bnd)},
            problem=prob.label,
            grid=n,
            t=t_val,
            n0=j0,
            truncation=PROP2_TRUNCATION,
            window=[1.0 / pairs[j0].lam, 1.0 / pairs[j0 - 1].lam],
        )


def cmd_glandscape(args, out: Outputs):
    prob = _problem(args, fallback="laplacian-B")
    _glandscape_tables(out, prob, _grid(args, prob), args.k_max, args.t, args.n0)


# ----------------------------------------------------------- experiments


def run_fig1(out: Outputs, preset_name=None, grid=None, **_):
    prob = preset(preset_name or "fig1-tanh-metric")
    n = grid or DEFAULT_GRID
    pairs = eigenpairs_direct(prob, 30, n)
    x = pairs[0].values.x
    out.table("fig1_p_curve", {"x": x, "p": prob.p(x)}, problem=prob.label, grid=n)
    out.table(
        "fig1_alpha_table",
        {
            "n": np.array([p.index for p in pairs]),
            "lambda": np.array([p.lam for p in pairs]),
            "alpha": np.array([alpha(p.values) for p in pairs]),
        },
        problem=prob.label,
        grid=n,
    )
    for k in (2, 30):
        out.table(
            f"fig1_mode_{k}",
            {"x": x, "phi": pairs[k - 1].values.values},
            problem=prob.label,
            grid=n,
            mode=k,
            eigenvalue=pairs[k - 1].lam,
        )


def run_fig2(out: Outputs, **_):
    B = beta = gamma = sup = l4 = 1.0
    lams = np.linspace(0.5, 50.0, 500)
    out.table(
        "fig2_envelope",
        _envelope_columns(lams, B, beta, gamma, sup, l4),
        B=B,
        beta=beta,
        gamma=gamma,
        Q_sup=sup,
        Q_l4=l4,
        lambda_star=assumption_threshold(B, (sup, l4)),
    )


def run_fig3(out: Outputs, **_):
    B = 1.0
    lams = np.linspace(1.0, 400.0, 2000)
    out.table(
        "fig3_alpha_phi",
        {
            "lambda": lams,
            "alpha_phi": np.array([alpha_phi_closed_form(lam, B) for lam in lams]),
            "reference": np.full(lams.size, 2.0 * B / 3.0),
        },
        B=B,
    )


def run_prop1(out: Outputs, preset_name=None, grid=None, k_max=12, **_):
    for name in [preset_name] if preset_name else PROP1_PRESETS:
        prob = preset(name)
        n = grid or (LARGE_GRID if prob.L > 1.0 else DEFAULT_GRID)
        _landscape_tables(out, prob, n, k_max)


def run_prop2(out: Outputs, preset_name=None, grid=None, k_max=10, t=None, n0=None, **_):
    prob = preset(preset_name or "laplacian-B")
    n = grid or (LARGE_GRID if prob.L > 1.0 else DEFAULT_GRID)
    _glandscape_tables(out, prob, n, k_max, t, n0)


RUNNERS = {"fig1": run_fig1, "fig2": run_fig2, "fig3": run_fig3, "prop1": run_prop1, "prop2": run_prop2}


def cmd_reproduce(args, out: Outputs):
    opts = {"preset_name": args.preset, "grid": args.grid, "t": args.t, "n0": args.n0}
    if args.k_max is not None:
        opts["k_max"] = args.k_max
    if args.experiment == "all":
        return reproduce_all(out.dir, [{"experiment": e} for e in EXPERIMENTS])
    RUNNERS[args.experiment](out, **opts)
    return 0


def _load_batch(path):
    with open(path, encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValidationError(f"{path}: not valid YAML ({exc})") from None
    if not isinstance(data, list) or not all(isinstance(e, dict) for e in data):
        raise ValidationError(f"{path}: a batch file is a list of mappings")
    return data


def _run_entry(directory, entry: dict):
    entry = dict(entry)
    name = entry.pop("experiment", None)
    if name not in RUNNERS:
        raise ValidationError(f"unknown experiment {name!r}; expected one of {', '.join(EXPERIMENTS)}")
    allowed = {"preset", "grid", "t", "n0", "k_max"}
    extra = set(entry) - allowed
    if extra:
        raise ValidationError(f"unknown batch keys for {name}: {sorted(extra)}")
    if "preset" in entry:
        entry["preset_name"] = entry.pop("preset")
    out = Outputs(directory, experiment=name)
    try:
        RUNNERS[name](out, **entry)
    except BaseException:
        out.discard()
        raise
    return out.files


def reproduce_all(directory, batch=DEFAULT_BATCH) -> int:
    """Run every experiment in ``batch``; failures are reported, not fatal."""
    status = 0
    for entry in batch:
        label = ", ".join(f"{k}={v}" for k, v in entry.items())
        try:
            files = _run_entry(directory, entry)
        except (SllocError, ValueError, OSError, KeyError) as exc:
            code = _exit_code(exc)
            status = max(status, code)
            print(f"FAILED [{label}]: {exc}", file=sys.stderr)
            continue
        print(f"ok [{label}]: {len(files) // 2} table(s)", file=sys.stderr)
    return status


# ------------------------------------------------------------------ main


def _exit_code(exc) -> int:
    return 2 if isinstance(exc, NumericalError) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slloc", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"slloc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or ./out)")
        return sp

    def problem_opts(sp):
        src = sp.add_mutually_exclusive_group()
        src.add_argument("--preset", help=f"one of {', '.join(PRESETS)}")
        src.add_argument("--config", help="YAML problem file")
        sp.add_argument("--length", type=float, default=None, help="interval length for laplacian-B")
        sp.add_argument("--grid", type=int, default=None, help="odd node count (default 4097, 8193 when L > 1)")

    def explicit_norms(sp):
        sp.add_argument("--B", type=float, default=1.0)
        sp.add_argument("--q-sup", type=float, default=1.0)
        sp.add_argument("--q-l4", type=float, default=1.0)

    sp = add("transform", cmd_transform, "Liouville normal form table")
    problem_opts(sp)

    sp = add("eigs", cmd_eigs, "lowest eigenvalues with localization coefficients")
    problem_opts(sp)
    sp.add_argument("--modes", type=int, default=30)
    sp.add_argument("--dump-modes", default=None, help="comma-separated mode numbers to write as (x, phi)")

    sp = add("alpha", cmd_alpha, "measured alpha against the non-asymptotic envelope")
    problem_opts(sp)
    sp.add_argument("--modes", type=int, default=30)
    sp.add_argument("--regime", choices=sorted(REGIMES), default=None)

    sp = add("threshold", cmd_threshold, "print the eigenvalue above which the envelope applies")
    problem_opts(sp)
    explicit_norms(sp)

    sp = add("envelope", cmd_envelope, "tabulate envelopes on a lambda grid")
    problem_opts(sp)
    explicit_norms(sp)
    sp.add_argument("--q-l1", type=float, default=0.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--regime", choices=sorted(REGIMES), default=None)
    sp.add_argument("--lambda-min", type=float, default=None)
    sp.add_argument("--lambda-max", type=float, default=None)
    sp.add_argument("--lambda-steps", type=int, default=None)

    sp = add("landscape", cmd_landscape, "iterated landscape convergence to the first mode")
    problem_opts(sp)
    sp.add_argument("--k-max", type=int, default=12)

    sp = add("glandscape", cmd_glandscape, "generalized landscape tail against its bound")
    problem_opts(sp)
    sp.add_argument("--k-max", type=int, default=10)
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--n0", type=int, default=None)

    sp = add("reproduce", cmd_reproduce, "regenerate the data behind a figure")
    sp.add_argument("experiment", choices=[*EXPERIMENTS, "all"])
    sp.add_argument("--preset", default=None)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--k-max", type=int, default=None)
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--n0", type=int, default=None)

    sp = add("reproduce-all", None, "run every experiment (or a YAML batch file)")
    sp.add_argument("--batch", default=None, help="YAML list of {experiment, preset, grid, t, n0, k_max}")
    return parser


@dataclass
class ExperimentConfig:
    """Programmatic equivalent of one command line.

    ``options`` holds command-specific flags by their long name without
    dashes, e.g. ``{"k_max": 8, "dump_modes": "2,7"}``.
    """

    command: str
    problem: str | None = None
    grid: int | None = None
    modes: int | None = None
    output: str | None = None
    options: dict = field(default_factory=dict)


def run(config: ExperimentConfig) -> int:
    """Execute ``config`` exactly as the matching command line would."""
    argv = [config.command]
    if config.command == "reproduce":
        argv.append(config.options.get("experiment", "all"))
    if config.problem is not None:
        is_file = config.problem.endswith((".yaml", ".yml")) or os.path.sep in config.problem
        argv += ["--config" if is_file else "--preset", config.problem]
    for flag, value in (("--grid", config.grid), ("--modes", config.modes), ("--out", config.output)):
        if value is not None:
            argv += [flag, str(value)]
    for key, value in config.options.items():
        if key != "experiment" and value is not None:
            argv += ["--" + key.replace("_", "-"), str(value)]
    return main(argv)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out or os.environ.get(OUT_ENV) or "out")
    try:
        if out_dir.exists() and not out_dir.is_dir():
            raise ValidationError(f"output path {out_dir} is not a directory")
        if args.command == "reproduce-all":
            batch = _load_batch(args.batch) if args.batch else DEFAULT_BATCH
            return reproduce_all(out_dir, batch)
        if args.command == "threshold":
            args.func(args, None)
            return 0
        out = Outputs(out_dir, command=args.command)
        try:
            status = args.func(args, out) or 0
        except BaseException:
            out.discard()
            raise
        return status
    except (SllocError, ValueError, KeyError) as exc:
        print(f"slloc: error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except OSError as exc:
        print(f"slloc: cannot write output: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
