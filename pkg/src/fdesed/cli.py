"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
Summaries go to stdout and warnings to stderr; every file written is a
deterministic function of the inputs.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import rouse_for, shannon_for, solve_shannon_N, tsallis_for, baseline_profile
from .dataio import (
    ParameterRecord,
    dumps_parameters,
    emit_plot_data,
    fmt,
    load_parameters,
    load_profile,
    write_profile,
    write_rows,
)
from .entropy import fde_entropy_of_pdf, fractional_order
from .errors import DataError, FdeError, GeometryMismatch, NumericalError
from .metrics import (
    PairedSeries,
    error_moments,
    error_report,
    mase,
    relative_error,
    rmse,
    sum_relative_squared_error,
)
from .profile import (
    FdeModelParameters,
    FlowGeometry,
    concentration_profile,
    concentration_profile_normalized,
    fit_profile,
    hypothetical_cdf_normalized,
    mean_normalized_concentration,
)
from .series import solve_multipliers

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _alpha(text):
    try:
        return fractional_order(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be an integer >= 2, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _write_text(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot write {path}: {exc}") from exc


def _dataset_for_params(args, params: FdeModelParameters):
    """Load the profile, checking (or borrowing) the geometry of ``params``."""
    g = params.geometry
    if args.meta is None:
        return load_profile(args.profile, h=g.h, y_r=g.y_r, c_r=g.c_r)
    ds = load_profile(args.profile, args.meta)
    dg = ds.geometry
    for name in ("h", "y_r", "c_r"):
        a, b = getattr(dg, name), getattr(g, name)
        if abs(a - b) > 1e-9 * max(1.0, abs(a), abs(b)):
            raise GeometryMismatch(
                f"dataset {name} = {a!r} does not match parameter file {name} = {b!r}")
    return ds


def _series(ds, params, dimensional=False) -> PairedSeries:
    computed = np.asarray(concentration_profile(ds.y, params), dtype=float)
    observed = ds.c / ds.geometry.c_r
    if dimensional:
        observed, computed = ds.c, computed * ds.geometry.c_r
    return PairedSeries(observed, computed, ds.surface_index)


# --------------------------------------------------------------------------


def cmd_fit(args) -> int:
    if not (0 < args.a_min < args.a_max):
        raise UsageError(f"need 0 < --a-min < --a-max, got {args.a_min}, {args.a_max}")
    ds = load_profile(args.profile, args.meta)
    fit = fit_profile(ds, search=(args.a_min, args.a_max), mean_method=args.mean_method,
                      extend_to_surface=not args.no_extend_surface)
    rec = ParameterRecord(fit.params, fit.objective, fit.flags, ds.name, fit.mean_method)
    _write_text(args.out, dumps_parameters(rec))
    p = fit.params
    print(f"{ds.name}: c_m_hat={fmt(p.c_m_hat)} lambda0={fmt(p.lam.lambda0)} "
          f"lambda1={fmt(p.lam.lambda1)} a={fmt(p.a)} objective={fmt(fit.objective)} "
          f"flags={','.join(fit.flags) or 'none'}")
    return EXIT_OK


def cmd_predict(args) -> int:
    params = load_parameters(args.params).params
    g = params.geometry
    y = np.linspace(g.y_r, g.h, args.grid)
    y_hat = np.clip((y - g.y_r) / (g.h - g.y_r), 0.0, 1.0)
    c_hat = np.atleast_1d(concentration_profile_normalized(y_hat, params))
    F = np.atleast_1d(hypothetical_cdf_normalized(y_hat, params.a))
    rows = [[yi, yi / g.h, ci, ci * g.c_r, fi] for yi, ci, fi in zip(y, c_hat, F)]
    try:
        write_rows(args.out, ["y", "y_over_h", "c_hat", "c", "F_hypothetical"], rows)
    except OSError as exc:
        raise DataError(f"cannot write {args.out}: {exc}") from exc
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    params = load_parameters(args.params).params
    ds = _dataset_for_params(args, params)
    norm = error_report(_series(ds, params), args.degree)
    dim = error_report(_series(ds, params, dimensional=True), args.degree)
    report = {
        "dataset": ds.name,
        "n": len(ds),
        "surface_sample": ds.surface_sample,
        "regression_degree": args.degree,
        "normalized": norm.as_dict(),
        "dimensional": dim.as_dict(),
    }
    _write_text(args.out, json.dumps(report, indent=2) + "\n")
    print(f"{ds.name}: Re={fmt(norm.Re)} E1={fmt(norm.E1)} RMSE={fmt(norm.RMSE)} "
          f"MASE={fmt(norm.MASE)} E2={fmt(norm.E2)} R2={fmt(norm.r_squared)}")
    return EXIT_OK


COMPARE_METRICS = ("Re", "E1", "RMSE", "MASE", "mean_error", "std_error")


def _model_metrics(series: PairedSeries) -> tuple[dict, list[str]]:
    values, notes = {}, []
    positive = series.observed > 0
    ratio_part = series.where(positive) if not positive.all() else series
    funcs = {
        "Re": lambda: relative_error(ratio_part),
        "E1": lambda: sum_relative_squared_error(ratio_part),
        "RMSE": lambda: rmse(series),
        "MASE": lambda: mase(series),
    }
    for key, fn in funcs.items():
        try:
            values[key] = fn()
        except (ValueError, FdeError) as exc:
            notes.append(f"{key}: {type(exc).__name__}")
    values["mean_error"], values["std_error"] = error_moments(series)
    return values, notes


def _published_reference(key):
    text = resources.files("fdesed").joinpath("data/published_reference.json").read_text("utf-8")
    table = json.loads(text)["datasets"]
    if key not in table:
        raise UsageError(f"no published reference values for {key!r}; known: {sorted(table)}")
    return table[key]


def cmd_compare(args) -> int:
    params = load_parameters(args.params).params
    ds = _dataset_for_params(args, params)
    g = ds.geometry
    observed = ds.c / g.c_r
    rows: list[tuple[str, dict, list[str]]] = []

    def add(name, compute):
        try:
            computed = np.asarray(compute(), dtype=float)
        except (NumericalError, ValueError) as exc:
            rows.append((name, {}, [f"{type(exc).__name__}: {exc}"]))
            return
        values, notes = _model_metrics(PairedSeries(observed, computed, ds.surface_index))
        rows.append((name, values, notes))

    add("FDE", lambda: concentration_profile(ds.y, params))
    if args.tsallis is not None:
        cdf = None
        if args.tsallis_cdf == "hypothetical":
            def cdf(y):
                return hypothetical_cdf_normalized(g.normalized_height(y), params.a)
        spec = tsallis_for(g, args.tsallis, cdf)
        add("Tsallis", lambda: baseline_profile(spec, ds.y))
    if args.shannon is not None or args.shannon_auto:
        if args.shannon_auto:
            n_value = solve_shannon_N(mean_normalized_concentration(ds, extend_to_surface=True))
        else:
            n_value = args.shannon
        spec_s = shannon_for(g, n_value)
        add("Shannon", lambda: baseline_profile(spec_s, ds.y))
    if args.rouse is not None:
        spec_r = rouse_for(g, args.rouse)
        add("Rouse", lambda: baseline_profile(spec_r, ds.y))

    reference = {}
    if args.published is not None:
        reference.update(_published_reference(args.published))
    if args.reference is not None:
        try:
            reference.update(json.loads(Path(args.reference).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read reference values {args.reference}: {exc}") from exc
    for name, values in reference.items():
        if name.startswith("_"):
            continue
        kept = {k: float(v) for k, v in values.items() if k in COMPARE_METRICS}
        rows.append((f"{name} (published)", kept, ["reference value, not recomputed"]))

    best = {}
    for key in COMPARE_METRICS:
        present = [v[key] for _, v, _ in rows if key in v]
        if present:
            best[key] = min(present)
    lines = ["model," + ",".join(COMPARE_METRICS) + ",note"]
    for name, values, notes in rows:
        cells = [name]
        for key in COMPARE_METRICS:
            if key not in values:
                cells.append("")
                continue
            star = "*" if values[key] == best[key] else ""
            cells.append(fmt(values[key]) + star)
        cells.append("; ".join(notes).replace(",", ";"))
        lines.append(",".join(cells))
    _write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(rows)} model rows to {args.out}")
    return EXIT_OK


def cmd_entropy(args) -> int:
    params = load_parameters(args.params).params
    value = fde_entropy_of_pdf(params.lam, args.alpha, args.c_hat_surface)
    print(fmt(value))
    return EXIT_OK


def cmd_plot_data(args) -> int:
    params = load_parameters(args.params).params
    ds = _dataset_for_params(args, params) if args.profile else None
    g = params.geometry
    specs = []
    if args.rouse is not None:
        specs.append(rouse_for(g, args.rouse))
    if args.shannon is not None or args.shannon_auto:
        if args.shannon_auto:
            if ds is None:
                raise UsageError("--shannon-auto needs a profile")
            n_value = solve_shannon_N(mean_normalized_concentration(ds, extend_to_surface=True))
        else:
            n_value = args.shannon
        specs.append(shannon_for(g, n_value))
    if args.tsallis is not None:
        specs.append(tsallis_for(g, args.tsallis))
    emit_plot_data(ds, params, specs, args.grid, args.out, include_samples=args.with_samples)
    print(f"wrote plot data to {args.out}")
    return EXIT_OK


def cmd_synth(args) -> int:
    """Write a profile sampled from the model itself (for round-trip checks)."""
    geometry = FlowGeometry(h=args.h, y_r=args.y_r, c_r=args.c_r)
    params = FdeModelParameters(solve_multipliers(args.c_m), args.a, args.c_m, geometry)
    y = np.linspace(args.y_r, args.h, args.n)
    c = np.asarray(concentration_profile(y, params)) * args.c_r
    c[-1] = 0.0
    write_profile(args.out, y, c)
    meta = {"name": args.name, "h": args.h, "y_r": args.y_r, "c_r": args.c_r,
            "surface_sample": True}
    if args.meta_out:
        _write_text(args.meta_out, json.dumps(meta, indent=2) + "\n")
    print(f"wrote {args.n} samples to {args.out}")
    return EXIT_OK


# --------------------------------------------------------------------------


def _add_baseline_flags(p, auto=True):
    p.add_argument("--rouse", type=_positive_float, metavar="R0", help="include the Rouse profile")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--shannon", type=float, metavar="N", help="Shannon profile with this N")
    if auto:
        group.add_argument("--shannon-auto", action="store_true",
                           help="derive Shannon N from the depth-averaged c_m/c_0")
    p.add_argument("--tsallis", type=_positive_float, metavar="N", help="include the Tsallis profile")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdesed",
        description="Fractional-entropy suspended sediment concentration profiles.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="estimate model parameters from a measured profile")
    p.add_argument("profile")
    p.add_argument("--meta")
    p.add_argument("--out", required=True)
    p.add_argument("--a-min", type=float, default=0.01)
    p.add_argument("--a-max", type=float, default=1.0)
    p.add_argument("--no-extend-surface", action="store_true",
                   help="do not append a zero sample at h when averaging")
    p.add_argument("--mean-method", choices=("joint", "trapezoid"), default="joint")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", help="tabulate the fitted profile on a height grid")
    p.add_argument("--params", required=True)
    p.add_argument("--grid", type=_positive_int, default=101)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="error metrics of a fitted profile against data")
    p.add_argument("profile")
    p.add_argument("--params", required=True)
    p.add_argument("--meta")
    p.add_argument("--degree", type=int, default=1, choices=(1, 2),
                   help="regression polynomial degree for R^2")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="compare the fitted profile with baseline models")
    p.add_argument("profile")
    p.add_argument("--params", required=True)
    p.add_argument("--meta")
    _add_baseline_flags(p)
    p.add_argument("--tsallis-cdf", choices=("linear", "hypothetical"), default="linear")
    p.add_argument("--reference", help="JSON of published metric values per model")
    p.add_argument("--published", metavar="DATASET",
                   help="append the bundled published values for this dataset")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("entropy", help="fractional differential entropy of the fitted pdf")
    p.add_argument("--params", required=True)
    p.add_argument("--alpha", type=_alpha, default=0.5)
    p.add_argument("--c-hat-surface", type=float, default=0.0)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("plot-data", help="write the curves needed to redraw the figures")
    p.add_argument("profile", nargs="?")
    p.add_argument("--params", required=True)
    p.add_argument("--meta")
    _add_baseline_flags(p)
    p.add_argument("--grid", type=_positive_int, default=101)
    p.add_argument("--with-samples", action="store_true", help="merge sample heights into the grid")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot_data)

    p = sub.add_parser("synth", help="write a profile generated by the model itself")
    p.add_argument("--c-m", type=float, default=0.6)
    p.add_argument("--a", type=_positive_float, default=0.7)
    p.add_argument("--n", type=_positive_int, default=50)
    p.add_argument("--h", type=_positive_float, default=1.0)
    p.add_argument("--y-r", type=float, default=0.0)
    p.add_argument("--c-r", type=_positive_float, default=1.0)
    p.add_argument("--name", default="synthetic")
    p.add_argument("--out", required=True)
    p.add_argument("--meta-out")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            code = args.func(args)
        except UsageError as exc:
            print(f"{parser.prog}: error: {exc}", file=sys.stderr)
            code = EXIT_USAGE
        except DataError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = EXIT_DATA
        except NumericalError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = EXIT_NUMERICAL
        except ValueError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = EXIT_DATA
    for w in caught:
        print(f"warning: {w.category.__name__}: {w.message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
