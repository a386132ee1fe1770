"""Batch front-end: runs, sweeps, and analytic-vs-Monte-Carlo comparisons.

Configuration is plain `key = value` text (# comments allowed) with
command-line flags taking precedence over the file, which takes precedence
over defaults.  Keys:

    mu, gamma_r, g, dt, burn_in, sample_interval, n_samples_per_traj,
    n_trajectories, master_seed, divergence_threshold, sigma_threshold,
    out_dir

dt, burn_in and sample_interval accept "auto" (or empty) to defer to the
engine's resolution rules.  Unknown keys are rejected.  Exit codes: 0 ok,
2 invalid input, 3 unreliable run (too many divergent trajectories; the
report is still written).  The OPO3_WORKERS environment variable selects
the worker count; unset means auto-detect.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import __version__
from .analytic import analytic_moment_report, cs_sides_analytic
from .criteria import (
    PARTITIONS,
    cs_running_average,
    cs_test,
    pair_audit,
    pump_odd_moment,
    separability_witness,
)
from .engine import SimConfig, run_ensemble
from .model import DomainError, ModelParams, ValidityError
from .moments import NoSamplesError


class CliError(ValueError):
    """User-input problem; maps to exit code 2."""


EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNRELIABLE = 3


@dataclass(frozen=True)
class RunSpec:
    """Fully resolved invocation settings (model + run + output)."""

    mu: float = 0.5
    gamma_r: float = 1.0
    g: float = 0.05
    dt: float | None = None
    burn_in: float | None = None
    sample_interval: float | None = None
    n_samples_per_traj: int = 64
    n_trajectories: int = 256
    master_seed: int = 12345
    divergence_threshold: float = 1e6
    sigma_threshold: float = 3.0
    out_dir: str = "."

    def params(self) -> ModelParams:
        return ModelParams(mu=self.mu, gamma_r=self.gamma_r, g=self.g)

    def sim_config(self) -> SimConfig:
        return SimConfig(
            dt=self.dt,
            burn_in=self.burn_in,
            sample_interval=self.sample_interval,
            n_samples_per_traj=self.n_samples_per_traj,
            n_trajectories=self.n_trajectories,
            master_seed=self.master_seed,
            divergence_threshold=self.divergence_threshold,
        )


CONFIG_KEYS = tuple(f.name for f in fields(RunSpec))

_OPTIONAL_FLOAT_KEYS = ("dt", "burn_in", "sample_interval")
_INT_KEYS = ("n_samples_per_traj", "n_trajectories", "master_seed")
_FLOAT_KEYS = ("mu", "gamma_r", "g", "divergence_threshold", "sigma_threshold")


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key == "out_dir":
        return raw
    if key in _OPTIONAL_FLOAT_KEYS:
        if raw.lower() in ("", "auto", "none"):
            return None
        key_kind = float
    elif key in _INT_KEYS:
        key_kind = int
    elif key in _FLOAT_KEYS:
        key_kind = float
    else:
        raise CliError(f"unknown config key: {key}")
    try:
        return key_kind(raw)
    except ValueError:
        raise CliError(f"bad value for {key}: {raw!r}")


def parse_config_file(path: str) -> dict:
    """Read key=value lines; '#' starts a comment; unknown keys rejected."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value")
        key, _, raw = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise CliError(f"{path}:{lineno}: unknown config key: {key}")
        out[key] = _convert(key, raw)
    return out


def build_runspec(args: argparse.Namespace) -> RunSpec:
    spec = RunSpec()
    if getattr(args, "config", None):
        spec = replace(spec, **parse_config_file(args.config))
    overrides = {}
    for key in CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is None:
            continue
        # dt/burn-in/sample-interval flags arrive as strings ("auto" allowed)
        overrides[key] = _convert(key, val) if key in _OPTIONAL_FLOAT_KEYS else val
    if getattr(args, "seed", None) is not None:
        overrides["master_seed"] = int(args.seed)
    if overrides:
        spec = replace(spec, **overrides)
    return spec


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".12g")
    return str(x)


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


TIMESERIES_HEADER = "tau,n_samples,lhs,rhs,ratio"
SWEEP_HEADER = "mu,gamma_r,g,source,lhs,rhs,ratio,significance,verdict"
COMPARE_HEADER = ("moment,mc_value,mc_std_error,analytic_value,pull,"
                  "within_3sigma,low_confidence")


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"not serializable: {type(obj)!r}")


def cmd_run(spec: RunSpec) -> int:
    params = spec.params()
    result = run_ensemble(params, spec.sim_config(), collect_time_series=True)
    k = spec.sigma_threshold

    criteria = {}
    try:
        report = result.moments.finalize(centering="reference")
    except NoSamplesError:
        report = None   # everything diverged; still write provenance
    if report is not None:
        for part in sorted(PARTITIONS):
            criteria[f"cauchy_schwarz_{part.replace('|', '_')}"] = cs_test(
                report, partition=part, sigma_threshold=k).to_dict()
        criteria["separability_witness"] = separability_witness(
            report, sigma_threshold=k).to_dict()
        criteria["pair_audit"] = pair_audit(report, sigma_threshold=k).to_dict()
        criteria["pump_odd_moment"] = pump_odd_moment(
            report, sigma_threshold=k).to_dict()

    analytic_rep = analytic_moment_report(params)
    sides = cs_sides_analytic(params)

    doc = {
        "version": __version__,
        "params": {"mu": params.mu, "gamma_r": params.gamma_r,
                   "g": params.g, "eps": params.eps},
        "config": result.config.to_dict(),
        "sigma_threshold": k,
        "n_trajectories": result.n_trajectories,
        "n_diverged": result.n_diverged,
        "divergence_fraction": result.divergence_fraction,
        "reliable": result.reliable,
        "elapsed_seconds": result.elapsed_seconds,
        "moments": report.to_dict() if report is not None else None,
        "criteria": criteria,
        "analytic": {
            "moments": analytic_rep.to_dict(),
            "cauchy_schwarz": {"lhs": sides.lhs, "rhs": sides.rhs,
                               "ratio": sides.ratio, "verdict": sides.verdict},
        },
    }

    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(doc, indent=2, default=_json_default, allow_nan=True) + "\n")

    if result.moments.per_sample_sums is not None:
        curves = cs_running_average(result)
        rows = ([float(t), int(n), float(l), float(r), float(q)]
                for t, n, l, r, q in zip(curves["tau"], curves["n_samples"],
                                         curves["lhs"], curves["rhs"],
                                         curves["ratio"]))
    else:
        rows = ()
    _write_csv(out_dir / "timeseries.csv", TIMESERIES_HEADER, rows)

    n_kept = report.n_samples if report is not None else 0
    print(f"run: mu={params.mu} gamma_r={params.gamma_r} g={params.g} "
          f"n_samples={n_kept} diverged={result.n_diverged}")
    if "cauchy_schwarz_0_12" in criteria:
        cs0 = criteria["cauchy_schwarz_0_12"]
        print(f"cauchy-schwarz 0|12: {cs0['verdict']} "
              f"(ratio={_fmt(cs0['ratio'])}, "
              f"significance={_fmt(cs0['significance'])})")
    print(f"wrote {out_dir / 'report.json'} and {out_dir / 'timeseries.csv'}")
    if not result.reliable:
        print(f"warning: {result.n_diverged}/{result.n_trajectories} "
              "trajectories diverged; run is unreliable", file=sys.stderr)
        return EXIT_UNRELIABLE
    return EXIT_OK


def _sweep_values(raw: str) -> list:
    try:
        vals = [float(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError:
        raise CliError(f"bad sweep values: {raw!r}")
    if not vals:
        raise CliError("empty sweep axis")
    seen = []
    for v in vals:
        if v in seen:
            print(f"warning: duplicate sweep value {v:g} dropped",
                  file=sys.stderr)
        else:
            seen.append(v)
    return seen


def _criterion_row(params: ModelParams, source: str, crit) -> list:
    return [params.mu, params.gamma_r, params.g, source,
            crit.lhs, crit.rhs, crit.ratio, crit.significance, crit.verdict]


def cmd_sweep(spec: RunSpec, axis: str, values_raw: str, source: str) -> int:
    values = _sweep_values(values_raw)
    if axis not in ("gamma_r", "mu"):
        raise CliError(f"unknown sweep axis: {axis}")
    if source not in ("analytic", "mc", "both"):
        raise CliError(f"unknown sweep source: {source}")
    rows = []
    for v in values:
        point = replace(spec, **{axis: v})
        params = point.params()
        if source in ("analytic", "both"):
            crit = cs_test(analytic_moment_report(params),
                           sigma_threshold=point.sigma_threshold)
            rows.append(_criterion_row(params, "analytic", crit))
        if source in ("mc", "both"):
            result = run_ensemble(params, point.sim_config())
            crit = cs_test(result.moments.finalize(),
                           sigma_threshold=point.sigma_threshold)
            rows.append(_criterion_row(params, "mc", crit))
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.csv"
    _write_csv(path, SWEEP_HEADER, rows)
    for row in rows:
        print(f"{axis}={row[0] if axis == 'mu' else row[1]:g} "
              f"[{row[3]}] ratio={_fmt(row[6])} verdict={row[8]}")
    print(f"wrote {path}")
    return EXIT_OK


COMPARE_MOMENTS = ("t1", "t2", "t3", "t4", "q4", "var_x0",
                   "cov_x_xp", "cov_y_yp")


def cmd_compare(spec: RunSpec) -> int:
    params = spec.params()
    if params.mu > 0.9:
        print("warning: near-threshold: perturbative oracle unreliable",
              file=sys.stderr)
    result = run_ensemble(params, spec.sim_config())
    report = result.moments.finalize(centering="reference")
    analytic_rep = analytic_moment_report(params)
    rows = []
    all_ok = True
    any_low = False
    for name in COMPARE_MOMENTS:
        mc = report[name]
        an = analytic_rep[name].value.real
        pull = ((mc.value.real - an) / mc.std_error
                if mc.std_error > 0 else math.inf * (mc.value.real - an or 0))
        ok = abs(pull) <= 3.0
        all_ok = all_ok and ok
        any_low = any_low or mc.low_confidence
        rows.append([name, mc.value.real, mc.std_error, an, pull,
                     ok, mc.low_confidence])
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "compare.csv"
    _write_csv(path, COMPARE_HEADER, rows)
    print(f"{'moment':10s} {'mc':>14s} {'std_err':>10s} {'analytic':>14s} "
          f"{'pull':>7s}")
    for name, mcv, se, an, pull, ok, low in rows:
        flag = "" if ok else "  <-- outside 3 sigma"
        low_s = " (low confidence)" if low else ""
        print(f"{name:10s} {mcv:14.6e} {se:10.2e} {an:14.6e} "
              f"{pull:7.2f}{flag}{low_s}")
    print(f"summary: {'all pulls within +-3' if all_ok else 'pulls outside +-3'}"
          f"; wrote {path}")
    if not result.reliable:
        print("warning: unreliable run (divergences)", file=sys.stderr)
        return EXIT_UNRELIABLE
    if any_low:
        print("warning: fewer than 30 trajectory batches; "
              "errors are low-confidence", file=sys.stderr)
    return EXIT_OK


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--mu", type=float)
    p.add_argument("--gamma-r", dest="gamma_r", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--dt", type=str)
    p.add_argument("--burn-in", dest="burn_in", type=str)
    p.add_argument("--sample-interval", dest="sample_interval", type=str)
    p.add_argument("--n-samples-per-traj", dest="n_samples_per_traj", type=int)
    p.add_argument("--n-trajectories", dest="n_trajectories", type=int)
    p.add_argument("--master-seed", dest="master_seed", type=int)
    p.add_argument("--seed", type=int, help="alias for --master-seed")
    p.add_argument("--divergence-threshold", dest="divergence_threshold",
                   type=float)
    p.add_argument("--sigma-threshold", dest="sigma_threshold", type=float)
    p.add_argument("--out-dir", dest="out_dir")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opo3",
        description="Three-mode OPO simulator: positive-P trajectories, "
                    "moment estimation, Cauchy-Schwarz nonclassicality tests.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate an ensemble, write "
                                       "report.json and timeseries.csv")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="scan gamma_r or mu; write sweep.csv")
    _add_common(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=("gamma_r", "mu"))
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated axis values")
    p_sweep.add_argument("--source", default="analytic",
                         choices=("analytic", "mc", "both"))

    p_cmp = sub.add_parser("compare", help="Monte Carlo vs analytic moment "
                                           "table; write compare.csv")
    _add_common(p_cmp)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        spec = build_runspec(args)
        if args.command == "run":
            return cmd_run(spec)
        if args.command == "sweep":
            return cmd_sweep(spec, args.axis, args.values, args.source)
        if args.command == "compare":
            return cmd_compare(spec)
        raise CliError(f"unknown command {args.command!r}")
    except (CliError, DomainError, ValidityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
