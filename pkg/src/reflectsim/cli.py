"""Command-line interface: simulate, rectify, v-sample, v-density, moments,
convergence."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import click
import numpy as np

from . import streams
from .experiments import ExperimentConfig, run_error_experiment
from .models import (
    StrictlyStable,
    model_from_dict,
    small_time_scaling,
    zoom_limit_params,
)
from .moments import (
    expected_positive_part,
    expected_v,
    expected_vn,
    positivity_parameter,
)
from .rectify import apply_rectification
from .stats import kde_gaussian
from .vlimit import BesselBrownian, Monotone, StableNested, sample_v_batch


def _load_toml(path):
    try:
        import tomllib
    except ImportError:  # Python 3.10
        import tomli as tomllib
    with open(path, "rb") as f:
        return tomllib.load(f)


@click.group()
def main():
    """Reflected-process discretization error: simulation and rectification."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--seed", type=int, default=None, help="Override the config seed.")
@click.option("--workers", type=int, default=None, help="Override worker count.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def simulate(config_path, seed, workers, out_dir):
    """Run the coupled coarse/fine error study from a TOML config."""
    cfg = ExperimentConfig.from_toml(config_path)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if workers is not None:
        overrides["workers"] = workers
    if overrides:
        spec = cfg.to_dict()
        spec.update(overrides)
        cfg = ExperimentConfig.from_dict(spec)
    report = run_error_experiment(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report.write_records_csv(out / "records.csv")
    report.write_report_json(out / "report.json")
    fr = report.aggregates["fractions"]
    click.echo(
        json.dumps(
            {
                "records": str(out / "records.csv"),
                "report": str(out / "report.json"),
                "replications": cfg.replications,
                "fine_lower_last": fr["fine_lower_last"],
                "ks_rectified_vs_reference": report.aggregates["ks"][
                    "rectified_vs_reference"
                ],
            },
            indent=2,
        )
    )


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--seed", type=int, default=None)
@click.option("--y-col", default="y_coarse", show_default=True)
@click.option("--lower-col", default="coarse_last_lower", show_default=True)
@click.option("--upper-col", default="coarse_last_upper", show_default=True)
def rectify(config_path, in_path, out_path, seed, y_col, lower_col, upper_col):
    """Rectify an outcomes CSV (terminal + last-push columns) into a new CSV."""
    cfg = ExperimentConfig.from_toml(config_path)
    if seed is None:
        seed = cfg.seed
    rows_y, rows_ll, rows_lu = [], [], []
    with open(in_path, newline="") as f:
        for row in csv.DictReader(f):
            rows_y.append(float(row[y_col]))
            rows_ll.append(int(row[lower_col]))
            rows_lu.append(int(row[upper_col]))
    terminals = np.array(rows_y)
    draws = sample_v_batch(cfg.sampler(), terminals.size, seed, streams.V_DRAW)
    a = small_time_scaling(cfg.model, 1.0 / cfg.n)
    rectified = apply_rectification(
        terminals, np.array(rows_ll), np.array(rows_lu), a, draws, cfg.policy
    )
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(("rectified",))
        for v in rectified:
            writer.writerow((repr(float(v)),))
    click.echo(f"wrote {terminals.size} rectified samples to {out_path}")


def _sampler_from_flags(alpha, beta, scale, fine_per_step, steps, locations):
    if alpha == 2.0:
        return BesselBrownian(locations), math.sqrt(2.0) * scale
    spec_model = StrictlyStable(alpha, beta, scale)
    if abs(beta) == 1.0 and alpha < 1.0:
        return Monotone(spec_model), 1.0
    return StableNested(alpha, beta, scale, fine_per_step, steps), 1.0


@main.command("v-sample")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--m", "fine_per_step", type=int, default=100, show_default=True)
@click.option("--n", "steps", type=int, default=100, show_default=True)
@click.option("--locations", type=int, default=150, show_default=True)
@click.option("--reps", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
def v_sample(alpha, beta, scale, fine_per_step, steps, locations, reps, seed, workers):
    """Emit one gap-variable draw per line.

    alpha = 2 uses the Bessel construction for the limit with
    characteristic exponent -(scale*|t|)**2, i.e. sqrt(2)*scale times the
    standard-Brownian gap variable.
    """
    spec, factor = _sampler_from_flags(
        alpha, beta, scale, fine_per_step, steps, locations
    )
    draws = factor * sample_v_batch(
        spec, reps, seed, streams.STANDALONE, workers=workers
    )
    for v in draws:
        click.echo(repr(float(v)))


@main.command("v-density")
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--m", "fine_per_step", type=int, default=100, show_default=True)
@click.option("--n", "steps", type=int, default=100, show_default=True)
@click.option("--locations", type=int, default=150, show_default=True)
@click.option("--reps", type=int, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--bandwidth", type=float, default=None)
@click.option("--points", type=int, default=512, show_default=True)
@click.option("--qlo", type=float, default=0.01, show_default=True)
@click.option("--qhi", type=float, default=0.99, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def v_density(
    alpha,
    beta,
    scale,
    fine_per_step,
    steps,
    locations,
    reps,
    seed,
    workers,
    bandwidth,
    points,
    qlo,
    qhi,
    out_path,
):
    """Kernel density estimate of the gap variable as CSV (v,density).

    The grid spans the sample quantile range [qlo, qhi]; gap laws for
    small alpha are heavy-tailed, so full-range grids are rarely useful.
    """
    spec, factor = _sampler_from_flags(
        alpha, beta, scale, fine_per_step, steps, locations
    )
    draws = factor * sample_v_batch(
        spec, reps, seed, streams.STANDALONE, workers=workers
    )
    lo, hi = np.quantile(draws, [qlo, qhi])
    if hi <= lo:
        hi = lo + 1e-12
    grid = np.linspace(lo, hi, points)
    density = kde_gaussian(draws, bandwidth=bandwidth, grid=grid)
    lines = ["v,density"]
    lines += [
        f"{float(p)!r},{float(v)!r}" for p, v in zip(density.points, density.values)
    ]
    text = "\n".join(lines) + "\n"
    if out_path is None:
        click.echo(text, nl=False)
    else:
        Path(out_path).write_text(text)
        click.echo(f"wrote {points} density points to {out_path}")


@main.command()
@click.option("--alpha", type=float, default=None)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option("--n", "steps", type=int, default=None)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True),
    default=None,
    help="Model config; derives alpha/beta from its small-time limit.",
)
@click.option(
    "--shift-n",
    type=int,
    default=None,
    help="Also print scaling(1/shift_n) * expected_v for the config model.",
)
def moments(alpha, beta, steps, config_path, shift_n):
    """Closed-form gap moments as JSON: rho, E max(X,0), E V, and E V_n."""
    model = None
    if config_path is not None:
        model = model_from_dict(_load_toml(config_path)["model"])
        alpha, beta = zoom_limit_params(model)
    if alpha is None:
        raise click.UsageError("provide --alpha or --config")
    out = {
        "alpha": alpha,
        "beta": beta,
        "rho": positivity_parameter(alpha, beta),
        "expected_positive_part": expected_positive_part(alpha, beta),
        "expected_v": expected_v(alpha, beta),
    }
    if steps is not None:
        out["n"] = steps
        out["expected_vn"] = expected_vn(alpha, beta, steps)
    if shift_n is not None:
        if model is None:
            raise click.UsageError("--shift-n needs --config")
        out["shift_n"] = shift_n
        out["shift_constant"] = small_time_scaling(model, 1.0 / shift_n) * out[
            "expected_v"
        ]
    click.echo(json.dumps(out, indent=2))


@main.command()
@click.option("--alpha", type=float, required=True)
@click.option("--beta", type=float, default=0.0, show_default=True)
@click.option(
    "--n-values",
    default="1,10,100,1000,10000,100000",
    show_default=True,
    help="Comma-separated grid resolutions for the finite-n mean sweep.",
)
def convergence(alpha, beta, n_values):
    """Sweep the finite-resolution mean E V_n toward its limit E V."""
    try:
        ns = [int(s) for s in n_values.split(",") if s.strip()]
    except ValueError as exc:
        raise click.UsageError(f"bad --n-values: {exc}") from None
    limit = expected_v(alpha, beta)
    rows = []
    for n in ns:
        vn = expected_vn(alpha, beta, n)
        rows.append({"n": n, "expected_vn": vn, "remaining_gap": limit - vn})
    click.echo(
        json.dumps(
            {"alpha": alpha, "beta": beta, "expected_v": limit, "sweep": rows},
            indent=2,
        )
    )


if __name__ == "__main__":
    main()
