"""Seeded, parallel, reproducible experiments and their reports.

The error study couples a fine skeleton with its coarsened version: both
are reflected from the same start, the fine terminal (sharpened by the
expected-error mean shift) serves as the reference value, and the coarse
terminal is rectified with independent gap draws.  Per-replication
deviates come from counter-based substreams keyed by replication index
and purpose, so records are byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels, streams
from ._version import __version__ as _pkg_version
from .errors import ParameterError
from .models import (
    LevyModel,
    model_from_dict,
    model_to_dict,
    sample_increments,
    small_time_scaling,
    zoom_limit_params,
)
from .moments import expected_v, expected_vn
from .rectify import RectifyPolicy, apply_rectification, barrier_side
from .reflection import reflect_many
from .stats import kde_gaussian, ks_critical_value, ks_two_sample, mc_summary
from .vlimit import (
    BesselBrownian,
    Monotone,
    StableNested,
    VSamplerSpec,
    default_v_sampler,
    sample_v_batch,
)


@dataclass(frozen=True)
class ExperimentConfig:
    model: LevyModel
    x0: float = 0.3
    n: int = 100
    n_fine: int = 10000
    replications: int = 20000
    seed: int = 0
    v_sampler: VSamplerSpec | None = None
    policy: RectifyPolicy = field(default_factory=RectifyPolicy)
    workers: int = 1
    sign_census_band: float = 0.05
    v_reference_draws: int | None = None
    compensated_sums: bool = False

    def __post_init__(self):
        if not 0.0 <= self.x0 <= 1.0:
            raise ParameterError(f"x0 must lie in [0, 1], got {self.x0}")
        if self.n < 1 or self.n_fine < 1:
            raise ParameterError("resolutions must be >= 1")
        if self.n_fine % self.n != 0:
            raise ParameterError(
                f"coarse resolution {self.n} must divide fine resolution {self.n_fine}"
            )
        if self.replications < 1:
            raise ParameterError("need at least one replication")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        if not 0.0 <= self.sign_census_band < 0.5:
            raise ParameterError("sign census band must lie in [0, 0.5)")

    def sampler(self) -> VSamplerSpec:
        return self.v_sampler if self.v_sampler is not None else default_v_sampler(
            self.model
        )

    def to_dict(self) -> dict:
        return {
            "model": model_to_dict(self.model),
            "x0": self.x0,
            "n": self.n,
            "n_fine": self.n_fine,
            "replications": self.replications,
            "seed": self.seed,
            "v_sampler": _sampler_to_dict(self.sampler()),
            "policy": {
                "clamp_to_unit": self.policy.clamp_to_unit,
                "skip_boundary_samples": self.policy.skip_boundary_samples,
            },
            "workers": self.workers,
            "sign_census_band": self.sign_census_band,
            "v_reference_draws": self.v_reference_draws,
            "compensated_sums": self.compensated_sums,
        }

    def config_hash(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()

    @classmethod
    def from_dict(cls, spec: dict) -> "ExperimentConfig":
        kwargs = {"model": model_from_dict(spec["model"])}
        for key in (
            "x0",
            "n",
            "n_fine",
            "replications",
            "seed",
            "workers",
            "sign_census_band",
            "v_reference_draws",
            "compensated_sums",
        ):
            if key in spec:
                kwargs[key] = spec[key]
        if "v_sampler" in spec and spec["v_sampler"] is not None:
            kwargs["v_sampler"] = _sampler_from_dict(spec["v_sampler"])
        if "policy" in spec:
            kwargs["policy"] = RectifyPolicy(**spec["policy"])
        return cls(**kwargs)

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        try:
            import tomllib
        except ImportError:  # Python 3.10
            import tomli as tomllib
        with open(path, "rb") as f:
            return cls.from_dict(tomllib.load(f))


def _sampler_to_dict(spec: VSamplerSpec) -> dict:
    if isinstance(spec, BesselBrownian):
        return {"kind": "bessel", "locations": spec.locations}
    if isinstance(spec, StableNested):
        return {
            "kind": "nested",
            "alpha": spec.alpha,
            "beta": spec.beta,
            "scale": spec.scale,
            "fine_per_step": spec.fine_per_step,
            "steps": spec.steps,
        }
    return {"kind": "monotone", "model": model_to_dict(spec.model)}


def _sampler_from_dict(spec: dict) -> VSamplerSpec:
    kind = spec.get("kind")
    if kind == "bessel":
        return BesselBrownian(locations=int(spec.get("locations", 150)))
    if kind == "nested":
        return StableNested(
            alpha=float(spec["alpha"]),
            beta=float(spec["beta"]),
            scale=float(spec.get("scale", 1.0)),
            fine_per_step=int(spec.get("fine_per_step", 100)),
            steps=int(spec.get("steps", 100)),
        )
    if kind == "monotone":
        return Monotone(model_from_dict(spec["model"]))
    raise ParameterError(f"unknown v_sampler kind {kind!r}")


RECORD_COLUMNS = (
    "replication",
    "y_coarse",
    "y_fine",
    "y_reference",
    "delta",
    "rectified",
    "v_draw",
    "coarse_lower_total",
    "coarse_upper_total",
    "coarse_last_lower",
    "coarse_last_upper",
    "coarse_switches",
    "coarse_clean",
    "fine_lower_total",
    "fine_upper_total",
    "fine_last_lower",
    "fine_last_upper",
    "fine_switches",
    "fine_clean",
)

_INT_COLUMNS = {
    "replication",
    "coarse_last_lower",
    "coarse_last_upper",
    "coarse_switches",
    "coarse_clean",
    "fine_last_lower",
    "fine_last_upper",
    "fine_switches",
    "fine_clean",
}


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: dict
    aggregates: dict
    v_reference: np.ndarray

    def write_records_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(RECORD_COLUMNS)
            cols = []
            for name in RECORD_COLUMNS:
                arr = self.records[name]
                if name in _INT_COLUMNS:
                    cols.append([str(int(v)) for v in arr])
                else:
                    cols.append([repr(float(v)) for v in arr])
            writer.writerows(zip(*cols))

    def write_report_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.aggregates, f, indent=2, sort_keys=True)
            f.write("\n")


def _simulate_range(cfg: ExperimentConfig, lo: int, hi: int) -> dict:
    n_fine = cfg.n_fine
    m = n_fine // cfg.n
    backend = kernels.get_backend()
    count = hi - lo
    out = {
        "y_coarse": np.empty(count),
        "coarse_lower_total": np.empty(count),
        "coarse_upper_total": np.empty(count),
        "coarse_last_lower": np.empty(count, np.int64),
        "coarse_last_upper": np.empty(count, np.int64),
        "coarse_switches": np.empty(count, np.int64),
        "coarse_clean": np.empty(count, bool),
        "y_fine": np.empty(count),
        "fine_lower_total": np.empty(count),
        "fine_upper_total": np.empty(count),
        "fine_last_lower": np.empty(count, np.int64),
        "fine_last_upper": np.empty(count, np.int64),
        "fine_switches": np.empty(count, np.int64),
        "fine_clean": np.empty(count, bool),
        "walk_fine": np.empty(count),
        "walk_coarse": np.empty(count),
    }
    rows = max(1, min(count, 4_000_000 // max(1, n_fine)))
    for c0 in range(lo, hi, rows):
        c1 = min(hi, c0 + rows)
        xi = np.empty((c1 - c0, n_fine))
        for i in range(c0, c1):
            xi[i - c0] = sample_increments(
                cfg.model, n_fine, streams.substream(cfg.seed, i, streams.PATH)
            )
        sel = slice(c0 - lo, c1 - lo)
        fine = reflect_many(cfg.x0, xi, cfg.compensated_sums)
        coarse_xi = backend.block_sums(xi, m) if m > 1 else xi
        coarse = reflect_many(cfg.x0, coarse_xi, cfg.compensated_sums)
        out["y_fine"][sel] = fine["terminal"]
        out["fine_lower_total"][sel] = fine["lower_total"]
        out["fine_upper_total"][sel] = fine["upper_total"]
        out["fine_last_lower"][sel] = fine["last_lower"]
        out["fine_last_upper"][sel] = fine["last_upper"]
        out["fine_switches"][sel] = fine["switch_count"]
        out["fine_clean"][sel] = fine["clean_switching"]
        out["y_coarse"][sel] = coarse["terminal"]
        out["coarse_lower_total"][sel] = coarse["lower_total"]
        out["coarse_upper_total"][sel] = coarse["upper_total"]
        out["coarse_last_lower"][sel] = coarse["last_lower"]
        out["coarse_last_upper"][sel] = coarse["last_upper"]
        out["coarse_switches"][sel] = coarse["switch_count"]
        out["coarse_clean"][sel] = coarse["clean_switching"]
        out["walk_fine"][sel] = xi.sum(axis=1)
        out["walk_coarse"][sel] = coarse_xi.sum(axis=1)
    out["v_draw"] = sample_v_batch(
        cfg.sampler(), count, cfg.seed, streams.V_DRAW, start=lo
    )
    return out


def _parallel_records(cfg: ExperimentConfig) -> dict:
    total = cfg.replications
    if cfg.workers == 1:
        return _simulate_range(cfg, 0, total)
    bounds = np.linspace(0, total, cfg.workers * 2 + 1).astype(int)
    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=cfg.workers, mp_context=ctx) as pool:
        parts = list(
            pool.map(
                _simulate_range,
                [cfg] * (len(bounds) - 1),
                bounds[:-1],
                bounds[1:],
            )
        )
    return {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}


def _masked_ks(sample, reference):
    if sample.size == 0 or reference.size == 0:
        return None
    return ks_two_sample(sample, reference)


def run_error_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Coupled coarse/fine error study with rectification comparison."""
    alpha_hat, beta_hat = zoom_limit_params(cfg.model)
    if alpha_hat <= 1.0:
        raise ParameterError(
            "the error experiment needs a finite limit mean "
            "(self-similarity index above 1); got a monotone/drift-type model"
        )
    rec = _parallel_records(cfg)
    ev = expected_v(alpha_hat, beta_hat)
    a_n = small_time_scaling(cfg.model, 1.0 / cfg.n)
    a_f = small_time_scaling(cfg.model, 1.0 / cfg.n_fine)

    side_c = barrier_side(rec["coarse_last_lower"], rec["coarse_last_upper"])
    side_f = barrier_side(rec["fine_last_lower"], rec["fine_last_upper"])
    reference = rec["y_fine"] + a_f * ev * side_f
    delta = reference - rec["y_coarse"]
    rectified = apply_rectification(
        rec["y_coarse"],
        rec["coarse_last_lower"],
        rec["coarse_last_upper"],
        a_n,
        rec["v_draw"],
        cfg.policy,
    )
    rec["y_reference"] = reference
    rec["delta"] = delta
    rec["rectified"] = rectified
    rec["replication"] = np.arange(cfg.replications, dtype=np.int64)

    n_ref = cfg.v_reference_draws or cfg.replications
    v_ref = sample_v_batch(
        cfg.sampler(), n_ref, cfg.seed, streams.V_REFERENCE, workers=cfg.workers
    )

    delta_norm = delta / a_n
    mask_lo = side_c == 1.0
    mask_hi = side_c == -1.0
    mask_lo_adj = mask_lo & (side_f == 1.0)
    mask_hi_adj = mask_hi & (side_f == -1.0)

    # Regulator accumulation: sharpen the fine regulators by the expected
    # per-switch error before differencing against the coarse ones.
    sw_f = rec["fine_switches"].astype(float)
    low_corr = np.where(side_f == 1.0, sw_f, np.where(side_f == -1.0, sw_f - 1.0, 0.0))
    up_corr = np.where(side_f == -1.0, sw_f, np.where(side_f == 1.0, sw_f - 1.0, 0.0))
    l_err_norm = (rec["fine_lower_total"] + a_f * ev * low_corr - rec["coarse_lower_total"]) / a_n
    u_err_norm = (rec["fine_upper_total"] + a_f * ev * up_corr - rec["coarse_upper_total"]) / a_n

    # Two conditionings for the switch-count table: on the coarse-grid event
    # (switch count and last barrier read off the coarse skeleton) and on its
    # continuous-time proxy read off the fine skeleton.  The two events have
    # vanishing symmetric difference as the grid refines; at finite n the
    # coarse event is contaminated by switches the coarse grid missed.
    regulators = {}
    for cond_name, cond_side, cond_sw in (
        ("coarse_conditioned", side_c, rec["coarse_switches"]),
        ("fine_conditioned", side_f, rec["fine_switches"]),
    ):
        tables = {}
        for side_name, side_val in (("lower_last", 1.0), ("upper_last", -1.0)):
            rows = {}
            for k in range(1, 5):
                mask = (cond_side == side_val) & (cond_sw == k)
                cnt = int(mask.sum())
                exp_l = (k if side_val == 1.0 else k - 1) * ev
                exp_u = (k - 1 if side_val == 1.0 else k) * ev
                rows[str(k)] = {
                    "count": cnt,
                    "lower_err_mean": float(l_err_norm[mask].mean()) if cnt else None,
                    "lower_err_expected": exp_l,
                    "upper_err_mean": float(u_err_norm[mask].mean()) if cnt else None,
                    "upper_err_expected": exp_u,
                }
            tables[side_name] = rows
        regulators[cond_name] = tables

    band = cfg.sign_census_band
    census_sel = (side_c == side_f) & (side_c != 0.0)
    census_sel &= (rec["y_fine"] > band) & (rec["y_fine"] < 1.0 - band)
    census_count = int(census_sel.sum())
    census_match = (
        float((np.sign(delta[census_sel]) == side_c[census_sel]).mean())
        if census_count
        else None
    )

    walk_scale = np.maximum(1.0, np.abs(rec["walk_fine"]))
    coupling = float(np.max(np.abs(rec["walk_fine"] - rec["walk_coarse"]) / walk_scale))

    aggregates = {
        "provenance": {
            "config": cfg.to_dict(),
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
            "version": _pkg_version,
            "kernel_backend": kernels.get_backend().name,
        },
        "moments": {
            "expected_v_standard": ev,
            "scaling_coarse": a_n,
            "scaling_fine": a_f,
            "shift_constant": a_f * ev,
        },
        "fractions": {
            "fine_lower_last": float(np.mean(side_f == 1.0)),
            "fine_upper_last": float(np.mean(side_f == -1.0)),
            "coarse_lower_last": float(np.mean(mask_lo)),
            "coarse_upper_last": float(np.mean(mask_hi)),
            "coarse_untouched": float(np.mean(side_c == 0.0)),
            "barrier_disagreement": float(np.mean(mask_lo != (side_f == 1.0))),
            "coarse_boundary": float(
                np.mean((rec["y_coarse"] == 0.0) | (rec["y_coarse"] == 1.0))
            ),
            "rectified_out_of_range": float(
                np.mean((rectified < 0.0) | (rectified > 1.0))
            ),
            "fine_clean": float(np.mean(rec["fine_clean"])),
            "coarse_clean": float(np.mean(rec["coarse_clean"])),
        },
        "ks": {
            "delta_vs_v_lower": _masked_ks(delta_norm[mask_lo], v_ref),
            "delta_vs_v_lower_adjusted": _masked_ks(delta_norm[mask_lo_adj], v_ref),
            "delta_vs_v_upper": _masked_ks(-delta_norm[mask_hi], v_ref),
            "delta_vs_v_upper_adjusted": _masked_ks(-delta_norm[mask_hi_adj], v_ref),
            "raw_vs_reference": ks_two_sample(rec["y_coarse"], reference),
            "rectified_vs_reference": ks_two_sample(rectified, reference),
        },
        "regulators": regulators,
        "sign_census": {
            "band": band,
            "count": census_count,
            "match_fraction": census_match,
        },
        "coupling_max_rel_diff": coupling,
        "summaries": {
            "raw": mc_summary(rec["y_coarse"]).to_dict(),
            "reference": mc_summary(reference).to_dict(),
            "rectified": mc_summary(rectified).to_dict(),
            "delta_norm_lower_adjusted": (
                mc_summary(delta_norm[mask_lo_adj]).to_dict()
                if int(mask_lo_adj.sum()) > 1
                else None
            ),
        },
    }
    return ExperimentReport(
        config=cfg, records=rec, aggregates=aggregates, v_reference=v_ref
    )


# ---------------------------------------------------------------------------
# Gap-law study: densities and moment comparisons over (alpha, beta) cells.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VStudyConfig:
    cells: tuple = ((2.0, 0.0), (1.5, 0.0), (1.5, 0.5), (1.5, -0.5))
    replications: int = 50000
    fine_per_step: int = 100
    steps: int = 100
    locations: int = 150
    seed: int = 0
    workers: int = 1
    kde_points: int = 512
    grid_quantiles: tuple = (0.01, 0.99)

    def __post_init__(self):
        if self.replications < 2:
            raise ParameterError("need at least two replications")
        for alpha, beta in self.cells:
            if alpha != 2.0:
                StableNested(alpha, beta, 1.0, self.fine_per_step, self.steps)


def _cell_spec(cfg: VStudyConfig, alpha: float, beta: float) -> VSamplerSpec:
    if alpha == 2.0:
        return BesselBrownian(cfg.locations)
    return StableNested(alpha, beta, 1.0, cfg.fine_per_step, cfg.steps)


def run_v_study(cfg: VStudyConfig, out_dir=None) -> dict:
    """Per-cell KDE grids plus a moment-comparison table.

    Returns the table; when `out_dir` is given also writes one density CSV
    per cell (columns v,density) and the table as v_moments.json.
    """
    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
    table = {"cells": [], "sign_flip_ks": []}
    draws_by_cell = {}
    for idx, (alpha, beta) in enumerate(cfg.cells):
        spec = _cell_spec(cfg, alpha, beta)
        draws = sample_v_batch(
            spec,
            cfg.replications,
            cfg.seed,
            streams.STANDALONE,
            start=idx * cfg.replications,
            workers=cfg.workers,
        )
        draws_by_cell[(alpha, beta)] = draws
        qlo, qhi = np.quantile(draws, cfg.grid_quantiles)
        if qhi <= qlo:
            qhi = qlo + 1e-12
        grid = np.linspace(qlo, qhi, cfg.kde_points)
        density = kde_gaussian(draws, grid=grid)
        row = {
            "alpha": alpha,
            "beta": beta,
            "count": int(draws.size),
            "mc_mean": float(draws.mean()),
            "mc_median": float(np.median(draws)),
        }
        if alpha > 1.0:
            row["expected_v"] = expected_v(alpha, beta)
            if alpha < 2.0:
                row["expected_vn"] = expected_vn(alpha, beta, cfg.steps)
                row["nested_mean_gap"] = row["expected_v"] - row["expected_vn"]
        table["cells"].append(row)
        if out_path is not None:
            name = f"v_density_alpha{alpha:g}_beta{beta:g}.csv"
            with open(out_path / name, "w", newline="") as f:
                writer = csv.writer(f)
                writer.writerow(("v", "density"))
                for p, v in zip(density.points, density.values):
                    writer.writerow((repr(float(p)), repr(float(v))))
    seen = set()
    for alpha, beta in cfg.cells:
        if beta == 0 or (alpha, abs(beta)) in seen:
            continue
        if (alpha, -beta) in draws_by_cell:
            seen.add((alpha, abs(beta)))
            a = draws_by_cell[(alpha, beta)]
            b = draws_by_cell[(alpha, -beta)]
            table["sign_flip_ks"].append(
                {
                    "alpha": alpha,
                    "beta": abs(beta),
                    "ks": ks_two_sample(a, b),
                    "critical_1pct": ks_critical_value(a.size, b.size, 0.01),
                }
            )
    if out_path is not None:
        with open(out_path / "v_moments.json", "w") as f:
            json.dump(table, f, indent=2, sort_keys=True)
            f.write("\n")
    return table
