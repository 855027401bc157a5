"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s`.  Criterion 5 is asserted
at its stated tolerance even though the finite-resolution law at n=100
sits further from the limit than the bound allows; see the README notes.
"""

import filecmp
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from reflectsim import (
    BesselBrownian,
    StableNested,
    expected_v,
    expected_vn,
    ks_critical_value,
    ks_two_sample,
    reflect_many,
    sample_v_batch,
)
from reflectsim.cli import main as cli_main
from reflectsim import substream


def _criterion(num, description, ok, detail):
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] criterion {num}: {description} ({detail})")
    assert ok, f"criterion {num}: {description} ({detail})"


def test_criterion_1_barrier_split_fraction(section4_report):
    frac = section4_report.aggregates["fractions"]["fine_lower_last"]
    coarse = section4_report.aggregates["fractions"]["coarse_lower_last"]
    _criterion(
        1,
        "fine-path lower-barrier-last fraction in [0.57, 0.63]",
        0.57 <= frac <= 0.63,
        f"fine={frac:.4f}, coarse={coarse:.4f}",
    )


def test_criterion_2_shift_constant(tmp_path):
    cfg = tmp_path / "model.toml"
    cfg.write_text('model = { kind = "brownian", mu = -0.5, sigma2 = 2.0 }\n')
    res = CliRunner().invoke(
        cli_main,
        ["moments", "--config", str(cfg), "--shift-n", "50000"],
    )
    assert res.exit_code == 0, res.output
    shift = json.loads(res.output)["shift_constant"]
    _criterion(
        2,
        "moments CLI prints scaling(1/50000) * E V = 0.003684 +- 1e-4",
        abs(shift - 0.003684) <= 1e-4,
        f"shift_constant={shift:.7f}",
    )


def test_criterion_3_brownian_gap_mean():
    draws = sample_v_batch(BesselBrownian(150), 100000, seed=777, workers=2)
    mean = float(draws.mean())
    _criterion(
        3,
        "mean of 1e5 Bessel-construction draws within 0.01 of 0.58258",
        abs(mean - 0.58258) < 0.01,
        f"mean={mean:.5f}",
    )


def test_criterion_4_rectification_improves_fit(section4_report):
    ks = section4_report.aggregates["ks"]
    raw = ks["raw_vs_reference"]
    rect = ks["rectified_vs_reference"]
    _criterion(
        4,
        "KS(rectified, reference) < KS(raw, reference) and <= 0.03",
        rect < raw and rect <= 0.03,
        f"raw={raw:.4f}, rectified={rect:.4f}",
    )


def test_criterion_5_conditional_error_law(section4_fine_report):
    ks = section4_fine_report.aggregates["ks"]["delta_vs_v_lower_adjusted"]
    _criterion(
        5,
        "KS of adjusted normalized error vs 2e4 gap draws <= 0.05 at n=100",
        ks <= 0.05,
        f"ks={ks:.4f}; the finite-n conditional law at n=100 sits ~0.08 from "
        f"the limit (drops below 0.05 only for n >~ 400, see README)",
    )


def test_criterion_6_regulator_accumulation(regulator_report):
    ev = expected_v(2.0, 0.0)
    table = regulator_report.aggregates["regulators"]["fine_conditioned"]["lower_last"]
    details = []
    ok = True
    for k in (1, 2, 3):
        row = table[str(k)]
        ratio = row["lower_err_mean"] / (k * ev)
        details.append(f"k={k}: {row['lower_err_mean']:.4f}/{k * ev:.4f}={ratio:.3f}")
        ok &= abs(ratio - 1.0) <= 0.10
    _criterion(
        6,
        "conditional mean lower-regulator error within 10% of k * 0.58258",
        ok,
        "; ".join(details),
    )


def test_criterion_7_spitzer_formula():
    alpha, beta, m, n = 1.5, 0.0, 100, 100
    reps = 1_000_000
    draws = sample_v_batch(StableNested(alpha, beta, 1.0, m, n), reps, seed=424242, workers=2)
    mc = float(draws.mean())
    ev = expected_v(alpha, beta)
    evn = expected_vn(alpha, beta, n)
    gap = ev - evn
    fine_term = m ** (-1.0 / alpha) * expected_vn(alpha, beta, m * n)
    corrected = mc + gap
    _criterion(
        7,
        "gap-corrected nested-grid mean within 5% of E V = 0.830",
        abs(corrected - ev) <= 0.05 * ev,
        f"mc={mc:.5f}, E V_n={evn:.5f}, gap={gap:.5f}, corrected={corrected:.5f}, "
        f"fine-grid term (ignored in target)={fine_term:.5f}",
    )


def test_criterion_8_sign_symmetry_and_scale_equivariance():
    a = sample_v_batch(StableNested(1.2, 0.5, 1.0, 100, 100), 50000, seed=300, workers=2)
    b = sample_v_batch(StableNested(1.2, -0.5, 1.0, 100, 100), 50000, seed=301, workers=2)
    ks = ks_two_sample(a, b)
    crit = ks_critical_value(50000, 50000, 0.01)
    base = sample_v_batch(StableNested(1.2, 0.5, 1.0, 100, 100), 200, seed=42)
    scaled = sample_v_batch(StableNested(1.2, 0.5, 3.7, 100, 100), 200, seed=42)
    doubled = sample_v_batch(StableNested(1.2, 0.5, 3.0, 100, 100), 200, seed=42)
    halfbase = sample_v_batch(StableNested(1.2, 0.5, 1.5, 100, 100), 200, seed=42)
    exact = np.array_equal(scaled, 3.7 * base) and np.array_equal(doubled, 2.0 * halfbase)
    _criterion(
        8,
        "skewness-flip KS below the 1% critical value; scale factors out bit-exactly",
        ks < min(crit, 0.0103) and exact,
        f"ks={ks:.5f} vs {crit:.5f}, bit-exact={exact}",
    )


def test_criterion_9_skorokhod_invariant_suite():
    g = substream(20260809, 0)
    total = 0
    ok_identity = ok_relations = ok_mirror = True
    for x0 in (0.0, 0.3, 0.77, 1.0):
        xi = g.standard_normal((2500, 200)) * 0.5
        res = reflect_many(x0, xi)
        mirrored = reflect_many(1.0 - x0, -xi)
        walks = x0 + xi.sum(axis=1) + res["lower_total"] - res["upper_total"]
        ok_identity &= bool(np.all(np.abs(walks - res["terminal"]) <= 1e-12))
        untouched = res["switch_count"] == 0
        ok_relations &= bool(
            np.array_equal(untouched, (res["last_lower"] == 0) & (res["last_upper"] == 0))
        )
        ok_relations &= bool(
            np.all(res["last_lower"][~untouched] != res["last_upper"][~untouched])
        )
        ok_mirror &= bool(
            np.all(np.abs(mirrored["terminal"] - (1.0 - res["terminal"])) <= 1e-12)
            and np.all(np.abs(mirrored["lower_total"] - res["upper_total"]) <= 1e-12)
            and np.all(np.abs(mirrored["upper_total"] - res["lower_total"]) <= 1e-12)
            and np.array_equal(mirrored["last_lower"], res["last_upper"])
            and np.array_equal(mirrored["last_upper"], res["last_lower"])
            and np.array_equal(mirrored["switch_count"], res["switch_count"])
        )
        total += xi.shape[0]
    # complementarity checked path-wise on a subsample
    from reflectsim import SkeletonPath, reflect_two_sided

    ok_compl = True
    for i in range(300):
        xi = g.standard_normal(200) * 0.5
        out = reflect_two_sided(0.4, SkeletonPath(200, xi), keep_paths=True)
        dl = np.diff(out.lower_path)
        du = np.diff(out.upper_path)
        ok_compl &= bool(
            np.all(dl >= 0)
            and np.all(du >= 0)
            and np.all(out.positions[1:][dl > 0] == 0.0)
            and np.all(out.positions[1:][du > 0] == 1.0)
            and not np.any((dl > 0) & (du > 0))
        )
    ok = ok_identity and ok_relations and ok_mirror and ok_compl
    _criterion(
        9,
        "reflection identity, complementarity, and mirror equivariance on 1e4 instances",
        ok,
        f"instances={total}, identity={ok_identity}, relations={ok_relations}, "
        f"mirror={ok_mirror}, complementarity={ok_compl}",
    )


def test_criterion_10_worker_determinism(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(
        'model = { kind = "brownian", mu = -0.5, sigma2 = 2.0 }\n'
        "x0 = 0.3\nn = 100\nn_fine = 10000\nreplications = 20000\nseed = 20260810\n"
    )
    runner = CliRunner()
    for workers, sub in ((1, "a"), (8, "b")):
        res = runner.invoke(
            cli_main,
            [
                "simulate",
                "--config",
                str(cfg),
                "--workers",
                str(workers),
                "--out",
                str(tmp_path / sub),
            ],
        )
        assert res.exit_code == 0, res.output
    identical = filecmp.cmp(
        tmp_path / "a" / "records.csv", tmp_path / "b" / "records.csv", shallow=False
    )
    _criterion(
        10,
        "records.csv byte-identical for workers=1 vs workers=8",
        identical,
        f"bytes={'equal' if identical else 'DIFFER'}",
    )
