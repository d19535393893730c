"""CLI and harness: fits, schemas, determinism, subcommands."""

import json

import pytest

from starfree.cli import (
    ExperimentConfig,
    fit_exponent,
    main,
    run_certification,
    run_lin2_game,
    run_scaling,
    validate_summary,
)

# ---------------------------------------------------------------------------
# fit_exponent
# ---------------------------------------------------------------------------


def test_fit_linear():
    pts = [(n, float(n)) for n in (10, 100, 1000, 10000)]
    slope, intercept, r2 = fit_exponent(pts)
    assert abs(slope - 1.0) < 1e-12
    assert abs(r2 - 1.0) < 1e-12


def test_fit_exact_cube_root():
    pts = [(n, 7.0 * n ** (1.0 / 3)) for n in (64, 512, 4096, 32768)]
    slope, intercept, r2 = fit_exponent(pts)
    assert abs(slope - 1.0 / 3) < 1e-12
    assert abs(r2 - 1.0) < 1e-9


def test_fit_noisy_synthetic():
    import random

    rng = random.Random(0)
    pts = [
        (n, n**0.43 * (1.0 + 0.05 * (2 * rng.random() - 1)))
        for n in (2**10, 2**11, 2**12, 2**13, 2**14, 2**15)
    ]
    slope, _, _ = fit_exponent(pts)
    assert abs(slope - 0.43) < 0.03


def test_fit_validation():
    with pytest.raises(ValueError):
        fit_exponent([(10, 1.0), (20, 2.0), (30, 3.0)])
    with pytest.raises(ValueError):
        fit_exponent([(10, 1.0), (20, 2.0), (30, 0.0), (40, 3.0)])


def test_config_grid_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(n_grid=(4096, 2048, 1024, 512))


# ---------------------------------------------------------------------------
# run_scaling
# ---------------------------------------------------------------------------


def small_config(**kw):
    base = dict(
        problem="h-freeness",
        k=2,
        eps="0.05",
        n_grid=(256, 512, 1024, 2048),
        trials=3,
        seed=1,
        repetition_multiplier=25,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_scaling_summary_schema():
    result = run_scaling(small_config())
    summary = result.summary_obj()
    validate_summary(summary)
    assert summary["fit"]["slope"] > 0
    assert len(summary["points"]) == 4


def test_run_scaling_deterministic():
    a = run_scaling(small_config())
    b = run_scaling(small_config())
    assert a.rows == b.rows
    assert json.dumps(a.summary_obj(), sort_keys=True) == json.dumps(
        b.summary_obj(), sort_keys=True
    )


def test_run_scaling_records_generator_errors():
    # no room for planted copies at the smallest grid point: error recorded,
    # fit computed over the remaining points
    cfg = small_config(eps="0.05", n_grid=(4, 512, 1024, 2048, 4096))
    result = run_scaling(cfg)
    assert result.points[0]["error"] is not None
    assert all(pt["error"] is None for pt in result.points[1:])
    assert result.fit  # fit computed over the remaining points


def test_validate_summary_rejects_malformed():
    with pytest.raises(ValueError):
        validate_summary({"config": {}, "points": [], "fit": {}})


# ---------------------------------------------------------------------------
# CLI end to end
# ---------------------------------------------------------------------------


def test_cli_scale_byte_identical_reruns(tmp_path):
    args = [
        "scale",
        "--k", "2",
        "--n-grid", "256,512,1024,2048",
        "--trials", "2",
        "--seed", "3",
        "--rep-mult", "25",
        "--tag", "run",
    ]
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    assert (out1 / "run.csv").read_bytes() == (out2 / "run.csv").read_bytes()
    assert (out1 / "run.json").read_bytes() == (out2 / "run.json").read_bytes()


def test_cli_scale_csv_schema(tmp_path):
    assert (
        main(
            [
                "scale",
                "--k", "2",
                "--n-grid", "256,512,1024,2048",
                "--trials", "2",
                "--rep-mult", "25",
                "--out", str(tmp_path),
                "--tag", "t",
            ]
        )
        == 0
    )
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "n,trial,verdict,q_classical,q_charged,seed"
    assert all(len(ln.split(",")) == 6 for ln in lines[1:])


def test_cli_certify(tmp_path):
    assert main(["certify", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "certification.json").read_text())
    assert report["summary"]["all_pass"]
    names = {c["name"] for c in report["checks"]}
    assert {"l1_unit", "total_zero", "sign_masses_half", "block_l1_unit"} <= names
    obs = {o["name"] for o in report["observations"]}
    assert "phd_growth_exponent" in obs


def test_cli_lin2_game(tmp_path):
    assert main(["lin2-game", "--n", "10", "--far-seeds", "20", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "lin2_game.json").read_text())
    assert report["pass"]
    assert report["game"]["advantage"]["num"] == "0"


def test_cli_gen_roundtrip(tmp_path):
    from starfree.digraph import BoundedOutDigraph
    from starfree.instances import IntegerSequence
    from starfree.lin2 import Lin2System

    out = tmp_path / "g.txt"
    assert main(["gen", "--kind", "far-graph", "--n", "120", "--k", "2",
                 "--eps", "0.05", "--out", str(out)]) == 0
    g = BoundedOutDigraph.from_text(out.read_text())
    assert g.n == 120

    out2 = tmp_path / "s.json"
    assert main(["gen", "--kind", "collision-far", "--n", "64", "--k", "2",
                 "--eps", "0.1", "--format", "json", "--out", str(out2)]) == 0
    s = IntegerSequence.from_json(out2.read_text())
    assert s.n == 64

    out3 = tmp_path / "l.txt"
    assert main(["gen", "--kind", "lin2-yes", "--n", "9", "--c", "2",
                 "--out", str(out3)]) == 0
    inst = Lin2System.from_text(out3.read_text())
    assert inst.n == 9


def test_run_scaling_other_problems():
    for problem in ("h-freeness-classical", "collision"):
        cfg = small_config(problem=problem, trials=2)
        result = run_scaling(cfg)
        assert result.fit["slope"] > 0
        assert all(pt["error"] is None for pt in result.points)


def test_outdir_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("STARFREE_OUTDIR", str(tmp_path / "envout"))
    assert main(["lin2-game", "--n", "10", "--far-seeds", "5"]) == 0
    assert (tmp_path / "envout" / "lin2_game.json").exists()


def test_run_lin2_game_report():
    report = run_lin2_game(n=10, far_seeds=12, seed=2)
    assert report["pass"]
    assert report["yes_satisfiable"]
    assert report["marginals"]["pass"]


def test_run_certification_observations_report_values():
    report = run_certification(
        nk_grid=((8, 2), (16, 2)),
        coupling=((2, 24),),
        phd_grid=(16, 32, 64, 128),
    )
    assert report["summary"]["all_pass"]
    phd_obs = next(o for o in report["observations"] if o["name"] == "phd_growth_exponent")
    assert len(phd_obs["measured"]) == 4
