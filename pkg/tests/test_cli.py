"""End-to-end harness tests: every subcommand, exit codes, determinism."""

import numpy as np
import pytest

import helpers
from pbpqlp import SpectrumSpec, cli, load_pgm


def run(tmp_path, *argv):
    return helpers.run_cli(list(argv))


class TestRuntime:
    def test_rows_and_positive_times(self, tmp_path):
        out = tmp_path / "rt.dsv"
        code = helpers.run_cli(
            [
                "runtime",
                "--matrix",
                "lowrank",
                "--n",
                "96,128",
                "--d",
                "frac:0.2",
                "--q",
                "0,1",
                "--trials",
                "2",
                "--out",
                out,
            ]
        )
        assert code == 0
        _, header, rows = helpers.read_table(out)
        assert len(rows) == 2 * 1 * 2 * 3  # n values x d x q values x algorithms
        for row in rows:
            assert row["median_ns"] > 0
            assert row["mean_ns"] > 0
            assert row["trials"] == 2
        fracs = {row["d"] for row in rows}
        assert fracs == {round(0.2 * 96), round(0.2 * 128)}


class TestSpectrum:
    def test_exact_series_matches_planted_spectrum(self, tmp_path):
        out = tmp_path / "sp.dsv"
        code = helpers.run_cli(
            [
                "spectrum",
                "--matrix",
                "fast",
                "--n",
                "150",
                "--d",
                "25",
                "--alg",
                "svd",
                "--out",
                out,
            ]
        )
        assert code == 0
        _, _, rows = helpers.read_table(out)
        reference = SpectrumSpec.parse("fast", n=150, seed=0).reference_spectrum()
        assert len(rows) == 25
        for row in rows:
            assert row["value"] == pytest.approx(
                reference[row["index"] - 1], abs=1e-10
            )

    def test_first_stage_diagonal_series(self, tmp_path):
        out = tmp_path / "sp.dsv"
        code = helpers.run_cli(
            [
                "spectrum",
                "--matrix",
                "lowrank",
                "--n",
                "120",
                "--d",
                "15",
                "--alg",
                "pbp_qlp,r_values",
                "--q",
                "1",
                "--out",
                out,
            ]
        )
        assert code == 0
        _, _, rows = helpers.read_table(out)
        split = {row["alg"] for row in rows}
        assert split == {"pbp_qlp", "r_values"}
        assert len(rows) == 30

    def test_stair_steps_resolved_with_power_iterations(self, tmp_path):
        out = tmp_path / "sp.dsv"
        code = helpers.run_cli(
            [
                "spectrum",
                "--matrix",
                "stairs",
                "--n",
                "300",
                "--d",
                "45",
                "--alg",
                "pbp_qlp",
                "--q",
                "2",
                "--out",
                out,
            ]
        )
        assert code == 0
        _, _, rows = helpers.read_table(out)
        values = np.array(
            [row["value"] for row in sorted(rows, key=lambda r: r["index"])]
        )
        reference = SpectrumSpec.parse("stairs", n=300, seed=0).reference_spectrum()
        for step in range(3):
            block = values[step * 15 : (step + 1) * 15]
            level = reference[step * 15]
            assert np.median(block) == pytest.approx(level, rel=0.01)
            spread = (block.max() - block.min()) / np.median(block)
            assert spread <= 0.10


class TestLowrank:
    def test_svd_curve_hits_optimal_error(self, tmp_path):
        out = tmp_path / "lr.dsv"
        code = helpers.run_cli(
            [
                "lowrank",
                "--matrix",
                "fast",
                "--n",
                "150",
                "--d",
                "10,20,40",
                "--alg",
                "svd",
                "--out",
                out,
            ]
        )
        assert code == 0
        _, _, rows = helpers.read_table(out)
        reference = SpectrumSpec.parse("fast", n=150, seed=0).reference_spectrum()
        spectral = [r for r in rows if r["metric"] == "spectral_error"]
        assert len(spectral) == 3
        for row in spectral:
            assert row["value"] == pytest.approx(reference[row["d"]], abs=1e-10)

    def test_missing_d_is_usage_error(self, tmp_path, capsys):
        code = helpers.run_cli(
            ["lowrank", "--matrix", "fast", "--n", "50", "--out", tmp_path / "x.dsv"]
        )
        assert code == 2
        assert "--d is required" in capsys.readouterr().err


class TestImage:
    def test_artifacts_and_errors(self, tmp_path, photo_path):
        out = tmp_path / "im.dsv"
        original_bytes = photo_path.read_bytes()
        code = helpers.run_cli(
            [
                "image",
                "--matrix",
                f"image:{photo_path}",
                "--k",
                "10,40,80",
                "--alg",
                "svd,pbp_qlp",
                "--q",
                "2",
                "--out",
                out,
            ]
        )
        assert code == 0
        assert photo_path.read_bytes() == original_bytes
        _, _, rows = helpers.read_table(out)
        frob = {
            (r["alg"], r["d"]): r["value"]
            for r in rows
            if r["metric"] == "frobenius_error"
        }
        # montone improvement with rank, and the randomized run stays close
        assert frob[("svd", 10)] > frob[("svd", 40)] > frob[("svd", 80)]
        assert frob[("pbp_qlp", 80)] <= 1.2 * frob[("svd", 80)]
        original = load_pgm(photo_path)
        for row in rows:
            artifact = out.parent / row["artifact"]
            assert artifact.exists()
            recon = load_pgm(artifact)
            assert recon.shape == original.shape
            assert recon.min() >= 0.0 and recon.max() <= 1.0

    def test_full_rank_reconstruction_within_quantization(self, tmp_path, photo_path):
        out = tmp_path / "im.dsv"
        original = load_pgm(photo_path)
        limit = min(original.shape)
        code = helpers.run_cli(
            [
                "image",
                "--matrix",
                f"image:{photo_path}",
                "--k",
                str(limit),
                "--alg",
                "svd",
                "--out",
                out,
            ]
        )
        assert code == 0
        _, _, rows = helpers.read_table(out)
        artifact = out.parent / rows[0]["artifact"]
        written = load_pgm(artifact)
        quantization = np.sqrt(original.size) / 255.0
        assert float(np.linalg.norm(written - original)) <= quantization
        frob = [r["value"] for r in rows if r["metric"] == "frobenius_error"]
        assert frob[0] <= 1e-9

    def test_missing_file_is_input_error(self, tmp_path, capsys):
        code = helpers.run_cli(
            ["image", "--matrix", "image:/nonexistent/x.pgm", "--out", tmp_path / "im.dsv"]
        )
        assert code == 3


class TestNormRatio:
    def test_default_families_and_algorithms(self, tmp_path):
        out = tmp_path / "nr.dsv"
        code = helpers.run_cli(
            ["norm-ratio", "--matrix", "hansen:baart,foxgood", "--n", "200", "--out", out]
        )
        assert code == 0
        _, _, rows = helpers.read_table(out)
        # 2 matrices x (cpqr + pqlp once, pbp_qlp at q=0 and q=2)
        assert len(rows) == 2 * 4
        for row in rows:
            assert 0.0 <= row["value"] <= 1.0 + 1e-9
        best = [
            r["value"] for r in rows if r["alg"] == "pbp_qlp" and r["q"] == 2
        ]
        assert all(v > 0.95 for v in best)
        pivot = [r["value"] for r in rows if r["alg"] == "cpqr"]
        assert all(v < 0.5 for v in pivot)


class TestVerifyBounds:
    def test_exact_rank_matrix_passes(self, tmp_path):
        out = tmp_path / "vb.dsv"
        code = helpers.run_cli(
            [
                "verify-bounds",
                "--matrix",
                "lowrank:k=10,mu=0.0",
                "--n",
                "80",
                "--k",
                "10",
                "--d",
                "16",
                "--trials",
                "10",
                "--q",
                "0,1",
                "--out",
                out,
            ]
        )
        assert code == 0
        _, header, rows = helpers.read_table(out)
        assert header[:5] == ["bound", "lhs", "rhs", "slack", "satisfied"]
        strict_rows = [r for r in rows if r["strict"] == 1]
        assert strict_rows and all(r["satisfied"] == 1 for r in strict_rows)

    def test_corrupted_factors_fail_with_named_bound(self, tmp_path, monkeypatch, capsys):
        def corrupt(factors):
            import dataclasses

            bad = factors.l.copy()
            bad[: bad.shape[0] // 2] *= 0.05
            return dataclasses.replace(factors, l=bad)

        monkeypatch.setattr(cli, "_FACTOR_HOOK", corrupt)
        code = helpers.run_cli(
            [
                "verify-bounds",
                "--matrix",
                "lowrank",
                "--n",
                "100",
                "--k",
                "20",
                "--d",
                "30",
                "--trials",
                "3",
                "--out",
                tmp_path / "vb.dsv",
            ]
        )
        assert code == 1
        err = capsys.readouterr().err
        assert "bound violation" in err
        assert "rank_sigma_bracket_upper" in err

    def test_other_algorithms_rejected(self, tmp_path, capsys):
        code = helpers.run_cli(
            [
                "verify-bounds",
                "--matrix",
                "lowrank",
                "--n",
                "60",
                "--alg",
                "r_svd",
                "--out",
                tmp_path / "vb.dsv",
            ]
        )
        assert code == 2


class TestSharedBehavior:
    def test_identical_runs_are_byte_identical(self, tmp_path):
        args = [
            "spectrum",
            "--matrix",
            "lowrank",
            "--n",
            "100",
            "--d",
            "12",
            "--alg",
            "pbp_qlp,svd",
            "--q",
            "0,1",
            "--seed",
            "5",
        ]
        a, b = tmp_path / "a.dsv", tmp_path / "b.dsv"
        assert helpers.run_cli(args + ["--out", a]) == 0
        assert helpers.run_cli(args + ["--out", b]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_supplies_flags(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text(
            "# spectrum settings\nmatrix = lowrank\nn = 90\nd = 10\nalg = svd\n"
        )
        out = tmp_path / "sp.dsv"
        code = helpers.run_cli(["spectrum", "--config", config, "--out", out])
        assert code == 0
        comment, _, rows = helpers.read_table(out)
        assert len(rows) == 10
        assert "n=90" in comment

    def test_flags_override_config(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("matrix = lowrank\nn = 90\nd = 10\nalg = svd\n")
        out = tmp_path / "sp.dsv"
        code = helpers.run_cli(
            ["spectrum", "--config", config, "--d", "4", "--out", out]
        )
        assert code == 0
        _, _, rows = helpers.read_table(out)
        assert len(rows) == 4

    def test_unknown_config_key_is_usage_error(self, tmp_path, capsys):
        config = tmp_path / "run.cfg"
        config.write_text("matrxi = lowrank\n")
        code = helpers.run_cli(["spectrum", "--config", config])
        assert code == 2
        assert "unknown config key" in capsys.readouterr().err

    def test_memory_cap_refusal(self, tmp_path, capsys):
        code = helpers.run_cli(
            [
                "spectrum",
                "--matrix",
                "lowrank",
                "--n",
                "500",
                "--mem-cap",
                "1000000",
                "--out",
                tmp_path / "x.dsv",
            ]
        )
        assert code == 4
        err = capsys.readouterr().err
        assert "memory cap" in err
        assert str(cli.MEMORY_FACTOR * 500 * 500) in err

    def test_unsupported_format_is_usage_error(self, tmp_path, capsys):
        code = helpers.run_cli(
            ["spectrum", "--matrix", "lowrank", "--n", "50", "--format", "csv"]
        )
        assert code == 2
        assert "only 'dsv'" in capsys.readouterr().err

    def test_unknown_algorithm_is_usage_error(self, tmp_path, capsys):
        code = helpers.run_cli(
            ["spectrum", "--matrix", "lowrank", "--n", "50", "--alg", "qr"]
        )
        assert code == 2

    def test_output_dir_environment_variable(self, tmp_path, monkeypatch):
        target = tmp_path / "results"
        monkeypatch.setenv(cli.OUT_DIR_ENV, str(target))
        code = helpers.run_cli(
            ["spectrum", "--matrix", "lowrank", "--n", "60", "--d", "5", "--alg", "svd"]
        )
        assert code == 0
        assert (target / "spectrum.dsv").exists()

    def test_unknown_matrix_family_is_usage_error(self, tmp_path, capsys):
        code = helpers.run_cli(
            ["spectrum", "--matrix", "dense", "--n", "50", "--out", tmp_path / "x.dsv"]
        )
        assert code == 2
        assert "family" in capsys.readouterr().err
