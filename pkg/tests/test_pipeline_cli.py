import hashlib
import json
import os

import numpy as np
import pytest

from milkspec.cli import main as cli_main
from milkspec.errors import ConfigError
from milkspec.pipeline import PipelineConfig, run_pipeline

from _fixtures import chemistry_csv_text, write_pipeline_inputs


@pytest.fixture(scope="module")
def inputs(tmp_path_factory):
    work = tmp_path_factory.mktemp("inputs")
    cube_dir, patch_dir, chem_csv = write_pipeline_inputs(str(work))
    return {"cube_dir": cube_dir, "patch_dir": patch_dir, "chemistry_csv": chem_csv}


def full_config(inputs, out_dir, seed=1234):
    return {
        "analyses": [
            "group_summary", "correlate", "pca", "regress",
            "classify", "mnf_cluster", "cluster_validate",
        ],
        "out_dir": out_dir,
        "seed": seed,
        "chemistry_csv": inputs["chemistry_csv"],
        "cube_dir": inputs["cube_dir"],
        "patch_dir": inputs["patch_dir"],
        "roi_side": 6,
        "correlate": {"source": "spectra", "target": "polyphenols", "methods": ["pearson", "kendall"]},
        "pca": {"source": "fatty_acids", "n_components": 2},
        "regress": {
            "target": "polyphenols",
            "source": "image_features",
            "features": ["Texture contrast", "Texture homogeneity", "Texture energy", "Mean color channel 2"],
        },
        "classify": {"source": "spectra", "target": "cow_group", "model": {"kind": "forest", "n_trees": 20}},
        "mnf_cluster": {"mnf_components": 6, "pca_components": 3, "k": 3},
        "cluster_validate": {"auxiliary": "polyphenols"},
    }


class TestConfigValidation:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            PipelineConfig.from_dict({"analyses": ["group_summary"], "out_dir": "x", "bogus": 1})

    def test_missing_analyses_rejected(self):
        with pytest.raises(ConfigError, match="analysis"):
            PipelineConfig.from_dict({"out_dir": "x"})

    def test_unknown_analysis_rejected(self):
        with pytest.raises(ConfigError, match="unknown analysis"):
            PipelineConfig.from_dict({"analyses": ["lstm"], "out_dir": "x"})

    def test_seed_mandatory_for_stochastic(self):
        with pytest.raises(ConfigError, match="seed"):
            PipelineConfig.from_dict({"analyses": ["classify"], "out_dir": "x"})

    def test_seed_not_needed_for_descriptive(self):
        config = PipelineConfig.from_dict({"analyses": ["group_summary"], "out_dir": "x", "chemistry_csv": "c.csv"})
        assert config.seed is None


class TestGroupSummaryOnly:
    def test_three_row_chemistry_yields_summary_artifact(self, tmp_path):
        chem = tmp_path / "chem.csv"
        chem.write_text(
            "sample_id,group,time,polyphenols,frap\nA,0,T0,1.0,0.5\nB,1,T0,1.2,0.6\nC,2,T0,0.9,0.4\n"
        )
        out = tmp_path / "out"
        bundle = run_pipeline(
            PipelineConfig.from_dict(
                {"analyses": ["group_summary"], "out_dir": str(out), "chemistry_csv": str(chem)}
            )
        )
        assert not bundle.diagnostics
        assert "group_summary.txt" in bundle.artifacts
        assert "group_summary.csv" in bundle.artifacts
        text = (out / "group_summary.txt").read_text()
        assert "polyphenols" in text


class TestFullRun:
    def test_expected_artifacts_and_manifest(self, inputs, tmp_path):
        out = tmp_path / "out"
        bundle = run_pipeline(PipelineConfig.from_dict(full_config(inputs, str(out))))
        assert bundle.diagnostics == []
        expected = {
            "chemistry_panels.csv", "roi_spectra.csv", "image_features.csv",
            "group_summary.csv", "group_summary.txt", "factor_anova.csv", "factor_anova.txt",
            "band_significance_pearson.csv", "band_significance_kendall.csv",
            "pca_explained.csv", "pca_scores.csv", "pca_scatter.svg",
            "ols_summary.txt", "ols_summary.json", "ols_predictions.csv", "qq_plot.svg",
            "classification_report.txt", "classification_report.json", "confusion_matrix.svg",
            "mnf_eigenvalues.csv", "cluster_assignments.csv", "cluster_metrics.json",
            "cluster_validation.json", "manifest.json",
        }
        assert expected <= set(bundle.artifacts)

        # manifest completeness: every artifact hash matches the file content
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["seed"] == 1234
        for record in manifest["artifacts"]:
            payload = (out / record["name"]).read_bytes()
            assert hashlib.sha256(payload).hexdigest() == record["sha256"], record["name"]

    def test_bundle_determinism(self, inputs, tmp_path):
        a = run_pipeline(PipelineConfig.from_dict(full_config(inputs, str(tmp_path / "a"))))
        b = run_pipeline(PipelineConfig.from_dict(full_config(inputs, str(tmp_path / "b"))))
        hashes_a = {r["name"]: r["sha256"] for r in a.manifest["artifacts"]}
        hashes_b = {r["name"]: r["sha256"] for r in b.manifest["artifacts"]}
        assert hashes_a == hashes_b
        # config hash is stable too; only the timestamp may differ
        assert a.manifest["config_hash"] != ""
        assert {k: v for k, v in a.manifest.items() if k != "created"} == {
            k: v for k, v in b.manifest.items() if k != "created"
        }

    def test_different_seed_changes_stochastic_artifacts(self, inputs, tmp_path):
        a = run_pipeline(PipelineConfig.from_dict(full_config(inputs, str(tmp_path / "a"), seed=1)))
        b = run_pipeline(PipelineConfig.from_dict(full_config(inputs, str(tmp_path / "b"), seed=2)))
        hashes_a = {r["name"]: r["sha256"] for r in a.manifest["artifacts"]}
        hashes_b = {r["name"]: r["sha256"] for r in b.manifest["artifacts"]}
        assert hashes_a["chemistry_panels.csv"] == hashes_b["chemistry_panels.csv"]
        assert hashes_a["cluster_assignments.csv"] != hashes_b["cluster_assignments.csv"]

    def test_stage_isolation_on_failure(self, inputs, tmp_path):
        clean = run_pipeline(PipelineConfig.from_dict(full_config(inputs, str(tmp_path / "clean"))))
        config = full_config(inputs, str(tmp_path / "out"))
        config["classify"]["target"] = "no_such_parameter"
        bundle = run_pipeline(PipelineConfig.from_dict(config))
        failures = [d for d in bundle.diagnostics if d["kind"] == "failure"]
        assert len(failures) == 1
        assert failures[0]["stage"] == "classify"
        assert "no_such_parameter" in failures[0]["error"]
        # completed stages kept their artifacts...
        assert "group_summary.txt" in bundle.artifacts
        assert "cluster_validation.json" in bundle.artifacts
        assert "classification_report.txt" not in bundle.artifacts
        manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
        assert any(d["stage"] == "classify" for d in manifest["diagnostics"])
        # ...and those artifacts are byte-identical to a clean run's
        clean_hashes = {r["name"]: r["sha256"] for r in clean.manifest["artifacts"]}
        for record in manifest["artifacts"]:
            assert clean_hashes[record["name"]] == record["sha256"], record["name"]

    def test_dependency_skip_recorded(self, inputs, tmp_path):
        config = {
            "analyses": ["cluster_validate"],
            "out_dir": str(tmp_path / "out"),
            "seed": 3,
            "chemistry_csv": inputs["chemistry_csv"],
            # no cube_dir: mnf_cluster cannot run
        }
        bundle = run_pipeline(PipelineConfig.from_dict(config))
        kinds = {d["stage"]: d["kind"] for d in bundle.diagnostics}
        assert kinds["mnf_cluster"] == "failure"
        assert kinds["cluster_validate"] == "skipped"


class TestCli:
    def test_run_success_exit_zero(self, inputs, tmp_path, capsys):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(full_config(inputs, str(tmp_path / "out"))))
        code = cli_main(["run", "--config", str(config_path)])
        assert code == 0
        printed = capsys.readouterr().out
        assert "manifest.json" in printed

    def test_subcommand_narrows_selection(self, inputs, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(full_config(inputs, str(tmp_path / "out"))))
        code = cli_main(["correlate", "--config", str(config_path), "--out", str(tmp_path / "corr")])
        assert code == 0
        names = set(os.listdir(tmp_path / "corr"))
        assert "band_significance_pearson.csv" in names
        assert "classification_report.txt" not in names

    def test_features_only_selection_needs_no_other_inputs(self, inputs, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "analyses": ["features"],
                    "out_dir": str(tmp_path / "feat"),
                    "patch_dir": inputs["patch_dir"],
                }
            )
        )
        code = cli_main(["features", "--config", str(config_path)])
        assert code == 0
        assert (tmp_path / "feat" / "image_features.csv").exists()

    def test_ingest_subcommand_materializes_inputs_only(self, inputs, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(full_config(inputs, str(tmp_path / "ing"))))
        code = cli_main(["ingest", "--config", str(config_path)])
        assert code == 0
        names = set(os.listdir(tmp_path / "ing"))
        assert {"chemistry_panels.csv", "roi_spectra.csv", "manifest.json"} <= names
        assert "group_summary.txt" not in names

    def test_report_subcommand_runs_descriptive_path(self, inputs, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(full_config(inputs, str(tmp_path / "out"))))
        code = cli_main(["report", "--config", str(config_path), "--out", str(tmp_path / "rep")])
        assert code == 0
        names = set(os.listdir(tmp_path / "rep"))
        assert "group_summary.txt" in names
        assert "factor_anova.txt" in names

    def test_seed_override_lands_in_manifest(self, inputs, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(full_config(inputs, str(tmp_path / "out"), seed=1)))
        code = cli_main(["run", "--config", str(config_path), "--seed", "77", "--out", str(tmp_path / "o2")])
        assert code == 0
        manifest = json.loads((tmp_path / "o2" / "manifest.json").read_text())
        assert manifest["seed"] == 77

    def test_missing_config_exits_two(self, tmp_path):
        assert cli_main(["run", "--config", str(tmp_path / "nope.json")]) == 2

    def test_invalid_json_exits_two(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert cli_main(["run", "--config", str(bad)]) == 2

    def test_missing_chemistry_file_exits_three(self, tmp_path):
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "analyses": ["group_summary"],
                    "out_dir": str(tmp_path / "out"),
                    "chemistry_csv": str(tmp_path / "missing.csv"),
                }
            )
        )
        assert cli_main(["report", "--config", str(config_path)]) == 3

    def test_degenerate_analysis_exits_four(self, tmp_path):
        # constant polyphenols target cannot be discretized for classification
        chem = tmp_path / "chem.csv"
        rows = ["sample_id,group,time,polyphenols,frap"]
        for i in range(10):
            rows.append(f"S{i},{i % 3},T0,1.0,0.5")
        chem.write_text("\n".join(rows) + "\n")
        patch_dir = tmp_path / "patches"
        patch_dir.mkdir()
        from PIL import Image

        rng = np.random.default_rng(0)
        for i in range(10):
            arr = rng.integers(0, 256, size=(8, 8, 3)).astype(np.uint8)
            Image.fromarray(arr, "RGB").save(patch_dir / f"S{i}.ppm")
        config_path = tmp_path / "config.json"
        config_path.write_text(
            json.dumps(
                {
                    "analyses": ["classify"],
                    "out_dir": str(tmp_path / "out"),
                    "seed": 5,
                    "chemistry_csv": str(chem),
                    "patch_dir": str(patch_dir),
                    "classify": {"source": "image_features", "target": "polyphenols", "model": {"kind": "tree"}},
                }
            )
        )
        assert cli_main(["classify", "--config", str(config_path)]) == 4


def test_chemistry_text_fixture_parses():
    from milkspec.data.chemistry import parse_chemistry_table

    panels = parse_chemistry_table(chemistry_csv_text())
    assert len(panels) == 18
