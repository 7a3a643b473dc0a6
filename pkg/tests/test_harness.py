import numpy as np
import pytest

from drbench.cli import main
from drbench.config import ConfigError, parse_config
from drbench.datasets import Dataset
from drbench.harness import EvalReport, EvalRow, emit_report, run_pipeline


def write_synthetic_corpus(tmp_path, n_datasets=2, n_per_class=15, m=6, sep=8.0):
    """Delimited files + manifest with well-separated 2-class gaussians."""
    rng = np.random.default_rng(42)
    sections = []
    for d in range(n_datasets):
        rows = []
        for c, shift in enumerate((0.0, sep)):
            for x in rng.normal(size=(n_per_class, m)) + shift:
                rows.append(",".join(f"{v:.6f}" for v in x) + f",c{c}")
        (tmp_path / f"ds{d}.csv").write_text("\n".join(rows) + "\n")
        sections.append(f"[ds{d}]\npath = ds{d}.csv\ndelimiter = ,\nlabel_column = last\n")
    (tmp_path / "manifest.ini").write_text("\n".join(sections))
    return tmp_path / "manifest.ini"


def fast_config(manifest, **overrides):
    base = dict(
        manifest=str(manifest), repeats="2", iterations="120", out="out"
    )
    base.update({k: str(v) for k, v in overrides.items()})
    return parse_config("", base)


class TestParseConfig:
    def test_empty_gives_defaults(self):
        cfg = parse_config("")
        assert cfg.repeats == 10
        assert cfg.k == 5
        assert cfg.svm_c == 1.0
        assert cfg.test_fraction == 0.1
        assert cfg.dr == ("tsne", "mds")
        assert cfg.classifiers == ("knn", "enn", "svm")

    def test_cli_overrides_file(self):
        cfg = parse_config("repeats = 3\n", {"repeats": "5"})
        assert cfg.repeats == 5

    def test_file_overrides_default(self):
        cfg = parse_config("repeats = 3\nseed = 11\n# a comment\n")
        assert cfg.repeats == 3
        assert cfg.seed == 11

    def test_unknown_key_named_in_error(self):
        with pytest.raises(ConfigError, match="preplexity"):
            parse_config("preplexity = 25\n")

    def test_malformed_value_rejected(self):
        with pytest.raises(ConfigError, match="repeats"):
            parse_config("repeats = many\n")

    def test_bad_selection_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("dr = pca\n")

    def test_list_values_parsed(self):
        cfg = parse_config("classifiers = knn, svm\n")
        assert cfg.classifiers == ("knn", "svm")


class TestRunPipeline:
    def test_row_counting_contract(self, tmp_path):
        manifest = write_synthetic_corpus(tmp_path)
        report = run_pipeline(fast_config(manifest))
        # datasets x dr x classifiers x repeats
        assert len(report.rows) == 2 * 2 * 3 * 2
        combos = {(r.dataset, r.dr_method, r.classifier, r.seed) for r in report.rows}
        assert len(combos) == len(report.rows)
        assert len(report.aggregates()) == 2 * 2 * 3 * 2  # mean + std rows

    def test_byte_identical_reports(self, tmp_path):
        manifest = write_synthetic_corpus(tmp_path, n_datasets=1)
        cfg = fast_config(manifest)
        out_a = tmp_path / "a"
        out_b = tmp_path / "b"
        emit_report(run_pipeline(cfg), out_a)
        emit_report(run_pipeline(cfg), out_b)
        for name in ("report.csv", "summary.csv", "tables.md",
                     "accuracy_tsne.dat", "accuracy_mds.dat"):
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_missing_dataset_skipped(self, tmp_path):
        manifest = write_synthetic_corpus(tmp_path, n_datasets=1)
        with open(manifest, "a") as fh:
            fh.write("\n[ghost]\npath = ghost.csv\n")
        report = run_pipeline(fast_config(manifest))
        assert [s[0] for s in report.skipped] == ["ghost"]
        assert {r.dataset for r in report.rows} == {"ds0"}

    def test_dataset_independence(self, tmp_path):
        # deleting one dataset leaves the other's rows bit-identical
        manifest = write_synthetic_corpus(tmp_path, n_datasets=2)
        both = run_pipeline(fast_config(manifest))
        only = run_pipeline(fast_config(manifest, datasets="ds0"))
        rows_both = [r for r in both.rows if r.dataset == "ds0"]
        for ra, rb in zip(rows_both, only.rows):
            assert (ra.accuracy, ra.f_measure, ra.g_mean, ra.final_cost) == (
                rb.accuracy, rb.f_measure, rb.g_mean, rb.final_cost
            )

    def test_mds_embedded_once_per_dataset(self, tmp_path):
        manifest = write_synthetic_corpus(tmp_path, n_datasets=1)
        report = run_pipeline(fast_config(manifest, dr="mds"))
        costs = {r.final_cost for r in report.rows}
        assert len(costs) == 1  # same strain for every seed

    def test_easy_data_scores_high(self, tmp_path):
        manifest = write_synthetic_corpus(tmp_path, n_datasets=1)
        report = run_pipeline(fast_config(manifest))
        for r in report.rows:
            assert r.accuracy >= 0.95


class TestEmitReport:
    def single_row_report(self):
        return EvalReport(rows=[
            EvalRow("seeds", "mds", "svm", 0, 0.8876, 0.9024, 0.9059,
                    runtime=0.1, final_cost=0.25, n_clamped=0, dropped_rows=0)
        ])

    def test_single_row_gives_two_line_csv(self, tmp_path):
        emit_report(self.single_row_report(), tmp_path, fmt="csv")
        lines = (tmp_path / "report.csv").read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].startswith("dataset,dr_method,classifier,seed,accuracy")

    def test_four_decimal_rendering(self, tmp_path):
        emit_report(self.single_row_report(), tmp_path, fmt="csv")
        row = (tmp_path / "report.csv").read_text().splitlines()[1]
        assert "0.8876" in row
        assert "0.9024" in row

    def test_markdown_table_shape(self, tmp_path):
        emit_report(self.single_row_report(), tmp_path, fmt="markdown")
        text = (tmp_path / "tables.md").read_text()
        table_lines = [ln for ln in text.splitlines() if ln.startswith("|")]
        # one header + one separator + one dataset row, twice (scores + accuracy)
        assert len(table_lines) == 6
        assert "0.8876" in text

    def test_plot_data_files(self, tmp_path):
        emit_report(self.single_row_report(), tmp_path, fmt="csv")
        dat = (tmp_path / "accuracy_mds.dat").read_text().splitlines()
        assert dat[1] == "seeds svm 0.8876"

    def test_empty_report_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_report(EvalReport(), tmp_path)


class TestCli:
    def test_run_and_validate(self, tmp_path, capsys):
        manifest = write_synthetic_corpus(tmp_path, n_datasets=1)
        out = tmp_path / "out"
        code = main([
            "run", "--manifest", str(manifest), "--repeats", "1",
            "--iterations", "100", "--out", str(out),
        ])
        assert code == 0
        assert (out / "report.csv").exists()
        assert (out / "tables.md").exists()
        code = main(["validate-data", "--manifest", str(manifest)])
        assert code == 0
        assert "ds0: n=30 m=6 classes=2" in capsys.readouterr().out

    def test_config_error_exit_code(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("preplexity = 10\n")
        assert main(["run", "--config", str(cfg)]) == 1

    def test_data_error_exit_code(self, tmp_path):
        assert main(["run", "--manifest", str(tmp_path / "nope.ini")]) == 2

    def test_all_datasets_missing_exit_code(self, tmp_path):
        (tmp_path / "m.ini").write_text("[ghost]\npath = ghost.csv\n")
        assert main([
            "run", "--manifest", str(tmp_path / "m.ini"),
            "--out", str(tmp_path / "out"),
        ]) == 2


class TestEvaluateDataset:
    def test_transductive_embedding_precedes_split(self, tmp_path):
        # classifier selection must not change the embedded coordinates:
        # final_cost (a pure function of the embedding) is identical
        manifest = write_synthetic_corpus(tmp_path, n_datasets=1)
        all_clf = run_pipeline(fast_config(manifest))
        knn_only = run_pipeline(fast_config(manifest, classifiers="knn"))
        costs_all = sorted(
            (r.dr_method, r.seed, r.final_cost)
            for r in all_clf.rows if r.classifier == "knn"
        )
        costs_knn = sorted(
            (r.dr_method, r.seed, r.final_cost) for r in knn_only.rows
        )
        assert costs_all == costs_knn
