"""Batch matrices: parsing, expansion, isolation, parallel and warm-cache determinism."""

import filecmp
from pathlib import Path

import pytest
import yaml

from fairbench.batch import expand_jobs, parse_batch_yaml, run_batch
from fairbench.errors import SchemaError

MINIMAL = """
datasets:
  - name: synth_a
    synthetic: {n: 200, disparity: 0.3, seed: 11}
methods: [RW]
models: [logreg]
seeds: [0]
"""

MATRIX = """
datasets:
  - name: synth_a
    synthetic: {n: 240, disparity: 0.3, seed: 11}
  - name: synth_b
    synthetic: {n: 240, disparity: 0.1, seed: 12}
methods:
  - name: RW
  - name: DIR
    params: {repair_level: 1.0}
models:
  - name: logreg
    params: {max_iter: 500}
seeds: [3]
selection_metric: SPD
"""


class TestParse:
    def test_minimal_spec_gets_defaults(self):
        spec = parse_batch_yaml(MINIMAL)
        assert spec.split == {"train": 0.70, "validation": 0.15, "test": 0.15}
        assert spec.parallelism == 1
        assert spec.selection_metric == "SPD"
        assert spec.methods == (("RW", {}),)

    def test_unknown_top_level_key_rejected(self):
        with pytest.raises(SchemaError, match="grid_size"):
            parse_batch_yaml(MINIMAL + "\ngrid_size: 50\n")

    def test_bad_split_sum_cites_rule(self):
        bad = MINIMAL + "\nsplit: {train: 0.9, validation: 0.15, test: 0.15}\n"
        with pytest.raises(SchemaError, match="sum to 1"):
            parse_batch_yaml(bad)

    def test_unknown_method_entry_key_has_path(self):
        bad = MINIMAL.replace("methods: [RW]", "methods:\n  - {name: RW, extra: 1}")
        with pytest.raises(SchemaError, match=r"methods\[0\]"):
            parse_batch_yaml(bad)

    def test_two_by_two_lists_parse(self):
        spec = parse_batch_yaml(MATRIX)
        assert len(spec.datasets) == 2
        assert len(spec.methods) == 2

    def test_invalid_selection_metric(self):
        with pytest.raises(SchemaError, match="selection_metric"):
            parse_batch_yaml(MINIMAL + "\nselection_metric: accuracy\n")

    def test_csv_dataset_requires_schema(self):
        bad = """
datasets:
  - name: german
    csv: some.csv
methods: [RW]
models: [logreg]
seeds: [0]
"""
        with pytest.raises(SchemaError, match=r"datasets\[0\]"):
            parse_batch_yaml(bad)


class TestExpand:
    def test_cartesian_product(self):
        jobs, skipped = expand_jobs(parse_batch_yaml(MATRIX))
        assert len(jobs) == 4  # 2 datasets x 2 methods x 1 model x 1 seed
        assert skipped == 0
        assert len({j.job_id for j in jobs}) == 4

    def test_invalid_attribute_skipped_and_counted(self):
        spec = parse_batch_yaml(MATRIX + "\nsensitive_attributes: {synth_a: [group, nonexistent]}\n")
        jobs, skipped = expand_jobs(spec)
        assert len(jobs) == 4
        assert skipped == 2  # methods x models x seeds for the bad attribute

    def test_deterministic_ordering_and_ids(self):
        a, _ = expand_jobs(parse_batch_yaml(MATRIX))
        b, _ = expand_jobs(parse_batch_yaml(MATRIX))
        assert [j.job_id for j in a] == [j.job_id for j in b]
        canon = [j.canonical() for j in a]
        assert canon == sorted(canon)

    def test_empty_expansion_is_error(self):
        spec = parse_batch_yaml(MINIMAL + "\nsensitive_attributes: {synth_a: [nope]}\n")
        with pytest.raises(SchemaError, match="zero jobs"):
            expand_jobs(spec)


def job_files(root: Path):
    """Per-job artifact files, relative path -> absolute, batch report excluded."""
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file() and path.name != "batch_report.json" and path.suffix != ".fpds":
            out[path.relative_to(root)] = path
    return out


class TestRun:
    def test_four_jobs_with_one_failure_isolated(self, tmp_path):
        text = MATRIX.replace(
            "  - name: synth_b\n    synthetic: {n: 240, disparity: 0.1, seed: 12}",
            "  - name: broken\n    csv: /nonexistent/x.csv\n    schema: /nonexistent/s.yaml",
        )
        jobs, _ = expand_jobs(parse_batch_yaml(text))
        assert len(jobs) == 4
        report = run_batch(jobs, parallelism=1, output_dir=tmp_path / "out")
        assert len(report.failures) == 2  # both methods on the broken dataset
        assert report.exit_code == 1
        ok = [o for o in report.outcomes if o.status == "ok"]
        assert len(ok) == 2
        for outcome in ok:
            job_dir = tmp_path / "out" / outcome.job_id
            assert (job_dir / "stage1.csv").is_file()
            assert (job_dir / "summary.json").is_file()

    def test_parallelism_one_vs_four_byte_identical(self, tmp_path):
        jobs, _ = expand_jobs(parse_batch_yaml(MATRIX))
        run_batch(jobs, parallelism=1, output_dir=tmp_path / "serial")
        run_batch(jobs, parallelism=4, output_dir=tmp_path / "parallel")
        serial = job_files(tmp_path / "serial")
        parallel = job_files(tmp_path / "parallel")
        assert set(serial) == set(parallel)
        assert len(serial) >= 4 * 8  # stage1 + 4 sweep csvs + 2 svgs + summary per job
        for rel in serial:
            assert filecmp.cmp(serial[rel], parallel[rel], shallow=False), rel

    def test_warm_cache_rerun_reproduces_outputs(self, tmp_path):
        jobs, _ = expand_jobs(parse_batch_yaml(MATRIX))
        cache = tmp_path / "cache"
        run_batch(jobs, parallelism=1, output_dir=tmp_path / "first", cache_dir=cache)
        fpds_before = {p.name: p.stat().st_mtime for p in cache.glob("*.fpds")}
        run_batch(jobs, parallelism=1, output_dir=tmp_path / "second", cache_dir=cache)
        first = job_files(tmp_path / "first")
        second = job_files(tmp_path / "second")
        assert set(first) == set(second)
        for rel in first:
            assert filecmp.cmp(first[rel], second[rel], shallow=False), rel
        # warm cache entries were reused, not rewritten
        fpds_after = {p.name: p.stat().st_mtime for p in cache.glob("*.fpds")}
        assert set(fpds_before) <= set(fpds_after)

    def test_batch_report_written(self, tmp_path):
        jobs, _ = expand_jobs(parse_batch_yaml(MINIMAL))
        report = run_batch(jobs, parallelism=1, output_dir=tmp_path / "out")
        assert (tmp_path / "out" / "batch_report.json").is_file()
        assert report.exit_code == 0
        doc = yaml.safe_load((tmp_path / "out" / "batch_report.json").read_text())
        assert doc["jobs"][0]["status"] == "ok"
