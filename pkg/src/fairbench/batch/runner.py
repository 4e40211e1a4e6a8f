"""Execute expanded jobs with isolated failures and a shared atomic cache.

Each job runs stage 1 then stage 2 and writes its artifacts under
`<out>/<job id>/`. Per-job randomness derives from (job seed, job id), so
results do not depend on the parallelism degree, execution order, or on which
other jobs exist in the batch.
"""

import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..dataset import SplitSpec, load_schema, make_synthetic
from ..pipeline.stage1 import run_prep_stage
from ..pipeline.stage2 import run_bench_stage
from ..report.svg import write_sweep_svg
from ..report.tables import stage1_rows, sweep_summary, write_stage1_csv, write_summary_json, write_sweep_csv
from ..util import derive_seed
from .spec import JobSpec


@dataclass(frozen=True)
class JobOutcome:
    job_id: str
    status: str          # "ok" | "failed"
    error: str
    wall_time_s: float
    artifacts: tuple


@dataclass(frozen=True)
class BatchReport:
    outcomes: tuple
    output_dir: str
    skipped_expansions: int = 0

    @property
    def failures(self):
        return [o for o in self.outcomes if o.status != "ok"]

    @property
    def exit_code(self):
        return 1 if self.failures else 0

    def to_dict(self):
        return {
            "schema_version": 1,
            "output_dir": self.output_dir,
            "skipped_expansions": self.skipped_expansions,
            "jobs": [
                {
                    "job_id": o.job_id, "status": o.status, "error": o.error,
                    "wall_time_s": o.wall_time_s, "artifacts": list(o.artifacts),
                }
                for o in self.outcomes
            ],
        }


def execute_job(job: JobSpec, output_dir, cache_dir) -> JobOutcome:
    """Run one job end to end; exceptions become a failed outcome, never a crash."""
    started = time.perf_counter()
    job_dir = Path(output_dir) / job.job_id
    try:
        effective_seed = derive_seed(job.seed, job.job_id)
        if job.dataset.synthetic is not None:
            ds = make_synthetic(**job.dataset.synthetic)
            schema = None
            source = ds
        else:
            schema = load_schema(job.dataset.schema, sensitive=job.sensitive)
            source = job.dataset.csv

        stage1 = run_prep_stage(
            source, schema, job.method, job.method_params,
            seed=effective_seed, cache_dir=cache_dir, dataset_name=job.dataset.name,
        )
        split_spec = SplitSpec(
            train=job.split["train"], validation=job.split["validation"],
            test=job.split["test"], seed=effective_seed,
        )
        bench = run_bench_stage(
            stage1, model_name=job.model, model_params=job.model_params,
            split_spec=split_spec, selection_metric=job.selection_metric,
            cache_dir=cache_dir,
        )

        job_dir.mkdir(parents=True, exist_ok=True)
        artifacts = [write_stage1_csv(stage1_rows(stage1), job_dir / "stage1.csv")]
        arms = {}
        for arm in ("original", "processed"):
            result = getattr(bench, arm)
            if result is None:
                continue
            for split_name in ("validation", "test"):
                artifacts.append(write_sweep_csv(
                    result.records(split_name), job_dir / f"sweep_{arm}_{split_name}.csv"
                ))
            artifacts.append(write_sweep_svg(result, job_dir / f"sweep_{arm}.svg"))
            arms[arm] = sweep_summary(result)
        summary = {
            "job": json.loads(job.canonical()),
            "job_id": job.job_id,
            "stage1": stage1.to_dict(),
            "arms": arms,
            "arm_errors": bench.errors,
        }
        artifacts.append(write_summary_json(summary, job_dir / "summary.json"))
        return JobOutcome(
            job_id=job.job_id,
            status="ok",
            error="",
            wall_time_s=time.perf_counter() - started,
            artifacts=tuple(str(p) for p in artifacts),
        )
    except Exception as exc:
        return JobOutcome(
            job_id=job.job_id,
            status="failed",
            error="".join(traceback.format_exception_only(type(exc), exc)).strip(),
            wall_time_s=time.perf_counter() - started,
            artifacts=(),
        )


def run_batch(jobs, parallelism: int = 1, output_dir="fairbench_out",
              cache_dir=None, skipped_expansions: int = 0) -> BatchReport:
    """Run all jobs, at most `parallelism` at a time; failures never stop the batch."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    cache_dir = Path(cache_dir) if cache_dir else output_dir / "cache"

    if parallelism <= 1 or len(jobs) <= 1:
        outcomes = [execute_job(job, output_dir, cache_dir) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(parallelism, len(jobs))) as pool:
            futures = [pool.submit(execute_job, job, output_dir, cache_dir) for job in jobs]
            outcomes = [f.result() for f in futures]

    report = BatchReport(
        outcomes=tuple(outcomes),
        output_dir=str(output_dir),
        skipped_expansions=skipped_expansions,
    )
    with open(output_dir / "batch_report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return report
