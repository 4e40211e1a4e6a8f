"""YAML experiment matrices: expand the Cartesian product and run it.

Two synthetic datasets x two methods = four jobs, executed with the shared
atomic cache; per-job artifacts land under demos/out/batch/<job id>/.
"""

from pathlib import Path

from fairbench.batch import expand_jobs, parse_batch_yaml, run_batch

CONFIG = """
datasets:
  - name: synth_mild
    synthetic: {n: 400, disparity: 0.2, seed: 21}
  - name: synth_strong
    synthetic: {n: 400, disparity: 0.5, seed: 22}
methods:
  - name: RW
  - name: DIR
    params: {repair_level: 1.0}
models:
  - name: logreg
seeds: [0]
selection_metric: SPD
"""

spec = parse_batch_yaml(CONFIG)
jobs, skipped = expand_jobs(spec)
print(f"expanded {len(jobs)} jobs ({skipped} skipped):")
for job in jobs:
    print(f"  {job.job_id}  {job.dataset.name:<13} {job.method:<4} {job.model} seed={job.seed}")

out = Path(__file__).parent / "out" / "batch"
report = run_batch(jobs, parallelism=2, output_dir=out)

print(f"\nbatch finished, exit code {report.exit_code}")
for outcome in report.outcomes:
    print(f"  {outcome.job_id}  {outcome.status:<6} {outcome.wall_time_s:.2f}s "
          f"({len(outcome.artifacts)} artifacts)")
print(f"\nper-job outputs under {out}/<job id>/: stage1.csv,")
print("sweep_<arm>_<split>.csv, sweep_<arm>.svg, summary.json")
