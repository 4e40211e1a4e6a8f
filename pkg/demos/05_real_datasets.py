"""Running the five benchmark datasets from locally supplied raw files.

None of the raw files ship with this package and nothing is downloaded
automatically. Obtain them from their upstream sources, drop them in one
directory, point FAIRBENCH_DATA at it, and this script prepares whatever it
finds and prints the stage-1 original metrics.

Expected file names:
  german.data                     (UCI statlog German Credit)
  adult.data, adult.test          (UCI Adult Census)
  compas-scores-two-years.csv     (ProPublica COMPAS)
  bank-additional-full.csv        (UCI Bank Marketing)
  h192.csv                        (MEPS panel 21 full-year file)
"""

import tempfile
from pathlib import Path

from fairbench.dataset import encode, load_csv, load_schema
from fairbench.dataset.recipes import (
    data_dir as resolve_data_dir,
    prepare_adult,
    prepare_bank,
    prepare_compas,
    prepare_german,
    prepare_meps,
    schema_path,
)
from fairbench.metrics import dataset_metrics

data_dir = resolve_data_dir()
print(f"looking for raw files in {data_dir}/ (set FAIRBENCH_DATA to change)")

RECIPES = {
    "german": (["german.data"], lambda raw, out: prepare_german(raw[0], out)),
    "adult": (["adult.data", "adult.test"],
              lambda raw, out: prepare_adult(raw[0], out, test_path=raw[1] if len(raw) > 1 else None)),
    "compas": (["compas-scores-two-years.csv"], lambda raw, out: prepare_compas(raw[0], out)),
    "bank": (["bank-additional-full.csv"], lambda raw, out: prepare_bank(raw[0], out)),
    "meps": (["h192.csv"], lambda raw, out: prepare_meps(raw[0], out)),
}

found_any = False
with tempfile.TemporaryDirectory() as tmp:
    for name, (files, prepare) in RECIPES.items():
        present = [data_dir / f for f in files if (data_dir / f).is_file()]
        if not present or not (data_dir / files[0]).is_file():
            print(f"  {name:<7} raw file(s) missing, skipped")
            continue
        found_any = True
        csv = prepare(present, Path(tmp) / f"{name}.csv")
        schema = load_schema(schema_path(name))
        ds = encode(load_csv(csv, schema), schema)
        m = dataset_metrics(ds)
        print(f"  {name:<7} n={ds.n:>6}  base rate {m.base_rate:.3f}  "
              f"DI {m.disparate_impact:.3f}  SPD {m.statistical_parity_difference:+.3f}  "
              f"pos/neg {m.num_positives}/{m.num_negatives}")

if not found_any:
    print("\nno raw files found; the synthetic demos (01-04) run without any.")
