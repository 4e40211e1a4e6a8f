"""Stage 1: transform a full dataset and report data-level metrics on both versions."""

from dataclasses import asdict, dataclass
from pathlib import Path

from ..dataset import TabularDataset, cache_key, cache_load, cache_store, encode, load_csv
from ..metrics.dataset_metrics import DatasetMetrics, dataset_metrics
from ..preproc import METHOD_NAMES, apply_method
from ..errors import FairbenchError


@dataclass(frozen=True)
class StageOneReport:
    dataset: str
    method: str
    params: dict
    seed: int
    original_metrics: DatasetMetrics
    processed_metrics: DatasetMetrics
    original_cache_key: str
    processed_cache_key: str

    def to_dict(self):
        return {
            "schema_version": 1,
            "dataset": self.dataset,
            "method": self.method,
            "params": self.params,
            "seed": self.seed,
            "original_metrics": asdict(self.original_metrics),
            "processed_metrics": asdict(self.processed_metrics),
            "original_cache_key": self.original_cache_key,
            "processed_cache_key": self.processed_cache_key,
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("schema_version") != 1:
            raise FairbenchError(f"unsupported stage-1 report version {doc.get('schema_version')!r}")
        return cls(
            dataset=doc["dataset"],
            method=doc["method"],
            params=doc["params"],
            seed=doc["seed"],
            original_metrics=DatasetMetrics(**doc["original_metrics"]),
            processed_metrics=DatasetMetrics(**doc["processed_metrics"]),
            original_cache_key=doc["original_cache_key"],
            processed_cache_key=doc["processed_cache_key"],
        )


def load_dataset(source, schema=None) -> TabularDataset:
    """Resolve a dataset argument: an encoded dataset passes through, a CSV path loads."""
    if isinstance(source, TabularDataset):
        return source
    if schema is None:
        raise FairbenchError("loading from a file requires a schema")
    return encode(load_csv(Path(source), schema), schema)


def run_prep_stage(dataset, schema, method: str, params=None, seed: int = 0,
                   cache_dir="fairbench_cache", dataset_name: str = None,
                   consistency_k: int = 5) -> StageOneReport:
    """Load/encode, transform the full dataset, compute both metric bundles, cache both.

    `dataset` may be a CSV path (with `schema`) or an already encoded
    TabularDataset (schema optional). A warm cache short-circuits the
    transform: the processed dataset is loaded back instead of re-fitted.
    """
    if method not in METHOD_NAMES:
        raise FairbenchError(f"unknown method {method!r}; expected one of {METHOD_NAMES}")
    params = dict(params or {})
    ds = load_dataset(dataset, schema)
    name = dataset_name or (schema.name if schema is not None else ds.provenance or "dataset")

    key_orig = cache_key(name, "original", {}, seed)
    key_proc = cache_key(name, method, params, seed)

    cache_store(ds, key_orig, cache_dir)
    processed = cache_load(key_proc, cache_dir)
    if processed is None:
        processed = apply_method(method, ds, params, seed)
        cache_store(processed, key_proc, cache_dir)

    return StageOneReport(
        dataset=name,
        method=method,
        params=params,
        seed=seed,
        original_metrics=dataset_metrics(ds, consistency_k=consistency_k),
        processed_metrics=dataset_metrics(processed, consistency_k=consistency_k),
        original_cache_key=key_orig,
        processed_cache_key=key_proc,
    )
