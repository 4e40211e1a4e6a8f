"""Content-addressed dataset cache.

Entries are self-describing columnar text files (`<cache_root>/<hex key>.fpds`)
with an 8-byte magic header and a version line. Reals are serialized as C99
float hex so a round-trip is bit-identical. Writes go to a temp file in the
same directory followed by an atomic rename, so concurrent batch jobs never
observe a partial entry.
"""

import hashlib
import json
import os
import tempfile
from pathlib import Path
from urllib.parse import quote, unquote

import numpy as np

from ..errors import DataFormatError
from .tabular import TabularDataset

MAGIC = b"FPDSTXT\n"
VERSION = 1


def cache_key(dataset_name, method_name, params, seed) -> str:
    """Content hash of (dataset, method, parameters, seed); hex, stable across runs."""
    blob = json.dumps(
        {"dataset": str(dataset_name), "method": str(method_name),
         "params": params or {}, "seed": int(seed)},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def cache_path(cache_root, key) -> Path:
    return Path(cache_root) / f"{key}.fpds"


def _hex_line(values):
    return " ".join(float(v).hex() for v in values)


def dumps(ds: TabularDataset) -> bytes:
    lines = [
        f"version {VERSION}",
        f"provenance {quote(ds.provenance)}",
        f"n {ds.n}",
        f"d {ds.dim}",
        "feature_names " + " ".join(quote(name) for name in ds.feature_names),
        "labels " + " ".join(str(int(v)) for v in ds.labels),
        "protected " + " ".join(str(int(v)) for v in ds.protected),
        "weights " + _hex_line(ds.weights),
    ]
    for j in range(ds.dim):
        lines.append(f"feature {j} " + _hex_line(ds.features[:, j]))
    lines.append("end")
    return MAGIC + "\n".join(lines).encode("utf-8") + b"\n"


def loads(blob: bytes) -> TabularDataset:
    if blob[:8] != MAGIC:
        raise DataFormatError("not a dataset cache entry (bad magic)")
    lines = blob[8:].decode("utf-8").splitlines()
    fields = {}
    feature_cols = {}
    for line in lines:
        if line == "end":
            break
        tag, _, rest = line.partition(" ")
        if tag == "feature":
            j, _, data = rest.partition(" ")
            feature_cols[int(j)] = data
        else:
            fields[tag] = rest
    else:
        raise DataFormatError("cache entry truncated (no end marker)")

    if int(fields.get("version", -1)) != VERSION:
        raise DataFormatError(f"unsupported cache version {fields.get('version')!r}")
    try:
        n, d = int(fields["n"]), int(fields["d"])
        names = tuple(unquote(t) for t in fields["feature_names"].split())
        labels = np.fromiter((int(t) for t in fields["labels"].split()), dtype=np.int64, count=n)
        protected = np.fromiter((int(t) for t in fields["protected"].split()), dtype=np.int64, count=n)
        weights = np.fromiter((float.fromhex(t) for t in fields["weights"].split()), dtype=np.float64, count=n)
        features = np.empty((n, d), dtype=np.float64)
        for j in range(d):
            features[:, j] = np.fromiter(
                (float.fromhex(t) for t in feature_cols[j].split()), dtype=np.float64, count=n
            )
    except (KeyError, ValueError) as exc:
        raise DataFormatError(f"corrupt cache entry: {exc!r}") from exc
    return TabularDataset(features, labels, protected, weights, names, unquote(fields.get("provenance", "")))


def cache_store(ds: TabularDataset, key: str, cache_root) -> Path:
    """Write atomically; storing twice under one key leaves a single entry (last wins)."""
    root = Path(cache_root)
    root.mkdir(parents=True, exist_ok=True)
    target = cache_path(root, key)
    fd, tmp = tempfile.mkstemp(dir=root, prefix=".fpds-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(dumps(ds))
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def cache_load(key: str, cache_root):
    """Return the cached dataset, or None on a miss (absence is not an error)."""
    target = cache_path(cache_root, key)
    try:
        blob = target.read_bytes()
    except FileNotFoundError:
        return None
    return loads(blob)
