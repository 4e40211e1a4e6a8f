"""Reweighing: per-(group, label) instance weights that decouple group and outcome."""

from dataclasses import dataclass

import numpy as np

from ..errors import FitError
from ..dataset.tabular import TabularDataset


@dataclass(frozen=True)
class ReweighResult:
    """Transformed dataset plus the four cell weights, keyed (group, label)."""

    dataset: TabularDataset
    cell_weights: dict

    def __post_init__(self):
        if any(w <= 0 for w in self.cell_weights.values()):
            raise FitError("reweighing produced a non-positive cell weight")


def reweigh(ds: TabularDataset) -> ReweighResult:
    """Multiply each instance weight by Pr(S=s) Pr(Y=y) / Pr(S=s, Y=y).

    Probabilities are computed from the input weights, so the result's weighted
    group favorable rates are equal (weighted disparate impact 1, statistical
    parity difference 0) while features, labels, and raw counts are untouched.
    Applying it again is a no-op up to rounding.
    """
    total = ds.weights.sum()
    cell_weights = {}
    for s in (0, 1):
        for y in (0, 1):
            in_group = ds.protected == s
            with_label = ds.labels == y
            joint = ds.weights[in_group & with_label].sum()
            if joint <= 0:
                raise FitError(f"reweighing undefined: empty (group={s}, label={y}) cell")
            p_s = ds.weights[in_group].sum() / total
            p_y = ds.weights[with_label].sum() / total
            cell_weights[(s, y)] = float(p_s * p_y / (joint / total))

    factors = np.empty(ds.n)
    for (s, y), w in cell_weights.items():
        factors[(ds.protected == s) & (ds.labels == y)] = w
    out = ds.replace(weights=ds.weights * factors).with_provenance_step("reweigh")
    return ReweighResult(dataset=out, cell_weights=cell_weights)
