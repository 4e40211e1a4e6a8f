"""Probabilistic transformation of features and labels on a discretized domain.

Numeric columns are cut into equal-frequency bins; a conditional table
P(target cell, target label | cell, label, group) is fitted by mirror descent
on the per-row probability simplices. The objective keeps the transformed
joint close to the original (KL), group favorable rates close to a target
distribution (the overall label distribution, within a tolerance), and the
expected per-record distortion under a budget.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import FairbenchWarning, FitError
from ..dataset.tabular import TabularDataset

_MAX_DOMAIN_CELLS = 10_000


@dataclass(frozen=True)
class OppConfig:
    epsilon: float = 0.05          # allowed relative deviation of group rates from target
    distortion_budget: float = 0.25
    bins: int = 5
    max_iter: int = 500
    seed: int = 0
    rho_fair: float = 100.0
    rho_dist: float = 100.0
    label_flip_cost: float = 1.0
    columns: tuple = None          # None = every feature column

    def __post_init__(self):
        if self.epsilon <= 0:
            raise FitError("epsilon must be positive")
        if self.distortion_budget < 0:
            raise FitError("distortion budget must be non-negative")
        if self.bins < 2:
            raise FitError("need at least 2 bins")


@dataclass(frozen=True)
class OppMap:
    column_names: tuple
    column_kinds: tuple        # "binned" or "levels" per column
    bin_edges: tuple           # interior quantile edges (binned) or observed levels
    bin_values: tuple          # training median per bin / level values
    cells: tuple               # observed feature-cell tuples, lexicographic
    row_keys: tuple            # observed (cell index, label, group) triples
    target_keys: tuple         # observed (cell index, label) pairs
    table: np.ndarray          # (rows, targets) conditional probabilities
    epsilon: float
    distortion_budget: float
    penalty_trace: tuple
    fairness_residual: float
    distortion_residual: float
    row_sum_drift: float       # max |row sum - 1| seen over all iterations
    seed: int

    def __post_init__(self):
        sums = self.table.sum(axis=1)
        if (self.table < 0).any() or np.abs(sums - 1.0).max() > 1e-9:
            raise FitError("conditional table rows must be distributions (sum 1, non-negative)")

    def dump_debug(self, path):
        """Versioned text dump of the fitted map for inspection."""
        lines = ["fairbench-model-dump v1", "kind opp",
                 f"columns {' '.join(self.column_names)}",
                 f"epsilon {self.epsilon!r}", f"budget {self.distortion_budget!r}",
                 f"residuals fair={self.fairness_residual!r} dist={self.distortion_residual!r}",
                 f"seed {self.seed}",
                 "trace " + " ".join(f"{v:.10g}" for v in self.penalty_trace)]
        for r, key in enumerate(self.row_keys):
            lines.append(f"row {key} " + " ".join(repr(float(v)) for v in self.table[r]))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _discretize_columns(ds, cfg):
    """Per-column binning structures and the per-record cell tuples."""
    names = list(cfg.columns) if cfg.columns is not None else list(ds.feature_names)
    missing = set(names) - set(ds.feature_names)
    if missing:
        raise FitError(f"unknown OPP column(s): {sorted(missing)}")
    kinds, edges_list, values_list, codes = [], [], [], []
    for name in names:
        col = ds.features[:, ds.feature_names.index(name)]
        uniq = np.unique(col)
        if len(uniq) <= 2:
            kinds.append("levels")
            edges_list.append(tuple(float(u) for u in uniq))
            values_list.append(tuple(float(u) for u in uniq))
            level_pos = {u: i for i, u in enumerate(uniq)}
            codes.append(np.array([level_pos[v] for v in col], dtype=np.int64))
        else:
            qs = np.quantile(col, np.linspace(0, 1, cfg.bins + 1)[1:-1])
            interior = np.unique(qs)
            kinds.append("binned")
            edges_list.append(tuple(float(e) for e in interior))
            code = np.searchsorted(interior, col, side="right")
            medians = []
            for b in range(len(interior) + 1):
                members = col[code == b]
                medians.append(float(np.median(members)) if len(members) else float(col.mean()))
            values_list.append(tuple(medians))
            codes.append(code)
    cell_per_record = [tuple(int(c[i]) for c in codes) for i in range(ds.n)]
    return names, tuple(kinds), tuple(edges_list), tuple(values_list), cell_per_record


def _distortion_matrix(row_keys, target_keys, cells, n_cols, flip_cost):
    cell_arr = np.array(cells, dtype=np.int64).reshape(len(cells), n_cols)
    row_cells = np.array([k[0] for k in row_keys])
    row_labels = np.array([k[1] for k in row_keys])
    tgt_cells = np.array([k[0] for k in target_keys])
    tgt_labels = np.array([k[1] for k in target_keys])
    if n_cols:
        diff = cell_arr[row_cells][:, None, :] != cell_arr[tgt_cells][None, :, :]
        hamming = diff.sum(axis=2) / n_cols
    else:
        hamming = np.zeros((len(row_keys), len(target_keys)))
    flips = (row_labels[:, None] != tgt_labels[None, :]).astype(float)
    return hamming + flip_cost * flips


def opp_fit(ds: TabularDataset, cfg: OppConfig = OppConfig()) -> OppMap:
    """Fit the conditional transformation table by line-searched mirror descent.

    Every iteration renormalizes each row onto the simplex; the penalty trace
    is non-increasing by construction. If no table drives both penalties to
    zero the best-effort table is returned with the residuals recorded.
    """
    names, kinds, edges, values, cell_per_record = _discretize_columns(ds, cfg)
    domain = 1
    for vals in values:
        domain *= len(vals)
    if domain * 2 > _MAX_DOMAIN_CELLS:
        raise FitError(
            f"discretized domain too large: {domain} cells x 2 labels > {_MAX_DOMAIN_CELLS}"
        )
    cells = tuple(sorted(set(cell_per_record)))
    cell_index = {c: i for i, c in enumerate(cells)}
    w = ds.weights / ds.weights.sum()

    row_prob, target_prob = {}, {}
    for i in range(ds.n):
        cell = cell_index[cell_per_record[i]]
        row_prob[(cell, int(ds.labels[i]), int(ds.protected[i]))] = (
            row_prob.get((cell, int(ds.labels[i]), int(ds.protected[i])), 0.0) + w[i]
        )
        target_prob[(cell, int(ds.labels[i]))] = target_prob.get((cell, int(ds.labels[i])), 0.0) + w[i]
    row_keys = tuple(sorted(row_prob))
    target_keys = tuple(sorted(target_prob))
    p_row = np.array([row_prob[k] for k in row_keys])
    p_target = np.array([target_prob[k] for k in target_keys])

    n_cols = len(names)
    dist = _distortion_matrix(row_keys, target_keys, cells, n_cols, cfg.label_flip_cost)

    y1 = np.array([k[1] == 1 for k in target_keys], dtype=float)           # targets with favorable label
    row_group = np.array([k[2] for k in row_keys])
    p_group = np.array([p_row[row_group == s].sum() for s in (0, 1)])
    if (p_group <= 0).any():
        raise FitError("both groups must be present")
    target_rate = float((ds.weights * (ds.labels == 1)).sum() / ds.weights.sum())
    if target_rate <= 0:
        raise FitError("target label distribution degenerate: no favorable labels")

    table = np.exp(-4.0 * dist)
    table /= table.sum(axis=1, keepdims=True)

    def evaluate(tab):
        p_hat = p_row @ tab
        with np.errstate(divide="ignore"):
            logs = np.where(p_hat > 0, np.log(np.where(p_hat > 0, p_hat, 1.0) / p_target), 0.0)
        kl = float((p_hat * logs).sum())
        rates = np.array([
            float((p_row[row_group == s] @ tab[row_group == s]) @ y1) / p_group[s] for s in (0, 1)
        ])
        ratios = rates / target_rate
        hinges = np.maximum(0.0, np.abs(ratios - 1.0) - cfg.epsilon)
        expected = float((p_row[:, None] * tab * dist).sum())
        dist_hinge = max(0.0, expected - cfg.distortion_budget)
        j = kl + cfg.rho_fair * float(hinges.sum()) + cfg.rho_dist * dist_hinge
        return j, logs, ratios, hinges, expected, dist_hinge

    obj, logs, ratios, hinges, expected, dist_hinge = evaluate(table)
    if not math.isfinite(obj):
        raise FitError(f"non-finite objective at initialization: {obj}")
    trace = [float(obj)]
    drift = float(np.abs(table.sum(axis=1) - 1.0).max())
    eta = 1.0
    for _ in range(cfg.max_iter):
        # gradient per row, normalized by the row mass
        grad = (logs + 1.0)[None, :].repeat(len(row_keys), axis=0)
        active = hinges > 0
        for s in (0, 1):
            if active[s]:
                sign = math.copysign(1.0, ratios[s] - 1.0)
                grad[row_group == s] += cfg.rho_fair * sign * y1[None, :] / (p_group[s] * target_rate)
        if dist_hinge > 0:
            grad += cfg.rho_dist * dist

        accepted = False
        trial = eta
        for _ in range(60):
            # mirror step; the per-row exponent shift keeps exp in range and
            # cancels in the normalization
            exponent = -trial * grad
            exponent -= exponent.max(axis=1, keepdims=True)
            cand = table * np.exp(exponent)
            row_mass = cand.sum(axis=1, keepdims=True)
            if (row_mass <= 0).any():
                trial *= 0.5
                continue
            cand /= row_mass
            cand_obj, c_logs, c_ratios, c_hinges, c_expected, c_dist_hinge = evaluate(cand)
            if math.isfinite(cand_obj) and cand_obj < obj:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break
        table = cand
        drift = max(drift, float(np.abs(table.sum(axis=1) - 1.0).max()))
        obj, logs, ratios, hinges, expected, dist_hinge = cand_obj, c_logs, c_ratios, c_hinges, c_expected, c_dist_hinge
        trace.append(float(obj))
        eta = min(trial * 2.0, 1000.0)
        if len(trace) >= 2 and (trace[-2] - trace[-1]) < 1e-12 * max(abs(trace[-2]), 1.0):
            break

    fair_residual = float(np.maximum(0.0, np.abs(ratios - 1.0) - cfg.epsilon).max())
    dist_residual = float(max(0.0, expected - cfg.distortion_budget))
    if fair_residual > 1e-3 or dist_residual > 1e-3:
        warnings.warn(
            "optimized pre-processing could not satisfy both constraints: "
            f"fairness residual {fair_residual:.4g}, distortion residual {dist_residual:.4g}",
            FairbenchWarning,
        )

    return OppMap(
        column_names=tuple(names),
        column_kinds=kinds,
        bin_edges=edges,
        bin_values=values,
        cells=cells,
        row_keys=row_keys,
        target_keys=target_keys,
        table=table,
        epsilon=cfg.epsilon,
        distortion_budget=cfg.distortion_budget,
        penalty_trace=tuple(trace),
        fairness_residual=fair_residual,
        distortion_residual=dist_residual,
        row_sum_drift=drift,
        seed=cfg.seed,
    )


def _encode_record_cells(mapping: OppMap, ds: TabularDataset):
    """Cell tuple per record under the fitted binning; out-of-domain levels clamp."""
    clamped = 0
    per_col_codes = []
    for name, kind, edges, values in zip(
        mapping.column_names, mapping.column_kinds, mapping.bin_edges, mapping.bin_values
    ):
        if name not in ds.feature_names:
            raise FitError(f"dataset lacks fitted column {name!r}")
        col = ds.features[:, ds.feature_names.index(name)]
        if kind == "binned":
            per_col_codes.append(np.searchsorted(np.asarray(edges), col, side="right"))
        else:
            levels = np.asarray(edges)
            codes = np.empty(len(col), dtype=np.int64)
            for i, v in enumerate(col):
                hits = np.flatnonzero(levels == v)
                if len(hits):
                    codes[i] = hits[0]
                else:
                    codes[i] = int(np.abs(levels - v).argmin())
                    clamped += 1
            per_col_codes.append(codes)
    if clamped:
        warnings.warn(f"{clamped} value(s) outside the fitted levels clamped to the nearest", FairbenchWarning)
    return [tuple(int(c[i]) for c in per_col_codes) for i in range(ds.n)]


def opp_transform(mapping: OppMap, ds: TabularDataset, seed: int = None) -> TabularDataset:
    """Resample each record's cell and label from the fitted conditional table.

    Numeric columns take their target bin's training median; group membership
    and weights are preserved. Deterministic for a given seed.
    """
    rng = np.random.default_rng(mapping.seed if seed is None else seed)
    cell_index = {c: i for i, c in enumerate(mapping.cells)}
    record_cells = _encode_record_cells(mapping, ds)
    row_index = {k: r for r, k in enumerate(mapping.row_keys)}

    cell_arr = np.array(mapping.cells, dtype=np.int64)
    clamped_rows = 0
    features = ds.features.copy()
    labels = ds.labels.copy()
    col_pos = [ds.feature_names.index(n) for n in mapping.column_names]

    for i in range(ds.n):
        cell = cell_index.get(record_cells[i])
        if cell is None:
            # unseen combination: snap to the nearest observed cell by Hamming distance
            diffs = (cell_arr != np.array(record_cells[i])).sum(axis=1)
            cell = int(diffs.argmin())
            clamped_rows += 1
        key = (cell, int(ds.labels[i]), int(ds.protected[i]))
        row = row_index.get(key)
        if row is None:
            # (cell, label, group) unseen in training: prefer rows sharing the
            # label and group, then the group alone, then anything
            for match in (lambda k: k[1:] == key[1:], lambda k: k[2] == key[2], lambda k: True):
                candidates = [r for r, k in enumerate(mapping.row_keys) if match(k)]
                if candidates:
                    break
            row = min(candidates, key=lambda r: abs(mapping.row_keys[r][0] - cell))
            clamped_rows += 1
        t = rng.choice(len(mapping.target_keys), p=mapping.table[row])
        tgt_cell, tgt_label = mapping.target_keys[t]
        labels[i] = tgt_label
        for j, name_pos in enumerate(col_pos):
            features[i, name_pos] = mapping.bin_values[j][mapping.cells[tgt_cell][j]]
    if clamped_rows:
        warnings.warn(f"{clamped_rows} record(s) outside the fitted domain snapped to the nearest cell", FairbenchWarning)

    return ds.replace(features=features, labels=labels).with_provenance_step("opp")
