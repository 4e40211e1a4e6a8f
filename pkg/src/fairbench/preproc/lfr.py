"""Fair representation learning through a small set of prototype points.

Inputs are soft-assigned to K prototypes via a softmax over negative squared
distances; the objective balances group parity of the prototype assignments,
reconstruction fidelity, and label fidelity. Expects z-scored features (the
pipeline standardizes before fitting).
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import FitError
from ..dataset.tabular import TabularDataset

_PROB_CLIP = 1e-6


@dataclass(frozen=True)
class LfrModel:
    prototypes: np.ndarray       # (K, d)
    label_weights: np.ndarray    # (K,) in [0, 1]
    weight_parity: float         # A_z
    weight_reconstruction: float # A_x
    weight_label: float          # A_y
    objective_trace: tuple
    seed: int

    def __post_init__(self):
        if self.prototypes.shape[0] < 2:
            raise FitError("need at least 2 prototypes")
        if len(self.objective_trace) >= 2 and self.objective_trace[-1] > self.objective_trace[0]:
            raise FitError("objective trace increased; fit is invalid")

    def dump_debug(self, path):
        """Versioned text dump of the fitted model for inspection."""
        lines = ["fairbench-model-dump v1", "kind lfr",
                 f"K {self.prototypes.shape[0]}", f"d {self.prototypes.shape[1]}",
                 f"weights A_z={self.weight_parity} A_x={self.weight_reconstruction} A_y={self.weight_label}",
                 f"seed {self.seed}",
                 "trace " + " ".join(f"{v:.10g}" for v in self.objective_trace)]
        for k, (v, w) in enumerate(zip(self.prototypes, self.label_weights)):
            lines.append(f"prototype {k} w={w!r} " + " ".join(repr(float(x)) for x in v))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")


def _soft_assignments(x, prototypes):
    """Softmax over -||x - v_k||^2, row-wise, numerically stabilized."""
    d2 = ((x[:, None, :] - prototypes[None, :, :]) ** 2).sum(axis=2)
    a = -d2
    a -= a.max(axis=1, keepdims=True)
    e = np.exp(a)
    return e / e.sum(axis=1, keepdims=True)


def lfr_objective(x, y, s, prototypes, label_weights, a_z, a_x, a_y):
    """Objective value and its three components at the given parameters."""
    m = _soft_assignments(x, prototypes)
    n = x.shape[0]
    mean1 = m[s == 1].mean(axis=0)
    mean0 = m[s == 0].mean(axis=0)
    l_parity = np.abs(mean1 - mean0).sum()
    recon = m @ prototypes
    l_recon = ((x - recon) ** 2).sum() / n
    yhat = np.clip(m @ label_weights, _PROB_CLIP, 1.0 - _PROB_CLIP)
    l_label = -(y * np.log(yhat) + (1.0 - y) * np.log(1.0 - yhat)).mean()
    return a_z * l_parity + a_x * l_recon + a_y * l_label, (l_parity, l_recon, l_label)


def lfr_gradients(x, y, s, prototypes, label_weights, a_z, a_x, a_y):
    """Analytic gradients of the objective w.r.t. prototypes and label weights."""
    n, _ = x.shape
    m = _soft_assignments(x, prototypes)
    n1 = int((s == 1).sum())
    n0 = n - n1

    # dL/dM for each component
    sign_parity = np.sign(m[s == 1].mean(axis=0) - m[s == 0].mean(axis=0))
    g_parity = np.where((s == 1)[:, None], sign_parity / n1, -sign_parity / n0)

    recon = m @ prototypes
    resid = recon - x  # (n, d)
    g_recon = (2.0 / n) * (resid @ prototypes.T)

    yhat_raw = m @ label_weights
    clipped = (yhat_raw < _PROB_CLIP) | (yhat_raw > 1.0 - _PROB_CLIP)
    yhat = np.clip(yhat_raw, _PROB_CLIP, 1.0 - _PROB_CLIP)
    dldy = (yhat - y) / (yhat * (1.0 - yhat)) / n
    dldy[clipped] = 0.0
    g_label = dldy[:, None] * label_weights[None, :]

    g_total = a_z * g_parity + a_x * g_recon + a_y * g_label

    # back through the softmax: H = M * (G - sum_k G M), then through -||x-v||^2
    row_dot = (g_total * m).sum(axis=1, keepdims=True)
    h = m * (g_total - row_dot)
    grad_v = 2.0 * (h.T @ x - h.sum(axis=0)[:, None] * prototypes)
    # direct dependence of the reconstruction term on the prototypes
    grad_v += a_x * (2.0 / n) * (m.T @ resid)

    grad_w = a_y * (m.T @ dldy)
    return grad_v, grad_w


def lfr_fit(ds: TabularDataset, n_prototypes: int = 10, a_z: float = 50.0,
            a_x: float = 0.01, a_y: float = 1.0, seed: int = 0,
            max_iter: int = 5000, tol: float = 1e-6) -> LfrModel:
    """Projected gradient descent with backtracking; label weights clamped to [0,1].

    Prototypes start at K records sampled by seed. Stops when the relative
    objective decrease falls below `tol` or after `max_iter` accepted steps.
    """
    x = ds.features
    y = ds.labels.astype(np.float64)
    s = ds.protected
    n = x.shape[0]
    if n_prototypes >= n:
        raise FitError(f"need fewer prototypes than rows (K={n_prototypes}, n={n})")
    if n_prototypes < 2:
        raise FitError("need at least 2 prototypes")
    if not ((s == 0).any() and (s == 1).any()):
        raise FitError("both groups must be present")

    rng = np.random.default_rng(seed)
    prototypes = x[rng.choice(n, size=n_prototypes, replace=False)].copy()
    label_weights = rng.random(n_prototypes)

    obj, _ = lfr_objective(x, y, s, prototypes, label_weights, a_z, a_x, a_y)
    if not math.isfinite(obj):
        raise FitError(f"non-finite objective at initialization: {obj}")
    trace = [float(obj)]
    step = 1.0
    for _ in range(max_iter):
        grad_v, grad_w = lfr_gradients(x, y, s, prototypes, label_weights, a_z, a_x, a_y)
        accepted = False
        trial = step
        for _ in range(60):
            cand_v = prototypes - trial * grad_v
            cand_w = np.clip(label_weights - trial * grad_w, 0.0, 1.0)
            cand_obj, _ = lfr_objective(x, y, s, cand_v, cand_w, a_z, a_x, a_y)
            if not math.isfinite(cand_obj):
                raise FitError(f"non-finite objective during fit: {cand_obj}")
            if cand_obj < obj:
                accepted = True
                break
            trial *= 0.5
        if not accepted:
            break
        prototypes, label_weights = cand_v, cand_w
        rel_drop = (obj - cand_obj) / max(abs(obj), 1e-30)
        obj = cand_obj
        trace.append(float(obj))
        step = trial * 2.0
        if rel_drop < tol:
            break

    return LfrModel(
        prototypes=prototypes,
        label_weights=label_weights,
        weight_parity=a_z,
        weight_reconstruction=a_x,
        weight_label=a_y,
        objective_trace=tuple(trace),
        seed=seed,
    )


def lfr_transform(model: LfrModel, ds: TabularDataset) -> TabularDataset:
    """Replace features by the prototype reconstruction and labels by [yhat >= 0.5]."""
    if ds.dim != model.prototypes.shape[1]:
        raise FitError(
            f"dimension mismatch: model fitted on d={model.prototypes.shape[1]}, dataset has d={ds.dim}"
        )
    m = _soft_assignments(ds.features, model.prototypes)
    yhat = m @ model.label_weights
    return ds.replace(
        features=m @ model.prototypes,
        labels=(yhat >= 0.5).astype(np.int64),
    ).with_provenance_step("lfr")
