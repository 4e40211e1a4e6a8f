"""The four bias-mitigation transforms and a small dispatch layer.

`apply_method` is the stage-1 entry (transform a full dataset); `fit_method`
is the stage-2 entry (fit on the training split, expose a feature transform
for evaluation splits that keeps the true labels).
"""

from dataclasses import dataclass

from ..errors import SchemaError
from ..dataset.tabular import TabularDataset, apply_standardization, standardize
from ..util import derive_seed
from .lfr import LfrModel, lfr_fit, lfr_gradients, lfr_objective, lfr_transform
from .opp import OppConfig, OppMap, opp_fit, opp_transform
from .repair import DirConfig, dir_repair
from .reweigh import ReweighResult, reweigh

METHOD_NAMES = ("RW", "LFR", "DIR", "OPP")


def _take(params, defaults, method):
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise SchemaError(f"{method}: unknown parameter(s) {sorted(unknown)} (accepts {sorted(defaults)})")
    merged = dict(defaults)
    merged.update(params)
    return merged


def _dir_config(params):
    p = _take(params, {"repair_level": 1.0, "grid_size": 100, "columns": None}, "DIR")
    columns = tuple(p["columns"]) if p["columns"] is not None else None
    return DirConfig(repair_level=float(p["repair_level"]), grid_size=int(p["grid_size"]), columns=columns)


def _opp_config(params, seed):
    p = _take(
        params,
        {"epsilon": 0.05, "distortion_budget": 0.25, "bins": 5, "max_iter": 500,
         "rho_fair": 100.0, "rho_dist": 100.0, "label_flip_cost": 1.0, "columns": None},
        "OPP",
    )
    columns = tuple(p["columns"]) if p["columns"] is not None else None
    return OppConfig(
        epsilon=float(p["epsilon"]),
        distortion_budget=float(p["distortion_budget"]),
        bins=int(p["bins"]),
        max_iter=int(p["max_iter"]),
        seed=seed,
        rho_fair=float(p["rho_fair"]),
        rho_dist=float(p["rho_dist"]),
        label_flip_cost=float(p["label_flip_cost"]),
        columns=columns,
    )


def _lfr_params(params):
    return _take(
        params,
        {"prototypes": 10, "a_z": 50.0, "a_x": 0.01, "a_y": 1.0, "max_iter": 5000, "tol": 1e-6},
        "LFR",
    )


@dataclass(frozen=True)
class FittedMethod:
    """A transform fitted on one training split."""

    name: str
    train: TabularDataset
    _eval_transform: object

    def transform_eval(self, ds: TabularDataset) -> TabularDataset:
        """Transform an evaluation split's features; true labels are kept."""
        return self._eval_transform(ds)


def fit_method(name: str, train: TabularDataset, params=None, seed: int = 0) -> FittedMethod:
    if name == "RW":
        _take(params, {}, "RW")
        out = reweigh(train).dataset
        return FittedMethod(name, out, lambda ds: ds)

    if name == "DIR":
        cfg = _dir_config(params)
        # the repair has no train/apply separation: each split is repaired
        # against its own group distributions
        return FittedMethod(name, dir_repair(train, cfg), lambda ds: dir_repair(ds, cfg))

    if name == "LFR":
        p = _lfr_params(params)
        std_train, means, scales = standardize(train)
        model = lfr_fit(
            std_train,
            n_prototypes=int(p["prototypes"]),
            a_z=float(p["a_z"]), a_x=float(p["a_x"]), a_y=float(p["a_y"]),
            seed=seed, max_iter=int(p["max_iter"]), tol=float(p["tol"]),
        )

        def eval_lfr(ds, _model=model, _mu=means, _sd=scales):
            out = lfr_transform(_model, apply_standardization(ds, _mu, _sd))
            return out.replace(labels=ds.labels)

        return FittedMethod(name, lfr_transform(model, std_train), eval_lfr)

    if name == "OPP":
        cfg = _opp_config(params, seed)
        mapping = opp_fit(train, cfg)

        def eval_opp(ds, _m=mapping, _seed=seed):
            out = opp_transform(_m, ds, seed=derive_seed(_seed, "opp-eval", ds.n))
            return out.replace(labels=ds.labels)

        return FittedMethod(name, opp_transform(mapping, train, seed=seed), eval_opp)

    raise SchemaError(f"unknown method {name!r}; expected one of {METHOD_NAMES}")


def apply_method(name: str, ds: TabularDataset, params=None, seed: int = 0) -> TabularDataset:
    """Stage-1 application: fit on the full dataset and transform it."""
    return fit_method(name, ds, params, seed).train


__all__ = [
    "METHOD_NAMES",
    "DirConfig",
    "FittedMethod",
    "LfrModel",
    "OppConfig",
    "OppMap",
    "ReweighResult",
    "apply_method",
    "dir_repair",
    "fit_method",
    "lfr_fit",
    "lfr_gradients",
    "lfr_objective",
    "lfr_transform",
    "opp_fit",
    "opp_transform",
    "reweigh",
]
