"""The observed panel {Y, A, X, N} on a graph, and its directory layout.

A dataset directory holds:

    Y.csv, A.csv, X_<name>.csv   J rows x T columns, header `region,t1,...,tT`
    N.csv                        header `region,population`
    graph.txt                    edge list (see spillcheck.graph.write_adjacency)
    panel.json                   covariate order and period labels
    truth.json                   latent paths, only for simulated data
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from spillcheck.graph import AdjacencyGraph, IsolatedPolicy, read_adjacency, write_adjacency
from spillcheck.models.profiles import BetaModel

_FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False)
class SimulationTruth:
    """Latent quantities behind a simulated panel, all J x T."""

    S: np.ndarray
    I: np.ndarray  # noqa: E741
    R: np.ndarray
    rate: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    log_beta: np.ndarray
    beta: BetaModel
    initial_field: np.ndarray

    def to_json(self) -> dict:
        arrays = {
            name: getattr(self, name).tolist()
            for name in ("S", "I", "R", "rate", "theta", "v", "log_beta", "initial_field")
        }
        return {**arrays, "beta": self.beta.model_dump()}

    @classmethod
    def from_json(cls, data: dict) -> SimulationTruth:
        arrays = {
            name: np.asarray(data[name], dtype=float)
            for name in ("S", "I", "R", "rate", "theta", "v", "log_beta", "initial_field")
        }
        return cls(**arrays, beta=BetaModel.model_validate(data["beta"]))


@dataclass(frozen=True, eq=False)
class PanelDataset:
    graph: AdjacencyGraph
    Y: np.ndarray
    A: np.ndarray
    X: np.ndarray
    N: np.ndarray
    covariate_names: tuple[str, ...] = ()
    period_labels: tuple[str, ...] = ()
    region_ids: tuple[str, ...] = ()
    isolated: IsolatedPolicy = "error"
    truth: SimulationTruth | None = None

    def __post_init__(self) -> None:
        n_regions = self.graph.n_nodes
        if self.Y.ndim != 2 or self.Y.shape[0] != n_regions:
            raise ValueError(f"Y has shape {self.Y.shape}, expected ({n_regions}, T)")
        periods = self.Y.shape[1]
        if self.A.shape != (n_regions, periods):
            raise ValueError(f"A has shape {self.A.shape}, expected {(n_regions, periods)}")
        if self.X.ndim != 3 or self.X.shape[:2] != (n_regions, periods):
            raise ValueError(f"X has shape {self.X.shape}, expected ({n_regions}, {periods}, q)")
        if self.N.shape != (n_regions,):
            raise ValueError(f"N has shape {self.N.shape}, expected ({n_regions},)")
        if not np.issubdtype(self.Y.dtype, np.integer):
            raise ValueError(f"Y must hold integer counts, got dtype {self.Y.dtype}")
        if np.any(self.Y < 0):
            raise ValueError("Y must be nonnegative")
        if np.any(self.N <= 0):
            raise ValueError("Populations N must be positive")
        # Fill default labels; object.__setattr__ because the dataclass is frozen.
        if not self.covariate_names:
            names = tuple(str(k + 1) for k in range(self.X.shape[2]))
            object.__setattr__(self, "covariate_names", names)
        if len(self.covariate_names) != self.X.shape[2]:
            raise ValueError(
                f"{len(self.covariate_names)} covariate names for {self.X.shape[2]} covariates"
            )
        if not self.period_labels:
            object.__setattr__(self, "period_labels", tuple(f"t{t + 1}" for t in range(periods)))
        if len(self.period_labels) != periods:
            raise ValueError(f"{len(self.period_labels)} period labels for {periods} periods")
        if not self.region_ids:
            object.__setattr__(self, "region_ids", tuple(str(j) for j in range(n_regions)))
        if len(self.region_ids) != n_regions:
            raise ValueError(f"{len(self.region_ids)} region ids for {n_regions} regions")

    @property
    def n_regions(self) -> int:
        return self.graph.n_nodes

    @property
    def periods(self) -> int:
        return self.Y.shape[1]

    @property
    def n_covariates(self) -> int:
        return self.X.shape[2]

    def save(self, directory: str | Path) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        _write_matrix(self.Y, self, out / "Y.csv")
        _write_matrix(self.A, self, out / "A.csv")
        for k, name in enumerate(self.covariate_names):
            _write_matrix(self.X[:, :, k], self, out / f"X_{name}.csv")
        pd.DataFrame(
            {"population": self.N}, index=pd.Index(self.region_ids, name="region")
        ).to_csv(out / "N.csv", float_format=_FLOAT_FORMAT)
        write_adjacency(self.graph, out / "graph.txt")
        meta = {
            "covariates": list(self.covariate_names),
            "periods": list(self.period_labels),
            "isolated": self.isolated,
        }
        (out / "panel.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        if self.truth is not None:
            (out / "truth.json").write_text(json.dumps(self.truth.to_json()), encoding="utf-8")
        return out

    @classmethod
    def load(cls, directory: str | Path) -> PanelDataset:
        src = Path(directory)
        if not src.is_dir():
            raise FileNotFoundError(f"Dataset directory not found: {src}")
        meta_path = src / "panel.json"
        meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else {}

        y_frame = _read_matrix(src / "Y.csv")
        y_values = y_frame.to_numpy()
        if not np.all(np.equal(np.mod(y_values, 1), 0)):
            raise ValueError(f"{src / 'Y.csv'}: counts must be integers")
        names = meta.get("covariates") or sorted(p.stem[2:] for p in src.glob("X_*.csv"))
        layers = [_read_matrix(src / f"X_{name}.csv").to_numpy(dtype=float) for name in names]
        x_values = np.stack(layers, axis=2) if layers else np.zeros((*y_values.shape, 0))
        population = pd.read_csv(
            src / "N.csv", index_col=0, dtype={"region": str}, float_precision="round_trip"
        )
        truth_path = src / "truth.json"
        truth = (
            SimulationTruth.from_json(json.loads(truth_path.read_text(encoding="utf-8")))
            if truth_path.exists()
            else None
        )
        return cls(
            graph=read_adjacency(src / "graph.txt"),
            Y=y_values.astype(np.int64),
            A=_read_matrix(src / "A.csv").to_numpy(dtype=float),
            X=x_values,
            N=population["population"].to_numpy(dtype=float),
            covariate_names=tuple(names),
            period_labels=tuple(meta.get("periods") or y_frame.columns),
            region_ids=tuple(str(r) for r in y_frame.index),
            isolated=meta.get("isolated", "error"),
            truth=truth,
        )


def _write_matrix(values: np.ndarray, dataset: PanelDataset, path: Path) -> None:
    frame = pd.DataFrame(
        values,
        index=pd.Index(dataset.region_ids, name="region"),
        columns=list(dataset.period_labels),
    )
    frame.to_csv(path, float_format=_FLOAT_FORMAT)


def _read_matrix(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise FileNotFoundError(f"Panel file not found: {path}")
    return pd.read_csv(path, index_col=0, dtype={"region": str}, float_precision="round_trip")
