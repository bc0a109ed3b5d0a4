"""Retained MCMC draws and their on-disk layout.

A samples directory holds:

    draws.csv             one row per retained draw, one column per scalar
    latent_mean_<x>.csv   posterior means of theta, g (and v_tilde), J x T_w
    latent_<x>.npy        thinned latent draws, when kept
    manifest.json         fit config, seed, acceptance rates, clamp count, versions
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from spillcheck.models.profiles import FitConfig, ModelVariant
from spillcheck.models.results import RunManifest

_FLOAT_FORMAT = "%.17g"


@dataclass(eq=False)
class PosteriorSamples:
    names: tuple[str, ...]
    draws: np.ndarray  # n_draws x n_scalars
    variant: ModelVariant
    config: FitConfig
    acceptance: dict[str, float] = field(default_factory=dict)
    clamp_count: int = 0
    latent_means: dict[str, np.ndarray] = field(default_factory=dict)
    latent_draws: dict[str, np.ndarray] = field(default_factory=dict)
    period_labels: tuple[str, ...] = ()
    versions: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.draws.ndim != 2 or self.draws.shape[1] != len(self.names):
            raise ValueError(
                f"draws shape {self.draws.shape} does not match {len(self.names)} names"
            )

    @property
    def n_draws(self) -> int:
        return self.draws.shape[0]

    def column(self, name: str) -> np.ndarray:
        try:
            return self.draws[:, self.names.index(name)]
        except ValueError:
            raise KeyError(
                f"No parameter '{name}' in samples. Available: {', '.join(self.names)}"
            ) from None

    def as_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.draws, columns=list(self.names))
        frame.index.name = "draw"
        return frame

    def manifest(self) -> RunManifest:
        return RunManifest(
            command="fit",
            seed=self.config.seed,
            config={"variant": self.variant.value, "fit": self.config.model_dump(mode="json")},
            versions=self.versions,
            acceptance=self.acceptance,
            clamp_count=self.clamp_count,
            extra={"period_labels": list(self.period_labels)},
        )

    def save(self, directory: str | Path) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        self.as_frame().to_csv(out / "draws.csv", float_format=_FLOAT_FORMAT)
        for name, values in self.latent_means.items():
            pd.DataFrame(values, columns=list(self.period_labels) or None).to_csv(
                out / f"latent_mean_{name}.csv", float_format=_FLOAT_FORMAT, index=False
            )
        for name, values in self.latent_draws.items():
            np.save(out / f"latent_{name}.npy", values)
        (out / "manifest.json").write_text(
            self.manifest().model_dump_json(indent=2) + "\n", encoding="utf-8"
        )
        return out

    @classmethod
    def load(cls, directory: str | Path) -> PosteriorSamples:
        src = Path(directory)
        draws_path, manifest_path = src / "draws.csv", src / "manifest.json"
        for path in (draws_path, manifest_path):
            if not path.exists():
                raise FileNotFoundError(f"Samples file not found: {path}")
        manifest = RunManifest.model_validate(json.loads(manifest_path.read_text("utf-8")))
        frame = pd.read_csv(draws_path, index_col=0, float_precision="round_trip")
        latent_means = {
            path.stem[len("latent_mean_") :]: pd.read_csv(
                path, float_precision="round_trip"
            ).to_numpy(dtype=float)
            for path in sorted(src.glob("latent_mean_*.csv"))
        }
        latent_draws = {
            path.stem[len("latent_") :]: np.load(path) for path in sorted(src.glob("latent_*.npy"))
        }
        return cls(
            names=tuple(frame.columns),
            draws=frame.to_numpy(dtype=float),
            variant=ModelVariant(manifest.config["variant"]),
            config=FitConfig.model_validate(manifest.config["fit"]),
            acceptance=manifest.acceptance,
            clamp_count=manifest.clamp_count,
            latent_means=latent_means,
            latent_draws=latent_draws,
            period_labels=tuple(manifest.extra.get("period_labels", ())),
            versions=manifest.versions,
        )
