from spillcheck.epidemic.dynamics import EpidemicState, decompose_rate, infection_rate, step
from spillcheck.epidemic.observation import observe
from spillcheck.epidemic.panel import PanelDataset, SimulationTruth
from spillcheck.epidemic.scenario import (
    log_infection_rate,
    replicate_seed,
    simulate_replicate,
    simulate_scenario,
)

__all__ = [
    "EpidemicState",
    "PanelDataset",
    "SimulationTruth",
    "decompose_rate",
    "infection_rate",
    "log_infection_rate",
    "observe",
    "replicate_seed",
    "simulate_replicate",
    "simulate_scenario",
    "step",
]
