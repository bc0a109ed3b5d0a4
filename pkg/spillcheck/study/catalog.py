"""The six simulation scenarios.

Each scenario is the base configuration with its own spatial and temporal
dependence of the intervention (rho_s, rho_t), confounding strength
(rho_x) and SIR neighbor coupling (phi).
"""

from __future__ import annotations

from spillcheck.models.profiles import ScenarioConfig

_SCENARIO_REGISTRY: dict[str, ScenarioConfig] = {
    "1": ScenarioConfig(name="base", rho_s=0.9, rho_t=0.5, rho_x=0.5, phi=0.4),
    "2": ScenarioConfig(name="strong-spatial", rho_s=0.99, rho_t=0.5, rho_x=0.5, phi=0.4),
    "3": ScenarioConfig(name="strong-temporal", rho_s=0.3, rho_t=0.9, rho_x=0.5, phi=0.4),
    "4": ScenarioConfig(name="strong-spatiotemporal", rho_s=0.9, rho_t=0.9, rho_x=0.5, phi=0.4),
    "5": ScenarioConfig(name="strong-confounding", rho_s=0.9, rho_t=0.5, rho_x=0.9, phi=0.4),
    "6": ScenarioConfig(name="weak-sir-spatial", rho_s=0.9, rho_t=0.5, rho_x=0.5, phi=0.2),
}

_ALIASES: dict[str, str] = {config.name: key for key, config in _SCENARIO_REGISTRY.items()}


def resolve_scenario_key(key: str | int) -> str:
    """Canonical registry key ("1".."6") for a key or alias.

    Raises KeyError with a message listing the available scenarios.
    """
    text = str(key).lower().strip()
    text = _ALIASES.get(text, text)
    if text in _SCENARIO_REGISTRY:
        return text
    available = sorted(set(_SCENARIO_REGISTRY) | set(_ALIASES))
    raise KeyError(f"Unknown scenario '{key}'. Available: {', '.join(available)}")


def get_scenario(key: str | int) -> ScenarioConfig:
    """Look up a scenario by number or alias."""
    return _SCENARIO_REGISTRY[resolve_scenario_key(key)]


def scenario_index(key: str | int) -> int:
    return int(resolve_scenario_key(key))


def list_scenarios() -> list[tuple[str, ScenarioConfig]]:
    """All registered scenarios in catalog order."""
    return list(_SCENARIO_REGISTRY.items())
