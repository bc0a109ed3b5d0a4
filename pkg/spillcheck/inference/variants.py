"""Registry of the four model variants and what each one switches off."""

from __future__ import annotations

from dataclasses import dataclass

from spillcheck.models.profiles import ModelVariant


@dataclass(frozen=True)
class VariantTraits:
    has_nugget: bool  # exp(v~) term in the Poisson rate
    uses_scores: bool  # e, e~ and their products as regressors
    spatial: bool  # rho_s free; otherwise fixed at 0


_VARIANT_TRAITS: dict[ModelVariant, VariantTraits] = {
    ModelVariant.FULL: VariantTraits(has_nugget=True, uses_scores=True, spatial=True),
    ModelVariant.NO_NUGGET: VariantTraits(has_nugget=False, uses_scores=True, spatial=True),
    ModelVariant.NO_PS: VariantTraits(has_nugget=True, uses_scores=False, spatial=True),
    ModelVariant.NON_SPATIAL: VariantTraits(has_nugget=False, uses_scores=True, spatial=False),
}

_ALIASES: dict[str, str] = {
    "nonugget": "no-nugget",
    "no_nugget": "no-nugget",
    "nops": "no-ps",
    "no_ps": "no-ps",
    "nonspatial": "non-spatial",
    "non_spatial": "non-spatial",
}


def get_variant(name: str | ModelVariant) -> ModelVariant:
    """Look up a variant by value or alias.

    Raises KeyError with a message listing the accepted names.
    """
    if isinstance(name, ModelVariant):
        return name
    key = name.lower().strip()
    key = _ALIASES.get(key, key)
    try:
        return ModelVariant(key)
    except ValueError:
        available = sorted({v.value for v in ModelVariant} | set(_ALIASES))
        message = f"Unknown model variant '{name}'. Available: {', '.join(available)}"
        raise KeyError(message) from None


def variant_traits(variant: ModelVariant) -> VariantTraits:
    return _VARIANT_TRAITS[variant]
