from spillcheck.inference.model import (
    ModelDesign,
    ModelParams,
    log_likelihood,
    log_posterior,
    log_prior,
    log_prior_components,
    log_rate,
)
from spillcheck.inference.sampler import (
    MetropolisWithinGibbs,
    SamplerInitError,
    fit,
    fit_design,
)
from spillcheck.inference.samples import PosteriorSamples
from spillcheck.inference.variants import VariantTraits, get_variant, variant_traits

__all__ = [
    "MetropolisWithinGibbs",
    "ModelDesign",
    "ModelParams",
    "PosteriorSamples",
    "SamplerInitError",
    "VariantTraits",
    "fit",
    "fit_design",
    "get_variant",
    "log_likelihood",
    "log_posterior",
    "log_prior",
    "log_prior_components",
    "log_rate",
    "variant_traits",
]
