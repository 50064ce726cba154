"""
Message-passing models and their parameters.
"""

from bikt.core.models.checkpoint import load_params, save_params
from bikt.core.models.layers import (
    Architecture,
    BoundParams,
    LayerSpec,
    ModelParams,
    PropagationKind,
    build_layer_specs,
    init_params,
)
from bikt.core.models.network import (
    Classifier,
    FeatureExtractor,
    ForwardOutput,
    MessagePassingModel,
    Mode,
    Propagation,
    build_model,
    derive_mlp,
    forward,
    mlp_forward,
    rebind,
    split_extractor_classifier,
)

__all__ = [
    "Architecture",
    "BoundParams",
    "Classifier",
    "FeatureExtractor",
    "ForwardOutput",
    "LayerSpec",
    "MessagePassingModel",
    "Mode",
    "ModelParams",
    "Propagation",
    "PropagationKind",
    "build_layer_specs",
    "build_model",
    "derive_mlp",
    "forward",
    "init_params",
    "load_params",
    "mlp_forward",
    "rebind",
    "save_params",
    "split_extractor_classifier",
]
