"""Python bindings for gfdyn."""

import json as _json

from ._core import (
    ConfigError,
    DynamicsError,
    EntireMap,
    commands,
    fit_germ,
    parabolic_points,
    ramification_data,
    sine_affine_parameter,
    standard_examples,
    validated_radius,
)
from . import _core

__all__ = [
    "ConfigError",
    "DynamicsError",
    "EntireMap",
    "commands",
    "fit_germ",
    "parabolic_points",
    "ramification_data",
    "render",
    "run",
    "sine_affine_parameter",
    "standard_examples",
    "validated_radius",
]


def run(command, config=None, out_dir=""):
    """Run a subcommand; `config` is a dict in the config-file layout."""
    text = _core.run_command(command, _json.dumps(config or {}), str(out_dir))
    return _json.loads(text)


def render(config=None, threads=1):
    """Render the configured viewport.

    Returns a (height, width, 3) uint8 array when numpy is available,
    otherwise the raw bytes, plus the image hash.
    """
    rgb, width, height, digest = _core.render(_json.dumps(config or {}), threads)
    try:
        import numpy as np
    except ImportError:
        return rgb, digest
    return np.frombuffer(rgb, dtype=np.uint8).reshape(height, width, 3), digest
