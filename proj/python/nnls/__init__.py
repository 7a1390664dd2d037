"""Numerical lab for the nonlocal NLS i u_t - u_xx = u^2 conj(u(-x))."""

import json as _json
from pathlib import Path as _Path

from ._core import (  # noqa: F401
    ConfigError,
    DegenerateState,
    Field,
    Grid,
    SingularEvaluation,
    blowup_time,
    derivative,
    distance_to_q,
    evolve,
    fit_modulation,
    ground_state,
    hamiltonian,
    identity_residuals,
    inner,
    norm_hs,
    norm_lp,
    q_profiles,
    quasipower,
    reflect,
    reflect_conjugate,
    spectrum,
    standing_wave,
    two_param_soliton,
)
from . import _core


def _text(config):
    if isinstance(config, (str, _Path)) and _Path(config).exists():
        return _Path(config).read_text()
    if isinstance(config, dict):
        return _json.dumps(config)
    raise TypeError("config must be a dict or a path to a JSON file")


def canonical_config(config):
    """Validated config with every default filled in."""
    return _json.loads(_core.canonical_config(_text(config)))


def content_hash(obj):
    return _core.content_hash(_json.dumps(obj))


def run_scenario(config):
    """Run one scenario; returns the report as a dict."""
    return _json.loads(_core.run_scenario(_text(config)))
