"""Named parameter sets for the three reference formations.

cluster
    isotropic zones, n = 1, xi = 10, N = 60 (crystal-like hexagonal cluster).
line
    alpha_r = 40, alpha_a = 180, n = 7, xi = 10, N = 30.
vee
    alpha_r = 60, alpha_a = 360, n = 7, xi = 13, v_max = 10, N = 30.

Parameters not listed keep the ModelParams defaults (R_sr = 1, L = 15,
v_max = 10, alpha_noise = 0). The anisotropic presets cap the run at 20000
iterations: on the repulsion-cone boundary the explicit Euler flow chatters
and never meets the steady-state test, while the formation itself is in place
after a few thousand steps.
"""

from __future__ import annotations

from .model import ConfigError, ModelParams

PRESETS: dict[str, dict] = {
    "cluster": dict(N=60, n=1, xi=10.0, alpha_a=360.0, alpha_r=360.0),
    "line": dict(N=30, n=7, xi=10.0, alpha_a=180.0, alpha_r=40.0, max_iters=20_000),
    "vee": dict(N=30, n=7, xi=13.0, alpha_a=360.0, alpha_r=60.0, v_max=10.0, max_iters=20_000),
}


def preset(name: str, **overrides) -> ModelParams:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return ModelParams(**{**base, **overrides})
