"""Independent scalar reference implementations shared by the unit and acceptance tests.

Deliberately loop-based and free of the vectorized helpers in the package.
"""

import math

import numpy as np

from anisoswarm.model import ModelParams


def angle_deg(heading, offset):
    """Unsigned angle between two vectors: acos of the normalized dot product."""
    c = (heading[0] * offset[0] + heading[1] * offset[1]) / (math.hypot(*heading) * math.hypot(*offset))
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def brute_force_neighbors(pos, heads, p: ModelParams):
    """O(N^2) scalar oracle: filter by zone (acos angles), sort by (distance, index)."""
    N = len(pos)
    att, rep = [], []
    for i in range(N):
        cand_a, cand_r = [], []
        for j in range(N):
            if j == i:
                continue
            off = (pos[j][0] - pos[i][0], pos[j][1] - pos[i][1])
            d = math.hypot(*off)
            ang = angle_deg(heads[i], off)
            if p.alpha_a >= 360 or ang <= p.alpha_a / 2:
                cand_a.append((d, j))
            if d <= p.R_sr or p.alpha_r >= 360 or ang <= p.alpha_r / 2:
                cand_r.append((d, j))
        att.append([j for _, j in sorted(cand_a)[: p.n]])
        rep.append([j for _, j in sorted(cand_r)[: p.n]])
    return att, rep


def random_case(seed):
    """Random positions, headings and zone parameters with N <= 50."""
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 51))
    pos = rng.uniform(0, 15, size=(N, 2))
    th = rng.uniform(0, 2 * np.pi, size=N)
    heads = np.column_stack([np.cos(th), np.sin(th)])
    p = ModelParams(
        N=N,
        n=int(rng.integers(1, N)),
        alpha_a=float(rng.choice([360.0, rng.uniform(1, 360)])),
        alpha_r=float(rng.choice([360.0, rng.uniform(1, 360)])),
        R_sr=float(rng.uniform(0.1, 3)),
    )
    return pos, heads, p


def two_body_d2(t, d0, xi):
    """Closed form of |x_2 - x_1|^2 for the isotropic n = 1 pair: (d^2)' = -4 (d^2 - xi^2)."""
    return xi**2 + (d0**2 - xi**2) * math.exp(-4.0 * t)
