import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anisoswarm.analysis import (
    closest_sets,
    hex_lattice,
    is_switching_configuration,
    n1_isotropic_params,
    selection_from_closest,
    verify_equilibrium,
)
from anisoswarm.integrator import step
from anisoswarm.model import Configuration, ModelParams


def brute_closest(pos, eps):
    """Scalar oracle for B_i: every j != i within eps of the minimum distance."""
    out = []
    for i, a in enumerate(pos):
        d = {j: math.dist(a, b) for j, b in enumerate(pos) if j != i}
        m = min(d.values())
        out.append(sorted(j for j, dj in d.items() if dj <= m + eps))
    return out


def test_closest_sets_collinear():
    cs = closest_sets(Configuration([[0, 0], [1, 0], [3, 0]]))
    assert [m.tolist() for m in cs.members] == [[1], [0], [1]]
    assert cs.distances.tolist() == [1.0, 1.0, 2.0]


def test_equilateral_triangle_every_agent_has_two():
    s = 4.0
    cfg = Configuration([[0, 0], [s, 0], [s / 2, s * math.sqrt(3) / 2]])
    cs = closest_sets(cfg, eps_tie=1e-9)
    assert cs.cardinality.tolist() == [2, 2, 2]
    assert is_switching_configuration(cfg)
    assert verify_equilibrium(cfg, s).is_filippov_equilibrium


def test_generic_configuration_is_not_switching():
    assert not is_switching_configuration(Configuration([[0, 0], [1, 0], [3, 0.5]]))


@pytest.mark.parametrize("rings,size", [(0, 1), (1, 7), (2, 19), (3, 37), (4, 61)])
def test_hex_lattice_size(rings, size):
    cfg = hex_lattice(rings, 2.0)
    assert cfg.N == size
    assert np.allclose(cfg.positions[0], 0.0)


def test_hex_lattice_cardinalities():
    cfg = hex_lattice(3, 5.0)
    card = closest_sets(cfg, eps_tie=1e-9).cardinality
    assert card[0] == 6
    # interior sites (rings 0..2) have six closest mates, the rim three or four
    interior = 1 + 3 * 2 * 3
    assert np.all(card[:interior] == 6)
    assert set(card[interior:].tolist()) == {3, 4}


def test_hex_lattice_rejects_bad_args():
    with pytest.raises(ValueError):
        hex_lattice(-1, 1.0)
    with pytest.raises(ValueError):
        hex_lattice(2, 0.0)


def test_verify_equilibrium_pair():
    assert verify_equilibrium(Configuration([[0, 0], [10, 0]]), 10.0).is_filippov_equilibrium
    verdict = verify_equilibrium(Configuration([[0, 0], [15, 0]]), 10.0)
    assert not verdict.is_filippov_equilibrium
    assert verdict.per_agent_distances == [15.0, 15.0]


def test_verify_equilibrium_lattice_and_scope():
    cfg = hex_lattice(2, 7.0)
    v = verify_equilibrium(cfg, 7.0)
    assert v.is_filippov_equilibrium and v.max_cardinality == 6 and v.in_scope
    assert not verify_equilibrium(cfg, 7.5).is_filippov_equilibrium
    out = verify_equilibrium(cfg, 7.0, params=ModelParams(N=19, n=2))
    assert not out.in_scope and out.note
    assert verify_equilibrium(cfg, 7.0, params=n1_isotropic_params(19, 7.0)).in_scope
    assert set(v.to_dict()) >= {"is_filippov_equilibrium", "max_cardinality", "in_scope"}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_closest_sets_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 30))
    # a coarse grid produces plenty of exact ties
    pos = rng.integers(0, 6, size=(N, 2)).astype(float)
    pos = np.unique(pos, axis=0)
    if len(pos) < 2:
        return
    cs = closest_sets(Configuration(pos), eps_tie=1e-9)
    assert [m.tolist() for m in cs.members] == brute_closest(pos.tolist(), 1e-9)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 2 * math.pi, allow_nan=False), min_size=7, max_size=7), st.floats(0.1, 100))
def test_seven_points_around_center_force_a_short_chord(angles, xi):
    # seven mates at distance xi around a center: some pair is closer than xi,
    # so no agent can have seven closest mates at equilibrium
    pts = [(xi * math.cos(a), xi * math.sin(a)) for a in angles]
    chord = min(math.dist(p, q) for k, p in enumerate(pts) for q in pts[k + 1:])
    assert chord < xi


@pytest.mark.parametrize("rings", [1, 2, 3])
def test_lattice_is_fixed_point_for_every_closest_selection(rings):
    xi = 6.0
    cfg = hex_lattice(rings, xi)
    p = n1_isotropic_params(cfg.N, xi)
    cs = closest_sets(cfg, eps_tie=1e-9 * xi)
    for k in range(int(cs.cardinality.max())):
        nb = selection_from_closest(cs, k)
        res = step(cfg, p, None, neighbors=nb)
        assert res.max_relative_drift < 1e-12
        assert res.max_speed < 1e-12


def test_selection_cycles_members():
    cs = closest_sets(Configuration([[0, 0], [1, 0], [-1, 0]]))
    assert cs.members[0].tolist() == [1, 2]
    assert selection_from_closest(cs, 0).attract[0].tolist() == [1]
    assert selection_from_closest(cs, 1).attract[0].tolist() == [2]
    assert selection_from_closest(cs, 2).attract[0].tolist() == [1]
