import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from anisoswarm.integrator import noise_rng, random_initial, run, simulate, step
from anisoswarm.metrics import nnd
from anisoswarm.model import Configuration, ModelParams, select_neighbors, velocity_field
from oracles import two_body_d2


def pair(d, xi, **kw):
    p = ModelParams(N=2, n=1, xi=xi, **kw)
    return Configuration([[0.0, 0.0], [d, 0.0]]), p


def test_equilibrium_pair_does_not_move():
    cfg, p = pair(4.0, 4.0)
    res = step(cfg, p, noise_rng(0))
    assert res.max_speed == pytest.approx(0.0, abs=1e-14)
    assert np.allclose(res.config.positions, cfg.positions, atol=1e-14)


def test_speed_cap_keeps_direction():
    # raw speed at d = 1, xi = 10: |1 - 100| = 99
    cfg, p = pair(1.0, 10.0, v_max=10.0)
    raw = velocity_field(cfg, select_neighbors(cfg, p), p)
    res = step(cfg, p, None)
    v = res.config.velocities
    assert np.hypot(*v[0]) == pytest.approx(10.0)
    assert np.allclose(v[0] / 10.0, raw[0] / np.hypot(*raw[0]))
    assert res.max_speed == pytest.approx(10.0)


def test_adaptive_dt_from_displacement_cap():
    xi = 2.0
    cfg, p = pair(2 * xi, xi, disp_cap=0.1 * xi, dt_max=0.1)
    res = step(cfg, p, None)
    assert res.max_speed == pytest.approx(1.5 * xi)
    assert res.dt_used == pytest.approx(1 / 15)


def test_dt_max_when_at_rest():
    cfg, p = pair(3.0, 3.0)
    assert step(cfg, p, None).dt_used == p.dt_max


def test_max_iters_zero_terminates_immediately():
    p = ModelParams(N=5, max_iters=0)
    rec = run(random_initial(p), p)
    assert rec.termination.kind == "max_iterations"
    assert rec.termination.iterations == 0
    assert len(rec.snapshots) == 1


def test_pair_relaxes_to_comfortable_distance():
    cfg, p = pair(9.0, 5.0)
    rec = run(cfg, p)
    assert rec.termination.kind == "steady_state"
    d = np.hypot(*(rec.final.positions[1] - rec.final.positions[0]))
    assert abs(d - 5.0) < 1e-3


def test_two_body_trajectory_matches_closed_form():
    xi, d0 = 5.0, 9.0
    cfg, p = pair(d0, xi, v_max=1e3, disp_cap=0.05 * xi, dt_max=0.01)
    worst = 0.0
    while cfg.time < 1.0:
        cfg = step(cfg, p, None).config
        d2 = float(np.sum((cfg.positions[1] - cfg.positions[0]) ** 2))
        exact = two_body_d2(cfg.time, d0, xi)
        worst = max(worst, abs(d2 - exact) / exact)
    assert worst < 0.01


def test_thirty_agents_reach_comfortable_distance():
    p = ModelParams(N=30, n=1, xi=10.0, seed=4)
    rec = simulate(p)
    assert rec.termination.kind == "steady_state"
    assert nnd(rec.final)[0] == pytest.approx(10.0, rel=0.05)


# ---------------------------------------------------------------- initial conditions


def test_random_initial_in_square_and_reproducible():
    p = ModelParams(N=2, L=15.0, seed=123)
    a, b = random_initial(p), random_initial(p)
    assert np.array_equal(a.positions, b.positions)
    assert a.min_pairwise_distance() > 0
    assert np.all((a.positions >= 0) & (a.positions <= 15.0))
    assert np.array_equal(a.headings, np.tile([1.0, 0.0], (2, 1)))
    assert np.array_equal(a.velocities, np.zeros((2, 2)))


def test_random_initial_prefix_stable_across_N():
    small = random_initial(ModelParams(N=7, seed=99))
    large = random_initial(ModelParams(N=40, seed=99))
    assert np.array_equal(small.positions, large.positions[:7])
    assert np.all((large.positions >= 0) & (large.positions <= 15.0))


def test_different_seeds_differ():
    a = random_initial(ModelParams(N=5, seed=1))
    b = random_initial(ModelParams(N=5, seed=2))
    assert not np.array_equal(a.positions, b.positions)


# ---------------------------------------------------------------- properties


def test_determinism_bit_identical():
    p = ModelParams(N=12, n=3, xi=4.0, alpha_r=120.0, alpha_noise=5.0, max_iters=300, seed=17)
    a = simulate(p, snapshot_stride=7)
    b = simulate(p, snapshot_stride=7)
    assert a.termination == b.termination
    assert len(a.snapshots) == len(b.snapshots)
    for sa, sb in zip(a.snapshots, b.snapshots):
        assert sa.time == sb.time
        assert np.array_equal(sa.positions, sb.positions)
        assert np.array_equal(sa.centroid, sb.centroid)
    assert a.drift_history == b.drift_history


@settings(max_examples=150, deadline=None)
@given(
    st.integers(2, 3),
    st.floats(0.5, 20),
    st.floats(0.2, 3),
    st.floats(2, 30),
    st.integers(0, 2**32 - 1),
)
def test_collision_avoidance_step(N, xi, R_sr, v_max, seed):
    p = ModelParams(N=N, n=1, xi=xi, R_sr=R_sr, v_max=v_max)
    assert p.displacement_cap <= 0.2 * min(xi, R_sr) + 1e-15
    pos = np.random.default_rng(seed).uniform(0, 2 * xi, size=(N, 2))
    cfg = Configuration(pos)
    m0 = cfg.min_pairwise_distance()
    assume(1e-6 < m0 < xi)
    m1 = step(cfg, p, None).config.min_pairwise_distance()
    assert m1 >= m0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 30.0), st.floats(0.01, 2.0))
def test_displacement_cap_and_noise_bound(seed, alpha_noise, disp_cap):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 20))
    p = ModelParams(
        N=N, n=int(rng.integers(1, N)), xi=float(rng.uniform(1, 15)), alpha_r=float(rng.uniform(10, 360)),
        alpha_noise=alpha_noise, disp_cap=disp_cap, v_max=float(rng.uniform(2, 30)),
    )
    cfg = Configuration(rng.uniform(0, 15, size=(N, 2)))
    raw = velocity_field(cfg, select_neighbors(cfg, p), p)
    res = step(cfg, p, np.random.default_rng(seed))
    disp = np.hypot(*(res.config.positions - cfg.positions).T)
    assert disp.max() <= disp_cap * (1 + 1e-12)
    assert 0 < res.dt_used <= p.dt_max
    v = res.config.velocities
    moving = np.hypot(*raw.T) > 1e-9
    a, b = raw[moving], v[moving]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    ang = np.degrees(np.abs(np.arctan2(cross, np.sum(a * b, axis=1))))
    assert np.all(ang <= alpha_noise + 1e-6)


def test_velocity_heading_mode_follows_motion():
    cfg, p = pair(1.0, 5.0, heading_mode="velocity")
    res = step(cfg, p, None)
    # agent 0 is pushed away from its mate, i.e. towards -x
    assert np.allclose(res.config.headings[0], [-1.0, 0.0])
    assert np.allclose(res.config.headings[1], [1.0, 0.0])
    fixed = step(cfg, p.replace(heading_mode="fixed"), None)
    assert np.array_equal(fixed.config.headings, cfg.headings)


def test_velocity_heading_mode_keeps_heading_at_rest():
    cfg = Configuration([[0, 0], [5, 0]], [[0, 1], [0, -1]])
    p = ModelParams(N=2, xi=5.0, heading_mode="velocity")
    res = step(cfg, p, None)
    assert np.array_equal(res.config.headings, cfg.headings)


def test_run_snapshots_are_centroid_relative():
    p = ModelParams(N=6, n=2, alpha_r=60, max_iters=50, seed=3)
    rec = simulate(p, snapshot_stride=10)
    assert [s.iteration for s in rec.snapshots] == [0, 10, 20, 30, 40, 50]
    for s in rec.snapshots:
        assert np.allclose(s.positions.mean(axis=0), 0, atol=1e-9)
    last = rec.snapshots[-1]
    assert np.allclose(last.positions + last.centroid, rec.final.positions)
