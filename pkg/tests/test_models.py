import numpy as np
import pytest

from majority_pca.errors import ValidationError
from majority_pca.lattice import all_plus, run, step
from majority_pca.models import (
    ConstantGamma,
    FixedOffsets,
    Geometric,
    ProofSchedule,
    RangeSchedule,
    ScheduledBox,
    UniformBox,
    UpdateParams,
    WholeGrid,
    build_model,
    build_schedule,
    gamma_at,
    odd_side,
    side_at,
)


def test_gamma_examples():
    assert gamma_at(RangeSchedule(Geometric(48, 2), 5), 0) == 48
    assert gamma_at(RangeSchedule(ProofSchedule(48, 2, 2), 5), 1) == 48 * 4 * 2
    sched = RangeSchedule(ConstantGamma(25), 5)
    assert {gamma_at(sched, t) for t in range(5)} == {25}


def test_gamma_out_of_range():
    with pytest.raises(ValidationError):
        gamma_at(RangeSchedule(ConstantGamma(9), 3), 3)


@pytest.mark.parametrize("gamma, side", [(1, 1), (9, 3), (10, 5), (25, 5), (26, 7), (49, 7), (50, 9)])
def test_odd_side(gamma, side):
    assert odd_side(gamma) == side
    assert side % 2 == 1 and side**2 >= gamma
    assert side == 1 or (side - 2) ** 2 < gamma


def test_side_examples():
    assert side_at(RangeSchedule(ConstantGamma(25), 4), 2, 100) == 5
    assert side_at(RangeSchedule(ConstantGamma(26), 4), 2, 100) == 7
    assert side_at(RangeSchedule(ConstantGamma(10**6), 4), 1, 121) == 121
    assert side_at(RangeSchedule(ConstantGamma(10**6), 4), 1, 120) == 119


@pytest.mark.parametrize("kind", [Geometric(3, 2), ProofSchedule(3, 2, 2), Geometric(1, 1.5)])
def test_side_shrinks_toward_final_step(kind):
    sched = RangeSchedule(kind, 12)
    sides = [side_at(sched, u, 301) for u in range(1, 13)]
    assert sides == sorted(sides, reverse=True)
    assert sides[0] > sides[-1]


def test_first_forward_step_uses_last_backward_index():
    sched = RangeSchedule(ProofSchedule(48, 2, 2), 5)
    assert side_at(sched, 1, 1001) == odd_side(gamma_at(sched, 4)) == 157
    assert side_at(sched, 5, 1001) == odd_side(96) == 11


@pytest.mark.parametrize(
    "kind", [ConstantGamma(0), Geometric(0.5, 2), Geometric(2, 1.0), ProofSchedule(2, 0.9, 2)]
)
def test_bad_schedules(kind):
    with pytest.raises(ValidationError):
        RangeSchedule(kind, 3)


def test_catalog_models():
    toom = build_model({"name": "toom-nec", "epsilon": 0.05})
    assert toom.sampler == FixedOffsets(((0, 0), (0, 1), (1, 0)))
    assert toom.params.b == 3
    sym = build_model({"name": "sym5", "epsilon": 0.2})
    assert set(sym.sampler.offsets) == {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}
    assert sym.params.b == 5
    mf = build_model({"name": "meanfield", "b": 5, "epsilon": 0.3, "R": 120, "seed": 1})
    assert mf.sampler == WholeGrid()
    box = build_model({"name": "intermediate-fixed", "b": 5, "l": 5, "epsilon": 0.15})
    assert box.sampler == UniformBox(5)
    sch = build_model(
        {"name": "intermediate-scheduled", "b": 3, "epsilon": 0.01, "schedule": {"kind": "proof", "g": 48, "p": 2, "T": 5}}
    )
    assert sch.sampler.schedule == RangeSchedule(ProofSchedule(48.0, 2.0, 2), 5)
    custom = build_model({"name": "custom", "b": 3, "epsilon": 0.1, "offsets": [[0, 0], [1, 1], [-1, 0]]})
    assert custom.sampler.offsets == ((0, 0), (1, 1), (-1, 0))


@pytest.mark.parametrize(
    "config",
    [
        {"name": "intermediate-fixed", "b": 4, "l": 5, "epsilon": 0.1},
        {"name": "intermediate-fixed", "b": 5, "l": 4, "epsilon": 0.1},
        {"name": "intermediate-fixed", "b": 5, "epsilon": 0.1},
        {"name": "custom", "b": 3, "epsilon": 0.1, "offsets": [[0, 0], [1, 0]]},
        {"name": "custom", "b": 3, "epsilon": 0.1, "offsets": [[0, 0], [1, 0], [0, 1], [1, 1], [2, 2]]},
        {"name": "toom-nec", "b": 5, "epsilon": 0.1},
        {"name": "sym5", "epsilon": 0.6},
        {"name": "nope", "epsilon": 0.1},
        {"name": "sym5", "epsilon": 0.1, "colour": "red"},
        {"name": "meanfield", "b": 3},
        {"name": "intermediate-scheduled", "b": 3, "epsilon": 0.1, "schedule": {"kind": "spiral", "T": 3}},
        {"name": "intermediate-scheduled", "b": 3, "epsilon": 0.1, "schedule": {"kind": "geometric", "g": 4, "T": 3}},
    ],
)
def test_invalid_models(config):
    with pytest.raises(ValidationError):
        build_model(config)


def test_schedule_horizon_from_run_length():
    sched = build_schedule({"kind": "geometric", "g": 4, "p": 2}, b=3, horizon=7)
    assert sched.horizon == 7
    with pytest.raises(ValidationError):
        build_schedule({"kind": "geometric", "g": 4, "p": 2, "T": 3}, b=3, horizon=7)


def test_update_params():
    assert UpdateParams(5, 0.2).k == 3
    with pytest.raises(ValidationError):
        UpdateParams(2, 0.1)
    with pytest.raises(ValidationError):
        UpdateParams(3, -0.1)


def test_whole_grid_equals_box_of_grid_side():
    R = 13
    rng = np.random.default_rng(0)
    grid = np.where(rng.random((R, R)) < 0.6, 1, -1).astype(np.int8)
    p = UpdateParams(5, 0.2)
    for t in range(1, 5):
        assert np.array_equal(step(grid, WholeGrid(), p, t, 77), step(grid, UniformBox(R), p, t, 77))


def test_scheduled_box_saturates_to_whole_grid():
    R = 15
    grid = np.where(np.random.default_rng(1).random((R, R)) < 0.5, 1, -1).astype(np.int8)
    sched = ScheduledBox(RangeSchedule(ConstantGamma(10**6), 3))
    p = UpdateParams(3, 0.1)
    assert np.array_equal(step(grid, sched, p, 2, 5), step(grid, WholeGrid(), p, 2, 5))


def test_toom_erodes_minus_island():
    model = build_model({"name": "toom-nec", "epsilon": 0.0})
    grid = all_plus(20)
    grid[8:11, 8:11] = -1
    traj = run(grid, model, 10, seed=0)
    assert traj.densities[-1] == 1.0
    assert (traj.final == 1).all()
    assert traj.densities[1] < 1.0  # erosion is gradual
