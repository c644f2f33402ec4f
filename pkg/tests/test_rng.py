import numpy as np

from majority_pca import rng


def test_value_is_pure_function_of_key():
    a = rng.uniform(7, 3, 10, 11, 2)
    assert rng.uniform(7, 3, 10, 11, 2) == a
    others = {
        rng.uniform(8, 3, 10, 11, 2),
        rng.uniform(7, 4, 10, 11, 2),
        rng.uniform(7, 3, 11, 11, 2),
        rng.uniform(7, 3, 10, 12, 2),
        rng.uniform(7, 3, 10, 11, 3),
    }
    assert a not in others and len(others) == 5


def test_array_path_matches_scalar_path():
    xs, ys = np.meshgrid(np.arange(4), np.arange(5), indexing="ij")
    c = rng.cell_counters(xs, ys, np.full(xs.shape, 3))
    u = rng.bits_to_unit(rng.keyed_bits(rng.step_key(99, 2), c))
    assert u[2, 4] == rng.uniform(99, 2, 2, 4, 3)


def test_unit_draws_look_uniform():
    c = rng.cell_counters(np.arange(200)[:, None], np.arange(500)[None, :], 0)
    u = rng.bits_to_unit(rng.keyed_bits(rng.step_key(1, 1), c)).ravel()
    assert u.min() >= 0.0 and u.max() < 1.0
    counts, _ = np.histogram(u, bins=20, range=(0, 1))
    expected = len(u) / 20
    chi2 = ((counts - expected) ** 2 / expected).sum()
    assert chi2 < 50  # 19 dof, p ~ 1e-4
    assert abs(np.corrcoef(u[:-1], u[1:])[0, 1]) < 0.01


def test_index_draws_cover_range_evenly():
    c = rng.cell_counters(np.arange(300)[:, None], np.arange(300)[None, :], 1)
    idx = rng.bits_to_index(rng.keyed_bits(rng.step_key(5, 9), c), 25).ravel()
    counts = np.bincount(idx.astype(int), minlength=25)
    assert len(counts) == 25
    expected = idx.size / 25
    assert ((counts - expected) ** 2 / expected).sum() < 60


def test_spawned_streams_differ():
    seeds = {rng.spawn_seed(0, r) for r in range(1000)}
    assert len(seeds) == 1000
    assert rng.spawn_seed(0, 0) != rng.spawn_seed(1, 0)
