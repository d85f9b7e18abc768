import numpy as np

from cvmbqc.rng import StreamKey, standard_normals


def test_deterministic():
    assert np.array_equal(standard_normals(1, 0, 0, 100), standard_normals(1, 0, 0, 100))


def test_slices_agree_with_full_draw():
    full = standard_normals(3, 2, 0, 50)
    assert np.array_equal(full[17:33], standard_normals(3, 2, 17, 33))
    assert StreamKey(3, 20).normal(2) == full[20]


def test_keys_separate_streams():
    a = standard_normals(1, 0, 0, 10)
    assert not np.allclose(a, standard_normals(1, 1, 0, 10))
    assert not np.allclose(a, standard_normals(2, 0, 0, 10))


def test_moments():
    z = standard_normals(0, 0, 0, 200_000)
    assert abs(z.mean()) < 0.01 and abs(z.var() - 1) < 0.01
    assert np.all(np.isfinite(z))
