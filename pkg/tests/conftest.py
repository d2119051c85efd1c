"""Shared fixtures: reference matrices and a synthetic image, built once."""

import numpy as np
import pytest

from pbpqlp import gen_low_rank_plus_noise, write_pgm


@pytest.fixture(scope="session")
def gap300():
    """The n=300 planted-rank reference matrix and its spectrum."""
    return gen_low_rank_plus_noise(300, 20, 0.005, seed=0)


@pytest.fixture(scope="session")
def gap1000():
    """The n=1000 planted-rank reference matrix and its spectrum."""
    return gen_low_rank_plus_noise(1000, 20, 0.005, seed=0)


@pytest.fixture(scope="session")
def photo_path(tmp_path_factory):
    """A deterministic synthetic photograph, 256 x 320, written as PGM."""
    rng = np.random.default_rng(2024)
    rows = np.linspace(0.0, 1.0, 256)[:, None]
    cols = np.linspace(0.0, 2.0 * np.pi, 320)[None, :]
    image = (
        0.45
        + 0.3 * rows * np.cos(3.0 * cols)
        + 0.2 * np.sin(8.0 * rows * np.pi) * np.exp(-cols / 4.0)
        + 0.02 * rng.standard_normal((256, 320))
    )
    path = tmp_path_factory.mktemp("images") / "photo.pgm"
    write_pgm(np.clip(image, 0.0, 1.0), path)
    return path
