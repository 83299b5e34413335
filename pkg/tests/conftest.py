import itertools

import pytest

from ordpat.plmaps import builtin_map, logistic
from ordpat.series import map_orbit


def compositions(total, first_min=1):
    """Yield the tuples of positive integers of the given sum, with at
    least two parts and a first part >= first_min."""
    for cuts in range(1, total):
        for positions in itertools.combinations(range(1, total), cuts):
            bounds = (0,) + positions + (total,)
            parts = tuple(b - a for a, b in zip(bounds, bounds[1:]))
            if parts[0] >= first_min:
                yield parts


@pytest.fixture(scope='session')
def tent():
    return builtin_map('tent')


@pytest.fixture(scope='session')
def sawtooth2():
    return builtin_map('sawtooth', 2)


@pytest.fixture(scope='session')
def sawtooth3():
    return builtin_map('sawtooth', 3)


@pytest.fixture(scope='session')
def logistic_orbit():
    """10^4 binary64 iterates of the logistic map from 0.3."""
    return map_orbit(logistic, 0.3, 10**4)


@pytest.fixture
def home(tmp_path, monkeypatch):
    """An empty home directory, without any ordpat configuration."""
    monkeypatch.setenv('HOME', str(tmp_path))
    monkeypatch.setenv('APPDATA', str(tmp_path))
    monkeypatch.delenv('ORDPAT_CACHE_DIR', raising=False)
    return tmp_path
