"""Shared, lazily built pipeline objects.

Building a symmetry representation (blocking, canonical gauges, fusion
data) is the expensive step for the larger models, so every stage is
cached per model name for the whole session.
"""

from functools import lru_cache

import pytest

from mpugauge import defects, gauging, models, symmetry

MODEL_NAMES = sorted(models.BUILTIN_MODELS)


@lru_cache(maxsize=None)
def rep_of(name):
    return symmetry.build_rep(models.get_model(name))


@lru_cache(maxsize=None)
def ad_of(name):
    return defects.fix_gauge(defects.action_tensors(rep_of(name)))


@lru_cache(maxsize=None)
def ds_of(name):
    return defects.build_defect_system(ad_of(name))


@lru_cache(maxsize=None)
def omega_of(name):
    return symmetry.compute_omega(rep_of(name))


@lru_cache(maxsize=None)
def zeta_of(name):
    return symmetry.compute_zeta(rep_of(name))


@lru_cache(maxsize=None)
def bi_of(name):
    return defects.block_independence(ad_of(name))


@lru_cache(maxsize=None)
def gauged_of(name):
    return gauging.promote(ds_of(name))


@lru_cache(maxsize=None)
def std_law_of(name):
    return gauging.gauss_laws(ds_of(name))


@lru_cache(maxsize=None)
def modified_of(name):
    return gauging.state_level_gauging(ds_of(name))


@pytest.fixture(scope="session")
def pipe():
    """Accessor namespace for the cached pipeline stages."""
    class Pipe:
        rep = staticmethod(rep_of)
        ad = staticmethod(ad_of)
        ds = staticmethod(ds_of)
        omega = staticmethod(omega_of)
        zeta = staticmethod(zeta_of)
        bi = staticmethod(bi_of)
        gauged = staticmethod(gauged_of)
        std_law = staticmethod(std_law_of)
        modified = staticmethod(modified_of)
    return Pipe
