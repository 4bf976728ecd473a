import shutil

import pytest

from config import PACKAGE_DIR, Settings
from embedding import TriangleAction
from families import even_family, six_point_example
from hecke_search import HeckeParams, build_action
from perm_core import PointSet

D17_X = "(0,7)(1,5)(2,6)(3,11)(4,13)(8,14)(10,16)(12,inf)"
D17_Y = "(0,9,14,16,1,6,15,inf)(2,13,8,12,11,4,3,7)"


@pytest.fixture
def d17_params() -> HeckeParams:
    return HeckeParams(p=17, k=8, ell=9, theta=16, a=1, b=8, c=10, d=1, e=0, f=4, nabla=1, r=4)


@pytest.fixture
def d17_action(d17_params) -> TriangleAction:
    return build_action(d17_params)


@pytest.fixture
def d17_parsed() -> TriangleAction:
    return TriangleAction.parse(D17_X, D17_Y, domain=PointSet.projective_line(17), p=17)


@pytest.fixture
def even4() -> TriangleAction:
    return even_family(4)


@pytest.fixture
def six_point() -> TriangleAction:
    return six_point_example()


@pytest.fixture
def tmp_settings(tmp_path) -> Settings:
    """Settings whose witness cache is a private copy of the shipped one."""
    shutil.copy(PACKAGE_DIR / "data" / Settings.WITNESS_FILE, tmp_path / Settings.WITNESS_FILE)
    return Settings(cache_dir=tmp_path)


@pytest.fixture
def empty_settings(tmp_path) -> Settings:
    cache = tmp_path / "empty"
    cache.mkdir()
    return Settings(cache_dir=cache)
