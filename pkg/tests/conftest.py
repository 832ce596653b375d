import pytest
from hypothesis import settings

from curvclass import Geometry, builtin_metric, classify_all

settings.register_profile("suite", deadline=None, max_examples=40)
settings.load_profile("suite")


_geometry_cache = {}
_report_cache = {}


@pytest.fixture
def geometry():
    def get(name: str) -> Geometry:
        if name not in _geometry_cache:
            _geometry_cache[name] = Geometry(builtin_metric(name))
        return _geometry_cache[name]

    return get


@pytest.fixture
def report():
    def get(name: str, seed: int = 0):
        key = (name, seed)
        if key not in _report_cache:
            _report_cache[key] = classify_all(builtin_metric(name), seed=seed)
        return _report_cache[key]

    return get
