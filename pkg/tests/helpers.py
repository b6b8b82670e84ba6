import pytest


def approx(expected, rel=1e-6, abs=0.0):
    """``pytest.approx`` without the silent 1e-12 absolute floor; our lengths are ~1e-19 m."""
    return pytest.approx(expected, rel=rel, abs=abs)
