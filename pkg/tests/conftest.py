import pytest

from gouq import _accel


@pytest.fixture(params=["numba", "numpy"])
def each_backend(request):
    if request.param == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    prev = _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(prev)
